# Utilities package


