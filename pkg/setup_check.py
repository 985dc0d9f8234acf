"""
Setup verification script to check if all dependencies are installed correctly.
"""
import os
import sys


def check_python_version():
    """Check if Python version is 3.9 or higher."""
    version = sys.version_info
    if version.major < 3 or (version.major == 3 and version.minor < 9):
        print("❌ Python 3.9+ is required. Current version:", sys.version)
        return False
    print(f"✅ Python version: {version.major}.{version.minor}.{version.micro}")
    return True


def check_dependencies():
    """Check if all required packages are installed."""
    required_packages = {
        "numpy": "numpy",
        "scipy": "scipy",
        "pandas": "pandas",
        "streamlit": "streamlit",
        "python-dotenv": "dotenv",
        "pytest": "pytest",
        "hypothesis": "hypothesis",
    }

    missing_packages = []
    for name, module in required_packages.items():
        try:
            __import__(module)
            print(f"✅ {name} is installed")
        except ImportError:
            print(f"❌ {name} is NOT installed")
            missing_packages.append(name)

    return len(missing_packages) == 0, missing_packages


def check_environment():
    """Report the environment settings the CLI will pick up."""
    from config.settings import get_default_seed, get_log_level, get_output_dir, get_workers

    try:
        print(f"✅ LOGGAS_WORKERS = {get_workers()}")
        print(f"✅ LOGGAS_SEED = {get_default_seed()}")
    except ValueError as e:
        print(f"❌ Invalid numeric setting in environment: {e}")
        return False
    print(f"✅ LOGGAS_OUTPUT_DIR = {get_output_dir()}")
    print(f"✅ LOGGAS_LOG_LEVEL = {get_log_level()}")
    return True


def check_project_structure():
    """Check if project structure is correct."""
    required_files = [
        "cli.py",
        "app.py",
        "pyproject.toml",
        "config/settings.py",
        "loggas/configuration.py",
        "loggas/energy.py",
        "loggas/sampler.py",
        "loggas/partition.py",
        "loggas/diagnostics.py",
        "utils/experiment_manager.py",
        "utils/artifacts.py",
        "utils/validators.py",
    ]

    missing_files = []
    for file_path in required_files:
        if os.path.exists(file_path):
            print(f"✅ {file_path} exists")
        else:
            print(f"❌ {file_path} is missing")
            missing_files.append(file_path)

    return len(missing_files) == 0


def main():
    """Run all checks."""
    print("=" * 50)
    print("Log-gas DLR toolkit - Setup Verification")
    print("=" * 50)
    print()

    all_checks_passed = True

    print("1. Checking Python version...")
    if not check_python_version():
        all_checks_passed = False
    print()

    print("2. Checking dependencies...")
    deps_ok, missing = check_dependencies()
    if not deps_ok:
        all_checks_passed = False
        print(f"\n   Install missing packages with: pip install {' '.join(missing)}")
    print()

    print("3. Checking environment settings...")
    if deps_ok and not check_environment():
        all_checks_passed = False
    print()

    print("4. Checking project structure...")
    if not check_project_structure():
        all_checks_passed = False
    print()

    print("=" * 50)
    if all_checks_passed:
        print("✅ All checks passed! You're ready to run experiments.")
        print("\n   Run: loggas-dlr partition --set n=2 --set beta=2")
    else:
        print("⚠️  Some checks failed. Please fix the issues above.")
    print("=" * 50)
    return 0 if all_checks_passed else 1


if __name__ == "__main__":
    sys.exit(main())
