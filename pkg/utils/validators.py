"""
Input validation functions for experiment configuration fields.
"""
import math
from typing import Any, List, Tuple

from config.settings import Command, InteractionKind


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _is_integer(value: Any) -> bool:
    if isinstance(value, bool):
        return False
    if isinstance(value, int):
        return True
    return isinstance(value, float) and value.is_integer()


class Validator:
    """Static methods for validating experiment configuration values."""

    @staticmethod
    def validate_command(command: Any) -> Tuple[bool, Any]:
        """
        Validate the experiment command name.

        Args:
            command: Command string such as "verify-dlr"

        Returns:
            Tuple of (is_valid, Command or error_message)
        """
        if not command or not isinstance(command, str):
            return False, "Command cannot be empty."
        try:
            return True, Command(command.strip().lower())
        except ValueError:
            choices = ", ".join(c.value for c in Command)
            return False, f"Unknown command '{command}'. Choose one of: {choices}."

    @staticmethod
    def validate_n(n: Any) -> Tuple[bool, Any]:
        """
        Validate the particle count.

        Rules:
        - Integer, at least 1

        Args:
            n: Particle count

        Returns:
            Tuple of (is_valid, int or error_message)
        """
        if not _is_integer(n):
            return False, f"n must be an integer, got {n!r}."
        if int(n) < 1:
            return False, f"n must be at least 1, got {n}."
        return True, int(n)

    @staticmethod
    def validate_beta(beta: Any) -> Tuple[bool, Any]:
        """
        Validate the inverse temperature.

        Args:
            beta: Inverse temperature

        Returns:
            Tuple of (is_valid, float or error_message)
        """
        if not _is_number(beta) or not math.isfinite(beta):
            return False, f"beta must be a finite number, got {beta!r}."
        if beta <= 0:
            return False, f"beta must be positive, got {beta}."
        return True, float(beta)

    @staticmethod
    def validate_model(model: Any) -> Tuple[bool, Any]:
        """Validate the interaction model name ("periodic" or "non-periodic")."""
        if not isinstance(model, str):
            return False, f"model must be a string, got {model!r}."
        try:
            return True, InteractionKind(model.strip().lower())
        except ValueError:
            return False, f"Unknown model '{model}'. Choose 'periodic' or 'non-periodic'."

    @staticmethod
    def validate_window(window: Any) -> Tuple[bool, Any]:
        """
        Validate a window given as a [lo, hi] pair.

        Rules:
        - Exactly two finite numbers
        - lo < hi

        Returns:
            Tuple of (is_valid, (lo, hi) or error_message)
        """
        if not isinstance(window, (list, tuple)) or len(window) != 2:
            return False, f"window must be a [lo, hi] pair, got {window!r}."
        lo, hi = window
        if not (_is_number(lo) and _is_number(hi)) or not (math.isfinite(lo) and math.isfinite(hi)):
            return False, f"window bounds must be finite numbers, got {window!r}."
        if not lo < hi:
            return False, f"window [{lo}, {hi}] is empty."
        return True, (float(lo), float(hi))

    @staticmethod
    def validate_positive_int(value: Any, name: str) -> Tuple[bool, Any]:
        if not _is_integer(value) or int(value) < 1:
            return False, f"{name} must be a positive integer, got {value!r}."
        return True, int(value)

    @staticmethod
    def validate_nonnegative_int(value: Any, name: str) -> Tuple[bool, Any]:
        if not _is_integer(value) or int(value) < 0:
            return False, f"{name} must be a nonnegative integer, got {value!r}."
        return True, int(value)

    @staticmethod
    def validate_positive_float(value: Any, name: str) -> Tuple[bool, Any]:
        if not _is_number(value) or not math.isfinite(value) or value <= 0:
            return False, f"{name} must be a positive number, got {value!r}."
        return True, float(value)

    @staticmethod
    def validate_fraction(value: Any, name: str) -> Tuple[bool, Any]:
        """Validate a number in [0, 1]."""
        if not _is_number(value) or not 0.0 <= value <= 1.0:
            return False, f"{name} must lie in [0, 1], got {value!r}."
        return True, float(value)

    @staticmethod
    def validate_increasing(values: Any, name: str) -> Tuple[bool, Any]:
        """
        Validate a nonempty strictly increasing list of positive numbers.

        Used for radius schedules, window lengths and smoothing scales.

        Returns:
            Tuple of (is_valid, tuple of floats or error_message)
        """
        if not isinstance(values, (list, tuple)) or not values:
            return False, f"{name} must be a nonempty list, got {values!r}."
        if not all(_is_number(v) and math.isfinite(v) and v > 0 for v in values):
            return False, f"{name} entries must be positive finite numbers."
        cleaned: List[float] = [float(v) for v in values]
        if any(b <= a for a, b in zip(cleaned, cleaned[1:])):
            return False, f"{name} must be strictly increasing."
        return True, tuple(cleaned)

    @staticmethod
    def validate_seed(seed: Any) -> Tuple[bool, Any]:
        """Validate a root seed (unsigned 64-bit integer)."""
        if not _is_integer(seed):
            return False, f"seed must be an integer, got {seed!r}."
        seed = int(seed)
        if not 0 <= seed < 2 ** 64:
            return False, f"seed must fit in an unsigned 64-bit integer, got {seed}."
        return True, seed

    @staticmethod
    def validate_path(path: Any, name: str) -> Tuple[bool, Any]:
        if not path or not isinstance(path, str):
            return False, f"{name} must be a nonempty path string."
        return True, path.strip()
