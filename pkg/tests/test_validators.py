import pytest

from config.settings import Command, InteractionKind
from utils.validators import Validator


class TestCommand:
    def test_known(self):
        assert Validator.validate_command(" Verify-DLR ") == (True, Command.VERIFY_DLR)

    @pytest.mark.parametrize("value", ["", None, 3, "plot"])
    def test_rejected(self, value):
        ok, msg = Validator.validate_command(value)
        assert not ok
        assert isinstance(msg, str)


class TestScalars:
    @pytest.mark.parametrize("value, expected", [(1, 1), (16, 16), (4.0, 4)])
    def test_n_valid(self, value, expected):
        assert Validator.validate_n(value) == (True, expected)

    @pytest.mark.parametrize("value", [0, -3, 2.5, True, "8", None])
    def test_n_invalid(self, value):
        assert Validator.validate_n(value)[0] is False

    def test_beta(self):
        assert Validator.validate_beta(2) == (True, 2.0)
        for bad in (0, -1.0, float("inf"), float("nan"), "2", False):
            assert Validator.validate_beta(bad)[0] is False

    def test_model(self):
        assert Validator.validate_model("non-periodic") == (True, InteractionKind.NON_PERIODIC)
        assert Validator.validate_model("PERIODIC") == (True, InteractionKind.PERIODIC)
        assert Validator.validate_model("torus")[0] is False
        assert Validator.validate_model(1)[0] is False

    def test_seed(self):
        assert Validator.validate_seed(0) == (True, 0)
        assert Validator.validate_seed(2 ** 64 - 1) == (True, 2 ** 64 - 1)
        assert Validator.validate_seed(2 ** 64)[0] is False
        assert Validator.validate_seed(-1)[0] is False
        assert Validator.validate_seed(1.5)[0] is False

    def test_counts(self):
        assert Validator.validate_positive_int(3, "chains") == (True, 3)
        ok, msg = Validator.validate_positive_int(0, "chains")
        assert not ok and "chains" in msg
        assert Validator.validate_nonnegative_int(0, "burn_in") == (True, 0)
        assert Validator.validate_nonnegative_int(-1, "burn_in")[0] is False

    def test_floats(self):
        assert Validator.validate_positive_float(0.1, "delta") == (True, 0.1)
        assert Validator.validate_positive_float(0, "delta")[0] is False
        assert Validator.validate_fraction(1, "fraction_threshold") == (True, 1.0)
        assert Validator.validate_fraction(1.01, "fraction_threshold")[0] is False

    def test_path(self):
        assert Validator.validate_path(" runs ", "out") == (True, "runs")
        assert Validator.validate_path("", "out")[0] is False


class TestSequences:
    def test_window(self):
        assert Validator.validate_window([-1, 1]) == (True, (-1.0, 1.0))

    @pytest.mark.parametrize("value", [[1, 1], [2, -1], [0], [0, float("inf")], "(-1, 1)", [None, 1]])
    def test_window_invalid(self, value):
        assert Validator.validate_window(value)[0] is False

    def test_increasing(self):
        assert Validator.validate_increasing([16, 32, 64.0], "radii") == (True, (16.0, 32.0, 64.0))

    @pytest.mark.parametrize("value", [[], [2, 1], [1, 1], [0, 1], [-1], "16", [1, "2"]])
    def test_increasing_invalid(self, value):
        ok, msg = Validator.validate_increasing(value, "radii")
        assert not ok
        assert "radii" in msg
