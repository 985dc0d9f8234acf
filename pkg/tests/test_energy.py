import logging
import math

import numpy as np
import pytest
from hypothesis import assume, given
import hypothesis.strategies as st
from scipy import integrate

from loggas.configuration import Window, empty_configuration, exterior, make_configuration, restrict
from loggas.energy import (
    InteractionModel,
    cost_function,
    default_radius_schedule,
    equally_spaced,
    exterior_weight,
    exterior_weight_limit,
    interaction_energy,
    log_exterior_weight,
    move_function,
    move_function_limit,
    moved_charge_potential,
    pair_potential,
    potential_bound_check,
    potential_mean,
    potential_mean_profile,
    potential_mean_quadrature,
    renormalized_energy_periodic,
    small_argument_gap,
    total_energy,
    v_function,
)
from loggas.errors import (
    CardinalityMismatch,
    DomainError,
    InvalidSchedule,
    SingularOverlap,
    WindowNesting,
)

PLAIN = InteractionModel.non_periodic()


class TestPairPotential:
    def test_plain_values(self):
        assert pair_potential(PLAIN, 1.0) == 0.0
        assert pair_potential(PLAIN, math.e) == pytest.approx(-1.0)
        assert pair_potential(PLAIN, 0.0) == 0.0

    def test_periodic_half_period(self):
        model = InteractionModel.periodic(8)
        assert pair_potential(model, 4.0) == pytest.approx(-math.log(2.0))
        assert pair_potential(model, 8.0) == 0.0
        assert pair_potential(model, -16.0) == 0.0

    def test_non_finite(self):
        with pytest.raises(DomainError):
            pair_potential(PLAIN, float("inf"))

    def test_bad_period(self):
        with pytest.raises(DomainError):
            InteractionModel.periodic(0)

    @given(st.floats(min_value=-100, max_value=100), st.integers(min_value=1, max_value=64))
    def test_even(self, x, n):
        assume(x == 0.0 or abs(x) > 1e-12)
        model = InteractionModel.periodic(n)
        assert pair_potential(model, x) == pytest.approx(pair_potential(model, -x), rel=1e-12, abs=1e-12)

    @given(st.floats(min_value=-30, max_value=30), st.integers(min_value=1, max_value=64), st.integers(-3, 3))
    def test_periodic(self, x, n, k):
        assume(abs(x / n - round(x / n)) > 1e-4)
        model = InteractionModel.periodic(n)
        assert pair_potential(model, x + k * n) == pytest.approx(pair_potential(model, x), rel=1e-7, abs=1e-7)

    def test_small_argument_gap(self):
        for frac in (1e-4, 1e-3, 1e-2):
            x = frac * 16
            assert small_argument_gap(x, 16) <= (math.pi * frac) ** 2 / 3.0

    def test_small_argument_gap_at_zero(self):
        with pytest.raises(DomainError):
            small_argument_gap(0.0, 4)


class TestEnergies:
    def test_three_points(self):
        gamma = make_configuration([0.0, 1.0, 2.0])
        assert interaction_energy(PLAIN, gamma, Window(-1.0, 3.0)) == pytest.approx(-math.log(2.0))
        assert interaction_energy(PLAIN, gamma, Window(-1.0, 1.5)) == 0.0

    def test_empty_and_single(self):
        assert interaction_energy(PLAIN, empty_configuration(), Window(0.0, 1.0)) == 0.0
        assert total_energy(PLAIN, np.array([0.3])) == 0.0

    @given(st.lists(st.floats(-8, 8), min_size=2, max_size=8, unique=True), st.randoms())
    def test_permutation_invariant(self, xs, random):
        model = InteractionModel.periodic(16)
        shuffled = list(xs)
        random.shuffle(shuffled)
        assert total_energy(model, np.array(shuffled)) == pytest.approx(total_energy(model, np.array(xs)), rel=1e-9, abs=1e-9)

    @given(
        st.lists(st.integers(-799, 799), min_size=2, max_size=8, unique=True),
        st.integers(-2000, 2000),
    )
    def test_periodic_energy_translation_invariant(self, ticks, shift):
        model = InteractionModel.periodic(16)
        pts = np.array(ticks) / 100.0
        moved = (pts + shift / 100.0 + 8.0) % 16.0 - 8.0
        assert total_energy(model, moved) == pytest.approx(total_energy(model, pts), rel=1e-7, abs=1e-7)

    @pytest.mark.parametrize("n", [1, 2, 4, 8, 16])
    def test_lattice_renormalized_energy(self, n):
        assert renormalized_energy_periodic(equally_spaced(n), n) == pytest.approx(-math.pi * math.log(2 * math.pi), abs=1e-10)

    def test_renormalized_energy_needs_n_points(self):
        with pytest.raises(CardinalityMismatch):
            renormalized_energy_periodic(make_configuration([0.0]), 2)


class TestMoveFunction:
    def test_example(self):
        gamma = make_configuration([0.0, 3.0])
        eta = make_configuration([0.5])
        value = move_function(PLAIN, eta, gamma, Window(-1.0, 1.0), Window(-5.0, 5.0))
        assert value == pytest.approx(math.log(1.2))

    def test_identity_is_zero(self):
        gamma = make_configuration([-0.5, 0.25, 2.0, -3.0])
        inner = Window(-1.0, 1.0)
        eta = make_configuration([-0.5, 0.25])
        assert move_function(PLAIN, eta, gamma, inner, Window(-4.0, 4.0)) == 0.0

    def test_nesting(self):
        gamma = make_configuration([0.0])
        with pytest.raises(WindowNesting):
            move_function(PLAIN, gamma, gamma, Window(-2.0, 2.0), Window(-1.0, 1.0))

    def test_cardinality(self):
        gamma = make_configuration([0.0, 0.5])
        with pytest.raises(CardinalityMismatch):
            move_function(PLAIN, make_configuration([0.1]), gamma, Window(-1.0, 1.0), Window(-2.0, 2.0))

    def test_eta_outside_inner(self):
        gamma = make_configuration([0.0])
        with pytest.raises(DomainError):
            move_function(PLAIN, make_configuration([1.5]), gamma, Window(-1.0, 1.0), Window(-2.0, 2.0))

    def test_limit_converges_when_exterior_is_finite(self):
        gamma = make_configuration([0.2, 1.5, -3.0])
        eta = make_configuration([-0.4])
        inner = Window(-1.0, 1.0)
        result = move_function_limit(eta, gamma, inner, (2.0, 4.0, 8.0, 16.0), tol=1e-12)
        assert result.converged
        assert result.value == pytest.approx(move_function(PLAIN, eta, gamma, inner, Window(-16.0, 16.0)))
        assert result.history[-1] == result.value
        assert result.outer_radius == 16.0

    def test_limit_reports_non_convergence(self, caplog):
        gamma = make_configuration([0.2, 3.0, 6.0, 12.0, 24.0])
        eta = make_configuration([-0.4])
        with caplog.at_level(logging.WARNING, logger="loggas.energy"):
            result = move_function_limit(eta, gamma, Window(-1.0, 1.0), (2.0, 4.0, 8.0), tol=1e-12)
        assert not result.converged
        assert "not converged" in caplog.text

    def test_limit_bad_schedule(self):
        gamma = make_configuration([0.2])
        with pytest.raises(InvalidSchedule):
            move_function_limit(gamma, gamma, Window(-1.0, 1.0), (4.0, 2.0), tol=1e-6)
        with pytest.raises(InvalidSchedule):
            move_function_limit(gamma, gamma, Window(-1.0, 1.0), (), tol=1e-6)

    def test_default_schedule_covers_reach(self):
        radii = default_radius_schedule(Window(-1.0, 1.0), 100.0)
        assert radii[0] == 1.0
        assert radii[-3] >= 100.0
        assert all(b == 2 * a for a, b in zip(radii, radii[1:]))

    def test_limit_on_perturbed_lattice_matches_direct_sum(self):
        k = np.arange(10_001, dtype=np.float64)
        gamma = make_configuration(np.concatenate([k + 0.1, -(k + 0.1)]))
        eta = make_configuration([-0.6, 0.35])
        inner = Window(-1.0, 1.0)
        result = move_function_limit(eta, gamma, inner, tuple(2.0 ** j for j in range(4, 15)), tol=1e-4)
        increments = np.abs(np.diff(result.history))
        assert result.converged
        assert np.all(increments[-4:][1:] <= increments[-4:][:-1])

        ext = gamma.points[np.abs(gamma.points) > 1.0]
        gained = -np.log(np.abs(eta.points[:, None] - ext[None, :]))
        lost = -np.log(np.abs(np.array([-0.1, 0.1])[:, None] - ext[None, :]))
        direct = math.fsum(gained.ravel().tolist()) - math.fsum(lost.ravel().tolist())
        assert result.value == pytest.approx(direct, abs=1e-9)


class TestExteriorWeight:
    def test_value(self):
        ext = make_configuration([2.0])
        assert exterior_weight(1.0, ext, 2.0, 10.0) == pytest.approx(0.25)

    def test_truncation(self):
        ext = make_configuration([2.0, 20.0])
        assert exterior_weight(1.0, ext, 2.0, 10.0) == pytest.approx(0.25)

    def test_hit(self):
        ext = make_configuration([2.0])
        assert exterior_weight(2.0, ext, 1.0, 10.0) == 0.0
        assert log_exterior_weight(2.0, ext, 1.0, 10.0) is None
        with pytest.raises(SingularOverlap):
            exterior_weight_limit(2.0, ext, 1.0, (4.0, 8.0), 1e-9)

    def test_origin_rejected(self):
        with pytest.raises(DomainError):
            exterior_weight(0.5, make_configuration([0.0]), 1.0, 4.0)

    def test_limit(self):
        ext = make_configuration([-3.0, 2.0])
        result = exterior_weight_limit(0.5, ext, 2.0, (4.0, 8.0, 16.0), 1e-12)
        assert result.converged
        assert result.inner_window is None
        assert math.exp(result.value) == pytest.approx((0.75 * (1 + 0.5 / 3.0)) ** 2)

    def test_symmetric_integers_match_direct_product(self):
        k = np.arange(1.0, 101.0)
        ext = make_configuration(np.concatenate([k, -k]))
        direct = float(np.prod(np.abs(1.0 - 0.5 / ext.points)))
        assert exterior_weight(0.5, ext, 1.0, 100.0) == pytest.approx(direct, rel=1e-12)
        assert exterior_weight(0.5, ext, 1.0, 100.0) == pytest.approx(math.exp(math.fsum(np.log(1.0 - 0.25 / k ** 2))), rel=1e-12)
        # sin(pi x) / (pi x) at x = 1/2, up to the truncated tail
        assert exterior_weight(0.5, ext, 1.0, 100.0) == pytest.approx(2.0 / math.pi, rel=5e-3)

    def test_consistent_with_move_function(self, rng):
        inner = Window(-1.0, 1.0)
        for _ in range(200):
            p = float(rng.choice([4.0, 8.0, 16.0]))
            beta = float(rng.choice([1.0, 2.0, 4.0]))
            count = int(rng.integers(0, 4))
            far = rng.uniform(-p, p, size=12)
            far = far[np.abs(far) > 1.0]
            gamma = make_configuration(np.concatenate([rng.uniform(-1.0, 1.0, size=count), far]))
            eta = make_configuration(rng.uniform(-1.0, 1.0, size=count))
            outer = Window(-p, p)
            ext = exterior(gamma, inner, outer)
            moved = move_function(PLAIN, eta, gamma, inner, outer)
            lhs = -beta * moved + math.fsum(log_exterior_weight(y, ext, beta, p) for y in restrict(gamma, inner))
            rhs = math.fsum(log_exterior_weight(x, ext, beta, p) for x in eta)
            assert abs(lhs - rhs) <= 1e-9


class TestCost:
    def test_single_point_empty_config(self):
        result = cost_function([0.5], empty_configuration(), 8.0, 1e-9)
        assert result.value == 0.0
        assert result.converged

    def test_two_points(self):
        result = cost_function([0.0, 1.0], make_configuration([2.0]), 4.0, 1e-9)
        assert result.value == pytest.approx(math.log(2.0))
        assert result.tuple_size == 2

    def test_repeated_entry(self):
        with pytest.raises(SingularOverlap):
            cost_function([0.5, 0.5], empty_configuration(), 4.0, 1e-9)

    def test_hit(self):
        with pytest.raises(SingularOverlap):
            cost_function([2.0], make_configuration([2.0]), 4.0, 1e-9)

    def test_shifted_lattice_matches_direct_sum(self):
        ys = np.arange(-1000.0, 1001.0) + 0.05
        result = cost_function([0.5], make_configuration(ys), 2048.0, 1e-6)
        direct = math.fsum((-np.log(np.abs(0.5 - ys)) + np.log(np.abs(ys))).tolist())
        assert result.value == pytest.approx(direct, abs=1e-9)
        assert result.truncation_radius == 2048.0


class TestMovedChargePotential:
    def test_scalar_and_array(self):
        eta = make_configuration([0.1])
        gam = make_configuration([-0.2])
        scalar = moved_charge_potential(PLAIN, eta, gam, 3.0)
        arr = moved_charge_potential(PLAIN, eta, gam, np.array([3.0, 4.0]))
        assert isinstance(scalar, float)
        assert arr[0] == pytest.approx(scalar)
        assert scalar == pytest.approx(-math.log(2.9) + math.log(3.2))

    def test_v_function(self):
        assert v_function(0.0) == 0.0
        assert v_function(1.0) == pytest.approx(2.0 * math.log(2.0))
        assert v_function(-1.0) == pytest.approx(2.0 * math.log(2.0))
        with pytest.raises(DomainError):
            v_function(1.5)

    @pytest.mark.parametrize("t", [-0.9, -0.3, 0.0, 0.5, 0.99])
    def test_v_function_against_quadrature(self, t):
        # V(t) = 2 + int_{-1}^{1} log|t - s| ds
        integral, _ = integrate.quad(lambda s: math.log(abs(t - s)) if s != t else 0.0, -1.0, 1.0, points=[t])
        assert v_function(t) == pytest.approx(2.0 + integral, abs=1e-8)

    def test_mean_closed_form_matches_quadrature(self):
        eta = make_configuration([-0.2, 0.3])
        gam = make_configuration([0.1, 0.7])
        for p in (4.0, 8.0, 16.0):
            assert potential_mean(eta, gam, p) == pytest.approx(potential_mean_quadrature(eta, gam, p), abs=1e-7)

    def test_mean_profile_shrinks(self):
        eta = make_configuration([-0.2, 0.3])
        gam = make_configuration([0.1, 0.7])
        profile = potential_mean_profile(eta, gam, (4.0, 8.0, 16.0, 32.0))
        assert all(b <= a for a, b in zip(profile, profile[1:]))
        assert potential_mean_profile(eta, eta, (4.0,)) == (0.0,)

    def test_bounds_hold(self, rng):
        inner = Window(-1.0, 1.0)
        for _ in range(50):
            k = int(rng.integers(1, 6))
            eta = make_configuration(rng.uniform(-1, 1, size=k))
            gam = make_configuration(rng.uniform(-1, 1, size=k))
            xs = np.concatenate([1.0 + rng.exponential(4.0, size=4) + 1.0, -2.0 - rng.exponential(4.0, size=4)])
            assert potential_bound_check(PLAIN, eta, gam, inner, xs) == (0, 0)

    def test_bounds_need_exterior_points(self):
        eta = make_configuration([0.0])
        with pytest.raises(DomainError):
            potential_bound_check(PLAIN, eta, eta, Window(-1.0, 1.0), np.array([0.5]))
