import math

import pytest

from config.settings import PartitionMethod
from loggas.configuration import Window, empty_configuration, make_configuration
from loggas.energy import InteractionModel, move_function
from loggas.errors import DegenerateWeight, DomainError, TooLarge
from loggas.partition import (
    PartitionValue,
    conditional_partition,
    stirling_profile,
    z_conditional_estimate,
    z_exact,
    z_quadrature,
)
from loggas.sampler import GasParams, KernelSpec, chain_rng


class TestExact:
    @pytest.mark.parametrize("n, beta, expected", [(2, 2.0, 2.0), (3, 2.0, 6.0), (1, 1.0, 1.0), (4, 2.0, 24.0)])
    def test_gamma_ratio(self, n, beta, expected):
        z = z_exact(GasParams(n=n, beta=beta))
        assert z.method is PartitionMethod.EXACT
        assert z.std_error == 0.0
        assert z.value == pytest.approx(expected, rel=1e-12)

    def test_beta_four(self):
        # Gamma(5) / Gamma(3)^2 = 24 / 4
        assert z_exact(GasParams(n=2, beta=4.0)).value == pytest.approx(6.0, rel=1e-12)

    def test_exact_rejects_error_bar(self):
        with pytest.raises(DomainError):
            PartitionValue(log_value=0.0, method=PartitionMethod.EXACT, std_error=0.1)


class TestQuadrature:
    @pytest.mark.parametrize("n, beta", [(1, 1.0), (2, 1.0), (2, 2.0), (2, 4.0), (3, 2.0)])
    def test_matches_closed_form(self, n, beta):
        params = GasParams(n=n, beta=beta)
        exact = z_exact(params).value
        quad = z_quadrature(params)
        assert quad.method is PartitionMethod.QUADRATURE
        assert abs(quad.value - exact) / exact <= 1e-3

    def test_too_large(self):
        with pytest.raises(TooLarge):
            z_quadrature(GasParams(n=4, beta=2.0))


class TestMonteCarlo:
    def test_empty_interior(self, rng):
        spec = KernelSpec(
            inner=Window(-1.0, 1.0), outer_radius=4.0, model=InteractionModel.non_periodic(),
            beta=1.0, fixed_count=0, exterior=make_configuration([2.0]),
        )
        z = z_conditional_estimate(spec, 10, rng)
        assert z.log_value == 0.0 and z.std_error == 0.0

    def test_exterior_inside_inner(self, rng):
        spec = KernelSpec(
            inner=Window(-1.0, 1.0), outer_radius=4.0, model=InteractionModel.non_periodic(),
            beta=1.0, fixed_count=1, exterior=make_configuration([0.0]),
        )
        with pytest.raises(DegenerateWeight):
            z_conditional_estimate(spec, 10, rng)

    def test_reference_swap_is_a_move_function_factor(self):
        model = InteractionModel.non_periodic()
        inner = Window(-1.0, 1.0)
        ext = make_configuration([-2.5, 1.7, 3.2])
        first, second = make_configuration([-0.5, 0.3]), make_configuration([0.1, 0.9])

        def spec(reference):
            return KernelSpec(
                inner=inner, outer_radius=8.0, model=model, beta=2.0,
                fixed_count=2, exterior=ext, reference=reference,
            )

        moved = move_function(model, second, first.union(ext), inner, Window.centered(8.0))
        same_draws = (z_conditional_estimate(spec(first), 4000, chain_rng(6)),
                      z_conditional_estimate(spec(second), 4000, chain_rng(6)))
        assert same_draws[1].log_value - 2.0 * moved == pytest.approx(same_draws[0].log_value, abs=1e-10)

        a = z_conditional_estimate(spec(first), 4000, chain_rng(7))
        b = z_conditional_estimate(spec(second), 4000, chain_rng(8))
        gap = abs(b.log_value - 2.0 * moved - a.log_value)
        assert gap <= 3.0 * math.hypot(a.std_error, b.std_error)

    def test_whole_circle_recovers_partition_function(self):
        params = GasParams(n=2, beta=2.0)
        spec = KernelSpec(
            inner=params.window, outer_radius=2.0, model=params.model, beta=2.0,
            fixed_count=2, exterior=empty_configuration(),
        )
        z = z_conditional_estimate(spec, 20000, chain_rng(3))
        assert z.method is PartitionMethod.MONTE_CARLO
        assert abs(z.log_value - math.log(2.0)) <= 5 * z.std_error + 1e-3

    def test_conditional_partition_single_point(self):
        # E (1 - x/3)^2 for x uniform on [-1, 1] is 1 + 1/27
        z = conditional_partition(make_configuration([3.0]), 1, Window(-1.0, 1.0), 2.0, 10.0, 20000, chain_rng(4))
        assert abs(z.value - (1.0 + 1.0 / 27.0)) <= 5 * z.std_error * z.value + 1e-4

    def test_conditional_partition_no_exterior(self, rng):
        z = conditional_partition(empty_configuration(), 1, Window(-1.0, 1.0), 2.0, 10.0, 100, rng)
        assert z.log_value == pytest.approx(0.0, abs=1e-15)
        assert conditional_partition(empty_configuration(), 0, Window(-1.0, 1.0), 2.0, 10.0, 5, rng).log_value == 0.0


class TestStirling:
    def test_profile_settles(self):
        values, diffs = stirling_profile(2.0)
        assert len(values) == 9
        assert len(diffs) == 8
        assert diffs[-1] < diffs[0]
