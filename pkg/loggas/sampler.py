"""
Random generation: Bernoulli and Poisson reference processes, Metropolis
chains for the finite periodic log-gas Q_{n,beta}, and the fixed-count
Gibbs-kernel resampler.
"""
import concurrent.futures as cf
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, List, Optional

import numpy as np

from config.settings import BURN_IN_SWEEPS, TARGET_ACCEPTANCE, TUNING_BATCH
from loggas.configuration import (
    PointConfiguration,
    Window,
    empty_configuration,
    exterior,
    make_configuration,
    restrict,
)
from loggas.energy import InteractionModel, total_energy
from loggas.errors import DomainError, ExteriorOverlap, InvalidSchedule

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GasParams:
    """Particle count and inverse temperature of Q_{n,beta}."""
    n: int
    beta: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n!r}")
        if not self.beta > 0:
            raise DomainError(f"beta must be positive, got {self.beta!r}")

    @property
    def window(self) -> Window:
        return Window.centered(self.n)

    @property
    def model(self) -> InteractionModel:
        return InteractionModel.periodic(self.n)

    def default_burn_in(self) -> int:
        return BURN_IN_SWEEPS * self.n

    def default_thin(self) -> int:
        return self.n


@dataclass(frozen=True)
class KernelSpec:
    """
    Canonical Gibbs kernel L_{Lambda, Lambda_p}: fixed count in the inner
    window, exterior frozen, truncation to Lambda_p = [-p/2, p/2].
    """
    inner: Window
    outer_radius: float
    model: InteractionModel
    beta: float
    fixed_count: int
    exterior: PointConfiguration
    reference: Optional[PointConfiguration] = None

    def __post_init__(self):
        if self.fixed_count < 0:
            raise DomainError(f"fixed count must be nonnegative, got {self.fixed_count}")
        if not self.beta > 0:
            raise DomainError(f"beta must be positive, got {self.beta!r}")
        if self.reference is not None and self.reference.count != self.fixed_count:
            raise DomainError("reference interior must have fixed_count points")

    @property
    def outer(self) -> Window:
        return Window.centered(self.outer_radius)

    @cached_property
    def active_exterior(self) -> np.ndarray:
        """Exterior points within the truncation window."""
        pts = self.exterior.points
        return pts[self.outer.mask(pts)]

    def check_exterior(self) -> None:
        if np.any(self.inner.mask(self.exterior.points)):
            raise ExteriorOverlap("an exterior point lies inside the resampled window")

    def one_body(self, xs: np.ndarray) -> np.ndarray:
        """sum_u g(x - u) over active exterior points, per x."""
        ext = self.active_exterior
        xs = np.atleast_1d(np.asarray(xs, dtype=np.float64))
        if ext.size == 0:
            return np.zeros_like(xs)
        return self.model.potential(xs[:, None] - ext[None, :]).sum(axis=1)

    def touches_exterior(self, x: float) -> bool:
        ext = self.active_exterior
        return bool(ext.size) and bool(np.any(self.model.singular(x - ext)))


@dataclass
class ChainState:
    """One Metropolis chain; owned by exactly one worker."""
    points: np.ndarray
    cached_energy: float
    step_scale: float
    rng: np.random.Generator
    accepted: int = 0
    proposed: int = 0

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.proposed if self.proposed else 0.0


class PeriodicGasTarget:
    """Q_{n,beta} on Lambda_n with proposals wrapped periodically."""

    def __init__(self, params: GasParams):
        self.params = params
        self.beta = params.beta
        self.model = params.model
        self.n = float(params.n)

    @property
    def max_scale(self) -> float:
        """Beyond one period a wrapped proposal gains nothing."""
        return self.n

    def propose(self, x: float, scale: float, rng: np.random.Generator) -> float:
        y = x + scale * rng.standard_normal()
        return (y + self.n / 2.0) % self.n - self.n / 2.0

    def delta(self, points: np.ndarray, i: int, y: float) -> Optional[float]:
        """Energy change of moving particle i to y, None on coincidence."""
        diffs = y - points
        hit = self.model.singular(diffs)
        hit[i] = False
        if np.any(hit):
            return None
        new = self.model.potential(diffs)
        new[i] = 0.0
        old = self.model.potential(points[i] - points)
        return float(new.sum() - old.sum())

    def energy(self, points: np.ndarray) -> float:
        return total_energy(self.model, points)


class KernelTarget:
    """exp(-beta (H_Lambda(eta) + M(eta, gamma))) on inner^N."""

    def __init__(self, spec: KernelSpec):
        self.spec = spec
        self.beta = spec.beta
        self.model = spec.model

    @property
    def max_scale(self) -> float:
        return self.spec.inner.length

    def propose(self, x: float, scale: float, rng: np.random.Generator) -> Optional[float]:
        y = x + scale * rng.standard_normal()
        # symmetric proposal; leaving the window is a rejection
        return y if self.spec.inner.contains(y) else None

    def delta(self, points: np.ndarray, i: int, y: float) -> Optional[float]:
        diffs = y - points
        hit = self.model.singular(diffs)
        hit[i] = False
        if np.any(hit) or self.spec.touches_exterior(y):
            return None
        new = self.model.potential(diffs)
        new[i] = 0.0
        old = self.model.potential(points[i] - points)
        field_change = self.spec.one_body(np.array([y, points[i]]))
        return float(new.sum() - old.sum() + field_change[0] - field_change[1])

    def energy(self, points: np.ndarray) -> float:
        return total_energy(self.model, points) + math.fsum(self.spec.one_body(points).tolist())


class MetropolisChain:
    """Single-particle random-walk Metropolis over a fixed number of points."""

    def __init__(self, target, points, step_scale: float, rng: np.random.Generator):
        pts = np.array(points, dtype=np.float64)
        self.target = target
        self.state = ChainState(
            points=pts,
            cached_energy=target.energy(pts),
            step_scale=float(step_scale),
            rng=rng,
        )

    def step(self) -> bool:
        """One proposal; returns whether it was accepted."""
        st = self.state
        if st.points.size == 0:
            return False
        i = int(st.rng.integers(st.points.size))
        u = 1.0 - st.rng.random()
        st.proposed += 1
        y = self.target.propose(st.points[i], st.step_scale, st.rng)
        if y is None:
            return False
        dh = self.target.delta(st.points, i, y)
        if dh is None:
            return False
        if dh <= 0.0 or math.log(u) < -self.target.beta * dh:
            st.points[i] = y
            st.cached_energy += dh
            st.accepted += 1
            return True
        return False

    def _tune(self, batch_accepted: int) -> None:
        rate = batch_accepted / TUNING_BATCH
        if rate > TARGET_ACCEPTANCE["high"]:
            self.state.step_scale = min(self.state.step_scale * 1.1, self.target.max_scale)
        elif rate < TARGET_ACCEPTANCE["low"]:
            self.state.step_scale *= 0.9

    def run(self, steps: int, tune_steps: int = 0) -> None:
        """Advance steps proposals, adapting the scale during the first tune_steps only."""
        batch = 0
        for t in range(1, steps + 1):
            batch += self.step()
            if t <= tune_steps and t % TUNING_BATCH == 0:
                self._tune(batch)
                batch = 0

    def samples(self, steps: int, burn_in: int, thin: int) -> Iterator[PointConfiguration]:
        """
        Emit every thin-th state after burn_in; steps counts all proposals.

        Raises:
            InvalidSchedule: Unless steps > burn_in >= 0 and thin >= 1
        """
        if not (steps > burn_in >= 0 and thin >= 1):
            raise InvalidSchedule(f"need steps > burn_in >= 0 and thin >= 1, got {steps}, {burn_in}, {thin}")
        self.run(burn_in, tune_steps=burn_in)
        logger.debug("burn-in done: acceptance %.3f, step scale %.4f", self.state.acceptance_rate, self.state.step_scale)
        for t in range(1, steps - burn_in + 1):
            self.step()
            if t % thin == 0:
                yield self.configuration()

    def configuration(self) -> PointConfiguration:
        return make_configuration(self.state.points)

    def recompute_energy(self) -> float:
        return self.target.energy(self.state.points)

    def energy_drift(self) -> float:
        """|cached energy - full recomputation|."""
        return abs(self.state.cached_energy - self.recompute_energy())


class LogGasChain(MetropolisChain):
    """Metropolis chain targeting Q_{n,beta}, started from a randomly shifted lattice."""

    def __init__(self, params: GasParams, rng: np.random.Generator, step_scale: float = 0.5):
        n = params.n
        offset = rng.random()
        start = (offset + np.arange(n)) % n - n / 2.0
        super().__init__(PeriodicGasTarget(params), start, step_scale, rng)
        self.params = params


def chain_rng(seed: int, index: int = 0, stream: int = 0) -> np.random.Generator:
    """Independent PCG64 stream keyed by (seed, chain index, stream)."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(index), int(stream))))


def bernoulli_sample(count: int, w: Window, rng: np.random.Generator) -> PointConfiguration:
    """count independent uniform points in w."""
    if count < 0:
        raise DomainError(f"count must be nonnegative, got {count}")
    if count == 0:
        return empty_configuration()
    return make_configuration(rng.uniform(w.lo, w.hi, size=count))


def poisson_sample(intensity: float, w: Window, rng: np.random.Generator) -> PointConfiguration:
    """Homogeneous Poisson process of the given intensity on w."""
    return bernoulli_sample(int(rng.poisson(intensity * w.length)), w, rng)


def loggas_mcmc(params: GasParams, steps: int, burn_in: int, thin: int, rng: np.random.Generator) -> Iterator[PointConfiguration]:
    """Stream of Q_{n,beta} states from a single Metropolis chain."""
    return LogGasChain(params, rng).samples(steps, burn_in, thin)


def gibbs_kernel_sample(
    spec: KernelSpec,
    steps: int,
    rng: np.random.Generator,
    initial: Optional[PointConfiguration] = None,
    step_scale: Optional[float] = None,
) -> PointConfiguration:
    """
    Draw eta from the canonical Gibbs kernel by a fixed-scale Metropolis chain.

    Args:
        spec: Kernel specification
        steps: Number of single-particle proposals
        rng: Generator owned by the caller
        initial: Starting interior (defaults to a Bernoulli draw)
        step_scale: Proposal scale (defaults to inner length / (N + 1))

    Returns:
        Final state of the chain
    """
    spec.check_exterior()
    n_points = spec.fixed_count
    if n_points == 0:
        return empty_configuration()
    if initial is None or initial.count != n_points or not np.all(spec.inner.mask(initial.points)):
        initial = bernoulli_sample(n_points, spec.inner, rng)
    scale = step_scale if step_scale is not None else spec.inner.length / (n_points + 1)
    chain = MetropolisChain(KernelTarget(spec), initial.points, scale, rng)
    chain.run(steps)
    return chain.configuration()


def kernel_spec_for(
    gamma: PointConfiguration,
    inner: Window,
    outer_radius: float,
    model: InteractionModel,
    beta: float,
) -> KernelSpec:
    """Kernel conditioned on gamma: N = |gamma_Lambda|, exterior gamma_{Lambda_p minus Lambda}."""
    outer = Window.centered(outer_radius)
    interior = restrict(gamma, inner)
    return KernelSpec(
        inner=inner,
        outer_radius=outer_radius,
        model=model,
        beta=beta,
        fixed_count=interior.count,
        exterior=exterior(gamma, inner, outer),
        reference=interior,
    )


def resample_interior(
    gamma: PointConfiguration,
    inner: Window,
    outer_radius: float,
    model: InteractionModel,
    beta: float,
    steps: int,
    rng: np.random.Generator,
) -> PointConfiguration:
    """Replace gamma_Lambda by a kernel draw and keep gamma in Lambda_p minus Lambda."""
    spec = kernel_spec_for(gamma, inner, outer_radius, model, beta)
    if spec.fixed_count == 0:
        return spec.exterior
    eta = gibbs_kernel_sample(spec, steps, rng, initial=spec.reference)
    return eta.union(spec.exterior)


@dataclass
class ChainResult:
    """Output of one independent chain."""
    index: int
    samples: List[PointConfiguration] = field(default_factory=list)
    acceptance_rate: float = 0.0
    step_scale: float = 0.0
    energy_drift: float = 0.0


def run_chain(params: GasParams, steps: int, burn_in: int, thin: int, seed: int, index: int) -> ChainResult:
    chain = LogGasChain(params, chain_rng(seed, index))
    samples = list(chain.samples(steps, burn_in, thin))
    return ChainResult(
        index=index,
        samples=samples,
        acceptance_rate=chain.state.acceptance_rate,
        step_scale=chain.state.step_scale,
        energy_drift=chain.energy_drift(),
    )


def run_chains(
    params: GasParams,
    steps: int,
    burn_in: int,
    thin: int,
    seed: int,
    chains: int,
    workers: int = 1,
) -> List[ChainResult]:
    """
    Run independent chains with seeds (seed, index); results come back in index order.

    The worker count only changes wall time, never the output.
    """
    args = [(params, steps, burn_in, thin, seed, k) for k in range(chains)]
    if workers <= 1 or chains <= 1:
        results = [run_chain(*a) for a in args]
    else:
        with cf.ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(run_chain, *zip(*args)))
    for r in results:
        logger.info("chain %d: %d samples, acceptance %.3f", r.index, len(r.samples), r.acceptance_rate)
    return results
