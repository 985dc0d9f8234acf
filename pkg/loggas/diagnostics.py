"""
Statistical verification harness: DLR residuals, truncation-error profiles,
discrepancy and overcrowding statistics, Campbell-measure estimators,
fluctuation and rigidity probes, and the exact algebraic identity.
"""
import concurrent.futures as cf
import itertools
import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

from config.settings import KERNEL_RESAMPLES, KERNEL_STEPS_PER_POINT, SE_MULTIPLIER
from loggas.configuration import (
    PointConfiguration,
    Window,
    count_in,
    discrepancy,
    empty_configuration,
    make_configuration,
    restrict,
)
from loggas.energy import InteractionModel, interaction_energy, move_function
from loggas.errors import (
    CombinatorialBlowup,
    DomainError,
    DuplicatePoint,
    SingularOverlap,
    SupportOverflow,
)
from loggas.sampler import (
    GasParams,
    LogGasChain,
    bernoulli_sample,
    chain_rng,
    resample_interior,
)

logger = logging.getLogger(__name__)

Statistic = Callable[[PointConfiguration], float]


@dataclass(frozen=True)
class MCEstimate:
    """Monte Carlo mean with its standard error."""
    mean: float
    variance: float
    std_error: float
    n_samples: int

    def __post_init__(self):
        if self.n_samples < 1:
            raise DomainError("an estimate needs at least one sample")

    @classmethod
    def from_samples(cls, values: Sequence[float]) -> "MCEstimate":
        arr = np.asarray(values, dtype=np.float64)
        if arr.size == 0:
            raise DomainError("an estimate needs at least one sample")
        var = float(arr.var(ddof=1)) if arr.size > 1 else 0.0
        return cls(
            mean=math.fsum(arr.tolist()) / arr.size,
            variance=var,
            std_error=math.sqrt(var / arr.size),
            n_samples=int(arr.size),
        )

    def agrees_with(self, target: float, k: float = SE_MULTIPLIER) -> bool:
        return abs(self.mean - target) <= k * self.std_error


def variance_estimate(values: Sequence[float]) -> MCEstimate:
    """Sample variance as an estimate, with its large-sample standard error."""
    arr = np.asarray(values, dtype=np.float64)
    n = arr.size
    if n < 2:
        return MCEstimate(mean=0.0, variance=0.0, std_error=0.0, n_samples=max(n, 1))
    var = float(arr.var(ddof=1))
    m4 = float(np.mean((arr - arr.mean()) ** 4))
    spread = max(m4 - var * var * (n - 3) / (n - 1), 0.0)
    return MCEstimate(mean=var, variance=spread, std_error=math.sqrt(spread / n), n_samples=n)


@dataclass(frozen=True)
class TruncationProfile:
    """Estimated sup over trial interiors of |M_{Lambda, Lambda_n} - M_{Lambda, Lambda_p}| per radius."""
    radii: Tuple[float, ...]
    sup_estimates: Tuple[float, ...]
    delta: float
    fraction_within_delta: Tuple[float, ...]


@dataclass(frozen=True)
class CampbellEstimate:
    order: int
    test_statistic_mean: MCEstimate


@dataclass(frozen=True)
class DiscrepancyStats:
    window: Window
    discrepancy: MCEstimate
    discrepancy_sq: MCEstimate

    @property
    def ratio(self) -> float:
        return self.discrepancy_sq.mean / self.window.length

    @property
    def ratio_se(self) -> float:
        return self.discrepancy_sq.std_error / self.window.length


@dataclass(frozen=True)
class ScaleVariance:
    scale: float
    estimate: MCEstimate


# Picklable test statistics for the DLR check


@dataclass(frozen=True)
class ConstantStatistic:
    value: float = 1.0

    def __call__(self, gamma: PointConfiguration) -> float:
        return self.value


@dataclass(frozen=True)
class CountStatistic:
    window: Window

    def __call__(self, gamma: PointConfiguration) -> float:
        return float(count_in(gamma, self.window))


def bump(x, window: Window, amplitude: float = 1.0):
    """Smooth bump amplitude * exp(1 - 1/(1 - t^2)) supported in the window."""
    t = (np.asarray(x, dtype=np.float64) - window.center) / (window.length / 2.0)
    out = np.zeros_like(t)
    inside = np.abs(t) < 1.0
    out[inside] = amplitude * np.exp(1.0 - 1.0 / (1.0 - t[inside] ** 2))
    return out


@dataclass(frozen=True)
class SmoothExponentialStatistic:
    """exp(-sum_x phi(x)) for a bump phi supported in the window."""
    window: Window
    amplitude: float = 1.0

    def __call__(self, gamma: PointConfiguration) -> float:
        pts = restrict(gamma, self.window).points
        return math.exp(-float(bump(pts, self.window, self.amplitude).sum()))


def paired_difference(f: Statistic, gamma: PointConfiguration, resampled: Sequence[PointConfiguration]) -> float:
    """f(gamma) minus the mean of f over kernel draws given gamma's exterior."""
    if not resampled:
        raise DomainError("at least one kernel resample per sample is needed")
    return f(gamma) - math.fsum(f(eta) for eta in resampled) / len(resampled)


def _dlr_chain(
    stats: Tuple[Statistic, ...],
    params: GasParams,
    inner: Window,
    outer_radius: float,
    steps: int,
    burn_in: int,
    thin: int,
    kernel_resamples: int,
    kernel_steps: Optional[int],
    seed: int,
    index: int,
) -> List[Tuple[float, ...]]:
    chain = LogGasChain(params, chain_rng(seed, index))
    kernel_rng = chain_rng(seed, index, stream=1)
    diffs = []
    for gamma in chain.samples(steps, burn_in, thin):
        n_inner = count_in(gamma, inner)
        k_steps = kernel_steps if kernel_steps is not None else KERNEL_STEPS_PER_POINT * max(n_inner, 1)
        resampled = [
            resample_interior(gamma, inner, outer_radius, params.model, params.beta, k_steps, kernel_rng)
            for _ in range(kernel_resamples)
        ]
        diffs.append(tuple(paired_difference(f, gamma, resampled) for f in stats))
    return diffs


def dlr_residuals(
    stats: Dict[str, Statistic],
    params: GasParams,
    inner: Window,
    outer_radius: Optional[float],
    chains: int,
    steps: int,
    seed: int,
    burn_in: Optional[int] = None,
    thin: Optional[int] = None,
    kernel_resamples: int = KERNEL_RESAMPLES,
    kernel_steps: Optional[int] = None,
    workers: int = 1,
) -> Dict[str, MCEstimate]:
    """
    Paired estimates of E_Q[f - f_{Lambda, Lambda_p}] for several statistics at once.

    Each sampled gamma contributes f(gamma) minus the mean of f over
    kernel_resamples draws of the interior given gamma's exterior; all
    statistics share the same samples and resamples.
    """
    if not params.window.contains_window(inner):
        raise DomainError(f"inner window {inner} must lie in Lambda_{params.n}")
    if kernel_resamples < 1:
        raise DomainError("at least one kernel resample per sample is needed")
    outer_radius = float(params.n) if outer_radius is None else outer_radius
    burn_in = params.default_burn_in() if burn_in is None else burn_in
    thin = params.default_thin() if thin is None else thin
    names = list(stats)
    funcs = tuple(stats[name] for name in names)
    args = [
        (funcs, params, inner, outer_radius, steps, burn_in, thin, kernel_resamples, kernel_steps, seed, k)
        for k in range(chains)
    ]
    if workers <= 1 or chains <= 1:
        per_chain = [_dlr_chain(*a) for a in args]
    else:
        with cf.ProcessPoolExecutor(max_workers=workers) as ex:
            per_chain = list(ex.map(_dlr_chain, *zip(*args)))
    rows = [d for chain in per_chain for d in chain]
    logger.info("DLR residuals over %d paired samples", len(rows))
    return {name: MCEstimate.from_samples([r[k] for r in rows]) for k, name in enumerate(names)}


def dlr_residual(
    f: Statistic,
    params: GasParams,
    inner: Window,
    outer_radius: Optional[float],
    chains: int,
    steps: int,
    seed: int,
    **kwargs,
) -> MCEstimate:
    """Paired estimate of E_Q[f - f_{Lambda, Lambda_p}] for a single statistic."""
    return dlr_residuals({"f": f}, params, inner, outer_radius, chains, steps, seed, **kwargs)["f"]


def trial_interiors(inner: Window, count: int, trial_count: int, rng: np.random.Generator) -> List[PointConfiguration]:
    """
    Stratified trial set for the sup in the truncation error.

    Contains a left cluster, a right cluster, the W1-extremal split with all
    mass at the two endpoints, and uniform draws for the rest.
    """
    if count == 0:
        return [empty_configuration()]
    eps = 1e-9 * inner.length
    cluster = 0.01 * inner.length
    ks = np.arange(count)
    left = inner.lo + cluster * (ks + 0.5) / count
    right = inner.hi - cluster * (ks + 0.5) / count
    half = count // 2
    split = np.concatenate([inner.lo + eps * np.arange(half), inner.hi - eps * np.arange(count - half)])
    trials = [make_configuration(left), make_configuration(right), make_configuration(split)]
    while len(trials) < max(trial_count, 3):
        trials.append(bernoulli_sample(count, inner, rng))
    return trials


def truncation_profile(
    params: GasParams,
    inner: Window,
    radii: Sequence[float],
    trial_count: int,
    delta: float,
    samples: Sequence[PointConfiguration],
    rng: np.random.Generator,
) -> TruncationProfile:
    """Fraction of samples whose estimated truncation error is at most delta, per radius."""
    model = params.model
    box = params.window
    per_radius: List[List[float]] = [[] for _ in radii]
    for gamma in samples:
        n_inner = count_in(gamma, inner)
        etas = trial_interiors(inner, n_inner, trial_count, rng)
        full = [move_function(model, eta, gamma, inner, box) for eta in etas]
        for slot, p in enumerate(radii):
            outer = Window.centered(min(p, params.n))
            if not outer.contains_window(inner):
                raise DomainError(f"radius {p} does not cover the inner window")
            errs = [abs(m - move_function(model, eta, gamma, inner, outer)) for m, eta in zip(full, etas)]
            per_radius[slot].append(max(errs))
    sups = tuple(float(np.mean(v)) if v else 0.0 for v in per_radius)
    fractions = tuple(float(np.mean([e <= delta for e in v])) if v else 1.0 for v in per_radius)
    return TruncationProfile(radii=tuple(float(p) for p in radii), sup_estimates=sups, delta=delta, fraction_within_delta=fractions)


def discrepancy_stats(samples: Sequence[PointConfiguration], windows: Sequence[Window]) -> List[DiscrepancyStats]:
    """Empirical E[Discr] and E[Discr^2] per window, in window order."""
    out = []
    for w in windows:
        values = [discrepancy(gamma, w).value for gamma in samples]
        out.append(
            DiscrepancyStats(
                window=w,
                discrepancy=MCEstimate.from_samples(values),
                discrepancy_sq=MCEstimate.from_samples([v * v for v in values]),
            )
        )
    return out


def overcrowding_probability(samples: Sequence[PointConfiguration], inner: Window, p: float) -> MCEstimate:
    """Empirical probability of B_p = {|gamma_Lambda| <= p, |gamma_{Lambda_p}| <= p^2}."""
    hits = []
    for gamma in samples:
        near = int(np.count_nonzero(np.abs(gamma.points) <= p / 2.0))
        hits.append(1.0 if count_in(gamma, inner) <= p and near <= p * p else 0.0)
    return MCEstimate.from_samples(hits)


TupleTest = Callable[[Tuple[float, ...], PointConfiguration], float]


def campbell_estimate(
    samples: Sequence[PointConfiguration],
    order: int,
    h: TupleTest,
    tuple_cap: int,
    support: Optional[Window] = None,
) -> CampbellEstimate:
    """
    Mean over samples of the sum over ordered n-tuples of distinct points of h(tuple, remainder).

    Args:
        samples: Sampled configurations
        order: Tuple size n
        h: Test function of the tuple and the rest of the configuration
        tuple_cap: Largest admissible number of tuples per sample
        support: Optional window outside which h vanishes in its tuple argument

    Raises:
        CombinatorialBlowup: If a sample needs more than tuple_cap tuples
    """
    if order < 1:
        raise DomainError(f"Campbell order must be >= 1, got {order}")
    totals = []
    for gamma in samples:
        pts = gamma.points
        candidates = np.flatnonzero(support.mask(pts)) if support is not None else np.arange(pts.size)
        m = candidates.size
        n_tuples = math.perm(m, order) if m >= order else 0
        if n_tuples > tuple_cap:
            raise CombinatorialBlowup(f"{n_tuples} tuples exceed the cap of {tuple_cap}")
        total = []
        for idx in itertools.permutations(candidates.tolist(), order):
            rest = PointConfiguration(np.delete(pts, list(idx)))
            total.append(h(tuple(pts[list(idx)].tolist()), rest))
        totals.append(math.fsum(total))
    return CampbellEstimate(order=order, test_statistic_mean=MCEstimate.from_samples(totals))


def fluctuation_stat(
    samples: Sequence[PointConfiguration],
    phi: Callable[[np.ndarray], np.ndarray],
    ell: float,
    domain: Window,
    support: Window = Window(-1.0, 1.0),
) -> MCEstimate:
    """Fluct[phi_ell] = sum_x phi(x / ell) - ell int phi, aggregated over samples."""
    return MCEstimate.from_samples(fluctuation_values(samples, phi, ell, domain, support))


def fluctuation_values(
    samples: Sequence[PointConfiguration],
    phi: Callable[[np.ndarray], np.ndarray],
    ell: float,
    domain: Window,
    support: Window = Window(-1.0, 1.0),
) -> List[float]:
    """Per-sample Fluct[phi_ell]; the integral of phi comes from adaptive quadrature."""
    if ell <= 0:
        raise DomainError(f"ell must be positive, got {ell}")
    if not domain.contains_window(support.scaled(ell)):
        raise SupportOverflow(f"phi(./{ell}) reaches outside {domain}")
    integral, _ = integrate.quad(lambda t: float(phi(np.array([t]))[0]), support.lo, support.hi, limit=200)
    return [float(np.sum(phi(gamma.points / ell))) - ell * integral for gamma in samples]


def fluctuation_variance(
    samples: Sequence[PointConfiguration],
    phi: Callable[[np.ndarray], np.ndarray],
    ell: float,
    domain: Window,
    support: Window = Window(-1.0, 1.0),
) -> MCEstimate:
    """Var[Fluct[phi_ell]] with the standard error of a sample variance."""
    return variance_estimate(fluctuation_values(samples, phi, ell, domain, support))


def plateau(x, window: Window, scale: float):
    """C^1 function equal to 1 on the window and decaying to 0 over the given width."""
    t = np.clip(window.distance(np.asarray(x, dtype=np.float64)) / scale, 0.0, 1.0)
    return 1.0 - 3.0 * t ** 2 + 2.0 * t ** 3


def rigidity_probe(samples: Sequence[PointConfiguration], window: Window, smoothing_scales: Sequence[float]) -> List[ScaleVariance]:
    """Variance of sum_x phi_s(x) across samples for each smoothing scale s."""
    out = []
    for s in sorted(smoothing_scales):
        if s <= 0:
            raise DomainError(f"smoothing scales must be positive, got {s}")
        values = [float(plateau(gamma.points, window, s).sum()) for gamma in samples]
        out.append(ScaleVariance(scale=float(s), estimate=variance_estimate(values)))
    return out


def algebraic_identity_residual(
    model: InteractionModel,
    gamma: PointConfiguration,
    eta: PointConfiguration,
    inner: Window,
) -> float:
    """
    |LHS - RHS| of H_{Lambda_n}(gamma) + M(eta, gamma) + H_Lambda(eta) = H_{Lambda_n}(eta u gamma_ext) + H_Lambda(gamma).

    Raises:
        SingularOverlap: If eta shares a point with the exterior
    """
    if not model.is_periodic:
        raise DomainError("the identity is stated for the periodic model")
    box = Window.centered(model.period)
    outside = gamma.without(inner)
    try:
        merged = eta.union(outside)
    except DuplicatePoint as exc:
        raise SingularOverlap(str(exc)) from exc
    if np.any(model.singular(eta.points[:, None] - outside.points[None, :])):
        raise SingularOverlap("eta touches an exterior point modulo the period")
    lhs = math.fsum([
        interaction_energy(model, gamma, box),
        move_function(model, eta, gamma, inner, box),
        interaction_energy(model, eta, inner),
    ])
    rhs = math.fsum([
        interaction_energy(model, merged, box),
        interaction_energy(model, gamma, inner),
    ])
    return abs(lhs - rhs)


def random_identity_instance(
    n: int,
    max_interior: int,
    inner: Window,
    rng: np.random.Generator,
) -> Tuple[PointConfiguration, PointConfiguration]:
    """gamma of n points in Lambda_n with up to max_interior in the inner window, and a same-count eta."""
    box = Window.centered(n)
    k = int(rng.integers(0, min(max_interior, n) + 1))
    interior = bernoulli_sample(k, inner, rng)
    left, right = inner.lo - box.lo, box.hi - inner.hi
    u = rng.uniform(0.0, left + right, size=n - k)
    outside = np.where(u < left, box.lo + u, inner.hi + (u - left))
    # closed windows: nudge any exact boundary hit outward
    outside = np.where(outside == inner.hi, np.nextafter(inner.hi, np.inf), outside)
    outside = np.where(outside == inner.lo, np.nextafter(inner.lo, -np.inf), outside)
    gamma = interior.union(make_configuration(outside))
    eta = bernoulli_sample(k, inner, rng)
    return gamma, eta


def gap_histogram(samples: Sequence[PointConfiguration], n: int, bins: int = 40, max_gap: float = 4.0) -> Tuple[np.ndarray, np.ndarray]:
    """Normalized histogram of nearest-neighbour spacings on the circle of length n."""
    gaps = []
    for gamma in samples:
        pts = gamma.points
        if pts.size < 2:
            continue
        gaps.extend(np.diff(pts).tolist())
        gaps.append(pts[0] + n - pts[-1])
    density, edges = np.histogram(gaps, bins=bins, range=(0.0, max_gap), density=True)
    return edges, density


def is_nonincreasing(estimates: Sequence[MCEstimate], k: float = SE_MULTIPLIER) -> bool:
    """No step increases by more than k combined standard errors."""
    return all(
        b.mean <= a.mean + k * math.hypot(a.std_error, b.std_error)
        for a, b in zip(estimates, estimates[1:])
    )


def is_nondecreasing(estimates: Sequence[MCEstimate], k: float = SE_MULTIPLIER) -> bool:
    return all(
        b.mean >= a.mean - k * math.hypot(a.std_error, b.std_error)
        for a, b in zip(estimates, estimates[1:])
    )


def is_decreasing(estimates: Sequence[MCEstimate], k: float = SE_MULTIPLIER) -> bool:
    """Nonincreasing at k-SE resolution and significantly lower at the end than at the start."""
    if len(estimates) < 2:
        return True
    first, last = estimates[0], estimates[-1]
    return is_nonincreasing(estimates, k) and last.mean < first.mean - k * math.hypot(first.std_error, last.std_error)
