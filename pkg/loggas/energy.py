"""
Deterministic formulas: pair potentials, interaction energies, move
functions and their infinite-window limits, exterior weights, the cost of
moving a tuple, the periodic renormalized energy and the moved-charge
potential with its bounds.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, special

from config.settings import InteractionKind
from loggas.configuration import (
    PointConfiguration,
    Window,
    exterior,
    make_configuration,
    restrict,
    w1_distance,
)
from loggas.errors import (
    CardinalityMismatch,
    DomainError,
    InvalidSchedule,
    SingularOverlap,
    WindowNesting,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class InteractionModel:
    """Non-periodic g or n-periodic g_n."""
    kind: InteractionKind = InteractionKind.NON_PERIODIC
    period: Optional[int] = None

    def __post_init__(self):
        if self.kind is InteractionKind.PERIODIC:
            if self.period is None or int(self.period) != self.period or self.period < 1:
                raise DomainError(f"periodic model needs an integer period >= 1, got {self.period!r}")

    @classmethod
    def non_periodic(cls) -> "InteractionModel":
        return cls(InteractionKind.NON_PERIODIC, None)

    @classmethod
    def periodic(cls, n: int) -> "InteractionModel":
        return cls(InteractionKind.PERIODIC, int(n))

    @property
    def is_periodic(self) -> bool:
        return self.kind is InteractionKind.PERIODIC

    def potential(self, x) -> np.ndarray:
        """Vectorized pair potential; zero on the singular set by convention."""
        x = np.asarray(x, dtype=np.float64)
        out = np.zeros_like(x)
        if self.is_periodic:
            n = float(self.period)
            # reduce to [-n/2, n/2] first so periodicity holds to rounding
            r = x - n * np.round(x / n)
            nz = r != 0.0
            out[nz] = -np.log(np.abs(2.0 * np.sin(np.pi * r[nz] / n)))
        else:
            nz = x != 0.0
            out[nz] = -np.log(np.abs(x[nz]))
        return out

    def singular(self, x) -> np.ndarray:
        """Mask of arguments where the Gibbs weight exp(-beta g) vanishes."""
        x = np.asarray(x, dtype=np.float64)
        if self.is_periodic:
            n = float(self.period)
            return (x - n * np.round(x / n)) == 0.0
        return x == 0.0


@dataclass(frozen=True)
class MoveValue:
    """A move-function evaluation with truncation and convergence metadata."""
    value: float
    inner_window: Optional[Window]
    outer_radius: float
    converged: bool
    last_increment: float
    history: Tuple[float, ...] = ()


@dataclass(frozen=True)
class CostValue:
    """Cost of moving an n-tuple into a configuration."""
    value: float
    tuple_size: int
    truncation_radius: float
    converged: bool


def pair_potential(model: InteractionModel, x: float) -> float:
    """
    Pair potential g(x) = -log|x| or g_n(x) = -log|2 sin(pi x / n)|.

    Args:
        model: Interaction model
        x: Finite real separation

    Returns:
        Potential value, 0 on the singular set
    """
    if not math.isfinite(x):
        raise DomainError(f"pair potential needs a finite argument, got {x!r}")
    return float(model.potential(np.array([x]))[0])


def _pair_terms(model: InteractionModel, pts: np.ndarray) -> np.ndarray:
    if pts.size < 2:
        return np.empty(0)
    i, j = np.triu_indices(pts.size, k=1)
    return model.potential(pts[i] - pts[j])


def _cross_terms(model: InteractionModel, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.size == 0 or b.size == 0:
        return np.empty(0)
    return model.potential(a[:, None] - b[None, :]).ravel()


def interaction_energy(model: InteractionModel, gamma: PointConfiguration, w: Window) -> float:
    """H_Lambda(gamma): sum over unordered pairs of points of gamma inside w."""
    return math.fsum(_pair_terms(model, restrict(gamma, w).points).tolist())


def total_energy(model: InteractionModel, points: np.ndarray) -> float:
    """Sum over all unordered pairs of an unsorted coordinate array."""
    return math.fsum(_pair_terms(model, np.asarray(points, dtype=np.float64)).tolist())


def move_function(
    model: InteractionModel,
    eta: PointConfiguration,
    gamma: PointConfiguration,
    inner: Window,
    outer: Window,
) -> float:
    """
    M_{Lambda, outer}(eta, gamma): energy felt by the exterior when gamma_Lambda is replaced by eta.

    Args:
        model: Interaction model
        eta: Replacement configuration inside inner
        gamma: Reference configuration
        inner: Window Lambda
        outer: Truncation window containing Lambda

    Returns:
        Sum over exterior u of sum_eta g(x - u) - sum_{gamma_Lambda} g(y - u)
    """
    if not outer.contains_window(inner):
        raise WindowNesting(f"inner {inner} is not inside outer {outer}")
    gamma_in = restrict(gamma, inner)
    if eta.count != gamma_in.count:
        raise CardinalityMismatch(f"|eta| = {eta.count} but |gamma_Lambda| = {gamma_in.count}")
    if eta.count and not np.all(inner.mask(eta.points)):
        raise DomainError("eta must lie inside the inner window")
    ext = exterior(gamma, inner, outer).points
    gained = _cross_terms(model, eta.points, ext)
    lost = _cross_terms(model, gamma_in.points, ext)
    return math.fsum(np.concatenate([gained, -lost]).tolist())


def default_radius_schedule(inner: Window, reach: float) -> Tuple[float, ...]:
    """Radii 2^k from the first one covering inner past reach, plus two more doublings."""
    start = max(abs(inner.lo), abs(inner.hi), 1.0)
    radii = [2.0 ** math.ceil(math.log2(start))]
    while radii[-1] < reach:
        radii.append(radii[-1] * 2.0)
    radii.extend([radii[-1] * 2.0, radii[-1] * 4.0])
    return tuple(radii)


def _converged(increments: Sequence[float], tol: float) -> bool:
    return bool(increments) and all(abs(d) <= tol for d in increments[-2:])


def _check_schedule(p_schedule: Sequence[float]) -> None:
    if not p_schedule:
        raise InvalidSchedule("radius schedule is empty")
    if any(b <= a for a, b in zip(p_schedule, p_schedule[1:])):
        raise InvalidSchedule("radius schedule must be strictly increasing")


def move_function_limit(
    eta: PointConfiguration,
    gamma: PointConfiguration,
    inner: Window,
    p_schedule: Sequence[float],
    tol: float,
    model: Optional[InteractionModel] = None,
) -> MoveValue:
    """
    Evaluate M_{Lambda, [-p, p]} along an increasing schedule of radii.

    Convergence is declared when the last two increments are both below tol;
    the value before the first radius counts as 0. Non-convergence is reported,
    not raised.
    """
    model = model or InteractionModel.non_periodic()
    _check_schedule(p_schedule)
    if gamma.count and max(abs(gamma.points[0]), abs(gamma.points[-1])) > p_schedule[-1]:
        logger.warning("radius schedule stops at %g before covering all supplied points", p_schedule[-1])
    previous = 0.0
    history, increments = [], []
    for p in p_schedule:
        value = move_function(model, eta, gamma, inner, Window(-p, p))
        increments.append(value - previous)
        history.append(value)
        previous = value
    converged = _converged(increments, tol)
    if not converged:
        logger.warning("move function not converged at radius %g: last increment %.3e", p_schedule[-1], increments[-1])
    return MoveValue(
        value=history[-1],
        inner_window=inner,
        outer_radius=float(p_schedule[-1]),
        converged=converged,
        last_increment=increments[-1],
        history=tuple(history),
    )


def log_exterior_weight(x: float, gamma_ext: PointConfiguration, beta: float, p: float) -> Optional[float]:
    """
    beta * sum over |u| <= p of log|1 - x/u|, or None when x hits an exterior point.

    Raises:
        DomainError: If 0 is an exterior point or beta <= 0
    """
    if beta <= 0:
        raise DomainError(f"beta must be positive, got {beta}")
    u = gamma_ext.points
    if np.any(u == 0.0):
        raise DomainError("the origin cannot be an exterior point")
    u = u[np.abs(u) <= p]
    if u.size == 0:
        return 0.0
    factors = np.abs(1.0 - x / u)
    if np.any(factors <= 0.0):
        return None
    return beta * math.fsum(np.log(factors).tolist())


def exterior_weight(x: float, gamma_ext: PointConfiguration, beta: float, p: float) -> float:
    """Truncated weight omega_p(x) = prod_{|u| <= p} |1 - x/u|^beta."""
    lw = log_exterior_weight(x, gamma_ext, beta, p)
    return 0.0 if lw is None else math.exp(lw)


def exterior_weight_limit(
    x: float,
    gamma_ext: PointConfiguration,
    beta: float,
    p_schedule: Sequence[float],
    tol: float,
) -> MoveValue:
    """log omega(x | exterior) along a radius schedule, same convergence rule as the move function."""
    _check_schedule(p_schedule)
    previous = 0.0
    history, increments = [], []
    for p in p_schedule:
        lw = log_exterior_weight(x, gamma_ext, beta, p)
        if lw is None:
            raise SingularOverlap(f"x = {x!r} coincides with an exterior point")
        increments.append(lw - previous)
        history.append(lw)
        previous = lw
    return MoveValue(
        value=history[-1],
        inner_window=None,
        outer_radius=float(p_schedule[-1]),
        converged=_converged(increments, tol),
        last_increment=increments[-1],
        history=tuple(history),
    )


def _cost_at(xs: np.ndarray, ys: np.ndarray, p: float, model: InteractionModel) -> float:
    near = ys[np.abs(ys) <= p]
    terms = [_pair_terms(model, xs)]
    if near.size:
        terms.append(_cross_terms(model, xs, near))
        terms.append(-np.repeat(model.potential(near), xs.size))
    return math.fsum(np.concatenate(terms).tolist())


def cost_function(x_tuple: Sequence[float], gamma: PointConfiguration, p: float, tol: float) -> CostValue:
    """
    Cost of moving an n-tuple into gamma.

    Pair term sum_{i<j} g(x_i - x_j) plus the symmetric truncation over
    |y| <= p of sum_i [g(x_i - y) - g(y)]. Convergence is judged on the
    radii p/8, p/4, p/2, p.
    """
    model = InteractionModel.non_periodic()
    xs = np.sort(np.asarray(x_tuple, dtype=np.float64))
    if xs.size == 0:
        raise DomainError("cost needs at least one moved point")
    if xs.size > 1 and np.any(np.diff(xs) == 0.0):
        raise SingularOverlap("tuple entries must be distinct")
    ys = gamma.points
    if ys.size and np.any(np.isin(xs, ys)):
        raise SingularOverlap("a moved point coincides with a point of the configuration")
    radii = [p / 8.0, p / 4.0, p / 2.0, p]
    values = [_cost_at(xs, ys, r, model) for r in radii]
    increments = np.diff(values)
    return CostValue(
        value=values[-1],
        tuple_size=int(xs.size),
        truncation_radius=float(p),
        converged=_converged(increments.tolist(), tol),
    )


def renormalized_energy_periodic(gamma: PointConfiguration, n: int) -> float:
    """W of the n-periodic extension: (pi/n) (2 H^{n-per}_{Lambda_n} + n log(n / 2 pi))."""
    if gamma.count != n:
        raise CardinalityMismatch(f"periodic energy needs exactly {n} points, got {gamma.count}")
    box = Window.centered(n)
    if not np.all(box.mask(gamma.points)):
        raise DomainError(f"configuration must lie in [-{n / 2}, {n / 2}]")
    h = interaction_energy(InteractionModel.periodic(n), gamma, box)
    return (math.pi / n) * (2.0 * h + n * math.log(n / (2.0 * math.pi)))


def equally_spaced(n: int) -> PointConfiguration:
    """n points with unit spacing, centred in Lambda_n."""
    return make_configuration(-n / 2.0 + 0.5 + np.arange(n))


def moved_charge_potential(model: InteractionModel, eta: PointConfiguration, gamma_inner: PointConfiguration, x):
    """Psi(x) = sum_eta g(x - e) - sum_{gamma_inner} g(x - y); x may be an array."""
    if eta.count != gamma_inner.count:
        raise CardinalityMismatch(f"|eta| = {eta.count} but |gamma_Lambda| = {gamma_inner.count}")
    xs = np.atleast_1d(np.asarray(x, dtype=np.float64))
    out = np.zeros_like(xs)
    if eta.count:
        out = (
            model.potential(xs[:, None] - eta.points[None, :]).sum(axis=1)
            - model.potential(xs[:, None] - gamma_inner.points[None, :]).sum(axis=1)
        )
    return float(out[0]) if np.ndim(x) == 0 else out


def v_function(t: float) -> float:
    """(1 + t) log(1 + t) + (1 - t) log(1 - t), with 0 log 0 = 0."""
    if not -1.0 <= t <= 1.0:
        raise DomainError(f"V is defined on [-1, 1], got {t}")
    return float(special.xlogy(1.0 + t, 1.0 + t) + special.xlogy(1.0 - t, 1.0 - t))


def potential_mean(eta: PointConfiguration, gamma_inner: PointConfiguration, p: float) -> float:
    """
    Integral of Psi over Lambda_p in closed form through V.

    With s = (p/2) u one has int log|y - s| ds = (p/2)(2 log(p/2) + V(2y/p) - 2),
    so the integral is (p/2) sum [V(2 gamma_i / p) - V(2 eta_i / p)].
    """
    if eta.count != gamma_inner.count:
        raise CardinalityMismatch(f"|eta| = {eta.count} but |gamma_Lambda| = {gamma_inner.count}")
    half = p / 2.0
    box = Window.centered(p)
    if not (np.all(box.mask(eta.points)) and np.all(box.mask(gamma_inner.points))):
        raise DomainError(f"both configurations must lie inside Lambda_{p}")
    terms = [v_function(y / half) for y in gamma_inner] + [-v_function(e / half) for e in eta]
    return half * math.fsum(terms)


def potential_mean_quadrature(eta: PointConfiguration, gamma_inner: PointConfiguration, p: float) -> float:
    """Same integral by adaptive quadrature, splitting at the singular points."""
    model = InteractionModel.non_periodic()
    breaks = sorted(set(eta.points.tolist()) | set(gamma_inner.points.tolist()))
    value, _ = integrate.quad(
        lambda s: moved_charge_potential(model, eta, gamma_inner, s),
        -p / 2.0, p / 2.0, points=breaks or None, limit=400,
    )
    return value


def potential_mean_profile(eta: PointConfiguration, gamma_inner: PointConfiguration, radii: Sequence[float]) -> Tuple[float, ...]:
    """|int_{Lambda_p} Psi| / W1 per radius."""
    w1 = w1_distance(eta, gamma_inner)
    if w1 == 0.0:
        return tuple(0.0 for _ in radii)
    return tuple(abs(potential_mean(eta, gamma_inner, p)) / w1 for p in radii)


def small_argument_gap(x: float, n: int) -> float:
    """|g_n(x) + log(2 pi / n) - g(x)|, the distance between the periodic and plain potentials."""
    if x == 0.0:
        raise DomainError("the gap is only meaningful for x != 0")
    gn = pair_potential(InteractionModel.periodic(n), x)
    g = pair_potential(InteractionModel.non_periodic(), x)
    return abs(gn + math.log(2.0 * math.pi / n) - g)


def potential_bound_check(
    model: InteractionModel,
    eta: PointConfiguration,
    gamma_inner: PointConfiguration,
    inner: Window,
    xs: np.ndarray,
    step: float = 1e-6,
    slack: float = 1e-3,
) -> Tuple[int, int]:
    """
    Count violations of |Psi| <= W1/dist and |Psi'| <= 8 W1/dist^2 at xs.

    Psi' is a central finite difference with the given step; both bounds get
    a relative slack.

    Returns:
        Tuple of (value_violations, derivative_violations)
    """
    xs = np.asarray(xs, dtype=np.float64)
    w1 = w1_distance(eta, gamma_inner)
    dist = inner.distance(xs)
    if np.any(dist <= 0.0):
        raise DomainError("evaluation points must lie outside the inner window")
    psi = moved_charge_potential(model, eta, gamma_inner, xs)
    dpsi = (
        moved_charge_potential(model, eta, gamma_inner, xs + step)
        - moved_charge_potential(model, eta, gamma_inner, xs - step)
    ) / (2.0 * step)
    # finite-difference roundoff floor
    noise = 4.0 * np.finfo(np.float64).eps * (np.abs(psi) + 1.0) / step
    value_bad = np.abs(psi) > (w1 / dist) * (1.0 + slack)
    deriv_bad = np.abs(dpsi) > (8.0 * w1 / dist ** 2) * (1.0 + slack) + noise
    return int(value_bad.sum()), int(deriv_bad.sum())
