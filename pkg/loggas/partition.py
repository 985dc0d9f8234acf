"""
Partition functions: Gamma-ratio closed form, tensor-grid quadrature for
tiny n, and Monte Carlo estimates of conditional normalizers.
"""
import logging
import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
from scipy import special

from config.settings import PartitionMethod
from loggas.configuration import PointConfiguration, Window
from loggas.energy import InteractionModel, log_exterior_weight, total_energy
from loggas.errors import DegenerateWeight, DomainError, TooLarge
from loggas.sampler import GasParams, KernelSpec, bernoulli_sample

logger = logging.getLogger(__name__)

MAX_QUADRATURE_N = 3

# Grid cells per axis for the coarse level; the fine level doubles it
QUADRATURE_CELLS = {1: 1, 2: 2048, 3: 256}


@dataclass(frozen=True)
class PartitionValue:
    """A partition function carried as a logarithm; std_error refers to log_value."""
    log_value: float
    method: PartitionMethod
    std_error: float = 0.0

    def __post_init__(self):
        if self.method is PartitionMethod.EXACT and self.std_error != 0.0:
            raise DomainError("exact partition values carry no standard error")

    @property
    def value(self) -> float:
        return math.exp(self.log_value)


def z_exact(params: GasParams) -> PartitionValue:
    """log Z_{n,beta} = log Gamma(beta n / 2 + 1) - n log Gamma(beta / 2 + 1)."""
    b = params.beta / 2.0
    log_z = float(special.gammaln(b * params.n + 1.0) - params.n * special.gammaln(b + 1.0))
    return PartitionValue(log_value=log_z, method=PartitionMethod.EXACT)


def _grid_mean(params: GasParams, cells: int) -> float:
    """
    Midpoint-rule mean of prod |2 sin(pi (x_i - x_j) / n)|^beta over Lambda_n^n.

    The integrand is translation invariant on the circle, so x_1 is pinned
    at 0 and the remaining n - 1 coordinates run over the grid.
    """
    n = params.n
    h = n / cells
    axis = -n / 2.0 + (np.arange(cells) + 0.5) * h
    grids = np.meshgrid(*([axis] * (n - 1)), indexing="ij")
    coords = [np.zeros_like(grids[0])] + list(grids)
    log_w = np.zeros_like(grids[0])
    for i in range(n):
        for j in range(i + 1, n):
            s = np.abs(2.0 * np.sin(np.pi * (coords[i] - coords[j]) / n))
            with np.errstate(divide="ignore"):
                log_w += params.beta * np.log(s)
    return float(np.exp(log_w).mean())


def z_quadrature(params: GasParams) -> PartitionValue:
    """
    Z_{n,beta} by Richardson-extrapolated midpoint quadrature.

    The Boltzmann factor is written as prod |2 sin(...)|^beta, which is
    continuous and vanishes on the diagonals, so no cell straddles a pole.

    Raises:
        TooLarge: For n > 3
    """
    if params.n > MAX_QUADRATURE_N:
        raise TooLarge(f"quadrature is limited to n <= {MAX_QUADRATURE_N}, got {params.n}")
    if params.n == 1:
        return PartitionValue(log_value=0.0, method=PartitionMethod.QUADRATURE)
    cells = QUADRATURE_CELLS[params.n]
    coarse = _grid_mean(params, cells)
    fine = _grid_mean(params, 2 * cells)
    extrapolated = (4.0 * fine - coarse) / 3.0
    logger.debug("quadrature n=%d beta=%g: coarse %.10g fine %.10g", params.n, params.beta, coarse, fine)
    return PartitionValue(log_value=math.log(extrapolated), method=PartitionMethod.QUADRATURE)


def _log_mean(log_weights: np.ndarray) -> Tuple[float, float]:
    """log of the sample mean of exp(log_weights) and its delta-method standard error."""
    top = float(log_weights.max())
    w = np.exp(log_weights - top)
    mean = float(w.mean())
    se = float(w.std(ddof=1) / (mean * math.sqrt(w.size))) if w.size > 1 else 0.0
    return top + math.log(mean), se


def z_conditional_estimate(spec: KernelSpec, samples: int, rng: np.random.Generator) -> PartitionValue:
    """
    Plain Monte Carlo estimate of Z_{Lambda, Lambda_p}(gamma) under B_{N, Lambda}.

    The weight is exp(-beta (H_Lambda(eta) + M(eta, gamma))) with M measured
    against spec.reference; without a reference only the eta side of M counts.

    Raises:
        DegenerateWeight: If an exterior point sits in Lambda or every weight vanishes
    """
    if spec.fixed_count == 0:
        return PartitionValue(log_value=0.0, method=PartitionMethod.MONTE_CARLO, std_error=0.0)
    if np.any(spec.inner.mask(spec.exterior.points)):
        raise DegenerateWeight("an exterior point lies inside the inner window")
    ref_field = 0.0
    if spec.reference is not None:
        ref_field = math.fsum(spec.one_body(spec.reference.points).tolist())
    log_weights = np.empty(samples)
    for k in range(samples):
        eta = bernoulli_sample(spec.fixed_count, spec.inner, rng)
        if any(spec.touches_exterior(x) for x in eta.points):
            log_weights[k] = -np.inf
            continue
        energy = total_energy(spec.model, eta.points) + math.fsum(spec.one_body(eta.points).tolist()) - ref_field
        log_weights[k] = -spec.beta * energy
    finite = np.isfinite(log_weights)
    if not finite.any():
        raise DegenerateWeight("all sampled Gibbs weights are zero")
    log_z, se = _log_mean(log_weights)
    return PartitionValue(log_value=log_z, method=PartitionMethod.MONTE_CARLO, std_error=se)


def conditional_partition(
    gamma_ext: PointConfiguration,
    count: int,
    inner: Window,
    beta: float,
    p: float,
    samples: int,
    rng: np.random.Generator,
) -> PartitionValue:
    """Z(exterior, N): mean over eta ~ B_{N, Lambda} of prod omega_p(x) exp(-beta H_Lambda(eta))."""
    if count == 0:
        return PartitionValue(log_value=0.0, method=PartitionMethod.MONTE_CARLO, std_error=0.0)
    model = InteractionModel.non_periodic()
    log_weights = np.empty(samples)
    for k in range(samples):
        eta = bernoulli_sample(count, inner, rng)
        logs = [log_exterior_weight(x, gamma_ext, beta, p) for x in eta.points]
        if any(lw is None for lw in logs):
            log_weights[k] = -np.inf
            continue
        log_weights[k] = math.fsum(logs) - beta * total_energy(model, eta.points)
    if not np.isfinite(log_weights).any():
        raise DegenerateWeight("all sampled Gibbs weights are zero")
    log_z, se = _log_mean(log_weights)
    return PartitionValue(log_value=log_z, method=PartitionMethod.MONTE_CARLO, std_error=se)


def stirling_profile(beta: float, exponents: Sequence[int] = tuple(range(4, 13))) -> Tuple[List[float], List[float]]:
    """
    (1/n) log Z_{n,beta} - (beta/2) log(n / 2 pi) for n = 2^k, and successive differences.

    Returns:
        Tuple of (values, absolute successive differences)
    """
    values = []
    for k in exponents:
        n = 2 ** k
        log_z = z_exact(GasParams(n=n, beta=beta)).log_value
        values.append(log_z / n - (beta / 2.0) * math.log(n / (2.0 * math.pi)))
    diffs = [abs(b - a) for a, b in zip(values, values[1:])]
    return values, diffs
