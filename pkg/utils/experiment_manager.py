"""
Experiment configuration parsing and the run pipeline behind every command.
"""
import json
import logging
import math
import time
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Optional, Tuple

import numpy as np

from config.settings import (
    DEFAULT_TOLERANCES,
    KERNEL_STEPS_PER_POINT,
    SAMPLING_COMMANDS,
    SE_MULTIPLIER,
    Command,
    InteractionKind,
    get_default_seed,
    get_output_dir,
    get_se_threshold,
    get_tuple_cap,
    get_workers,
)
from loggas.configuration import PointConfiguration, Window, count_in, empty_configuration
from loggas.diagnostics import (
    ConstantStatistic,
    CountStatistic,
    MCEstimate,
    SmoothExponentialStatistic,
    algebraic_identity_residual,
    campbell_estimate,
    discrepancy_stats,
    dlr_residuals,
    fluctuation_stat,
    fluctuation_variance,
    gap_histogram,
    is_decreasing,
    is_nondecreasing,
    is_nonincreasing,
    overcrowding_probability,
    plateau,
    random_identity_instance,
    rigidity_probe,
    truncation_profile,
)
from loggas.energy import (
    InteractionModel,
    equally_spaced,
    potential_bound_check,
    potential_mean,
    potential_mean_profile,
    potential_mean_quadrature,
    renormalized_energy_periodic,
    small_argument_gap,
)
from loggas.errors import ConfigParseError, ConfigValidationError, DomainError, LogGasError
from loggas.partition import MAX_QUADRATURE_N, z_conditional_estimate, z_exact, z_quadrature, stirling_profile
from loggas.sampler import (
    ChainResult,
    GasParams,
    KernelSpec,
    bernoulli_sample,
    chain_rng,
    poisson_sample,
    resample_interior,
    run_chains,
)
from utils import artifacts
from utils.validators import Validator

logger = logging.getLogger(__name__)

# Drift of the incrementally tracked chain energy that still counts as exact
MAX_ENERGY_DRIFT = 1e-6

# Closed-form vs quadrature agreement for the mean of the moved-charge potential
MEAN_QUADRATURE_TOL = 1e-6

# Discrepancy ratio may exceed its unit-window value by this factor
DISCREPANCY_GROWTH = 1.5

# Fluctuation variance at any ell may exceed its smallest-ell value by this factor
FLUCTUATION_GROWTH = 1.5

OVERCROWDING_MIN_RADIUS = 16.0
OVERCROWDING_MIN_PROBABILITY = 0.99

LATTICE_SIZES = (1, 2, 4, 8, 16)


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment configuration; optional fields are filled from n and the environment."""
    command: Command
    n: int
    beta: float
    model: InteractionKind = InteractionKind.PERIODIC
    period: Optional[int] = None
    inner: Tuple[float, float] = (-1.0, 1.0)
    outer_radius: Optional[float] = None
    radii: Tuple[float, ...] = (16.0, 32.0, 64.0, 128.0)
    windows: Tuple[float, ...] = (1.0, 2.0, 4.0, 8.0, 16.0)
    scales: Tuple[float, ...] = (1.0, 2.0, 4.0, 8.0)
    ell: Tuple[float, ...] = (1.0, 2.0, 4.0)
    seed: int = field(default_factory=get_default_seed)
    chains: int = 4
    steps: Optional[int] = None
    burn_in: Optional[int] = None
    thin: Optional[int] = None
    samples: int = 1000
    kernel_resamples: int = 4
    kernel_steps: Optional[int] = None
    trial_count: int = 8
    delta: float = 0.1
    tolerance: Optional[float] = None
    se_threshold: float = field(default_factory=get_se_threshold)
    instances: int = 1000
    max_interior: int = 5
    order: int = 1
    tuple_cap: int = field(default_factory=get_tuple_cap)
    fraction_threshold: float = 0.9
    workers: int = field(default_factory=get_workers)
    out: str = field(default_factory=get_output_dir)

    @property
    def params(self) -> GasParams:
        return GasParams(n=self.n, beta=self.beta)

    @property
    def inner_window(self) -> Window:
        return Window(*self.inner)

    @property
    def interaction(self) -> InteractionModel:
        if self.model is InteractionKind.PERIODIC:
            return InteractionModel.periodic(self.period or self.n)
        return InteractionModel.non_periodic()

    @property
    def effective_tolerance(self) -> float:
        if self.tolerance is not None:
            return self.tolerance
        return DEFAULT_TOLERANCES.get(self.command, 0.0)

    def to_dict(self) -> Dict[str, Any]:
        """JSON-ready view; enums become their values and tuples become lists."""
        out: Dict[str, Any] = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, (Command, InteractionKind)):
                value = value.value
            elif isinstance(value, tuple):
                value = list(value)
            out[f.name] = value
        return out


def _optional(rule: Callable[[Any], Tuple[bool, Any]]) -> Callable[[Any], Tuple[bool, Any]]:
    def check(value: Any) -> Tuple[bool, Any]:
        return (True, None) if value is None else rule(value)
    return check


FIELD_RULES: Dict[str, Callable[[Any], Tuple[bool, Any]]] = {
    "command": Validator.validate_command,
    "n": Validator.validate_n,
    "beta": Validator.validate_beta,
    "model": Validator.validate_model,
    "period": _optional(lambda v: Validator.validate_positive_int(v, "period")),
    "inner": Validator.validate_window,
    "outer_radius": _optional(lambda v: Validator.validate_positive_float(v, "outer_radius")),
    "radii": lambda v: Validator.validate_increasing(v, "radii"),
    "windows": lambda v: Validator.validate_increasing(v, "windows"),
    "scales": lambda v: Validator.validate_increasing(v, "scales"),
    "ell": lambda v: Validator.validate_increasing(v, "ell"),
    "seed": Validator.validate_seed,
    "chains": lambda v: Validator.validate_positive_int(v, "chains"),
    "steps": _optional(lambda v: Validator.validate_positive_int(v, "steps")),
    "burn_in": _optional(lambda v: Validator.validate_nonnegative_int(v, "burn_in")),
    "thin": _optional(lambda v: Validator.validate_positive_int(v, "thin")),
    "samples": lambda v: Validator.validate_positive_int(v, "samples"),
    "kernel_resamples": lambda v: Validator.validate_positive_int(v, "kernel_resamples"),
    "kernel_steps": _optional(lambda v: Validator.validate_positive_int(v, "kernel_steps")),
    "trial_count": lambda v: Validator.validate_positive_int(v, "trial_count"),
    "delta": lambda v: Validator.validate_positive_float(v, "delta"),
    "tolerance": _optional(lambda v: Validator.validate_positive_float(v, "tolerance")),
    "se_threshold": lambda v: Validator.validate_positive_float(v, "se_threshold"),
    "instances": lambda v: Validator.validate_positive_int(v, "instances"),
    "max_interior": lambda v: Validator.validate_nonnegative_int(v, "max_interior"),
    "order": lambda v: Validator.validate_positive_int(v, "order"),
    "tuple_cap": lambda v: Validator.validate_positive_int(v, "tuple_cap"),
    "fraction_threshold": lambda v: Validator.validate_fraction(v, "fraction_threshold"),
    "workers": lambda v: Validator.validate_positive_int(v, "workers"),
    "out": lambda v: Validator.validate_path(v, "out"),
}

REQUIRED_FIELDS = ("command", "n", "beta")


def build_config(mapping: Mapping[str, Any], overrides: Optional[Mapping[str, Any]] = None) -> ExperimentConfig:
    """
    Validate a raw mapping into an ExperimentConfig.

    Args:
        mapping: Decoded JSON object
        overrides: Command-line values; None entries are ignored and the rest win

    Raises:
        ConfigValidationError: On unknown keys, missing required keys or invalid values
    """
    merged = dict(mapping)
    merged.update({k: v for k, v in (overrides or {}).items() if v is not None})

    for key in merged:
        if key not in FIELD_RULES:
            raise ConfigValidationError(f"unknown config key '{key}'", field=key)
    for key in REQUIRED_FIELDS:
        if key not in merged:
            raise ConfigValidationError(f"missing required key '{key}'", field=key)

    cleaned: Dict[str, Any] = {}
    for key, value in merged.items():
        ok, result = FIELD_RULES[key](value)
        if not ok:
            raise ConfigValidationError(result, field=key)
        if result is not None:
            cleaned[key] = result

    config = ExperimentConfig(**cleaned)
    _check_consistency(config)
    return config


def _check_consistency(config: ExperimentConfig) -> None:
    if config.model is InteractionKind.NON_PERIODIC and config.period is not None:
        raise ConfigValidationError("period is only meaningful for the periodic model", field="period")
    if config.period is not None and config.period != config.n and config.command is not Command.VERIFY_BOUNDS:
        raise ConfigValidationError(f"period must equal n = {config.n} for {config.command.value}", field="period")
    if config.steps is not None and config.burn_in is not None and config.steps <= config.burn_in:
        raise ConfigValidationError("steps must exceed burn_in", field="steps")
    uses_inner = config.command in SAMPLING_COMMANDS or config.command is Command.VERIFY_IDENTITY
    if uses_inner and config.command is not Command.SAMPLE and not config.params.window.contains_window(config.inner_window):
        raise ConfigValidationError(f"inner window {list(config.inner)} must lie in [-n/2, n/2]", field="inner")


def parse_config(source: str, overrides: Optional[Mapping[str, Any]] = None) -> ExperimentConfig:
    """
    Parse a JSON experiment config.

    Raises:
        ConfigParseError: If the text is not a JSON object
        ConfigValidationError: If a field is unknown or invalid
    """
    try:
        raw = json.loads(source)
    except json.JSONDecodeError as exc:
        raise ConfigParseError(exc.msg, line=exc.lineno, column=exc.colno) from exc
    if not isinstance(raw, dict):
        raise ConfigParseError("config must be a JSON object", line=1, column=1)
    return build_config(raw, overrides)


@dataclass
class RunOutcome:
    """Exit status and where the artifacts went."""
    status: int
    run_dir: Path
    manifest: Optional[Dict[str, Any]] = None
    error: Optional[Dict[str, Any]] = None


# Test functions for the Campbell checks; module level so they pickle


def unit_box_test(xs: Tuple[float, ...], rest: PointConfiguration) -> float:
    return 1.0 if all(0.0 <= x <= 1.0 for x in xs) else 0.0


def isolated_point_test(xs: Tuple[float, ...], rest: PointConfiguration) -> float:
    """1 if x lies in [0, 1] and no other point is within 1/2 of it."""
    x = xs[0]
    if not 0.0 <= x <= 1.0:
        return 0.0
    return 0.0 if np.any(np.abs(rest.points - x) <= 0.5) else 1.0


def _isolated_point_direct(gamma: PointConfiguration) -> float:
    pts = gamma.points
    total = []
    for i, x in enumerate(pts.tolist()):
        others = np.delete(pts, i)
        total.append(1.0 if 0.0 <= x <= 1.0 and not np.any(np.abs(others - x) <= 0.5) else 0.0)
    return math.fsum(total)


def fluctuation_profile(t: np.ndarray) -> np.ndarray:
    """C^1 plateau equal to 1 on [-1/2, 1/2] and supported in [-1, 1]."""
    return plateau(t, Window(-0.5, 0.5), 0.5)


class ExperimentManager:
    """Runs one configured experiment and records its artifacts."""

    def __init__(self, config: ExperimentConfig, root: Optional[Path] = None):
        self.config = config
        self.root = Path(root if root is not None else config.out)
        self.rows: List[Dict[str, Any]] = []
        self.checks: List[Dict[str, Any]] = []
        self.extra: Dict[str, Any] = {}
        self.run_dir: Optional[Path] = None
        self._handlers: Dict[Command, Callable[[], None]] = {
            Command.SAMPLE: self._run_sample,
            Command.RESAMPLE: self._run_resample,
            Command.VERIFY_DLR: self._run_verify_dlr,
            Command.VERIFY_IDENTITY: self._run_verify_identity,
            Command.VERIFY_BOUNDS: self._run_verify_bounds,
            Command.PARTITION: self._run_partition,
            Command.STATS_DISCREPANCY: self._run_stats_discrepancy,
            Command.STATS_RIGIDITY: self._run_stats_rigidity,
            Command.STATS_CAMPBELL: self._run_stats_campbell,
            Command.TRUNCATION: self._run_truncation,
        }

    @property
    def passed(self) -> bool:
        return all(c["pass"] for c in self.checks)

    def execute(self) -> RunOutcome:
        """
        Run the command pipeline and write manifest, CSV and JSONL into a fresh run directory.

        Returns:
            RunOutcome with status 0 when every check passes, 1 when one fails,
            2 when the run stopped on an error
        """
        cfg = self.config
        digest = artifacts.config_hash(cfg.to_dict())
        self.run_dir = artifacts.make_run_dir(self.root, digest)
        logger.info("running %s (n=%d, beta=%g, seed=%d)", cfg.command.value, cfg.n, cfg.beta, cfg.seed)
        start = time.perf_counter()
        try:
            self._handlers[cfg.command]()
        except LogGasError as exc:
            logger.error("%s failed: %s", cfg.command.value, exc)
            record = artifacts.write_error(self.run_dir, exc)
            return RunOutcome(status=2, run_dir=self.run_dir, error=record)
        except Exception as exc:
            logger.exception("%s crashed", cfg.command.value)
            record = artifacts.write_error(self.run_dir, exc)
            return RunOutcome(status=2, run_dir=self.run_dir, error=record)
        wall_time = time.perf_counter() - start

        if self.rows:
            artifacts.write_results_csv(self.run_dir / artifacts.RESULTS_FILE, self.rows)
        extra = {"command": cfg.command.value, "params": {"n": cfg.n, "beta": cfg.beta}, "config": cfg.to_dict()}
        extra.update(self.extra)
        manifest = artifacts.write_manifest(self.run_dir, digest, cfg.seed, wall_time, self.passed, self.checks, extra)
        for check in self.checks:
            level = logging.INFO if check["pass"] else logging.WARNING
            logger.log(level, "check %s: %s", check["name"], "pass" if check["pass"] else "FAIL")
        return RunOutcome(status=0 if self.passed else 1, run_dir=self.run_dir, manifest=manifest)

    # Recording

    def _row(self, test: str, param: Any, mean: float, std_error: float, n_samples: int, passed: bool,
             window: Optional[Window] = None) -> None:
        w = window or self.config.inner_window
        self.rows.append({
            "test": test,
            "n": self.config.n,
            "beta": self.config.beta,
            "window_lo": w.lo,
            "window_hi": w.hi,
            "param": param,
            "mean": float(mean),
            "std_error": float(std_error),
            "n_samples": int(n_samples),
            "pass": bool(passed),
        })

    def _estimate_row(self, test: str, param: Any, est: MCEstimate, passed: bool, window: Optional[Window] = None) -> None:
        self._row(test, param, est.mean, est.std_error, est.n_samples, passed, window)

    def _check(self, name: str, passed: bool, **detail: Any) -> bool:
        self.checks.append({"name": name, "pass": bool(passed), **detail})
        return bool(passed)

    # Sampling helpers

    def _schedule(self) -> Tuple[int, int, int]:
        """(steps, burn_in, thin) per chain, sized to deliver the requested sample count."""
        cfg = self.config
        params = cfg.params
        burn_in = cfg.burn_in if cfg.burn_in is not None else params.default_burn_in()
        thin = cfg.thin if cfg.thin is not None else params.default_thin()
        per_chain = math.ceil(cfg.samples / cfg.chains)
        steps = cfg.steps if cfg.steps is not None else burn_in + thin * per_chain
        self.extra.update({"steps": steps, "burn_in": burn_in, "thin": thin})
        return steps, burn_in, thin

    def _sample_gas(self) -> Tuple[List[ChainResult], List[PointConfiguration]]:
        cfg = self.config
        steps, burn_in, thin = self._schedule()
        results = run_chains(cfg.params, steps, burn_in, thin, cfg.seed, cfg.chains, cfg.workers)
        self.extra["acceptance_rate"] = [r.acceptance_rate for r in results]
        samples = [s for r in results for s in r.samples]
        logger.info("collected %d samples from %d chains", len(samples), len(results))
        return results, samples

    def _outer_radius(self) -> float:
        return self.config.outer_radius if self.config.outer_radius is not None else float(self.config.n)

    # Commands

    def _run_sample(self) -> None:
        results, samples = self._sample_gas()
        artifacts.write_jsonl(self.run_dir / "samples.jsonl", samples)
        for r in results:
            self._row("acceptance_rate", r.index, r.acceptance_rate, 0.0, len(r.samples), True, self.config.params.window)
        drift = max(r.energy_drift for r in results)
        self._check("energy_drift", drift <= MAX_ENERGY_DRIFT, value=drift)

    def _run_resample(self) -> None:
        cfg = self.config
        _, samples = self._sample_gas()
        inner = cfg.inner_window
        rng = chain_rng(cfg.seed, 0, stream=2)
        model = cfg.interaction
        resampled = []
        for gamma in samples:
            steps = cfg.kernel_steps or KERNEL_STEPS_PER_POINT * max(count_in(gamma, inner), 1)
            resampled.append(resample_interior(gamma, inner, self._outer_radius(), model, cfg.beta, steps, rng))
        artifacts.write_jsonl(self.run_dir / "samples.jsonl", samples)
        artifacts.write_jsonl(self.run_dir / "resampled.jsonl", resampled)
        kept = all(count_in(a, inner) == count_in(b, inner) for a, b in zip(samples, resampled))
        self._check("interior_count_preserved", kept)

    def _run_verify_dlr(self) -> None:
        cfg = self.config
        inner = cfg.inner_window
        steps, burn_in, thin = self._schedule()
        stats = {
            "constant": ConstantStatistic(),
            "count": CountStatistic(inner),
            "smooth": SmoothExponentialStatistic(inner),
        }
        est = dlr_residuals(
            stats, cfg.params, inner, self._outer_radius(), cfg.chains, steps, cfg.seed,
            burn_in=burn_in, thin=thin, kernel_resamples=cfg.kernel_resamples,
            kernel_steps=cfg.kernel_steps, workers=cfg.workers,
        )
        for name in ("constant", "count"):
            e = est[name]
            ok = e.mean == 0.0 and e.variance == 0.0
            self._estimate_row(f"dlr_{name}", self._outer_radius(), e, ok)
            self._check(f"dlr_{name}_exact", ok, mean=e.mean, variance=e.variance)
        smooth = est["smooth"]
        ok = smooth.agrees_with(0.0) and smooth.std_error <= cfg.se_threshold
        self._estimate_row("dlr_smooth", self._outer_radius(), smooth, ok)
        self._check("dlr_smooth_zero", ok, mean=smooth.mean, std_error=smooth.std_error)

    def _run_verify_identity(self) -> None:
        cfg = self.config
        inner = cfg.inner_window
        rng = chain_rng(cfg.seed)
        model = InteractionModel.periodic(cfg.n)
        worst = 0.0
        tol = cfg.effective_tolerance
        for k in range(cfg.instances):
            gamma, eta = random_identity_instance(cfg.n, cfg.max_interior, inner, rng)
            residual = algebraic_identity_residual(model, gamma, eta, inner)
            worst = max(worst, residual)
            self._row("identity_residual", k, residual, 0.0, 1, residual <= tol)
        self._check("identity_residual", worst <= tol, max_residual=worst, tolerance=tol)

    def _run_verify_bounds(self) -> None:
        cfg = self.config
        inner = cfg.inner_window
        rng = chain_rng(cfg.seed)
        model = InteractionModel.non_periodic()
        value_bad = deriv_bad = 0
        worst_mean_gap = 0.0
        profiles = []
        for k in range(cfg.instances):
            count = int(rng.integers(1, max(cfg.max_interior, 1) + 1))
            eta = bernoulli_sample(count, inner, rng)
            gamma_inner = bernoulli_sample(count, inner, rng)
            side = rng.choice([-1.0, 1.0], size=8)
            d = 1.0 + rng.exponential(4.0, size=8)
            xs = np.where(side > 0, inner.hi + d, inner.lo - d)
            v, dv = potential_bound_check(model, eta, gamma_inner, inner, xs)
            value_bad += v
            deriv_bad += dv
            if k < 20:
                p = cfg.radii[0]
                closed = potential_mean(eta, gamma_inner, p)
                worst_mean_gap = max(worst_mean_gap, abs(closed - potential_mean_quadrature(eta, gamma_inner, p)))
                profiles.append(potential_mean_profile(eta, gamma_inner, cfg.radii))
        self._row("potential_value_violations", cfg.instances, value_bad, 0.0, cfg.instances, value_bad == 0)
        self._row("potential_derivative_violations", cfg.instances, deriv_bad, 0.0, cfg.instances, deriv_bad == 0)
        self._check("potential_value_bound", value_bad == 0, violations=value_bad)
        self._check("potential_derivative_bound", deriv_bad == 0, violations=deriv_bad)
        self._check("potential_mean_closed_form", worst_mean_gap <= MEAN_QUADRATURE_TOL, max_gap=worst_mean_gap)

        per_radius = [MCEstimate.from_samples([prof[j] for prof in profiles]) for j in range(len(cfg.radii))]
        for p, e in zip(cfg.radii, per_radius):
            self._estimate_row("potential_mean_profile", p, e, True)
        self._check("potential_mean_shrinks", is_nonincreasing(per_radius))

        tol = cfg.effective_tolerance
        target = -math.pi * math.log(2.0 * math.pi)
        lattice_ok = True
        for m in LATTICE_SIZES:
            w = renormalized_energy_periodic(equally_spaced(m), m)
            ok = abs(w - target) <= tol
            lattice_ok &= ok
            self._row("renormalized_energy_lattice", m, w, 0.0, 1, ok, Window.centered(m))
        self._check("renormalized_energy_lattice", lattice_ok, target=target, tolerance=tol)

        period = cfg.period or cfg.n
        gap_ok = True
        for frac in (1e-4, 1e-3, 1e-2, 0.1, 0.25):
            x = frac * period
            gap = small_argument_gap(x, period)
            # -log(sin y / y) <= y^2 / 3 for y <= pi / 4
            ok = gap <= (math.pi * frac) ** 2 / 3.0
            gap_ok &= ok
            self._row("small_argument_gap", x, gap, 0.0, 1, ok)
        self._check("small_argument_gap", gap_ok, period=period)

    def _run_partition(self) -> None:
        cfg = self.config
        params = cfg.params
        tol = cfg.effective_tolerance
        exact = z_exact(params)
        box = params.window
        self._row("z_exact", "exact", exact.value, 0.0, 1, True, box)
        if params.n <= MAX_QUADRATURE_N:
            quad = z_quadrature(params)
            rel = abs(math.expm1(quad.log_value - exact.log_value))
            self._row("z_quadrature", "quadrature", quad.value, 0.0, 1, rel <= tol, box)
            self._check("z_quadrature_rel_diff", rel <= tol, rel_diff=rel, tolerance=tol)

            spec = KernelSpec(
                inner=box, outer_radius=float(params.n), model=params.model, beta=params.beta,
                fixed_count=params.n, exterior=empty_configuration(),
            )
            mc = z_conditional_estimate(spec, cfg.samples, chain_rng(cfg.seed))
            gap = abs(mc.log_value - exact.log_value)
            ok = gap <= SE_MULTIPLIER * mc.std_error
            self._row("z_monte_carlo", "log", mc.log_value, mc.std_error, cfg.samples, ok, box)
            self._check("z_monte_carlo_log", ok, log_gap=gap, std_error=mc.std_error)

        values, diffs = stirling_profile(params.beta)
        for k, v in enumerate(values):
            self._row("stirling_profile", 2 ** (k + 4), v, 0.0, 1, True, box)
        self._check("stirling_profile_settles", diffs[-1] <= diffs[0], first_diff=diffs[0], last_diff=diffs[-1])

    def _run_stats_discrepancy(self) -> None:
        cfg = self.config
        _, samples = self._sample_gas()
        windows = [Window.centered(length) for length in cfg.windows]
        stats = discrepancy_stats(samples, windows)
        for s in stats:
            self._estimate_row("discrepancy", s.window.length, s.discrepancy, True, s.window)
            self._row("discrepancy_sq_ratio", s.window.length, s.ratio, s.ratio_se, s.discrepancy_sq.n_samples, True, s.window)
        first = stats[0]
        bounded = all(
            s.ratio <= DISCREPANCY_GROWTH * first.ratio + SE_MULTIPLIER * math.hypot(s.ratio_se, first.ratio_se)
            for s in stats
        )
        self._check("discrepancy_ratio_bounded", bounded, base_ratio=first.ratio)
        tail = [
            MCEstimate(mean=s.ratio, variance=0.0, std_error=s.ratio_se, n_samples=s.discrepancy_sq.n_samples)
            for s in stats if s.window.length >= 4.0
        ]
        self._check("discrepancy_ratio_nonincreasing", is_nonincreasing(tail))

        inner = cfg.inner_window
        for p in cfg.radii:
            if p < OVERCROWDING_MIN_RADIUS:
                continue
            est = overcrowding_probability(samples, inner, p)
            ok = est.mean >= OVERCROWDING_MIN_PROBABILITY
            self._estimate_row("overcrowding_complement", p, est, ok)
            self._check(f"overcrowding_p{p:g}", ok, probability=est.mean)

    def _run_stats_rigidity(self) -> None:
        cfg = self.config
        params = cfg.params
        inner = cfg.inner_window
        _, samples = self._sample_gas()
        gas = rigidity_probe(samples, inner, cfg.scales)
        rng = chain_rng(cfg.seed, 0, stream=2)
        control = [poisson_sample(1.0, params.window, rng) for _ in samples]
        poisson = rigidity_probe(control, inner, cfg.scales)
        for g, c in zip(gas, poisson):
            self._estimate_row("rigidity_variance_gas", g.scale, g.estimate, True)
            self._estimate_row("rigidity_variance_poisson", c.scale, c.estimate, True)
        self._check("rigidity_gas_decreasing", is_decreasing([g.estimate for g in gas]))
        self._check("rigidity_poisson_nondecreasing", is_nondecreasing([c.estimate for c in poisson]))

        spreads = []
        for ell in cfg.ell:
            est = fluctuation_stat(samples, fluctuation_profile, ell, params.window)
            ok = est.agrees_with(0.0)
            self._estimate_row("fluctuation", ell, est, ok)
            self._check(f"fluctuation_mean_ell{ell:g}", ok, mean=est.mean, variance=est.variance)
            spread = fluctuation_variance(samples, fluctuation_profile, ell, params.window)
            self._estimate_row("fluctuation_variance", ell, spread, True)
            spreads.append(spread)
        first = spreads[0]
        bounded = all(
            s.mean <= FLUCTUATION_GROWTH * first.mean + SE_MULTIPLIER * math.hypot(s.std_error, first.std_error)
            for s in spreads
        )
        self._check("fluctuation_variance_bounded", bounded, variances=[s.mean for s in spreads])

        edges, density = gap_histogram(samples, params.n)
        centers = 0.5 * (edges[:-1] + edges[1:])
        core = (centers >= 0.5) & (centers <= 1.5)
        self._check("gap_density_positive", bool(np.all(density[core] > 0.0)))

    def _run_stats_campbell(self) -> None:
        cfg = self.config
        region = cfg.params.window
        if region.length < 3.0:
            raise DomainError("the Campbell checks need n >= 3 so that [-1/2, 3/2] fits in the sampled region")
        rng = chain_rng(cfg.seed)
        poisson = [poisson_sample(1.0, region, rng) for _ in range(cfg.samples)]
        unit = Window(0.0, 1.0)

        first = campbell_estimate(poisson, 1, unit_box_test, cfg.tuple_cap, support=unit)
        ok = first.test_statistic_mean.agrees_with(1.0)
        self._estimate_row("campbell_unit_box", 1, first.test_statistic_mean, ok, unit)
        self._check("campbell_unit_box", ok, mean=first.test_statistic_mean.mean)

        isolated = campbell_estimate(poisson, 1, isolated_point_test, cfg.tuple_cap)
        direct = MCEstimate.from_samples([_isolated_point_direct(g) for g in poisson])
        same = isolated.test_statistic_mean.mean == direct.mean
        self._estimate_row("campbell_isolated_point", 1, isolated.test_statistic_mean, same, unit)
        self._check("campbell_matches_enumeration", same)
        ok = isolated.test_statistic_mean.agrees_with(math.exp(-1.0))
        self._check("campbell_reduced_palm", ok, mean=isolated.test_statistic_mean.mean, target=math.exp(-1.0))

        if cfg.order > 1:
            higher = campbell_estimate(poisson, cfg.order, unit_box_test, cfg.tuple_cap, support=unit)
            ok = higher.test_statistic_mean.agrees_with(1.0)
            self._estimate_row("campbell_factorial_moment", cfg.order, higher.test_statistic_mean, ok, unit)
            self._check("campbell_factorial_moment", ok, mean=higher.test_statistic_mean.mean)

    def _run_truncation(self) -> None:
        cfg = self.config
        _, samples = self._sample_gas()
        profile = truncation_profile(
            cfg.params, cfg.inner_window, cfg.radii, cfg.trial_count, cfg.delta,
            samples, chain_rng(cfg.seed, 0, stream=2),
        )
        for p, sup, frac in zip(profile.radii, profile.sup_estimates, profile.fraction_within_delta):
            self._row("truncation_sup", p, sup, 0.0, len(samples), True)
            self._row("truncation_fraction", p, frac, 0.0, len(samples), True)
        fracs = profile.fraction_within_delta
        self._check("truncation_fraction_nondecreasing", all(b >= a for a, b in zip(fracs, fracs[1:])))
        self._check("truncation_fraction_final", fracs[-1] >= cfg.fraction_threshold,
                    fraction=fracs[-1], threshold=cfg.fraction_threshold)


def run_experiment(config: ExperimentConfig, root: Optional[Path] = None) -> RunOutcome:
    return ExperimentManager(config, root).execute()
