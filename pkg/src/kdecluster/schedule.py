"""Parameter schedules: dilation radius, level step, connectivity scale,
the bandwidth grid, and data-driven bandwidth selection.

All schedules use natural logarithms.  The level step combines the
concentration term C_u * sqrt(|log d| (varsigma + log |grid|) log log n /
(d^dim n)) with, for unbounded kernels only, the tail term
max(1, 2 dim^2 V_dim) * c * d^(|log d| - dim).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from kdecluster.density import Dataset
from kdecluster.kernels import Kernel, euclidean_ball_volume
from kdecluster.levelset import level_family
from kdecluster.splitter import ClusterOutput, default_params, run_generic

E_INV = 1.0 / math.e


class ScheduleError(ValueError):
    """Raised when schedule preconditions fail."""


@dataclass(frozen=True)
class ParameterSet:
    """One run's parameters with the provenance of each scheduled field."""

    delta: float
    sigma: float
    eps: float
    tau: float
    rho0: float
    varsigma: float
    c_u: float
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if min(self.delta, self.sigma, self.eps, self.tau) <= 0:
            raise ScheduleError("delta, sigma, eps, tau must be positive")
        if self.sigma < self.delta:
            raise ScheduleError("sigma must be at least delta")

    def to_json(self) -> dict:
        return {
            "delta": self.delta,
            "sigma": self.sigma,
            "eps": self.eps,
            "tau": self.tau,
            "rho0": self.rho0,
            "varsigma": self.varsigma,
            "c_u": self.c_u,
            "provenance": dict(self.provenance),
        }


def sigma_schedule(delta: float, kernel: Kernel) -> float:
    """Dilation radius: delta for bounded support, else delta |log delta|^2."""
    if delta <= 0:
        raise ScheduleError("delta must be positive")
    if kernel.bounded_support:
        return delta
    if delta > E_INV:
        raise ScheduleError(
            f"unbounded kernels need delta <= 1/e, got {delta} (the schedule "
            "would fall below delta)"
        )
    return delta * math.log(delta) ** 2


def epsilon_schedule(
    delta: float,
    n: int,
    varsigma: float,
    grid_size: int,
    c_u: float,
    kernel: Kernel,
) -> float:
    """Level step: concentration term plus (unbounded kernels) the tail term."""
    if not 0 < delta <= E_INV:
        raise ScheduleError(f"delta must lie in (0, 1/e], got {delta}")
    if n < 16:
        raise ScheduleError("n must be at least 16")
    if varsigma < 1:
        raise ScheduleError("varsigma must be at least 1")
    if grid_size < 1:
        raise ScheduleError("grid_size must be at least 1")
    if c_u < 1:
        raise ScheduleError("c_u must be at least 1")
    d = kernel.dim
    log_d = abs(math.log(delta))
    main = c_u * math.sqrt(
        log_d * (varsigma + math.log(grid_size)) * math.log(math.log(n)) / (delta**d * n)
    )
    if kernel.bounded_support:
        return main
    vd = euclidean_ball_volume(d)
    tail = max(1.0, 2.0 * d * d * vd) * kernel.exp_tail_constant * delta ** (log_d - d)
    return main + tail


def tau_schedule(
    sigma: float,
    gamma: float,
    *,
    c_thick: float = 1.0,
    n: int | None = None,
    mode: str = "fixed",
    margin: float = 0.1,
) -> float:
    """Connectivity scale.

    Fixed mode clears the thickness threshold 3 c_thick (2 sigma)^gamma with
    explicit slack.  Adaptive mode uses sigma^gamma log log log n, which
    requires a triple-log above zero and, at realistic sample sizes, yields
    values too small to clear the thickness threshold; it exists for schedule
    completeness.
    """
    if sigma <= 0:
        raise ScheduleError("sigma must be positive")
    if not 0 < gamma <= 1:
        raise ScheduleError("gamma must lie in (0, 1]")
    if mode == "fixed":
        return 3.0 * c_thick * (2.0 * sigma) ** gamma * (1.0 + margin)
    if mode == "adaptive":
        if n is None:
            raise ScheduleError("adaptive mode needs n")
        lll = math.log(math.log(math.log(n))) if n > math.e**math.e else -math.inf
        if not lll > 0:
            raise ScheduleError(
                f"triple log of n={n} is not positive; use fixed mode"
            )
        return sigma**gamma * lll
    raise ScheduleError(f"unknown tau mode {mode!r}")


@dataclass(frozen=True)
class BandwidthGrid:
    """Candidate bandwidths within the admissible interval for sample size n."""

    deltas: np.ndarray
    n: int
    interval: tuple

    def __post_init__(self):
        if self.deltas.size == 0:
            raise ScheduleError("empty bandwidth grid")
        if self.deltas.size > self.n:
            raise ScheduleError("bandwidth grid larger than n")
        if np.any(self.deltas <= 0) or np.any(self.deltas > E_INV + 1e-15):
            raise ScheduleError("bandwidths must lie in (0, 1/e]")

    def __len__(self) -> int:
        return int(self.deltas.size)

    def __iter__(self):
        return iter(self.deltas.tolist())


def bandwidth_interval(n: int, d: int) -> tuple:
    """Admissible bandwidth interval endpoints for sample size n."""
    if n < 16:
        raise ScheduleError("n must be at least 16")
    ll = math.log(math.log(n))
    lo = (math.log(n) * ll**2 / n) ** (1.0 / d)
    hi = (1.0 / ll) ** (1.0 / d)
    if lo >= hi:
        raise ScheduleError(f"degenerate bandwidth interval [{lo}, {hi}]")
    return lo, hi


def bandwidth_grid(n: int, d: int, max_size: int | None = None) -> BandwidthGrid:
    """Arithmetic n^(-1/d)-net of the admissible interval, clipped to (0, 1/e].

    ``max_size`` switches to a geometric subsample of the same range, for
    budgeted experiments; the full net is the default.
    """
    lo, hi = bandwidth_interval(n, d)
    hi_eff = min(hi, E_INV)
    if lo > hi_eff:
        raise ScheduleError(
            f"bandwidth interval [{lo}, {hi}] has no admissible part below 1/e"
        )
    if max_size is not None:
        if max_size < 1:
            raise ScheduleError("max_size must be positive")
        deltas = np.geomspace(lo, hi_eff, max_size)
    else:
        spacing = n ** (-1.0 / d)
        deltas = np.arange(lo, hi + spacing / 2, spacing)
        if deltas.size == 0 or deltas[-1] < hi - spacing:
            deltas = np.append(deltas, hi)
        deltas = deltas[deltas <= hi_eff + 1e-15]
        if deltas.size == 0:
            deltas = np.array([hi_eff])
    deltas = np.unique(np.minimum(deltas, E_INV))
    return BandwidthGrid(deltas=deltas, n=n, interval=(lo, hi))


def delta_lemma_holds(delta: float, d: int) -> bool:
    """d^{|log d|} |log d|^(2 dim - 2) <= d^{|log d| - dim} on (0, 1/e]."""
    log_d = abs(math.log(delta))
    return delta**log_d * log_d ** (2 * d - 2) <= delta ** (log_d - d) * (1 + 1e-12)


def build_parameter_set(
    kernel: Kernel,
    n: int,
    delta: float,
    varsigma: float,
    c_u: float,
    gamma: float,
    c_thick: float,
    *,
    grid_size: int = 1,
    margin: float = 0.1,
    rho0: float | None = None,
) -> ParameterSet:
    """Scheduled parameters for one run at a fixed bandwidth."""
    sigma = sigma_schedule(delta, kernel)
    eps = epsilon_schedule(delta, n, varsigma, grid_size, c_u, kernel)
    tau = tau_schedule(sigma, gamma, c_thick=c_thick, margin=margin)
    if rho0 is None:
        rho0 = eps
        rho0_src = "start level = level step"
    else:
        rho0_src = "user override"
    return ParameterSet(
        delta=delta,
        sigma=sigma,
        eps=eps,
        tau=tau,
        rho0=rho0,
        varsigma=varsigma,
        c_u=c_u,
        provenance={
            "sigma": "bounded-support rule" if kernel.bounded_support else "delta log^2 rule",
            "eps": f"concentration schedule (grid_size={grid_size})",
            "tau": f"fixed thickness rule (c_thick={c_thick}, gamma={gamma}, margin={margin})",
            "rho0": rho0_src,
        },
    )


@dataclass(frozen=True)
class AdaptiveResult:
    """Outcome of running the splitter across a bandwidth grid."""

    delta_star: float
    rho_star: float
    per_delta: dict
    params_per_delta: dict
    selected_output: ClusterOutput
    skipped: dict


def select_smallest_argmin(deltas, rho_outs) -> tuple:
    """Smallest bandwidth attaining the minimal returned level."""
    if not deltas:
        raise ScheduleError("nothing to select from")
    rho_star = min(rho_outs)
    for d, r in sorted(zip(deltas, rho_outs)):
        if r == rho_star:
            return d, rho_star
    raise AssertionError("unreachable")


def adaptive_select(
    dataset: Dataset,
    kernel: Kernel,
    deltas,
    varsigma: float,
    c_u: float,
    gamma: float,
    c_thick: float,
    *,
    margin: float = 0.1,
    edge_rule: str = "paper",
) -> AdaptiveResult:
    """Run the splitter per bandwidth and keep the smallest returned level.

    Per-bandwidth schedule failures are recorded as skips; the call fails only
    when every bandwidth fails.
    """
    deltas = sorted(float(d) for d in deltas)
    grid_size = len(deltas)
    per_delta: dict = {}
    params_all: dict = {}
    skipped: dict = {}
    for delta in deltas:
        try:
            params = build_parameter_set(
                kernel, dataset.n, delta, varsigma, c_u, gamma, c_thick,
                grid_size=grid_size, margin=margin,
            )
            family = level_family(dataset, kernel, delta, params.sigma)
            run = run_generic(
                family,
                default_params(family, params.tau, params.eps, params.rho0),
            )
        except (ScheduleError, ValueError) as exc:
            skipped[delta] = str(exc)
            continue
        per_delta[delta] = run
        params_all[delta] = params
    if not per_delta:
        raise ScheduleError(f"all bandwidths failed: {skipped}")
    ds = list(per_delta)
    delta_star, rho_star = select_smallest_argmin(ds, [per_delta[d].rho_out for d in ds])
    return AdaptiveResult(
        delta_star=delta_star,
        rho_star=rho_star,
        per_delta=per_delta,
        params_per_delta=params_all,
        selected_output=per_delta[delta_star],
        skipped=skipped,
    )
