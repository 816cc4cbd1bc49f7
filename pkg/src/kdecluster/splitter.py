"""Split detection over a decreasing level-set family.

Starting from rho0, the loop counts the tau-connected components of the
estimate at the current level that still meet the estimate two level steps
higher, raising the level by eps after every count, until the count differs
from one.  The level then jumps by two more steps and the count is repeated:
more than one surviving component yields a split at that level, otherwise
the start level and its estimate are returned.  Every visited (level, count)
pair is recorded in the trace, the final recount included.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from kdecluster.connectivity import tau_components


class SplitterCapError(RuntimeError):
    """Raised when the level loop passes the termination guard."""

    def __init__(self, message: str, trace):
        super().__init__(message)
        self.trace = trace


@dataclass(frozen=True)
class SplitterParams:
    """Loop parameters: connectivity scale, level step, start level, guard cap."""

    tau: float
    eps: float
    rho0: float
    rho_cap: float

    def __post_init__(self):
        if self.tau <= 0 or self.eps <= 0:
            raise ValueError("tau and eps must be positive")
        if self.rho0 < 0:
            raise ValueError("rho0 must be nonnegative")
        if self.rho_cap <= self.rho0:
            raise ValueError("rho_cap must exceed rho0")


@dataclass(frozen=True)
class ClusterOutput:
    """Either a split level with its component index sets, or the start level."""

    split: bool
    rho_out: float
    components: tuple
    base_set: tuple | None
    trace: tuple

    def to_json(self) -> dict:
        return {
            "split": self.split,
            "rho_out": self.rho_out,
            "components": [list(c) for c in self.components],
            "base_set": list(self.base_set) if self.base_set is not None else None,
            "trace": [[rho, m] for rho, m in self.trace],
        }


def filtered_components(family, rho: float, eps: float, tau: float,
                        sigma: float | None = None, edge_rule: str = "paper"):
    """Components of the estimate at rho that intersect the estimate at rho + 2 eps.

    Active sets are nested, so a component meets the higher estimate exactly
    when it contains a sample index active at rho + 2 eps.
    """
    est = family(rho)
    if est.active.size == 0:
        return 0, []
    high = family(rho + 2.0 * eps).active
    part = tau_components(
        family.points,
        est.active,
        sigma if sigma is not None else family.sigma,
        tau,
        norm=family.norm,
        edge_rule=edge_rule,
    )
    kept = [
        np.asarray(comp, dtype=np.intp)
        for comp in part.member_lists
        if np.intersect1d(comp, high, assume_unique=False).size > 0
    ]
    return len(kept), kept


def run_generic(family, params: SplitterParams, counter=None) -> ClusterOutput:
    """Run the level loop against the family; deterministic given its inputs."""
    if counter is None:
        def counter(rho):
            return filtered_components(family, rho, params.eps, params.tau)

    trace = []
    rho = params.rho0
    while True:
        if rho > params.rho_cap:
            raise SplitterCapError(
                f"level {rho} exceeded cap {params.rho_cap}; family may not be nested",
                trace=tuple(trace),
            )
        m, _ = counter(rho)
        trace.append((rho, m))
        rho = rho + params.eps
        if m != 1:
            break
    rho = rho + 2.0 * params.eps
    m, comps = counter(rho)
    trace.append((rho, m))
    if m > 1:
        return ClusterOutput(
            split=True,
            rho_out=rho,
            components=tuple(tuple(int(i) for i in c) for c in comps),
            base_set=None,
            trace=tuple(trace),
        )
    base = family(params.rho0).active
    return ClusterOutput(
        split=False,
        rho_out=params.rho0,
        components=(),
        base_set=tuple(int(i) for i in base),
        trace=tuple(trace),
    )


def default_params(family, tau: float, eps: float, rho0: float) -> SplitterParams:
    """Parameters with the belt-and-braces cap above the family's top value."""
    return SplitterParams(tau=tau, eps=eps, rho0=rho0, rho_cap=family.max_value + 5.0 * eps)
