"""Symmetric kernel profiles: normalization, bandwidth scaling, tail functions.

Kernels are radial, K(x) = c * k(||x||), for a fixed set of profiles and a
choice of norm (Euclidean or supremum).  The normalizer c is computed in
closed form from the radial moment integral, so that K integrates to one.
The tail functions kappa1 (mass outside a ball) and kappa_inf (sup outside a
ball) are exact for bounded-support profiles and use incomplete-gamma closed
forms for the gaussian and laplacian profiles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

EUCLIDEAN = "euclidean"
SUPREMUM = "supremum"
NORMS = (EUCLIDEAN, SUPREMUM)

BOUNDED_PROFILES = (
    "rectangular",
    "triangular",
    "epanechnikov",
    "quartic",
    "triweight",
    "tricube",
)
UNBOUNDED_PROFILES = ("gaussian", "laplacian")
PROFILES = BOUNDED_PROFILES + UNBOUNDED_PROFILES


class KernelError(ValueError):
    """Raised for unsupported kernel configurations."""


def norm_of(x: np.ndarray, norm: str) -> np.ndarray:
    """Norm of the last axis of ``x``."""
    x = np.asarray(x, dtype=float)
    if norm == EUCLIDEAN:
        return np.sqrt(np.sum(x * x, axis=-1))
    if norm == SUPREMUM:
        return np.max(np.abs(x), axis=-1)
    raise KernelError(f"unknown norm: {norm!r}")


def distance(a: np.ndarray, b: np.ndarray, norm: str) -> np.ndarray:
    return norm_of(np.asarray(a, dtype=float) - np.asarray(b, dtype=float), norm)


def unit_ball_volume(dim: int, norm: str) -> float:
    """Lebesgue volume of the unit ball of the norm in R^dim."""
    if norm == EUCLIDEAN:
        return math.pi ** (dim / 2.0) / math.gamma(dim / 2.0 + 1.0)
    if norm == SUPREMUM:
        return 2.0**dim
    raise KernelError(f"unknown norm: {norm!r}")


def euclidean_ball_volume(dim: int) -> float:
    return unit_ball_volume(dim, EUCLIDEAN)


def _profile_fn(profile: str):
    """Unnormalized radial profile k0(r), vectorized, exact zeros outside support."""
    if profile == "rectangular":
        return lambda r: np.where(r <= 1.0, 1.0, 0.0)
    if profile == "triangular":
        return lambda r: np.maximum(0.0, 1.0 - r)
    if profile == "epanechnikov":
        return lambda r: np.maximum(0.0, 1.0 - r * r)
    if profile == "quartic":
        return lambda r: np.maximum(0.0, 1.0 - r * r) ** 2
    if profile == "triweight":
        return lambda r: np.maximum(0.0, 1.0 - r * r) ** 3
    if profile == "tricube":
        return lambda r: np.maximum(0.0, 1.0 - r**3) ** 3
    if profile == "gaussian":
        return lambda r: np.exp(-np.asarray(r, dtype=float) ** 2)
    if profile == "laplacian":
        return lambda r: np.exp(-np.asarray(r, dtype=float))
    raise KernelError(f"unknown profile: {profile!r}")


def _radial_moment(profile: str, dim: int) -> float:
    """Closed form of integral_0^inf k0(r) r^(dim-1) dr."""
    d = float(dim)
    if profile == "rectangular":
        return 1.0 / d
    if profile == "triangular":
        return 1.0 / (d * (d + 1.0))
    if profile == "epanechnikov":
        return 2.0 / (d * (d + 2.0))
    if profile == "quartic":
        return 8.0 / (d * (d + 2.0) * (d + 4.0))
    if profile == "triweight":
        return 48.0 / (d * (d + 2.0) * (d + 4.0) * (d + 6.0))
    if profile == "tricube":
        return 162.0 / (d * (d + 3.0) * (d + 6.0) * (d + 9.0))
    if profile == "gaussian":
        return math.gamma(d / 2.0) / 2.0
    if profile == "laplacian":
        return math.gamma(d)
    raise KernelError(f"unknown profile: {profile!r}")


def _exp_tail_constant(profile: str, dim: int, norm: str, normalizer: float) -> float:
    """Smallest c with K(x) <= c * exp(-||x||_2) for all x, up to 1e-9 slack.

    For a radial profile in the given norm, the worst x at profile radius t
    has Euclidean norm t * s with s = 1 (Euclidean) or s = sqrt(dim)
    (supremum, cube corner), so c = sup_t c_norm * k0(t) * exp(s * t).
    """
    s = 1.0 if norm == EUCLIDEAN else math.sqrt(dim)
    if profile == "laplacian":
        # k0(t)e^{st} = e^{(s-1)t}; s == 1 in every supported configuration.
        return normalizer
    if profile == "gaussian":
        # exp(-t^2 + s t) peaks at t = s/2.
        return normalizer * math.exp(s * s / 4.0)
    if profile == "rectangular":
        return normalizer * math.exp(s)
    k0 = _profile_fn(profile)
    t = np.linspace(0.0, 1.0, 1 << 16)
    sup = float(np.max(k0(t) * np.exp(s * t)))
    return normalizer * sup * (1.0 + 1e-9)


@dataclass(frozen=True)
class Kernel:
    """A symmetric radial kernel with unit integral.

    Attributes
    ----------
    profile : str
        One of PROFILES.
    dim : int
        Ambient dimension d.
    norm : str
        Norm used inside the radial profile ("euclidean" or "supremum").
    normalizer : float
        Constant c with K(x) = c * k0(||x||) and integral 1.
    bounded_support : bool
        True iff K vanishes outside the unit ball of its norm.
    exp_tail_constant : float
        Smallest c with K(x) <= c * exp(-||x||_2) everywhere.
    """

    profile: str
    dim: int
    norm: str
    normalizer: float
    bounded_support: bool
    exp_tail_constant: float

    @property
    def sup_value(self) -> float:
        """||K||_inf = K(0) for the nonincreasing profiles shipped here."""
        return self.normalizer * float(_profile_fn(self.profile)(np.float64(0.0)))

    def __call__(self, x: np.ndarray) -> np.ndarray:
        """Evaluate K at points x of shape (..., dim) or scalars when dim == 1."""
        x = np.asarray(x, dtype=float)
        if x.ndim == 0 or x.shape[-1] != self.dim:
            if self.dim == 1:
                x = x.reshape(x.shape + (1,))
            else:
                raise KernelError(f"expected last axis of size {self.dim}")
        r = norm_of(x, self.norm)
        return self.normalizer * _profile_fn(self.profile)(r)

    def profile_values(self, r: np.ndarray) -> np.ndarray:
        """K at radius r, i.e. normalizer * k0(r)."""
        return self.normalizer * _profile_fn(self.profile)(np.asarray(r, dtype=float))


def make_kernel(profile: str, dim: int, norm: str = EUCLIDEAN) -> Kernel:
    """Build a normalized kernel for the given profile, dimension, and norm."""
    if profile not in PROFILES:
        raise KernelError(f"unknown profile: {profile!r}")
    if norm not in NORMS:
        raise KernelError(f"unknown norm: {norm!r}")
    if not isinstance(dim, (int, np.integer)) or dim < 1:
        raise KernelError(f"dim must be a positive integer, got {dim!r}")
    dim = int(dim)
    bounded = profile in BOUNDED_PROFILES
    if not bounded and norm == SUPREMUM and dim >= 2:
        raise KernelError(
            "unbounded profiles with the supremum norm are only supported in "
            "dimension 1 (no exact tail functions otherwise)"
        )
    moment = _radial_moment(profile, dim)
    normalizer = 1.0 / (dim * unit_ball_volume(dim, norm) * moment)
    tail_c = _exp_tail_constant(profile, dim, norm, normalizer)
    return Kernel(
        profile=profile,
        dim=dim,
        norm=norm,
        normalizer=normalizer,
        bounded_support=bounded,
        exp_tail_constant=tail_c,
    )


def kernel_from_spec(spec: dict, dim: int) -> Kernel:
    """Build a kernel from a config mapping {"profile": ..., "norm": ...}."""
    if "profile" not in spec:
        raise KernelError("kernel spec is missing field 'profile'")
    return make_kernel(spec["profile"], dim, spec.get("norm", EUCLIDEAN))


def eval_scaled(kernel: Kernel, delta: float, x: np.ndarray) -> np.ndarray:
    """K_delta(x) = delta^-d * K(x / delta)."""
    if delta <= 0:
        raise KernelError("delta must be positive")
    return kernel(np.asarray(x, dtype=float) / delta) * delta ** (-kernel.dim)


def tail_kappa1(kernel: Kernel, r: float) -> float:
    """Mass of K outside the closed ball of radius r (in the kernel's norm)."""
    if r < 0:
        raise KernelError("r must be nonnegative")
    if r == 0.0:
        return 1.0
    if kernel.bounded_support and r >= 1.0:
        return 0.0
    d = kernel.dim
    if kernel.profile == "rectangular":
        return 1.0 - r**d
    if kernel.profile == "gaussian":
        return float(special.gammaincc(d / 2.0, r * r))
    if kernel.profile == "laplacian":
        return float(special.gammaincc(float(d), r))
    # Remaining bounded polynomial profiles, 0 < r < 1: radial quadrature of
    # the normalized mass; the ball-volume factors cancel.
    k0 = _profile_fn(kernel.profile)
    moment = _radial_moment(kernel.profile, d)
    tail, _ = integrate.quad(lambda s: float(k0(s)) * s ** (d - 1), r, 1.0, epsabs=1e-13, epsrel=1e-12)
    return min(1.0, max(0.0, tail / moment))


def tail_kappa_inf(kernel: Kernel, r: float) -> float:
    """Supremum of K outside the closed ball of radius r."""
    if r < 0:
        raise KernelError("r must be nonnegative")
    if kernel.bounded_support and r >= 1.0:
        return 0.0
    # All shipped profiles are nonincreasing and, except at the rectangular
    # support edge, continuous: the sup over ||x|| > r is attained at radius r.
    return float(kernel.profile_values(np.float64(r)))


class TailBoundError(AssertionError):
    """Raised when a kernel violates the exponential tail-function bounds."""


@dataclass(frozen=True)
class TailBoundReport:
    """Pointwise comparison of tail functions against their exponential bounds."""

    passed: bool
    max_slack_kappa1: float
    max_slack_kappa_inf: float
    rows: tuple  # (r, kappa1, bound1, kappa_inf, bound_inf) per grid point


def check_exponential_tail_bounds(
    kernel: Kernel, r_grid, tol: float = 1e-9, strict: bool = True
) -> TailBoundReport:
    """Verify kappa1(r) <= c d^2 V_d e^-r r^(d-1) and kappa_inf(r) <= c e^-r.

    ``c`` is the kernel's exponential-tail constant and V_d the Euclidean
    unit-ball volume.  Slack is bound minus value; negative slack beyond
    ``tol`` is a violation.  With ``strict`` a violation raises, otherwise it
    is recorded in the report.
    """
    c = kernel.exp_tail_constant
    d = kernel.dim
    vd = euclidean_ball_volume(d)
    rows = []
    worst1 = math.inf
    worst_inf = math.inf
    for r in np.asarray(r_grid, dtype=float):
        k1 = tail_kappa1(kernel, float(r))
        kinf = tail_kappa_inf(kernel, float(r))
        bound1 = c * d * d * vd * math.exp(-r) * r ** (d - 1) if r > 0 else (0.0 if d > 1 else c * d * d * vd)
        bound_inf = c * math.exp(-r)
        rows.append((float(r), k1, bound1, kinf, bound_inf))
        worst1 = min(worst1, bound1 - k1)
        worst_inf = min(worst_inf, bound_inf - kinf)
    passed = worst1 >= -tol and worst_inf >= -tol
    report = TailBoundReport(passed, worst1, worst_inf, tuple(rows))
    if strict and not passed:
        raise TailBoundError(
            f"tail bound violated for {kernel.profile} d={d}: "
            f"slack kappa1={worst1:.3e}, kappa_inf={worst_inf:.3e}"
        )
    return report
