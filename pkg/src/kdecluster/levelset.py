"""Level-set estimates as dilated sample sets, plus grid-based set morphology.

The estimator family maps a level rho to the set of samples whose KDE value
is at least rho, dilated by closed balls of radius sigma.  Nestedness across
levels is exact by the threshold construction.  GridSet provides discrete
inner/outer parallel sets via exact node-distance transforms; erosion is
defined through the complement-dilate-complement identity.
"""

from __future__ import annotations

import base64
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage
from scipy.spatial import cKDTree

from kdecluster.density import Dataset, kde_eval_at_samples
from kdecluster.kernels import EUCLIDEAN, SUPREMUM, Kernel, tail_kappa1, tail_kappa_inf

MAX_GRID_NODES = 10_000_000
_DIST_TOL = 1e-9


class GridResolutionError(ValueError):
    """Raised when an operation is undetectable at the grid resolution."""


@dataclass(frozen=True)
class LevelSetEstimate:
    """Active sample indices at a level, to be read as a union of sigma-balls."""

    level: float
    active: np.ndarray
    radius: float
    source: "SampleBallFamily"


class SampleBallFamily:
    """Decreasing family rho -> active samples, from precomputed KDE values."""

    def __init__(
        self,
        points: np.ndarray,
        values: np.ndarray,
        sigma: float,
        norm: str = EUCLIDEAN,
        delta: float | None = None,
        kernel: Kernel | None = None,
    ):
        points = np.asarray(points, dtype=float)
        if points.ndim == 1:
            points = points.reshape(-1, 1)
        values = np.asarray(values, dtype=float)
        if values.shape[0] != points.shape[0]:
            raise ValueError("values must align with points")
        if sigma <= 0:
            raise ValueError("sigma must be positive")
        self.points = points
        self.values = values
        self.sigma = sigma
        self.norm = norm
        self.delta = delta
        self.kernel = kernel

    @property
    def max_value(self) -> float:
        return float(np.max(self.values)) if self.values.size else 0.0

    def active(self, rho: float) -> np.ndarray:
        return np.flatnonzero(self.values >= rho)

    def __call__(self, rho: float) -> LevelSetEstimate:
        return LevelSetEstimate(
            level=float(rho), active=self.active(rho), radius=self.sigma, source=self
        )


def level_family(
    dataset: Dataset, kernel: Kernel, delta: float, sigma: float
) -> SampleBallFamily:
    """Build the level-set estimator family for a dataset (KDE computed once)."""
    values = kde_eval_at_samples(dataset, kernel, delta)
    return SampleBallFamily(
        dataset.points, values, sigma, norm=kernel.norm, delta=delta, kernel=kernel
    )


def contains(estimate: LevelSetEstimate, point) -> bool:
    """Membership in the dilated set: within sigma of some active sample."""
    if estimate.active.size == 0:
        return False
    pts = estimate.source.points[estimate.active]
    diffs = pts - np.asarray(point, dtype=float).reshape(1, -1)
    if estimate.source.norm == EUCLIDEAN:
        dist = float(np.min(np.sqrt(np.sum(diffs * diffs, axis=1))))
    else:
        dist = float(np.min(np.max(np.abs(diffs), axis=1)))
    return dist <= estimate.radius * (1.0 + _DIST_TOL)


@dataclass(frozen=True)
class GridSet:
    """Boolean membership mask over a regular grid with node spacing ``spacing``."""

    lo: np.ndarray
    spacing: float
    mask: np.ndarray

    def __post_init__(self):
        if self.spacing <= 0:
            raise ValueError("spacing must be positive")
        if self.mask.size > MAX_GRID_NODES:
            raise GridResolutionError(f"grid exceeds {MAX_GRID_NODES} nodes")

    @property
    def dim(self) -> int:
        return self.mask.ndim

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.dim

    def nodes(self) -> np.ndarray:
        """All node coordinates, shape (prod(shape), dim)."""
        axes = [self.lo[k] + self.spacing * np.arange(s) for k, s in enumerate(self.mask.shape)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def member_nodes(self) -> np.ndarray:
        return self.nodes()[self.mask.ravel()]

    def measure(self) -> float:
        return float(np.count_nonzero(self.mask)) * self.cell_volume

    def with_mask(self, mask: np.ndarray) -> "GridSet":
        return GridSet(lo=self.lo, spacing=self.spacing, mask=mask)

    def complement(self) -> "GridSet":
        return self.with_mask(~self.mask)


def grid_from_predicate(box_lo, box_hi, spacing: float, predicate) -> GridSet:
    """Build a GridSet by evaluating a vectorized membership predicate on nodes."""
    lo = np.asarray(box_lo, dtype=float).reshape(-1)
    hi = np.asarray(box_hi, dtype=float).reshape(-1)
    shape = tuple(int(math.floor((b - a) / spacing + 1e-9)) + 1 for a, b in zip(lo, hi))
    empty = GridSet(lo=lo, spacing=spacing, mask=np.zeros(shape, dtype=bool))
    nodes = empty.nodes()
    mask = np.asarray(predicate(nodes), dtype=bool).reshape(shape)
    return empty.with_mask(mask)


def _distance_to_set(gs: GridSet, norm: str) -> np.ndarray:
    """Distance from every node to the nearest member node (0 inside the set)."""
    if not gs.mask.any():
        return np.full(gs.mask.shape, np.inf)
    if norm == EUCLIDEAN:
        return ndimage.distance_transform_edt(~gs.mask, sampling=gs.spacing)
    if norm == SUPREMUM:
        return ndimage.distance_transform_cdt(~gs.mask, metric="chessboard") * gs.spacing
    raise ValueError(f"unknown norm {norm!r}")


def dilate(gs: GridSet, delta: float, norm: str = EUCLIDEAN) -> GridSet:
    """Outer parallel set on the grid: nodes within delta of the set."""
    if delta < gs.spacing:
        raise GridResolutionError(
            f"dilation radius {delta} below grid spacing {gs.spacing}"
        )
    dist = _distance_to_set(gs, norm)
    return gs.with_mask(dist <= delta * (1.0 + _DIST_TOL))


def erode(gs: GridSet, delta: float, norm: str = EUCLIDEAN) -> GridSet:
    """Inner parallel set: complement of the dilation of the complement."""
    if delta < gs.spacing:
        raise GridResolutionError(
            f"erosion radius {delta} below grid spacing {gs.spacing}"
        )
    return dilate(gs.complement(), delta, norm).complement()


def psi_star(gs: GridSet, delta: float, norm: str = EUCLIDEAN) -> float:
    """Thickness diagnostic: sup over member nodes of distance to the erosion.

    Returns infinity when the erosion is empty and the set is not.
    """
    if not gs.mask.any():
        return 0.0
    eroded = erode(gs, delta, norm)
    if not eroded.mask.any():
        return math.inf
    dist = _distance_to_set(eroded, norm)
    return float(np.max(dist[gs.mask]))


def symdiff_measure(a: GridSet, b: GridSet) -> float:
    """Grid measure of the symmetric difference (sets on a common grid)."""
    if a.mask.shape != b.mask.shape or a.spacing != b.spacing or not np.allclose(a.lo, b.lo):
        raise ValueError("grid sets are not on a common grid")
    return float(np.count_nonzero(a.mask ^ b.mask)) * a.cell_volume


def symdiff_measure_mc(
    pred_a,
    pred_b,
    box_lo,
    box_hi,
    n_samples: int = 100_000,
    seed: int = 0,
) -> tuple[float, float]:
    """Monte-Carlo symmetric-difference volume; returns (estimate, std. error)."""
    lo = np.asarray(box_lo, dtype=float).reshape(-1)
    hi = np.asarray(box_hi, dtype=float).reshape(-1)
    rng = np.random.default_rng(seed)
    pts = rng.uniform(lo, hi, size=(n_samples, lo.shape[0]))
    ind = np.asarray(pred_a(pts), dtype=bool) ^ np.asarray(pred_b(pts), dtype=bool)
    vol = float(np.prod(hi - lo))
    p = float(np.mean(ind))
    est = p * vol
    se = vol * math.sqrt(max(p * (1 - p), 1.0 / n_samples) / n_samples)
    return est, se


def to_portable(gs: GridSet) -> dict:
    """Portable bitmap: JSON-able header plus base64-packed mask bits."""
    packed = np.packbits(gs.mask.ravel().astype(np.uint8))
    return {
        "lo": [float(v) for v in gs.lo],
        "spacing": gs.spacing,
        "shape": list(gs.mask.shape),
        "mask_b64": base64.b64encode(packed.tobytes()).decode("ascii"),
    }


def from_portable(header: dict) -> GridSet:
    shape = tuple(header["shape"])
    count = int(np.prod(shape))
    raw = np.frombuffer(base64.b64decode(header["mask_b64"]), dtype=np.uint8)
    bits = np.unpackbits(raw)[:count].astype(bool).reshape(shape)
    return GridSet(lo=np.array(header["lo"], dtype=float), spacing=header["spacing"], mask=bits)


@dataclass(frozen=True)
class SandwichReport:
    """Node counts violating the two-sided level-set inclusion."""

    rho: float
    eps_measured: float
    eps_blur: float
    blur_source: str
    lower_violations: int
    upper_violations: int
    lower_nodes: int
    upper_nodes: int
    spacing: float

    @property
    def passed(self) -> bool:
        return self.lower_violations == 0 and self.upper_violations == 0


def horizontal_blur(
    kernel: Kernel, delta: float, sigma: float, rho: float, h_sup: float | None
) -> tuple[float, str]:
    """The extra level blur from kernel tails outside radius sigma.

    Exactly zero for bounded-support kernels once sigma >= delta.  Otherwise
    the tighter of the general form max(rho*kappa1, delta^-d*kappa_inf)
    (valid when rho dominates the kappa_inf term) and the bounded-density
    form h_sup * kappa1.
    """
    ratio = sigma / delta
    if kernel.bounded_support and ratio >= 1.0:
        return 0.0, "bounded-support"
    k1 = tail_kappa1(kernel, ratio)
    kinf = tail_kappa_inf(kernel, ratio) * delta ** (-kernel.dim)
    candidates = []
    if rho >= kinf:
        candidates.append((max(rho * k1, kinf), "general"))
    if h_sup is not None:
        candidates.append((h_sup * k1, "bounded-density"))
    if not candidates:
        raise ValueError(
            "horizontal blur undefined: rho below the kappa_inf term and no "
            "density bound available"
        )
    value, source = min(candidates, key=lambda t: t[0])
    return value, source


def check_sandwich(
    dataset: Dataset,
    ground_truth,
    kernel: Kernel,
    delta: float,
    sigma: float,
    rho: float,
    eps_measured: float,
    spacing: float | None = None,
    slack_spacings: float = 1.0,
    kde_values: np.ndarray | None = None,
    grid_oracle=None,
) -> SandwichReport:
    """Verify the two-sided inclusion of the dilated-sample level-set estimate.

    The eroded true level set at rho + eps + blur must lie inside the
    estimate, which must lie inside the dilated true set at rho - eps - blur;
    morphology radii are widened by ``slack_spacings`` grid cells to absorb
    discretization at set boundaries.
    """
    from kdecluster.synthetic import GridOracle  # local import to avoid a cycle

    blur, blur_source = horizontal_blur(kernel, delta, sigma, rho, ground_truth.h_sup)
    if spacing is None:
        spacing = min(sigma, delta) / 4.0
    if grid_oracle is None:
        grid_oracle = GridOracle(ground_truth, spacing)
    if kde_values is None:
        kde_values = kde_eval_at_samples(dataset, kernel, delta)

    slack = slack_spacings * spacing
    lower_set = erode(grid_oracle.level_set(rho + eps_measured + blur), 2 * sigma + slack, kernel.norm)
    upper_set = dilate(grid_oracle.level_set(rho - eps_measured - blur), 2 * sigma + slack, kernel.norm)

    active = np.flatnonzero(np.asarray(kde_values) >= rho)
    nodes = grid_oracle.nodes
    if active.size == 0:
        estimate_mask = np.zeros(nodes.shape[0], dtype=bool)
    else:
        p = 2.0 if kernel.norm == EUCLIDEAN else np.inf
        dist, _ = cKDTree(dataset.points[active]).query(nodes, k=1, p=p)
        estimate_mask = dist <= sigma * (1.0 + _DIST_TOL)
    estimate_mask = estimate_mask.reshape(lower_set.mask.shape)

    lower_viol = int(np.count_nonzero(lower_set.mask & ~estimate_mask))
    upper_viol = int(np.count_nonzero(estimate_mask & ~upper_set.mask))
    return SandwichReport(
        rho=rho,
        eps_measured=eps_measured,
        eps_blur=blur,
        blur_source=blur_source,
        lower_violations=lower_viol,
        upper_violations=upper_viol,
        lower_nodes=int(np.count_nonzero(lower_set.mask)),
        upper_nodes=int(np.count_nonzero(upper_set.mask)),
        spacing=spacing,
    )
