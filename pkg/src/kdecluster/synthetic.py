"""Ground-truth densities with known first-split structure, plus oracles.

Shipped instances cover the split/no-split and separation regimes needed by
the verification harness: disjoint plateaus (infinite separation exponent,
split level zero), piecewise-polynomial bimodals with exact separation
exponents 1 and 2, a plateau pair joined by a lower bridge (positive split
level), a unimodal tent, and a two-disc density in the plane.  Structural
metadata (thickness, separation, flatness, boundary constants) is set
analytically where the geometry forces it; grid oracles below double as
self-consistency checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage
from scipy.spatial import cKDTree

from kdecluster.density import Dataset
from kdecluster.levelset import GridSet, grid_from_predicate, psi_star


class SyntheticError(ValueError):
    """Raised for invalid ground-truth configurations."""


class ComponentCountError(RuntimeError):
    """Raised when a level has an unexpected number of components."""


@dataclass(frozen=True)
class ClusterMetadata:
    """Structural constants of a ground truth (inf where a regime is absent)."""

    gamma: float
    c_thick: float
    delta_thick: float
    kappa: float = math.inf
    c_sep_lower: float | None = None
    c_sep_upper: float | None = None
    vartheta: float = 1.0
    c_flat: float = 1.0
    alpha: float = 1.0
    c_bound: float = 4.0


class GroundTruthDensity:
    """Analytic density with oracles for levels, clusters, and metadata."""

    def __init__(
        self,
        name: str,
        dim: int,
        box_lo,
        box_hi,
        h_sup: float,
        metadata: ClusterMetadata,
        rho_star: float | None = None,
        rho_star_star: float | None = None,
        rho_lower: float | None = None,
        split_x: float | None = None,
        breakpoints=(),
    ):
        self.name = name
        self.dim = dim
        self.box_lo = np.asarray(box_lo, dtype=float).reshape(-1)
        self.box_hi = np.asarray(box_hi, dtype=float).reshape(-1)
        self.h_sup = h_sup
        self.metadata = metadata
        self.rho_star = rho_star
        self.rho_star_star = rho_star_star
        self.rho_lower = rho_lower
        self.split_x = split_x
        self.breakpoints = tuple(breakpoints)

    @property
    def bimodal(self) -> bool:
        return self.rho_star is not None

    def density(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def sample(self, n: int, seed) -> Dataset:
        raise NotImplementedError

    def cluster_membership(self, pts: np.ndarray, rho: float) -> np.ndarray:
        """Component labels {1, 2} at a level in (rho_star, rho_star_star]; 0 outside."""
        if not self.bimodal or self.split_x is None:
            return np.zeros(np.asarray(pts).shape[0], dtype=int)
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        above = self.density(pts) >= rho
        side = np.where(pts[:, 0] < self.split_x, 1, 2)
        return np.where(above, side, 0)

    def cluster_sets(self, pts: np.ndarray) -> np.ndarray:
        """Labels of the limit clusters: {h > rho_star} split at the valley."""
        if not self.bimodal or self.split_x is None:
            return np.zeros(np.asarray(pts).shape[0], dtype=int)
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        above = self.density(pts) > self.rho_star
        side = np.where(pts[:, 0] < self.split_x, 1, 2)
        return np.where(above, side, 0)


# ---------------------------------------------------------------------------
# 1-d piecewise-polynomial densities


class PiecewisePoly1D:
    """Density on [knots[0], knots[-1]] given by ascending-coefficient pieces."""

    def __init__(self, knots, coeffs):
        self.knots = np.asarray(knots, dtype=float)
        self.coeffs = [np.asarray(c, dtype=float) for c in coeffs]
        if len(self.coeffs) != len(self.knots) - 1:
            raise SyntheticError("need one coefficient row per interval")
        self._cum = self._cumulative_masses()

    def _piece_integral(self, i: int, a: float, b: float) -> float:
        c = self.coeffs[i]
        anti = np.concatenate(([0.0], c / np.arange(1, len(c) + 1)))
        return float(np.polyval(anti[::-1], b) - np.polyval(anti[::-1], a))

    def _cumulative_masses(self) -> np.ndarray:
        cum = [0.0]
        for i in range(len(self.coeffs)):
            cum.append(cum[-1] + self._piece_integral(i, self.knots[i], self.knots[i + 1]))
        return np.asarray(cum)

    @property
    def mass(self) -> float:
        return float(self._cum[-1])

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        idx = np.clip(np.searchsorted(self.knots, x, side="right") - 1, 0, len(self.coeffs) - 1)
        out = np.zeros_like(x)
        inside = (x >= self.knots[0]) & (x <= self.knots[-1])
        for i, c in enumerate(self.coeffs):
            sel = inside & (idx == i)
            if np.any(sel):
                out[sel] = np.polyval(c[::-1], x[sel])
        return np.maximum(out, 0.0)

    def cdf(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        xc = np.clip(x, self.knots[0], self.knots[-1])
        idx = np.clip(np.searchsorted(self.knots, xc, side="right") - 1, 0, len(self.coeffs) - 1)
        out = np.empty_like(xc)
        for i in range(len(self.coeffs)):
            sel = idx == i
            if np.any(sel):
                c = self.coeffs[i]
                anti = np.concatenate(([0.0], c / np.arange(1, len(c) + 1)))
                out[sel] = self._cum[i] + (
                    np.polyval(anti[::-1], xc[sel]) - np.polyval(anti[::-1], self.knots[i])
                )
        return out


def _bisect_ppf(cdf, lo: float, hi: float, u: np.ndarray, iters: int = 60) -> np.ndarray:
    """Vectorized monotone-CDF inversion by bisection (deterministic)."""
    a = np.full_like(u, lo, dtype=float)
    b = np.full_like(u, hi, dtype=float)
    for _ in range(iters):
        mid = 0.5 * (a + b)
        below = cdf(mid) < u
        a = np.where(below, mid, a)
        b = np.where(below, b, mid)
    return 0.5 * (a + b)


class Piecewise1D(GroundTruthDensity):
    def __init__(self, poly: PiecewisePoly1D, **kwargs):
        self.poly = poly
        kwargs.setdefault("breakpoints", tuple(float(k) for k in poly.knots))
        super().__init__(dim=1, box_lo=[poly.knots[0]], box_hi=[poly.knots[-1]], **kwargs)

    def density(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        return self.poly(pts[:, 0])

    def cdf(self, x: np.ndarray) -> np.ndarray:
        return self.poly.cdf(np.asarray(x, dtype=float)) / self.poly.mass

    def sample(self, n: int, seed) -> Dataset:
        rng = np.random.default_rng(seed)
        u = rng.random(n) * self.poly.mass
        x = _bisect_ppf(self.poly.cdf, float(self.poly.knots[0]), float(self.poly.knots[-1]), u)
        return Dataset(x.reshape(-1, 1))


# ---------------------------------------------------------------------------
# 1-d cosine-bump mixtures


class CosineMix1D(GroundTruthDensity):
    """Sum of truncated cosine bumps a_i (1 + cos(pi (x-c_i)/r_i)) / 2."""

    def __init__(self, centers, radii, amps, **kwargs):
        self.centers = np.asarray(centers, dtype=float)
        self.radii = np.asarray(radii, dtype=float)
        self.amps = np.asarray(amps, dtype=float)
        lo = float(np.min(self.centers - self.radii))
        hi = float(np.max(self.centers + self.radii))
        kwargs.setdefault(
            "breakpoints",
            tuple(sorted(set(np.concatenate([self.centers - self.radii, self.centers + self.radii]).tolist()))),
        )
        super().__init__(dim=1, box_lo=[lo], box_hi=[hi], **kwargs)

    @property
    def mass(self) -> float:
        return float(np.sum(self.amps * self.radii))

    def density(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        x = pts[:, 0]
        total = np.zeros_like(x)
        for c, r, a in zip(self.centers, self.radii, self.amps):
            u = (x - c) / r
            inside = np.abs(u) <= 1.0
            total += np.where(inside, 0.5 * a * (1.0 + np.cos(np.pi * u)), 0.0)
        return total

    def _raw_cdf(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        total = np.zeros_like(x)
        for c, r, a in zip(self.centers, self.radii, self.amps):
            u = np.clip((x - c) / r, -1.0, 1.0)
            total += 0.5 * a * r * ((u + 1.0) + np.sin(np.pi * u) / np.pi)
        return total

    def cdf(self, x: np.ndarray) -> np.ndarray:
        return self._raw_cdf(x) / self.mass

    def sample(self, n: int, seed) -> Dataset:
        rng = np.random.default_rng(seed)
        u = rng.random(n) * self.mass
        x = _bisect_ppf(self._raw_cdf, float(self.box_lo[0]), float(self.box_hi[0]), u)
        return Dataset(x.reshape(-1, 1))


# ---------------------------------------------------------------------------
# 2-d disc mixtures


class Discs2D(GroundTruthDensity):
    """Uniform density on a union of disjoint discs."""

    def __init__(self, centers, radius: float, height: float, **kwargs):
        self.centers = np.asarray(centers, dtype=float)
        self.radius = radius
        self.height = height
        lo = np.min(self.centers, axis=0) - radius
        hi = np.max(self.centers, axis=0) + radius
        margin = 0.25
        super().__init__(dim=2, box_lo=lo - margin, box_hi=hi + margin, **kwargs)

    def density(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        inside = np.zeros(pts.shape[0], dtype=bool)
        for c in self.centers:
            inside |= np.sum((pts - c) ** 2, axis=1) <= self.radius**2
        return np.where(inside, self.height, 0.0)

    def sample(self, n: int, seed) -> Dataset:
        rng = np.random.default_rng(seed)
        accepted = []
        total = count = 0
        box_lo, box_hi = self.box_lo, self.box_hi
        while count < n:
            batch = max(4 * (n - count), 1024)
            pts = rng.uniform(box_lo, box_hi, size=(batch, 2))
            keep = rng.random(batch) * self.h_sup < self.density(pts)
            sel = pts[keep]
            accepted.append(sel)
            count += sel.shape[0]
            total += batch
            if total >= 20000 and count / total < 0.01:
                raise SyntheticError("rejection sampling efficiency below 1%")
        return Dataset(np.concatenate(accepted, axis=0)[:n])

    def cluster_membership(self, pts: np.ndarray, rho: float) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        labels = np.zeros(pts.shape[0], dtype=int)
        if rho > self.height:
            return labels
        for i, c in enumerate(self.centers, start=1):
            labels[np.sum((pts - c) ** 2, axis=1) <= self.radius**2] = i
        return labels

    def cluster_sets(self, pts: np.ndarray) -> np.ndarray:
        return self.cluster_membership(pts, self.height)


# ---------------------------------------------------------------------------
# Grid oracles


class GridOracle:
    """Cached density evaluation on a regular grid over the support box."""

    def __init__(self, gt: GroundTruthDensity, spacing: float):
        self.gt = gt
        self.spacing = spacing
        self.template = grid_from_predicate(
            gt.box_lo, gt.box_hi, spacing, lambda pts: np.ones(pts.shape[0], dtype=bool)
        )
        self.nodes = self.template.nodes()
        self.values = np.asarray(gt.density(self.nodes), dtype=float)

    def level_set(self, rho: float) -> GridSet:
        return self.template.with_mask(
            (self.values >= rho).reshape(self.template.mask.shape)
        )

    def component_count(self, rho: float) -> int:
        mask = self.level_set(rho).mask
        structure = np.ones((3,) * mask.ndim, dtype=bool)
        _, num = ndimage.label(mask, structure=structure)
        return int(num)

    def component_masks(self, rho: float) -> list:
        mask = self.level_set(rho).mask
        structure = np.ones((3,) * mask.ndim, dtype=bool)
        labeled, num = ndimage.label(mask, structure=structure)
        return [labeled == i for i in range(1, num + 1)]


def level_set_oracle(gt: GroundTruthDensity, rho: float, spacing: float) -> GridSet:
    """The true level set {h >= rho} realized on a grid."""
    return GridOracle(gt, spacing).level_set(rho)


def tau_star(gt: GroundTruthDensity, eps_prime: float, spacing: float | None = None, oracle: GridOracle | None = None) -> float:
    """One third of the grid distance between the two components above the split."""
    if not gt.bimodal:
        raise ComponentCountError("tau_star requires a bimodal ground truth")
    if not 0 < eps_prime <= gt.rho_star_star - gt.rho_star:
        raise SyntheticError("eps_prime outside (0, rho_star_star - rho_star]")
    if oracle is None:
        if spacing is None:
            spacing = float(np.min(gt.box_hi - gt.box_lo)) / 2048
        oracle = GridOracle(gt, spacing)
    masks = oracle.component_masks(gt.rho_star + eps_prime)
    if len(masks) != 2:
        raise ComponentCountError(
            f"expected 2 components at level rho_star + {eps_prime}, found {len(masks)}"
        )
    nodes = oracle.nodes
    a = nodes[masks[0].ravel()]
    b = nodes[masks[1].ravel()]
    dist, _ = cKDTree(a).query(b, k=1)
    return float(np.min(dist)) / 3.0


def epsilon_star(gt: GroundTruthDensity, eps: float, tau: float) -> float:
    """Smallest guaranteed upper level offset: eps + (tau / c_sep)^kappa."""
    meta = gt.metadata
    if meta.c_sep_lower is None:
        raise SyntheticError("ground truth has no separation constant")
    if math.isinf(meta.kappa):
        return eps if tau <= meta.c_sep_lower else math.inf
    return eps + (tau / meta.c_sep_lower) ** meta.kappa


@dataclass(frozen=True)
class ThicknessReport:
    gamma_fit: float
    c_fit: float
    violations: tuple
    rows: tuple  # (rho, delta, psi)


def thickness_oracle(
    gt: GroundTruthDensity,
    rho_grid,
    delta_grid,
    spacing: float | None = None,
) -> ThicknessReport:
    """Measure the erosion-recovery diagnostic across levels and radii.

    Fits the envelope c * delta^gamma through the per-delta maxima and reports
    (rho, delta) pairs violating the declared metadata beyond one grid cell.
    """
    if spacing is None:
        spacing = float(np.min(gt.box_hi - gt.box_lo)) / 1024
    oracle = GridOracle(gt, spacing)
    meta = gt.metadata
    rows = []
    violations = []
    per_delta: dict = {}
    for rho in rho_grid:
        gs = oracle.level_set(float(rho))
        for delta in delta_grid:
            delta = float(delta)
            if not 0 < delta <= meta.delta_thick or delta < spacing:
                continue
            psi = psi_star(gs, delta)
            rows.append((float(rho), delta, psi))
            if math.isfinite(psi):
                per_delta[delta] = max(per_delta.get(delta, 0.0), psi)
                if psi > meta.c_thick * delta**meta.gamma + spacing:
                    violations.append((float(rho), delta, psi))
            else:
                # Empty erosion: thickness bound only applies when nonempty.
                continue
    if len(per_delta) >= 2:
        ds = np.array(sorted(per_delta))
        ps = np.array([max(per_delta[d], 1e-12) for d in ds])
        slope, intercept = np.polyfit(np.log(ds), np.log(ps), 1)
        resid = np.log(ps) - (slope * np.log(ds) + intercept)
        gamma_fit = float(slope)
        c_fit = float(np.exp(intercept + np.max(resid)))
    else:
        gamma_fit, c_fit = float("nan"), float("nan")
    return ThicknessReport(gamma_fit, c_fit, tuple(violations), tuple(rows))


def flatness_violations(gt: GroundTruthDensity, s_grid, spacing: float | None = None) -> list:
    """Grid check of the low-level mass bound around the split level."""
    if gt.rho_star is None:
        raise SyntheticError("flatness check requires a split level")
    if spacing is None:
        spacing = float(np.min(gt.box_hi - gt.box_lo)) / 4096
    oracle = GridOracle(gt, spacing)
    meta = gt.metadata
    cell = oracle.template.cell_volume
    out = []
    for s in s_grid:
        s = float(s)
        sel = (oracle.values > gt.rho_star) & (oracle.values < gt.rho_star + s)
        measured = float(np.count_nonzero(sel)) * cell
        if math.isinf(meta.vartheta):
            bound = 0.0 if meta.c_flat * s < 1.0 else math.inf
        else:
            bound = (meta.c_flat * s) ** meta.vartheta
        if measured > bound + 8 * spacing:
            out.append((s, measured, bound))
    return out


def boundary_violations(
    gt: GroundTruthDensity, rho_grid, delta_grid, spacing: float | None = None
) -> list:
    """Grid check of the cluster boundary-collar measure bound."""
    if not gt.bimodal:
        raise SyntheticError("boundary check requires a bimodal ground truth")
    if spacing is None:
        spacing = float(np.min(gt.box_hi - gt.box_lo)) / 1024
    oracle = GridOracle(gt, spacing)
    meta = gt.metadata
    from kdecluster.levelset import dilate, erode

    out = []
    for rho in rho_grid:
        rho = float(rho)
        labels = gt.cluster_membership(oracle.nodes, rho)
        for i in (1, 2):
            comp = oracle.template.with_mask(
                (labels == i).reshape(oracle.template.mask.shape)
            )
            if not comp.mask.any():
                continue
            for delta in delta_grid:
                delta = float(delta)
                if not 0 < delta <= meta.delta_thick or delta < spacing:
                    continue
                collar = dilate(comp, delta).measure() - erode(comp, delta).measure()
                bound = meta.c_bound * delta**meta.alpha
                if collar > bound + 8 * spacing:
                    out.append((rho, i, delta, collar, bound))
    return out


# ---------------------------------------------------------------------------
# Constructors and registry


def _scan_first_split(density_fn, lo: float, hi: float, h_sup: float, n_grid: int = 16384) -> float:
    """Bisect the lowest level with two grid components (resolution 1e-4 h_sup)."""
    xs = np.linspace(lo, hi, n_grid)
    vals = density_fn(xs.reshape(-1, 1))

    def count(rho: float) -> int:
        mask = vals >= rho
        return int(np.count_nonzero(mask[1:] & ~mask[:-1]) + bool(mask[0]))

    lo_rho, hi_rho = 0.0, h_sup
    if count(hi_rho) < 2:
        # Sweep downward for a level with two components.
        for rho in np.linspace(h_sup, 0.0, 512):
            if count(float(rho)) >= 2:
                hi_rho = float(rho)
                break
        else:
            raise SyntheticError("no level with two components found")
    while hi_rho - lo_rho > 1e-4 * h_sup:
        mid = 0.5 * (lo_rho + hi_rho)
        if count(mid) >= 2:
            hi_rho = mid
        else:
            lo_rho = mid
    return 0.5 * (lo_rho + hi_rho)


def _reject_extra_components(density_fn, lo: float, hi: float, h_sup: float) -> None:
    xs = np.linspace(lo, hi, 8192)
    vals = density_fn(xs.reshape(-1, 1))
    for rho in np.linspace(1e-6 * h_sup, h_sup, 200):
        mask = vals >= rho
        comps = int(np.count_nonzero(mask[1:] & ~mask[:-1]) + bool(mask[0]))
        if comps > 2:
            raise SyntheticError(f"{comps} components at level {rho:.4g}; need at most 2")


def two_plateaus() -> Piecewise1D:
    """Two unit plateaus of height 1/2 separated by a gap of 2."""
    poly = PiecewisePoly1D([0.0, 1.0, 3.0, 4.0], [[0.5], [0.0], [0.5]])
    meta = ClusterMetadata(
        gamma=1.0, c_thick=1.0, delta_thick=0.45,
        kappa=math.inf, c_sep_lower=2.0 / 3.0, c_sep_upper=2.0 / 3.0,
        vartheta=math.inf, c_flat=2.0, alpha=1.0, c_bound=4.0,
    )
    return Piecewise1D(
        poly, name="two_plateaus", h_sup=0.5, metadata=meta,
        rho_star=0.0, rho_star_star=0.5, split_x=2.0,
    )


def bimodal_k1() -> Piecewise1D:
    """Piecewise-linear bimodal: peaks 2/7, valley 1/14, separation exponent 1."""
    poly = PiecewisePoly1D(
        [0.0, 1.0, 3.0, 5.0, 6.0],
        [[0.0, 2.0 / 7.0], [11.0 / 28.0, -3.0 / 28.0], [-0.25, 3.0 / 28.0], [12.0 / 7.0, -2.0 / 7.0]],
    )
    meta = ClusterMetadata(
        gamma=1.0, c_thick=1.0, delta_thick=0.5,
        kappa=1.0, c_sep_lower=56.0 / 9.0, c_sep_upper=56.0 / 9.0,
        vartheta=1.0, c_flat=77.0 / 3.0, alpha=1.0, c_bound=4.0,
    )
    return Piecewise1D(
        poly, name="bimodal_k1", h_sup=2.0 / 7.0, metadata=meta,
        rho_star=1.0 / 14.0, rho_star_star=0.2, split_x=3.0,
    )


def bimodal_k2() -> Piecewise1D:
    """Bimodal with a quadratic valley: separation exponent exactly 2."""
    poly = PiecewisePoly1D(
        [0.0, 1.0, 2.0, 4.0, 5.0, 6.0],
        [[0.0, 0.3], [0.4, -0.1], [1.4, -0.9, 0.15], [-0.2, 0.1], [1.8, -0.3]],
    )
    meta = ClusterMetadata(
        gamma=1.0, c_thick=1.0, delta_thick=0.5,
        kappa=2.0, c_sep_lower=2.0 / (3.0 * math.sqrt(0.15)), c_sep_upper=2.0 / (3.0 * math.sqrt(0.15)),
        vartheta=0.5, c_flat=130.0, alpha=1.0, c_bound=4.0,
    )
    return Piecewise1D(
        poly, name="bimodal_k2", h_sup=0.3, metadata=meta,
        rho_star=0.05, rho_star_star=0.2, split_x=3.0,
    )


def unimodal_bump() -> Piecewise1D:
    """Unit tent on [0, 2]: connected level sets at every level."""
    poly = PiecewisePoly1D([0.0, 1.0, 2.0], [[0.0, 1.0], [2.0, -1.0]])
    meta = ClusterMetadata(
        gamma=1.0, c_thick=2.0, delta_thick=1.0,
        vartheta=1.0, c_flat=2.0, alpha=1.0, c_bound=4.0,
    )
    return Piecewise1D(
        poly, name="unimodal_bump", h_sup=1.0, metadata=meta, rho_lower=0.0,
    )


def bridged_plateaus() -> Piecewise1D:
    """Plateaus of height 0.35 joined by a bridge of height 0.1: split at 0.1."""
    poly = PiecewisePoly1D([0.0, 1.0, 4.0, 5.0], [[0.35], [0.1], [0.35]])
    meta = ClusterMetadata(
        gamma=1.0, c_thick=1.0, delta_thick=0.45,
        kappa=math.inf, c_sep_lower=1.0, c_sep_upper=1.0,
        vartheta=math.inf, c_flat=4.0, alpha=1.0, c_bound=4.0,
    )
    return Piecewise1D(
        poly, name="bridged_plateaus", h_sup=0.35, metadata=meta,
        rho_star=0.1, rho_star_star=0.35, split_x=2.5,
    )


def two_discs_2d() -> Discs2D:
    """Two uniform unit-mass discs of radius 1/2 with an edge gap of 1."""
    height = 2.0 / math.pi
    meta = ClusterMetadata(
        gamma=1.0, c_thick=1.0, delta_thick=0.45,
        kappa=math.inf, c_sep_lower=1.0 / 3.0, c_sep_upper=1.0 / 3.0,
        vartheta=math.inf, c_flat=math.pi / 2.0, alpha=1.0, c_bound=2.0 * math.pi,
    )
    gt = Discs2D(
        centers=[[0.75, 0.75], [2.75, 0.75]], radius=0.5, height=height,
        name="two_discs_2d", h_sup=height, metadata=meta,
        rho_star=0.0, rho_star_star=height, split_x=1.75,
    )
    return gt


def make_two_blob(d: int, centers, radii, heights, profile: str = "uniform") -> GroundTruthDensity:
    """Mixture of one or two blobs with analytically or scan-derived split data."""
    centers = np.atleast_1d(np.asarray(centers, dtype=float))
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    heights = np.atleast_1d(np.asarray(heights, dtype=float))
    k = centers.shape[0] if centers.ndim == 1 else centers.shape[0]
    if k not in (1, 2) or radii.shape[0] != k or heights.shape[0] != k:
        raise SyntheticError("need matching parameters for one or two blobs")
    if np.any(radii <= 0) or np.any(heights <= 0):
        raise SyntheticError("radii and heights must be positive")

    if d == 1 and profile == "uniform":
        order = np.argsort(centers)
        centers, radii, heights = centers[order], radii[order], heights[order]
        masses = heights * 2 * radii
        heights = heights / masses.sum()
        edges = np.stack([centers - radii, centers + radii], axis=1)
        if k == 1:
            poly = PiecewisePoly1D(edges[0], [[heights[0]]])
            meta = ClusterMetadata(gamma=1.0, c_thick=1.0, delta_thick=min(0.9 * radii[0], 1.0),
                                   vartheta=math.inf, c_flat=1.0 / heights[0])
            return Piecewise1D(poly, name="blob_unimodal", h_sup=float(heights[0]),
                               metadata=meta, rho_lower=0.0)
        if edges[0, 1] >= edges[1, 0]:
            raise SyntheticError(
                "overlapping uniform plateaus have no saddle; use the cosine profile"
            )
        gap = edges[1, 0] - edges[0, 1]
        knots = [edges[0, 0], edges[0, 1], edges[1, 0], edges[1, 1]]
        poly = PiecewisePoly1D(knots, [[heights[0]], [0.0], [heights[1]]])
        meta = ClusterMetadata(
            gamma=1.0, c_thick=1.0, delta_thick=min(0.9 * float(np.min(radii)), 1.0),
            kappa=math.inf, c_sep_lower=gap / 3.0, c_sep_upper=gap / 3.0,
            vartheta=math.inf, c_flat=1.0 / float(np.min(heights)),
            alpha=1.0, c_bound=4.0,
        )
        return Piecewise1D(
            poly, name="blob_plateaus", h_sup=float(np.max(heights)), metadata=meta,
            rho_star=0.0, rho_star_star=float(np.min(heights)),
            split_x=float(0.5 * (edges[0, 1] + edges[1, 0])),
        )

    if d == 1 and profile == "cosine":
        amps = heights / float(np.sum(heights * radii))
        if k == 1:
            gt = CosineMix1D(centers, radii, amps, name="blob_cosine_unimodal",
                             h_sup=float(amps[0]), rho_lower=0.0,
                             metadata=ClusterMetadata(gamma=1.0, c_thick=2.0,
                                                      delta_thick=min(0.5 * radii[0], 1.0)))
            return gt
        order = np.argsort(centers)
        centers, radii, amps = centers[order], radii[order], amps[order]
        probe = CosineMix1D(centers, radii, amps, name="probe", h_sup=float(np.max(amps)),
                            metadata=ClusterMetadata(gamma=1.0, c_thick=1.0, delta_thick=0.2))
        lo, hi = float(probe.box_lo[0]), float(probe.box_hi[0])
        _reject_extra_components(probe.density, lo, hi, probe.h_sup)
        peaks = probe.density(centers.reshape(-1, 1))
        h_top = float(np.min(peaks))
        if centers[1] - radii[1] >= centers[0] + radii[0]:
            rho_star = 0.0
            split_x = float(0.5 * (centers[0] + radii[0] + centers[1] - radii[1]))
        else:
            rho_star = _scan_first_split(probe.density, lo, hi, probe.h_sup)
            xs = np.linspace(centers[0], centers[1], 4097)
            split_x = float(xs[np.argmin(probe.density(xs.reshape(-1, 1)))])
        rho_ss = rho_star + 0.8 * (h_top - rho_star)
        gt = CosineMix1D(
            centers, radii, amps, name="blob_cosine_bimodal",
            h_sup=float(np.max(probe.density(np.linspace(lo, hi, 8192).reshape(-1, 1)))),
            metadata=ClusterMetadata(gamma=1.0, c_thick=1.0, delta_thick=0.2, kappa=2.0),
            rho_star=rho_star, rho_star_star=rho_ss, split_x=split_x,
        )
        # Calibrate separation constants from the gap oracle.
        oracle = GridOracle(gt, (hi - lo) / 8192)
        eps_grid = np.geomspace(0.02 * (rho_ss - rho_star), rho_ss - rho_star, 12)
        ratios = []
        for eps in eps_grid:
            try:
                ratios.append(tau_star(gt, float(eps), oracle=oracle) / math.sqrt(eps))
            except ComponentCountError:
                continue
        if ratios:
            gt.metadata = ClusterMetadata(
                gamma=1.0, c_thick=1.0, delta_thick=0.2, kappa=2.0,
                c_sep_lower=0.98 * min(ratios), c_sep_upper=1.02 * max(ratios),
                vartheta=0.5, c_flat=200.0, alpha=1.0, c_bound=4.0,
            )
        return gt

    if d == 2 and profile == "uniform":
        if k != 2:
            raise SyntheticError("2-d blobs: exactly two discs supported")
        centers = np.asarray(centers, dtype=float).reshape(2, 2)
        r = float(radii[0])
        if radii[1] != r or heights[1] != heights[0]:
            raise SyntheticError("2-d blobs: equal radii and heights supported")
        gap = float(np.linalg.norm(centers[1] - centers[0])) - 2 * r
        if gap <= 0:
            raise SyntheticError("2-d discs must be disjoint")
        height = 1.0 / (2 * math.pi * r**2)
        meta = ClusterMetadata(
            gamma=1.0, c_thick=1.0, delta_thick=0.9 * r,
            kappa=math.inf, c_sep_lower=gap / 3.0, c_sep_upper=gap / 3.0,
            vartheta=math.inf, c_flat=1.0 / height, alpha=1.0, c_bound=4 * math.pi * r,
        )
        return Discs2D(centers=centers, radius=r, height=height,
                       name="blob_discs", h_sup=height, metadata=meta,
                       rho_star=0.0, rho_star_star=height,
                       split_x=float(0.5 * (centers[0, 0] + centers[1, 0])))

    raise SyntheticError(f"unsupported blob configuration: d={d}, profile={profile!r}")


def cosine_bimodal() -> CosineMix1D:
    return make_two_blob(1, centers=(1.2, 2.8), radii=(1.0, 1.0), heights=(1.0, 1.0), profile="cosine")


REGISTRY = {
    "two_plateaus": two_plateaus,
    "bimodal_k1": bimodal_k1,
    "bimodal_k2": bimodal_k2,
    "unimodal_bump": unimodal_bump,
    "bridged_plateaus": bridged_plateaus,
    "two_discs_2d": two_discs_2d,
    "cosine_bimodal": cosine_bimodal,
}


def get_instance(name: str, **params) -> GroundTruthDensity:
    if name == "two_blob":
        return make_two_blob(**params)
    if name not in REGISTRY:
        raise SyntheticError(f"unknown instance {name!r}; known: {sorted(REGISTRY)}")
    if params:
        raise SyntheticError(f"instance {name!r} takes no parameters")
    return REGISTRY[name]()


def sample(gt: GroundTruthDensity, n: int, seed) -> Dataset:
    """Draw n i.i.d. points; deterministic in the seed."""
    if n < 1:
        raise SyntheticError("n must be positive")
    return gt.sample(n, seed)
