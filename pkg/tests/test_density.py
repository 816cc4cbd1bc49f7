import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kdecluster.density import (
    Dataset,
    DatasetError,
    default_probe_grid,
    kde_eval,
    kde_eval_at_samples,
    kde_eval_batch,
    kde_evaluate,
    load_csv,
    probe_grid,
    smoothed_density,
    smoothed_on_grid,
    sup_distance,
)
from kdecluster.kernels import make_kernel


class UniformTruth:
    """Uniform density on [0, 1], minimal ground-truth interface."""

    dim = 1
    box_lo = np.array([0.0])
    box_hi = np.array([1.0])
    breakpoints = (0.0, 1.0)

    @staticmethod
    def density(pts):
        x = np.asarray(pts)[:, 0]
        return np.where((x >= 0.0) & (x <= 1.0), 1.0, 0.0)


def test_dataset_validation():
    with pytest.raises(DatasetError):
        Dataset(np.array([[np.nan]]))
    with pytest.raises(DatasetError):
        Dataset(np.empty((0, 2)))
    d = Dataset(np.array([1.0, 2.0, 3.0]))
    assert d.n == 3 and d.dim == 1


def test_load_csv(tmp_path):
    p = tmp_path / "pts.csv"
    p.write_text("x,y\n1.0,2.0\n3.0,4.0\n")
    d = load_csv(p)
    assert d.n == 2 and d.dim == 2
    assert np.allclose(d.points, [[1.0, 2.0], [3.0, 4.0]])
    bad = tmp_path / "ragged.csv"
    bad.write_text("1.0,2.0\n3.0\n")
    with pytest.raises(DatasetError):
        load_csv(bad)


def test_kde_single_sample():
    rect = make_kernel("rectangular", 1)
    d = Dataset(np.array([[0.0]]))
    assert kde_eval(d, rect, 1.0, [0.0]) == pytest.approx(0.5)


def test_kde_outside_support():
    rect = make_kernel("rectangular", 1)
    d = Dataset(np.array([[-1.0], [1.0]]))
    assert kde_eval(d, rect, 0.5, [0.0]) == 0.0


def test_kde_two_term_hand_sum():
    gauss = make_kernel("gaussian", 1)
    c = gauss.normalizer
    d = Dataset(np.array([[0.0], [0.2]]))
    expected = 0.5 * (10.0 * c + 10.0 * c * math.exp(-4.0))
    assert kde_eval(d, gauss, 0.1, [0.0]) == pytest.approx(expected, rel=1e-12)


def test_kde_at_samples_single_point():
    k = make_kernel("epanechnikov", 2)
    d = Dataset(np.array([[0.3, -0.7]]))
    vals = kde_eval_at_samples(d, k, 0.25)
    assert vals[0] == pytest.approx(float(k(np.zeros(2))) / 0.25**2)


def test_far_separated_points():
    rect = make_kernel("rectangular", 1)
    d = Dataset(np.array([[0.0], [100.0]]))
    vals = kde_eval_at_samples(d, rect, 0.1)
    expected = 0.5 / (2 * 0.1)
    assert np.allclose(vals, expected)


@pytest.mark.parametrize("profile,norm", [
    ("rectangular", "euclidean"),
    ("triweight", "euclidean"),
    ("rectangular", "supremum"),
])
def test_bucketed_matches_reference_bitwise(profile, norm):
    rng = np.random.default_rng(7)
    pts = rng.uniform(0, 1, size=(500, 2))
    d = Dataset(pts)
    k = make_kernel(profile, 2, norm)
    ref = kde_eval_at_samples(d, k, 0.07, method="reference")
    acc = kde_eval_at_samples(d, k, 0.07, method="bucketed")
    assert np.array_equal(ref, acc)


def test_bucketed_unbounded_within_tolerance():
    rng = np.random.default_rng(8)
    pts = rng.normal(size=(400, 1))
    d = Dataset(pts)
    k = make_kernel("gaussian", 1)
    ref = kde_eval_at_samples(d, k, 0.2, method="reference")
    acc = kde_eval_at_samples(d, k, 0.2, method="bucketed")
    assert np.max(np.abs(ref - acc)) <= 1e-12


def test_kde_value_bound():
    k = make_kernel("triangular", 1)
    rng = np.random.default_rng(3)
    d = Dataset(rng.normal(size=(200, 1)))
    delta = 0.05
    vals = kde_eval_batch(d, k, delta, np.linspace(-3, 3, 101).reshape(-1, 1))
    assert np.all(vals >= 0)
    assert np.all(vals <= k.sup_value / delta + 1e-12)
    ev = kde_evaluate(d, k, delta, [0.0])
    assert ev.value <= k.sup_value / delta


@given(st.floats(-5, 5))
@settings(max_examples=25, deadline=None)
def test_translation_equivariance(shift):
    k = make_kernel("quartic", 1)
    rng = np.random.default_rng(11)
    pts = rng.uniform(-1, 1, size=(40, 1))
    q = np.array([0.3])
    v1 = kde_eval(Dataset(pts), k, 0.3, q)
    v2 = kde_eval(Dataset(pts + shift), k, 0.3, q + shift)
    assert v1 == pytest.approx(v2, rel=1e-9, abs=1e-12)


def test_doubling_delta_halves_single_sample_value():
    k = make_kernel("gaussian", 1)
    d = Dataset(np.array([[0.4]]))
    v1 = kde_eval(d, k, 0.1, [0.4])
    v2 = kde_eval(d, k, 0.2, [0.4])
    assert v1 == pytest.approx(2.0 * v2)


@pytest.mark.parametrize("dim", [1, 2])
def test_kde_integrates_to_one(dim):
    k = make_kernel("epanechnikov", dim)
    rng = np.random.default_rng(5)
    pts = rng.uniform(0, 1, size=(60, dim))
    d = Dataset(pts)
    delta = 0.2
    spacing = 0.02 if dim == 1 else 0.04
    grid = probe_grid([-0.5] * dim, [1.5] * dim, spacing)
    vals = kde_eval_batch(d, k, delta, grid)
    integral = float(np.sum(vals)) * spacing**dim
    assert integral == pytest.approx(1.0, abs=1e-3 if dim == 1 else 5e-3)


def test_smoothed_density_uniform_examples():
    k = make_kernel("rectangular", 1)
    gt = UniformTruth()
    assert smoothed_density(gt, k, 0.1, [0.5]) == pytest.approx(1.0, rel=1e-6)
    assert smoothed_density(gt, k, 0.1, [0.0]) == pytest.approx(0.5, rel=1e-6)
    # Bounded by the sup of the true density.
    for q in (0.05, 0.3, 0.97):
        assert smoothed_density(gt, k, 0.1, [q]) <= 1.0 + 1e-9


def test_sup_distance_zero_against_itself():
    k = make_kernel("rectangular", 1)
    rng = np.random.default_rng(2)
    d = Dataset(rng.uniform(0, 1, size=(50, 1)))
    grid = np.linspace(0, 1, 21).reshape(-1, 1)
    kde_vals = kde_eval_batch(d, k, 0.1, grid)
    res = sup_distance(d, UniformTruth(), k, 0.1, grid, smoothed_values=kde_vals)
    assert res.value == 0.0


def test_sup_distance_quantile_grid_hand_values():
    # Samples on the uniform quantile grid; smoothed values known by hand.
    k = make_kernel("rectangular", 1)
    d = Dataset(np.array([[0.125], [0.375], [0.625], [0.875]]))
    grid = np.array([[0.0], [0.5], [1.0]])
    hand_smoothed = np.array([0.5, 1.0, 0.5])
    res = sup_distance(d, UniformTruth(), k, 0.25, grid, smoothed_values=hand_smoothed)
    assert res.value == pytest.approx(0.0, abs=1e-12)
    assert res.grid_spacing == pytest.approx(0.5)


def test_sup_distance_shrinks_with_n():
    k = make_kernel("rectangular", 1)
    gt = UniformTruth()
    delta = 0.2
    grid = default_probe_grid(gt, delta)
    sm = smoothed_on_grid(gt, k, delta, grid)
    medians = []
    for n in (256, 1024, 4096):
        vals = []
        for seed in range(9):
            pts = np.random.default_rng(100 + seed).uniform(0, 1, size=(n, 1))
            vals.append(sup_distance(Dataset(pts), gt, k, delta, grid, sm).value)
        medians.append(np.median(vals))
    assert medians[2] < medians[0]
