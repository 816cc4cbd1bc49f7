import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from kdecluster.kernels import (
    EUCLIDEAN,
    PROFILES,
    SUPREMUM,
    Kernel,
    KernelError,
    TailBoundError,
    check_exponential_tail_bounds,
    distance,
    eval_scaled,
    kernel_from_spec,
    make_kernel,
    norm_of,
    tail_kappa1,
    tail_kappa_inf,
    unit_ball_volume,
)


def numeric_integral(kernel: Kernel) -> float:
    """Independent numerical integral of K over R^d (d <= 2)."""
    lim = 1.0 if kernel.bounded_support else 40.0
    if kernel.dim == 1:
        val, _ = integrate.quad(lambda x: float(kernel(np.array([x]))), -lim, lim, limit=400)
        return val
    if kernel.dim == 2:
        val, _ = integrate.dblquad(
            lambda y, x: float(kernel(np.array([x, y]))),
            -lim,
            lim,
            lambda x: -lim,
            lambda x: lim,
            epsabs=1e-6,
        )
        return val
    raise NotImplementedError


def radial_integral(kernel: Kernel) -> float:
    """Shell-formula integral using numerical radial quadrature (any d)."""
    d = kernel.dim
    lim = 1.0 if kernel.bounded_support else 60.0
    mom, _ = integrate.quad(
        lambda r: float(kernel.profile_values(r)) * r ** (d - 1), 0.0, lim, limit=400
    )
    return d * unit_ball_volume(d, kernel.norm) * mom


def test_norm_basics():
    a = np.array([3.0, 4.0])
    assert norm_of(a, EUCLIDEAN) == 5.0
    assert norm_of(a, SUPREMUM) == 4.0
    assert distance(a, a, EUCLIDEAN) == 0.0


@given(
    st.lists(st.floats(-10, 10), min_size=3, max_size=3),
    st.lists(st.floats(-10, 10), min_size=3, max_size=3),
    st.lists(st.floats(-10, 10), min_size=3, max_size=3),
    st.sampled_from([EUCLIDEAN, SUPREMUM]),
)
@settings(max_examples=50, deadline=None)
def test_norm_triangle_inequality(a, b, c, norm):
    a, b, c = map(np.array, (a, b, c))
    assert distance(a, c, norm) <= distance(a, b, norm) + distance(b, c, norm) + 1e-9
    assert np.isclose(distance(a, b, norm), distance(b, a, norm))


def test_rectangular_normalizers():
    assert make_kernel("rectangular", 1).normalizer == pytest.approx(0.5)
    assert make_kernel("rectangular", 2).normalizer == pytest.approx(1.0 / math.pi)
    assert make_kernel("rectangular", 2, SUPREMUM).normalizer == pytest.approx(0.25)


def test_gaussian_normalizer_against_quadrature():
    k = make_kernel("gaussian", 1)
    # Quadrature oracle for integral of exp(-x^2).
    total, _ = integrate.quad(lambda x: math.exp(-x * x), -40, 40)
    assert k.normalizer == pytest.approx(1.0 / total, rel=1e-9)
    assert k.normalizer == pytest.approx(0.5641896, abs=1e-7)


@pytest.mark.parametrize("profile", PROFILES)
@pytest.mark.parametrize("dim", [1, 2])
def test_unit_mass_euclidean(profile, dim):
    k = make_kernel(profile, dim, EUCLIDEAN)
    assert numeric_integral(k) == pytest.approx(1.0, abs=1e-3)


@pytest.mark.parametrize("profile", ["rectangular", "triangular", "triweight"])
def test_unit_mass_supremum(profile):
    k = make_kernel(profile, 2, SUPREMUM)
    assert numeric_integral(k) == pytest.approx(1.0, abs=1e-3)


@pytest.mark.parametrize("profile", PROFILES)
def test_unit_mass_d3_radial(profile):
    k = make_kernel(profile, 3, EUCLIDEAN)
    assert radial_integral(k) == pytest.approx(1.0, rel=1e-8)


def test_kernel_symmetry_and_positivity():
    for profile in PROFILES:
        k = make_kernel(profile, 2)
        pts = np.random.default_rng(0).normal(size=(50, 2))
        vals = k(pts)
        assert np.all(vals >= 0)
        assert np.allclose(vals, k(-pts))
        assert k(np.zeros(2)) > 0


def test_bounded_support_vanishes_outside_ball():
    k = make_kernel("epanechnikov", 2)
    assert k(np.array([1.5, 0.0])) == 0.0
    ks = make_kernel("rectangular", 2, SUPREMUM)
    assert ks(np.array([1.01, 0.0])) == 0.0
    assert ks(np.array([1.0, 1.0])) == pytest.approx(0.25)


def test_eval_scaled_examples():
    rect = make_kernel("rectangular", 1)
    assert eval_scaled(rect, 0.5, np.array([0.0])) == pytest.approx(1.0)
    gauss = make_kernel("gaussian", 1)
    x = np.array([0.3])
    assert eval_scaled(gauss, 1.0, x) == pytest.approx(float(gauss(x)))
    c = gauss.normalizer
    assert eval_scaled(gauss, 0.1, np.array([0.2])) == pytest.approx(10.0 * c * math.exp(-4.0))


@pytest.mark.parametrize("profile", ["rectangular", "quartic", "gaussian", "laplacian"])
@pytest.mark.parametrize("delta", [0.1, 1.0, 10.0])
def test_scaled_integral_is_one(profile, delta):
    k = make_kernel(profile, 1)
    lim = delta * (1.0 if k.bounded_support else 50.0)
    val, _ = integrate.quad(
        lambda x: float(eval_scaled(k, delta, np.array([x]))), -lim, lim, limit=400
    )
    assert val == pytest.approx(1.0, abs=1e-3)


def test_tail_examples():
    rect = make_kernel("rectangular", 1)
    assert tail_kappa1(rect, 1.0) == 0.0
    assert tail_kappa_inf(rect, 1.0) == 0.0
    assert tail_kappa1(rect, 0.0) == 1.0
    lap = make_kernel("laplacian", 1)
    # Closed-form integral oracle: mass of (1/2)e^-|x| outside [-2, 2].
    assert tail_kappa1(lap, 2.0) == pytest.approx(math.exp(-2.0), rel=1e-12)
    assert tail_kappa1(lap, 2.0) == pytest.approx(0.13534, abs=1e-5)


def test_tail_kappa1_matches_quadrature():
    for profile in ("triangular", "tricube", "gaussian"):
        k = make_kernel(profile, 2)
        for r in (0.25, 0.5, 0.8, 1.5):
            lim = 1.0 if k.bounded_support else 50.0
            if r >= lim:
                assert tail_kappa1(k, r) == 0.0
                continue
            mom, _ = integrate.quad(lambda s: float(k.profile_values(s)) * s, r, lim)
            expected = 2 * unit_ball_volume(2, k.norm) * mom
            assert tail_kappa1(k, r) == pytest.approx(expected, abs=1e-10)


@pytest.mark.parametrize("profile", PROFILES)
def test_tail_monotonicity(profile):
    k = make_kernel(profile, 2 if profile != "laplacian" else 2)
    grid = np.linspace(0.0, 3.0, 40)
    k1 = [tail_kappa1(k, r) for r in grid]
    kinf = [tail_kappa_inf(k, r) for r in grid]
    assert all(a >= b - 1e-12 for a, b in zip(k1, k1[1:]))
    assert all(a >= b - 1e-12 for a, b in zip(kinf, kinf[1:]))
    assert k1[0] == 1.0
    assert kinf[0] == pytest.approx(k.sup_value)


def test_kappa_inf_scaling_relation():
    # sup over ||z|| >= sigma of K_delta(z) equals delta^-d kappa_inf(sigma/delta).
    k = make_kernel("gaussian", 1)
    delta, sigma = 0.2, 0.5
    zs = np.linspace(sigma, 30.0, 20000).reshape(-1, 1)
    lhs = float(np.max(eval_scaled(k, delta, zs)))
    rhs = delta ** (-1) * tail_kappa_inf(k, sigma / delta)
    assert lhs == pytest.approx(rhs, rel=1e-6)


def test_exp_tail_constant_majorizes_kernel():
    rng = np.random.default_rng(1)
    for profile in PROFILES:
        for dim, norm in ((1, EUCLIDEAN), (2, EUCLIDEAN), (1, SUPREMUM)):
            k = make_kernel(profile, dim, norm)
            pts = rng.normal(scale=2.0, size=(500, dim))
            vals = k(pts)
            bound = k.exp_tail_constant * np.exp(-np.linalg.norm(pts, axis=-1))
            assert np.all(vals <= bound * (1 + 1e-9) + 1e-300)


def test_tail_bounds_pass_for_shipped_cases():
    grid = [0.5, 1.0, 2.0, 4.0, 8.0]
    rep = check_exponential_tail_bounds(make_kernel("laplacian", 1), grid)
    assert rep.passed
    for d in (1, 2, 3):
        rep = check_exponential_tail_bounds(make_kernel("gaussian", d), grid)
        assert rep.passed
    # Bounded support: tails identically zero beyond the support radius.
    rep = check_exponential_tail_bounds(make_kernel("quartic", 2), [1.0, 2.0, 5.0])
    assert rep.passed
    assert all(row[1] == 0.0 and row[3] == 0.0 for row in rep.rows)


def test_tail_bound_violation_is_detected():
    # The kappa1 bound genuinely fails for the laplacian profile in d >= 2 at
    # small radii; the checker must report it rather than hide it.
    k = make_kernel("laplacian", 2)
    rep = check_exponential_tail_bounds(k, [0.5], strict=False)
    assert not rep.passed
    with pytest.raises(TailBoundError):
        check_exponential_tail_bounds(k, [0.5])


def test_make_kernel_rejections():
    with pytest.raises(KernelError):
        make_kernel("cauchy", 1)
    with pytest.raises(KernelError):
        make_kernel("gaussian", 2, SUPREMUM)
    with pytest.raises(KernelError):
        make_kernel("rectangular", 0)
    with pytest.raises(KernelError):
        kernel_from_spec({"norm": EUCLIDEAN}, 1)


def test_kernel_from_spec():
    k = kernel_from_spec({"profile": "triweight", "norm": "supremum"}, 2)
    assert k.profile == "triweight"
    assert k.norm == SUPREMUM
    assert k.bounded_support
