import numpy as np
import pytest

from kdecluster.levelset import SampleBallFamily
from kdecluster.splitter import (
    ClusterOutput,
    SplitterCapError,
    SplitterParams,
    default_params,
    filtered_components,
    run_generic,
)


def flat_family(points, top, sigma, norm="euclidean"):
    """All samples active up to the level ``top``, none above."""
    points = np.asarray(points, dtype=float).reshape(-1, 1)
    return SampleBallFamily(points, np.full(points.shape[0], top), sigma, norm)


def test_split_trace_two_far_groups():
    # Manual trace: the first count sees two components, the loop exits after
    # one level step, the level then jumps two more steps and is returned.
    fam = flat_family([0.0, 0.1, 0.2, 2.0, 2.1, 2.2], top=3.0, sigma=0.05)
    params = SplitterParams(tau=0.2, eps=0.25, rho0=0.5, rho_cap=10.0)
    out = run_generic(fam, params)
    assert out.split
    assert out.rho_out == pytest.approx(1.25)
    assert out.components == ((0, 1, 2), (3, 4, 5))
    assert out.trace == ((0.5, 2), (1.25, 2))


def test_nosplit_trace_single_group():
    fam = flat_family([0.0, 0.05, 0.1], top=2.0, sigma=0.05)
    params = SplitterParams(tau=5.0, eps=0.5, rho0=0.5, rho_cap=10.0)
    out = run_generic(fam, params)
    assert not out.split
    assert out.rho_out == pytest.approx(0.5)
    assert out.base_set == (0, 1, 2)
    assert out.components == ()
    assert out.trace == ((0.5, 1), (1.0, 1), (1.5, 0), (3.0, 0))


def test_empty_family_returns_nosplit_at_start():
    fam = SampleBallFamily(np.empty((0, 1)), np.empty(0), sigma=0.1)
    params = SplitterParams(tau=0.1, eps=0.2, rho0=0.0, rho_cap=1.0)
    out = run_generic(fam, params)
    assert not out.split
    assert out.rho_out == 0.0
    assert out.base_set == ()
    assert out.trace[0] == (0.0, 0)


def test_trace_levels_are_arithmetic():
    fam = flat_family(np.linspace(0, 0.5, 12), top=1.7, sigma=0.05)
    params = SplitterParams(tau=2.0, eps=0.3, rho0=0.2, rho_cap=8.0)
    out = run_generic(fam, params)
    loop_levels = [rho for rho, _ in out.trace[:-1]]
    expected = [0.2 + i * 0.3 for i in range(len(loop_levels))]
    assert loop_levels == pytest.approx(expected)
    # Final recount sits two steps above the post-loop level.
    assert out.trace[-1][0] == pytest.approx(loop_levels[-1] + 3 * 0.3)


def test_split_is_at_least_three_steps_above_start():
    fam = flat_family([0.0, 0.05, 5.0, 5.05], top=9.0, sigma=0.01)
    params = SplitterParams(tau=0.1, eps=0.5, rho0=0.25, rho_cap=20.0)
    out = run_generic(fam, params)
    assert out.split
    assert out.rho_out >= params.rho0 + 3 * params.eps - 1e-12


def test_determinism():
    fam = flat_family([0.0, 0.1, 1.0, 1.1], top=2.0, sigma=0.02)
    params = SplitterParams(tau=0.3, eps=0.15, rho0=0.1, rho_cap=5.0)
    a = run_generic(fam, params)
    b = run_generic(fam, params)
    assert a == b


def test_cap_error_carries_trace():
    class BadFamily:
        # Non-nested pathological family: component count is always one.
        points = np.zeros((2, 1))
        sigma = 0.1
        norm = "euclidean"
        max_value = 1.0

        def __call__(self, rho):
            from kdecluster.levelset import LevelSetEstimate

            return LevelSetEstimate(rho, np.array([0, 1]), 0.1, self)

    fam = BadFamily()
    params = SplitterParams(tau=1.0, eps=0.5, rho0=0.0, rho_cap=3.0)
    with pytest.raises(SplitterCapError) as err:
        run_generic(fam, params)
    assert len(err.value.trace) >= 1


def test_filtered_components_cases():
    pts = np.array([0.0, 0.1, 2.0, 2.1]).reshape(-1, 1)
    # Values: left pair active to high levels, right pair drops out early.
    fam = SampleBallFamily(pts, np.array([3.0, 3.0, 1.0, 1.0]), sigma=0.05)
    # Same active set at rho and rho + 2 eps: nothing filtered out.
    m, comps = filtered_components(fam, 0.5, eps=0.1, tau=0.2)
    assert m == 2
    # The right component has no sample active two steps higher: filtered.
    m, comps = filtered_components(fam, 0.9, eps=0.2, tau=0.2)
    assert m == 1
    assert tuple(comps[0]) == (0, 1)
    # Empty set two steps higher: everything filtered.
    m, comps = filtered_components(fam, 2.9, eps=0.2, tau=0.2)
    assert m == 0


def test_counter_injection_and_output_json():
    fam = flat_family([0.0, 1.0], top=1.0, sigma=0.1)
    calls = []

    def spy(rho):
        calls.append(rho)
        return filtered_components(fam, rho, 0.2, 0.05)

    params = default_params(fam, tau=0.05, eps=0.2, rho0=0.0)
    out = run_generic(fam, params, counter=spy)
    assert calls == [rho for rho, _ in out.trace]
    blob = out.to_json()
    assert set(blob) == {"split", "rho_out", "components", "base_set", "trace"}


def test_params_validation():
    with pytest.raises(ValueError):
        SplitterParams(tau=0.0, eps=0.1, rho0=0.0, rho_cap=1.0)
    with pytest.raises(ValueError):
        SplitterParams(tau=0.1, eps=0.1, rho0=1.0, rho_cap=0.5)
