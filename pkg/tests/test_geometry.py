import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from shrinker_lab.errors import DomainError, TruncationError
from shrinker_lab.shrinker_geometry import (
    ParametricHypersurface,
    cylinder_entropy,
    f_functional,
    flow_sphere,
    monotonicity_check,
    shrinker_residual,
    sphere_entropy,
)
from shrinker_lab.spectrum import ShrinkerSpec

SPHERE_F = 4 / math.e
CYLINDER_F = math.sqrt(2 * math.pi / math.e)


def test_residual_calibrated_families():
    assert shrinker_residual(ParametricHypersurface.sphere(2, 2.0)) <= 1e-12
    assert shrinker_residual(ParametricHypersurface.from_spec(ShrinkerSpec(2, 1))) <= 1e-12
    assert shrinker_residual(ParametricHypersurface.plane(2)) <= 1e-12
    for n in range(1, 5):
        for k in range(0, n + 1):
            surf = ParametricHypersurface.from_spec(ShrinkerSpec(n, k), resolution=12)
            assert shrinker_residual(surf) <= 1e-12


def test_residual_unit_sphere():
    assert shrinker_residual(ParametricHypersurface.sphere(2, 1.0)) == pytest.approx(1.5, abs=1e-12)


@given(st.floats(0.2, 5.0))
def test_residual_positive_off_shrinker(rho):
    res = shrinker_residual(ParametricHypersurface.sphere(2, rho))
    assert res == pytest.approx(abs(2 / rho - rho / 2), abs=1e-12)


def test_sphere_area_converges():
    errs = []
    for res in (4, 8, 16):
        _, _, w = ParametricHypersurface.sphere(2, 1.5, resolution=res).samples()
        assert np.all(w > 0)
        errs.append(abs(w.sum() - 4 * math.pi * 1.5**2))
    assert errs[1] <= errs[0] / 4 and errs[2] <= max(errs[1] / 4, 1e-13)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_sphere_grid_area_any_dimension(k):
    _, _, w = ParametricHypersurface.sphere(k, 1.0, resolution=24).samples()
    area = 2 * math.pi ** ((k + 1) / 2) / math.gamma((k + 1) / 2)
    assert w.sum() == pytest.approx(area, rel=1e-12)


def test_f_functional_examples():
    assert f_functional(ParametricHypersurface.plane(2)).value == pytest.approx(1.0, abs=1e-10)
    assert f_functional(ParametricHypersurface.sphere(2, 2.0)).value == pytest.approx(SPHERE_F, abs=1e-10)
    cyl = ParametricHypersurface.from_spec(ShrinkerSpec(2, 1))
    res = f_functional(cyl)
    assert res.value == pytest.approx(CYLINDER_F, abs=1e-10)
    assert res.error_estimate <= 1e-6
    assert res.tail_bound <= 1e-10


def test_closed_forms_agree_with_oracles():
    assert sphere_entropy(2) == pytest.approx(SPHERE_F, rel=1e-15)
    assert cylinder_entropy(1) == pytest.approx(CYLINDER_F, rel=1e-15)


@pytest.mark.parametrize("n, k", [(1, 1), (1, 0), (2, 2), (3, 1), (3, 2), (3, 3), (3, 0)])
def test_entropy_of_generalized_cylinders(n, k):
    surf = ParametricHypersurface.from_spec(ShrinkerSpec(n, k), resolution=24, euclidean_nodes=40)
    assert f_functional(surf).value == pytest.approx(cylinder_entropy(k), abs=1e-8)


def test_grid_refinement_stable():
    for surf in (
        ParametricHypersurface.plane(2),
        ParametricHypersurface.sphere(2, 2.0),
        ParametricHypersurface.from_spec(ShrinkerSpec(2, 1)),
    ):
        a = f_functional(surf).value
        b = f_functional(surf.refined()).value
        assert abs(a - b) <= 1e-6


def test_shrinkers_are_critical_in_scale():
    # F_{0,t0} of a shrinker is maximal at t0 = 1
    sphere = ParametricHypersurface.sphere(2, 2.0)
    for t0 in (0.8, 1.25):
        assert f_functional(sphere, t0=t0).value < SPHERE_F


def test_gaussian_translation_on_plane():
    plane = ParametricHypersurface.plane(2)
    assert f_functional(plane, x0=[0.7, -1.3, 0.0], t0=2.0).value == pytest.approx(1.0, abs=1e-10)
    shifted = f_functional(plane, x0=[0.0, 0.0, 1.0], t0=1.0).value
    assert shifted == pytest.approx(math.exp(-0.25), abs=1e-10)


def test_truncation_error_reported():
    import shrinker_lab.shrinker_geometry as geo

    plane = ParametricHypersurface.plane(2)
    old = geo.BOX_HALF_WIDTH
    try:
        geo.BOX_HALF_WIDTH = 6.0
        with pytest.raises(TruncationError) as info:
            f_functional(plane)
        assert info.value.context["tail_bound"] > 1e-10
    finally:
        geo.BOX_HALF_WIDTH = old


def test_f_functional_domain():
    with pytest.raises(DomainError):
        f_functional(ParametricHypersurface.plane(2), t0=0.0)
    with pytest.raises(DomainError):
        f_functional(ParametricHypersurface.plane(2), x0=[0.0, 0.0])


def test_flow_examples():
    flow = flow_sphere(2, 2.0, -1.0, dt=1e-4)
    assert flow.radius_at(-0.25) == pytest.approx(1.0, abs=1e-6)
    assert abs(flow.extinction_time) <= 1e-4
    assert flow.clipped
    curve = flow_sphere(1, math.sqrt(2), -1.0, dt=1e-4)
    assert curve.radius_at(-0.5) == pytest.approx(1.0, abs=1e-6)


def test_flow_matches_closed_form():
    flow = flow_sphere(2, 2.0, -1.0, dt=1e-4)
    keep = flow.times <= -0.01
    err = np.abs(flow.radii[keep] - np.sqrt(-4 * flow.times[keep]))
    assert err.max() <= 1e-6


def test_flow_history_monotone():
    flow = flow_sphere(3, 1.5, -0.5, dt=1e-3)
    assert np.all(np.diff(flow.times) > 0)
    assert np.all(np.diff(flow.radii) < 0)
    assert flow.radii[-1] >= 1e-3


@pytest.mark.parametrize("n", [1, 2, 4])
def test_flow_fourth_order(n):
    errs = []
    for dt in (2e-2, 1e-2):
        flow = flow_sphere(n, 2.0 * math.sqrt(n), -1.0, dt=dt, t_end=-0.5)
        errs.append(np.max(np.abs(flow.radii - flow.closed_form(flow.times))))
    assert errs[0] / errs[1] >= 8


def test_flow_domain_errors():
    with pytest.raises(DomainError):
        flow_sphere(0, 1.0, -1.0)
    with pytest.raises(DomainError):
        flow_sphere(2, -1.0, -1.0)


def test_radius_interpolation_accuracy():
    flow = flow_sphere(2, 2.0, -1.0, dt=1e-2, t_end=-0.2)
    for t in np.linspace(-0.99, -0.21, 17):
        assert flow.radius_at(t) == pytest.approx(math.sqrt(-4 * t), abs=1e-7)


def test_monotonicity_self_shrinker_constant():
    flow = flow_sphere(2, 2.0, -1.0, dt=1e-3)
    report = monotonicity_check(flow, x0=np.zeros(3), t0=0.0)
    assert report.violations == 0
    assert np.max(np.abs(report.values - SPHERE_F)) <= 1e-5


def test_monotonicity_off_center():
    flow = flow_sphere(2, 2.0, -1.0, dt=1e-3, center=(0.5, 0.0, 0.0))
    report = monotonicity_check(flow, x0=np.zeros(3), t0=0.0)
    assert report.violations == 0
    assert np.all(np.diff(report.values) <= report.errors[1:] + report.errors[:-1] + 1e-13)
    assert report.values[-1] < report.values[0]


def test_monotonicity_single_slice():
    flow = flow_sphere(2, 2.0, -1.0, dt=1e-3, t_end=-1.0)
    assert len(flow.times) == 1
    assert monotonicity_check(flow, t0=0.0).violations == 0


@given(
    st.integers(1, 2),
    st.floats(0.5, 2.5),
    st.floats(-1.0, 1.0),
    st.floats(0.05, 0.5),
)
def test_monotonicity_any_flow(n, r_init, offset, lead):
    flow = flow_sphere(n, r_init, -1.0, dt=5e-3, center=(offset,) + (0.0,) * n)
    report = monotonicity_check(flow, t0=flow.extinction_time + lead, max_slices=30, resolution=24)
    assert report.violations == 0


def test_monotonicity_three_sphere():
    flow = flow_sphere(3, 1.5, -1.0, dt=5e-3, center=(0.4, -0.2, 0.0, 0.0))
    report = monotonicity_check(flow, t0=0.0, max_slices=20, resolution=16)
    assert report.violations == 0
