import math
import warnings

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from shrinker_lab.errors import DomainError, RegionDescriptorError
from shrinker_lab.jacobi import (
    OriginShiftWarning,
    Region,
    Stability,
    classify_region,
    dirichlet_ground_eigenvalue,
    find_r0,
    find_r1,
)
from shrinker_lab.spectrum import ShrinkerSpec

S, U = Stability.STABLE, Stability.UNSTABLE
SQRT2 = math.sqrt(2.0)
CYLINDER_CASES = [(2, 1), (3, 1), (3, 2), (4, 1), (4, 3), (5, 2)]


@pytest.mark.parametrize("n, k", CYLINDER_CASES)
def test_canonical_regions_stable(n, k):
    spec = ShrinkerSpec(n, k)
    c = math.sqrt(2 * (n - k))
    regions = [
        Region.half_space(SQRT2),
        Region.slab(-SQRT2, SQRT2),
        Region.half_space(-SQRT2, side="below"),
        Region.exterior(c),
        Region.ball(c),
    ]
    assert all(classify_region(spec, r) is S for r in regions)


@pytest.mark.parametrize("n, k", CYLINDER_CASES)
@pytest.mark.parametrize("a", [0.0, 0.5, 1.0, 1.4])
def test_half_spaces_below_sqrt2_unstable(n, k, a):
    assert classify_region(ShrinkerSpec(n, k), Region.half_space(a)) is U


def test_spec_examples():
    assert classify_region(ShrinkerSpec(2, 1), Region.slab(-SQRT2, SQRT2)) is S
    assert classify_region(ShrinkerSpec(2, 1), Region.half_space(0.0)) is U
    assert classify_region(ShrinkerSpec(3, 1), Region.exterior(2.0)) is S
    assert classify_region(ShrinkerSpec(2, 1), Region.slab(0.0, find_r0())) is S


def test_r0_slabs():
    spec = ShrinkerSpec(3, 2)
    r0 = find_r0()
    assert classify_region(spec, Region.slab(0.0, r0)) is S
    assert classify_region(spec, Region.slab(-r0, 0.0)) is S
    assert classify_region(spec, Region.slab(0.0, r0 + 1e-3)) is U


def three_way_split_stable(spec, c):
    regions = [Region.half_space(c), Region.slab(-c, c), Region.half_space(-c, side="below")]
    return all(classify_region(spec, r) is S for r in regions)


@pytest.mark.parametrize("n", [2, 3, 5])
def test_axis_split_unique_at_sqrt2(n):
    spec = ShrinkerSpec(n, n - 1)
    assert three_way_split_stable(spec, SQRT2)
    for c in [0.5, 1.0, 1.4, 1.42, 1.6, 2.0, 3.0]:
        assert not three_way_split_stable(spec, c)


def test_long_slabs_unstable():
    spec = ShrinkerSpec(2, 1)
    for a in [0.0, 0.5, 1.0, 1.4]:
        assert classify_region(spec, Region.slab(a, 12.0)) is U


@pytest.mark.parametrize("n, k", [(3, 1), (4, 2), (5, 2), (6, 2)])
def test_radial_split_unique(n, k):
    spec = ShrinkerSpec(n, k)
    c = math.sqrt(2 * (n - k))
    assert classify_region(spec, Region.ball(c)) is S
    assert classify_region(spec, Region.exterior(c)) is S
    for other in [0.5 * c, c - 1e-3, c + 1e-3, 1.5 * c]:
        both = classify_region(spec, Region.ball(other)), classify_region(spec, Region.exterior(other))
        assert U in both


def test_plane_exterior_thresholds():
    # {|x| > a} on the plane R^n is stable exactly from a certain radius on
    plane2, plane3 = ShrinkerSpec(2, 0), ShrinkerSpec(3, 0)
    assert classify_region(plane2, Region.exterior(SQRT2)) is S
    assert classify_region(plane2, Region.exterior(0.85)) is U
    assert classify_region(plane3, Region.exterior(SQRT2)) is S
    assert classify_region(plane3, Region.exterior(SQRT2 - 1e-3)) is U


@pytest.mark.parametrize("n", [2, 3, 5, 7])
def test_plane_annuli_between_r1_and_beyond(n):
    spec = ShrinkerSpec(n, 0)
    r1 = find_r1(n)
    assert classify_region(spec, Region.ball(r1)) is S
    assert classify_region(spec, Region.ball(r1 + 1e-3)) is U


def test_plane_half_spaces():
    spec = ShrinkerSpec(2, 0)
    assert classify_region(spec, Region.half_space(0.0)) is S
    assert classify_region(spec, Region.half_space(-0.5)) is U


def test_descriptor_errors():
    with pytest.raises(RegionDescriptorError):
        Region("cone", 1.0)
    with pytest.raises(RegionDescriptorError):
        Region.slab(2.0, 1.0)
    with pytest.raises(RegionDescriptorError):
        Region.ball(-1.0)
    with pytest.raises(RegionDescriptorError):
        classify_region(ShrinkerSpec(2, 2), Region.ball(1.0))


# -- Dirichlet solver ----------------------------------------------------------


def test_dirichlet_ground_state_zero():
    spec = ShrinkerSpec(2, 1)
    assert abs(dirichlet_ground_eigenvalue(spec, (-SQRT2, SQRT2), 2048)) <= 2e-3
    assert abs(dirichlet_ground_eigenvalue(spec, (0.0, find_r0()), 2048)) <= 2e-3
    assert dirichlet_ground_eigenvalue(spec, (-2.0, 2.0), 2048) < 0


def test_dirichlet_second_order_convergence():
    spec = ShrinkerSpec(2, 1)
    errs = [abs(dirichlet_ground_eigenvalue(spec, (-SQRT2, SQRT2), n)) for n in (256, 512, 1024)]
    assert 3.5 < errs[0] / errs[1] < 4.5
    assert 3.5 < errs[1] / errs[2] < 4.5


@pytest.mark.parametrize("lam", [2, 3])
def test_dirichlet_radial_ball(lam):
    spec = ShrinkerSpec(lam + 1, 1)
    c = math.sqrt(2 * lam)
    assert abs(dirichlet_ground_eigenvalue(spec, (0.0, c), 2048)) <= 2e-3


def test_dirichlet_plane_ball_at_r1():
    for n in (2, 4):
        assert abs(dirichlet_ground_eigenvalue(ShrinkerSpec(n, 0), (0.0, find_r1(n)), 2048)) <= 2e-3


def test_dirichlet_origin_shift_option():
    spec = ShrinkerSpec(4, 1)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        shifted = dirichlet_ground_eigenvalue(spec, (0.0, math.sqrt(6)), 1024, origin="shift")
    assert any(issubclass(w.category, OriginShiftWarning) for w in caught)
    assert abs(shifted) <= 2e-2


CHAINS = [
    (ShrinkerSpec(2, 1), [(-1.0, 1.0), (-1.2, 1.3), (-1.5, 1.5), (-2.0, 2.2), (-3.0, 3.0)]),
    (ShrinkerSpec(3, 2), [(0.5, 1.0), (0.2, 1.5), (0.0, 2.0), (-1.0, 3.0), (-2.0, 4.0)]),
    (ShrinkerSpec(3, 1), [(0.5, 1.0), (0.4, 1.5), (0.3, 2.0), (0.2, 3.0), (0.1, 4.0)]),
    (ShrinkerSpec(2, 0), [(0.5, 1.0), (0.3, 1.5), (0.0, 2.0), (0.0, 2.5), (0.0, 3.5)]),
    (ShrinkerSpec(5, 2), [(1.0, 2.0), (0.8, 2.5), (0.5, 3.0), (0.0, 3.5), (0.0, 5.0)]),
]


@pytest.mark.parametrize("spec, chain", CHAINS)
def test_dirichlet_domain_monotonicity(spec, chain):
    values = [dirichlet_ground_eigenvalue(spec, iv, 1024) for iv in chain]
    assert all(b < a for a, b in zip(values, values[1:]))


def test_dirichlet_errors():
    spec = ShrinkerSpec(3, 1)
    with pytest.raises(DomainError):
        dirichlet_ground_eigenvalue(spec, (-1.0, 1.0))
    with pytest.raises(DomainError):
        dirichlet_ground_eigenvalue(spec, (1.0, 1.0))
    with pytest.raises(DomainError):
        dirichlet_ground_eigenvalue(ShrinkerSpec(2, 2), (0.0, 1.0))


@given(st.floats(-4.0, 3.5), st.floats(0.2, 4.0))
def test_classifier_agrees_with_dirichlet_on_slabs(a, width):
    # a bounded slab is stable iff the Dirichlet ground eigenvalue is nonnegative
    spec = ShrinkerSpec(2, 1)
    b = a + width
    lam = dirichlet_ground_eigenvalue(spec, (a, b), 512)
    assume(abs(lam) > 5e-3)
    expected = S if lam > 0 else U
    assert classify_region(spec, Region.slab(a, b)) is expected


@given(st.floats(0.3, 3.0), st.floats(0.2, 3.0), st.sampled_from([(4, 1), (3, 0), (5, 0)]))
def test_classifier_agrees_with_dirichlet_on_annuli(a, width, nk):
    spec = ShrinkerSpec(*nk)
    lam = dirichlet_ground_eigenvalue(spec, (a, a + width), 512)
    assume(abs(lam) > 5e-3)
    expected = S if lam > 0 else U
    assert classify_region(spec, Region.annulus(a, a + width)) is expected
