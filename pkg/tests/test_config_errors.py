import pytest

from shrinker_lab import errors
from shrinker_lab.config import DEFAULT_CONFIG, QuadratureConfig


@pytest.mark.parametrize("field", ["abs_tol", "singular_band", "ode_dt"])
@pytest.mark.parametrize("value", [0.0, -1e-3, float("nan")])
def test_nonpositive_tolerances_rejected(field, value):
    with pytest.raises(ValueError, match=field):
        QuadratureConfig(**{field: value})


@pytest.mark.parametrize("grid", [0, -4, 10.5])
def test_grid_size_must_be_positive_integer(grid):
    with pytest.raises(ValueError, match="grid_size"):
        QuadratureConfig(grid_size=grid)


def test_overrides_skip_none_and_keep_original():
    cfg = DEFAULT_CONFIG.with_overrides(abs_tol=1e-8, ode_dt=None)
    assert cfg.abs_tol == 1e-8
    assert cfg.ode_dt == DEFAULT_CONFIG.ode_dt
    assert DEFAULT_CONFIG.abs_tol == 1e-10


def test_overrides_reject_unknown_keys():
    with pytest.raises(ValueError, match="unknown"):
        DEFAULT_CONFIG.with_overrides(tolerance=1.0)


def test_overrides_revalidate():
    with pytest.raises(ValueError):
        DEFAULT_CONFIG.with_overrides(grid_size=0)


def test_as_dict_round_trip():
    cfg = QuadratureConfig(abs_tol=1e-9, grid_size=512)
    assert QuadratureConfig(**cfg.as_dict()) == cfg


def test_error_families():
    usage = [
        errors.DomainError,
        errors.DegreeCapError,
        errors.RegionDescriptorError,
        errors.GeneratorNotConstructibleError,
        errors.ShootingRangeError,
    ]
    numeric = [
        errors.ChartError,
        errors.ToleranceError,
        errors.InsufficientTruncationError,
        errors.TruncationError,
        errors.StepSizeError,
    ]
    for cls in usage:
        assert issubclass(cls, errors.UsageError) and issubclass(cls, ValueError)
    for cls in numeric:
        assert issubclass(cls, errors.ComputationError) and issubclass(cls, ArithmeticError)
    codes = [cls.code for cls in usage + numeric]
    assert len(set(codes)) == len(codes)


def test_as_dict_payload():
    err = errors.DomainError("bad degree", degree=-1)
    assert err.as_dict() == {"code": "domain", "message": "bad degree", "context": {"degree": -1}}
    assert str(err) == "bad degree"


def test_step_size_error_keeps_partial():
    err = errors.StepSizeError("blew up", partial=(1.0, 2.0), z=3.0)
    assert err.partial == (1.0, 2.0)
    assert err.context == {"z": 3.0}
