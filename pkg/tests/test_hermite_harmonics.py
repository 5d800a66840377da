from fractions import Fraction
from itertools import combinations_with_replacement

import numpy as np
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from shrinker_lab.errors import DegreeCapError, DomainError
from shrinker_lab.hermite_harmonics import harmonic_dim, hermite_eval, hermite_half


def rodrigues_coeffs(k):
    z, x = sp.symbols("z x")
    expr = (-1) ** k * sp.exp(z**2) * sp.diff(sp.exp(-(z**2)), z, k)
    poly = sp.Poly(sp.expand(sp.simplify(expr).subs(z, x / 2)), x)
    return [int(poly.coeff_monomial(x**i)) for i in range(k + 1)]


@pytest.mark.parametrize(
    "k, text",
    [(0, "1"), (1, "x"), (2, "x^2 - 2"), (3, "x^3 - 6x"), (4, "x^4 - 12x^2 + 12")],
)
def test_listed_forms(k, text):
    assert str(hermite_half(k)) == text


@pytest.mark.parametrize("k", range(7))
def test_recurrence_matches_rodrigues(k):
    assert list(hermite_half(k).coeffs) == rodrigues_coeffs(k)


@given(st.integers(0, 64))
def test_monic_and_parity(k):
    p = hermite_half(k)
    assert p.coeffs[-1] == 1
    assert all(c == 0 for i, c in enumerate(p.coeffs) if (i - k) % 2)


def test_degree_cap():
    with pytest.raises(DegreeCapError):
        hermite_half(65)
    assert hermite_half(80, cap=100).degree == 80
    with pytest.raises(DomainError):
        hermite_half(-1)


@pytest.mark.parametrize("k, x, expected", [(2, 2**0.5, 0.0), (1, 3.0, 3.0), (3, 2.0, -4.0)])
def test_eval_examples(k, x, expected):
    assert hermite_eval(hermite_half(k), x) == pytest.approx(expected, abs=1e-15)


@given(st.integers(0, 20), st.floats(-50, 50))
def test_eval_relative_error(k, x):
    p = hermite_half(k)
    exact = sum(Fraction(c) * Fraction(x) ** i for i, c in enumerate(p.coeffs))
    got = hermite_eval(p, x)
    assert abs(Fraction(got) - exact) <= Fraction(1, 10**12) * abs(exact) + Fraction(1, 10**300)


@given(st.integers(0, 20))
def test_array_path_agrees_with_scalar(k):
    p = hermite_half(k)
    xs = np.linspace(-8, 8, 33)
    arr = hermite_eval(p, xs)
    scal = np.array([hermite_eval(p, float(x)) for x in xs])
    np.testing.assert_allclose(arr, scal, rtol=1e-11, atol=1e-9 * np.max(np.abs(scal)))


# quadpack flags roundoff on the large odd integrands; the value itself is what is checked
@pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
@pytest.mark.parametrize("j, k", [(j, k) for j in range(9) for k in range(j)])
def test_orthogonality(j, k):
    pj, pk = hermite_half(j), hermite_half(k)
    val, _ = quad(
        lambda x: pj(x) * pk(x) * np.exp(-x * x / 4), -40, 40, epsabs=1e-10, limit=400, points=[-20, -10, -5, 0, 5, 10, 20]
    )
    assert abs(val) <= 1e-8


def brute_force_harmonic_dim(k, m):
    nvar = k + 1
    if m < 2:
        return 1 if m == 0 else nvar
    source = list(combinations_with_replacement(range(nvar), m))
    target = {mono: i for i, mono in enumerate(combinations_with_replacement(range(nvar), m - 2))}
    mat = np.zeros((len(target), len(source)))
    for col, mono in enumerate(source):
        powers = [mono.count(v) for v in range(nvar)]
        for v in range(nvar):
            p = powers[v]
            if p >= 2:
                reduced = powers.copy()
                reduced[v] -= 2
                key = tuple(sorted(sum(([u] * reduced[u] for u in range(nvar)), [])))
                mat[target[key], col] += p * (p - 1)
    return len(source) - np.linalg.matrix_rank(mat)


@pytest.mark.parametrize("k", range(1, 5))
@pytest.mark.parametrize("m", range(7))
def test_harmonic_dim_brute_force(k, m):
    assert harmonic_dim(k, m) == brute_force_harmonic_dim(k, m)


@pytest.mark.parametrize("k, m, expected", [(1, 5, 2), (2, 1, 3), (2, 0, 1), (2, 2, 5)])
def test_harmonic_dim_examples(k, m, expected):
    assert harmonic_dim(k, m) == expected


@given(st.integers(1, 200), st.integers(1, 200))
def test_harmonic_dim_families(k, m):
    assert harmonic_dim(1, m) == 2
    assert harmonic_dim(k, 1) == k + 1


def test_harmonic_dim_needs_sphere():
    with pytest.raises(DomainError):
        harmonic_dim(0, 2)
