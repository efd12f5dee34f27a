import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hecke_shuffle.errors import PoleAt
from hecke_shuffle.numberfield import make_field, unit_lattice
from hecke_shuffle.special import complex_gamma, gamma_K, gamma_ratio

mp.mp.dps = 30


def rel(a, b):
    return abs(a - b) / abs(b)


def test_classical_values():
    assert complex_gamma(1) == pytest.approx(1, abs=1e-15)
    assert complex_gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)
    assert complex_gamma(5) == pytest.approx(24, rel=1e-14)


def test_against_mpmath_at_3_plus_4i():
    ref = complex(mp.gamma(mp.mpc(3, 4)))
    assert rel(complex_gamma(3 + 4j), ref) < 1e-13


@pytest.mark.parametrize("s", [0.1 + 0.1j, -2.5 + 0.3j, -7.3 - 11j, 12 + 30j, 0.5 - 45j, -0.999 + 0j, 25.5])
def test_against_mpmath_grid(s):
    assert rel(complex_gamma(s), complex(mp.gamma(s))) < 1e-12


def test_vectorized_matches_scalar():
    s = np.array([0.3 + 1j, -1.5 + 2j, 4 - 3j])
    v = complex_gamma(s)
    assert v.shape == (3,)
    for a, b in zip(v, s):
        assert a == complex_gamma(complex(b))


@pytest.mark.parametrize("n", [0, -1, -5])
def test_poles_raise(n):
    with pytest.raises(PoleAt) as info:
        complex_gamma(n + 1e-14)
    assert info.value.n == n


finite = st.complex_numbers(min_magnitude=0, max_magnitude=20, allow_nan=False, allow_infinity=False)


def _off_poles(s):
    return not (s.real <= 0.5 and abs(s - round(s.real)) < 1e-3)


@settings(max_examples=200, deadline=None)
@given(finite.filter(_off_poles))
def test_recurrence(s):
    if not _off_poles(s + 1):
        return
    lhs = complex_gamma(s + 1)
    rhs = s * complex_gamma(s)
    assert abs(lhs - rhs) <= 1e-11 * max(abs(lhs), 1e-300)


@settings(max_examples=200, deadline=None)
@given(finite.filter(_off_poles))
def test_conjugation_symmetry(s):
    assert complex_gamma(s.conjugate()) == complex_gamma(s).conjugate()


@settings(max_examples=100, deadline=None)
@given(st.floats(0.6, 20), st.floats(-30, 30), st.floats(0.6, 20), st.floats(-30, 30))
def test_gamma_ratio_matches_quotient(a, b, c, d):
    x, y = complex(a, b), complex(c, d)
    ref = complex(mp.gamma(x) / mp.gamma(y))
    assert rel(gamma_ratio(x, y), ref) < 1e-11


def test_gamma_K_specializations():
    Q = make_field(0)
    assert gamma_K(Q, unit_lattice(Q), (), 3.2 + 1j) == complex_gamma((3.2 + 1j) / 2)
    Qi = make_field(-1)
    assert gamma_K(Qi, unit_lattice(Qi), (), 1.7 - 2j) == complex_gamma(1.7 - 2j)


def test_gamma_K_real_quadratic_with_character():
    K = make_field(2)
    L = unit_lattice(K)
    c = L.lam_vee((1,))
    assert c[0] == pytest.approx(-c[1])
    expected = complex_gamma(1 + math.pi * 1j * c[0]) * complex_gamma(1 + math.pi * 1j * c[1])
    assert rel(gamma_K(K, L, (1,), 2), expected) < 1e-15
    ref = complex(mp.gamma(1 + mp.pi * 1j * c[0]) * mp.gamma(1 - mp.pi * 1j * c[0]))
    assert rel(gamma_K(K, L, (1,), 2), ref) < 1e-12


def test_gamma_K_checks_length():
    K = make_field(2)
    with pytest.raises(ValueError):
        gamma_K(K, unit_lattice(K), (), 2)
