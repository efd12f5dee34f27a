import math

import mpmath as mp
import numpy as np
import pytest

from hecke_shuffle import harmonic as hm
from hecke_shuffle import intertwiner as it
from hecke_shuffle.errors import PreconditionViolated
from hecke_shuffle.lfunction import Kernel, SpectralPoint, TruncationPolicy, phi_K
from hecke_shuffle.numberfield import PrimeIdeal, make_field, prime_ideals_up_to, unit_lattice
from hecke_shuffle.shuffle import Permutation, phi_w

LOOSE = TruncationPolicy(tail_tolerance=math.inf)


def field(d):
    K = make_field(d)
    return K, unit_lattice(K)


def test_real_closed_values():
    assert it.real_local_closed(0, 1) == pytest.approx(math.pi, rel=1e-14)
    assert it.real_local_closed(0, 2) == pytest.approx(2.0, rel=1e-14)


@pytest.mark.parametrize("lam,sd", [(0.3, 1.7), (-0.8, 0.6 + 2j), (0.0, 3.1)])
def test_real_closed_vs_quadrature(lam, sd):
    q = it.real_local_quadrature(1, 1, it.real_exponent(lam, sd))
    assert abs(q.value - it.real_local_closed(lam, sd)) <= 1e-6 * abs(q.value)


def test_real_integral_examples():
    assert it.real_local_quadrature(1, 1, -1).value == pytest.approx(math.pi, rel=1e-9)
    for a, b, e in [(2, 3, -0.8), (1, 1, -0.6 - 0.4j)]:
        q = it.real_local_quadrature(a, b, e).value
        assert abs(q - it.real_integral_closed(a, b, e)) <= 1e-6 * abs(q)


def test_real_integral_against_mpmath():
    # x = tan t keeps the slowly decaying tail on a finite interval
    with mp.workdps(30):
        e = mp.mpc(-0.7, 0.3)
        ref = complex(mp.quad(lambda t: (2 * mp.tan(t) ** 2 + 1) ** e / mp.cos(t) ** 2, [-mp.pi / 2, 0, mp.pi / 2]))
    assert abs(it.real_integral_closed(2, 1, complex(e)) - ref) < 1e-10 * abs(ref)


def test_complex_closed_values():
    assert it.complex_local_closed(0, 1) == pytest.approx(math.pi, rel=1e-14)
    assert it.complex_local_closed(0, 2) == pytest.approx(math.pi / 2, rel=1e-14)


def test_complex_closed_vs_polar_quadrature():
    lam, sd = 0.5, 1.3
    e = it.complex_exponent(lam, sd)
    q = it.complex_local_quadrature(1, 1, e).value
    assert abs(q - it.complex_local_closed(lam, sd)) <= 1e-6 * abs(q)
    # independent polar oracle: 2 pi int_0^inf r (r^2 + 1)^e dr
    with mp.workdps(30):
        ref = complex(2 * mp.pi * mp.quad(lambda r: r * (r * r + 1) ** e, [0, mp.inf]))
    assert abs(q - ref) <= 1e-8 * abs(ref)


@pytest.mark.parametrize("s", [1.5, 2.0 + 1j, 0.4 - 3j])
def test_padic_over_Q(s):
    P = prime_ideals_up_to(make_field(0), 2)[0]
    expected = (2 ** (s + 1) - 1) / (2 ** (s + 1) - 2)
    assert abs(it.padic_local_closed(P, np.zeros(1), s) - expected) < 1e-14


def test_padic_partial_sum_J60():
    K, L = field(2)
    P = prime_ideals_up_to(K, 7)[1]
    vee = L.lam_vee((1,))
    part = it.padic_local_partial_sum(P, vee, 1.5, J=60)
    assert abs(part.value - it.padic_local_closed(P, vee, 1.5)) < 1e-10


def test_padic_unit_invariance():
    K, L = field(5)
    eps = L.unit.value
    vee = L.lam_vee((2,))
    for P in prime_ideals_up_to(K, 50):
        moved = PrimeIdeal(P.norm, (P.magnitudes[0] * eps**3, P.magnitudes[1] / eps**3), P.p, P.f)
        assert abs(it.padic_local_closed(P, vee, 0.8 + 1j) - it.padic_local_closed(moved, vee, 0.8 + 1j)) < 1e-12


def test_assembly_over_Q_is_phi():
    K, L = field(0)
    z1, z2 = SpectralPoint((), 0.3 + 1j), SpectralPoint((), 2.4 + 0.5j)
    a = it.assemble_rank2(K, L, z1, z2, LOOSE)
    p = phi_K(K, L, SpectralPoint((), z2.s - z1.s))
    assert abs(a.value - p.value) <= a.error + p.error


@pytest.mark.parametrize("d", [-1, 2])
def test_assembly_ratio_constant(d):
    K, L = field(d)
    same = TruncationPolicy(tail_tolerance=math.inf, prefer_continuation=False)
    ratios = []
    for k in range(5):
        lam = (k % 2,) * L.rank
        z1 = SpectralPoint((0,) * L.rank, 0.1 * k - 0.2j)
        z2 = SpectralPoint(lam, 2.4 + 0.1 * k + 0.3j * k)
        a = it.assemble_rank2(K, L, z1, z2, LOOSE).value
        p = phi_K(K, L, SpectralPoint(lam, z2.s - z1.s), same).value
        ratios.append(a / p)
    np.testing.assert_allclose(ratios, ratios[0], rtol=1e-10)
    assert ratios[0] == pytest.approx(1.0, abs=1e-10)


def test_assembly_literal_constant_is_inverse_root_discriminant():
    K, L = field(-1)
    z1, z2 = SpectralPoint((), 0), SpectralPoint((), 2.5)
    a = it.assemble_rank2(K, L, z1, z2, LOOSE).value
    p = phi_K(K, L, SpectralPoint((), 2.5), TruncationPolicy(tail_tolerance=math.inf, prefer_continuation=False, include_discriminant=False)).value
    assert a / p == pytest.approx(0.5, rel=1e-10)


def test_assembly_domain():
    K, L = field(0)
    with pytest.raises(PreconditionViolated):
        it.assemble_rank2(K, L, SpectralPoint((), 0), SpectralPoint((), 0.5))


@pytest.fixture(scope="module")
def kQ():
    K, L = field(0)
    return Kernel(K, L, LOOSE)


def test_mw_identity(kQ):
    r = it.mw_character(kQ, Permutation.identity(3), [(), (), ()], [0.1, 0.5, 2])
    assert r.kernel == 1 and r.s == (0.1, 0.5, 2) and r.factors == ()


def test_mw_transposition_matches_assembly(kQ):
    K, L = field(0)
    r = it.mw_character(kQ, Permutation((2, 1)), [(), ()], [0.2, 2.6 + 1j])
    a = it.assemble_rank2(K, L, SpectralPoint((), 0.2), SpectralPoint((), 2.6 + 1j), LOOSE)
    assert r.s == (2.6 + 1j, 0.2)
    assert abs(r.kernel - a.value) <= a.error + 1e-12


@pytest.mark.parametrize("d", [0, 2])
def test_mw_recursion_vs_direct(d):
    K, L = field(d)
    ker = Kernel(K, L, LOOSE)
    lam = [(0,) * L.rank, (1,) * L.rank, (-1,) * L.rank]
    s = [0.1 + 0.2j, 1.5 - 1j, 2.9 + 0.5j]
    z = [SpectralPoint(l, x) for l, x in zip(lam, s)]
    w = Permutation((3, 2, 1))
    r = it.mw_character(ker, w, lam, s)
    direct = phi_w(ker, w.inverse(), z)
    assert abs(r.kernel - direct) <= 1e-10 * abs(direct)
    key = lambda f: (f[0], f[1].real, f[1].imag)
    assert sorted(r.factors, key=key) == sorted(it.direct_kernel_factors(w, z), key=key)


def test_mw_domain_check(kQ):
    with pytest.raises(PreconditionViolated):
        it.mw_character(kQ, Permutation((2, 1)), [(), ()], [0.0, 0.5])


def test_fourier_identity(kQ):
    space = hm.BSpace.of(make_field(0))
    phi = hm.BumpCombination.tensor(hm.TestBump(hm.BPoint((1.2,)), 0.4), hm.TestBump(hm.BPoint((0.8,)), 0.5))
    assert it.fourier_intertwiner_identity_check(space, kQ, phi, Permutation((1, 2)), [(), ()], (0.3, -0.2)) == 0
    res = it.fourier_intertwiner_identity_check(space, kQ, phi, Permutation((2, 1)), [(), ()], (0.7, -1.1))
    assert res <= 1e-4
