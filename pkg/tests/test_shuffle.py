import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hecke_shuffle.lfunction import Kernel, SpectralPoint, TruncationPolicy
from hecke_shuffle.numberfield import make_field, unit_lattice
from hecke_shuffle.shuffle import (
    FunctionEvaluator,
    Permutation,
    Unit,
    all_permutations,
    ch_symmetrization,
    decompose,
    enumerate_shuffles,
    inversion_set,
    is_shuffle,
    iterated_shuffle,
    make_generator,
    negate,
    parse_expression,
    parse_permutation,
    phi_w,
    shuffle_product,
)


def perms(n):
    return st.permutations(list(range(1, n + 1))).map(lambda p: Permutation(tuple(p)))


sized = st.integers(1, 7).flatmap(lambda n: st.tuples(perms(n), perms(n), perms(n)))


@settings(max_examples=200)
@given(sized)
def test_group_laws(t):
    a, b, c = t
    e = Permutation.identity(a.n)
    assert (a * b) * c == a * (b * c)
    assert a * e == a == e * a
    assert a * a.inverse() == e
    assert (a * b).inverse() == b.inverse() * a.inverse()


@settings(max_examples=200)
@given(sized)
def test_action_is_a_left_action(t):
    a, b, _ = t
    seq = tuple(range(10, 10 + a.n))
    assert (a * b).act(seq) == a.act(b.act(seq))
    assert a.act(seq)[a(1) - 1] == seq[0]


@settings(max_examples=200)
@given(sized)
def test_inversion_set_bruteforce_and_length_subadditivity(t):
    a, b, _ = t
    brute = {(i, j) for i in range(1, a.n + 1) for j in range(i + 1, a.n + 1) if a(i) > a(j)}
    assert inversion_set(a) == brute
    assert (a * b).length() <= a.length() + b.length()
    assert a.inverse().length() == a.length()


def test_inversion_examples():
    assert inversion_set(Permutation.identity(3)) == set()
    assert inversion_set(Permutation((2, 1))) == {(1, 2)}
    assert inversion_set(Permutation((3, 2, 1))) == {(1, 2), (1, 3), (2, 3)}


def test_cycles_and_parsing():
    w = Permutation.from_cycles(3, (1, 2, 3))
    assert w.images == (2, 3, 1)
    assert w.cycle_string() == "(1 2 3)"
    assert parse_permutation("2,3,1") == w == parse_permutation("[2 3 1]")
    with pytest.raises(ValueError):
        Permutation((1, 1, 2))


def test_sh21_matches_listed_cycles():
    cycles = [w.cycle_string() for w in enumerate_shuffles(2, 1)]
    assert cycles == ["id", "(2 3)", "(1 2 3)"]


@pytest.mark.parametrize("m,n", [(m, n) for m in range(5) for n in range(5)])
def test_shuffle_count_and_filter(m, n):
    sh = enumerate_shuffles(m, n)
    assert len(sh) == math.comb(m + n, m)
    brute = [w for w in all_permutations(m + n) if is_shuffle(w, m)]
    assert sorted(brute) == sh
    assert sh == sorted(sh)


def test_trivial_blocks():
    assert enumerate_shuffles(3, 0) == [Permutation.identity(3)]


def test_decompose_examples():
    e = Permutation.identity(3)
    assert decompose(e, 2, 1) == (Permutation.identity(2), Permutation.identity(1), e)
    w1, w2, w = decompose(Permutation((2, 1)), 1, 1)
    assert w1.is_identity() and w2.is_identity() and w == Permutation((2, 1))


def test_decompose_is_a_bijection_for_s4():
    seen = set()
    for a in all_permutations(2):
        for b in all_permutations(2):
            for w in enumerate_shuffles(2, 2):
                sigma = a.cross(b) * w.inverse()
                seen.add(sigma)
                assert decompose(sigma, 2, 2) == (a, b, w.inverse())
    assert len(seen) == 24


@pytest.mark.parametrize("m,n", [(1, 2), (2, 2), (3, 2), (2, 3)])
def test_inversion_additivity_setwise(m, n):
    # I_sigma is the disjoint union of I_w and w^-1 applied to the block inversions
    for sigma in all_permutations(m + n):
        a, b, w = decompose(sigma, m, n)
        block = inversion_set(a.cross(b))
        pulled = {tuple(sorted((w.inverse()(i), w.inverse()(j)))) for i, j in block}
        assert inversion_set(sigma) == inversion_set(w) | pulled
        assert not inversion_set(w) & pulled


# --------------------------------------------------------------------------
# kernels


@pytest.fixture(scope="module")
def kQ():
    K = make_field(0)
    return Kernel(K, unit_lattice(K))


def pts(*s):
    return tuple(SpectralPoint((), x) for x in s)


def test_phi_w_identity_and_transposition(kQ):
    z = pts(0.3 + 1j, 1.9 - 0.5j)
    assert phi_w(kQ, Permutation.identity(2), z) == 1
    assert phi_w(kQ, Permutation((2, 1)), z) == kQ((), z[1].s - z[0].s)


def test_phi_w_longest_is_product(kQ):
    z = pts(0.1, 0.7 + 1j, -0.4 + 2j)
    expected = kQ((), z[1].s - z[0].s) * kQ((), z[2].s - z[0].s) * kQ((), z[2].s - z[1].s)
    assert phi_w(kQ, Permutation((3, 2, 1)), z) == pytest.approx(expected, rel=1e-15)


def test_phi_and_inverse_relation(kQ):
    rng = np.random.default_rng(0)
    for _ in range(20):
        z = pts(*(rng.uniform(-1.5, 1.5, 3) + 1j * rng.uniform(-2, 2, 3)))
        for w in all_permutations(3):
            a = phi_w(kQ, w, z)
            b = phi_w(kQ, w.inverse(), negate(w.act(z)))
            assert abs(a - b) <= 1e-9 * abs(b)


def test_cocycle_small(kQ):
    rng = np.random.default_rng(1)
    z = pts(*(rng.uniform(-1.5, 1.5, 3) + 1j * rng.uniform(-2, 2, 3)))
    for w, v in itertools.product(all_permutations(3), repeat=2):
        lhs = phi_w(kQ, v, w.act(z)) * phi_w(kQ, w, z)
        assert abs(lhs - phi_w(kQ, v * w, z)) <= 1e-10 * abs(lhs)


def test_pole_is_reported_with_pair(kQ):
    from hecke_shuffle.errors import PreconditionError

    z = pts(0.5, 0.5 + 1e-15)
    with pytest.raises(PreconditionError) as info:
        phi_w(kQ, Permutation((2, 1)), z)
    assert "pair (1, 2)" in str(info.value)


# --------------------------------------------------------------------------
# shuffle algebra


def test_unit_is_identity(kQ):
    g = make_generator(1)
    assert shuffle_product(Unit(), g, kQ) is g
    assert shuffle_product(g, Unit(), kQ) is g
    assert iterated_shuffle([], kQ)(()) == 1


def test_two_term_expansion(kQ):
    F, G = make_generator(1), make_generator(2)
    z = pts(0.3 + 0.5j, 1.1 - 0.2j)
    expected = F(z[0]) * G(z[1]) + F(z[1]) * G(z[0]) * kQ((), z[1].s - z[0].s)
    assert shuffle_product(F, G, kQ)(z) == pytest.approx(expected, rel=1e-14)


def test_function_evaluator_shuffle(kQ):
    F = FunctionEvaluator(1, lambda z: z[0].s, "id")
    G = FunctionEvaluator(1, lambda z: 1.0, "one")
    z = pts(2.0, 3.5)
    expected = 2.0 + 3.5 * kQ((), 1.5)
    assert shuffle_product(F, G, kQ)(z) == pytest.approx(expected)


def test_associativity_over_Q(kQ):
    rng = np.random.default_rng(5)
    F, G, H = make_generator(1), make_generator(2, 2), make_generator(3)
    left = shuffle_product(shuffle_product(F, G, kQ), H, kQ)
    right = shuffle_product(F, shuffle_product(G, H, kQ), kQ)
    for _ in range(5):
        z = pts(*(rng.uniform(-1.5, 1.5, 4) + 1j * rng.uniform(-2, 2, 4)))
        assert abs(left(z) - right(z)) <= 1e-10 * abs(right(z))


def test_ch_symmetrization_matches_iterated(kQ):
    gens = [make_generator(k) for k in (1, 2, 3)]
    z = pts(0.2 + 0.1j, -0.9 + 1.3j, 1.4 - 0.8j)
    assert ch_symmetrization(gens[:1], z[:1], kQ) == gens[0](z[0])
    two = ch_symmetrization(gens[:2], z[:2], kQ)
    assert two == pytest.approx(shuffle_product(gens[0], gens[1], kQ)(z[:2]), rel=1e-14)
    three = ch_symmetrization(gens, z, kQ)
    assert three == pytest.approx(iterated_shuffle(gens, kQ)(z), rel=1e-12)


def test_associativity_with_characters():
    K = make_field(2)
    ker = Kernel(K, unit_lattice(K), TruncationPolicy(tail_tolerance=math.inf))
    F, G, H = make_generator(1), make_generator(2), make_generator(3)
    left = shuffle_product(shuffle_product(F, G, ker), H, ker)
    right = shuffle_product(F, shuffle_product(G, H, ker), ker)
    z = (SpectralPoint((1,), 0.1 + 0.3j), SpectralPoint((-1,), 1.7 - 1j), SpectralPoint((0,), 3.4 + 0.5j))
    assert abs(left(z) - right(z)) <= 1e-10 * abs(right(z))


def test_expression_text_roundtrip(kQ):
    expr = shuffle_product(shuffle_product(make_generator(1), make_generator(4, 2), kQ), make_generator(2), kQ)
    text = expr.text()
    assert text == "shuffle(shuffle(gen:g1, gen:h4), gen:g2)"
    back = parse_expression(text, kQ)
    assert back.text() == text
    z = pts(0.1, 0.5 + 1j, -0.3 + 0.2j, 1.2)
    assert back(z) == expr(z)
    with pytest.raises(ValueError):
        parse_expression("shuffle(gen:g1 gen:g2)", kQ)


def test_generators_are_seeded():
    assert make_generator(3, seed=1) == make_generator(3, seed=1)
    assert make_generator(3, seed=1) != make_generator(3, seed=2)
