"""Verification suites: each returns a list of named checks with residuals."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import harmonic as hm
from . import intertwiner as it
from .lfunction import Kernel, SpectralPoint, TruncationPolicy, is_paley_wiener_bounded, l_dirichlet, l_euler, l_star, phi_K
from .numberfield import NumberField, make_field, prime_ideals_up_to, unit_lattice
from .shuffle import (
    Permutation,
    all_permutations,
    ch_symmetrization,
    decompose,
    enumerate_shuffles,
    inversion_set,
    iterated_shuffle,
    make_generator,
    phi_w,
    shuffle_product,
)


@dataclass
class Check:
    suite: str
    name: str
    passed: bool
    residual: float
    threshold: float
    detail: dict = field(default_factory=dict)


@dataclass(frozen=True)
class VerifyConfig:
    d: int = 0
    X: int = 10_000
    seed: int = 42
    n: int | None = None
    tol: float | None = None
    cache_dir: str | None = None
    real_whitelist: frozenset[int] | None = None

    def field(self) -> NumberField:
        return make_field(self.d, real_whitelist=self.real_whitelist)

    def policy(self, **kw) -> TruncationPolicy:
        return TruncationPolicy(X=self.X, cache_dir=self.cache_dir, **kw)

    def rng(self, suite: str) -> np.random.Generator:
        # one stream per suite so suites are independent of run order
        return np.random.default_rng([self.seed, sum(map(ord, suite))])


def _rel(a: complex, b: complex) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


def generic_points(
    rng: np.random.Generator,
    n: int,
    rank: int,
    *,
    re: tuple[float, float] = (-1.5, 1.5),
    im: tuple[float, float] = (-2.0, 2.0),
    lam_bound: int = 0,
    guard: float = 1e-3,
    increasing_gap: float | None = None,
) -> tuple[SpectralPoint, ...]:
    """Random points whose pairwise s-differences avoid {0, +-1} by ``guard``.

    With ``increasing_gap`` the real parts step up by at least ``gap - 0.3``;
    a gap above 1.3 puts every forward difference inside the Euler half-plane.
    """
    while True:
        if increasing_gap is not None:
            # jitter of 0.3 keeps every forward step above gap - 0.3
            s = rng.uniform(0.0, 0.3, n) + np.arange(n) * increasing_gap + 1j * rng.uniform(*im, n)
        else:
            s = rng.uniform(*re, n) + 1j * rng.uniform(*im, n)
        lam = rng.integers(-lam_bound, lam_bound + 1, (n, rank))
        ok = all(
            min(abs(s[i] - s[j] - k) for k in (-1, 0, 1)) > guard
            for i in range(n)
            for j in range(i + 1, n)
        )
        if ok:
            return tuple(SpectralPoint(tuple(int(v) for v in lam[i]), complex(s[i])) for i in range(n))


# --------------------------------------------------------------------------
# Combinatorics


def suite_bijection(cfg: VerifyConfig) -> list[Check]:
    top = cfg.n or 7
    out = []
    for total in range(1, top + 1):
        hits: dict[tuple[int, ...], int] = {}
        roundtrip = True
        for m in range(total + 1):
            n = total - m
            sh = enumerate_shuffles(m, n)
            sh_set = set(sh)
            shuffles = [w.inverse() for w in sh]
            for a in all_permutations(m):
                for b in all_permutations(n):
                    for w in shuffles:
                        sigma = a.cross(b) * w
                        hits[sigma.images] = hits.get(sigma.images, 0) + 1
            for sigma in all_permutations(total):
                w1, w2, w = decompose(sigma, m, n)
                if w1.cross(w2) * w != sigma or w.inverse() not in sh_set:
                    roundtrip = False
        expected = math.factorial(total) * (total + 1)
        collisions = sum(v - (total + 1) for v in hits.values() if v > total + 1)
        covered = len(hits) == math.factorial(total) and all(v == total + 1 for v in hits.values())
        out.append(Check(
            "bijection", f"m+n={total}", covered and roundtrip, float(collisions), 0.0,
            {"hits": sum(hits.values()), "expected": expected, "collisions": collisions,
             "distinct": len(hits), "decompose_roundtrip": roundtrip},
        ))
    return out


def suite_inversion(cfg: VerifyConfig) -> list[Check]:
    top = min(cfg.n or 6, 6)
    out = []
    for total in range(1, top + 1):
        bad = 0
        count = 0
        for m in range(total + 1):
            n = total - m
            shuffles = [w.inverse() for w in enumerate_shuffles(m, n)]
            for a in all_permutations(m):
                for b in all_permutations(n):
                    block = a.cross(b)
                    Ib = inversion_set(block)
                    for w in shuffles:
                        Iw = inversion_set(w)
                        Itot = inversion_set(block * w)
                        # w^-1 is increasing on blocks, so pulled-back pairs keep i < j
                        winv = w.inverse()
                        pulled = {(winv(i), winv(j)) for i, j in Ib}
                        count += 1
                        if len(Itot) != len(Ib) + len(Iw) or Itot != pulled | Iw or pulled & Iw:
                            bad += 1
        out.append(Check("inversion", f"m+n={total}", bad == 0, float(bad), 0.0, {"triples": count}))
    return out


# --------------------------------------------------------------------------
# Kernels and shuffle algebra


def suite_cocycle(cfg: VerifyConfig) -> list[Check]:
    field_ = cfg.field()
    kernel = Kernel(field_, unit_lattice(field_), cfg.policy())
    rng = cfg.rng("cocycle")
    tol = cfg.tol or 1e-9
    out = []
    for n in range(1, (cfg.n or 4) + 1):
        perms = list(all_permutations(n))
        worst = 0.0
        for _ in range(10):
            z = generic_points(rng, n, kernel.rank)
            for w in perms:
                wz = w.act(z)
                base = phi_w(kernel, w, z)
                for v in perms:
                    worst = max(worst, _rel(phi_w(kernel, v, wz) * base, phi_w(kernel, v * w, z)))
        out.append(Check("cocycle", f"n={n}", worst <= tol, worst, tol, {"pairs": len(perms) ** 2, "points": 10}))
    # inverse relation, pure reindexing
    worst = 0.0
    for _ in range(20):
        z = generic_points(rng, 3, kernel.rank)
        for w in all_permutations(3):
            from .shuffle import negate

            worst = max(worst, _rel(phi_w(kernel, w, z), phi_w(kernel, w.inverse(), negate(w.act(z)))))
    out.append(Check("cocycle", "phi-and-inverse n=3", worst <= tol, worst, tol))
    return out


ASSOC_ARITIES = [(1, 1, 1), (2, 1, 1), (1, 2, 1), (1, 1, 2), (2, 2, 1)]


def _generator(arity: int, index: int, seed: int):
    return make_generator(index, arity, seed)


def suite_assoc(cfg: VerifyConfig) -> list[Check]:
    field_ = cfg.field()
    lattice = unit_lattice(field_)
    rng = cfg.rng("assoc")
    tol = cfg.tol or 1e-8
    out = []
    modes = [("lambda=0", 0, None)]
    if lattice.rank:
        modes.append(("lambda!=0", 1, 1.5))
    for label, lam_bound, gap in modes:
        policy = cfg.policy() if gap is None else cfg.policy(tail_tolerance=math.inf)
        kernel = Kernel(field_, lattice, policy)
        for arities in ASSOC_ARITIES:
            F, G, H = (_generator(a, i + 1, cfg.seed) for i, a in enumerate(arities))
            left = shuffle_product(shuffle_product(F, G, kernel), H, kernel)
            right = shuffle_product(F, shuffle_product(G, H, kernel), kernel)
            worst = 0.0
            for _ in range(10):
                z = generic_points(rng, sum(arities), lattice.rank, lam_bound=lam_bound, increasing_gap=gap)
                worst = max(worst, _rel(left(z), right(z)))
            out.append(Check("assoc", f"{label} arities={arities}", worst <= tol, worst, tol))
        for n in (1, 2, 3):
            gens = [_generator(1, i + 1, cfg.seed) for i in range(n)]
            prod = iterated_shuffle(gens, kernel)
            worst = 0.0
            for _ in range(5):
                z = generic_points(rng, n, lattice.rank, lam_bound=lam_bound, increasing_gap=gap)
                worst = max(worst, _rel(ch_symmetrization(gens, z, kernel), prod(z)))
            out.append(Check("assoc", f"{label} ch-vs-iterated n={n}", worst <= tol, worst, tol))
    return out


# --------------------------------------------------------------------------
# L-functions


def suite_euler(cfg: VerifyConfig) -> list[Check]:
    field_ = cfg.field()
    lattice = unit_lattice(field_)
    policy = cfg.policy(tail_tolerance=math.inf, prefer_continuation=False)
    rng = cfg.rng("euler")
    worst_margin = -math.inf
    for _ in range(50):
        s = complex(rng.uniform(1.5, 4), rng.uniform(-10, 10))
        lam = tuple(int(v) for v in rng.integers(-2, 3, lattice.rank))
        z = SpectralPoint(lam, s)
        a = l_euler(field_, lattice, z, policy)
        b = l_dirichlet(field_, lattice, z, policy)
        worst_margin = max(worst_margin, abs(a.value - b.value) / (a.error + b.error))
    return [Check("euler", f"{field_.name} euler-vs-dirichlet", worst_margin <= 1.0, worst_margin, 1.0, {"points": 50, "X": cfg.X})]


def suite_functional(cfg: VerifyConfig) -> list[Check]:
    field_ = cfg.field()
    lattice = unit_lattice(field_)
    policy = cfg.policy()
    rng = cfg.rng("functional")
    tol = cfg.tol or 1e-7
    lam0 = (0,) * lattice.rank
    worst = 0.0
    for _ in range(20):
        s = complex(rng.uniform(-0.4, 1.4), rng.uniform(-15, 15))
        a = l_star(field_, lattice, SpectralPoint(lam0, s), policy).value
        b = l_star(field_, lattice, SpectralPoint(lam0, 1 - s), policy).value
        worst = max(worst, abs(a - b))
    out = [Check("functional", f"{field_.name} L*(s)=L*(1-s)", worst <= tol, worst, tol, {"points": 20})]
    worst = 0.0
    for _ in range(20):
        s = complex(rng.uniform(-2.5, 2.5), rng.uniform(-6, 6))
        if min(abs(s - k) for k in (-1, 0, 1)) < 1e-3:
            continue
        p = phi_K(field_, lattice, SpectralPoint(lam0, s), policy).value
        q = phi_K(field_, lattice, SpectralPoint(lam0, -s), policy).value
        worst = max(worst, abs(p * q - 1))
    out.append(Check("functional", f"{field_.name} Phi(s)Phi(-s)=1", worst <= 1e-8, worst, 1e-8))
    return out


# --------------------------------------------------------------------------
# Local factors and assembly


def suite_local(cfg: VerifyConfig) -> list[Check]:
    field_ = cfg.field()
    rng = cfg.rng("local")
    tol_arch = 1e-6
    worst_r = worst_c = worst_p = 0.0
    for _ in range(20):
        lam = rng.uniform(-1, 1)
        sd = complex(rng.uniform(0.3, 4), rng.uniform(-3, 3))
        worst_r = max(worst_r, _rel(it.real_local_quadrature(1, 1, it.real_exponent(lam, sd)).value, it.real_local_closed(lam, sd)))
        worst_c = max(worst_c, _rel(it.complex_local_quadrature(1, 1, it.complex_exponent(lam, sd)).value, it.complex_local_closed(lam, sd)))
    primes = prime_ideals_up_to(field_, 200, cache_dir=cfg.cache_dir)
    lattice = unit_lattice(field_)
    for _ in range(20):
        P = primes[int(rng.integers(len(primes)))]
        lam = tuple(int(v) for v in rng.integers(-3, 4, lattice.rank))
        sd = complex(rng.uniform(0.5, 3), rng.uniform(-5, 5))
        vee = lattice.lam_vee(lam)
        closed = it.padic_local_closed(P, vee, sd)
        part = it.padic_local_partial_sum(P, vee, sd, tol=1e-14)
        worst_p = max(worst_p, abs(part.value - closed))
    return [
        Check("local", "real place vs quadrature", worst_r <= tol_arch, worst_r, tol_arch, {"draws": 20}),
        Check("local", "complex place vs quadrature", worst_c <= tol_arch, worst_c, tol_arch, {"draws": 20}),
        Check("local", f"{field_.name} p-adic vs partial sum", worst_p <= 1e-10, worst_p, 1e-10, {"draws": 20}),
    ]


def suite_assembly(cfg: VerifyConfig) -> list[Check]:
    field_ = cfg.field()
    lattice = unit_lattice(field_)
    rng = cfg.rng("assembly")
    loose = cfg.policy(tail_tolerance=math.inf)
    same_trunc = cfg.policy(tail_tolerance=math.inf, prefer_continuation=False)
    lam_bound = 1 if lattice.rank else 0
    ratios = []
    margin = 0.0
    for _ in range(10):
        s1 = complex(rng.uniform(-1, 1), rng.uniform(-2, 2))
        sd = complex(rng.uniform(1.2, 3), rng.uniform(-3, 3))
        l1 = tuple(int(v) for v in rng.integers(-lam_bound, lam_bound + 1, lattice.rank))
        l2 = tuple(int(v) for v in rng.integers(-lam_bound, lam_bound + 1, lattice.rank))
        z1, z2 = SpectralPoint(l1, s1), SpectralPoint(l2, s1 + sd)
        a = it.assemble_rank2(field_, lattice, z1, z2, loose)
        diff = tuple(x - y for x, y in zip(l2, l1))
        p = phi_K(field_, lattice, SpectralPoint(diff, sd), same_trunc)
        ratios.append(a.value / p.value)
        if not any(diff):
            exact = phi_K(field_, lattice, SpectralPoint(diff, sd), loose)
            margin = max(margin, abs(a.value - exact.value) / (a.error + exact.error))
    ratios = np.array(ratios)
    spread = float(np.max(np.abs(ratios / ratios[0] - 1)))
    const = complex(ratios[0])
    return [
        Check("assembly", f"{field_.name} assembly/Phi constant", spread <= 1e-6, spread, 1e-6,
              {"ratio": [round(const.real, 12), round(const.imag, 12)],
               "disc^-1/2": round(1 / math.sqrt(abs(field_.discriminant)), 12)}),
        Check("assembly", f"{field_.name} assembly vs continued Phi within tail", margin <= 1.0, margin, 1.0),
    ]


# --------------------------------------------------------------------------
# Harmonic analysis


def seeded_bumps(space: hm.BSpace, rng: np.random.Generator, count: int) -> list[hm.TestBump]:
    out = []
    for _ in range(count):
        y0 = rng.uniform(-0.5, 0.5)
        theta0 = rng.uniform(0, 1, space.rank)
        x = space.from_log_coordinates(theta0, y0)
        mode = (1,) * space.rank
        out.append(hm.TestBump(hm.BPoint(tuple(np.exp(x))), float(rng.uniform(0.3, 0.6)), mode, float(rng.uniform(0.5, 1.0))))
    return out


def interior_points(space: hm.BSpace, bump: hm.TestBump, rng: np.random.Generator, count: int) -> list[hm.BPoint]:
    _, y0 = bump.profile(space)
    pts = []
    for _ in range(count):
        y = y0 + bump.log_width * rng.uniform(-3, 3)
        theta = rng.uniform(0, 1, space.rank)
        pts.append(hm.BPoint(tuple(np.exp(space.from_log_coordinates(theta, y)))))
    return pts


def suite_roundtrip(cfg: VerifyConfig) -> list[Check]:
    field_ = cfg.field()
    space = hm.BSpace.of(field_)
    rng = cfg.rng("roundtrip")
    tol = cfg.tol or (1e-4 if space.rank == 0 else 1e-3)
    icfg = hm.InverseTransformConfig(lam_bound=8, tolerance=tol / 10)
    worst_gf = 0.0
    bumps = seeded_bumps(space, rng, 3)
    for bump in bumps:
        F = hm.fourier_transform(space, bump)
        for a in interior_points(space, bump, rng, 10):
            worst_gf = max(worst_gf, abs(hm.inverse_fourier(space, F, [a], icfg) - bump(space, a)))
    # F G g = g for a Gaussian-type PW function; g is the transform of an uncut Gaussian
    g = make_generator(1, 1, cfg.seed)
    worst_fg = 0.0
    for _ in range(5):
        lam = tuple(int(v) for v in rng.integers(-2, 3, space.rank))
        s = complex(rng.uniform(-1, 1), rng.uniform(-3, 3))
        worst_fg = max(worst_fg, fg_residual(space, g, lam, s))
    pw = is_paley_wiener_bounded(
        hm.fourier_transform(space, bumps[0]),
        space.lattice,
        B=max(abs(v) for v in bumps[0].support(space)),
        N=2,
    )
    return [
        Check("roundtrip", f"{field_.name} G(F f) = f", worst_gf <= tol, worst_gf, tol, {"bumps": 3, "points": 10}),
        Check("roundtrip", f"{field_.name} F(G g) = g", worst_fg <= tol, worst_fg, tol, {"points": 5}),
        Check("roundtrip", f"{field_.name} F(bump) Paley-Wiener", pw, 0.0, 0.0),
    ]


def fg_residual(space: hm.BSpace, g, lam, s: complex, cfg: hm.InverseTransformConfig = hm.InverseTransformConfig(lam_bound=6)) -> float:
    """|F(G g)(lam, s) - g(lam, s)| with G g tabulated on a log grid."""
    ys = np.linspace(-12, 12, 961)
    thetas = np.arange(32)[:, None] / 32 if space.rank else np.zeros((1, 0))
    table = hm.inverse_fourier_grid(space, lambda l, S: np.array([g.value(l, x) for x in S]), thetas, ys, cfg)
    return float(abs(hm.fourier_grid(space, table, thetas, ys, lam, s) - g.value(lam, s)))


def suite_intertwiner(cfg: VerifyConfig) -> list[Check]:
    field_ = cfg.field()
    space = hm.BSpace.of(field_)
    kernel = Kernel(field_, space.lattice, cfg.policy(tail_tolerance=math.inf))
    rng = cfg.rng("intertwiner")
    tol = cfg.tol or (1e-4 if space.rank == 0 else 1e-3)
    bumps = seeded_bumps(space, rng, 2)
    phi = hm.BumpCombination.tensor(*bumps)
    worst = 0.0
    w = Permutation((2, 1))
    for _ in range(5):
        lam = [tuple(int(v) for v in rng.integers(-2, 3, space.rank)) for _ in range(2)]
        u = tuple(float(v) for v in rng.uniform(-2, 2, 2))
        worst = max(worst, it.fourier_intertwiner_identity_check(space, kernel, phi, w, lam, u))
    ident = it.fourier_intertwiner_identity_check(space, kernel, phi, Permutation((1, 2)), [(0,) * space.rank] * 2, (0.5, -0.5))
    return [
        Check("intertwiner", f"{field_.name} F(M_w phi) identity n=2", worst <= tol, worst, tol, {"points": 5}),
        Check("intertwiner", f"{field_.name} identity permutation", ident == 0.0, ident, 0.0),
    ]


SUITES: dict[str, Callable[[VerifyConfig], list[Check]]] = {
    "bijection": suite_bijection,
    "inversion": suite_inversion,
    "cocycle": suite_cocycle,
    "assoc": suite_assoc,
    "euler": suite_euler,
    "functional": suite_functional,
    "local": suite_local,
    "assembly": suite_assembly,
    "roundtrip": suite_roundtrip,
    "intertwiner": suite_intertwiner,
}


def run_suite(name: str, cfg: VerifyConfig) -> list[Check]:
    if name == "all":
        return [c for key in SUITES for c in SUITES[key](cfg)]
    return SUITES[name](cfg)
