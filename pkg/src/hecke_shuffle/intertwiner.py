"""Local factors of the intertwining operators and their global assembly.

Closed forms live here next to the numerical oracles used to check them:
quadrature for the two archimedean integrals, geometric partial sums for
the non-archimedean one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy import integrate

from .errors import PoleProximity, PreconditionViolated, QuadratureNotConverged, TailNotConverged
from .harmonic import BSpace, BumpCombination, QuadratureGrid, as_combination, bump_transform, fourier
from .lfunction import DEFAULT_POLICY, Estimate, Kernel, SpectralPoint, TruncationPolicy, euler_tail_exponent
from .numberfield import NumberField, PrimeIdeal, UnitLattice, prime_ideals_up_to
from .shuffle.kernels import phi_w_factors, point_difference
from .shuffle.permutations import Permutation, inversion_set
from .special import gamma_ratio

# Tamagawa normalizations entering the rank-2 assembly.
INCLUDE_DISCRIMINANT_FACTOR = True
COMPLEX_PLACE_FACTOR = 2.0
PADIC_POLE_THRESHOLD = 1e-12


@dataclass(frozen=True)
class LocalFactorResult:
    value: complex
    method: str
    error_estimate: float = 0.0


# --------------------------------------------------------------------------
# Real places


def real_local_closed(lam_diff: float, sdiff: complex) -> complex:
    """sqrt(pi) Gamma(s/2 + pi i lam) / Gamma((s+1)/2 + pi i lam)."""
    sdiff = complex(sdiff)
    if sdiff.real <= 0:
        raise PreconditionViolated(f"real local factor needs Re(sdiff) > 0, got {sdiff.real}")
    shift = math.pi * 1j * lam_diff
    return math.sqrt(math.pi) * complex(gamma_ratio(sdiff / 2 + shift, (sdiff + 1) / 2 + shift))


def _complex_quad(fn, lo: float, hi: float) -> tuple[complex, float]:
    re, e1 = integrate.quad(lambda x: fn(x).real, lo, hi, limit=400, epsabs=1e-14, epsrel=1e-13)
    im, e2 = integrate.quad(lambda x: fn(x).imag, lo, hi, limit=400, epsabs=1e-14, epsrel=1e-13)
    return complex(re, im), e1 + e2


def _power_tail(e: complex, T: float, offset: float, max_terms: int = 200) -> tuple[complex, float]:
    """int_T^inf r^offset (r^2 + 1)^e dr via the binomial series in r^-2.

    Valid for T > 1 and Re(2e + offset) < -1.
    """
    total = 0j
    last = math.inf
    coef = complex(1.0)
    for k in range(max_terms):
        if k:
            coef *= (e - k + 1) / k
        p = 2 * e - 2 * k + offset + 1
        term = coef * (-(T ** p) / p)
        total += term
        last = abs(term)
        if last < 1e-18 * max(1.0, abs(total)):
            break
    return total, last


def _radial_integral(e: complex, offset: float, tol: float) -> tuple[complex, float]:
    """int_0^inf r^offset (r^2 + 1)^e dr with a doubling guard on the split point."""

    def integrand(r: float) -> complex:
        return r ** offset * np.exp(e * math.log1p(r * r))

    def split(T: float) -> tuple[complex, float]:
        head, err = _complex_quad(integrand, 0.0, T)
        tail, terr = _power_tail(e, T, offset)
        return head + tail, err + terr

    T = 4.0
    prev, err = split(T)
    for _ in range(6):
        T *= 2
        cur, err = split(T)
        if abs(cur - prev) <= tol * max(1.0, abs(cur)):
            return cur, max(err, abs(cur - prev))
        prev = cur
    raise QuadratureNotConverged(f"radial integral with exponent {e} did not settle")


def real_local_quadrature(a: float, b: float, sexp: complex, tol: float = 1e-10) -> LocalFactorResult:
    """Quadrature of int_R (a x^2 + b)^sexp dx; test oracle for the closed form."""
    sexp = complex(sexp)
    if not (a > 0 and b > 0):
        raise PreconditionViolated("a and b must be positive")
    if sexp.real >= -0.5:
        raise PreconditionViolated(f"integral diverges unless Re(sexp) < -1/2, got {sexp.real}")
    # x = sqrt(b/a) u
    core, err = _radial_integral(sexp, 0.0, tol)
    scale = np.exp(sexp * math.log(b)) * math.sqrt(b / a) * 2
    return LocalFactorResult(complex(scale * core), "quadrature", float(abs(scale) * err))


def real_integral_closed(a: float, b: float, sexp: complex) -> complex:
    """b^s sqrt(b/a) sqrt(pi) Gamma(-s - 1/2) / Gamma(-s)."""
    sexp = complex(sexp)
    return complex(np.exp(sexp * math.log(b)) * math.sqrt(b / a) * math.sqrt(math.pi) * gamma_ratio(-sexp - 0.5, -sexp))


def real_exponent(lam_diff: float, sdiff: complex) -> complex:
    """Exponent e with int_R (x^2+1)^e dx = real_local_closed(lam_diff, sdiff)."""
    return (-complex(sdiff) - 1 - 2j * math.pi * lam_diff) / 2


# --------------------------------------------------------------------------
# Complex places


def complex_local_closed(lam_diff: float, sdiff: complex) -> complex:
    """pi / (s + pi i lam)."""
    den = complex(sdiff) + math.pi * 1j * lam_diff
    if abs(den) < 1e-12:
        raise PoleProximity(f"complex local factor pole at sdiff={sdiff}, lam={lam_diff}")
    return math.pi / den


def complex_exponent(lam_diff: float, sdiff: complex) -> complex:
    """Exponent e with 2 pi int_0^inf r (r^2+1)^e dr = complex_local_closed(lam_diff, sdiff)."""
    return -complex(sdiff) - 1 - 1j * math.pi * lam_diff


def complex_local_quadrature(a: float, b: float, sexp: complex, tol: float = 1e-10) -> LocalFactorResult:
    """Polar quadrature of int_C (a|x|^2 + b)^sexp dx = 2 pi int_0^inf r (a r^2 + b)^sexp dr."""
    sexp = complex(sexp)
    if not (a > 0 and b > 0):
        raise PreconditionViolated("a and b must be positive")
    if sexp.real >= -1:
        raise PreconditionViolated(f"integral diverges unless Re(sexp) < -1, got {sexp.real}")
    # r = sqrt(b/a) u
    core, err = _radial_integral(sexp, 1.0, tol)
    scale = 2 * math.pi * np.exp(sexp * math.log(b)) * (b / a)
    return LocalFactorResult(complex(scale * core), "quadrature", float(abs(scale) * err))


# --------------------------------------------------------------------------
# Finite places


def padic_character(P: PrimeIdeal, lam_vee_diff) -> complex:
    """|iota(p)|^{2 pi i Delta} = exp(2 pi i <Delta, log|pi|>)."""
    v = np.asarray(lam_vee_diff, dtype=float)
    if not v.any():
        return complex(1.0)
    return complex(np.exp(2j * np.pi * float(v @ P.log_magnitudes)))


def padic_local_closed(P: PrimeIdeal, lam_vee_diff, sdiff: complex) -> complex:
    """(chi N^(s+1) - 1) / (chi N^(s+1) - N)."""
    sdiff = complex(sdiff)
    if sdiff.real <= 0:
        raise PreconditionViolated(f"p-adic factor needs Re(sdiff) > 0, got {sdiff.real}")
    chi = padic_character(P, lam_vee_diff)
    # divide through by chi N^(s+1) to stay bounded
    q = np.exp(-(sdiff + 1) * math.log(P.norm)) / chi
    den = 1 - P.norm * q
    if abs(den) < PADIC_POLE_THRESHOLD:
        raise PoleProximity(f"p-adic denominator {abs(den):.2g} at N(p)={P.norm}")
    return complex((1 - q) / den)


def padic_local_partial_sum(P: PrimeIdeal, lam_vee_diff, sdiff: complex, J: int | None = None, tol: float = 1e-13) -> LocalFactorResult:
    """1 + (1 - 1/N) sum_{j=1..J} (chi^-1 N^-s)^j, J chosen from ``tol`` when omitted."""
    sdiff = complex(sdiff)
    if sdiff.real <= 0:
        raise PreconditionViolated(f"p-adic factor needs Re(sdiff) > 0, got {sdiff.real}")
    N = P.norm
    q = complex(np.exp(-sdiff * math.log(N)) / padic_character(P, lam_vee_diff))
    r = abs(q)
    if J is None:
        J = max(1, math.ceil(math.log(tol * (1 - r)) / math.log(r)))
    j = np.arange(1, J + 1)
    total = 1 + (1 - 1 / N) * complex(np.sum(q ** j))
    remainder = (1 - 1 / N) * r ** (J + 1) / (1 - r)
    return LocalFactorResult(total, "partial-sum", float(remainder))


# --------------------------------------------------------------------------
# Rank-2 assembly


def assemble_rank2(
    field: NumberField,
    lattice: UnitLattice,
    z1: SpectralPoint,
    z2: SpectralPoint,
    policy: TruncationPolicy = DEFAULT_POLICY,
    *,
    include_discriminant: bool = INCLUDE_DISCRIMINANT_FACTOR,
    complex_place_factor: float = COMPLEX_PLACE_FACTOR,
) -> Estimate:
    """Product of all local factors at s = s2 - s1, lam = lam2 - lam1.

    disc^-1/2 * prod_real real_local_closed * prod_complex (2 complex_local_closed)
    * prod_{N(p) <= X} padic_local_closed, with the Euler-type tail bound.
    """
    lam, s = point_difference(z2, z1)
    if s.real <= 1:
        raise PreconditionViolated(f"assembly needs Re(s2 - s1) > 1, got {s.real}")
    coords = lattice.lam_vee(lam)
    value = complex(1.0)
    if include_discriminant:
        value /= math.sqrt(abs(field.discriminant))
    for nu in range(field.r1):
        value *= real_local_closed(coords[nu], s)
    for nu in range(field.r1, field.r1 + field.r2):
        value *= complex_place_factor * complex_local_closed(coords[nu], s)
    primes = prime_ideals_up_to(field, policy.X, cache_dir=policy.cache_dir)
    norms = np.array([P.norm for P in primes], dtype=float)
    logs = np.array([P.log_magnitudes for P in primes]).reshape(len(primes), field.places)
    chi = np.exp(2j * np.pi * (logs @ coords)) if lattice.rank else np.ones(len(primes))
    q = np.exp(-(s + 1) * np.log(norms)) / chi
    den = 1 - norms * q
    if np.min(np.abs(den), initial=1.0) < PADIC_POLE_THRESHOLD:
        raise PoleProximity("p-adic denominator vanishes")
    value *= complex(np.exp(np.sum(np.log1p(-q) - np.log(den))))
    tau = euler_tail_exponent(policy.X, s.real, field.degree) + euler_tail_exponent(policy.X, s.real + 1, field.degree)
    err = abs(value) * math.expm1(tau)
    if err > policy.tail_tolerance:
        raise TailNotConverged(f"assembly tail bound {err:.3g} exceeds {policy.tail_tolerance:.3g}")
    return Estimate(value, err)


# --------------------------------------------------------------------------
# M_w on characters


class MWResult(NamedTuple):
    lam: tuple[tuple[int, ...], ...]
    s: tuple[complex, ...]
    kernel: complex
    factors: tuple[tuple[tuple[int, ...], complex], ...]


def _domain_check(w: Permutation, z: Sequence[SpectralPoint]) -> None:
    for i, j in sorted(inversion_set(w.inverse())):
        if (z[j - 1].s - z[i - 1].s).real <= 1:
            raise PreconditionViolated(f"need Re(s_{j} - s_{i}) > 1 for the pair ({i}, {j})")


def _kernel_factors(w: Permutation, z: tuple[SpectralPoint, ...]) -> list[tuple[tuple[int, ...], complex]]:
    """Factor arguments of Phi_{K,w^-1}(z) via w = t w0 on adjacent transpositions."""
    if w.is_identity():
        return []
    winv = w.inverse()
    n = w.n
    # a descent of w^-1 shortens the word: Phi_{w^-1}(z) = Phi_{w^-1 t}(t z) Phi_t(z)
    l = next(l for l in range(1, n) if winv(l) > winv(l + 1))
    t = Permutation.transposition(n, l, l + 1)
    head = point_difference(z[l], z[l - 1])
    return [head] + _kernel_factors(t * w, t.act(z))


def mw_character(kernel: Kernel, w: Permutation, lam: Sequence[Sequence[int]], s: Sequence[complex], *, check_domain: bool = True) -> MWResult:
    """M_w C(lam, s) = C(w^-1 lam, w^-1 s) Phi_{K,w^-1}(lam, s)."""
    if len(lam) != w.n or len(s) != w.n:
        raise ValueError("need n parameters")
    z = tuple(SpectralPoint(l, x) for l, x in zip(lam, s))
    if check_domain:
        _domain_check(w, z)
    factors = _kernel_factors(w, z)
    value = complex(1.0)
    for fl, fs in factors:
        value *= kernel(fl, fs)
    winv = w.inverse()
    return MWResult(winv.act(tuple(tuple(l) for l in lam)), winv.act(tuple(complex(x) for x in s)), value, tuple(factors))


def direct_kernel_factors(w: Permutation, z: Sequence[SpectralPoint]) -> list[tuple[tuple[int, ...], complex]]:
    """Factor arguments of Phi_{K,w^-1}(z) read off the inversion set."""
    return [(l, x) for _, l, x in phi_w_factors(w.inverse(), z)]


# --------------------------------------------------------------------------
# Fourier transform of M_w(phi)


@dataclass(frozen=True)
class IntertwinerGrid:
    sigma_gap: float = 3.0
    sigma_mid: float = 0.0
    t_bound: float = 16.0
    t_step: float = 0.1
    y_bound: float = 14.0
    y_step: float = 0.05


def fourier_intertwiner_identity_check(
    space: BSpace,
    kernel: Kernel,
    phi,
    w: Permutation,
    lam: Sequence[Sequence[int]],
    im_s: Sequence[float],
    grid: IntertwinerGrid = IntertwinerGrid(),
    quad: QuadratureGrid = QuadratureGrid(),
) -> float:
    """|F(M_w phi)(lam, s) - F(phi)(w lam, w s) Phi_{K,w}(lam, s)| for n <= 2.

    ``phi`` is a test function on B^n represented through G F phi on the
    line Re s = sigma0 = (mid + gap/2, mid - gap/2).  M_w acts on each
    character of that representation; the forward transform of the result
    is then taken at ``s = w(sigma0) + i im_s`` where it converges.
    """
    phi = as_combination(phi)
    n = phi.arity
    if n != w.n or n > 2:
        raise ValueError("n must equal w.n and be at most 2")
    if w.is_identity():
        s = tuple(complex(grid.sigma_mid, t) for t in im_s)
        lhs = fourier(space, phi, lam, s, quad)
        rhs = fourier(space, phi, w.act(tuple(lam)), w.act(s), quad)
        return float(abs(lhs - rhs * complex(1.0)))
    return _identity_residual_rank2(space, kernel, phi, lam, im_s, grid, quad)


def _identity_residual_rank2(space, kernel, phi: BumpCombination, lam, im_s, grid, quad) -> float:
    sig1 = grid.sigma_mid + grid.sigma_gap / 2
    sig2 = grid.sigma_mid - grid.sigma_gap / 2
    J = space.jacobian
    t = np.arange(-grid.t_bound, grid.t_bound + 0.5 * grid.t_step, grid.t_step)
    y = np.arange(-grid.y_bound, grid.y_bound + 0.5 * grid.y_step, grid.y_step)
    lam1, lam2 = (tuple(int(v) for v in l) for l in lam)
    # torus integration in the forward transform keeps only eta = (lam2, lam1)
    eta1, eta2 = lam2, lam1
    s_t1 = sig1 + 1j * t
    s_t2 = sig2 + 1j * t
    # Phi(eta1 - eta2, s1 - s2) depends on t1 - t2 only
    diffs = np.arange(-(len(t) - 1), len(t)) * grid.t_step
    dlam = tuple(a - b for a, b in zip(eta1, eta2))
    phis = np.array([kernel(dlam, complex(sig1 - sig2, d)) for d in diffs])
    idx = np.arange(len(t))
    Phi = phis[(idx[:, None] - idx[None, :]) + len(t) - 1]
    E = np.exp(-1j * np.multiply.outer(y, t))
    u1, u2 = im_s
    total = 0j
    for c, bumps in phi.terms:
        A = bump_transform(space, bumps[0], np.broadcast_to(np.asarray(eta1, float), t.shape + (space.rank,)), s_t1, quad)
        B = bump_transform(space, bumps[1], np.broadcast_to(np.asarray(eta2, float), t.shape + (space.rank,)), s_t2, quad)
        K = (A[:, None] * B[None, :]) * Phi
        # M(y1, y2) e^{sig2 y1 + sig1 y2} = (2 pi J)^-2 sum K[t1, t2] e^{-i t2 y1 - i t1 y2} h^2
        M = E @ K.T @ E.T * (grid.t_step ** 2) / (2 * np.pi * J) ** 2
        # forward transform at s' = (sig2 + i u1, sig1 + i u2)
        f1 = np.exp(1j * u1 * y) * grid.y_step
        f2 = np.exp(1j * u2 * y) * grid.y_step
        total += c * (f1 @ M @ f2) * J ** 2
    s_prime = (complex(sig2, u1), complex(sig1, u2))
    lam_prime = (lam1, lam2)
    w = Permutation((2, 1))
    rhs = fourier(space, phi, w.act(lam_prime), w.act(s_prime), quad) * kernel(
        tuple(a - b for a, b in zip(lam2, lam1)), s_prime[1] - s_prime[0]
    )
    return float(abs(total - rhs))
