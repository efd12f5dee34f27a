"""Hecke L-functions L_K(lambda*, s), their completion and the kernel Phi_K.

Characters are ``chi(a) = exp(-2 pi i <lambda*, log|a|>)`` on ideals; they are
unit invariant, so any generator of a prime ideal gives the same value.

Two evaluation paths exist.  In ``Re s > 1`` the Euler product and the
Dirichlet series are truncated at a norm bound with rigorous tail bounds.
For ``lambda* = 0`` the Dedekind zeta function factors as
``zeta(s) L(s, chi_D)`` and is continued to all of C via Hurwitz zeta values
computed by Euler-Maclaurin summation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy.special import bernoulli

from .errors import ContinuationUnavailable, DomainError, PoleProximity, TailNotConverged
from .numberfield import NumberField, PrimeIdeal, UnitLattice, kronecker, prime_ideals_up_to
from .special import complex_gamma, gamma_K, reciprocal_gamma

POLE_THRESHOLD = 1e-14
# Rosser-Schoenfeld: pi(t) < 1.25506 t / log t for t > 1
_PI_BOUND = 1.25506
# below this abscissa continued values come from L*(1-s); avoids Gamma-pole times trivial-zero cancellation
REFLECTION_ABSCISSA = -0.5
_EM_TERMS = 12


class Estimate(NamedTuple):
    value: complex
    error: float


@dataclass(frozen=True)
class SpectralPoint:
    lam: tuple[int, ...]
    s: complex

    def __post_init__(self):
        object.__setattr__(self, "lam", tuple(int(v) for v in self.lam))
        object.__setattr__(self, "s", complex(self.s))


@dataclass(frozen=True)
class TruncationPolicy:
    """Truncation of Euler products and Dirichlet series.

    ``tail_tolerance`` is an absolute bound on the certified tail.
    ``prefer_continuation`` routes ``lambda* = 0`` through the continued
    zeta path even where the Euler product converges.
    """

    X: int = 10_000
    tail_tolerance: float = 1.0
    prefer_continuation: bool = True
    include_discriminant: bool = True
    cache_dir: str | None = None

    def __post_init__(self):
        if self.X < 2:
            raise ValueError("X must be >= 2")
        if not self.tail_tolerance > 0:
            raise ValueError("tail_tolerance must be positive")


DEFAULT_POLICY = TruncationPolicy()


def _check_lam(lattice: UnitLattice, lam) -> tuple[int, ...]:
    lam = tuple(lam)
    if len(lam) != lattice.rank:
        raise ValueError(f"lambda* must have length {lattice.rank}, got {len(lam)}")
    return lam


def characters(primes_logs: np.ndarray, lattice: UnitLattice, lam) -> np.ndarray:
    """exp(-2 pi i <lambda*, log|a|>) for each row of log magnitudes."""
    if lattice.rank == 0 or not any(lam):
        return np.ones(len(primes_logs), dtype=complex)
    phase = primes_logs @ lattice.lam_vee(lam)
    return np.exp(-2j * np.pi * phase)


# --------------------------------------------------------------------------
# Tail bounds


def prime_tail_sum(X: int, sigma: float, degree: int) -> float:
    """Upper bound for sum of N(p)^-sigma over prime ideals with N(p) > X."""
    if sigma <= 1:
        return math.inf

    def over_primes(T: float, a: float) -> float:
        # sum_{p > T} p^-a <= a * int_T^inf pi(t) t^(-a-1) dt
        T = max(T, 3.0)
        return _PI_BOUND * a * T ** (1 - a) / ((a - 1) * math.log(T))

    if degree == 1:
        return over_primes(X, sigma)
    # split/ramified primes have norm p; inert primes have norm p^2
    return 2 * over_primes(X, sigma) + over_primes(math.sqrt(X), 2 * sigma)


def euler_tail_exponent(X: int, sigma: float, degree: int) -> float:
    """Bound tau on |log L - log L_X|, so |L - L_X| <= |L_X| (e^tau - 1)."""
    return prime_tail_sum(X, sigma, degree) / (1 - X ** (-sigma))


def dirichlet_tail(X: int, sigma: float, degree: int) -> float:
    """Bound on sum_{n > X} a_K(n) n^-sigma with a_K(n) <= d(n)."""
    if sigma <= 1:
        return math.inf
    if degree == 1:
        return X ** (1 - sigma) / (sigma - 1)
    logX = math.log(X)
    return sigma * X ** (1 - sigma) * ((logX + 1) / (sigma - 1) + 1 / (sigma - 1) ** 2)


# --------------------------------------------------------------------------
# Euler product and Dirichlet series


def _prime_arrays(field: NumberField, policy: TruncationPolicy):
    primes = prime_ideals_up_to(field, policy.X, cache_dir=policy.cache_dir)
    norms = np.array([P.norm for P in primes], dtype=float)
    logs = np.array([P.log_magnitudes for P in primes], dtype=float).reshape(len(primes), field.places)
    return norms, logs


def euler_product(primes: Sequence[PrimeIdeal], lattice: UnitLattice, lam, s: complex) -> complex:
    """Finite Euler product over the given prime ideals."""
    norms = np.array([P.norm for P in primes], dtype=float)
    logs = np.array([P.log_magnitudes for P in primes], dtype=float).reshape(len(primes), lattice.places)
    return _euler_from_arrays(norms, logs, lattice, lam, complex(s))


def _euler_from_arrays(norms, logs, lattice, lam, s: complex) -> complex:
    chi = characters(logs, lattice, lam)
    # sum of logs is far more stable than a product of 10^3 factors
    return complex(np.exp(-np.sum(np.log1p(-chi * np.exp(-s * np.log(norms))))))


def l_euler(field: NumberField, lattice: UnitLattice, z: SpectralPoint, policy: TruncationPolicy = DEFAULT_POLICY) -> Estimate:
    """Truncated Euler product over prime ideals of norm <= X."""
    lam = _check_lam(lattice, z.lam)
    sigma = z.s.real
    if sigma <= 1:
        raise DomainError(f"Euler product needs Re s > 1, got {sigma}")
    norms, logs = _prime_arrays(field, policy)
    value = _euler_from_arrays(norms, logs, lattice, lam, z.s)
    tau = euler_tail_exponent(policy.X, sigma, field.degree)
    err = abs(value) * math.expm1(tau)
    if err > policy.tail_tolerance:
        raise TailNotConverged(f"Euler tail bound {err:.3g} exceeds {policy.tail_tolerance:.3g} at X={policy.X}")
    return Estimate(value, err)


@lru_cache(maxsize=64)
def _ideal_arrays(d: int, X: int, cache_dir: str | None) -> tuple[np.ndarray, np.ndarray]:
    from .numberfield import make_field

    field = make_field(d, real_whitelist={d} if d > 1 else None)
    primes = prime_ideals_up_to(field, X, cache_dir=cache_dir)
    norms = np.array([1], dtype=np.int64)
    logs = np.zeros((1, field.places))
    for P in primes:
        new_n, new_l = [norms], [logs]
        cur_n, cur_l = norms, logs
        lp = P.log_magnitudes
        while True:
            keep = cur_n * P.norm <= X
            if not keep.any():
                break
            cur_n = cur_n[keep] * P.norm
            cur_l = cur_l[keep] + lp
            new_n.append(cur_n)
            new_l.append(cur_l)
        norms = np.concatenate(new_n)
        logs = np.concatenate(new_l)
    order = np.lexsort((logs[:, 0], norms))
    return norms[order], logs[order]


def ideals_up_to(field: NumberField, X: int, cache_dir: str | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Norms and log-magnitude vectors of all nonzero ideals of norm <= X."""
    return _ideal_arrays(field.d, X, cache_dir)


def l_dirichlet(field: NumberField, lattice: UnitLattice, z: SpectralPoint, policy: TruncationPolicy = DEFAULT_POLICY) -> Estimate:
    """Truncated Dirichlet series over ideals of norm <= X."""
    lam = _check_lam(lattice, z.lam)
    sigma = z.s.real
    if sigma <= 1:
        raise DomainError(f"Dirichlet series needs Re s > 1, got {sigma}")
    norms, logs = ideals_up_to(field, policy.X, policy.cache_dir)
    chi = characters(logs, lattice, lam)
    value = complex(np.sum(chi * np.exp(-z.s * np.log(norms.astype(float)))))
    err = dirichlet_tail(policy.X, sigma, field.degree)
    if err > policy.tail_tolerance:
        raise TailNotConverged(f"Dirichlet tail bound {err:.3g} exceeds {policy.tail_tolerance:.3g} at X={policy.X}")
    return Estimate(value, err)


# --------------------------------------------------------------------------
# Continuation at lambda* = 0


@lru_cache(maxsize=1)
def _em_coefficients() -> np.ndarray:
    B = bernoulli(2 * _EM_TERMS)
    return np.array([B[2 * j] / math.factorial(2 * j) for j in range(1, _EM_TERMS + 1)])


def hurwitz_zeta(s: complex, a) -> tuple[np.ndarray, float]:
    """zeta(s, a) for 0 < a <= 1 by Euler-Maclaurin; returns values and a remainder estimate."""
    s = complex(s)
    a = np.atleast_1d(np.asarray(a, dtype=float))
    if abs(s - 1) < 1e-15:
        raise PoleProximity("Hurwitz zeta pole at s = 1")
    N = int(abs(s)) + 20
    k = np.arange(N, dtype=float)
    head = np.exp(-s * np.log(k[None, :] + a[:, None])).sum(axis=1)
    x = N + a
    logx = np.log(x)
    val = head + np.exp((1 - s) * logx) / (s - 1) + 0.5 * np.exp(-s * logx)
    rising = s
    power = np.exp(-(s + 1) * logx)
    last = 0.0
    for j, c in enumerate(_em_coefficients(), start=1):
        term = c * rising * power
        val = val + term
        last = float(np.max(np.abs(term)))
        rising *= (s + 2 * j - 1) * (s + 2 * j)
        power = power / (x * x)
    return val, last


def _kronecker_composite(D: int, n: int) -> int:
    out, m, p = 1, n, 2
    while p * p <= m:
        while m % p == 0:
            out *= kronecker(D, p)
            m //= p
        p += 1
    if m > 1:
        out *= kronecker(D, m)
    return out


@lru_cache(maxsize=64)
def _character_table(D: int) -> tuple[np.ndarray, np.ndarray]:
    q = abs(D)
    residues = np.arange(1, q + 1)
    chi = np.array([_kronecker_composite(D, int(a)) for a in residues], dtype=float)
    keep = chi != 0
    return residues[keep] / q, chi[keep]


def dirichlet_l_continued(D: int, s: complex) -> Estimate:
    """L(s, chi_D) for the Kronecker character of a fundamental discriminant D.

    Left of the reflection abscissa the value comes from L(1 - s) through the
    functional equation of the primitive real character (root number 1);
    Euler-Maclaurin there loses digits to cancellation in the head sum.
    """
    s = complex(s)
    q = abs(D)
    if s.real < REFLECTION_ABSCISSA:
        kappa = 0 if D > 0 else 1
        far = dirichlet_l_continued(D, 1 - s)
        # L(s) = G(1-s) L(1-s) / G(s), G(s) = (q/pi)^((s+kappa)/2) Gamma((s+kappa)/2)
        factor = np.exp((0.5 - s) * math.log(q / math.pi)) * complex_gamma((1 - s + kappa) / 2) * reciprocal_gamma((s + kappa) / 2)
        return Estimate(complex(factor * far.value), float(abs(factor) * far.error))
    if q == 1:
        v, e = hurwitz_zeta(s, 1.0)
        return Estimate(complex(v[0]), e)
    a, chi = _character_table(D)
    v, e = hurwitz_zeta(s, a)
    scale = np.exp(-s * math.log(q))
    return Estimate(complex(scale * np.sum(chi * v)), float(abs(scale) * e * len(a)))


def dedekind_zeta(field: NumberField, s: complex) -> Estimate:
    """zeta_K(s) = zeta(s) L(s, chi_disc) on all of C minus s = 1 (no reflection)."""
    z = dirichlet_l_continued(1, s)
    if field.degree == 1:
        return z
    L = dirichlet_l_continued(field.discriminant, s)
    return Estimate(z.value * L.value, abs(z.value) * L.error + abs(L.value) * z.error)


def archimedean_factor(field: NumberField, lattice: UnitLattice, lam, s: complex, include_discriminant: bool = True) -> complex:
    """|D|^(s/2) pi^(-r1 s/2) (2 pi)^(-r2 s) Gamma_K(lambda*, s)."""
    s = complex(s)
    log_scale = -(field.r1 * s / 2) * math.log(math.pi) - field.r2 * s * math.log(2 * math.pi)
    if include_discriminant:
        log_scale += s / 2 * math.log(abs(field.discriminant))
    return complex(np.exp(log_scale) * gamma_K(field, lattice, lam, s))


def _l_star_continued(field, lattice, s: complex, include_discriminant: bool) -> Estimate:
    lam0 = (0,) * lattice.rank
    if s.real < REFLECTION_ABSCISSA and include_discriminant:
        return _l_star_continued(field, lattice, 1 - s, include_discriminant)
    zk = dedekind_zeta(field, s)
    g = archimedean_factor(field, lattice, lam0, s, include_discriminant)
    return Estimate(g * zk.value, abs(g) * zk.error)


def l_star(field: NumberField, lattice: UnitLattice, z: SpectralPoint, policy: TruncationPolicy = DEFAULT_POLICY) -> Estimate:
    """Completed L-function |D|^(s/2) pi^(-r1 s/2) (2 pi)^(-r2 s) Gamma_K L_K."""
    lam = _check_lam(lattice, z.lam)
    s = z.s
    trivial = not any(lam)
    if trivial and (policy.prefer_continuation or s.real <= 1):
        return _l_star_continued(field, lattice, s, policy.include_discriminant)
    if s.real <= 1:
        raise ContinuationUnavailable("continuation is implemented only for lambda* = 0")
    L = l_euler(field, lattice, z, policy)
    g = archimedean_factor(field, lattice, lam, s, policy.include_discriminant)
    return Estimate(g * L.value, abs(g) * L.error)


def _phi_euler(field, lattice, lam, s: complex, policy: TruncationPolicy) -> Estimate:
    if s.real <= 1:
        raise ContinuationUnavailable(f"Phi_K with lambda* != 0 needs Re s > 1, got {s.real}")
    norms, logs = _prime_arrays(field, policy)
    num = _euler_from_arrays(norms, logs, lattice, lam, s)
    den = _euler_from_arrays(norms, logs, lattice, lam, s + 1)
    if abs(den) < POLE_THRESHOLD:
        raise PoleProximity(f"|L_K(s+1)| below {POLE_THRESHOLD} at s={s}")
    scale = _phi_archimedean(field, lattice, lam, s, policy.include_discriminant)
    value = scale * num / den
    tau = euler_tail_exponent(policy.X, s.real, field.degree) + euler_tail_exponent(policy.X, s.real + 1, field.degree)
    err = abs(value) * math.expm1(tau)
    if err > policy.tail_tolerance:
        raise TailNotConverged(f"Phi_K tail bound {err:.3g} exceeds {policy.tail_tolerance:.3g} at X={policy.X}")
    return Estimate(value, err)


def _phi_archimedean(field, lattice, lam, s: complex, include_discriminant: bool) -> complex:
    """archimedean_factor(s) / archimedean_factor(s + 1) without over/underflow."""
    from .special import gamma_ratio

    coords = lattice.lam_vee(lam)
    out = complex(math.pi ** (field.r1 / 2) * (2 * math.pi) ** field.r2)
    if include_discriminant:
        out /= math.sqrt(abs(field.discriminant))
    for nu in range(field.r1):
        shift = np.pi * 1j * coords[nu]
        out *= gamma_ratio(s / 2 + shift, (s + 1) / 2 + shift)
    for nu in range(field.r1, field.r1 + field.r2):
        out /= s + np.pi * 1j * coords[nu]
    return out


def _phi_continued(field, lattice, s: complex, include_discriminant: bool) -> Estimate:
    num = _l_star_continued(field, lattice, s, include_discriminant)
    den = _l_star_continued(field, lattice, s + 1, include_discriminant)
    zden = dedekind_zeta(field, s + 1 if (s + 1).real >= REFLECTION_ABSCISSA else -s)
    if abs(zden.value) < POLE_THRESHOLD:
        raise PoleProximity(f"zeta_K vanishes to {abs(zden.value):.2g} near s+1={s + 1}")
    value = num.value / den.value
    rel = num.error / max(abs(num.value), 1e-300) + den.error / abs(den.value)
    return Estimate(value, abs(value) * rel)


def phi_K(field: NumberField, lattice: UnitLattice, z: SpectralPoint, policy: TruncationPolicy = DEFAULT_POLICY) -> Estimate:
    """Phi_K(lambda*, s) = L*_K(lambda*, s) / L*_K(lambda*, s + 1)."""
    lam = _check_lam(lattice, z.lam)
    s = z.s
    if not any(lam) and (policy.prefer_continuation or s.real <= 1):
        return _phi_continued(field, lattice, s, policy.include_discriminant)
    return _phi_euler(field, lattice, lam, s, policy)


class Kernel:
    """Memoized Phi_K for one field, the structure constant of the shuffle algebra."""

    def __init__(self, field: NumberField, lattice: UnitLattice | None = None, policy: TruncationPolicy = DEFAULT_POLICY):
        from .numberfield import unit_lattice

        self.field = field
        self.lattice = lattice if lattice is not None else unit_lattice(field)
        self.policy = policy
        self._memo: dict[tuple[tuple[int, ...], complex], Estimate] = {}

    @property
    def rank(self) -> int:
        return self.lattice.rank

    def estimate(self, lam, s) -> Estimate:
        key = (tuple(int(v) for v in lam), complex(s))
        hit = self._memo.get(key)
        if hit is None:
            hit = phi_K(self.field, self.lattice, SpectralPoint(*key), self.policy)
            self._memo[key] = hit
        return hit

    def __call__(self, lam, s) -> complex:
        return self.estimate(lam, s).value


# --------------------------------------------------------------------------
# Paley-Wiener check


def is_paley_wiener_bounded(
    f: Callable[[tuple[int, ...], complex], complex],
    lattice: UnitLattice,
    B: float,
    N: int,
    *,
    re_bound: float = 5.0,
    im_bound: float = 50.0,
    lam_bound: int = 10,
    core_im: float = 25.0,
    core_lam: int = 5,
    re_step: float = 0.5,
    im_step: float = 1.0,
) -> bool:
    """Empirical test of |f| <= C (1+|s|)^-N (1+|lambda^vee|)^-N e^(B|Re s|).

    ``f(lam, s)`` is a scalar oracle; an ``on_grid(lam, S)`` method, when
    present, is used to evaluate a whole s-grid at once.

    C is fitted on the core window ``|Im s| <= core_im, |lambda| <= core_lam``;
    the verdict is whether the same C holds on the whole grid.  A function
    whose weighted size keeps growing outside the core admits no constant.
    """
    re = np.arange(-re_bound, re_bound + 1e-9, re_step)
    im = np.arange(-im_bound, im_bound + 1e-9, im_step)
    S = re[:, None] + 1j * im[None, :]
    if lattice.rank == 0:
        lams = [()]
    else:
        rng = range(-lam_bound, lam_bound + 1)
        lams = [tuple(v) for v in np.array(np.meshgrid(*[rng] * lattice.rank)).reshape(lattice.rank, -1).T]
    core_max = 0.0
    full_max = 0.0
    for lam in lams:
        if hasattr(f, "on_grid"):
            vals = np.asarray(f.on_grid(lam, S), dtype=complex)
        else:
            vals = np.array([[f(lam, s) for s in row] for row in S], dtype=complex)
        if not np.all(np.isfinite(vals)):
            return False
        lv = float(np.linalg.norm(lattice.lam_vee(lam))) if lattice.rank else 0.0
        weight = (1 + np.abs(S)) ** (-N) * (1 + lv) ** (-N) * np.exp(B * np.abs(S.real))
        ratio = np.abs(vals) / weight
        full_max = max(full_max, float(ratio.max()))
        if max((abs(v) for v in lam), default=0) <= core_lam:
            core = np.abs(im) <= core_im
            core_max = max(core_max, float(ratio[:, core].max()))
    return full_max <= core_max * (1 + 1e-9)
