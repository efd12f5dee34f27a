"""Class-number-one fields of degree at most two.

A field is identified by an integer ``d``: ``0`` for the rationals and a
squarefree ``d`` for ``Q(sqrt d)``.  Ring elements are written ``a + b*omega``
with ``omega = sqrt d`` when ``d % 4 != 1`` and ``omega = (1 + sqrt d)/2``
otherwise.

Log-magnitude vectors live in ``R^{r1+r2}``, one coordinate per archimedean
place.  The trace-zero hyperplane ``H`` is ``{x : sum_i m_i x_i = 0}`` with
``m_i = 1`` at real places and ``2`` at complex places.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from pathlib import Path

import numpy as np

from .errors import GeneratorSearchFailed, NotWhitelisted

IMAGINARY_WHITELIST = frozenset({-1, -2, -3, -7, -11, -19, -43, -67, -163})

# Real quadratic d < 100 whose ring of integers is a PID.
KNOWN_CLASS_NUMBER_ONE_REAL = frozenset({
    2, 3, 5, 6, 7, 11, 13, 14, 17, 19, 21, 22, 23, 29, 31, 33, 37, 38, 41,
    43, 46, 47, 53, 57, 59, 61, 62, 67, 69, 71, 73, 77, 83, 86, 89, 93, 94, 97,
})
DEFAULT_REAL_WHITELIST = frozenset({2, 3, 5, 13})

UNIT_SEARCH_BOUND = 10**6
CACHE_ENV = "HECKE_SHUFFLE_CACHE"
CACHE_VERSION = 1
TIE_TOLERANCE = 1e-12


def _is_squarefree(n: int) -> bool:
    n = abs(n)
    if n < 2:
        return n == 1
    k = 2
    while k * k <= n:
        if n % (k * k) == 0:
            return False
        k += 1
    return True


@dataclass(frozen=True)
class NumberField:
    d: int
    discriminant: int
    r1: int
    r2: int

    @property
    def kind(self) -> str:
        return "rational" if self.d == 0 else "quadratic"

    @property
    def degree(self) -> int:
        return self.r1 + 2 * self.r2

    @property
    def places(self) -> int:
        return self.r1 + self.r2

    @property
    def weights(self) -> np.ndarray:
        """Place multiplicities: 1 for real, 2 for complex."""
        return np.array([1.0] * self.r1 + [2.0] * self.r2)

    @property
    def omega_trace_norm(self) -> tuple[int, int]:
        """(tr omega, N omega) for the integral basis generator."""
        if self.d % 4 == 1:
            return 1, (1 - self.d) // 4
        return 0, -self.d

    @property
    def name(self) -> str:
        if self.d == 0:
            return "Q"
        if self.d == -1:
            return "Q(i)"
        return f"Q(sqrt({self.d}))"

    def element_norm(self, a: int, b: int) -> int:
        if self.d == 0:
            return a
        t, n = self.omega_trace_norm
        return a * a + t * a * b + n * b * b

    def embed(self, a: int, b: int) -> tuple[complex, ...]:
        """Values of ``a + b*omega`` at the archimedean places (one per place)."""
        if self.d == 0:
            return (complex(a),)
        if self.d < 0:
            root = 1j * math.sqrt(-self.d)
        else:
            root = math.sqrt(self.d)
        if self.d % 4 == 1:
            w1, w2 = (1 + root) / 2, (1 - root) / 2
        else:
            w1, w2 = root, -root
        if self.d < 0:
            return (complex(a + b * w1),)
        return (complex(a + b * w1), complex(a + b * w2))


def make_field(d: int, *, real_whitelist: frozenset[int] | set[int] | None = None) -> NumberField:
    """Build the field ``Q(sqrt d)`` (``d == 0`` gives ``Q``)."""
    if d == 0:
        return NumberField(0, 1, 1, 0)
    if d == 1 or not _is_squarefree(d):
        raise NotWhitelisted(f"d={d} is not a squarefree integer != 0, 1")
    if d < 0:
        if d not in IMAGINARY_WHITELIST:
            raise NotWhitelisted(f"Q(sqrt({d})) does not have class number 1")
        r1, r2 = 0, 1
    else:
        allowed = DEFAULT_REAL_WHITELIST if real_whitelist is None else frozenset(real_whitelist)
        if d not in allowed or d not in KNOWN_CLASS_NUMBER_ONE_REAL:
            raise NotWhitelisted(f"Q(sqrt({d})) is not in the class-number-1 whitelist")
        r1, r2 = 2, 0
    disc = d if d % 4 == 1 else 4 * d
    return NumberField(d, disc, r1, r2)


def whitelisted_fields(real_whitelist=None) -> list[NumberField]:
    reals = DEFAULT_REAL_WHITELIST if real_whitelist is None else real_whitelist
    ds = [0] + sorted(IMAGINARY_WHITELIST, reverse=True) + sorted(reals)
    return [make_field(d, real_whitelist=reals) for d in ds]


# --------------------------------------------------------------------------
# Units


@dataclass(frozen=True)
class FundamentalUnit:
    """The unit ``(a + b*sqrt d)/denominator`` greater than one."""

    a: int
    b: int
    denominator: int
    d: int

    @property
    def value(self) -> float:
        return (self.a + self.b * math.sqrt(self.d)) / self.denominator

    @property
    def log(self) -> float:
        return math.log(self.value)

    @property
    def norm(self) -> int:
        return (self.a * self.a - self.d * self.b * self.b) // (self.denominator**2)


def _pell_brute(d: int, target: int, bound: int) -> tuple[int, int] | None:
    # smallest b >= 1 with d*b^2 - target or d*b^2 + target a perfect square
    chunk = 65536
    for start in range(1, bound + 1, chunk):
        b = np.arange(start, min(start + chunk, bound + 1), dtype=np.int64)
        db2 = d * b * b
        best = None
        for rhs in (db2 - target, db2 + target):
            r, ok = _isqrt_exact(rhs)
            hits = np.nonzero(ok)[0]
            if hits.size and (best is None or hits[0] < best[0]):
                best = (hits[0], int(r[hits[0]]))
        if best is not None:
            return best[1], int(b[best[0]])
    return None


def _unit_by_continued_fraction(d: int) -> tuple[int, int, int]:
    """Fundamental unit from the continued fraction of ``-omega'``.

    The convergents ``h/k`` of ``-omega'`` give elements ``h + k*omega`` of
    small norm; the first of norm +-1 is the fundamental unit.
    """
    s = math.isqrt(d)
    if d % 4 == 1:
        P, Q = -1, 2
        t, n = 1, (1 - d) // 4
    else:
        P, Q = 0, 1
        t, n = 0, -d
    h1, h2 = 1, 0  # h_{n-1}, h_{n-2}
    k1, k2 = 0, 1
    for _ in range(100_000):
        a_n = (P + s) // Q
        h1, h2 = a_n * h1 + h2, h1
        k1, k2 = a_n * k1 + k2, k1
        if k1 > 0 and h1 * h1 + t * h1 * k1 + n * k1 * k1 in (1, -1):
            if d % 4 == 1:
                return 2 * h1 + k1, k1, 2
            return h1, k1, 1
        P = a_n * Q - P
        Q = (d - P * P) // Q
    raise GeneratorSearchFailed(f"continued fraction for d={d} did not reach a unit")


@lru_cache(maxsize=None)
def fundamental_unit(d: int, search_bound: int = UNIT_SEARCH_BOUND) -> FundamentalUnit:
    if d <= 1:
        raise ValueError("fundamental units are only needed for real quadratic fields")
    if d % 4 == 1:
        hit = _pell_brute(d, 4, search_bound)
        denom = 2
    else:
        hit = _pell_brute(d, 1, search_bound)
        denom = 1
    if hit is None:
        a, b, denom = _unit_by_continued_fraction(d)
    else:
        a, b = hit
    if denom == 2 and a % 2 == 0 and b % 2 == 0:
        a, b, denom = a // 2, b // 2, 1
    return FundamentalUnit(a, b, denom, d)


@dataclass(frozen=True)
class UnitLattice:
    rank: int
    basis: tuple[tuple[float, ...], ...]
    dual_basis: tuple[tuple[float, ...], ...]
    regulator: float
    places: int
    unit: FundamentalUnit | None = None

    @property
    def basis_matrix(self) -> np.ndarray:
        return np.array(self.basis, dtype=float).reshape(self.rank, self.places)

    @property
    def dual_matrix(self) -> np.ndarray:
        return np.array(self.dual_basis, dtype=float).reshape(self.rank, self.places)

    def lam_vee(self, lam) -> np.ndarray:
        """The vector of H representing the functional with dual coordinates ``lam``."""
        lam = np.asarray(lam, dtype=float).reshape(self.rank)
        return lam @ self.dual_matrix if self.rank else np.zeros(self.places)

    def pairing(self, lam, x) -> float:
        return float(self.lam_vee(lam) @ np.asarray(x, dtype=float))

    def coordinates(self, x) -> np.ndarray:
        """Lambda-coordinates of the H-projection of a log vector."""
        return self.dual_matrix @ np.asarray(x, dtype=float)

    def reduce_log(self, x) -> np.ndarray:
        """Translate a log vector by the lattice into the box ``[0,1)^rank``."""
        x = np.asarray(x, dtype=float)
        if self.rank == 0:
            return x
        B = self.basis_matrix
        for _ in range(4):
            theta = self.coordinates(x)
            # ties at 1 go to 0
            k = np.floor(theta + TIE_TOLERANCE)
            if not k.any():
                break
            x = x - k @ B
        return x


def unit_lattice(field: NumberField) -> UnitLattice:
    places = field.places
    rank = places - 1
    if rank == 0:
        return UnitLattice(0, (), (), 1.0, places)
    eps = fundamental_unit(field.d)
    L = eps.log
    B = np.array([[L, -L]])
    D = np.linalg.solve(B @ B.T, B)
    return UnitLattice(
        1,
        tuple(map(tuple, B.tolist())),
        tuple(map(tuple, D.tolist())),
        L,
        places,
        eps,
    )


# --------------------------------------------------------------------------
# Primes


@dataclass(frozen=True, order=True)
class PrimeIdeal:
    norm: int
    magnitudes: tuple[float, ...]
    p: int = dc_field(compare=False)
    f: int = dc_field(compare=False)

    @property
    def log_magnitudes(self) -> np.ndarray:
        return np.log(np.array(self.magnitudes))


def kronecker(D: int, p: int) -> int:
    """Kronecker symbol (D/p) for a rational prime p."""
    if p == 2:
        if D % 2 == 0:
            return 0
        return 1 if D % 8 in (1, 7) else -1
    r = pow(D % p, (p - 1) // 2, p)
    if r == 0:
        return 0
    return 1 if r == 1 else -1


def rational_primes(X: int) -> list[int]:
    if X < 2:
        return []
    sieve = np.ones(X + 1, dtype=bool)
    sieve[:2] = False
    for q in range(2, math.isqrt(X) + 1):
        if sieve[q]:
            sieve[q * q :: q] = False
    return np.nonzero(sieve)[0].tolist()


def _isqrt_exact(v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    ok = v >= 0
    r = np.floor(np.sqrt(np.where(ok, v, 0).astype(np.float64))).astype(np.int64)
    r += (r + 1) * (r + 1) <= v
    r -= r * r > v
    return r, ok & (r * r == v)


def find_generator(field: NumberField, norm: int, search_bound: int | None = None) -> tuple[int, int]:
    """Some ``(a, b)`` with ``|N(a + b*omega)| == norm``."""
    t, n = field.omega_trace_norm
    if search_bound is None:
        if field.d < 0:
            search_bound = math.isqrt(4 * norm // abs(field.d)) + 2
        else:
            eps = fundamental_unit(field.d).value
            search_bound = int(2 * math.sqrt(norm) * (eps + 1) / math.sqrt(field.d)) + 2
    b = np.arange(0, search_bound + 1, dtype=np.int64)
    signs = (1,) if field.d < 0 else (1, -1)
    for sgn in signs:
        # a^2 + t*b*a + n*b^2 - sgn*norm = 0
        disc = t * t * b * b - 4 * (n * b * b - sgn * norm)
        r, ok = _isqrt_exact(disc)
        ok &= ((r - t * b) % 2 == 0)
        hits = np.nonzero(ok)[0]
        if hits.size:
            i = hits[0]
            return int((-t * b[i] + r[i]) // 2), int(b[i])
    raise GeneratorSearchFailed(
        f"no generator of norm {norm} in {field.name} with |b| <= {search_bound}"
    )


def _split_magnitudes(field: NumberField, a: int, b: int, norm: int) -> tuple[float, float]:
    v1, v2 = (abs(z) for z in field.embed(a, b))
    # the smaller embedding suffers cancellation; recover it from the norm
    if v1 >= v2:
        return v1, norm / v1
    return norm / v2, v2


def _primes_for(field: NumberField, p: int, lattice: UnitLattice, search_bound) -> list[PrimeIdeal]:
    if field.d == 0:
        return [PrimeIdeal(p, (float(p),), p, 1)]
    split = kronecker(field.discriminant, p)
    if split == -1:
        mags = (float(p),) * field.places
        return [PrimeIdeal(p * p, mags, p, 2)]
    a, b = find_generator(field, p, search_bound)
    if field.d < 0:
        mag = abs(field.embed(a, b)[0])
        ideal = PrimeIdeal(p, (mag,), p, 1)
        return [ideal] if split == 0 else [ideal, ideal]
    m1, m2 = _split_magnitudes(field, a, b, p)
    out = []
    variants = [(m1, m2)] if split == 0 else [(m1, m2), (m2, m1)]
    for mags in variants:
        u = lattice.reduce_log(np.log(np.array(mags)))
        red = np.exp(u)
        # keep the product exact up to rounding of one coordinate
        red[1] = p / red[0]
        out.append(PrimeIdeal(p, (float(red[0]), float(red[1])), p, 1))
    return out


def cache_dir_from_env(explicit: str | os.PathLike | None = None) -> Path | None:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path(explicit) if explicit is not None else None


def cache_path(directory: str | os.PathLike, d: int, X: int) -> Path:
    return Path(directory) / f"primes_d{d}_X{X}.txt"


def write_prime_cache(path: str | os.PathLike, d: int, X: int, primes: list[PrimeIdeal]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"# hecke-shuffle primes d={d} X={X} version={CACHE_VERSION}"]
    for P in primes:
        mags = " ".join(float(m).hex() for m in P.magnitudes)
        lines.append(f"{P.p} {P.f} {P.norm} {mags}")
    tmp = path.with_suffix(".tmp")
    tmp.write_text("\n".join(lines) + "\n", encoding="ascii")
    tmp.replace(path)


def read_prime_cache(path: str | os.PathLike) -> tuple[int, int, list[PrimeIdeal]]:
    text = Path(path).read_text(encoding="ascii").splitlines()
    header = text[0].split()
    if header[:3] != ["#", "hecke-shuffle", "primes"]:
        raise ValueError(f"{path}: not a prime cache file")
    meta = dict(tok.split("=", 1) for tok in header[3:])
    if int(meta["version"]) != CACHE_VERSION:
        raise ValueError(f"{path}: unsupported cache version {meta['version']}")
    primes = []
    for line in text[1:]:
        if not line.strip():
            continue
        fields = line.split(" ")
        p, f, norm = int(fields[0]), int(fields[1]), int(fields[2])
        mags = tuple(float.fromhex(tok) for tok in fields[3:])
        primes.append(PrimeIdeal(norm, mags, p, f))
    return int(meta["d"]), int(meta["X"]), primes


_PRIME_MEMO: dict[tuple[int, int], tuple[PrimeIdeal, ...]] = {}


def prime_ideals_up_to(
    field: NumberField,
    X: int,
    *,
    cache_dir: str | os.PathLike | None = None,
    search_bound: int | None = None,
) -> list[PrimeIdeal]:
    """All prime ideals of norm <= X, ordered by (norm, magnitudes)."""
    if X < 2:
        raise ValueError("X must be >= 2")
    key = (field.d, X)
    if search_bound is None and key in _PRIME_MEMO:
        return list(_PRIME_MEMO[key])
    directory = cache_dir_from_env(cache_dir)
    if directory is not None and search_bound is None:
        path = cache_path(directory, field.d, X)
        if path.exists():
            d, X_file, primes = read_prime_cache(path)
            if d == field.d and X_file == X:
                _PRIME_MEMO[key] = tuple(primes)
                return primes
    lattice = unit_lattice(field)
    primes: list[PrimeIdeal] = []
    for p in rational_primes(X):
        for P in _primes_for(field, p, lattice, search_bound):
            if P.norm <= X:
                primes.append(P)
    primes.sort()
    if search_bound is None:
        _PRIME_MEMO[key] = tuple(primes)
        if directory is not None:
            write_prime_cache(cache_path(directory, field.d, X), field.d, X, primes)
    return primes
