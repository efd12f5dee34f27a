"""Harmonic analysis on B = (H/Lambda) x R_+ and its powers.

A point of B is stored as a vector of positive reals, one per archimedean
place.  In log coordinates ``x = log a`` we write
``x = sum_k theta_k b_k + y e`` with ``b_k`` the unit-lattice basis,
``e = m / |m|^2`` (``m`` the place weights) and ``y = log |a|_B``.  Lebesgue
measure in ``x`` is then ``J dtheta dy`` with ``J = |det[b, e]|``.

The transform pair is

    F f(lam, s) = J^n int f(theta, y) e^{s.y} e^{2 pi i lam.theta} dtheta dy
    G g(a)      = (2 pi i J)^-n sum_lam int_{Re s = sigma0} g(lam, s) |a|_B^-s a^{-2 pi i lam} ds
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import QuadratureNotConverged, TruncationNotConverged
from .numberfield import TIE_TOLERANCE, NumberField, UnitLattice, unit_lattice
from .lfunction import SpectralPoint

SUPPORT_RADIUS = 8.0   # in units of logWidth
PLATEAU_RADIUS = 6.0   # cutoff is identically 1 inside this radius


@dataclass(frozen=True)
class BSpace:
    field: NumberField
    lattice: UnitLattice

    @classmethod
    def of(cls, field: NumberField) -> "BSpace":
        return cls(field, unit_lattice(field))

    @property
    def rank(self) -> int:
        return self.lattice.rank

    @cached_property
    def e(self) -> np.ndarray:
        m = self.field.weights
        return m / float(m @ m)

    @cached_property
    def jacobian(self) -> float:
        cols = [*self.lattice.basis_matrix, self.e]
        return float(abs(np.linalg.det(np.array(cols).T)))

    def log_coordinates(self, x) -> tuple[np.ndarray, float]:
        """(theta, y) of a log vector; theta is not reduced mod 1."""
        x = np.asarray(x, dtype=float)
        theta = self.lattice.coordinates(x) if self.rank else np.zeros(0)
        return theta, float(self.field.weights @ x)

    def from_log_coordinates(self, theta, y: float) -> np.ndarray:
        theta = np.asarray(theta, dtype=float).reshape(self.rank)
        return theta @ self.lattice.basis_matrix + y * self.e if self.rank else y * self.e


@dataclass(frozen=True)
class BPoint:
    coords: tuple[float, ...]
    reduced: bool = False

    def __post_init__(self):
        c = tuple(float(v) for v in self.coords)
        if any(not v > 0 for v in c):
            raise ValueError("B-points have positive coordinates")
        object.__setattr__(self, "coords", c)

    @property
    def log(self) -> np.ndarray:
        return np.log(np.array(self.coords))


def norm_B(space: BSpace, a: BPoint) -> float:
    """prod over real places a_i times prod over complex places a_j^2."""
    return float(np.exp(space.field.weights @ a.log))


def reduce(space: BSpace, a) -> BPoint:
    """Representative with Lambda-coordinates in [0, 1); ties at 1 go to 0."""
    coords = a.coords if isinstance(a, BPoint) else tuple(a)
    if len(coords) != space.field.places:
        raise ValueError(f"expected {space.field.places} coordinates")
    if space.rank == 0:
        return BPoint(coords, True)
    c = np.array(coords, dtype=float)
    B = space.lattice.basis_matrix
    for _ in range(8):
        theta = space.lattice.coordinates(np.log(c))
        k = np.floor(theta + TIE_TOLERANCE)
        if not k.any():
            return BPoint(tuple(c), True)
        c = c * np.exp(-(k @ B))
    raise RuntimeError("reduction did not settle")


def act_by_unit(space: BSpace, a: BPoint, k) -> BPoint:
    """Multiply by the unit with Lambda-coordinates k."""
    if space.rank == 0:
        return a
    shift = np.asarray(k, dtype=float) @ space.lattice.basis_matrix
    return BPoint(tuple(np.array(a.coords) * np.exp(shift)))


def character(space: BSpace, lam, s: complex, a: BPoint) -> complex:
    """|a|_B^s exp(2 pi i <lam, log a>)."""
    x = a.log
    phase = space.lattice.lam_vee(lam) @ x if space.rank else 0.0
    return complex(np.exp(complex(s) * float(space.field.weights @ x) + 2j * np.pi * phase))


def delta(space: BSpace, a: Sequence[BPoint]) -> float:
    """prod_{i<j} |a_j|_B / |a_i|_B."""
    y = [float(space.field.weights @ p.log) for p in a]
    n = len(y)
    return float(math.exp(sum(y[j] - y[i] for i in range(n) for j in range(i + 1, n))))


# --------------------------------------------------------------------------
# Test functions


def _smooth_step(u: np.ndarray) -> np.ndarray:
    """C-infinity step: 0 for u <= 0, 1 for u >= 1."""
    u = np.clip(u, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(u > 0, np.exp(-1.0 / np.where(u > 0, u, 1.0)), 0.0)
        b = np.where(u < 1, np.exp(-1.0 / np.where(u < 1, 1.0 - u, 1.0)), 0.0)
    return a / (a + b)


def cutoff(t: np.ndarray) -> np.ndarray:
    return 1.0 - _smooth_step((np.abs(t) - PLATEAU_RADIUS) / (SUPPORT_RADIUS - PLATEAU_RADIUS))


@dataclass(frozen=True)
class TestBump:
    """Gaussian-in-log bump, cut off smoothly at 8 widths, times a von Mises torus profile.

    ``f(theta, y) = A exp(-t^2/2) cut(t) exp(kappa cos(2 pi (k.theta - k.theta0)))``
    with ``t = (y - y0) / logWidth``.
    """

    __test__ = False

    center: BPoint
    log_width: float
    torus_mode: tuple[int, ...] = ()
    concentration: float = 1.0
    amplitude: float = 1.0

    def profile(self, space: BSpace) -> tuple[np.ndarray, float]:
        return space.log_coordinates(self.center.log)

    def radial(self, space: BSpace, y) -> np.ndarray:
        _, y0 = self.profile(space)
        t = (np.asarray(y, dtype=float) - y0) / self.log_width
        return self.amplitude * np.exp(-0.5 * t * t) * cutoff(t)

    def torus(self, space: BSpace, theta) -> np.ndarray:
        """Torus profile; theta has shape (..., rank)."""
        theta = np.asarray(theta, dtype=float)
        if space.rank == 0:
            return np.ones(theta.shape[:-1])
        theta0, _ = self.profile(space)
        k = np.asarray(self.torus_mode or (0,) * space.rank, dtype=float)
        phase = theta @ k - float(theta0 @ k)
        return np.exp(self.concentration * np.cos(2 * np.pi * phase))

    def support(self, space: BSpace) -> tuple[float, float]:
        _, y0 = self.profile(space)
        r = SUPPORT_RADIUS * self.log_width
        return y0 - r, y0 + r

    def __call__(self, space: BSpace, a: BPoint) -> float:
        theta, y = space.log_coordinates(a.log)
        return float(self.radial(space, y) * self.torus(space, theta))


@dataclass(frozen=True)
class BumpCombination:
    """sum_i c_i (f_i1 x ... x f_in), a test function on B^n."""

    __test__ = False

    terms: tuple[tuple[complex, tuple[TestBump, ...]], ...]

    @classmethod
    def tensor(cls, *bumps: TestBump) -> "BumpCombination":
        return cls(((1.0, tuple(bumps)),))

    @property
    def arity(self) -> int:
        return len(self.terms[0][1])

    def __add__(self, other: "BumpCombination") -> "BumpCombination":
        if other.arity != self.arity:
            raise ValueError("arity mismatch")
        return BumpCombination(self.terms + other.terms)

    def scale(self, c: complex) -> "BumpCombination":
        return BumpCombination(tuple((c * k, t) for k, t in self.terms))

    def __call__(self, space: BSpace, a: Sequence[BPoint]) -> complex:
        total = 0j
        for c, bumps in self.terms:
            v = complex(c)
            for b, p in zip(bumps, a):
                v *= b(space, p)
            total += v
        return total


def as_combination(f) -> BumpCombination:
    if isinstance(f, BumpCombination):
        return f
    if isinstance(f, TestBump):
        return BumpCombination.tensor(f)
    raise TypeError("expected a TestBump or BumpCombination")


# --------------------------------------------------------------------------
# Forward transform


@dataclass(frozen=True)
class QuadratureGrid:
    torus_points: int = 64
    radial_points: int = 128
    tolerance: float = 1e-11
    max_doublings: int = 5


@lru_cache(maxsize=16)
def _gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(n)


def _radial_transform(space: BSpace, bump: TestBump, S: np.ndarray, n: int) -> np.ndarray:
    lo, hi = bump.support(space)
    x, wts = _gauss_legendre(n)
    y = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
    g = bump.radial(space, y) * wts * 0.5 * (hi - lo)
    return np.exp(np.multiply.outer(S, y)) @ g


def _torus_transform(space: BSpace, bump: TestBump, lam: np.ndarray, n: int) -> np.ndarray:
    """Trapezoid on [0,1)^rank; lam has shape (..., rank)."""
    if space.rank == 0:
        return np.ones(lam.shape[:-1])
    if space.rank != 1:
        raise NotImplementedError("torus transforms implemented for rank <= 1")
    theta = np.arange(n) / n
    vals = bump.torus(space, theta[:, None])
    return np.exp(2j * np.pi * np.multiply.outer(lam[..., 0], theta)) @ vals / n


def _guarded(fn: Callable[[int], np.ndarray], n0: int, grid: QuadratureGrid, what: str) -> np.ndarray:
    n = n0
    prev = fn(n)
    for _ in range(grid.max_doublings):
        n *= 2
        cur = fn(n)
        scale = max(1.0, float(np.max(np.abs(cur), initial=0.0)))
        if np.max(np.abs(cur - prev), initial=0.0) <= grid.tolerance * scale:
            return cur
        prev = cur
    raise QuadratureNotConverged(f"{what} quadrature did not settle after {grid.max_doublings} doublings")


def bump_transform(space: BSpace, bump: TestBump, lam, s, grid: QuadratureGrid = QuadratureGrid()) -> np.ndarray:
    """F of a single bump on B.

    ``s`` is an array; ``lam`` has shape ``(..., rank)`` broadcasting against it.
    """
    S = np.asarray(s, dtype=complex)
    R = _guarded(lambda n: _radial_transform(space, bump, S.ravel(), n), grid.radial_points, grid, "radial").reshape(S.shape)
    if space.rank == 0:
        return space.jacobian * R
    L = np.asarray(lam, dtype=float)
    flat = L.reshape(-1, space.rank)
    T = _guarded(lambda n: _torus_transform(space, bump, flat, n), grid.torus_points, grid, "torus")
    return space.jacobian * R * T.reshape(L.shape[:-1])


def fourier(space: BSpace, f, lam: Sequence, s: Sequence, grid: QuadratureGrid = QuadratureGrid()) -> complex:
    """F f(lam, s) for a bump combination on B^n with n <= 2.

    ``lam`` is a tuple of n lambda-vectors and ``s`` a tuple of n complex numbers.
    """
    f = as_combination(f)
    if f.arity > 2:
        raise NotImplementedError("transforms are implemented for n <= 2")
    if len(lam) != f.arity or len(s) != f.arity:
        raise ValueError("need one (lambda, s) per factor")
    total = 0j
    for c, bumps in f.terms:
        v = complex(c)
        for b, l, z in zip(bumps, lam, s):
            v *= complex(bump_transform(space, b, np.asarray(l, dtype=float).reshape(space.rank), z, grid))
        total += v
    return total


@dataclass(frozen=True)
class Transform:
    """The transform of a bump combination, as a value oracle on (Lambda* x C)^n.

    Keeps the tensor structure so the inverse transform can factor.
    """

    space: BSpace
    source: BumpCombination
    grid: QuadratureGrid = QuadratureGrid()

    @property
    def arity(self) -> int:
        return self.source.arity

    def factor(self, term: int, k: int, lam, S) -> np.ndarray:
        """Transform of one tensor factor; lam (..., rank) broadcasts against S."""
        bump = self.source.terms[term][1][k]
        return bump_transform(self.space, bump, lam, S, self.grid)

    def __call__(self, *z) -> complex:
        if len(z) == 1 and not isinstance(z[0], SpectralPoint):
            z = tuple(z[0])
        lam = tuple(p.lam for p in z)
        s = tuple(p.s for p in z)
        return fourier(self.space, self.source, lam, s, self.grid)

    def on_grid(self, lam, S: np.ndarray) -> np.ndarray:
        """Arity-1 values on an array of s for a fixed lambda."""
        if self.arity != 1:
            raise ValueError("on_grid is for arity 1")
        S = np.asarray(S, dtype=complex)
        L = np.asarray(lam, dtype=float).reshape(self.space.rank)
        out = np.zeros(S.shape, dtype=complex)
        for idx, (c, _) in enumerate(self.source.terms):
            out = out + c * self.factor(idx, 0, L, S)
        return out


def fourier_transform(space: BSpace, f, grid: QuadratureGrid = QuadratureGrid()) -> Transform:
    return Transform(space, as_combination(f), grid)


# --------------------------------------------------------------------------
# Inverse transform


@dataclass(frozen=True)
class InverseTransformConfig:
    sigma0: float | tuple[float, ...] = 0.0
    lam_bound: int = 8
    imag_bound: float = 40.0
    grid_step: float = 0.05
    tolerance: float = 1e-6
    check: bool = True

    def doubled(self) -> "InverseTransformConfig":
        return InverseTransformConfig(self.sigma0, 2 * self.lam_bound, 2 * self.imag_bound, self.grid_step / 2, self.tolerance, False)


def _lams(space: BSpace, bound: int) -> np.ndarray:
    if space.rank == 0:
        return np.zeros((1, 0))
    r = np.arange(-bound, bound + 1)
    return np.array(np.meshgrid(*[r] * space.rank, indexing="ij")).reshape(space.rank, -1).T


def _line(cfg: InverseTransformConfig, k: int) -> tuple[np.ndarray, float]:
    sig = cfg.sigma0 if isinstance(cfg.sigma0, (int, float)) else cfg.sigma0[k]
    t = np.arange(-cfg.imag_bound, cfg.imag_bound + 0.5 * cfg.grid_step, cfg.grid_step)
    return sig + 1j * t, float(sig)


def _inverse_1d(space: BSpace, values: Callable[[np.ndarray, np.ndarray], np.ndarray], point: BPoint, cfg: InverseTransformConfig, k: int = 0) -> complex:
    """(2 pi i J)^-1 sum_lam int g(lam, s) |a|^-s a^(-2 pi i lam) ds for one factor.

    ``values(lams, S)`` returns the matrix g(lams[i], S[j]).
    """
    theta, y = space.log_coordinates(point.log)
    S, _ = _line(cfg, k)
    lams = _lams(space, cfg.lam_bound)
    G = np.broadcast_to(values(lams, S), (len(lams), len(S)))
    # ds = i dt, so the prefactor becomes 1 / (2 pi J)
    integrals = G @ np.exp(-S * y) * cfg.grid_step
    phases = np.exp(-2j * np.pi * (lams @ theta)) if space.rank else np.ones(1)
    return complex(integrals @ phases) / (2 * np.pi * space.jacobian)


def inverse_fourier(space: BSpace, F, a: Sequence[BPoint], cfg: InverseTransformConfig = InverseTransformConfig()) -> complex:
    """Truncated G F at a point of B^n (n <= 2).

    ``F`` is a :class:`Transform` (tensor structure is exploited) or any
    callable on spectral points.  With ``cfg.check`` the computation is
    repeated with doubled bounds and finer step.
    """
    value = _inverse(space, F, tuple(a), cfg)
    if cfg.check:
        fine = _inverse(space, F, tuple(a), cfg.doubled())
        if abs(fine - value) > cfg.tolerance * max(1.0, abs(fine)):
            raise TruncationNotConverged(f"inverse transform moved by {abs(fine - value):.3g} under refinement")
    return value


def _inverse(space: BSpace, F, a: tuple[BPoint, ...], cfg: InverseTransformConfig) -> complex:
    n = len(a)
    if n > 2:
        raise NotImplementedError("inverse transforms are implemented for n <= 2")
    if isinstance(F, Transform):
        if F.arity != n:
            raise ValueError("arity mismatch")
        total = 0j
        for idx, (c, _) in enumerate(F.source.terms):
            v = complex(c)
            for k in range(n):
                v *= _inverse_1d(space, lambda L, S, idx=idx, k=k: F.factor(idx, k, L[:, None, :], S), a[k], cfg, k)
            total += v
        return total
    if n == 1:
        def values(lams, S):
            rows = []
            for lam in lams:
                lam_t = tuple(int(v) for v in lam)
                if hasattr(F, "on_grid"):
                    rows.append(F.on_grid(lam_t, S))
                else:
                    rows.append([F(SpectralPoint(lam_t, s)) for s in S])
            return np.array(rows, dtype=complex)

        return _inverse_1d(space, values, a[0], cfg)
    return _inverse_generic_2d(space, F, a, cfg)


def _inverse_generic_2d(space: BSpace, F, a, cfg: InverseTransformConfig) -> complex:
    S1, _ = _line(cfg, 0)
    S2, _ = _line(cfg, 1)
    th1, y1 = space.log_coordinates(a[0].log)
    th2, y2 = space.log_coordinates(a[1].log)
    e1 = np.exp(-S1 * y1)
    e2 = np.exp(-S2 * y2)
    total = 0j
    lams = _lams(space, cfg.lam_bound)
    for l1 in lams:
        for l2 in lams:
            p1 = tuple(int(v) for v in l1)
            p2 = tuple(int(v) for v in l2)
            G = np.array([[F(SpectralPoint(p1, u), SpectralPoint(p2, v)) for v in S2] for u in S1])
            integral = e1 @ G @ e2 * cfg.grid_step ** 2
            phase = np.exp(-2j * np.pi * (float(l1 @ th1) + float(l2 @ th2))) if space.rank else 1.0
            total += integral * phase
    return total / (2 * np.pi * space.jacobian) ** 2


def inverse_fourier_grid(space: BSpace, values: Callable[[tuple[int, ...], np.ndarray], np.ndarray], thetas: np.ndarray, ys: np.ndarray, cfg: InverseTransformConfig = InverseTransformConfig()) -> np.ndarray:
    """G g on the tensor grid thetas x ys for an arity-1 g; returns shape (len(thetas), len(ys)).

    ``values(lam, S)`` gives g(lam, s) on an array of s.  For rank 0 pass a
    single empty theta row.
    """
    S, _ = _line(cfg, 0)
    lams = _lams(space, cfg.lam_bound)
    G = np.array([np.broadcast_to(values(tuple(int(v) for v in l), S), S.shape) for l in lams])
    radial = G @ np.exp(-np.multiply.outer(S, ys)) * cfg.grid_step
    thetas = np.asarray(thetas, dtype=float).reshape(-1, space.rank) if space.rank else np.zeros((1, 0))
    phases = np.exp(-2j * np.pi * (thetas @ lams.T)) if space.rank else np.ones((len(thetas), 1))
    return phases @ radial / (2 * np.pi * space.jacobian)


def fourier_grid(space: BSpace, table: np.ndarray, thetas: np.ndarray, ys: np.ndarray, lam, s: complex) -> complex:
    """F of a function tabulated on a uniform torus grid times a uniform y grid (trapezoid in both)."""
    ys = np.asarray(ys, dtype=float)
    hy = ys[1] - ys[0]
    if space.rank:
        thetas = np.asarray(thetas, dtype=float).reshape(-1, space.rank)
        torus = np.exp(2j * np.pi * (thetas @ np.asarray(lam, dtype=float))) / len(thetas)
    else:
        torus = np.ones(1)
    return complex(space.jacobian * (torus @ table @ np.exp(complex(s) * ys)) * hy)
