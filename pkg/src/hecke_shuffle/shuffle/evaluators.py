"""Lazy evaluators on (Lambda* x C)^n and the shuffle product.

An evaluator is an immutable value oracle with a canonical text form.
Shuffle products build expression trees; one top-level call memoizes the
values of subtrees at the point tuples it meets.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ..errors import PoleProximity
from ..lfunction import Kernel, SpectralPoint
from .kernels import phi_w
from .permutations import Permutation, all_permutations, enumerate_shuffles

Points = tuple[SpectralPoint, ...]


class Evaluator:
    arity: int

    def text(self) -> str:
        raise NotImplementedError

    def _eval(self, z: Points, memo: dict) -> complex:
        raise NotImplementedError

    def __call__(self, *z) -> complex:
        if len(z) == 1 and not isinstance(z[0], SpectralPoint):
            z = tuple(z[0])
        if len(z) != self.arity:
            raise ValueError(f"expected {self.arity} points, got {len(z)}")
        value = self._eval(tuple(z), {})
        if not (math.isfinite(value.real) and math.isfinite(value.imag)):
            raise PoleProximity(f"non-finite value from {self.text()}")
        return value

    def __str__(self) -> str:
        return self.text()


@dataclass(frozen=True)
class Unit(Evaluator):
    """The arity-0 unit of the graded algebra."""

    arity: int = 0

    def text(self) -> str:
        return "unit"

    def _eval(self, z, memo):
        return complex(1.0)


@dataclass(frozen=True)
class GaussianGenerator(Evaluator):
    """exp(sum_i w_i^2 s_i^2 / 2 + c_i s_i - kappa |lam_i|^2 + i beta.lam_i) + rho s_1 s_2).

    Entire in each s and Gaussian in Im s, the Fourier image of a
    Gaussian-in-log bump; ``rho`` couples the variables when arity is 2.
    """

    name: str
    widths: tuple[float, ...]
    shifts: tuple[complex, ...]
    kappa: float = 0.3
    beta: float = 0.0
    rho: float = 0.0

    @property
    def arity(self) -> int:
        return len(self.widths)

    def text(self) -> str:
        return f"gen:{self.name}"

    def value(self, lam, s) -> complex:
        """Arity-1 shortcut taking a bare (lam, s)."""
        return self._eval((SpectralPoint(lam, s),), {})

    def _eval(self, z, memo):
        acc = 0j
        for w, c, p in zip(self.widths, self.shifts, z):
            lam = np.asarray(p.lam, dtype=float)
            acc += 0.5 * w * w * p.s * p.s + c * p.s - self.kappa * float(lam @ lam) + 1j * self.beta * float(lam.sum())
        if self.arity == 2:
            acc += self.rho * z[0].s * z[1].s
        return complex(np.exp(acc))


@dataclass(frozen=True)
class FunctionEvaluator(Evaluator):
    """Wraps a plain callable ``f(points) -> complex``."""

    arity: int
    fn: Callable[[Points], complex] = field(compare=False)
    label: str = "fn"

    def text(self) -> str:
        return f"fn:{self.label}"

    def _eval(self, z, memo):
        return complex(self.fn(z))


@dataclass(frozen=True, eq=False)
class ShuffleNode(Evaluator):
    left: Evaluator
    right: Evaluator
    kernel: Kernel

    @property
    def arity(self) -> int:
        return self.left.arity + self.right.arity

    def text(self) -> str:
        return f"shuffle({self.left.text()}, {self.right.text()})"

    def _eval(self, z, memo):
        key = (id(self), z)
        hit = memo.get(key)
        if hit is not None:
            return hit
        m = self.left.arity
        total = 0j
        # fixed summation order: shuffles in lexicographic order
        for w in enumerate_shuffles(m, self.right.arity):
            picked = tuple(z[w(i) - 1] for i in range(1, w.n + 1))
            term = self.left._eval(picked[:m], memo)
            if term == 0:
                continue
            term *= self.right._eval(picked[m:], memo)
            if term == 0:
                continue
            total += term * phi_w(self.kernel, w.inverse(), z)
        memo[key] = total
        return total


def shuffle_product(F: Evaluator, G: Evaluator, kernel: Kernel) -> Evaluator:
    """(F (s) G)(z) = sum over w in Sh(m,n) of F(z_w(1..m)) G(z_w(m+1..)) Phi_{K,w^-1}(z)."""
    if F.arity == 0:
        return G
    if G.arity == 0:
        return F
    return ShuffleNode(F, G, kernel)


def iterated_shuffle(factors: Sequence[Evaluator], kernel: Kernel) -> Evaluator:
    """Left-nested product ((f1 (s) f2) (s) f3) ..."""
    acc: Evaluator = Unit()
    for f in factors:
        acc = shuffle_product(acc, f, kernel)
    return acc


def ch_symmetrization(phis: Sequence[Evaluator], z: Sequence[SpectralPoint], kernel: Kernel) -> complex:
    """sum over sigma in Perm_n of prod_i phi_i(sigma(z)_i) Phi_{K,sigma}(z)."""
    n = len(phis)
    if len(z) != n:
        raise ValueError("one point per factor required")
    if any(p.arity != 1 for p in phis):
        raise ValueError("ch_symmetrization takes arity-1 evaluators")
    z = tuple(z)
    total = 0j
    for sigma in all_permutations(n):
        moved = sigma.act(z)
        term = complex(1.0)
        for phi, p in zip(phis, moved):
            term *= phi._eval((p,), {})
        if term == 0:
            continue
        total += term * phi_w(kernel, sigma, z)
    return total


# --------------------------------------------------------------------------
# Generator registry and canonical text


def make_generator(index: int, arity: int = 1, seed: int = 42) -> GaussianGenerator:
    """Deterministic generator ``g<index>`` (arity 1) or ``h<index>`` (arity 2)."""
    rng = np.random.default_rng([seed, arity, index])
    widths = tuple(float(v) for v in rng.uniform(0.3, 0.8, arity))
    shifts = tuple(complex(a, b) for a, b in zip(rng.uniform(-0.5, 0.5, arity), rng.uniform(-0.5, 0.5, arity)))
    kappa = float(rng.uniform(0.2, 0.6))
    beta = float(rng.uniform(-1.0, 1.0))
    rho = float(rng.uniform(-0.2, 0.2)) if arity == 2 else 0.0
    prefix = "g" if arity == 1 else "h"
    return GaussianGenerator(f"{prefix}{index}", widths, shifts, kappa, beta, rho)


def lookup_generator(name: str, seed: int = 42) -> GaussianGenerator:
    m = re.fullmatch(r"([gh])(\d+)", name.strip())
    if not m:
        raise ValueError(f"unknown generator {name!r}; expected g<k> or h<k>")
    return make_generator(int(m.group(2)), 1 if m.group(1) == "g" else 2, seed)


def parse_expression(text: str, kernel: Kernel, seed: int = 42) -> Evaluator:
    """Inverse of ``Evaluator.text`` for generator/shuffle trees."""
    pos = 0

    def parse() -> Evaluator:
        nonlocal pos
        rest = text[pos:].lstrip()
        pos = len(text) - len(rest)
        if rest.startswith("unit"):
            pos += 4
            return Unit()
        if rest.startswith("gen:"):
            m = re.match(r"gen:([gh]\d+)", rest)
            if not m:
                raise ValueError(f"bad generator at {pos}")
            pos += m.end()
            return lookup_generator(m.group(1), seed)
        if rest.startswith("shuffle("):
            pos += len("shuffle(")
            a = parse()
            _expect(",")
            b = parse()
            _expect(")")
            return ShuffleNode(a, b, kernel)
        raise ValueError(f"cannot parse expression at {pos}: {rest[:20]!r}")

    def _expect(ch: str) -> None:
        nonlocal pos
        rest = text[pos:].lstrip()
        if not rest.startswith(ch):
            raise ValueError(f"expected {ch!r} at {pos}")
        pos = len(text) - len(rest) + 1

    expr = parse()
    if text[pos:].strip():
        raise ValueError("trailing input in expression")
    return expr
