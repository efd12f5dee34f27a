"""Permutations in one-line notation, inversion sets, shuffles and the block decomposition."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence, TypeVar

T = TypeVar("T")

InversionSet = frozenset  # of (i, j) pairs, 1-based, i < j


@dataclass(frozen=True, order=True)
class Permutation:
    """A permutation of 1..n stored by its images.

    Composition is ``(w * v)(i) = w(v(i))`` and the action on sequences is
    ``w(s)_i = s_{w^-1(i)}``, so ``(w * v)(s) == w(v(s))``.
    """

    images: tuple[int, ...]

    def __post_init__(self):
        imgs = tuple(int(v) for v in self.images)
        if sorted(imgs) != list(range(1, len(imgs) + 1)):
            raise ValueError(f"not a permutation of 1..{len(imgs)}: {imgs}")
        object.__setattr__(self, "images", imgs)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def from_cycles(cls, n: int, *cycles: Sequence[int]) -> "Permutation":
        imgs = list(range(1, n + 1))
        for cyc in cycles:
            for a, b in zip(cyc, list(cyc[1:]) + [cyc[0]]):
                imgs[a - 1] = b
        return cls(tuple(imgs))

    @classmethod
    def transposition(cls, n: int, i: int, j: int) -> "Permutation":
        return cls.from_cycles(n, (i, j))

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i - 1]

    def __mul__(self, other: "Permutation") -> "Permutation":
        if other.n != self.n:
            raise ValueError("size mismatch")
        return Permutation(tuple(self.images[v - 1] for v in other.images))

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, v in enumerate(self.images, start=1):
            inv[v - 1] = i
        return Permutation(tuple(inv))

    def act(self, seq: Sequence[T]) -> tuple[T, ...]:
        """w(s) with w(s)_i = s_{w^-1(i)}."""
        if len(seq) != self.n:
            raise ValueError("length mismatch")
        out: list = [None] * self.n
        for i, v in enumerate(self.images):
            out[v - 1] = seq[i]
        return tuple(out)

    def is_identity(self) -> bool:
        return all(v == i for i, v in enumerate(self.images, start=1))

    def length(self) -> int:
        return len(inversion_set(self))

    def cross(self, other: "Permutation") -> "Permutation":
        """Block product w' x w'' acting on 1..m and m+1..m+n."""
        m = self.n
        return Permutation(self.images + tuple(v + m for v in other.images))

    def restrict(self, lo: int, hi: int) -> "Permutation":
        """The block of a block-preserving permutation on lo..hi, relabelled from 1."""
        part = self.images[lo - 1:hi]
        if sorted(part) != list(range(lo, hi + 1)):
            raise ValueError("permutation does not preserve the block")
        return Permutation(tuple(v - lo + 1 for v in part))

    def cycles(self) -> list[tuple[int, ...]]:
        seen, out = set(), []
        for start in range(1, self.n + 1):
            if start in seen or self(start) == start:
                seen.add(start)
                continue
            cyc, i = [], start
            while i not in seen:
                seen.add(i)
                cyc.append(i)
                i = self(i)
            out.append(tuple(cyc))
        return out

    def cycle_string(self) -> str:
        cyc = self.cycles()
        return "".join("(" + " ".join(map(str, c)) + ")" for c in cyc) or "id"

    def __str__(self) -> str:
        return "[" + " ".join(map(str, self.images)) + "]"


def parse_permutation(text: str) -> Permutation:
    """Parse one-line notation such as ``2,3,1`` or ``[2 3 1]``."""
    parts = text.replace("[", " ").replace("]", " ").replace(",", " ").split()
    return Permutation(tuple(int(p) for p in parts))


def all_permutations(n: int) -> Iterator[Permutation]:
    for imgs in itertools.permutations(range(1, n + 1)):
        yield Permutation(imgs)


def inversion_set(w: Permutation) -> InversionSet:
    """Pairs i < j with w(i) > w(j)."""
    im = w.images
    return frozenset(
        (i + 1, j + 1)
        for i in range(len(im))
        for j in range(i + 1, len(im))
        if im[i] > im[j]
    )


def is_shuffle(w: Permutation, m: int) -> bool:
    im = w.images
    return all(im[i] < im[i + 1] for i in range(m - 1)) and all(
        im[i] < im[i + 1] for i in range(m, len(im) - 1)
    )


def enumerate_shuffles(m: int, n: int) -> list[Permutation]:
    """Sh(m, n): permutations increasing on 1..m and on m+1..m+n, in lexicographic order."""
    if m < 0 or n < 0:
        raise ValueError("m, n must be non-negative")
    total = m + n
    out = []
    for first in itertools.combinations(range(1, total + 1), m):
        chosen = set(first)
        rest = tuple(v for v in range(1, total + 1) if v not in chosen)
        out.append(Permutation(first + rest))
    return sorted(out)


def decompose(sigma: Permutation, m: int, n: int) -> tuple[Permutation, Permutation, Permutation]:
    """The unique (w', w'', w) with sigma = (w' x w'') w and w^-1 in Sh(m, n)."""
    if sigma.n != m + n:
        raise ValueError("size mismatch")
    inv = sigma.inverse()
    # b = w' x w'' sorts each block by sigma^-1, making sigma^-1 b increasing there
    first = sorted(range(1, m + 1), key=inv)
    second = sorted(range(m + 1, m + n + 1), key=inv)
    b = Permutation(tuple(first + second))
    w = b.inverse() * sigma
    return b.restrict(1, m), b.restrict(m + 1, m + n), w
