"""The kernels Phi_{K,w}(z) = prod over I_w of Phi_K(z_j - z_i)."""
from __future__ import annotations

from typing import Sequence

from ..errors import HeckeShuffleError
from ..lfunction import Kernel, SpectralPoint
from .permutations import Permutation, inversion_set


def point_difference(zj: SpectralPoint, zi: SpectralPoint) -> tuple[tuple[int, ...], complex]:
    return tuple(a - b for a, b in zip(zj.lam, zi.lam)), zj.s - zi.s


def negate(z: Sequence[SpectralPoint]) -> tuple[SpectralPoint, ...]:
    return tuple(SpectralPoint(tuple(-v for v in p.lam), -p.s) for p in z)


def phi_w_factors(w: Permutation, z: Sequence[SpectralPoint]) -> list[tuple[tuple[int, int], tuple[int, ...], complex]]:
    """The factor arguments of Phi_{K,w}(z), sorted by inversion pair."""
    if len(z) != w.n:
        raise ValueError("point tuple length must equal n")
    return [((i, j), *point_difference(z[j - 1], z[i - 1])) for i, j in sorted(inversion_set(w))]


def phi_w(kernel: Kernel, w: Permutation, z: Sequence[SpectralPoint]) -> complex:
    """Phi_{K,w}(z); factor failures are re-raised naming the offending pair."""
    value = complex(1.0)
    for pair, lam, s in phi_w_factors(w, z):
        try:
            value *= kernel(lam, s)
        except HeckeShuffleError as exc:
            exc.args = (f"{exc.args[0] if exc.args else exc} [pair {pair}]",) + exc.args[1:]
            exc.pair = pair
            raise
    return value
