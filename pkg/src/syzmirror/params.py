"""Parameter sets, base points and the chart regions of the base.

The polynomial ``h(z) = prod_k (z - a_k)`` has simple nonzero roots.  The
base ``B = R x R_{>0}`` carries walls at ``r = |a_k|``; its chart regions
``U_k`` are the open strip ``R_k`` between consecutive norms together with
thin one-sided neighbourhoods of the adjacent walls.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class BasePoint:
    """Point ``(s, r)`` of the base, ``r > 0``."""

    s: float
    r: float

    def __post_init__(self):
        if not (self.r > 0 and math.isfinite(self.r) and math.isfinite(self.s)):
            raise ValueError(f"base point needs finite s and r > 0, got ({self.s}, {self.r})")

    def to_json(self) -> dict:
        return {"s": self.s, "r": self.r}


@dataclass(frozen=True)
class ParamSet:
    """Roots of ``h`` and representative radii.

    Parameters
    ----------
    a : sequence of complex
        The ``n + 1`` roots, nonzero and pairwise distinct.
    radii : sequence of float, optional
        Radii interlacing the distinct norm levels.  Defaults to midpoints
        between consecutive levels, half the smallest level below, and the
        largest level plus one above.
    norm_tol : float
        Relative tolerance under which two norms count as the same level.
    """

    a: tuple
    radii: tuple = None
    norm_tol: float = 1e-12
    levels: tuple = field(init=False, repr=False, compare=False)
    _norm_of: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        a = tuple(complex(x) for x in self.a)
        object.__setattr__(self, "a", a)
        if len(a) < 2:
            raise ValueError("need at least two roots (n >= 1)")
        if any(x == 0 for x in a):
            raise ValueError("roots must be nonzero so that h(0) != 0")
        for i in range(len(a)):
            for j in range(i):
                if a[i] == a[j]:
                    raise ValueError(f"repeated root a_{j} = a_{i}")
        norms = sorted(abs(x) for x in a)
        levels = [norms[0]]
        for v in norms[1:]:
            if v - levels[-1] > self.norm_tol * v:
                levels.append(v)
        object.__setattr__(self, "levels", tuple(levels))
        snapped = []
        for x in a:
            i = int(np.argmin([abs(abs(x) - lv) for lv in levels]))
            snapped.append(levels[i])
        object.__setattr__(self, "_norm_of", tuple(snapped))

        if self.radii is None:
            r = [levels[0] / 2]
            r += [(lo + hi) / 2 for lo, hi in zip(levels, levels[1:])]
            r.append(levels[-1] + 1.0)
        else:
            r = [float(x) for x in self.radii]
        if len(r) != len(levels) + 1:
            raise ValueError(f"expected {len(levels) + 1} radii, got {len(r)}")
        bounds = [0.0] + list(levels) + [math.inf]
        for k, rk in enumerate(r):
            if not bounds[k] < rk < bounds[k + 1]:
                raise ValueError(f"radius r_{k} = {rk} does not interlace the norms")
        object.__setattr__(self, "radii", tuple(r))

    @property
    def n(self) -> int:
        return len(self.a) - 1

    def norm(self, k: int) -> float:
        """Canonical norm ``|a_k|`` (collided norms share one float)."""
        return self._norm_of[k]

    @property
    def norms(self) -> tuple:
        return self._norm_of

    @property
    def generic(self) -> bool:
        """True when all norms are distinct."""
        return len(self.levels) == len(self.a)

    @property
    def norm_sorted(self) -> bool:
        """True when ``|a_0| < |a_1| < ... < |a_n|``."""
        return all(x < y for x, y in zip(self._norm_of, self._norm_of[1:]))

    def require_sorted(self):
        if not self.norm_sorted:
            raise ValueError("operation needs strictly increasing root norms |a_0| < ... < |a_n|")

    @property
    def wall_margin(self) -> float:
        """Half-width of the wall neighbourhoods ``N_{k+-}``."""
        gaps = [self.levels[0]] + [y - x for x, y in zip(self.levels, self.levels[1:])]
        return 0.25 * min(gaps)

    def sorted(self) -> "ParamSet":
        """Copy with roots reordered by norm (radii kept)."""
        return ParamSet(tuple(sorted(self.a, key=abs)), self.radii, self.norm_tol)

    # polynomial -----------------------------------------------------------

    def h(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.ones_like(z)
        for ak in self.a:
            out = out * (z - ak)
        return out

    def dh(self, z):
        """Derivative by the product rule (exact at the roots)."""
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for k in range(len(self.a)):
            term = np.ones_like(z)
            for j, aj in enumerate(self.a):
                if j != k:
                    term = term * (z - aj)
            out = out + term
        return out

    # serialization --------------------------------------------------------

    def to_json(self) -> dict:
        return {"n": self.n, "a": [[x.real, x.imag] for x in self.a],
                "r": list(self.radii)}

    @classmethod
    def from_json(cls, obj: dict) -> "ParamSet":
        a = [complex(*x) if isinstance(x, (list, tuple)) else complex(x) for x in obj["a"]]
        if "n" in obj and obj["n"] != len(a) - 1:
            raise ValueError(f"n = {obj['n']} but {len(a)} roots given")
        return cls(tuple(a), tuple(obj["r"]) if obj.get("r") else None)


REFERENCE = ParamSet((1.0, 2.0j, -3.0), (0.5, 1.5, 2.5, 4.0))


# chart regions --------------------------------------------------------------

def strip_index(P: ParamSet, r: float) -> int | None:
    """Index ``k`` with ``r`` in the open strip ``R_k``, or None on a wall."""
    for k, lv in enumerate(P.levels):
        if r < lv:
            return k
        if r == lv:
            return None
    return len(P.levels)


def in_chart(P: ParamSet, k: int, q: BasePoint, margin: float | None = None) -> bool:
    """Membership of ``q`` in ``U_k = R_k u N_{(k-1)+-} u N_{k+-}``."""
    m = P.wall_margin if margin is None else margin
    lv = P.levels
    if not 0 <= k <= len(lv):
        return False
    lo = lv[k - 1] if k >= 1 else 0.0
    hi = lv[k] if k < len(lv) else math.inf
    if lo < q.r < hi:
        return True
    if q.s == 0:
        return False
    return (k >= 1 and abs(q.r - lo) < m) or (k < len(lv) and abs(q.r - hi) < m)


def charts_containing(P: ParamSet, q: BasePoint, margin: float | None = None) -> list[int]:
    return [k for k in range(len(P.levels) + 1) if in_chart(P, k, q, margin)]
