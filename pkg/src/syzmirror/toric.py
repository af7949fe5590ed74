"""Toric resolution of the A_n singularity in homogeneous coordinates.

The fan has rays ``v_k = (k, 1)`` for ``0 <= k <= n+1`` and 2-cones
``sigma_k = <v_k, v_{k+1}>``.  A point of the total space over the ``y``-line
is ``[x_0 : ... : x_{n+1}]`` together with ``y``, subject to

    x_0 x_1 ... x_{n+1} = 1 + y,

modulo ``G = {t : prod t_j = prod t_j^j = 1}`` acting on ``x``, and away from
the irrelevant locus ``{x_i = x_j = 0, j - i >= 2}``.  On the chart of
``sigma_k`` the affine coordinates are

    z_k = prod_j x_j^(k+1-j),    w_k = prod_j x_j^(j-k),

so that ``z_k w_k = 1 + y``, ``w_{k+1} = 1/z_k`` and ``z_{k+1} w_{k+1} = z_k w_k``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .novikov import NovikovNum, pow_int


@dataclass(frozen=True)
class FanData:
    n: int

    @property
    def rays(self) -> list:
        return [(k, 1) for k in range(self.n + 2)]

    @property
    def cones(self) -> list:
        return [(k, k + 1) for k in range(self.n + 1)]

    def is_smooth(self) -> bool:
        r = self.rays
        return all(abs(int(round(np.linalg.det(np.array([r[i], r[j]]))))) == 1
                   for i, j in self.cones)


def _prod(xs):
    out = xs[0]
    for x in xs[1:]:
        out = out * x
    return out


@dataclass(frozen=True)
class NovToricPoint:
    """Homogeneous coordinates ``x`` and base coordinate ``y``.

    Zero coordinates must be ``NovikovNum.zero()``.  Construction checks the
    irrelevant locus, ``y != 0`` and ``prod x_j = 1 + y`` below the cutoff.
    """

    x: tuple
    y: NovikovNum
    check: bool = True

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(self.x))
        if len(self.x) < 3:
            raise ValueError("need n + 2 >= 3 homogeneous coordinates")
        zeros = [j for j, xj in enumerate(self.x) if xj.exact_zero]
        for i in zeros:
            for j in zeros:
                if j - i >= 2:
                    raise ValueError(f"x_{i} = x_{j} = 0 lies in the irrelevant locus")
        if self.y.is_empty:
            raise ValueError("y must be nonzero")
        if self.check:
            lhs = _prod(self.x)
            rhs = self.y + 1
            if not lhs.approx_equal(rhs, coeff_tol=1e-8):
                raise ValueError(f"prod x_j = {lhs!r} differs from 1 + y = {rhs!r}")

    @property
    def n(self) -> int:
        return len(self.x) - 2

    def to_json(self) -> dict:
        return {"x": [xj.to_json() for xj in self.x], "y": self.y.to_json()}

    @classmethod
    def from_json(cls, obj: dict) -> "NovToricPoint":
        return cls(tuple(NovikovNum.from_json(v) for v in obj["x"]),
                   NovikovNum.from_json(obj["y"]))


@dataclass(frozen=True)
class TropToricPoint:
    """Valuations ``(val x_0, ..., val x_{n+1})`` and ``val y``.

    ``math.inf`` marks a vanishing coordinate.  The sum of the finite ``vx``
    equals ``val(1 + y)``, which is ``min(0, vy)`` unless ``vy = 0``, where it
    can be any value ``>= 0``.
    """

    vx: tuple
    vy: float
    check: bool = True

    def __post_init__(self):
        object.__setattr__(self, "vx", tuple(float(v) for v in self.vx))
        object.__setattr__(self, "vy", float(self.vy))
        if not math.isfinite(self.vy):
            raise ValueError("val(y) must be finite")
        if any(v == -math.inf or math.isnan(v) for v in self.vx):
            raise ValueError("coordinate valuations must be finite or +inf")
        inf = self.infinite
        if len(inf) > 2 or (len(inf) == 2 and inf[1] - inf[0] != 1):
            raise ValueError(f"vanishing coordinates {inf} lie in the irrelevant locus")
        if not self.check:
            return
        if inf:
            if self.vy != 0:
                raise ValueError("a vanishing coordinate forces y = -1, so val(y) = 0")
            return
        total = sum(self.vx)
        tol = 1e-9 * max(1.0, sum(abs(v) for v in self.vx))
        if self.vy != 0 and abs(total - min(0.0, self.vy)) > tol:
            raise ValueError(f"sum of val(x_j) = {total} but val(1 + y) = {min(0.0, self.vy)}")
        if self.vy == 0 and total < -tol:
            raise ValueError(f"sum of val(x_j) = {total} < 0 while val(y) = 0")

    @property
    def n(self) -> int:
        return len(self.vx) - 2

    @property
    def infinite(self) -> list:
        return [j for j, v in enumerate(self.vx) if v == math.inf]

    def to_json(self) -> dict:
        return {"vx": ["inf" if v == math.inf else v for v in self.vx], "vy": self.vy}

    @classmethod
    def from_json(cls, obj: dict) -> "TropToricPoint":
        return cls(tuple(math.inf if v == "inf" else float(v) for v in obj["vx"]),
                   float(obj["vy"]))


def weighted_sum(coeffs: Sequence[float], vx: Sequence[float]) -> float:
    """``sum c_j vx_j`` with ``0 * inf = 0``.

    Raises if infinities of both signs would be added.
    """
    pos = neg = False
    total = 0.0
    for c, v in zip(coeffs, vx):
        if v == math.inf:
            if c > 0:
                pos = True
            elif c < 0:
                neg = True
        else:
            total += c * v
    if pos and neg:
        raise ValueError("undefined sum inf - inf")
    return math.inf if pos else (-math.inf if neg else total)


# group action -----------------------------------------------------------------

def group_element(free: Sequence[NovikovNum]) -> tuple:
    """Element of ``G`` from free coordinates ``t_2, ..., t_{n+1}``.

    ``t_1`` and ``t_0`` are solved from ``prod t_j^j = 1`` and ``prod t_j = 1``.
    """
    free = list(free)
    if not free:
        raise ValueError("need at least one free coordinate (n >= 1)")
    rest = weighted = NovikovNum.one(math.inf)
    for j, t in enumerate(free, start=2):
        rest = rest * t
        weighted = weighted * pow_int(t, j)
    t1 = 1 / weighted
    t0 = 1 / (t1 * rest)
    return (t0, t1, *free)


def bump(n: int, k: int, t: NovikovNum) -> tuple:
    """``(1, ..., 1, 1/t, t^2, 1/t, 1, ..., 1)`` centred at ``1 <= k <= n``."""
    if not 1 <= k <= n:
        raise ValueError(f"bump centre {k} must lie in [1, {n}]")
    one = NovikovNum.one(math.inf)
    out = [one] * (n + 2)
    ti = 1 / t
    out[k - 1], out[k], out[k + 1] = ti, t * t, ti
    return tuple(out)


def check_group(t: Sequence[NovikovNum], coeff_tol: float = 1e-8):
    one = NovikovNum.one(min(tj.cutoff for tj in t))
    p0 = _prod(list(t))
    p1 = _prod([pow_int(tj, j) for j, tj in enumerate(t)])
    if not (p0.approx_equal(one, coeff_tol) and p1.approx_equal(one, coeff_tol)):
        raise ValueError("element violates prod t_j = prod t_j^j = 1")


def g_act(t: Sequence[NovikovNum], p: NovToricPoint) -> NovToricPoint:
    """Rescale homogeneous coordinates by ``t`` in ``G``; ``y`` is unchanged."""
    if len(t) != len(p.x):
        raise ValueError("group element has the wrong length")
    check_group(t)
    return NovToricPoint(tuple(tj * xj for tj, xj in zip(t, p.x)), p.y)


# charts -----------------------------------------------------------------------

def chart_to_homogeneous(k: int, z: NovikovNum, w: NovikovNum, n: int,
                         y: NovikovNum | None = None) -> NovToricPoint:
    """``(z_k, w_k) -> [1 : ... : 1 : z : w : 1 : ... : 1]`` with ``x_k = z``."""
    if not 0 <= k <= n:
        raise ValueError(f"cone index {k} out of range")
    x = [NovikovNum.one(math.inf)] * (n + 2)
    x[k], x[k + 1] = z, w
    if y is None:
        y = z * w - 1
    return NovToricPoint(tuple(x), y)


def in_chart(p: NovToricPoint, k: int) -> bool:
    return all(not xj.exact_zero for j, xj in enumerate(p.x) if j not in (k, k + 1))


def chart_coords(p: NovToricPoint, k: int) -> tuple:
    """Affine coordinates ``(z_k, w_k)`` on the chart of ``sigma_k``."""
    if not 0 <= k <= p.n:
        raise ValueError(f"cone index {k} out of range")
    if not in_chart(p, k):
        raise ValueError(f"point lies outside chart {k}")
    z = w = NovikovNum.one(math.inf)
    for j, xj in enumerate(p.x):
        if k + 1 - j:
            z = z * pow_int(xj, k + 1 - j)
        if j - k:
            w = w * pow_int(xj, j - k)
    if p.x[k].exact_zero:
        z = NovikovNum.zero(z.cutoff)
    if p.x[k + 1].exact_zero:
        w = NovikovNum.zero(w.cutoff)
    return z, w


def normal_form(p: NovToricPoint) -> tuple:
    """``(k, z_k, w_k, y)`` in the first chart containing ``p``; a G-invariant."""
    for k in range(p.n + 1):
        if in_chart(p, k):
            z, w = chart_coords(p, k)
            return k, z, w, p.y
    raise ValueError("point lies in no chart")


def placement_chart(p: NovToricPoint) -> int | None:
    """Chart ``k`` with ``x_j = 1`` exactly for all ``j`` other than ``k, k + 1``."""
    one = NovikovNum.one(math.inf)
    for k in range(p.n + 1):
        if all(xj == one for j, xj in enumerate(p.x) if j not in (k, k + 1)):
            return k
    return None


def same_point(p: NovToricPoint, q: NovToricPoint, coeff_tol: float = 1e-8) -> bool:
    """Equality in the quotient, compared in one affine chart holding both points.

    Charts are injective, so any common chart decides.  A chart in which one
    of the points is already placed is preferred: its coordinates there need
    no series inversion.
    """
    if p.n != q.n or not p.y.approx_equal(q.y, coeff_tol):
        return False
    if divisor_membership(p) != divisor_membership(q):
        return False
    prefer = [k for k in (placement_chart(p), placement_chart(q)) if k is not None]
    common = [k for k in prefer + list(range(p.n + 1)) if in_chart(p, k) and in_chart(q, k)]
    if not common:
        return False
    k = common[0]
    return all(u.approx_equal(v, coeff_tol)
               for u, v in zip(chart_coords(p, k), chart_coords(q, k)))


# divisors and orbits ----------------------------------------------------------

def divisor_membership(p: NovToricPoint) -> frozenset:
    return frozenset(j for j, xj in enumerate(p.x) if xj.exact_zero)


def orbit_of(p: NovToricPoint) -> tuple:
    """``("torus",)``, ``("ray", k)`` for ``O(v_k)`` or ``("cone", k)`` for ``O(sigma_k)``."""
    z = sorted(divisor_membership(p))
    if not z:
        return ("torus",)
    if len(z) == 1:
        return ("ray", z[0])
    return ("cone", z[0])


def val_point(p: NovToricPoint) -> TropToricPoint:
    vy = p.y.val
    vx = tuple(xj.val for xj in p.x)
    return TropToricPoint(vx, vy, check=False)


def in_Y_domain(p: TropToricPoint) -> bool:
    """``sum_j j val(x_j) > 0``, i.e. ``|prod x_j^j| < 1``."""
    return weighted_sum(range(len(p.vx)), p.vx) > 0
