"""Mirror charts, local superpotentials and their embedding into the resolution.

Over the chart region ``U_k`` the mirror is a torus with coordinates
``(y1, y2)`` whose valuations are

    val(y1) = s,    val(y2) = psi(s, r) - k min(0, s).

The local superpotential is ``W_k = y2 (1 + y1)^k``.  On a wall overlap the
chart ``k + 1`` coordinates pass to chart ``k`` by ``y2 -> y2 (1 + y1)``, which
is the unique coordinate change fixing ``y1`` and matching ``W``.  The chart
``k`` torus embeds into the toric resolution through the affine chart
``(z_k, w_k) = ((1 + y1)/y2, y2)`` with ``y = y1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .aside import PsiFunction
from .novikov import DEFAULT_CUTOFF, NovikovNum, T, pow_int
from .params import BasePoint, ParamSet, in_chart
from .toric import NovToricPoint, chart_to_homogeneous, same_point


@dataclass(frozen=True)
class MirrorPoint:
    """Point ``(y1, y2)`` of the chart-``k`` torus, with its base point."""

    chart: int
    y1: NovikovNum
    y2: NovikovNum
    base: BasePoint

    def __post_init__(self):
        if self.y1.is_empty or self.y2.is_empty:
            raise ValueError("mirror coordinates must be nonzero")

    @property
    def s(self) -> float:
        return self.y1.val

    def to_json(self) -> dict:
        return {"chart": self.chart, "y1": self.y1.to_json(), "y2": self.y2.to_json(),
                "base": self.base.to_json()}

    @classmethod
    def from_json(cls, obj: dict) -> "MirrorPoint":
        b = obj["base"]
        return cls(int(obj["chart"]), NovikovNum.from_json(obj["y1"]),
                   NovikovNum.from_json(obj["y2"]), BasePoint(b["s"], b["r"]))


def _require_generic(P: ParamSet):
    if not P.generic:
        raise ValueError("mirror charts need distinct root norms")


def chart_exponent(k: int, s: float) -> float:
    """Shift ``k min(0, s)`` between ``psi`` and ``val(y2)`` in chart ``k``."""
    return k * min(0.0, s)


def fiber_point(q: BasePoint, k: int, unit1: NovikovNum, unit2: NovikovNum,
                P: ParamSet, psi_fn: PsiFunction | None = None,
                precision: float = DEFAULT_CUTOFF) -> MirrorPoint:
    """Point over ``q`` in chart ``k`` with the given angular units.

    ``precision`` is relative: each coordinate is known to ``precision``
    orders beyond its leading term, whatever the size of ``psi``.

    Raises
    ------
    ValueError
        If ``q`` is outside ``U_k`` or a unit does not have valuation 0.
    """
    _require_generic(P)
    if not in_chart(P, k, q):
        raise ValueError(f"base point ({q.s}, {q.r}) is outside chart region U_{k}")
    for u in (unit1, unit2):
        if u.is_empty or u.val != 0:
            raise ValueError("units must have valuation 0")
    psi_fn = psi_fn or PsiFunction(P)
    c = psi_fn(q.s, q.r) - chart_exponent(k, q.s)
    y1 = unit1 * T(q.s, cutoff=q.s + precision)
    y2 = unit2 * T(c, cutoff=c + precision)
    return MirrorPoint(k, y1, y2, q)


def W_local(k: int, y1: NovikovNum, y2: NovikovNum) -> NovikovNum:
    """Local superpotential ``y2 (1 + y1)^k``."""
    return y2 * pow_int(y1 + 1, k)


def phi_transition(y1: NovikovNum, y2: NovikovNum, direction: str = "down") -> tuple:
    """Coordinate change across a wall overlap.

    ``"down"`` takes chart ``k + 1`` coordinates to chart ``k``:
    ``y2 -> y2 (1 + y1)``, so that ``W_k(down(y)) = W_{k+1}(y)``.
    ``"up"`` is its inverse.

    Raises
    ------
    ValueError
        If ``val(y1) = 0`` (the point lies on the wall itself).
    """
    if y1.is_empty or y1.val == 0:
        raise ValueError("on wall: transition needs val(y1) != 0")
    if direction == "down":
        return y1, y2 * (y1 + 1)
    if direction == "up":
        return y1, y2 / (y1 + 1)
    raise ValueError(f"unknown direction {direction!r}")


def transport(m: MirrorPoint, k: int, P: ParamSet) -> MirrorPoint:
    """The same mirror point written in the adjacent chart ``k``."""
    if abs(k - m.chart) != 1:
        raise ValueError("charts must be adjacent")
    if not in_chart(P, k, m.base):
        raise ValueError(f"base point is outside U_{k}")
    y1, y2 = phi_transition(m.y1, m.y2, "down" if k < m.chart else "up")
    return MirrorPoint(k, y1, y2, m.base)


def g_embed(m: MirrorPoint, n: int, placement: str | None = None) -> NovToricPoint:
    """Homogeneous coordinates of the image of ``m`` in the resolution.

    ``"minus"`` places ``((1 + y1)/y2, y2)`` in the affine chart ``sigma_k``
    (needs ``k <= n``); ``"plus"`` places ``(1/y2, y2 (1 + y1))`` in
    ``sigma_{k-1}`` (needs ``k >= 1``).  The two differ by a bump element of
    ``G`` and so give the same point.  By default ``"minus"`` is used unless
    ``k = n + 1``.
    """
    k = m.chart
    if placement is None:
        placement = "minus" if k <= n else "plus"
    if placement == "minus":
        if k > n:
            raise ValueError("minus placement needs chart k <= n")
        return chart_to_homogeneous(k, (m.y1 + 1) / m.y2, m.y2, n, y=m.y1)
    if placement == "plus":
        if k < 1:
            raise ValueError("plus placement needs chart k >= 1")
        return chart_to_homogeneous(k - 1, 1 / m.y2, m.y2 * (m.y1 + 1), n, y=m.y1)
    raise ValueError(f"unknown placement {placement!r}")


def g_embed_checked(m: MirrorPoint, n: int) -> NovToricPoint:
    """``g_embed`` with both placements compared when both exist."""
    p = g_embed(m, n)
    if 1 <= m.chart <= n and not same_point(p, g_embed(m, n, "plus")):
        raise AssertionError("minus and plus placements disagree")
    return p


def pi0_dual(m: MirrorPoint, P: ParamSet, psi_fn: PsiFunction | None = None) -> BasePoint:
    """Base point ``(s, r)`` recovered from valuations alone."""
    psi_fn = psi_fn or PsiFunction(P)
    s = m.y1.val
    c = m.y2.val + chart_exponent(m.chart, s)
    if not math.isfinite(c) or c <= 0:
        raise ValueError(f"valuation {c} is not a value of psi")
    return BasePoint(s, psi_fn.inverse(s, c))
