"""The piecewise-linear surface, the embedding ``j`` and the tropical map ``F``.

Write ``psi_0(s) <= ... <= psi_n(s)`` for ``psi(s, |a_j|)`` in increasing
order and ``{...}_[k]`` for the ``(k+1)``-th smallest element of a sample.
The surface is

    gamma(s, c) = ({c, psi_0, ..., psi_n}_[0], ..., {c, psi_0, ..., psi_n}_[n+1], s),

``j(s, r) = gamma(s, psi(s, r))`` embeds the base, and on the toric
resolution

    F_k = {sum_j (j - k) val(x_j) + k min(0, val y), psi_0(val y), ..., psi_n(val y)}_[k]

with last coordinate ``val y``.  The composite ``f = j^-1 o F`` is the
non-archimedean fibration.  Its singular points are the corners
``A_k(0) = gamma(0, psi_k(0))``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .aside import PsiFunction
from .novikov import NovikovNum, T
from .params import BasePoint, ParamSet
from .toric import (NovToricPoint, TropToricPoint, chart_to_homogeneous, in_Y_domain,
                    val_point, weighted_sum)

PSI_MATCH_TOL = 1e-7


def order_stat(sample: Sequence[float], k: int) -> float:
    """``(k+1)``-th smallest element; ties and infinities allowed."""
    if not 0 <= k < len(sample):
        raise ValueError(f"order index {k} out of range for {len(sample)} values")
    return sorted(float(x) for x in sample)[k]


def _psi_fn(P: ParamSet, psi_fn: PsiFunction | None) -> PsiFunction:
    return psi_fn if psi_fn is not None else PsiFunction(P)


def psi_levels(s: float, P: ParamSet, psi_fn: PsiFunction | None = None) -> tuple:
    """Sorted ``(psi(s, |a_j|))_j`` with multiplicity."""
    return tuple(sorted(_psi_fn(P, psi_fn).levels(s)))


@dataclass(frozen=True)
class SurfacePoint:
    """Point ``(gamma_0, ..., gamma_{n+1}, s)`` of ``R^{n+3}``."""

    coords: tuple

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(float(x) for x in self.coords))

    @property
    def s(self) -> float:
        return self.coords[-1]

    @property
    def gammas(self) -> tuple:
        return self.coords[:-1]

    def deviation(self, other: "SurfacePoint") -> float:
        return float(np.max(np.abs(np.subtract(self.coords, other.coords))))

    def to_json(self) -> dict:
        return {"coords": list(self.coords)}


def _gamma_from_levels(c: float, levels: Sequence[float], k: int) -> float:
    # closed form of the order statistic for sorted levels
    lo = levels[k - 1] if k >= 1 else -math.inf
    hi = levels[k] if k < len(levels) else math.inf
    return min(max(c, lo), hi)


def gamma_k(s: float, c: float, k: int, P: ParamSet, psi_fn: PsiFunction | None = None) -> float:
    return _gamma_from_levels(c, psi_levels(s, P, psi_fn), k)


def gamma_vec(s: float, c: float, P: ParamSet, psi_fn: PsiFunction | None = None) -> SurfacePoint:
    lv = psi_levels(s, P, psi_fn)
    return SurfacePoint(tuple(_gamma_from_levels(c, lv, k) for k in range(len(lv) + 1)) + (s,))


def corner_A(k: int, s: float, P: ParamSet, psi_fn: PsiFunction | None = None) -> SurfacePoint:
    """``A_k(s) = (psi_0, ..., psi_k, psi_k, ..., psi_n, s)``."""
    lv = psi_levels(s, P, psi_fn)
    if not 0 <= k < len(lv):
        raise ValueError(f"corner index {k} out of range")
    return SurfacePoint(lv[:k + 1] + lv[k:] + (s,))


def surface_param(p: SurfacePoint, P: ParamSet, psi_fn: PsiFunction | None = None,
                  tol: float = PSI_MATCH_TOL) -> float:
    """Recover ``c`` with ``p = gamma(s, c)``.

    One copy of each ``psi_j(s)`` is deleted from the coordinate multiset;
    the remaining value is ``c``.

    Raises
    ------
    ValueError
        If the coordinates are not nondecreasing or no deletion matches the
        levels within ``tol`` (scaled by ``max(1, |psi|)``).
    """
    g = p.gammas
    lv = psi_levels(p.s, P, psi_fn)
    if len(g) != len(lv) + 1:
        raise ValueError(f"expected {len(lv) + 2} coordinates, got {len(p.coords)}")
    if any(b < a for a, b in zip(g, g[1:])):
        raise ValueError("not on surface: coordinates are not nondecreasing")
    lvs = np.array(lv)
    scale = np.maximum(1.0, np.abs(lvs))
    best, best_i = math.inf, -1
    for i in range(len(g)):
        rest = np.array(g[:i] + g[i + 1:])
        dev = float(np.max(np.abs(rest - lvs) / scale))
        if dev < best:
            best, best_i = dev, i
    if best > tol:
        raise ValueError(f"not on surface: levels mismatch by {best:.3g}")
    return g[best_i]


def j_embed(q: BasePoint, P: ParamSet, psi_fn: PsiFunction | None = None) -> SurfacePoint:
    psi_fn = _psi_fn(P, psi_fn)
    return gamma_vec(q.s, psi_fn(q.s, q.r), P, psi_fn)


def j_inverse(p: SurfacePoint, P: ParamSet, psi_fn: PsiFunction | None = None,
              tol: float = PSI_MATCH_TOL) -> BasePoint:
    """Base point ``q`` with ``j(q) = p``.

    Raises
    ------
    ValueError
        If ``p`` is off the surface or its ``c`` is not positive.
    """
    psi_fn = _psi_fn(P, psi_fn)
    c = surface_param(p, P, psi_fn, tol)
    if not c > 0:
        raise ValueError(f"outside j(B): c = {c} is not positive")
    return BasePoint(p.s, psi_fn.inverse(p.s, c))


# the tropical map F ----------------------------------------------------------

def F_slot(p: TropToricPoint, k: int) -> float:
    """First entry of the ``k``-th sample, with ``0 * inf = 0``.

    A vanishing coordinate below ``k`` gives ``-inf``, above ``k`` gives
    ``+inf``, and at ``k`` it drops out, leaving a finite free value.
    """
    return weighted_sum([j - k for j in range(len(p.vx))], p.vx) + k * min(0.0, p.vy)


def F_eval(p: TropToricPoint, P: ParamSet, psi_fn: PsiFunction | None = None) -> SurfacePoint:
    lv = psi_levels(p.vy, P, psi_fn)
    if len(p.vx) != len(lv) + 1:
        raise ValueError("point and parameter set have different n")
    out = [order_stat((F_slot(p, k),) + lv, k) for k in range(len(p.vx))]
    return SurfacePoint(tuple(out) + (p.vy,))


def F_eval_nov(p: NovToricPoint, P: ParamSet, psi_fn: PsiFunction | None = None) -> SurfacePoint:
    return F_eval(val_point(p), P, psi_fn)


def f_eval(p: TropToricPoint, P: ParamSet, psi_fn: PsiFunction | None = None,
           tol: float = PSI_MATCH_TOL) -> BasePoint:
    """``j^-1(F(p))``.

    Raises
    ------
    ValueError
        If ``p`` is outside the analytic domain ``sum_j j val(x_j) > 0``.
    """
    if not in_Y_domain(p):
        raise ValueError("outside the domain Y: sum_j j val(x_j) must be positive")
    return j_inverse(F_eval(p, P, psi_fn), P, psi_fn, tol)


def degenerate_F_reduced(p: TropToricPoint, lam: float, P: ParamSet,
                         psi_fn: PsiFunction | None = None) -> SurfacePoint:
    """``F`` when every root has norm ``lam``.

    The interior order statistics are pinned at ``psi(vy, lam)``, leaving
    ``F_0 = min(c, psi)`` and ``F_{n+1} = max(c_{n+1}, psi)``.
    """
    if len(P.levels) != 1 or P.levels[0] != lam:
        raise ValueError("reduced formula needs all root norms equal to lam")
    psi_fn = _psi_fn(P, psi_fn)
    n = P.n
    v = psi_fn(p.vy, lam)
    first = min(F_slot(p, 0), v)
    last = max(F_slot(p, n + 1), v)
    return SurfacePoint((first,) + (v,) * n + (last, p.vy))


# smooth and singular points ---------------------------------------------------

@dataclass(frozen=True)
class Witness:
    """Local chart ``Xi`` identifying ``F`` with ``trop`` near a smooth point.

    ``Xi(y1, y2)`` puts ``((1 + y1)/y2, y2)`` at positions ``(k0, k0 + 1)``
    (for ``k0 = n + 1`` the equivalent pair ``(1/y2, y2 (1 + y1))`` at
    ``(n, n + 1)``) with ``y = y1``.  On ``V = (s - eps, s + eps) x
    (c - delta, c + delta)`` it satisfies ``F o Xi = gamma o trop_k0`` where
    ``trop_k0(y1, y2) = (val y1, val y2 + k0 min(0, val y1))``.
    """

    case: int
    k0: int
    s: float
    c: float
    eps: float
    delta: float
    n: int

    def apply(self, y1: NovikovNum, y2: NovikovNum) -> NovToricPoint:
        if self.k0 <= self.n:
            return chart_to_homogeneous(self.k0, (y1 + 1) / y2, y2, self.n, y=y1)
        return chart_to_homogeneous(self.n, 1 / y2, y2 * (y1 + 1), self.n, y=y1)

    def trop(self, y1: NovikovNum, y2: NovikovNum) -> tuple:
        s = y1.val
        return s, y2.val + self.k0 * min(0.0, s)

    def contains(self, s: float, c: float) -> bool:
        return abs(s - self.s) < self.eps and abs(c - self.c) < self.delta

    def sample(self, rng: np.random.Generator, precision: float = 50.0) -> tuple:
        """Random ``(y1, y2)`` in ``trop^-1(V)``, exercising ``val(1 + y1) > 0``.

        ``precision`` is the number of known orders beyond each leading term.
        """
        cutoff = precision
        s = float(self.s + self.eps * rng.uniform(-0.99, 0.99))
        c = float(self.c + self.delta * rng.uniform(-0.99, 0.99))
        if self.case == 2 and rng.random() < 0.5:
            s = 0.0
        phase = np.exp(2j * np.pi * rng.random())
        if s == 0.0 and rng.random() < 0.5:
            u1 = -1 + T(float(rng.uniform(0.1, 3.0)), complex(phase), cutoff)
        else:
            u1 = T(0.0, complex(phase), cutoff) + T(float(rng.uniform(0.1, 2.0)), 0.5, cutoff)
        y1 = u1 * T(s, cutoff=s + precision)
        e2 = c - self.k0 * min(0.0, s)
        y2 = T(e2, complex(np.exp(2j * np.pi * rng.random())), e2 + precision)
        return y1, y2

    def verify(self, P: ParamSet, psi_fn: PsiFunction | None = None,
               rng: np.random.Generator | None = None, samples: int = 8) -> float:
        """Max deviation of ``F o Xi`` from ``gamma o trop`` on random samples."""
        rng = rng or np.random.default_rng(0)
        worst = 0.0
        for _ in range(samples):
            y1, y2 = self.sample(rng)
            s, c = self.trop(y1, y2)
            lhs = F_eval_nov(self.apply(y1, y2), P, psi_fn)
            worst = max(worst, lhs.deviation(gamma_vec(s, c, P, psi_fn)))
        return worst

    def to_json(self) -> dict:
        return {"case": self.case, "k0": self.k0, "s": self.s, "c": self.c,
                "eps": self.eps, "delta": self.delta}


@dataclass(frozen=True)
class SmoothnessVerdict:
    smooth: bool
    corner: int | None = None
    witness: Witness | None = None
    note: str = ""

    def to_json(self) -> dict:
        return {"smooth": self.smooth, "corner": self.corner, "note": self.note,
                "witness": self.witness.to_json() if self.witness else None}


def _case2_eps(k0: int, c: float, delta: float, P: ParamSet, psi_fn: PsiFunction) -> float:
    # psi(s, r) depends on s**2 and decreases in |s|, so the upper level over
    # |s'| <= eps is smallest at s' = eps; halve until it clears c + delta
    if k0 > P.n:
        return 1.0
    eps = 1.0
    while sorted(psi_fn.levels(eps))[k0] <= c + delta:
        eps /= 2
        if eps < 1e-12:
            raise ValueError("could not separate the point from the next corner")
    return eps


def classify_point(p: SurfacePoint, P: ParamSet, psi_fn: PsiFunction | None = None,
                   tol: float = PSI_MATCH_TOL) -> SmoothnessVerdict:
    """Smooth with an explicit chart witness, or singular at a corner ``A_k(0)``.

    Points with ``s != 0`` use the torus chart ``k0 = 0``.  At ``s = 0`` a
    point with ``c`` strictly between consecutive levels uses the chart
    ``k0`` of its segment.  At ``s = 0`` and ``c = psi_k(0)`` the two
    adjacent segment charts would force ``val(1 + y)`` to be affine, which
    fails, so the point is singular.
    """
    psi_fn = _psi_fn(P, psi_fn)
    c = surface_param(p, P, psi_fn, tol)
    s = p.s
    n = P.n
    if s != 0:
        return SmoothnessVerdict(True, witness=Witness(1, 0, s, c, abs(s) / 2, 1.0, n),
                                 note="torus chart")
    lv = psi_levels(0.0, P, psi_fn)
    for k, v in enumerate(lv):
        if abs(c - v) <= tol * max(1.0, abs(v)):
            return SmoothnessVerdict(False, corner=k,
                                     note="val(1+y) would have to be integral affine")
    k0 = int(np.searchsorted(lv, c))
    lo = lv[k0 - 1] if k0 >= 1 else -math.inf
    hi = lv[k0] if k0 <= n else math.inf
    delta = min(c - lo, hi - c) / 2
    if not math.isfinite(delta):
        delta = 1.0
    eps = _case2_eps(k0, c, delta, P, psi_fn)
    return SmoothnessVerdict(True, witness=Witness(2, k0, 0.0, c, eps, delta, n),
                             note=f"segment chart {k0}")


# CSV emitters ---------------------------------------------------------------------

SURFACE_COLUMNS_V1 = ("s", "c")  # followed by gamma_0 .. gamma_{n+1}
DIVISOR_COLUMNS_V1 = ("i", "t", "f_r")


def surface_slice_rows(s: float, cs: Iterable[float], P: ParamSet,
                       psi_fn: PsiFunction | None = None) -> list:
    return [[s, c, *gamma_vec(s, c, P, psi_fn).gammas] for c in cs]


def surface_header(n: int) -> list:
    return list(SURFACE_COLUMNS_V1) + [f"gamma_{k}" for k in range(n + 2)]


def divisor_point(i: int, free: float, n: int) -> TropToricPoint:
    """Tropical point on ``D_i`` whose free slot ``F_i`` equals ``free``."""
    if not 0 <= i <= n + 1:
        raise ValueError(f"divisor index {i} out of range")
    vx = [0.0] * (n + 2)
    vx[i] = math.inf
    if i <= n:
        vx[i + 1] = free
    else:
        vx[n] = -free
    return TropToricPoint(tuple(vx), 0.0)


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x
                        for x in row])
