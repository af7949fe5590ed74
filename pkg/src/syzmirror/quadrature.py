"""Adaptive tensor Gauss-Legendre quadrature over a disk in polar coordinates.

The disk ``|z| <= R`` is cut into polar cells ``[r0, r1] x [t0, t1]``.  Each
cell is integrated with an 8- and a 16-point tensor rule; their difference is
the error estimate.  Cells carrying too much error are split in four until
the summed estimate meets the target.

Near-singular points are handled geometrically: given points ``p`` with a
regularization scale ``eps`` (the width of the peak), a cell is admissible
only when its diameter is at most ``kappa * max(dist(cell, p), eps)``.  Cells
violating this are split regardless of their error estimate, which grades
the mesh toward each peak until the rule resolves it.

A cell whose corner sits on an integrable point singularity (a root of ``h``
when ``s = 0``) is integrated through a Duffy map: the rectangle is cut along
its diagonal from the singular corner and each triangle is pulled back from
the unit square with a collapsed edge.  The Jacobian of that map cancels a
``1/|z - a|`` blow-up, so these cells also converge geometrically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

LOW, HIGH = 8, 16
_RULES = {}


def _rule(m: int):
    if m not in _RULES:
        x, w = np.polynomial.legendre.leggauss(m)
        _RULES[m] = ((x + 1) / 2, w / 2)
    return _RULES[m]


class QuadratureError(RuntimeError):
    """Raised when the subdivision budget runs out; carries the error estimate."""

    def __init__(self, msg: str, estimate: float, error: float):
        super().__init__(f"{msg} (estimate {estimate:.12g}, error {error:.3g})")
        self.estimate = estimate
        self.error = error


@dataclass
class QuadResult:
    value: float
    error: float
    cells: int


def _tensor(cells: np.ndarray, m: int):
    """Plain tensor nodes. Returns (rho, theta, weight) of shape (ncell, m*m)."""
    x, w = _rule(m)
    u = np.repeat(x, m)[None, :]
    v = np.tile(x, m)[None, :]
    wt = np.outer(w, w).ravel()[None, :]
    r0, r1, t0, t1 = (cells[:, i:i + 1] for i in range(4))
    rho = r0 + u * (r1 - r0)
    theta = t0 + v * (t1 - t0)
    return rho, theta, wt * (r1 - r0) * (t1 - t0)


def _duffy(cells: np.ndarray, m: int):
    """Duffy nodes collapsing onto the corner coded in ``cells[:, 4]``.

    Corner codes: 0 = (r0, t0), 1 = (r1, t0), 2 = (r0, t1), 3 = (r1, t1).
    """
    x, w = _rule(m)
    xi = np.repeat(x, m)
    eta = np.tile(x, m)
    wt = np.outer(w, w).ravel() * xi
    # triangle below the diagonal then above it, in corner-local (p, q)
    p = np.concatenate([xi, xi * eta])[None, :]
    q = np.concatenate([xi * eta, xi])[None, :]
    wt = np.concatenate([wt, wt])[None, :]
    r0, r1, t0, t1 = (cells[:, i:i + 1] for i in range(4))
    code = cells[:, 4:5].astype(int)
    flip_r = (code == 1) | (code == 3)
    flip_t = (code == 2) | (code == 3)
    rho = np.where(flip_r, r1 - p * (r1 - r0), r0 + p * (r1 - r0))
    theta = np.where(flip_t, t1 - q * (t1 - t0), t0 + q * (t1 - t0))
    return rho, theta, wt * (r1 - r0) * (t1 - t0)


def _integrate_cells(f, cells: np.ndarray, m: int) -> np.ndarray:
    out = np.zeros(len(cells))
    plain = cells[:, 4] < 0
    for mask, nodes in ((plain, _tensor), (~plain, _duffy)):
        if not mask.any():
            continue
        rho, theta, wt = nodes(cells[mask], m)
        vals = f(rho * np.exp(1j * theta)) * rho
        out[mask] = np.sum(vals * wt, axis=1)
    return out


def _split(cells: np.ndarray) -> np.ndarray:
    """Halve each cell along its long side, or in four when roughly square.

    Splitting only the long side keeps thin cells (next to a nearby radial
    break) from staying thin forever, which would defeat both the Duffy
    rule and the admissibility grading.
    """
    r0, r1, t0, t1, code = cells.T
    rm, tm = (r0 + r1) / 2, (t0 + t1) / 2
    radial, angular = r1 - r0, r1 * (t1 - t0)
    only_t = angular > 2 * radial
    only_r = radial > 2 * angular
    quad = ~(only_t | only_r)
    kids = []
    for k, (ra, rb, ta, tb) in enumerate(((r0, rm, t0, tm), (rm, r1, t0, tm),
                                          (r0, rm, tm, t1), (rm, r1, tm, t1))):
        # the child in position k inherits the singular corner with the same code
        kc = np.where(code == k, code, -1)
        kids.append(np.stack([ra, rb, ta, tb, kc], axis=1)[quad])
    for lo, (ra, rb) in ((True, (r0, rm)), (False, (rm, r1))):
        keep = np.isin(code, (0, 2) if lo else (1, 3))
        kids.append(np.stack([ra, rb, t0, t1, np.where(keep, code, -1)], axis=1)[only_r])
    for lo, (ta, tb) in ((True, (t0, tm)), (False, (tm, t1))):
        keep = np.isin(code, (0, 1) if lo else (2, 3))
        kids.append(np.stack([r0, r1, ta, tb, np.where(keep, code, -1)], axis=1)[only_t])
    return np.concatenate(kids)


def initial_cells(R: float, radial_breaks: Sequence[float], points: Sequence[complex],
                  sectors: int = 8) -> np.ndarray:
    """Polar cells for ``|z| <= R``.

    Annuli are cut at every radius in ``radial_breaks`` below ``R``; each
    annulus is cut into ``sectors`` equal sectors plus an angular break at the
    argument of every point of ``points`` lying on or near its boundary
    circles.  A cell corner that coincides with one of ``points`` gets the
    corresponding Duffy corner code.
    """
    radii = sorted({0.0, float(R)} | {float(b) for b in radial_breaks if 0 < b < R})
    cells = []
    for lo, hi in zip(radii, radii[1:]):
        cuts = set(np.linspace(0, 2 * math.pi, sectors + 1)[:-1])
        near = [p for p in points
                if min(abs(abs(p) - lo), abs(abs(p) - hi)) <= 0.5 * (hi - lo) + 1e-12]
        for p in near:
            cuts.add(math.atan2(p.imag, p.real) % (2 * math.pi))
        cuts = sorted(cuts)
        cuts.append(cuts[0] + 2 * math.pi)
        for ta, tb in zip(cuts, cuts[1:]):
            if tb - ta < 1e-14:
                continue
            code = -1
            for p in points:
                ang = math.atan2(p.imag, p.real) % (2 * math.pi)
                for c, (rr, tt) in enumerate(((lo, ta), (hi, ta), (lo, tb), (hi, tb))):
                    if abs(abs(p) - rr) <= 1e-12 * max(1.0, rr) and _same_angle(ang, tt):
                        code = c
            cells.append((lo, hi, ta, tb, code))
    return np.array(cells, dtype=float)


def _same_angle(a: float, b: float) -> bool:
    d = (a - b) % (2 * math.pi)
    return min(d, 2 * math.pi - d) < 1e-12


def _inadmissible(cells: np.ndarray, singular, kappa: float) -> np.ndarray:
    bad = np.zeros(len(cells), dtype=bool)
    if not singular:
        return bad
    r0, r1, t0, t1, code = cells.T
    diam = np.maximum(r1 - r0, r1 * (t1 - t0))
    for p, eps in singular:
        ang = math.atan2(p.imag, p.real)
        # angle of p unwrapped into each cell's window, then clamped
        tp = t0 + (ang - t0) % (2 * math.pi)
        tp = np.where(tp > t1, np.where(tp - t1 < t0 + 2 * math.pi - tp, t1, t0), tp)
        near = np.clip(abs(p), r0, r1) * np.exp(1j * tp)
        dist = np.abs(near - p)
        cr = np.where((code == 1) | (code == 3), r1, r0)
        ct = np.where((code == 2) | (code == 3), t1, t0)
        at_corner = (code >= 0) & (np.abs(cr * np.exp(1j * ct) - p) < 1e-12 * max(1.0, abs(p)))
        # a Duffy corner absorbs an exact singularity; a regularized one still needs grading
        need = np.where(at_corner, eps if eps > 0 else np.inf, np.maximum(dist, eps))
        bad |= diam > kappa * need
    return bad


def integrate_polar(f: Callable[[np.ndarray], np.ndarray], cells: np.ndarray,
                    rtol: float = 1e-8, atol: float = 1e-13,
                    max_cells: int = 2 ** 20, singular=(), kappa: float = 2.0) -> QuadResult:
    """Adaptive integral of ``f(z) dA`` over the union of polar ``cells``.

    Parameters
    ----------
    f : callable
        Vectorized real integrand of a complex array.
    cells : ndarray, shape (m, 5)
        Rows ``(r0, r1, t0, t1, corner_code)`` as built by ``initial_cells``.
    rtol, atol : float
        Stop once the summed error estimate is below ``max(rtol*|I|, atol)``.
    singular : sequence of (complex, float)
        Peak locations with their width; see the module notes.  A width of
        zero at a Duffy corner means a true ``1/|z - p|`` singularity.
    kappa : float
        Admissibility ratio of cell diameter to peak distance.
    max_cells : int
        Subdivision budget.

    Raises
    ------
    QuadratureError
        When the budget is exhausted before the target is met.
    """
    cells = np.asarray(cells, dtype=float)
    singular = [(complex(p), float(e)) for p, e in singular]
    hi = _integrate_cells(f, cells, HIGH)
    err = np.abs(hi - _integrate_cells(f, cells, LOW))
    forced = _inadmissible(cells, singular, kappa)
    while True:
        total, etot = float(hi.sum()), float(err.sum())
        target = max(rtol * abs(total), atol)
        if etot <= target and not forced.any():
            return QuadResult(total, etot, len(cells))
        bad = forced | (err > target / (2 * len(cells)))
        if len(cells) + 3 * int(bad.sum()) > max_cells:
            raise QuadratureError("subdivision budget exhausted", total, etot)
        kids = _split(cells[bad])
        khi = _integrate_cells(f, kids, HIGH)
        kerr = np.abs(khi - _integrate_cells(f, kids, LOW))
        cells = np.concatenate([cells[~bad], kids])
        hi = np.concatenate([hi[~bad], khi])
        err = np.concatenate([err[~bad], kerr])
        forced = np.concatenate([np.zeros(int((~bad).sum()), dtype=bool),
                                 _inadmissible(kids, singular, kappa)])
