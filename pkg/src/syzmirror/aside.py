"""Symplectic side: fibration map, reduced area function, explicit disks.

The smoothing ``X = {uv = h(z), z != 0}`` fibres over ``B = R x R_{>0}`` by
``pi(u, v, z) = ((|u|^2 - |v|^2)/2, |z|)``.  Reducing by the circle action
``(u, v) -> (e^{it} u, e^{-it} v)`` at level ``s`` leaves the ``z``-plane with
the area density

    rho_s(z) = |h'(z)|^2 / (2 sqrt(|h(z)|^2 + s^2)) + 1

against Lebesgue measure, and ``psi(s, r)`` is ``1/(2 pi)`` times its integral
over ``|z| <= r``.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .params import BasePoint, ParamSet
from .quadrature import QuadratureError, initial_cells, integrate_polar

DEFAULT_TOL = 1e-8
MAX_CELLS = 2 ** 20


# reduced density and psi ------------------------------------------------------

def reduced_density(z, s: float, P: ParamSet):
    """Density of the reduced area form at level ``s`` against ``dx dy``.

    Always at least 1; depends on ``s`` only through ``s**2``.  At ``s = 0``
    it has an integrable ``1/|z - a_k|`` singularity at each root.
    """
    z = np.asarray(z, dtype=complex)
    with np.errstate(divide="ignore"):
        return np.abs(P.dh(z)) ** 2 / (2 * np.hypot(np.abs(P.h(z)), s)) + 1.0


def _peaks(s: float, P: ParamSet, tol: float):
    """Root locations with the width of their density peak at level ``s``.

    Below ``|s| < 1e-3 tol`` the peak is treated as the exact ``1/|z - a|``
    singularity; the two integrals differ by ``O(|s|)``.
    """
    s = abs(s) if abs(s) >= 1e-3 * tol else 0.0
    return [(a, s / abs(complex(P.dh(a)))) for a in P.a]


def psi_with_error(s: float, r: float, P: ParamSet, tol: float = DEFAULT_TOL,
                   max_cells: int = MAX_CELLS) -> tuple[float, float]:
    """``psi(s, r)`` together with the quadrature's error estimate.

    The constant part of the density integrates to exactly ``r**2/2``; only
    the remainder goes through the adaptive rule.
    """
    if not r > 0:
        raise ValueError(f"radius must be positive, got {r}")
    if not tol > 0:
        raise ValueError("tol must be positive")

    def excess(z):
        return np.abs(P.dh(z)) ** 2 / (2 * np.hypot(np.abs(P.h(z)), s))

    cells = initial_cells(r, P.norms, list(P.a))
    base = r * r / 2
    # rtol on the excess integral, rescaled so that psi itself meets tol
    guess = 2 * math.pi * base
    try:
        res = integrate_polar(excess, cells, rtol=tol, atol=tol * guess * 1e-3,
                              max_cells=max_cells, singular=_peaks(s, P, tol))
    except QuadratureError as exc:
        raise QuadratureError(f"psi({s}, {r}) did not converge",
                              base + exc.estimate / (2 * math.pi),
                              exc.error / (2 * math.pi)) from None
    return base + res.value / (2 * math.pi), res.error / (2 * math.pi)


def psi(s: float, r: float, P: ParamSet, tol: float = DEFAULT_TOL) -> float:
    """Reduced area enclosed by ``|z| = r`` at level ``s``, divided by ``2 pi``."""
    return psi_with_error(s, r, P, tol)[0]


def psi_contour(s: float, r: float, P: ParamSet, tol: float = 1e-12) -> float:
    """Same quantity through a one-dimensional boundary integral.

    Taking ``Phi`` with ``Phi'(t) = 1/(4 (sqrt(t + s^2) + |s|))``, the Laplacian
    of ``Phi(|h|^2)`` is the excess density ``rho_s - 1``, and Green's theorem
    turns the disk integral into

        psi = r^2/2 + r/(4 pi) int_0^{2pi} Re(conj(h) h' e^{it}) / (sqrt(|h|^2+s^2) + |s|) dt.

    Used as an independent cross-check of the polar quadrature.  Angular
    breakpoints are graded toward roots lying close to the circle.
    """

    def g(t):
        e = np.exp(1j * t)
        z = r * e
        hz, dz = complex(P.h(z)), complex(P.dh(z))
        return (hz.conjugate() * dz * e).real / (math.sqrt(abs(hz) ** 2 + s * s) + abs(s))

    pts = {0.0, 2 * math.pi}
    for a in P.a:
        ang = math.atan2(a.imag, a.real) % (2 * math.pi)
        gap = abs(abs(a) - r) / r
        pts.add(ang)
        step = 0.5
        while step > max(gap, 1e-15) / 4:
            pts.update({ang - step, ang + step})
            step /= 4
    pts = sorted(p for p in pts if 0.0 <= p <= 2 * math.pi)
    total = 0.0
    for lo, hi in zip(pts, pts[1:]):
        if hi > lo:
            total += quad(g, lo, hi, epsabs=tol * 1e-3, epsrel=tol, limit=200)[0]
    return r * r / 2 + r * total / (4 * math.pi)


def _density_horner(z, s: float, coeffs: np.ndarray):
    h = np.zeros_like(z)
    dh = np.zeros_like(z)
    for c in coeffs:
        dh = dh * z + h
        h = h * z + c
    return (dh.real ** 2 + dh.imag ** 2) / (2 * np.sqrt(h.real ** 2 + h.imag ** 2 + s * s)) + 1.0


def psi_oracle_mc(s: float, r: float, P: ParamSet, samples: int = 10 ** 7,
                  seed: int = 0, chunk: int = 2 ** 20,
                  importance_below: float = 1.0) -> tuple[float, float]:
    """Monte-Carlo estimate of ``psi(s, r)`` and its standard error.

    Points are drawn from a mixture: uniform on the square ``[-r, r]^2``
    (rejection onto the disk), plus, when ``|s| < importance_below``, draws
    with density proportional to ``1/|z - a_k|`` on a small ball around every
    root near the disk.  The balls remove the infinite variance a uniform
    sampler has at ``s = 0``.  Each draw is weighted by
    ``density / mixture_density``; points outside the disk count as zero.
    """
    if samples < 10 ** 5:
        raise ValueError("need at least 1e5 samples")
    rng = np.random.default_rng(seed)
    coeffs = np.poly(np.array(P.a))
    balls = []
    if abs(s) < importance_below:
        roots = list(P.a)
        for i, a in enumerate(roots):
            others = [abs(a - b) for j, b in enumerate(roots) if j != i]
            b = 0.25 * min(others + [abs(a), r])
            if abs(a) < r + b:
                balls.append((a, b))
    w0 = 0.75 if balls else 1.0
    wk = (1 - w0) / len(balls) if balls else 0.0
    square = 4 * r * r

    def mixture_density(z):
        q = np.full(z.shape, w0 / square)
        for a, b in balls:
            d = np.abs(z - a)
            near = d < b
            q[near] += wk / (2 * math.pi * b * d[near])
        return q

    total = total_sq = 0.0
    done = 0
    while done < samples:
        m = min(chunk, samples - done)
        comp = np.searchsorted(np.cumsum([w0] + [wk] * len(balls))[:-1], rng.random(m),
                               side="right")
        x = r * (2 * rng.random((2, m)) - 1)
        z = x[0] + 1j * x[1]
        for i, (a, b) in enumerate(balls, start=1):
            sel = np.flatnonzero(comp == i)
            z[sel] = a + b * rng.random(sel.size) * np.exp(2j * math.pi * rng.random(sel.size))
        inside = np.flatnonzero(z.real ** 2 + z.imag ** 2 <= r * r)
        zi = z[inside]
        vals = np.zeros(m)
        vals[inside] = _density_horner(zi, s, coeffs) / mixture_density(zi)
        total += vals.sum()
        total_sq += vals @ vals
        done += m
    mean = total / samples
    var = max(total_sq / samples - mean ** 2, 0.0)
    return mean / (2 * math.pi), math.sqrt(var / samples) / (2 * math.pi)


class PsiFunction:
    """Cached ``psi`` for one parameter set.

    Parameters
    ----------
    P : ParamSet
    tol : float
        Relative quadrature tolerance.

    Notes
    -----
    The density depends on ``s`` only through ``s**2``, so the cache is keyed
    by ``(|s|, r)``; it is guarded by a lock, so one instance may be shared
    between threads.  ``levels(s)`` returns the values
    ``psi(s, |a_j|)`` in root order; collided norms share one cached value.
    """

    def __init__(self, P: ParamSet, tol: float = DEFAULT_TOL):
        self.P = P
        self.tol = tol
        self._cache: dict = {}
        self._lock = threading.Lock()

    def __call__(self, s: float, r: float) -> float:
        key = (abs(float(s)), float(r))
        with self._lock:
            hit = self._cache.get(key)
        if hit is None:
            hit = psi(key[0], r, self.P, self.tol)
            with self._lock:
                self._cache.setdefault(key, hit)
        return hit

    def levels(self, s: float) -> tuple:
        return tuple(self(s, self.P.norm(j)) for j in range(self.P.n + 1))

    def inverse(self, s: float, c: float) -> float:
        return psi_inverse_r(s, c, self.P, self.tol, psi_fn=self)


def s_derivative_jump(r: float, P: ParamSet, h: float = 1e-6, tol: float = 1e-12) -> float:
    """Diagnostic: ``d psi/ds (0+, r) - d psi/ds (0-, r)`` by one-sided differences.

    ``psi`` is even in ``s``, so the jump is twice the right derivative.
    Numerically it equals minus the number of roots inside ``|z| < r``, roots
    on the circle counting one half.
    """
    return 2 * (psi(h, r, P, tol) - psi(0.0, r, P, tol)) / h


def psi_inverse_r(s: float, c: float, P: ParamSet, tol: float = DEFAULT_TOL,
                  psi_fn=None) -> float:
    """Radius ``r`` with ``psi(s, r) = c``.

    Since the density is at least 1, ``psi(s, r) >= r**2/2`` and the root is
    bracketed by ``(0, sqrt(2c)]``.  Brent's method refines the bracket; the
    result satisfies ``|psi(s, r) - c| <= tol * c`` up to quadrature error.
    """
    if not c > 0:
        raise ValueError(f"no radius with psi = {c}: psi is positive")
    f = psi_fn if psi_fn is not None else (lambda ss, rr: psi(ss, rr, P, tol))
    hi = math.sqrt(2 * c)
    g_hi = f(s, hi) - c
    if g_hi < 0:
        raise ValueError(f"psi({s}, {hi}) = {g_hi + c} < {c}: bracket failed")
    if g_hi == 0:
        return hi
    r = brentq(lambda x: (f(s, x) - c) if x > 0 else -c, 0.0, hi,
               xtol=1e-14, rtol=8.9e-16, maxiter=200)
    if abs(f(s, r) - c) > max(10 * tol * c, 1e-12):
        raise ValueError(f"psi inversion missed: |psi - c| = {abs(f(s, r) - c):.3g}")
    return r


# fibration map --------------------------------------------------------------

def pi_map(u: complex, v: complex, z: complex) -> BasePoint:
    """Moment-type fibration ``((|u|^2 - |v|^2)/2, |z|)``."""
    if z == 0:
        raise ValueError("point lies on the removed divisor z = 0")
    return BasePoint((abs(u) ** 2 - abs(v) ** 2) / 2, abs(z))


def discriminant(P: ParamSet) -> list[BasePoint]:
    """Images ``(0, |a_k|)`` of the fixed points ``(0, 0, a_k)``."""
    return [pi_map(0, 0, a) for a in P.a]


# explicit disks ---------------------------------------------------------------

@dataclass(frozen=True)
class DiskMap:
    """Explicit disk ``zeta -> (u, v, z)`` on the closed unit disk.

    ``kind`` is ``"delta"`` or ``"beta"``.  For beta disks ``roots`` are the
    zeros ``zeta_i`` (all outside the unit disk) of the radicand whose square
    root is ``g``, and ``g0`` is the chosen value of ``g(0)``.
    """

    kind: str
    k: int
    P: ParamSet = field(repr=False)
    s: float = 0.0
    I: tuple = ()
    radius: float = 0.0
    roots: tuple = field(default=(), repr=False)
    g0: complex = 0j

    # beta pieces
    def _g(self, zeta):
        g = np.full_like(zeta, self.g0)
        dlog = np.zeros_like(zeta)
        for w in self.roots:
            g = g * np.sqrt(1 - zeta / w)
            dlog = dlog + 0.5 / (zeta - w)
        return g, g * dlog

    def _blaschke(self, zeta, idx):
        r = self.radius
        B = np.ones_like(zeta)
        dB = np.zeros_like(zeta)
        for i in idx:
            a = self.P.a[i]
            num, den = r * zeta - a, r - np.conj(a) * zeta
            b, db = num / den, (r * r - abs(a) ** 2) / den ** 2
            dB = dB * b + B * db
            B = B * b
        return B, dB

    def evaluate(self, zeta):
        """Return ``(u, v, z)`` at the points ``zeta``."""
        zeta = np.asarray(zeta, dtype=complex)
        if self.kind == "delta":
            a = self.P.a[self.k]
            c = math.sqrt(2 * abs(self.s))
            zero = np.zeros_like(zeta)
            if self.s > 0:
                return c * zeta, zero, zero + a
            return zero, c * np.conj(zeta), zero + a
        g, _ = self._g(zeta)
        Bu, _ = self._blaschke(zeta, self.I)
        Bv, _ = self._blaschke(zeta, [i for i in range(self.k) if i not in self.I])
        return g * Bu, g * Bv, self.radius * zeta

    def area_density(self, zeta):
        """Pullback of the standard Kaehler form of C^3 against ``dx dy``.

        Holomorphic components contribute ``|f'|^2``, anti-holomorphic ones
        ``-|f'|^2``.
        """
        zeta = np.asarray(zeta, dtype=complex)
        if self.kind == "delta":
            return np.full(zeta.shape, 2 * self.s)
        g, dg = self._g(zeta)
        Bu, dBu = self._blaschke(zeta, self.I)
        Bv, dBv = self._blaschke(zeta, [i for i in range(self.k) if i not in self.I])
        du = dg * Bu + g * dBu
        dv = dg * Bv + g * dBv
        return np.abs(du) ** 2 + np.abs(dv) ** 2 + self.radius ** 2

    def residual(self, m: int = 32) -> float:
        """Max relative ``|uv - h(z)|`` on an ``m x m`` polar grid."""
        rho, th = np.meshgrid(np.linspace(0, 1, m), np.linspace(0, 2 * math.pi, m))
        u, v, z = self.evaluate(rho * np.exp(1j * th))
        hz = self.P.h(z)
        return float(np.max(np.abs(u * v - hz) / np.maximum(1.0, np.abs(hz))))

    def boundary_images(self, m: int = 64) -> list[BasePoint]:
        u, v, z = self.evaluate(np.exp(2j * math.pi * np.arange(m) / m))
        return [pi_map(a, b, c) for a, b, c in zip(u, v, z)]


def disk_delta(k: int, s: float, P: ParamSet) -> DiskMap:
    """Orbit disk over the wall ``r = |a_k|`` at level ``s != 0``.

    ``zeta -> (zeta sqrt(2s), 0, a_k)`` for ``s > 0`` and
    ``zeta -> (0, conj(zeta) sqrt(2|s|), a_k)`` for ``s < 0``; area ``s``.
    """
    if s == 0:
        raise ValueError("degenerate orbit disk at s = 0")
    if not 0 <= k <= P.n:
        raise ValueError(f"root index {k} out of range")
    return DiskMap("delta", k, P, s=float(s))


def disk_beta(k: int, I: Sequence[int], P: ParamSet) -> DiskMap:
    """Maslov-2 disk through ``q_k = (0, r_k)`` with ``u``-zeros at ``a_i, i in I``.

    The radicand is ``prod_{i<k} (r - conj(a_i) zeta) * prod_{i>=k} (r zeta - a_i)``
    with ``r = r_k``; all of its zeros lie outside the unit disk, so writing it
    as ``R(0) prod (1 - zeta/zeta_i)`` and taking principal roots factorwise
    gives a holomorphic square root ``g`` on the closed disk.
    """
    P.require_sorted()
    if not P.generic:
        raise ValueError("beta disks need pairwise distinct norms")
    if not 0 <= k <= P.n + 1:
        raise ValueError(f"chart index {k} out of range")
    I = tuple(sorted(set(I)))
    if any(i < 0 or i >= k for i in I):
        raise ValueError(f"I = {I} is not a subset of [0, {k})")
    r = P.radii[k]
    zeros, lead = [], complex(1.0)
    for i, a in enumerate(P.a):
        if i < k:
            zeros.append(r / np.conj(a))
            lead *= r
        else:
            zeros.append(a / r)
            lead *= -a
    if any(abs(w) <= 1 for w in zeros):
        raise ValueError("radicand vanishes on the disk; no square-root branch")
    d = DiskMap("beta", k, P, I=I, radius=r, roots=tuple(zeros), g0=complex(np.sqrt(lead)))
    _check_branch(d)
    return d


def _check_branch(d: DiskMap, m: int = 2048):
    """Winding of the radicand along the boundary must be even (here zero)."""
    zeta = np.exp(2j * math.pi * np.arange(m + 1) / m)
    rad = np.full_like(zeta, d.g0 ** 2)
    for w in d.roots:
        rad = rad * (1 - zeta / w)
    steps = np.angle(rad[1:] / rad[:-1])
    wind = int(round(steps.sum() / (2 * math.pi)))
    if wind % 2:
        raise ValueError(f"branch tracking failed: radicand winds {wind} times")
    g, _ = d._g(zeta)
    if np.max(np.abs(g ** 2 - rad)) > 1e-9 * np.max(np.abs(rad)):
        raise ValueError("branch tracking failed: g^2 differs from radicand")
    jumps = np.abs(np.diff(g)) / np.max(np.abs(g))
    if np.max(jumps) > 0.1:
        raise ValueError("branch tracking failed: square root jumps along the boundary")


def disk_area(d: DiskMap, tol: float = 1e-10, start: int = 16, max_nodes: int = 4096) -> float:
    """Symplectic area of ``d`` divided by ``2 pi``.

    Gauss-Legendre in the radius times the periodic trapezoid rule in the
    angle; both are spectrally accurate for the integrands here, which are
    real-analytic on the closed disk.  The node count doubles until two
    successive estimates agree to ``tol`` (relative).
    """
    m = start
    prev = None
    while m <= max_nodes:
        x, w = np.polynomial.legendre.leggauss(m)
        rho, wr = (x + 1) / 2, w / 2
        th = 2 * math.pi * np.arange(2 * m) / (2 * m)
        zeta = rho[:, None] * np.exp(1j * th)[None, :]
        dens = d.area_density(zeta)
        val = float(np.sum(wr[:, None] * rho[:, None] * dens) * (2 * math.pi / (2 * m)))
        val /= 2 * math.pi
        if prev is not None and abs(val - prev) <= tol * max(abs(val), 1e-300):
            return val
        prev = val
        m *= 2
    raise QuadratureError("disk area did not converge", prev, float("nan"))


# Lagrangian spheres and the half twist ----------------------------------------

def lagrangian_sphere_image(curve: Sequence[complex], P: ParamSet | None = None,
                            tol: float = 1e-12) -> tuple[float, float]:
    """Radius interval swept by a polyline matching curve.

    The sphere over a curve ``c`` is ``{|u| = |v|, z in c}``, so its image has
    ``s = 0`` and ``r`` ranging over ``|c|``.  The minimum of ``|z|`` over each
    segment is taken exactly (closest point to the origin).
    """
    pts = np.asarray(curve, dtype=complex)
    if pts.size < 2:
        raise ValueError("curve needs at least two points")
    if P is not None:
        for end in (pts[0], pts[-1]):
            if min(abs(end - a) for a in P.a) > tol * max(1.0, abs(end)):
                raise ValueError(f"curve endpoint {end} is not a root of h")
    lo, hi = math.inf, 0.0
    for p, q in zip(pts[:-1], pts[1:]):
        d = q - p
        t = 0.0 if d == 0 else min(1.0, max(0.0, -(p.conjugate() * d).real / abs(d) ** 2))
        lo = min(lo, abs(p + t * d))
        hi = max(hi, abs(p), abs(q))
    if lo <= 0:
        raise ValueError("curve passes through z = 0")
    return lo, hi


def half_twist_path(P: ParamSet, k: int, t: float) -> ParamSet:
    """Rotate ``a_{k-1}, a_k`` about their midpoint by ``pi t`` counterclockwise."""
    if not 1 <= k <= P.n:
        raise ValueError(f"half twist index {k} must lie in [1, {P.n}]")
    a = list(P.a)
    mid = (a[k - 1] + a[k]) / 2
    rot = complex(math.cos(math.pi * t), math.sin(math.pi * t))
    a[k - 1] = mid + (a[k - 1] - mid) * rot
    a[k] = mid + (a[k] - mid) * rot
    for i in (k - 1, k):
        for j, b in enumerate(a):
            if j != i and a[i] == b:
                raise ValueError("configuration degenerate: rotated root hits another root")
    if any(x == 0 for x in a):
        raise ValueError("configuration degenerate: rotated root hits 0")
    return ParamSet(tuple(a))


def singular_track(P: ParamSet) -> list[BasePoint]:
    """Singular locus ``{(0, |a_j|)}`` with multiplicity removed."""
    return [BasePoint(0.0, lv) for lv in P.levels]


def component_count(P: ParamSet, tol: float = 1e-5) -> int:
    """Number of distinct points of the singular locus at resolution ``tol``."""
    norms = sorted(abs(a) for a in P.a)
    return 1 + sum(1 for x, y in zip(norms, norms[1:]) if y - x > tol)


def collision_time(P: ParamSet, k: int, tol: float = 1e-6) -> float:
    """First ``t`` in (0, 1) with ``|a_{k-1}(t)| = |a_k(t)|``, by bisection."""

    def gap(t):
        Q = half_twist_path(P, k, t)
        return abs(Q.a[k - 1]) - abs(Q.a[k])

    lo, hi = 0.0, 1.0
    glo = gap(lo)
    if glo == 0:
        return lo
    if glo * gap(hi) > 0:
        raise ValueError("no norm crossing along the half twist")
    while hi - lo > tol:
        mid = (lo + hi) / 2
        gm = gap(mid)
        if gm == 0:
            return mid
        if (gm < 0) == (glo < 0):
            lo, glo = mid, gm
        else:
            hi = mid
    return (lo + hi) / 2
