"""Relative disk classes on chart regions and their wall-crossing.

On the chart region ``U_l`` the local system of relative classes has the
frame ``beta_l, delta_l, S_1, ..., S_n``: the Maslov-2 disk class, the
Maslov-0 orbit class and the vanishing-sphere classes.  The last chart
``U_{n+1}`` uses ``delta_n`` as its orbit class.  A class is stored
as integer coordinates in that frame together with its anchor ``l``.

Pairings with the toric divisors ``Du(k) = {u = 0, z = a_k}`` and
``Dv(k) = {v = 0, z = a_k}`` are read from fixed tables.  ``Du(k)`` meets
the fibres over ``{s <= 0, r = |a_k|}`` and ``Dv(k)`` those over
``{s >= 0, r = |a_k|}``, so the pairing with ``Du(k)`` is not defined over
``N_{k-}`` and the pairing with ``Dv(k)`` is not defined over ``N_{k+}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from .params import BasePoint, ParamSet, in_chart


@dataclass(frozen=True)
class Region:
    """``R(l)``, ``Nplus(k)`` or ``Nminus(k)``."""

    kind: str
    index: int

    def __post_init__(self):
        if self.kind not in ("R", "Nplus", "Nminus"):
            raise ValueError(f"unknown region kind {self.kind!r}")

    def charts(self) -> tuple:
        """Anchors ``l`` whose chart region ``U_l`` contains this region."""
        if self.kind == "R":
            return (self.index,)
        return (self.index, self.index + 1)

    def __str__(self):
        return f"{self.kind}({self.index})"


@dataclass(frozen=True)
class Divisor:
    """``Du(k)``, ``Dv(k)`` or the anticanonical divisor (``kind = "D"``)."""

    kind: str
    index: int = -1

    def __post_init__(self):
        if self.kind not in ("u", "v", "D"):
            raise ValueError(f"unknown divisor kind {self.kind!r}")

    def __str__(self):
        return "D" if self.kind == "D" else f"D{self.kind}({self.index})"


def R(l): return Region("R", l)
def Nplus(k): return Region("Nplus", k)
def Nminus(k): return Region("Nminus", k)
def Du(k): return Divisor("u", k)
def Dv(k): return Divisor("v", k)


ANTICANONICAL = Divisor("D")


@dataclass(frozen=True)
class DiskClass:
    """``beta * beta_l + delta * delta_l + sum_j S[j-1] * S_j`` anchored at ``l``."""

    anchor: int
    beta: int
    delta: int
    S: tuple

    @property
    def n(self) -> int:
        return len(self.S)

    def vector(self) -> np.ndarray:
        return np.array([self.beta, self.delta, *self.S], dtype=np.int64)

    @classmethod
    def from_vector(cls, anchor: int, vec) -> "DiskClass":
        vec = [int(x) for x in vec]
        return cls(anchor, vec[0], vec[1], tuple(vec[2:]))

    def __add__(self, other: "DiskClass") -> "DiskClass":
        self._same_chart(other)
        return DiskClass.from_vector(self.anchor, self.vector() + other.vector())

    def __sub__(self, other: "DiskClass") -> "DiskClass":
        self._same_chart(other)
        return DiskClass.from_vector(self.anchor, self.vector() - other.vector())

    def __rmul__(self, m: int) -> "DiskClass":
        return DiskClass.from_vector(self.anchor, int(m) * self.vector())

    def _same_chart(self, other):
        if self.anchor != other.anchor or self.n != other.n:
            raise ValueError("classes live on different charts")

    def to_json(self) -> dict:
        return {"anchor": self.anchor, "beta": self.beta, "delta": self.delta,
                "S": list(self.S)}

    @classmethod
    def from_json(cls, obj: dict) -> "DiskClass":
        return cls(int(obj["anchor"]), int(obj["beta"]), int(obj["delta"]),
                   tuple(int(x) for x in obj["S"]))

    def __str__(self):
        parts = []
        for coef, name in [(self.beta, f"b{self.anchor}"), (self.delta, f"d{self.anchor}")] + \
                [(m, f"S{j}") for j, m in enumerate(self.S, start=1)]:
            if coef:
                parts.append(f"{coef:+d}{name}")
        return " ".join(parts) or "0"


def beta(l: int, n: int) -> DiskClass:
    return DiskClass(l, 1, 0, (0,) * n)


def delta(l: int, n: int) -> DiskClass:
    return DiskClass(l, 0, 1, (0,) * n)


def sphere(j: int, l: int, n: int) -> DiskClass:
    S = [0] * n
    S[j - 1] = 1
    return DiskClass(l, 0, 0, tuple(S))


def expand_beta(l: int, I: Iterable[int], n: int) -> DiskClass:
    """``beta_{l,I} = beta_l + |I| delta_l - sum_{j=1}^{l} |I n [j]| S_j``."""
    I = set(I)
    if any(i < 0 or i >= l for i in I):
        raise ValueError(f"I = {sorted(I)} is not a subset of [0, {l})")
    if not 0 <= l <= n + 1:
        raise ValueError(f"anchor {l} out of range for n = {n}")
    S = [0] * n
    for j in range(1, min(l, n) + 1):
        S[j - 1] = -sum(1 for i in I if i < j)
    return DiskClass(l, 1, len(I), tuple(S))


# pairing tables -------------------------------------------------------------

def _check_region(region: Region, anchor: int, n: int):
    if anchor not in region.charts():
        raise ValueError(f"region {region} is not part of chart U_{anchor}")
    if not 0 <= region.index <= n + 1 or (region.kind != "R" and region.index > n):
        raise ValueError(f"region {region} out of range for n = {n}")


def _defined(D: Divisor, region: Region) -> bool:
    if D.kind == "u" and region.kind == "Nminus" and region.index == D.index:
        return False
    if D.kind == "v" and region.kind == "Nplus" and region.index == D.index:
        return False
    return True


def pairing_row(D: Divisor, anchor: int, n: int) -> np.ndarray:
    """Pairings of the frame ``(beta_l, delta_l, S_1..S_n)`` with ``D``."""
    row = np.zeros(n + 2, dtype=np.int64)
    if D.kind == "D":
        row[0] = 1
        return row
    k = D.index
    if not 0 <= k <= n:
        raise ValueError(f"divisor index {k} out of range")
    sign = 1 if D.kind == "u" else -1
    # beta_l meets Dv(k) once for every root inside the circle
    row[0] = 0 if D.kind == "u" else int(k < anchor)
    # the orbit class of chart n+1 is delta_n (there is no root a_{n+1})
    row[1] = sign * int(k == min(anchor, n))
    for j in range(1, n + 1):
        row[1 + j] = sign * (int(k == j) - int(k == j - 1))
    return row


def intersect(c: DiskClass, D: Divisor, region: Region) -> int:
    """Intersection number of ``c`` with ``D`` over ``region``."""
    _check_region(region, c.anchor, c.n)
    if not _defined(D, region):
        raise ValueError(f"wall-obstructed pairing: {D} over {region}")
    return int(pairing_row(D, c.anchor, c.n) @ c.vector())


def defined_divisors(region: Region, n: int) -> list:
    out = [ANTICANONICAL]
    for k in range(n + 1):
        out += [D for D in (Du(k), Dv(k)) if _defined(D, region)]
    return out


# solving for classes --------------------------------------------------------

def _solve_exact(A: list, b: list) -> list:
    """Exact solution of an overdetermined consistent system over Q."""
    rows = [[Fraction(x) for x in r] + [Fraction(y)] for r, y in zip(A, b)]
    ncol = len(A[0]) if A else 0
    piv = []
    i = 0
    for j in range(ncol):
        p = next((r for r in range(i, len(rows)) if rows[r][j] != 0), None)
        if p is None:
            continue
        rows[i], rows[p] = rows[p], rows[i]
        rows[i] = [x / rows[i][j] for x in rows[i]]
        for r in range(len(rows)):
            if r != i and rows[r][j] != 0:
                f = rows[r][j]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[i])]
        piv.append(j)
        i += 1
    if any(all(x == 0 for x in r[:-1]) and r[-1] != 0 for r in rows):
        raise ValueError("no integral solution: inconsistent targets")
    if len(piv) < ncol:
        raise ValueError("no integral solution: targets do not determine the class")
    return [rows[k][-1] for k in range(ncol)]


def solve_class_from_intersections(targets: Mapping[Divisor, int], region: Region,
                                   boundary_multiple: int, n: int,
                                   anchor: int | None = None,
                                   beta_coeff: int = 1) -> DiskClass:
    """Class with prescribed pairings, ``beta`` coefficient and ``sigma``-multiple.

    The unknowns are the sphere coefficients; the ``delta`` coefficient is the
    boundary multiple of the orbit ``sigma``.  Every divisor in ``targets``
    must have a defined pairing over ``region``.
    """
    if anchor is None:
        if region.kind != "R":
            raise ValueError(f"anchor is ambiguous on {region}; pass it explicitly")
        anchor = region.index
    _check_region(region, anchor, n)
    A, b = [], []
    for D, t in targets.items():
        if not _defined(D, region):
            raise ValueError(f"wall-obstructed pairing: {D} over {region}")
        row = pairing_row(D, anchor, n)
        A.append([int(x) for x in row[2:]])
        b.append(int(t) - int(row[0]) * beta_coeff - int(row[1]) * boundary_multiple)
    if n == 0:
        return DiskClass(anchor, beta_coeff, boundary_multiple, ())
    sol = _solve_exact(A, b)
    if any(x.denominator != 1 for x in sol):
        raise ValueError("no integral solution: fractional sphere coefficients")
    return DiskClass(anchor, beta_coeff, boundary_multiple, tuple(int(x) for x in sol))


def pairing_targets(c: DiskClass, kind: str, region: Region) -> dict:
    """All defined pairings of ``c`` with ``Du`` (``kind = "u"``) or ``Dv``."""
    out = {}
    for k in range(c.n + 1):
        D = Divisor(kind, k)
        if _defined(D, region):
            out[D] = intersect(c, D, region)
    return out


# wall-crossing --------------------------------------------------------------

def transport_matrix(l: int, sign: str, n: int) -> np.ndarray:
    """Coordinates change from anchor ``l`` to anchor ``l + 1`` across ``N_{l sign}``.

    Columns are the images of ``beta_l, delta_l, S_1..S_n``.  Uses
    ``delta_l = delta_{l+1} - S_{l+1}`` and, across ``N_{l-}`` only,
    ``beta_l = beta_{l+1} + delta_l``.
    """
    if sign not in "+-" or len(sign) != 1:
        raise ValueError("sign must be '+' or '-'")
    if not 0 <= l <= n:
        raise ValueError(f"wall index {l} out of range")
    M = np.eye(n + 2, dtype=np.int64)
    # delta_l column
    M[:, 1] = 0
    M[1, 1] = 1
    if l + 1 <= n:
        M[1 + l + 1, 1] = -1
    if sign == "-":
        M[:, 0] = M[:, 0] + M[:, 1]
    return M


def _inverse_unimodular(M: np.ndarray) -> np.ndarray:
    inv = np.rint(np.linalg.inv(M)).astype(np.int64)
    if not np.array_equal(inv @ M, np.eye(len(M), dtype=np.int64)):
        raise ArithmeticError("transport matrix is not unimodular")
    return inv


def monodromy_transport(c: DiskClass, l: int, sign: str) -> DiskClass:
    """Move ``c`` across the wall neighbourhood ``N_{l sign}``.

    A class anchored at ``l`` is rewritten at ``l + 1`` and vice versa.
    """
    M = transport_matrix(l, sign, c.n)
    if c.anchor == l:
        return DiskClass.from_vector(l + 1, M @ c.vector())
    if c.anchor == l + 1:
        return DiskClass.from_vector(l, _inverse_unimodular(M) @ c.vector())
    raise ValueError(f"anchor mismatch: class at {c.anchor}, wall {l}")


def monodromy_matrix(l: int, n: int) -> np.ndarray:
    """Loop ``R(l) -> N_{l+} -> R(l+1) -> N_{l-} -> R(l)`` in anchor-``l`` coordinates."""
    up = transport_matrix(l, "+", n)
    down = _inverse_unimodular(transport_matrix(l, "-", n))
    return down @ up


# energy ---------------------------------------------------------------------

def energy(c: DiskClass, q: BasePoint, P: ParamSet, psi_fn) -> float:
    """Symplectic area of ``c`` over ``q``.

    ``beta * (psi(s, r) - l min(0, s)) + delta * s``; the spheres have zero area.
    """
    if not in_chart(P, c.anchor, q):
        raise ValueError(f"base point ({q.s}, {q.r}) is outside U_{c.anchor}")
    base = psi_fn(q.s, q.r) - c.anchor * min(0.0, q.s) if c.beta else 0.0
    return c.beta * base + c.delta * q.s
