"""Truncated Novikov-field arithmetic.

An element is a finite sum ``sum_i c_i T**e_i`` with complex coefficients and
real exponents, known modulo ``T**cutoff``.  Valuations are plain Python
floats, with ``math.inf`` standing for the valuation of zero.

Sums are known below the smaller cutoff.  A product is known below
``min(c_a + val b, c_b + val a)``, so multiplying by an element of negative
valuation lowers the cutoff while the relative precision ``cutoff - val``
is preserved.

Every coefficient carries a rounding envelope ``err``: a first-order bound,
in units of machine precision, on the error it has picked up from all
earlier operations.  Inverting series with fast-growing coefficients can
cancel catastrophically, so coefficients can be much less accurate than
their size suggests; comparisons allow for ``ERR_TOL * err``.  A merged
coefficient that is pure rounding noise is dropped when it would become the
leading term, since it would corrupt the valuation.  Noise further down the
series is kept together with its envelope.

Exponents are rounded to ``EXP_DECIMALS`` decimal places whenever a term is
created, so that sums formed in a different order still merge into a single
term.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

DEFAULT_CUTOFF = 50.0
COEFF_TOL = 1e-12  # relative to the summed magnitude at the same exponent
ERR_TOL = 1e-13  # noise floor per unit of rounding envelope
EXP_DECIMALS = 12


def _canon(e: float) -> float:
    return round(float(e), EXP_DECIMALS) + 0.0


@dataclass(frozen=True)
class NovikovNum:
    """Truncated Novikov series.

    Parameters
    ----------
    terms : tuple of (float, complex)
        Exponent/coefficient pairs with strictly increasing exponents, all
        below ``cutoff`` and all coefficients nonzero.
    cutoff : float
        Terms with exponent at or above this value are unknown.
    exact_zero : bool
        Marks the true zero element.  An empty sum without this flag is a
        number whose leading term fell below the working precision.
    errs : tuple of float, optional
        Per-term rounding envelope (see the module notes).  Defaults to
        ``|c|``; not part of equality or serialization.
    """

    terms: tuple = ()
    cutoff: float = DEFAULT_CUTOFF
    exact_zero: bool = False
    errs: tuple = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.errs is None:
            object.__setattr__(self, "errs", tuple(abs(c) for _, c in self.terms))

    # construction ---------------------------------------------------------

    @classmethod
    def from_terms(cls, pairs: Iterable, cutoff: float = DEFAULT_CUTOFF,
                   coeff_tol: float = COEFF_TOL) -> "NovikovNum":
        """Normalize ``(exp, coeff)`` or ``(exp, coeff, err)`` tuples.

        Equal exponents are merged.  Zero coefficients are dropped, and so is
        a leading coefficient below ``coeff_tol`` times the summed magnitude
        or below the rounding envelope.
        """
        acc: dict[float, complex] = {}
        scale: dict[float, float] = {}
        err: dict[float, float] = {}
        for t in pairs:
            e, c = _canon(t[0]), complex(t[1])
            if e >= cutoff:
                continue
            acc[e] = acc.get(e, 0.0) + c
            scale[e] = scale.get(e, 0.0) + abs(c)
            err[e] = err.get(e, 0.0) + (t[2] if len(t) > 2 else abs(c))
        keys = sorted(acc)
        return _normalized(keys, [acc[e] for e in keys], [scale[e] for e in keys],
                           [err[e] for e in keys], cutoff, coeff_tol)

    @classmethod
    def monomial(cls, coeff: complex = 1.0, exp: float = 0.0,
                 cutoff: float = DEFAULT_CUTOFF) -> "NovikovNum":
        if coeff == 0:
            return cls.zero(cutoff)
        return cls.from_terms([(exp, coeff)], cutoff)

    @classmethod
    def const(cls, c: complex, cutoff: float = DEFAULT_CUTOFF) -> "NovikovNum":
        return cls.monomial(c, 0.0, cutoff)

    @classmethod
    def zero(cls, cutoff: float = DEFAULT_CUTOFF) -> "NovikovNum":
        return cls((), float(cutoff), True)

    @classmethod
    def one(cls, cutoff: float = DEFAULT_CUTOFF) -> "NovikovNum":
        return cls(((0.0, 1.0 + 0j),), float(cutoff))

    # inspection -----------------------------------------------------------

    @property
    def val(self) -> float:
        return self.terms[0][0] if self.terms else math.inf

    @property
    def lead(self) -> complex:
        """Leading coefficient (0 for an empty sum)."""
        return self.terms[0][1] if self.terms else 0j

    @property
    def below_precision(self) -> bool:
        return not self.terms and not self.exact_zero

    @property
    def is_empty(self) -> bool:
        return not self.terms

    def exps(self) -> np.ndarray:
        return np.array([e for e, _ in self.terms], dtype=float)

    def coeffs(self) -> np.ndarray:
        return np.array([c for _, c in self.terms], dtype=complex)

    def triples(self) -> tuple:
        """``(exp, coeff, err)`` for every term."""
        return tuple((e, c, m) for (e, c), m in zip(self.terms, self.errs))

    def truncate(self, cutoff: float) -> "NovikovNum":
        if self.exact_zero:
            return NovikovNum.zero(min(cutoff, self.cutoff))
        cut = min(cutoff, self.cutoff)
        kept = [t for t in self.triples() if t[0] < cut]
        return NovikovNum(tuple((e, c) for e, c, _ in kept), cut,
                          errs=tuple(m for _, _, m in kept))

    # arithmetic -----------------------------------------------------------

    def __add__(self, other) -> "NovikovNum":
        other = _coerce(other, self.cutoff)
        if self.exact_zero:
            return other
        if other.exact_zero:
            return self
        cut = min(self.cutoff, other.cutoff)
        return NovikovNum.from_terms(self.triples() + other.triples(), cut)

    __radd__ = __add__

    def __neg__(self) -> "NovikovNum":
        return NovikovNum(tuple((e, -c) for e, c in self.terms), self.cutoff,
                          self.exact_zero, self.errs)

    def __sub__(self, other) -> "NovikovNum":
        return self + (-_coerce(other, self.cutoff))

    def __rsub__(self, other) -> "NovikovNum":
        return _coerce(other, self.cutoff) - self

    def __mul__(self, other) -> "NovikovNum":
        other = _coerce(other, self.cutoff)
        if self.exact_zero or other.exact_zero:
            return NovikovNum.zero(min(self.cutoff, other.cutoff))
        # absolute precision: an unknown tail O(T^c) of one factor is shifted
        # by the valuation of the other (an empty sum is itself O(T^c))
        va = self.terms[0][0] if self.terms else self.cutoff
        vb = other.terms[0][0] if other.terms else other.cutoff
        cut = min(self.cutoff + vb, other.cutoff + va)
        if not self.terms or not other.terms:
            return NovikovNum((), cut)
        ca, cb = self.coeffs(), other.coeffs()
        ea, eb = np.array(self.errs), np.array(other.errs)
        e = np.add.outer(self.exps(), other.exps()).ravel()
        c = np.multiply.outer(ca, cb).ravel()
        m = np.abs(c)
        r = (np.multiply.outer(ea, np.abs(cb)) + np.multiply.outer(np.abs(ca), eb)).ravel()
        keep = e < cut
        e, c, m, r = np.round(e[keep], EXP_DECIMALS) + 0.0, c[keep], m[keep], r[keep]
        if e.size == 0:
            return NovikovNum((), cut)
        uniq, idx = np.unique(e, return_inverse=True)
        acc = (np.bincount(idx, weights=c.real, minlength=uniq.size)
               + 1j * np.bincount(idx, weights=c.imag, minlength=uniq.size))
        scale = np.bincount(idx, weights=m, minlength=uniq.size)
        err = np.bincount(idx, weights=r, minlength=uniq.size)
        return _normalized(uniq.tolist(), acc.tolist(), scale.tolist(), err.tolist(), cut)

    __rmul__ = __mul__

    def __pow__(self, m: int) -> "NovikovNum":
        return pow_int(self, m)

    def __truediv__(self, other) -> "NovikovNum":
        return self * inv(_coerce(other, self.cutoff))

    def __rtruediv__(self, other) -> "NovikovNum":
        return _coerce(other, self.cutoff) * inv(self)

    # comparison -----------------------------------------------------------

    def approx_equal(self, other: "NovikovNum", coeff_tol: float = 1e-9,
                     exp_tol: float = 1e-9) -> bool:
        """Term-by-term equality below the common cutoff.

        Exponents within ``exp_tol`` are paired; an unpaired term counts as
        a difference against zero.  Coefficients may differ by ``coeff_tol``
        times the larger of the two plus ``ERR_TOL`` times their summed
        rounding envelopes.
        """
        if self.exact_zero or other.exact_zero:
            # zero agrees with a sum whose terms all fell below precision
            return self.is_empty and other.is_empty
        cut = min(self.cutoff, other.cutoff) - exp_tol
        a = [t for t in self.triples() if t[0] < cut]
        b = [t for t in other.triples() if t[0] < cut]
        i = j = 0
        while i < len(a) or j < len(b):
            ea = a[i][0] if i < len(a) else math.inf
            eb = b[j][0] if j < len(b) else math.inf
            if abs(ea - eb) <= exp_tol:
                (_, ca, ma), (_, cb, mb) = a[i], b[j]
                i, j = i + 1, j + 1
            elif ea < eb:
                (_, ca, ma), cb, mb = a[i], 0j, 0.0
                i += 1
            else:
                ca, ma, (_, cb, mb) = 0j, 0.0, b[j]
                j += 1
            if abs(ca - cb) > coeff_tol * max(abs(ca), abs(cb)) + ERR_TOL * (ma + mb):
                return False
        return True

    # serialization --------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "terms": [{"exp": e, "re": c.real, "im": c.imag} for e, c in self.terms],
            "cutoff": self.cutoff if math.isfinite(self.cutoff) else "inf",
            "exact_zero": self.exact_zero,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "NovikovNum":
        cutoff = float(obj.get("cutoff", DEFAULT_CUTOFF))
        if obj.get("exact_zero"):
            return cls.zero(cutoff)
        return cls.from_terms(((t["exp"], complex(t["re"], t["im"])) for t in obj["terms"]),
                              cutoff)

    def __repr__(self) -> str:
        if self.exact_zero:
            return "0"
        if not self.terms:
            return f"O(T^{self.cutoff:g})"
        parts = [f"({c.real:.6g}{c.imag:+.6g}j)T^{e:.6g}" for e, c in self.terms[:6]]
        if len(self.terms) > 6:
            parts.append("...")
        return " + ".join(parts)


def _normalized(exps, acc, scale, err, cutoff, coeff_tol=COEFF_TOL) -> NovikovNum:
    """Assemble sorted merged terms, dropping zeros and leading noise."""
    terms, errs = [], []
    for e, a, m, r in zip(exps, acc, scale, err):
        if a == 0:
            continue
        if not terms and (abs(a) <= coeff_tol * m or abs(a) <= ERR_TOL * r):
            continue
        terms.append((float(e), complex(a)))
        errs.append(float(r))
    # with nothing unknown, a full cancellation is the true zero
    exact = not terms and cutoff == math.inf
    return NovikovNum(tuple(terms), float(cutoff), exact, errs=tuple(errs))


def _coerce(x, cutoff: float) -> NovikovNum:
    # plain scalars are exact, so they carry no truncation of their own
    if isinstance(x, NovikovNum):
        return x
    if x == 0:
        return NovikovNum.zero(cutoff)
    return NovikovNum.const(x, math.inf)


def val(x: NovikovNum) -> float:
    """Valuation: leading exponent, ``inf`` for an empty sum.

    Use ``x.below_precision`` to tell truncation apart from the zero element.
    """
    return x.val


def add(x: NovikovNum, y: NovikovNum) -> NovikovNum:
    return x + y


def mul(x: NovikovNum, y: NovikovNum) -> NovikovNum:
    return x * y


def _unit_inverse(u: NovikovNum, work: float) -> NovikovNum:
    """Inverse of ``u = 1 + sum_g u_g T^g`` below ``work`` by long division.

    Coefficients satisfy ``s_e = -sum_g u_g s_{e-g}``; exponents run over the
    additive semigroup spanned by the ``g`` in increasing order.  Each new
    exponent records the pairs ``(g, e - g)`` that reach it, so no exponent
    subtraction (and no rounding mismatch) is involved.  The rounding
    envelope follows the same recurrence with absolute values.
    """
    gaps = list(u.triples()[1:])
    coeff = {0.0: 1.0 + 0j}
    err = {0.0: u.errs[0]}
    reach: dict[float, list] = {}
    heap = [0.0]
    while heap:
        e = heapq.heappop(heap)
        if e:
            acc, r = 0j, 0.0
            for j, prev in reach.pop(e):
                _, c, rg = gaps[j]
                sp = coeff.get(prev)
                if sp is not None:
                    acc -= c * sp
                    r += rg * abs(sp) + abs(c) * err[prev]
            if acc != 0:
                coeff[e], err[e] = acc, r
        for j, (g, _, _) in enumerate(gaps):
            ne = _canon(e + g)
            if ne >= work:
                continue
            if ne not in reach:
                reach[ne] = []
                heapq.heappush(heap, ne)
            reach[ne].append((j, e))
    keys = sorted(coeff)
    return NovikovNum(tuple((e, coeff[e]) for e in keys), work,
                      errs=tuple(err[e] for e in keys))


def _scaled(x: NovikovNum, v: float, a: complex, ra: float, cutoff: float) -> NovikovNum:
    # divide by a T^v; the relative error ra/|a| of a reaches every term
    rel = ra / abs(a)
    return NovikovNum.from_terms(((e - v, c / a, (r + abs(c) * rel) / abs(a))
                                  for e, c, r in x.triples()), cutoff)


def inv(x: NovikovNum) -> NovikovNum:
    """Multiplicative inverse by geometric-series long division.

    Writing ``x = a T**v (1 + eps)`` with ``val(eps) > 0``, the unit part
    ``1 + eps`` is inverted term by term.  The relative precision
    ``cutoff - v`` carries over, so the result is known below
    ``cutoff - 2 v``.
    """
    if not x.terms:
        raise ZeroDivisionError("non-unit: cannot invert an empty Novikov sum")
    v, a = x.terms[0]
    ra = x.errs[0]
    work = x.cutoff - v
    s = _unit_inverse(_scaled(x, v, a, ra, work), work)
    return _scaled(s, v, a, ra, work - v)


def pow_int(x: NovikovNum, m: int) -> NovikovNum:
    """Integer power by repeated squaring; negative powers go through ``inv``."""
    m = int(m)
    if m < 0:
        return pow_int(inv(x), -m)
    out = NovikovNum.one(math.inf)
    base = x
    while m:
        if m & 1:
            out = out * base
        m >>= 1
        if m:
            base = base * base
    return out


def T(exp: float, coeff: complex = 1.0, cutoff: float = DEFAULT_CUTOFF) -> NovikovNum:
    """Shorthand for the monomial ``coeff * T**exp``."""
    return NovikovNum.monomial(coeff, exp, cutoff)
