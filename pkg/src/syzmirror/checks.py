"""Verification suites run by the ``syz`` command.

Each suite is a list of named checks.  A check returns a measured number, the
tolerance it is held to and a pass flag; any exception raised inside a check
becomes a failed record carrying the error message, so one broken module never
stops the rest of a run.  Randomness is drawn from generators seeded by the run
seed and the check name, which makes reports reproducible.
"""

from __future__ import annotations

import itertools
import math
import time
import zlib
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import aside, dual, mirror, toric, walls
from .aside import PsiFunction
from .novikov import NovikovNum, T
from .params import REFERENCE, BasePoint, ParamSet, in_chart

SCENARIOS = ("walls", "psi", "areas", "diagram", "observation-a", "singular", "collision")

CSV_SCHEMAS = {
    "psi_grid.csv": ("v1", ("s", "r", "psi", "err_est", "psi_mc", "mc_stderr")),
    "beta_table.csv": ("v1", ("anchor", "subset", "beta", "delta", "spheres")),
    "monodromy.csv": ("v1", ("wall", "row", "entries")),
    "surface.csv": ("v1", None),  # s, c, gamma_0 .. gamma_{n+1}
    "divisor_images.csv": ("v1", dual.DIVISOR_COLUMNS_V1),
    "collision_track.csv": ("v1", None),  # t, |a_0(t)| .. |a_n(t)|, components
}


# configuration ----------------------------------------------------------------

@dataclass
class Precision:
    quad_tol: float = 1e-8
    mc_samples: int = 10 ** 7
    novikov_cutoff: float = 50.0
    psi_match_tol: float = dual.PSI_MATCH_TOL


@dataclass
class RunConfig:
    """Everything a run depends on.

    ``collision`` may hold ``lam`` (common norm for the degenerate set) and
    ``twist_index`` (the pair rotated along the half twist).
    """

    params: ParamSet = REFERENCE
    precision: Precision = field(default_factory=Precision)
    scenario: str = "all"
    seed: int = 0
    out: Path = Path("syz_out")
    collision: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.scenario != "all" and self.scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.scenario!r}")
        p = self.precision
        if not (p.quad_tol > 0 and p.psi_match_tol > 0 and p.novikov_cutoff > 0):
            raise ValueError("tolerances and cutoff must be positive")
        if p.mc_samples < 10 ** 5:
            raise ValueError("mc_samples must be at least 1e5")

    @classmethod
    def from_json(cls, obj: dict, **override) -> "RunConfig":
        params = ParamSet.from_json(obj["params"]) if "params" in obj else REFERENCE
        prec = Precision(**obj.get("precision", {}))
        kw = dict(params=params, precision=prec, seed=int(obj.get("seed", 0)),
                  scenario=obj.get("scenario", "all"), collision=dict(obj.get("collision", {})))
        if "out" in obj:
            kw["out"] = Path(obj["out"])
        kw.update({k: v for k, v in override.items() if v is not None})
        return cls(**kw)

    def to_json(self) -> dict:
        return {"params": self.params.to_json(), "precision": asdict(self.precision),
                "scenario": self.scenario, "seed": self.seed, "collision": self.collision}


# records ------------------------------------------------------------------------

@dataclass
class CheckRecord:
    name: str
    anchor: str
    status: str
    measured: float | None
    tolerance: float
    runtime: float
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_json(self) -> dict:
        d = asdict(self)
        for key in ("measured", "tolerance"):
            v = d[key]
            if isinstance(v, float) and not math.isfinite(v):
                d[key] = str(v)
        return d


@dataclass
class Outcome:
    measured: float
    tolerance: float
    ok: bool | None = None
    detail: str = ""

    def passed(self) -> bool:
        if self.ok is not None:
            return bool(self.ok)
        return bool(self.measured <= self.tolerance)


class Context:
    """Shared state of one run: config, cached ``psi`` and the record list."""

    def __init__(self, cfg: RunConfig, write_csv: bool = True):
        self.cfg = cfg
        self.P = cfg.params
        self.psi_fn = PsiFunction(cfg.params, cfg.precision.quad_tol)
        self.records: list[CheckRecord] = []
        self.csv_files: dict = {}
        self.write_csv = write_csv

    def rng(self, name: str) -> np.random.Generator:
        return np.random.default_rng([self.cfg.seed, zlib.crc32(name.encode())])

    def check(self, name: str, anchor: str, fn: Callable[[], Outcome]) -> CheckRecord:
        t0 = time.perf_counter()
        try:
            out = fn()
            rec = CheckRecord(name, anchor, "pass" if out.passed() else "fail",
                              float(out.measured), float(out.tolerance), 0.0, out.detail)
        except Exception as exc:  # noqa: BLE001 - any module error becomes a failed record
            rec = CheckRecord(name, anchor, "fail", None, math.nan, 0.0,
                              f"{type(exc).__name__}: {exc}")
        rec.runtime = time.perf_counter() - t0
        self.records.append(rec)
        return rec

    def csv(self, fname: str, header, rows):
        if not self.write_csv:
            return
        self.cfg.out.mkdir(parents=True, exist_ok=True)
        dual.write_csv(self.cfg.out / fname, header, rows)
        self.csv_files[fname] = CSV_SCHEMAS[fname][0]


# walls -----------------------------------------------------------------------------

def _class_roundtrip(n: int, max_anchor: int = 4) -> Outcome:
    bad = total = 0
    for l in range(min(max_anchor, n + 1) + 1):
        for size in range(l + 1):
            for I in itertools.combinations(range(l), size):
                c = walls.expand_beta(l, I, n)
                region = walls.R(l)
                targets = {walls.ANTICANONICAL: 1}
                targets.update(walls.pairing_targets(c, "u", region))
                targets.update(walls.pairing_targets(c, "v", region))
                got = walls.solve_class_from_intersections(targets, region, len(I), n)
                total += 1
                bad += got != c
    return Outcome(bad, 0, detail=f"{total} classes")


def _monodromy(n: int) -> Outcome:
    bad = 0
    for l in range(n + 1):
        M = walls.monodromy_matrix(l, n)
        want = walls.beta(l, n).vector() - walls.delta(l, n).vector()
        bad += not np.array_equal(M @ walls.beta(l, n).vector(), want)
    return Outcome(bad, 0, detail=f"{n + 1} walls")


def _pairings_preserved(n: int, rng: np.random.Generator, per_wall: int = 20) -> Outcome:
    bad = total = 0
    for l in range(n + 1):
        for sign, region in (("+", walls.Nplus(l)), ("-", walls.Nminus(l))):
            for _ in range(per_wall):
                c = walls.DiskClass(l, int(rng.integers(-3, 4)), int(rng.integers(-3, 4)),
                                    tuple(int(x) for x in rng.integers(-3, 4, n)))
                c2 = walls.monodromy_transport(c, l, sign)
                back = walls.monodromy_transport(c2, l, sign)
                bad += back != c
                for D in walls.defined_divisors(region, n):
                    total += 1
                    bad += walls.intersect(c, D, region) != walls.intersect(c2, D, region)
    return Outcome(bad, 0, detail=f"{total} pairings")


def suite_walls(ctx: Context):
    n = max(ctx.P.n, 3)
    ctx.check("class_solver_roundtrip", "beta_{l,I} recovered from its intersection numbers",
              lambda: _class_roundtrip(n))
    ctx.check("focus_focus_monodromy", "monodromy around a wall sends beta_l to beta_l - delta_l",
              lambda: _monodromy(n))
    ctx.check("transport_preserves_pairings", "wall transport preserves intersection numbers",
              lambda: _pairings_preserved(n, ctx.rng("transport_preserves_pairings")))
    ctx.csv("beta_table.csv", CSV_SCHEMAS["beta_table.csv"][1], beta_table_rows(n))
    ctx.csv("monodromy.csv", CSV_SCHEMAS["monodromy.csv"][1], monodromy_rows(n))


def beta_table_rows(n: int, max_anchor: int = 4) -> list:
    """Every ``beta_{l,I}`` for ``l <= max_anchor`` expanded in the chart basis."""
    rows = []
    for l in range(min(max_anchor, n + 1) + 1):
        for size in range(l + 1):
            for I in itertools.combinations(range(l), size):
                c = walls.expand_beta(l, I, n)
                rows.append([l, " ".join(map(str, I)), c.beta, c.delta,
                             " ".join(map(str, c.S))])
    return rows


def monodromy_rows(n: int) -> list:
    """Rows of the monodromy matrix around each wall, in the chart basis."""
    return [[l, i, " ".join(map(str, row))]
            for l in range(n + 1) for i, row in enumerate(walls.monodromy_matrix(l, n).tolist())]


# psi -------------------------------------------------------------------------------

def psi_grid(P: ParamSet) -> tuple:
    """5 x 5 grid of ``(s, r)``: both signs of ``s`` and every strip of ``r``."""
    ss = (-1.0, -0.5, 0.0, 0.5, 1.0)
    lv = P.levels
    rs = sorted(set(P.radii) | {lv[-1] + 2.0})[:5]
    while len(rs) < 5:
        rs.append(rs[-1] + 1.0)
    return ss, tuple(rs)


def _psi_vs_mc(ctx: Context, rows: list) -> Outcome:
    prec = ctx.cfg.precision
    ss, rs = psi_grid(ctx.P)
    seeds = np.random.SeedSequence([ctx.cfg.seed, zlib.crc32(b"psi_mc")]).spawn(len(ss) * len(rs))
    worst = 0.0
    for (s, r), sq in zip(itertools.product(ss, rs), seeds):
        q = ctx.psi_fn(s, r)
        _, err = aside.psi_with_error(s, r, ctx.P, tol=prec.quad_tol)
        m, se = aside.psi_oracle_mc(s, r, ctx.P, prec.mc_samples,
                                    seed=int(sq.generate_state(1)[0]))
        allowed = 3 * (se + prec.quad_tol * max(1.0, q))
        worst = max(worst, abs(q - float(m)) / allowed)
        rows.append([s, r, q, err, float(m), se])
    return Outcome(worst, 1.0, detail="ratio |quad - mc| / (3 (stderr + quad_tol))")


def _psi_monotone(ctx: Context, m: int = 50) -> Outcome:
    ss = np.linspace(-1.0, 1.0, 11)
    rs = np.linspace(0.05, ctx.P.levels[-1] + 2.0, m)
    worst = math.inf
    for s in ss:
        vals = np.array([ctx.psi_fn(s, r) for r in rs])
        worst = min(worst, float(np.min(np.diff(vals))))
    return Outcome(worst, 0.0, ok=worst > 0, detail="smallest step along r (must be > 0)")


def _psi_lower_bound(ctx: Context) -> Outcome:
    ss, rs = psi_grid(ctx.P)
    rs = tuple(rs) + tuple(ctx.P.levels)
    worst = min(ctx.psi_fn(s, r) - r * r / 2 for s in ss for r in rs)
    return Outcome(worst, 0.0, ok=worst >= 0, detail="min of psi - r^2/2 (must be >= 0)")


def _psi_contour(ctx: Context) -> Outcome:
    ss, rs = psi_grid(ctx.P)
    worst = 0.0
    for s in ss:
        for r in rs:
            if s == 0 and min(abs(r - v) for v in ctx.P.levels) < 1e-9:
                continue
            a, b = ctx.psi_fn(s, r), aside.psi_contour(s, r, ctx.P)
            worst = max(worst, abs(a - b) / max(1.0, abs(b)))
    tol = 10 * ctx.cfg.precision.quad_tol
    return Outcome(worst, tol, detail="relative gap between area and contour routes")


def suite_psi(ctx: Context):
    rows: list = []
    ctx.check("psi_quadrature_vs_mc", "psi matches an independent Monte-Carlo oracle",
              lambda: _psi_vs_mc(ctx, rows))
    ctx.check("psi_increasing_in_r", "psi is increasing in r", lambda: _psi_monotone(ctx))
    ctx.check("psi_above_r2_half", "psi(s, r) >= r^2/2", lambda: _psi_lower_bound(ctx))
    ctx.check("psi_contour_route", "psi by a boundary contour integral",
              lambda: _psi_contour(ctx))
    if rows:
        ctx.csv("psi_grid.csv", CSV_SCHEMAS["psi_grid.csv"][1], rows)


# areas -----------------------------------------------------------------------------

def _beta_areas(ctx: Context, tol: float = 1e-6) -> tuple:
    P = ctx.P
    worst_psi = worst_subset = 0.0
    for k in range(P.n + 2):
        r = P.radii[k]
        ref = aside.psi(0.0, r, P, tol=1e-11)
        base = aside.disk_area(aside.disk_beta(k, (), P))
        worst_psi = max(worst_psi, abs(base - ref))
        for size in range(1, k + 1):
            for I in itertools.combinations(range(k), size):
                a = aside.disk_area(aside.disk_beta(k, I, P))
                worst_subset = max(worst_subset, abs(a - base))
    return worst_psi, worst_subset


def _delta_areas(ctx: Context) -> Outcome:
    worst = 0.0
    for k in range(ctx.P.n + 1):
        for s in (-1.7, -0.3, 0.3, 1.7):
            worst = max(worst, abs(aside.disk_area(aside.disk_delta(k, s, ctx.P)) - s))
    return Outcome(worst, 1e-8)


def suite_areas(ctx: Context):
    cache: dict = {}

    def beta_part(i):
        if "v" not in cache:
            cache["v"] = _beta_areas(ctx)
        return Outcome(cache["v"][i], 1e-6)

    ctx.check("beta_disk_area_is_psi", "area of beta_{k,empty} equals psi(0, r_k)",
              lambda: beta_part(0))
    ctx.check("beta_disk_area_subset_free", "area of beta_{k,I} does not depend on I",
              lambda: beta_part(1))
    ctx.check("delta_disk_area", "area of the orbit disk delta_k at level s is s",
              lambda: _delta_areas(ctx))


# diagram -------------------------------------------------------------------------

def chart_sample_points(P: ParamSet, k: int, s_wall: float = 0.2) -> list[BasePoint]:
    """Five base points of ``U_k``: the strip at ``s = 0``, one point in each
    adjacent wall neighbourhood on both sides of ``s = 0``, filled up with strip
    points at ``s != 0``."""
    lv, m = P.levels, P.wall_margin
    rk = P.radii[k]
    pts = [BasePoint(0.0, rk)]
    if k >= 1:
        pts += [BasePoint(sg * s_wall, lv[k - 1] - m / 2) for sg in (1, -1)]
    if k < len(lv):
        pts += [BasePoint(sg * s_wall, lv[k] + m / 2) for sg in (1, -1)]
    for s in (0.3, -0.4):
        if len(pts) < 5:
            pts.append(BasePoint(s, rk))
    for q in pts:
        if not in_chart(P, k, q):
            raise ValueError(f"sample point {q} is outside U_{k}")
    return pts


def unit_choices(s: float, rng: np.random.Generator, cutoff: float) -> list:
    """Three ``(unit1, unit2)`` pairs; at ``s = 0`` two are ``-1 + T^tau`` families."""

    def phase():
        return complex(np.exp(2j * np.pi * rng.random()))

    out = [(NovikovNum.one(cutoff), NovikovNum.one(cutoff)),
           (T(0.0, phase(), cutoff) + T(0.5, 2.0, cutoff), T(0.0, phase(), cutoff))]
    if s == 0:
        for _ in range(2):
            tau = float(rng.uniform(0.1, 3.0))
            out.append((-1 + T(tau, phase(), cutoff), T(0.0, phase(), cutoff)))
    else:
        out.append((T(0.0, phase(), cutoff) + T(1.3, phase(), cutoff) - T(2.1, 1.0, cutoff),
                    T(0.0, phase(), cutoff) + T(0.7, 0.5, cutoff)))
    return out


def _diagram(ctx: Context) -> Outcome:
    P, pf = ctx.P, ctx.psi_fn
    cut = ctx.cfg.precision.novikov_cutoff
    rng = ctx.rng("diagram")
    worst, count, transports = 0.0, 0, 0
    for k in range(len(P.levels) + 1):
        for q in chart_sample_points(P, k):
            for u1, u2 in unit_choices(q.s, rng, cut):
                m = mirror.fiber_point(q, k, u1, u2, P, pf, precision=cut)
                g = mirror.g_embed_checked(m, P.n)
                lhs = dual.F_eval(toric.val_point(g), P, pf)
                rhs = dual.j_embed(mirror.pi0_dual(m, P, pf), P, pf)
                worst = max(worst, lhs.deviation(rhs))
                count += 1
                for kk in (k - 1, k + 1):
                    if q.s != 0 and in_chart(P, kk, q):
                        m2 = mirror.transport(m, kk, P)
                        if not toric.same_point(g, mirror.g_embed_checked(m2, P.n)):
                            raise AssertionError(f"charts {k} and {kk} embed differently at {q}")
                        transports += 1
    return Outcome(worst, ctx.cfg.precision.psi_match_tol,
                   detail=f"{count} fiber points, {transports} chart transports")


def wall_overlap_point(P: ParamSet, k: int, rng: np.random.Generator) -> BasePoint:
    """Random point of the overlap of ``U_k`` and ``U_{k+1}`` (``s != 0``)."""
    m = P.wall_margin
    s = float(rng.choice((-1, 1)) * rng.uniform(0.05, 1.0))
    r = float(P.levels[k] + m * rng.uniform(-0.95, 0.95))
    return BasePoint(s, r)


def random_unit(rng: np.random.Generator, cutoff: float, terms: int = 3) -> NovikovNum:
    """Valuation-0 unit with up to ``terms - 1`` higher terms.

    Higher exponents lie on the lattice ``0.25 Z`` so that inverses, whose
    support is the semigroup spanned by the exponents, stay small.
    """
    u = T(0.0, complex(np.exp(2j * np.pi * rng.random())), cutoff)
    for _ in range(int(rng.integers(0, terms))):
        u = u + T(0.25 * int(rng.integers(1, 13)), complex(rng.normal(), rng.normal()), cutoff)
    return u


def _gluing(ctx: Context, per_pair: int = 100) -> Outcome:
    P, pf = ctx.P, ctx.psi_fn
    cut = ctx.cfg.precision.novikov_cutoff
    rng = ctx.rng("superpotential_gluing")
    bad = 0
    for k in range(len(P.levels)):
        for _ in range(per_pair):
            q = wall_overlap_point(P, k, rng)
            m = mirror.fiber_point(q, k + 1, random_unit(rng, cut), random_unit(rng, cut),
                                   P, pf, precision=cut)
            down = mirror.transport(m, k, P)
            W_hi = mirror.W_local(k + 1, m.y1, m.y2)
            W_lo = mirror.W_local(k, down.y1, down.y2)
            bad += not W_hi.approx_equal(W_lo, 1e-12)
    return Outcome(bad, 0, detail=f"{per_pair} points per adjacent pair")


def suite_diagram(ctx: Context):
    ctx.check("superpotential_gluing", "W_{k+1}(y) = W_k(Phi(y)) on wall overlaps",
              lambda: _gluing(ctx))
    ctx.check("diagram_commutes", "F o g = j o pi_0 (commutative diagram)", lambda: _diagram(ctx))
    rows = []
    try:
        for s in (-0.5, 0.0, 0.5):
            lv = dual.psi_levels(s, ctx.P, ctx.psi_fn)
            rows += dual.surface_slice_rows(s, np.linspace(0.0, 1.2 * lv[-1], 61), ctx.P, ctx.psi_fn)
    except Exception:  # noqa: BLE001 - plot data only; the checks above carry failures
        return
    ctx.csv("surface.csv", dual.surface_header(ctx.P.n), rows)


# observation A ---------------------------------------------------------------------

def _divisor_sweep(ctx: Context, i: int, m: int) -> tuple:
    P, pf = ctx.P, ctx.psi_fn
    lv = dual.psi_levels(0.0, P, pf)
    ts = np.linspace(lv[i - 1] - 1.0, lv[i] + 1.0, m)
    rs = []
    for t in ts:
        q = dual.f_eval(dual.divisor_point(i, float(t), P.n), P, pf, ctx.cfg.precision.psi_match_tol)
        if q.s != 0:
            raise AssertionError(f"divisor image leaves s = 0: {q}")
        rs.append(q.r)
    return ts, np.array(rs)


def _observation_a(ctx: Context, rows: list, m: int = 201) -> Outcome:
    P = ctx.P
    P.require_sorted()
    worst_end = worst_gap = 0.0
    ok = True
    for i in range(1, P.n + 1):
        lo, hi = P.norm(i - 1), P.norm(i)
        ts, rs = _divisor_sweep(ctx, i, m)
        rows += [[i, float(t), float(r)] for t, r in zip(ts, rs)]
        worst_end = max(worst_end, abs(rs.min() - lo), abs(rs.max() - hi))
        grid = np.sort(np.clip(rs, lo, hi))
        # Hausdorff distance from the interval to the samples is half the widest gap
        gap = float(np.max(np.diff(grid))) / 2
        resolution = 2 * (hi - lo) / (m - 1)
        worst_gap = max(worst_gap, gap / resolution)
        ok &= gap < resolution
    return Outcome(worst_end, 1e-6, ok=ok and worst_end < 1e-6,
                   detail=f"endpoint error; worst gap / resolution = {worst_gap:.3g}")


def chain_curve(a0: complex, a1: complex, m: int = 400) -> np.ndarray:
    """Spiral from ``a0`` to ``a1`` with ``|z|`` and ``arg z`` both linear in the
    parameter, so that ``|z|`` is monotone along it."""
    t = np.linspace(0.0, 1.0, m)
    r = abs(a0) + (abs(a1) - abs(a0)) * t
    th0 = np.angle(a0)
    dth = (np.angle(a1) - th0 + np.pi) % (2 * np.pi) - np.pi
    z = r * np.exp(1j * (th0 + dth * t))
    z[0], z[-1] = a0, a1
    return z


def _sphere_images(ctx: Context) -> Outcome:
    P = ctx.P
    P.require_sorted()
    bad = 0
    for i in range(1, P.n + 1):
        lo, hi = aside.lagrangian_sphere_image(chain_curve(P.a[i - 1], P.a[i]), P)
        bad += (lo, hi) != (abs(P.a[i - 1]), abs(P.a[i]))
    return Outcome(bad, 0, detail="chain spheres whose image differs from [|a_(i-1)|, |a_i|]")


def suite_observation_a(ctx: Context):
    rows: list = []
    ctx.check("divisor_images", "f(D_i) = {0} x [|a_(i-1)|, |a_i|]",
              lambda: _observation_a(ctx, rows))
    ctx.check("sphere_images", "Lagrangian chain spheres have the same images as the divisors",
              lambda: _sphere_images(ctx))
    if rows:
        ctx.csv("divisor_images.csv", dual.DIVISOR_COLUMNS_V1, rows)


# singular locus -------------------------------------------------------------------

def singular_grid(P: ParamSet, psi_fn: PsiFunction, m: int = 200) -> tuple:
    """``m x m`` grid of ``(s, c)``; the ``s`` values include ``0`` exactly."""
    ss = (np.arange(m) - m // 2) / (m // 2)
    top = 1.25 * max(psi_fn.levels(0.0))
    cs = np.linspace(0.0, top, m + 1)[1:]
    return ss, cs


def _singular(ctx: Context, m: int = 200, verify: int = 20) -> Outcome:
    P, pf = ctx.P, ctx.psi_fn
    tol = ctx.cfg.precision.psi_match_tol
    lv0 = dual.psi_levels(0.0, P, pf)
    bad_corner = 0
    for k in range(P.n + 1):
        v = dual.classify_point(dual.corner_A(k, 0.0, P, pf), P, pf, tol)
        bad_corner += v.smooth or v.corner != k
    ss, cs = singular_grid(P, pf, m)
    bad_grid, smooth = 0, []
    for s in ss:
        lv = dual.psi_levels(float(s), P, pf)
        for c in cs:
            p = dual.SurfacePoint(tuple(dual._gamma_from_levels(c, lv, k)
                                        for k in range(len(lv) + 1)) + (float(s),))
            at_corner = s == 0 and any(abs(c - v) <= tol * max(1.0, v) for v in lv0)
            v = dual.classify_point(p, P, pf, tol)
            if at_corner:
                bad_grid += v.smooth
                continue
            if not v.smooth or v.witness is None or not v.witness.contains(float(s), float(c)):
                bad_grid += 1
            else:
                smooth.append(v.witness)
    rng = ctx.rng("singular_locus")
    worst = 0.0
    picks = rng.choice(len(smooth), size=min(verify, len(smooth)), replace=False)
    zero_row = [w for w in smooth if w.s == 0]
    sample = [smooth[i] for i in picks] + zero_row[:: max(1, len(zero_row) // verify)]
    for w in sample:
        worst = max(worst, w.verify(P, pf, rng, samples=4))
    ok = bad_corner == 0 and bad_grid == 0 and worst < tol
    return Outcome(bad_corner + bad_grid, 0, ok=ok,
                   detail=f"{m * m} grid points; witness deviation {worst:.3g} on {len(sample)}")


def suite_singular(ctx: Context):
    ctx.check("singular_locus", "F is singular exactly at the corners A_k(0)",
              lambda: _singular(ctx))


# collision -------------------------------------------------------------------------

def collided_params(n: int, lam: float) -> ParamSet:
    a = tuple(lam * np.exp(2j * np.pi * (k + 0.25) / (n + 1)) for k in range(n + 1))
    return ParamSet(a)


def random_trop_point(n: int, rng: np.random.Generator) -> toric.TropToricPoint:
    """Random tropical point; about a fifth lie on one or two toric divisors."""
    if rng.random() < 0.2:
        i = int(rng.integers(0, n + 2))
        vx = list(rng.normal(0, 2, n + 2))
        vx[i] = math.inf
        if i <= n and rng.random() < 0.5:
            vx[i + 1] = math.inf
        return toric.TropToricPoint(tuple(vx), 0.0)
    vy = float(rng.normal(0, 1.5)) if rng.random() < 0.8 else 0.0
    vx = list(rng.normal(0, 2, n + 2))
    if vy != 0:
        vx[-1] = min(0.0, vy) - sum(vx[:-1])
    else:
        vx[-1] = abs(vx[-1]) - sum(vx[:-1])
    return toric.TropToricPoint(tuple(vx), vy)


def _degenerate(ctx: Context, count: int = 500) -> Outcome:
    lam = float(ctx.cfg.collision.get("lam", 2.0))
    Pc = collided_params(ctx.P.n, lam)
    pf = PsiFunction(Pc, ctx.cfg.precision.quad_tol)
    rng = ctx.rng("degenerate_formula")
    bad = 0
    for _ in range(count):
        p = random_trop_point(Pc.n, rng)
        bad += dual.degenerate_F_reduced(p, Pc.levels[0], Pc, pf) != dual.F_eval(p, Pc, pf)
    return Outcome(bad, 0, detail=f"{count} tropical points, all norms {lam}")


def _collision(ctx: Context, rows: list, grid: int = 201) -> Outcome:
    P = ctx.P
    k = int(ctx.cfg.collision.get("twist_index", 1))
    t0 = aside.collision_time(P, k, tol=1e-6)
    counts = []
    for t in np.linspace(0.0, 1.0, grid):
        Q = aside.half_twist_path(P, k, float(t))
        counts.append(aside.component_count(Q))
        rows.append([float(t)] + [abs(x) for x in Q.a] + [counts[-1]])
    base = len(P.levels)
    at = aside.component_count(aside.half_twist_path(P, k, t0))
    before = aside.component_count(aside.half_twist_path(P, k, t0 - 1e-3))
    after = aside.component_count(aside.half_twist_path(P, k, t0 + 1e-3))
    ok = (before, at, after) == (base, base - 1, base) and min(counts) >= base - 1
    # refine: the gap at t0 must be below the bisection resolution times its slope
    gap = abs(abs(aside.half_twist_path(P, k, t0).a[k - 1]) - abs(aside.half_twist_path(P, k, t0).a[k]))
    return Outcome(gap, 1e-5, ok=ok and gap < 1e-5,
                   detail=f"t0 = {t0:.9f}; components {before} -> {at} -> {after}")


def suite_collision(ctx: Context):
    rows: list = []
    ctx.check("degenerate_formula", "collided norms reduce F to min/max with pinned middle",
              lambda: _degenerate(ctx))
    ctx.check("half_twist_collision", "two focus-focus points collide along the half twist",
              lambda: _collision(ctx, rows))
    if rows:
        header = ["t"] + [f"norm_{j}" for j in range(ctx.P.n + 1)] + ["components"]
        ctx.csv("collision_track.csv", header, rows)


# injectivity ----------------------------------------------------------------------

def random_mirror_point(P: ParamSet, rng: np.random.Generator, psi_fn: PsiFunction,
                        cutoff: float) -> mirror.MirrorPoint:
    lv = P.levels
    k = int(rng.integers(0, len(lv) + 1))
    lo = lv[k - 1] if k >= 1 else 0.0
    hi = lv[k] if k < len(lv) else lv[-1] + 2.0
    q = BasePoint(float(rng.uniform(-1, 1)), float(lo + (hi - lo) * rng.uniform(0.05, 0.95)))
    return mirror.fiber_point(q, k, random_unit(rng, cutoff), random_unit(rng, cutoff),
                              P, psi_fn, precision=cutoff)


def _g_injective(ctx: Context, count: int = 200) -> Outcome:
    rng = ctx.rng("g_injective")
    cut = ctx.cfg.precision.novikov_cutoff
    pts = [mirror.g_embed(random_mirror_point(ctx.P, rng, ctx.psi_fn, cut), ctx.P.n)
           for _ in range(count)]
    coincide = 0
    for i in range(count):
        for j in range(i):
            # y is G-invariant, so differing y already separates the points
            if pts[i].y.approx_equal(pts[j].y, 1e-8) and toric.same_point(pts[i], pts[j]):
                coincide += 1
    return Outcome(coincide, 0, detail=f"{count} random mirror points")


def _j_roundtrip(ctx: Context, m: int = 20) -> Outcome:
    P, pf = ctx.P, ctx.psi_fn
    worst = 0.0
    for s in np.linspace(-1.0, 1.0, m):
        for r in np.linspace(0.1, P.levels[-1] + 1.5, m):
            q = BasePoint(float(s), float(r))
            back = dual.j_inverse(dual.j_embed(q, P, pf), P, pf, ctx.cfg.precision.psi_match_tol)
            worst = max(worst, abs(back.s - q.s), abs(back.r - q.r))
    return Outcome(worst, 1e-6, detail=f"{m} x {m} base grid")


def suite_injectivity(ctx: Context):
    ctx.check("g_injective", "g embeds the mirror injectively", lambda: _g_injective(ctx))
    ctx.check("j_roundtrip", "j is an embedding with inverse j^-1", lambda: _j_roundtrip(ctx))


SUITES = {
    "walls": suite_walls,
    "psi": suite_psi,
    "areas": suite_areas,
    "diagram": lambda ctx: (suite_diagram(ctx), suite_injectivity(ctx)),
    "observation-a": suite_observation_a,
    "singular": suite_singular,
    "collision": suite_collision,
}


def run_scenario(cfg: RunConfig, write_csv: bool = True) -> Context:
    """Run the configured scenario (or all of them) and return the filled context."""
    ctx = Context(cfg, write_csv)
    names = SCENARIOS if cfg.scenario == "all" else (cfg.scenario,)
    for name in names:
        SUITES[name](ctx)
    return ctx
