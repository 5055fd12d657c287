"""The acceptance criteria as runnable checks.

Each criterion returns a list of :class:`Verdict`; it passes when every
verdict does.  Shared by the test suite and ``cornerforge suite``.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import double_fold as df
from . import drill_algebraic as da
from . import drill_local as dl
from . import germs as gm
from . import surfaces as sf
from .poly import MPoly, eval_poly

EXPECTED_GENUS_TABLE = [
    ["invalid", 0, "invalid", "invalid", "invalid", "invalid"],
    [1, 1, 1, "invalid", "invalid", "invalid"],
    ["invalid", 2, 3, 5, "invalid", "invalid"],
    [2, 3, 5, 9, 17, "invalid"],
    ["invalid", 4, 7, 13, 25, 49],
]

FOLD_CASES = ((Fraction(1), 1), (Fraction(1, 2), 2), (Fraction(1, 2), 6))


@dataclass
class Verdict:
    name: str
    ok: bool
    witness: object = None

    def to_json(self) -> dict:
        return {"name": self.name, "ok": bool(self.ok), "witness": self.witness}


@dataclass
class CriterionResult:
    number: int
    title: str
    verdicts: list
    elapsed: float
    limit: float
    extra: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(v.ok for v in self.verdicts) and self.elapsed < self.limit

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        failed = [v.name for v in self.verdicts if not v.ok]
        if self.elapsed >= self.limit:
            failed.append(f"time {self.elapsed:.1f}s >= {self.limit:.0f}s")
        tail = f" (failed: {', '.join(failed)})" if failed else ""
        return f"[{status}] criterion {self.number}: {self.title} [{self.elapsed:.2f}s]{tail}"

    def to_json(self) -> dict:
        return {
            "criterion": self.number,
            "title": self.title,
            "ok": self.ok,
            "elapsed_limit_s": self.limit,
            "verdicts": [v.to_json() for v in self.verdicts],
            **self.extra,
        }


# -- 1 ----------------------------------------------------------------------

def genus_table(rng) -> list:
    grid = sf.table_grid(7, 7)
    text = sf.table(7, 7).splitlines()[1:]
    cells = [row.split()[1:] for row in text]
    as_text = [["--" if v == "invalid" else str(v) for v in row] for row in EXPECTED_GENUS_TABLE]
    return [
        Verdict("genus grid matches", grid == EXPECTED_GENUS_TABLE, None if grid == EXPECTED_GENUS_TABLE else grid),
        Verdict("printed table matches", cells == as_text, None if cells == as_text else cells),
    ]


# -- 2 ----------------------------------------------------------------------

def euler_oracle(rng) -> list:
    bad, count = [], 0
    for n in range(3, 9):
        poly = sf.lattice_polygon(n)
        for s in range(2, 6):
            for part in sf.compatible_partitions(n, s):
                count += 1
                top = sf.quotient_complex(poly, part)
                expected = Fraction(2) ** (s - 2) * (4 - n)
                if top.chi != expected or not top.connected:
                    bad.append({"n": n, "s": s, "partition": part.to_json(), "chi": top.chi})
    return [Verdict(f"chi and connectivity on {count} compatible instances", not bad, bad[:3] or None)]


# -- 3 ----------------------------------------------------------------------

def regularity(rng) -> list:
    bad, count = [], 0
    for n in range(3, 7):
        poly = sf.lattice_polygon(n)
        for s in range(2, n + 1):
            for part in sf.compatible_partitions(n, s):
                count += 1
                rep = sf.verify_regularity(poly, part)
                if not rep["ok"]:
                    bad.append(rep["witness"])
    return [Verdict(f"rank s on {count} compatible instances", not bad, bad[:3] or None)]


# -- 4 ----------------------------------------------------------------------

def _germ_failures(g: gm.OrthantGerm, with_oracle: bool) -> list:
    out = []
    n = gm.normalize(g)
    e = gm.e_value(n)
    if e == 1:
        out.append(("e != 1", str(n)))
    if (e == 0) != (len(n.orthants) == 1):
        out.append(("e = 0 iff single orthant", str(n)))
    for stratum in gm.enumerate_strata(n):
        face = gm.germ_at_face(n, stratum)
        if gm.e_value(face) > e:
            out.append(("face semicontinuity", str(n)))
            break
    if with_oracle:
        base = gm.grid_connectivity_oracle(n)
        for i in n.divisor:
            if gm.disconnects(n, i) != (gm.grid_connectivity_oracle(n, i) > base):
                out.append(("grid oracle", f"{n} coordinate {i}"))
    return out


def germ_lemmas(rng, random_count: int = 10_000) -> list:
    failures = {k: [] for k in ("e != 1", "e = 0 iff single orthant", "face semicontinuity", "grid oracle")}
    exhaustive = 0
    for d in (1, 2, 3):
        for g in gm.all_germs(d):
            exhaustive += 1
            for name, w in _germ_failures(g, True):
                failures[name].append(w)
    # random d = 4 germs, checked once per orbit under permutations and sign flips
    masks = [gm.germ_mask(gm.random_germ(4, rng)) for _ in range(random_count)]
    reps = sorted(set(gm.canonical_masks(4, masks).tolist()))
    for m in reps:
        for name, w in _germ_failures(gm.germ_from_mask(4, m), True):
            failures[name].append(w)
    extra = f"{exhaustive} exhaustive, {random_count} random in {len(reps)} orbits"
    return [Verdict(f"{name} ({extra})", not ws, ws[:3] or None) for name, ws in failures.items()]


# -- 5 ----------------------------------------------------------------------

def blowup_reduction(rng, random_count: int = 1000) -> list:
    reduce_bad, oracle_bad, charts = [], [], 0
    for d in (2, 3):
        for g in gm.all_germs(d):
            center = gm.disconnecting_coords(g)
            e = len(center)
            if e < 2:
                continue
            for cell, chart in dl.blowup_charts(g, center).items():
                charts += 1
                if gm.e_value(chart) > e - 1:
                    reduce_bad.append({"germ": str(g), "cell": dl.cell_to_str(cell), "chart": str(chart)})
                if dl.chart_numeric_oracle(g, center, cell, rng=rng) != chart:
                    oracle_bad.append({"germ": str(g), "cell": dl.cell_to_str(cell)})
    tests = [g for d in (1, 2, 3) for g in gm.all_germs(d)]
    tests += [gm.random_germ(4, rng) for _ in range(random_count)]
    desing_bad = []
    for g in tests:
        try:
            tree = dl.desingularize(g, max_depth=8)
        except dl.DepthExceeded as exc:
            desing_bad.append({"germ": str(g), "error": str(exc)})
            continue
        if tree.depth() > 4 or any(gm.e_value(leaf) != 0 for leaf in tree.leaves()):
            desing_bad.append({"germ": str(g), "depth": tree.depth()})
    return [
        Verdict(f"e drops on {charts} charts", not reduce_bad, reduce_bad[:3] or None),
        Verdict("charts match numeric oracle", not oracle_bad, oracle_bad[:3] or None),
        Verdict(f"desingularize depth <= 4 with corner leaves on {len(tests)} germs", not desing_bad, desing_bad[:3] or None),
    ]


# -- 6 ----------------------------------------------------------------------

def strict_transforms(rng, samples: int = 10_000) -> list:
    empty_bad, m_bad, numeric_bad = [], [], []
    for ell in range(1, 5):
        for e in range(0, 3):
            for eps in itertools.product((1, -1), repeat=ell):
                neg = tuple(-s for s in eps)
                if dl.transforms_intersection_dim(eps, neg, e) != dl.EMPTY:
                    empty_bad.append({"eps": eps, "e": e})
                for agree in range(1, ell + 1):
                    other = eps[:agree] + tuple(-s for s in eps[agree:])
                    got = dl.transforms_intersection_dim(eps, other, e)
                    if got != e + agree:
                        m_bad.append({"eps": eps, "other": other, "e": e, "got": got})
    # numeric search on one antipodal pair per sphere dimension and e
    for ell in range(1, 5):
        for e in (0, 1):
            eps = tuple(int(s) for s in rng.choice((1, -1), size=ell))
            neg = tuple(-s for s in eps)
            dist = dl.sampled_min_distance(
                dl.strict_transform_orthant(eps, e), dl.strict_transform_orthant(neg, e), rng, samples)
            if dist <= 1e-9:
                numeric_bad.append({"eps": eps, "e": e, "distance": dist})
    return [
        Verdict("antipodal pairs empty", not empty_bad, empty_bad[:3] or None),
        Verdict("normal-form pairs have dimension m", not m_bad, m_bad[:3] or None),
        Verdict(f"no sampled counterexample ({samples} points)", not numeric_bad, numeric_bad[:3] or None),
    ]


# -- 7 ----------------------------------------------------------------------

def algebraic_double(rng) -> list:
    c = da.plane_line_center()
    both, plus = da.emit_twisted_double(c, "both"), da.emit_twisted_double(c, 1)
    u = MPoly.var("u", both.vars)
    shape_ok = both.vars == ("x", "y", "u") and list(both.equations) == [u * u - 1]

    # exact comparison with {x >= 0, u = 1} U {x <= 0, u = -1}
    desc_bad = []
    grid = [Fraction(i, 2) for i in range(-4, 5)]
    for x, y, uu in itertools.product(grid, grid[::2], [Fraction(-1), Fraction(1), Fraction(0), Fraction(1, 2), Fraction(2)]):
        expected = (x >= 0 and uu == 1) or (x <= 0 and uu == -1)
        if plus.satisfies((x, y, uu), tol=0) != expected:
            desc_bad.append([str(x), str(y), str(uu)])

    lifted_bad = []
    for x in da.sample_off_center(c, rng, 1000):
        p = da.lift_point(c, x, 1)
        if not plus.satisfies(p, 1e-9) or p[2] * p[0] < 0 or tuple(p[:2]) != tuple(x):
            lifted_bad.append(list(p))

    fiber_bad = []
    for y in (-2.0, 0.0, 3.0):
        rep = da.verify_fiber(c, (0.0, y), samples=8, rng=rng)
        if not rep["ok"] or rep["count"] != 2 or rep["observed_distinct"] != 2:
            fiber_bad.append(rep)

    theta = da.theta_check(c, samples=100, rng=rng)
    return [
        Verdict("double restricted to u^2 = 1 is {u = +-1}", shape_ok),
        Verdict("plus copy matches the two-line description", not desc_bad, desc_bad[:3] or None),
        Verdict("u*x >= 0 on 1000 lifted samples", not lifted_bad, lifted_bad[:3] or None),
        Verdict("codimension-1 fibers have 2 points", not fiber_bad, fiber_bad[:1] or None),
        Verdict("theta fibers have cardinality 2 on 100 samples", theta["ok"], theta["failures"] or None),
    ]


# -- 8 ----------------------------------------------------------------------

def fold_certification(rng) -> list:
    verdicts = []
    for a, k in FOLD_CASES:
        rep = df.fold_certify(df.FoldParams(a, k))
        verdicts.append(Verdict(f"fold_certify a={a} k={k}", rep["ok"],
                                None if rep["ok"] else rep["verdicts"]))
    value = df.fold_eval(df.FoldParams(Fraction(1, 2), 2), 0.5)
    verdicts.append(Verdict("fold_eval(1/2, 2, 1/2) = sqrt(1/2)", abs(value - math.sqrt(0.5)) <= 1e-12, value))
    for a, k in FOLD_CASES:
        fd = df.glue_junction_fd(df.FoldParams(a, k))
        worst = max(max(r["at_0"], r["at_a"]) for r in fd["orders"])
        verdicts.append(Verdict(f"glue junction differences a={a} k={k} (orders <= {2 * k - 1}, h=1e-3, tol 1e-6)",
                                worst <= 1e-6, {"worst": worst, "orders": fd["orders"]}))
    return verdicts


# -- 9 ----------------------------------------------------------------------

# rational points on each double, covering corners, edges and interior
RATIONAL_WITNESSES = {
    "parabola": [(0, 0), (4, 2), (1, -1), (Fraction(9, 4), Fraction(3, 2))],
    # h = (x, 1 - x, y, 1 - y)
    "square": [(0, 0, 0, 1, 0, 1), (1, 1, 1, 0, 1, 0), (0, 1, 0, 1, -1, 0),
               (Fraction(9, 25), 0, Fraction(3, 5), Fraction(4, 5), 0, 1),
               (Fraction(9, 25), Fraction(16, 25), Fraction(3, 5), Fraction(4, 5), Fraction(4, 5), Fraction(-3, 5))],
    # h = (1 - x^2 - y^2, y)
    "half-disc": [(0, 0, 1, 0), (1, 0, 0, 0), (-1, 0, 0, 0), (Fraction(3, 5), 0, Fraction(4, 5), 0),
                  (Fraction(1, 9), Fraction(4, 9), Fraction(8, 9), Fraction(2, 3))],
}


def double_round_trips(rng, samples: int = 1000) -> list:
    verdicts = []
    boxes = {"parabola": ([0.0], [4.0]), "square": ([0.0, 0.0], [1.0, 1.0]), "half-disc": ([-1.0, 0.0], [1.0, 1.0])}
    for name, spec in df.corners_examples().items():
        system = df.emit_double(spec)
        lo, hi = boxes[name]
        bad, got = [], 0
        while got < samples:
            x = tuple(float(v) for v in rng.uniform(lo, hi))
            pt = dict(zip(spec.vars, x))
            if any(float(eval_poly(h, pt)) < 0 for h in spec.inequalities):
                continue
            got += 1
            z = df.section_plus(spec, x)
            if df.project(spec, z) != x or not system.satisfies(z, 1e-9):
                bad.append(list(z))
        verdicts.append(Verdict(f"{name}: project(section_plus(x)) = x on {samples} samples", not bad, bad[:3] or None))
        rep = df.smoothness_check(spec, RATIONAL_WITNESSES[name], exact=True)
        verdicts.append(Verdict(f"{name}: Jacobian rank {spec.ell} at rational witnesses", rep["ok"], rep["witness"]))
    return verdicts


CRITERIA = {
    1: ("genus table reproduction", genus_table, 1.0),
    2: ("Euler oracle equivalence", euler_oracle, 10.0),
    3: ("regularity certificates", regularity, 10.0),
    4: ("germ lemma suite", germ_lemmas, 30.0),
    5: ("blow-up reduction", blowup_reduction, 60.0),
    6: ("strict-transform identities", strict_transforms, 10.0),
    7: ("algebraic double sanity", algebraic_double, 5.0),
    8: ("fold certification", fold_certification, 5.0),
    9: ("double round trips", double_round_trips, 5.0),
}


def run_criterion(number: int, seed: int = 0) -> CriterionResult:
    title, func, limit = CRITERIA[number]
    rng = np.random.default_rng(np.random.SeedSequence(seed).spawn(number)[-1])
    start = time.perf_counter()
    verdicts = func(rng)
    return CriterionResult(number, title, verdicts, time.perf_counter() - start, limit)


def run_all(seed: int = 0) -> list:
    return [run_criterion(n, seed) for n in CRITERIA]
