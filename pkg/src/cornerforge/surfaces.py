"""Compact Nash surfaces ``D_s(P_n)`` built from a convex polygon.

A convex ``n``-gon ``P = {h_1 >= 0, ..., h_n >= 0}`` and a partition of its
edges into ``s`` classes with no two adjacent edges in one class give the
surface ``{t_k^2 = prod_{i in J_k} h_i}`` over ``P``.  It is glued from
``2^s`` copies of ``P`` and has Euler characteristic ``2^{s-2}(4 - n)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .poly import MPoly, as_rat, eval_poly, jacobian_rank
from .system import VarietySystem

XY = ("x", "y")
INVALID = "invalid"


class PolygonError(ValueError):
    pass


@dataclass(frozen=True)
class ConvexPolygon:
    vertices: tuple  # counterclockwise ((x, y), ...) of Fractions
    edge_lines: tuple  # h_i vanishes on the edge from vertex i to vertex i+1

    @property
    def n(self) -> int:
        return len(self.vertices)

    def interior_point(self) -> tuple:
        n = self.n
        return (sum(v[0] for v in self.vertices) / n, sum(v[1] for v in self.vertices) / n)

    def edge_midpoint(self, i: int) -> tuple:
        """Midpoint of edge ``i`` (1-based)."""
        a, b = self.vertices[i - 1], self.vertices[i % self.n]
        return ((a[0] + b[0]) / 2, (a[1] + b[1]) / 2)

    def h_at(self, i: int, pt: Sequence) -> Fraction:
        return eval_poly(self.edge_lines[i - 1], dict(zip(XY, pt)))

    def contains(self, pt: Sequence) -> bool:
        return all(self.h_at(i, pt) >= 0 for i in range(1, self.n + 1))


def polygon_from_vertices(points: Iterable[Sequence]) -> ConvexPolygon:
    verts = tuple((as_rat(p[0]), as_rat(p[1])) for p in points)
    n = len(verts)
    if n < 3:
        raise PolygonError("a polygon needs at least 3 vertices")
    x, y = MPoly.var("x", XY), MPoly.var("y", XY)
    lines = []
    for i in range(n):
        (ax, ay), (bx, by) = verts[i], verts[(i + 1) % n]
        lines.append((y - ay) * (bx - ax) - (x - ax) * (by - ay))
    # strict convexity: every other vertex lies strictly on the inner side of every edge
    for i, h in enumerate(lines):
        for j, v in enumerate(verts):
            if j in (i, (i + 1) % n):
                continue
            if eval_poly(h, dict(zip(XY, v))) <= 0:
                raise PolygonError(f"vertices are not strictly convex counterclockwise (edge {i + 1}, vertex {j + 1})")
    poly = ConvexPolygon(verts, tuple(lines))
    assert all(poly.h_at(i, poly.interior_point()) > 0 for i in range(1, n + 1))
    return poly


def lattice_polygon(n: int) -> ConvexPolygon:
    """A convex lattice ``n``-gon with vertices on a scaled rational circle."""
    if n < 3:
        raise PolygonError("n must be at least 3")
    slopes = []
    for j in range(n):
        theta = -math.pi + 2 * math.pi * (j + 0.5) / n
        slopes.append(Fraction(math.tan(theta / 2)).limit_denominator(64))
    if len(set(slopes)) != n:
        raise PolygonError(f"could not place {n} distinct rational points")
    pts = [((1 - m * m) / (1 + m * m), 2 * m / (1 + m * m)) for m in slopes]
    scale = math.lcm(*(c.denominator for p in pts for c in p))
    return polygon_from_vertices([(p[0] * scale, p[1] * scale) for p in pts])


def unit_square() -> ConvexPolygon:
    return polygon_from_vertices([(0, 0), (1, 0), (1, 1), (0, 1)])


@dataclass(frozen=True)
class EdgePartition:
    classes: tuple  # tuple of frozensets of 1-based edge indices

    def __init__(self, classes: Iterable[Iterable[int]]):
        object.__setattr__(self, "classes", tuple(frozenset(c) for c in classes))

    @property
    def s(self) -> int:
        return len(self.classes)

    def class_of(self, i: int) -> int:
        for k, c in enumerate(self.classes):
            if i in c:
                return k
        raise KeyError(i)

    def validate(self, n: int) -> None:
        if any(not c for c in self.classes):
            raise ValueError("empty class in edge partition")
        seen = [i for c in self.classes for i in c]
        if sorted(seen) != list(range(1, n + 1)):
            raise ValueError(f"classes {self.to_json()} do not partition the edges 1..{n}")

    def to_json(self) -> list:
        return [sorted(c) for c in self.classes]


def _line_meet(h1: MPoly, h2: MPoly):
    a1, b1, c1 = h1.coefficient((1, 0)), h1.coefficient((0, 1)), h1.coefficient((0, 0))
    a2, b2, c2 = h2.coefficient((1, 0)), h2.coefficient((0, 1)), h2.coefficient((0, 0))
    det = a1 * b2 - a2 * b1
    if det == 0:
        return None
    return ((b1 * c2 - b2 * c1) / det, (a2 * c1 - a1 * c2) / det)


def compatible_geometric(p: ConvexPolygon, j: EdgePartition) -> bool:
    for c in j.classes:
        for a, b in itertools.combinations(sorted(c), 2):
            pt = _line_meet(p.edge_lines[a - 1], p.edge_lines[b - 1])
            if pt is not None and p.contains(pt):
                return False
    return True


def compatible_cyclic(n: int, j: EdgePartition) -> bool:
    return all(j.class_of(i) != j.class_of(i % n + 1) for i in range(1, n + 1))


def check_compatibility(p: ConvexPolygon, j: EdgePartition) -> bool:
    j.validate(p.n)
    geometric, cyclic = compatible_geometric(p, j), compatible_cyclic(p.n, j)
    if geometric != cyclic:
        raise AssertionError(f"compatibility tests disagree on {j.to_json()}")
    return geometric


def _require_compatible(p: ConvexPolygon, j: EdgePartition) -> None:
    if not check_compatibility(p, j):
        raise ValueError(f"incompatible partition {j.to_json()}")


def class_products(p: ConvexPolygon, j: EdgePartition) -> list:
    out = []
    for c in j.classes:
        prod = MPoly.const(1, XY)
        for i in sorted(c):
            prod = prod * p.edge_lines[i - 1]
        out.append(prod)
    return out


def emit_surface(p: ConvexPolygon, j: EdgePartition) -> VarietySystem:
    _require_compatible(p, j)
    ts = tuple(f"t{k}" for k in range(1, j.s + 1))
    allv = XY + ts
    eqs = tuple(MPoly.var(t, allv) ** 2 - h.embed(allv) for t, h in zip(ts, class_products(p, j)))
    ineqs = tuple((h.embed(allv), ">=") for h in p.edge_lines)
    return VarietySystem(allv, eqs, ineqs, f"D_{j.s}(P_{p.n}); inequalities select the polygon chamber",
                         {"partition": j.to_json()})


def _rank_at(p: ConvexPolygon, j: EdgePartition, pt: tuple) -> tuple:
    """Rank of the surface Jacobian at the lift of ``pt``.

    A class with ``prod h != 0`` has ``t_k != 0`` and contributes a pivot in
    its own ``t`` column; the remaining rows have zero ``t`` part, so only
    their ``(x, y)`` gradients need exact evaluation.
    """
    products = class_products(p, j)
    point = dict(zip(XY, pt))
    vanishing = []
    for k, (c, prod) in enumerate(zip(j.classes, products)):
        if eval_poly(prod, point) == 0:
            zeros = [i for i in c if p.h_at(i, pt) == 0]
            if len(zeros) != 1:
                raise AssertionError(f"class {sorted(c)} has {len(zeros)} vanishing lines at {pt}")
            vanishing.append(k)
    grad_rank = jacobian_rank([products[k] for k in vanishing], point) if vanishing else 0
    return j.s - len(vanishing) + grad_rank, vanishing


def verify_regularity(p: ConvexPolygon, j: EdgePartition) -> dict:
    _require_compatible(p, j)
    strata = [("vertex", v) for v in p.vertices]
    strata += [("edge", p.edge_midpoint(i)) for i in range(1, p.n + 1)]
    strata.append(("interior", p.interior_point()))
    rows, witness = [], None
    for kind, pt in strata:
        rk, vanishing = _rank_at(p, j, pt)
        rows.append({"stratum": kind, "point": [str(c) for c in pt], "vanishing": len(vanishing), "rank": rk})
        if rk != j.s and witness is None:
            witness = rows[-1]
    return {"n": p.n, "s": j.s, "checked": rows, "witness": witness, "ok": witness is None}


def _valid_pair(n: int, s: int) -> bool:
    return 2 + n % 2 <= s <= n


def genus_formula(n: int, s: int):
    if n < 3:
        raise ValueError("n must be at least 3")
    if not _valid_pair(n, s):
        return INVALID
    g = Fraction(2) ** (s - 3) * (n - 4) + 1
    if g.denominator != 1 or g < 0:
        return INVALID
    return int(g)


def euler_formula(n: int, s: int) -> tuple:
    if genus_formula(n, s) == INVALID:
        raise ValueError(f"no surface for n={n}, s={s}")
    V = Fraction(2) ** (s - 2) * n
    E = Fraction(2) ** (s - 1) * n
    F = 2**s
    return int(V), int(E), F, int(Fraction(2) ** (s - 2) * (4 - n))


@dataclass(frozen=True)
class TopologyReport:
    V: int
    E: int
    F: int
    chi: int
    genus: object
    connected: bool
    orientable: bool = True

    def to_json(self) -> dict:
        return dict(self.__dict__)


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, a):
        self.parent.setdefault(a, a)
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb

    def classes(self, items) -> int:
        return len({self.find(a) for a in items})


def _flip(eps: tuple, k: int) -> tuple:
    return eps[:k] + (-eps[k],) + eps[k + 1 :]


def quotient_complex(p: ConvexPolygon, j: EdgePartition) -> TopologyReport:
    """Glue ``2^s`` polygon copies and count cells of the quotient."""
    _require_compatible(p, j)
    n, s = p.n, j.s
    copies = list(itertools.product((1, -1), repeat=s))
    edges, verts, faces = _UnionFind(), _UnionFind(), _UnionFind()
    adjacency = {eps: set() for eps in copies}
    for eps in copies:
        for i in range(1, n + 1):
            other = _flip(eps, j.class_of(i))
            edges.union((eps, i), (other, i))
            faces.union(eps, other)
            adjacency[eps].add(other)
            # edge i runs from vertex i to vertex i+1; the gluing is the identity on it
            verts.union((eps, i), (other, i))
            verts.union((eps, i % n + 1), (other, i % n + 1))
    V = verts.classes([(eps, v) for eps in copies for v in range(1, n + 1)])
    E = edges.classes([(eps, i) for eps in copies for i in range(1, n + 1)])
    F = len(copies)
    chi = V - E + F
    connected = faces.classes(copies) == 1
    orientable = _orientation_consistent(copies, adjacency)
    genus = (2 - chi) // 2 if connected and orientable and chi <= 2 and chi % 2 == 0 else INVALID
    return TopologyReport(V, E, F, chi, genus, connected, orientable)


def _orientation_consistent(copies: list, adjacency: dict) -> bool:
    """Copies glued along an edge by the identity must carry opposite orientations."""
    sign = {copies[0]: 1}
    stack = [copies[0]]
    while stack:
        a = stack.pop()
        for b in adjacency[a]:
            if b not in sign:
                sign[b] = -sign[a]
                stack.append(b)
            elif sign[b] == sign[a]:
                return False
    return True


def set_partitions(n: int, s: int):
    """Partitions of ``{1..n}`` into exactly ``s`` classes (restricted growth strings)."""
    def grow(prefix, used):
        if len(prefix) == n:
            if used == s:
                yield EdgePartition([[i + 1 for i, c in enumerate(prefix) if c == k] for k in range(s)])
            return
        if used + (n - len(prefix)) < s:
            return
        for c in range(min(used + 1, s)):
            yield from grow(prefix + [c], max(used, c + 1))
    yield from grow([], 0)


def compatible_partitions(n: int, s: int):
    for part in set_partitions(n, s):
        if compatible_cyclic(n, part):
            yield part


def random_partition(n: int, rng) -> EdgePartition:
    labels = [0]
    for _ in range(1, n):
        labels.append(int(rng.integers(0, max(labels) + 2)))
    s = max(labels) + 1
    return EdgePartition([[i + 1 for i, c in enumerate(labels) if c == k] for k in range(s)])


def standard_partition(n: int, s: int) -> EdgePartition:
    """A compatible partition with ``s`` classes: alternate 0/1 then add fresh classes."""
    if not _valid_pair(n, s):
        raise ValueError(f"no compatible partition for n={n}, s={s}")
    labels = [i % 2 for i in range(n)]
    if n % 2:
        labels[-1] = 2
    fresh = max(labels) + 1
    for i in range(n):
        if fresh >= s:
            break
        if labels.count(labels[i]) > 1:
            labels[i] = fresh
            fresh += 1
    part = EdgePartition([[i + 1 for i, c in enumerate(labels) if c == k] for k in range(s)])
    if not compatible_cyclic(n, part):
        raise AssertionError("standard partition is not compatible")
    return part


def table_grid(n_max: int = 7, s_max: int = 7) -> list:
    if n_max < 3:
        raise ValueError("n_max must be at least 3")
    return [[genus_formula(n, s) for s in range(2, s_max + 1)] for n in range(3, n_max + 1)]


def table(n_max: int = 7, s_max: int = 7) -> str:
    header = ["n\\s"] + [str(s) for s in range(2, s_max + 1)]
    rows = [header]
    for n, row in zip(range(3, n_max + 1), table_grid(n_max, s_max)):
        rows.append([str(n)] + ["--" if v == INVALID else str(v) for v in row])
    width = max(len(c) for r in rows for c in r)
    return "\n".join(" ".join(c.rjust(width) for c in r) for r in rows)
