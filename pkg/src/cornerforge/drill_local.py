"""Local drilling blow-up of orthant germs.

The local model of the blow-up with center ``{x_{e+1} = ... = x_d = 0}`` is
``(y, rho, w) -> (y, rho * w)`` with ``y in R^e``, ``rho`` real and ``w`` on the
unit sphere ``S^{d-e-1}``.  Two families of tools live here:

* symbolic set descriptors for preimages and strict transforms of divisor
  components and orthants, with exact dimension counting and a sampler;
* chart germs over the sign cells of the exceptional sphere, plus the driver
  that blows up disconnecting coordinates until every germ is a corner germ.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .germs import GermError, OrthantGerm, disconnecting_coords, e_value, normalize

EMPTY = "empty"

_RHO_DIM = {"point": 0, "half": 1, "line": 1}
_RHO_MEET = {
    ("point", "point"): "point", ("point", "half"): "point", ("point", "line"): "point",
    ("half", "half"): "half", ("half", "line"): "half", ("line", "line"): "line",
}


def _meet_constraint(a: str, b: str) -> str:
    if a == b:
        return a
    if a == "free":
        return b
    if b == "free":
        return a
    # any two distinct non-free constraints ({>=0, <=0, =0}) meet in =0
    return "=0"


@dataclass(frozen=True)
class Atom:
    """``R^e x (rho domain) x (S^{d-e-1} cut by sign/zero constraints on w)``."""

    e: int
    d: int
    rho: str
    constraints: tuple = ()  # sorted ((k, "<=0" | ">=0" | "=0"), ...), free coordinates omitted

    def __post_init__(self):
        if not 0 <= self.e < self.d:
            raise ValueError(f"need 0 <= e < d, got e={self.e}, d={self.d}")
        if self.rho not in _RHO_DIM:
            raise ValueError(f"unknown rho domain {self.rho!r}")
        for k, c in self.constraints:
            if not self.e < k <= self.d:
                raise ValueError(f"sphere coordinate w_{k} outside {self.e + 1}..{self.d}")
            if c not in (">=0", "<=0", "=0"):
                raise ValueError(f"unknown constraint {c!r}")

    @classmethod
    def make(cls, e: int, d: int, rho: str, constraints: dict | None = None) -> "Atom":
        items = tuple(sorted((k, c) for k, c in (constraints or {}).items() if c != "free"))
        return cls(e, d, rho, items)

    def constraint(self, k: int) -> str:
        return dict(self.constraints).get(k, "free")

    @property
    def sphere_coords(self) -> range:
        return range(self.e + 1, self.d + 1)

    def surviving(self) -> int:
        """Number of sphere coordinates not forced to vanish."""
        return sum(1 for k in self.sphere_coords if self.constraint(k) != "=0")

    def is_empty(self) -> bool:
        return self.surviving() == 0

    def dimension(self):
        if self.is_empty():
            return EMPTY
        return self.e + _RHO_DIM[self.rho] + self.surviving() - 1

    def intersect(self, other: "Atom") -> "Atom":
        if (self.e, self.d) != (other.e, other.d):
            raise ValueError("atoms live in different blow-up charts")
        cons = {k: _meet_constraint(self.constraint(k), other.constraint(k)) for k in self.sphere_coords}
        return Atom.make(self.e, self.d, _RHO_MEET[tuple(sorted((self.rho, other.rho)))], cons)

    def contains(self, point: Sequence[float], tol: float = 1e-9) -> bool:
        y, rho, w = point[: self.e], point[self.e], point[self.e + 1 :]
        if abs(sum(x * x for x in w) - 1) > tol:
            return False
        if self.rho == "point" and abs(rho) > tol:
            return False
        if self.rho == "half" and rho < -tol:
            return False
        for k, c in self.constraints:
            x = w[k - self.e - 1]
            if (c == "=0" and abs(x) > tol) or (c == ">=0" and x < -tol) or (c == "<=0" and x > tol):
                return False
        return True

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """``n`` random points as rows ``(y, rho, w)``; empty array if the atom is empty."""
        width = self.d + 1
        if self.is_empty():
            return np.zeros((0, width))
        y = rng.uniform(-1, 1, size=(n, self.e))
        if self.rho == "point":
            rho = np.zeros((n, 1))
        elif self.rho == "half":
            rho = rng.uniform(0, 1, size=(n, 1))
        else:
            rho = rng.uniform(-1, 1, size=(n, 1))
        w = rng.normal(size=(n, self.d - self.e))
        for k, c in self.constraints:
            col = k - self.e - 1
            if c == "=0":
                w[:, col] = 0.0
            elif c == ">=0":
                w[:, col] = np.abs(w[:, col])
            else:
                w[:, col] = -np.abs(w[:, col])
        w /= np.linalg.norm(w, axis=1, keepdims=True)
        return np.hstack([y, rho, w])

    def __str__(self):
        base = f"R^{self.e}" if self.e else "{pt}"
        rho = {"point": "{0}", "half": "[0,inf)", "line": "R"}[self.rho]
        sphere = f"S^{self.d - self.e - 1}"
        if self.constraints:
            sphere += " & {" + ", ".join(f"w{k}{c}" for k, c in self.constraints) + "}"
        return f"{base} x {rho} x ({sphere})"


@dataclass(frozen=True)
class SetDescriptor:
    """Finite union of atoms over a common ``(e, d)``."""

    atoms: tuple

    def __post_init__(self):
        if not self.atoms:
            raise ValueError("a descriptor needs at least one atom")
        if len({(a.e, a.d) for a in self.atoms}) != 1:
            raise ValueError("atoms of a descriptor must share e and d")

    @property
    def e(self) -> int:
        return self.atoms[0].e

    @property
    def d(self) -> int:
        return self.atoms[0].d

    def nonempty_atoms(self) -> list:
        return [a for a in self.atoms if not a.is_empty()]

    def is_empty(self) -> bool:
        return not self.nonempty_atoms()

    def dimension(self):
        dims = [a.dimension() for a in self.nonempty_atoms()]
        return max(dims) if dims else EMPTY

    def intersect(self, other: "SetDescriptor") -> "SetDescriptor":
        return SetDescriptor(tuple(a.intersect(b) for a in self.atoms for b in other.atoms))

    def contains(self, point, tol: float = 1e-9) -> bool:
        return any(a.contains(point, tol) for a in self.atoms)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        atoms = self.nonempty_atoms()
        if not atoms:
            return np.zeros((0, self.d + 1))
        which = rng.integers(0, len(atoms), size=n)
        parts = [atoms[i].sample(rng, int((which == i).sum())) for i in range(len(atoms))]
        return np.vstack(parts)

    def __str__(self):
        return " U ".join(f"({a})" for a in self.atoms)


def divisor_preimage(k: int, e: int, d: int) -> SetDescriptor:
    """Preimage of ``{x_k = 0}`` under the one-sided local blow-up map.

    The atom ``R^e x [0,inf) x (S & {w_k = 0})`` is dropped when empty, which
    happens exactly when the sphere is ``S^0``.
    """
    if not 0 <= e < k <= d:
        raise ValueError(f"need 0 <= e < k <= d, got k={k}, e={e}, d={d}")
    atoms = [Atom.make(e, d, "point"), Atom.make(e, d, "half", {k: "=0"})]
    return SetDescriptor(tuple(a for a in atoms if not a.is_empty()))


def strict_transform_orthant(eps: Sequence[int], e: int = 0) -> SetDescriptor:
    """Closure of the preimage of the open orthant ``{eps_k x_k > 0}``."""
    d = e + len(eps)
    if not eps:
        raise ValueError("sign vector must be nonempty")
    cons = {}
    for k, s in zip(range(e + 1, d + 1), eps):
        if s not in (1, -1):
            raise ValueError(f"signs must be +1/-1, got {s}")
        cons[k] = ">=0" if s > 0 else "<=0"
    return SetDescriptor((Atom.make(e, d, "half", cons),))


def transforms_intersection_dim(eps: Sequence[int], eps2: Sequence[int], e: int = 0):
    """Dimension of the intersection of two orthant strict transforms, or ``"empty"``."""
    if len(eps) != len(eps2):
        raise ValueError(f"sign vectors of different lengths: {len(eps)} vs {len(eps2)}")
    return strict_transform_orthant(eps, e).intersect(strict_transform_orthant(eps2, e)).dimension()


def sampled_min_distance(a: SetDescriptor, b: SetDescriptor, rng: np.random.Generator, n: int = 10_000) -> float:
    """Smallest distance between ``n`` samples of ``a`` and ``n`` samples of ``b``."""
    from scipy.spatial import cKDTree

    pa, pb = a.sample(rng, n), b.sample(rng, n)
    if not len(pa) or not len(pb):
        return math.inf
    dist, _ = cKDTree(pb).query(pa, k=1)
    return float(dist.min())


# -- chart germs ---------------------------------------------------------------


def cell_to_str(cell: Sequence[int]) -> str:
    return "".join({1: "+", 0: "0", -1: "-"}[s] for s in cell)


def cell_from_str(text: str) -> tuple:
    try:
        return tuple({"+": 1, "0": 0, "-": -1}[c] for c in text)
    except KeyError:
        raise ValueError(f"bad sphere cell {text!r}") from None


def sphere_cells(ell: int) -> list:
    return [c for c in itertools.product((1, 0, -1), repeat=ell) if any(c)]


def _check_center(g: OrthantGerm, center: Sequence[int]) -> tuple:
    center = tuple(sorted(center))
    if len(center) < 2:
        raise GermError("center must have codimension >= 2 in divisor")
    for i in center:
        g.slot(i)
    return center


def _pivot(cell: Sequence[int], pivot: str) -> int:
    idx = [j for j, s in enumerate(cell) if s]
    if not idx:
        raise ValueError("sphere cell must be nonzero")
    return idx[0] if pivot == "first" else idx[-1]


def chart_layout(g: OrthantGerm, center: Sequence[int], cell: Sequence[int]) -> list:
    """Names of the chart coordinates, position ``k`` naming coordinate ``k + 1``.

    Order: ``rho``; the ``w_j`` with ``cell_j = 0``; the remaining ``w_j``
    except one pivot (not divisor coordinates); the untouched ``x_i``.
    The divisor positions do not depend on which nonzero entry is the pivot.
    """
    zero_w = [f"w{center[j]}" for j, s in enumerate(cell) if s == 0]
    other_w = [f"w{center[j]}" for j, s in enumerate(cell) if s != 0][1:]
    rest = [f"x{i}" for i in range(1, g.dim + 1) if i not in center]
    return ["rho"] + zero_w + other_w + rest


def _chart_divisor(g: OrthantGerm, center: tuple, cell: Sequence[int]) -> tuple:
    names = chart_layout(g, center, cell)
    div_names = ["rho"] + [f"w{center[j]}" for j, s in enumerate(cell) if s == 0]
    div_names += [f"x{i}" for i in g.divisor if i not in center]
    return tuple(names.index(n) + 1 for n in div_names)


SHEETS = ("plus", "both")


def blowup_charts(g: OrthantGerm, center: Sequence[int], pivot: str = "first",
                  sheet: str = "plus") -> dict:
    """Normalized chart germs of the strict transform over each sphere cell.

    A chart orthant ``(delta, eta, rest)`` is the image of the orthant ``eps``
    of ``g`` with ``delta = eps[pivot] * cell[pivot]``; ``eps`` must agree
    with ``delta * cell`` on the nonzero cell entries.

    ``sheet="plus"`` is the drilling blow-up itself (``rho >= 0``), the
    setting in which blowing up the disconnecting coordinates lowers e.
    ``sheet="both"`` keeps the ``rho < 0`` half as well, i.e. the germ of the
    strict transform inside the twisted double; there e need not drop (the
    plane minus an open quadrant reproduces itself over the cell ``+0``).

    Cells whose chart germ is empty are omitted.
    """
    if sheet not in SHEETS:
        raise ValueError(f"sheet must be one of {SHEETS}")
    center = _check_center(g, center)
    cslots = [g.slot(i) for i in center]
    rest_slots = [g.slot(i) for i in g.divisor if i not in center]
    charts = {}
    for cell in sphere_cells(len(center)):
        p = _pivot(cell, pivot)
        F = set()
        for eps in g.orthants:
            delta = eps[cslots[p]] * cell[p]
            if sheet == "plus" and delta < 0:
                continue
            if any(s and eps[cslots[j]] != delta * s for j, s in enumerate(cell)):
                continue
            F.add(
                (delta,)
                + tuple(eps[cslots[j]] * delta for j, s in enumerate(cell) if s == 0)
                + tuple(eps[k] for k in rest_slots)
            )
        if F:
            charts[cell] = normalize(OrthantGerm(g.dim, _chart_divisor(g, center, cell), F))
    return charts


def chart_numeric_oracle(g: OrthantGerm, center: Sequence[int], cell: Sequence[int],
                         samples: int = 8, rng: np.random.Generator | None = None,
                         sheet: str = "plus"):
    """Rebuild the chart germ over ``cell`` by pushing sample points through ``(y, rho*w)``.

    Every candidate chart orthant is probed with ``samples`` random points
    close to the cell representative; it belongs to the chart germ iff all its
    images land in ``g``.  Returns the normalized germ, or ``None`` when no
    orthant survives.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    center = _check_center(g, center)
    cell = tuple(cell)
    names = chart_layout(g, center, cell)
    divisor = _chart_divisor(g, center, cell)
    nonzero = [j for j, s in enumerate(cell) if s]
    rep = 1 / math.sqrt(len(nonzero))
    F = set()
    for signs in itertools.product((1, -1), repeat=len(divisor)):
        if sheet == "plus" and signs[0] < 0:
            continue  # rho < 0 is not part of the drilling blow-up
        fixed = {divisor[k]: s for k, s in enumerate(signs)}
        verdicts = set()
        for _ in range(samples):
            chart_pt = {}
            for pos, name in enumerate(names, start=1):
                mag = rng.uniform(1e-3, 1e-1)
                chart_pt[name] = fixed.get(pos, rng.choice((1, -1))) * mag
            w = np.zeros(len(center))
            for j, s in enumerate(cell):
                name = f"w{center[j]}"
                if s == 0:
                    w[j] = chart_pt[name]
                else:
                    # nonzero entries stay near the representative; the pivot has no chart coordinate
                    w[j] = s * rep + 1e-2 * chart_pt.get(name, 0.0)
            w /= np.linalg.norm(w)
            x = [0.0] * g.dim
            for j, i in enumerate(center):
                x[i - 1] = chart_pt["rho"] * w[j]
            for i in range(1, g.dim + 1):
                if i not in center:
                    x[i - 1] = chart_pt[f"x{i}"]
            verdicts.add(g.contains(x))
        if len(verdicts) != 1:
            raise AssertionError(f"chart orthant {signs} over cell {cell_to_str(cell)} straddles the germ")
        if verdicts.pop():
            F.add(signs)
    if not F:
        return None
    return normalize(OrthantGerm(g.dim, divisor, F))


# -- desingularization driver ---------------------------------------------------


@dataclass
class BlowupNode:
    germ: OrthantGerm
    center: tuple | None = None
    children: dict = field(default_factory=dict)

    @property
    def is_leaf(self) -> bool:
        return self.center is None

    def depth(self) -> int:
        return 1 + max((c.depth() for c in self.children.values()), default=-1)

    def leaves(self) -> list:
        if self.is_leaf:
            return [self.germ]
        return [leaf for c in self.children.values() for leaf in c.leaves()]

    def to_json(self) -> dict:
        return {
            "germ": self.germ.to_json(),
            "e": e_value(self.germ),
            "center": list(self.center) if self.center is not None else None,
            "children": {cell_to_str(c): n.to_json() for c, n in sorted(self.children.items(), reverse=True)},
        }

    @classmethod
    def from_json(cls, data) -> "BlowupNode":
        return cls(
            OrthantGerm.from_json(data["germ"]),
            tuple(data["center"]) if data.get("center") is not None else None,
            {cell_from_str(k): cls.from_json(v) for k, v in data.get("children", {}).items()},
        )


class DepthExceeded(RuntimeError):
    pass


def desingularize(g: OrthantGerm, max_depth: int = 8, sheet: str = "plus") -> BlowupNode:
    """Blow up all disconnecting coordinates at once, recursively, until e = 0 everywhere.

    With ``sheet="both"`` the recursion need not terminate; ``max_depth``
    then acts as the safety valve.
    """
    if max_depth < 1:
        raise ValueError("max_depth must be positive")

    def build(germ: OrthantGerm, depth: int) -> BlowupNode:
        germ = normalize(germ)
        center = disconnecting_coords(germ)
        if not center:
            return BlowupNode(germ)
        if depth >= max_depth:
            raise DepthExceeded(f"depth {depth} reached with e = {len(center)} at {germ}")
        children = {cell: build(chart, depth + 1) for cell, chart in blowup_charts(germ, center, sheet=sheet).items()}
        return BlowupNode(germ, center, children)

    return build(g, 0)


def flip_antipodal(g: OrthantGerm, center: Sequence[int], cell: Sequence[int]) -> OrthantGerm:
    """Relabel a chart germ through the involution ``(rho, w) -> (-rho, -w)``.

    Input and output are chart germs over ``cell`` and ``-cell`` respectively;
    ``rho`` and the zero-cell ``w_j`` change sign, the untouched coordinates
    do not.  The germ is expected un-normalized or normalized alike: only
    divisor coordinates in the flipped positions are affected.
    """
    names = chart_layout(OrthantGerm.full(g.dim), tuple(center), cell)
    flipped = {names.index("rho") + 1} | {
        names.index(f"w{center[j]}") + 1 for j, s in enumerate(cell) if s == 0
    }
    F = {tuple(-s if i in flipped else s for i, s in zip(g.divisor, eps)) for eps in g.orthants}
    return OrthantGerm(g.dim, g.divisor, F)
