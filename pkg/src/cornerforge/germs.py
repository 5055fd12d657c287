"""Checkerboard germs at the origin as unions of closed orthants.

A germ lives in ``R^d``; a subset of the coordinates (1-based) carries the
normal-crossings divisor ``{prod x_i = 0}`` and the set itself is the union of
the closed orthants listed by sign vectors over those coordinates.
Coordinates outside the divisor are unconstrained.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np


class GermError(ValueError):
    pass


def flip(eps: tuple, i: int) -> tuple:
    return eps[:i] + (-eps[i],) + eps[i + 1 :]


@dataclass(frozen=True)
class OrthantGerm:
    dim: int
    divisor: tuple  # sorted 1-based coordinate indices
    orthants: frozenset  # sign tuples aligned with ``divisor``

    def __init__(self, dim: int, divisor: Iterable[int], orthants: Iterable[Sequence[int]]):
        divisor = tuple(divisor)
        orthants = frozenset(tuple(int(s) for s in eps) for eps in orthants)
        if dim < 1:
            raise GermError("ambient dimension must be positive")
        if len(set(divisor)) != len(divisor) or any(not 1 <= i <= dim for i in divisor):
            raise GermError(f"bad divisor coordinates {divisor} for dimension {dim}")
        if not orthants:
            raise GermError("empty germ")
        for eps in orthants:
            if len(eps) != len(divisor) or any(s not in (-1, 1) for s in eps):
                raise GermError(f"sign vector {eps} does not match divisor {divisor}")
        order = sorted(range(len(divisor)), key=lambda k: divisor[k])
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "divisor", tuple(divisor[k] for k in order))
        object.__setattr__(
            self, "orthants", frozenset(tuple(eps[k] for k in order) for eps in orthants)
        )

    @property
    def r(self) -> int:
        return len(self.divisor)

    def slot(self, i: int) -> int:
        try:
            return self.divisor.index(i)
        except ValueError:
            raise GermError(f"coordinate {i} is not a divisor coordinate of {self.divisor}") from None

    def contains(self, point: Sequence) -> bool:
        """Membership of a point of R^d (0-indexed sequence) in the closed orthant union."""
        coords = [point[i - 1] for i in self.divisor]
        return any(all(s * x >= 0 for s, x in zip(eps, coords)) for eps in self.orthants)

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "divisor": list(self.divisor),
            "orthants": [list(eps) for eps in sorted(self.orthants, reverse=True)],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "OrthantGerm":
        return cls(int(data["dim"]), data["divisor"], data["orthants"])

    @classmethod
    def full(cls, dim: int) -> "OrthantGerm":
        return cls(dim, (), [()])

    def __str__(self):
        signs = ",".join("".join("+" if s > 0 else "-" for s in eps) for eps in sorted(self.orthants, reverse=True))
        return f"Germ(d={self.dim}, divisor={list(self.divisor)}, F={{{signs}}})"


@dataclass(frozen=True)
class StratumDescriptor:
    zero_set: frozenset
    signs: tuple  # sorted ((coordinate, sign), ...)

    def __init__(self, zero_set: Iterable[int], signs: Mapping[int, int] | Iterable[tuple]):
        items = signs.items() if isinstance(signs, Mapping) else signs
        object.__setattr__(self, "zero_set", frozenset(zero_set))
        object.__setattr__(self, "signs", tuple(sorted((int(k), int(v)) for k, v in items)))

    @property
    def sign_map(self) -> dict:
        return dict(self.signs)

    def generic_point(self, dim: int, scale: Fraction = Fraction(1, 2)) -> list:
        pt = [Fraction(0)] * dim
        for i, s in self.signs:
            pt[i - 1] = s * scale
        return pt


def is_active(g: OrthantGerm, i: int) -> bool:
    k = g.slot(i)
    return any(flip(eps, k) not in g.orthants for eps in g.orthants)


def _drop(g: OrthantGerm, i: int) -> OrthantGerm:
    k = g.slot(i)
    divisor = g.divisor[:k] + g.divisor[k + 1 :]
    orthants = {eps[:k] + eps[k + 1 :] for eps in g.orthants}
    return OrthantGerm(g.dim, divisor, orthants)


def normalize(g: OrthantGerm) -> OrthantGerm:
    """Drop divisor coordinates along which the germ is a product."""
    while True:
        inactive = [i for i in g.divisor if not is_active(g, i)]
        if not inactive:
            return g
        g = _drop(g, inactive[0])


def is_normalized(g: OrthantGerm) -> bool:
    return all(is_active(g, i) for i in g.divisor)


def disconnects(g: OrthantGerm, i: int) -> bool:
    """Whether removing ``{x_i = 0}`` disconnects the (normalized) germ.

    Both signs at ``i`` occurring in F is necessary and sufficient: closed
    orthants sharing a sign at ``i`` all contain the half-axis ray in that
    direction, while opposite signs are separated by the hyperplane.
    """
    k = g.slot(i)
    signs = {eps[k] for eps in g.orthants}
    return len(signs) == 2


def disconnecting_coords(g: OrthantGerm) -> tuple:
    g = normalize(g)
    return tuple(i for i in g.divisor if disconnects(g, i))


def e_value(g: OrthantGerm) -> int:
    return len(disconnecting_coords(g))


def is_corner_germ(g: OrthantGerm) -> bool:
    n = normalize(g)
    corner = e_value(n) == 0
    if corner and len(n.orthants) != 1:
        raise AssertionError(f"e = 0 but {len(n.orthants)} orthants remain in {n}")
    return corner


def germ_at_face(g: OrthantGerm, s: StratumDescriptor) -> OrthantGerm:
    """Germ of ``g`` at a generic point of the stratum ``s``."""
    signs = s.sign_map
    if set(signs) | set(s.zero_set) != set(g.divisor) or set(signs) & set(s.zero_set):
        raise GermError(f"stratum {s} does not partition divisor {g.divisor}")
    keep = [g.slot(i) for i in sorted(s.zero_set)]
    fixed = [(g.slot(i), v) for i, v in signs.items()]
    restricted = {
        tuple(eps[k] for k in keep)
        for eps in g.orthants
        if all(eps[k] == v for k, v in fixed)
    }
    if not restricted:
        raise GermError("face disjoint from germ")
    return normalize(OrthantGerm(g.dim, sorted(s.zero_set), restricted))


def enumerate_strata(g: OrthantGerm) -> set:
    """All sign/zero patterns over the divisor whose stratum meets the germ."""
    strata = set()
    r = g.r
    for mask in itertools.product((0, 1), repeat=r):
        zero = [g.divisor[k] for k in range(r) if mask[k]]
        free = [k for k in range(r) if not mask[k]]
        patterns = {tuple(eps[k] for k in free) for eps in g.orthants}
        for pat in patterns:
            strata.add(StratumDescriptor(zero, {g.divisor[k]: v for k, v in zip(free, pat)}))
    return strata


def stratum_in_closure(alpha: StratumDescriptor, beta: StratumDescriptor) -> bool:
    """Whether stratum ``beta`` lies in the closure of stratum ``alpha``."""
    if not alpha.zero_set <= beta.zero_set:
        return False
    bs = beta.sign_map
    return all(bs[i] == v for i, v in alpha.signs if i in bs)


def point_in_stratum_closure(alpha: StratumDescriptor, point: Sequence) -> bool:
    if any(point[i - 1] != 0 for i in alpha.zero_set):
        return False
    return all(v * point[i - 1] >= 0 for i, v in alpha.signs)


def all_germs(d: int, normalized_only: bool = True):
    """Every germ with ``d = r`` (all coordinates in the divisor), optionally normalized."""
    signs = list(itertools.product((1, -1), repeat=d))
    seen = set()
    for mask in range(1, 2 ** len(signs)):
        F = [eps for k, eps in enumerate(signs) if mask >> k & 1]
        g = OrthantGerm(d, range(1, d + 1), F)
        if normalized_only:
            g = normalize(g)
            if g in seen:
                continue
            seen.add(g)
        yield g


def random_germ(d: int, rng) -> OrthantGerm:
    """Random germ with ``d = r``; each orthant kept with probability 1/2 (nonempty)."""
    signs = list(itertools.product((1, -1), repeat=d))
    while True:
        keep = rng.integers(0, 2, size=len(signs))
        F = [eps for eps, k in zip(signs, keep) if k]
        if F:
            return OrthantGerm(d, range(1, d + 1), F)


def grid_connectivity_oracle(g: OrthantGerm, removed: int | None = None, n_per_axis: int = 9) -> int:
    """Count connected components of the sampled germ on a grid of ``[-1, 1]^d``.

    Two axis neighbours are joined when both endpoints and the midpoint of
    their segment lie in the set.  The graph is laid out on a refined grid
    holding nodes (all indices even) and segment midpoints (one index odd);
    a midpoint in the set forces both endpoints into it, so face-connected
    labelling of the refined grid counts exactly the graph components.
    Coordinates are scaled to integers, so membership is decided exactly.
    """
    from scipy import ndimage

    if n_per_axis < 3:
        raise ValueError("n_per_axis must be at least 3")
    if removed is not None:
        g.slot(removed)
    # refined index j sits at -1 + j/(n-1); scaled by (n-1) it is the integer j-(n-1)
    m = 2 * n_per_axis - 1
    signs = np.sign(np.arange(m) - (n_per_axis - 1))
    patterns = list(itertools.product((-1, 0, 1), repeat=g.dim))
    member = np.array([
        not (removed is not None and key[removed - 1] == 0) and g.contains(key) for key in patterns
    ])
    grids = np.meshgrid(*([signs + 1] * g.dim), indexing="ij")
    code = sum(gr * 3 ** (g.dim - 1 - a) for a, gr in enumerate(grids))
    odd = sum(np.meshgrid(*([np.arange(m) % 2] * g.dim), indexing="ij"))
    mask = member[code] & (odd <= 1)
    _, count = ndimage.label(mask)
    return int(count)


def _orthant_table(d: int) -> list:
    return list(itertools.product((1, -1), repeat=d))


def germ_mask(g: OrthantGerm) -> int:
    """Bit mask of ``F`` for a germ whose divisor is every coordinate."""
    if g.divisor != tuple(range(1, g.dim + 1)):
        raise GermError("mask encoding needs divisor = all coordinates")
    table = _orthant_table(g.dim)
    return sum(1 << table.index(eps) for eps in g.orthants)


def germ_from_mask(d: int, mask: int) -> OrthantGerm:
    table = _orthant_table(d)
    return OrthantGerm(d, range(1, d + 1), [eps for k, eps in enumerate(table) if mask >> k & 1])


def canonical_masks(d: int, masks: Sequence[int]) -> np.ndarray:
    """Least mask in the orbit of each germ under coordinate permutations and sign flips.

    Every germ property used here (normalization, e, face germs, grid
    connectivity on a symmetric grid) is invariant under this group.
    """
    table = _orthant_table(d)
    index = {eps: k for k, eps in enumerate(table)}
    bits = (np.asarray(masks, dtype=np.int64)[:, None] >> np.arange(len(table))) & 1
    weights = 1 << np.arange(len(table), dtype=np.int64)
    best = None
    for perm in itertools.permutations(range(d)):
        for flips in itertools.product((1, -1), repeat=d):
            # image orthant of orthant k under (perm, flips)
            image = [index[tuple(flips[j] * eps[perm[j]] for j in range(d))] for eps in table]
            moved = np.zeros_like(bits)
            moved[:, image] = bits
            value = moved @ weights
            best = value if best is None else np.minimum(best, value)
    return best
