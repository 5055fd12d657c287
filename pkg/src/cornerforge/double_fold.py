"""Nash doubles of manifolds with corners, and the folding function.

``D(Q) = {t_i^2 = h_i(x)}`` doubles ``Q = {h_1 >= 0, ..., h_l >= 0}``.  The
folding function ``f_{a,k} = s t + (1 - s) sqrt(t)`` with
``s = (1 - (t/a)^{2k})^{2k}`` interpolates between ``t`` near 0 and
``sqrt(t)`` beyond ``a``; it is carried exactly as a pair ``P + Q sqrt(t)``.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import mpmath
import numpy as np

from .poly import MPoly, as_rat, eval_poly, jacobian, jacobian_rank, univariate_taylor
from .system import VarietySystem

T = "t"


@dataclass(frozen=True)
class CornersSpec:
    vars: tuple
    inequalities: tuple

    def __post_init__(self):
        object.__setattr__(self, "vars", tuple(self.vars))
        if not self.inequalities:
            raise ValueError("need at least one inequality")
        object.__setattr__(self, "inequalities", tuple(h.embed(self.vars) for h in self.inequalities))

    @property
    def n(self) -> int:
        return len(self.vars)

    @property
    def ell(self) -> int:
        return len(self.inequalities)

    def t_vars(self) -> tuple:
        names = (T,) if self.ell == 1 else tuple(f"t{i}" for i in range(1, self.ell + 1))
        if set(names) & set(self.vars):
            raise ValueError("t variable names clash with ambient variables")
        return names

    def to_json(self) -> dict:
        return {"vars": list(self.vars), "inequalities": [h.to_json() for h in self.inequalities]}

    @classmethod
    def from_json(cls, data: Mapping) -> "CornersSpec":
        return cls(tuple(data["vars"]), tuple(MPoly.from_json(h) for h in data["inequalities"]))


def emit_double(spec: CornersSpec, copy: str | None = None) -> VarietySystem:
    """Equations ``t_i^2 - h_i``; ``copy="plus"`` adds ``t_i >= 0``."""
    if copy not in (None, "both", "plus"):
        raise ValueError(f"unknown copy {copy!r}")
    ts = spec.t_vars()
    allv = spec.vars + ts
    tpolys = [MPoly.var(name, allv) for name in ts]
    eqs = tuple(t * t - h.embed(allv) for t, h in zip(tpolys, spec.inequalities))
    ineqs = tuple((t, ">=") for t in tpolys) if copy == "plus" else ()
    label = "Nash double" + (" (copy t >= 0)" if copy == "plus" else "")
    return VarietySystem(allv, eqs, ineqs, label)


def section_plus(spec: CornersSpec, x: Sequence) -> tuple:
    pt = dict(zip(spec.vars, x))
    roots = []
    for h in spec.inequalities:
        v = float(eval_poly(h, pt))
        if v < -1e-12:
            raise ValueError("point outside Q")
        roots.append(math.sqrt(max(v, 0.0)))
    return tuple(x) + tuple(roots)


def project(spec: CornersSpec, z: Sequence) -> tuple:
    return tuple(z[: spec.n])


def smoothness_check(spec: CornersSpec, points: Sequence[Sequence], exact: bool = True,
                     tol: float = 1e-9) -> dict:
    """Rank of the Jacobian of the defining equations at each point (must be ``l``)."""
    system = emit_double(spec)
    ranks, witness = [], None
    for z in points:
        if exact:
            pt = {v: as_rat(c) for v, c in zip(system.vars, z)}
            if any(eval_poly(e, pt) != 0 for e in system.equations):
                raise ValueError(f"{list(z)} is not on the double")
            rk = jacobian_rank(list(system.equations), pt)
        else:
            pt = dict(zip(system.vars, (float(c) for c in z)))
            if not system.satisfies(pt, tol):
                raise ValueError(f"{list(z)} is not on the double")
            J = np.array([[float(eval_poly(d, pt)) for d in row]
                          for row in jacobian(list(system.equations), system.vars)])
            rk = int(np.linalg.matrix_rank(J, tol=tol))
        ranks.append(rk)
        if rk != spec.ell and witness is None:
            witness = [str(c) for c in z]
    return {"ranks": ranks, "expected": spec.ell, "witness": witness, "ok": witness is None}


def corners_examples() -> dict:
    x1 = ("x",)
    xy = ("x", "y")
    x, y = MPoly.var("x", xy), MPoly.var("y", xy)
    return {
        "parabola": CornersSpec(x1, (MPoly.var("x", x1),)),
        "square": CornersSpec(xy, (x, 1 - x, y, 1 - y)),
        "half-disc": CornersSpec(xy, (1 - x * x - y * y, y)),
    }


# --- folding function -------------------------------------------------------

@dataclass(frozen=True)
class FoldParams:
    a: Fraction
    k: int

    def __post_init__(self):
        a = as_rat(self.a)
        if not 0 < a <= 1:
            raise ValueError("need 0 < a <= 1")
        if int(self.k) != self.k or self.k < 1:
            raise ValueError("need integer k >= 1")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "k", int(self.k))

    def sigma(self) -> MPoly:
        t = MPoly.var(T, (T,))
        return (1 - (t * (1 / self.a)) ** (2 * self.k)) ** (2 * self.k)

    def sigma_at(self, t: Fraction) -> Fraction:
        return (1 - (t / self.a) ** (2 * self.k)) ** (2 * self.k)


@dataclass(frozen=True)
class SqrtPair:
    """The function ``P(t) + Q(t) sqrt(t)``."""

    P: MPoly
    Q: MPoly

    def __add__(self, other: "SqrtPair") -> "SqrtPair":
        return SqrtPair(self.P + other.P, self.Q + other.Q)

    def __sub__(self, other: "SqrtPair") -> "SqrtPair":
        return SqrtPair(self.P - other.P, self.Q - other.Q)

    def __mul__(self, other: "SqrtPair") -> "SqrtPair":
        t = MPoly.var(T, (T,))
        return SqrtPair(self.P * other.P + t * self.Q * other.Q, self.P * other.Q + self.Q * other.P)

    @classmethod
    def sqrt_t(cls) -> "SqrtPair":
        return cls(MPoly.const(0, (T,)), MPoly.const(1, (T,)))

    def parts_at(self, t) -> tuple:
        return eval_poly(self.P, {T: t}), eval_poly(self.Q, {T: t})

    def __call__(self, t) -> float:
        if isinstance(t, mpmath.mpf):
            p, q = self.parts_at(t)
            return p + q * mpmath.sqrt(t)
        p, q = self.parts_at(Fraction(t))
        return float(p) + float(q) * math.sqrt(t)


@functools.lru_cache(maxsize=64)
def fold_symbolic(p: FoldParams) -> SqrtPair:
    sigma = p.sigma()
    return SqrtPair(sigma * MPoly.var(T, (T,)), 1 - sigma)


def fold_eval(p: FoldParams, t) -> float:
    if not 0 <= t <= 1:
        raise ValueError("t must lie in [0, 1]")
    return fold_symbolic(p)(t)


def _rational_sqrt_below(a: Fraction, scale: int = 10**6) -> Fraction:
    return Fraction(math.isqrt(a.numerator * scale * scale // a.denominator), scale)


def fold_certify(p: FoldParams, grid: int = 1000) -> dict:
    """Four verdicts: Taylor data at 0 and at ``a``, monotonicity, ``f <= sqrt(t)``."""
    k2 = 2 * p.k
    pair = fold_symbolic(p)
    verdicts = {}

    P, Q = pair.P.univariate_coeffs(), pair.Q.univariate_coeffs()
    P_low = (P + [Fraction(0)] * (k2 + 1))[: k2 + 1]
    Q_low = (Q + [Fraction(0)] * k2)[:k2]
    t0 = P_low == [0, 1] + [0] * (k2 - 1) and all(c == 0 for c in Q_low)
    verdicts["T0"] = {"ok": t0, "witness": None if t0 else {"P": [str(c) for c in P_low], "Q": [str(c) for c in Q_low]}}

    derivs = univariate_taylor(p.sigma(), p.a, k2 - 1)
    bad = [j for j, c in enumerate(derivs) if c != 0]
    verdicts["Ta"] = {"ok": not bad, "witness": {"order": bad[0]} if bad else None}

    # exact grid: t = s^2 with rational s, so sqrt(t) = s and f(t) is rational
    r = _rational_sqrt_below(p.a)
    roots = [r * i / (grid - 1) for i in range(grid)]
    sigmas = [p.sigma_at(s * s) for s in roots]
    values = [sig * s * s + (1 - sig) * s for s, sig in zip(roots, sigmas)]
    witness = None
    for i in range(1, grid):
        if not values[i] > values[i - 1]:
            witness = {"index": i, "t": str((r * i / (grid - 1)) ** 2)}
            break
    # last grid value against f(a) = sqrt(a), compared via squares
    if witness is None and r * r < p.a and not (values[-1] < 0 or values[-1] ** 2 < p.a):
        witness = {"index": grid, "t": str(p.a)}
    verdicts["MONO"] = {"ok": witness is None, "witness": witness}

    # base 1 - (t/a)^{2k}: value 1 at 0, 0 at a, derivative with only nonpositive coefficients
    base = 1 - (MPoly.var(T, (T,)) * (1 / p.a)) ** k2
    base_ok = eval_poly(base, {T: 0}) == 1 and eval_poly(base, {T: p.a}) == 0 and all(
        c <= 0 for c in base.univariate_coeffs()[1:])
    le_witness = None
    for s, sig in zip(roots, sigmas):
        if not 0 <= sig <= 1 or sig * (s * s - s) > 0:
            le_witness = {"t": str(s * s)}
            break
    if le_witness is None:
        for t in np.linspace(0.0, 1.0, grid):
            if glue_value(p, float(t)) > math.sqrt(t) + 1e-12:
                le_witness = {"t": float(t)}
                break
    verdicts["LE"] = {"ok": base_ok and le_witness is None, "symbolic": base_ok, "witness": le_witness}
    return {"a": str(p.a), "k": p.k, "verdicts": verdicts, "ok": all(v["ok"] for v in verdicts.values())}


def glue_value(p: FoldParams, s):
    """Last coordinate of the gluing map: ``s``, ``f_{a,k}(s)`` or ``sqrt(s)``."""
    if s < 0:
        return s
    if s <= p.a:
        return fold_symbolic(p)(s)
    return mpmath.sqrt(s) if isinstance(s, mpmath.mpf) else math.sqrt(s)


def glue_eval(p: FoldParams, y: Sequence, s) -> tuple:
    return tuple(y) + (glue_value(p, s),)


def _one_sided_difference(fun, x0, h, order: int, side: int):
    total = mpmath.mpf(0)
    for i in range(order + 1):
        total += (-1) ** (order - i) * mpmath.binomial(order, i) * fun(x0 + side * i * h)
    return total / (side * h) ** order


def glue_junction_fd(p: FoldParams, h=Fraction(1, 1000), max_order: int | None = None, dps: int = 60) -> dict:
    """One-sided finite-difference derivatives of each branch at ``s = 0`` and ``s = a``.

    Runs in high-precision arithmetic so the discrepancies are truncation
    error of the stencils, not floating-point noise.
    """
    max_order = 2 * p.k - 1 if max_order is None else max_order
    pair = fold_symbolic(p)
    with mpmath.workdps(dps):
        hh = mpmath.mpf(h.numerator) / h.denominator if isinstance(h, Fraction) else mpmath.mpf(h)
        a = mpmath.mpf(p.a.numerator) / p.a.denominator
        middle = lambda s: pair(mpmath.mpf(s))
        rows = []
        for j in range(1, max_order + 1):
            at0 = _one_sided_difference(lambda s: s, 0, hh, j, -1) - _one_sided_difference(middle, 0, hh, j, 1)
            at_a = _one_sided_difference(middle, a, hh, j, -1) - _one_sided_difference(mpmath.sqrt, a, hh, j, 1)
            rows.append({"order": j, "at_0": float(abs(at0)), "at_a": float(abs(at_a))})
    return {"h": float(hh), "orders": rows}


def fold_normal_form(d: int, s: int, y: Sequence) -> tuple:
    if not 1 <= s <= d:
        raise ValueError(f"need 1 <= s <= d, got s={s}, d={d}")
    if len(y) != d:
        raise ValueError(f"point has {len(y)} coordinates, expected {d}")
    return tuple(v * v for v in y[:s]) + tuple(y[s:])
