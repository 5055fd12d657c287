"""Equations of the twisted double of a drilling blow-up, and sample checks.

For an affine variety ``X`` and a center ``Y`` generated by ``f_1..f_r`` the
twisted double sits in ``X x S^{r-1}`` and is cut out (up to components over
``Y``) by the 2x2 minors of the matrix with rows ``u`` and ``f(x)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .poly import MPoly, eval_poly, jacobian
from .system import VarietySystem

CENTER_NOTE = (
    "algebraic superset: components contained in Y x S^(r-1) must be discarded "
    "(the double is the closure of the part lying over X minus Y)"
)


@dataclass(frozen=True)
class CenterData:
    vars: tuple
    ambient_equations: tuple
    generators: tuple

    def __post_init__(self):
        object.__setattr__(self, "vars", tuple(self.vars))
        if not self.generators:
            raise ValueError("center needs at least one generator (r >= 1)")
        object.__setattr__(self, "ambient_equations", tuple(p.embed(self.vars) for p in self.ambient_equations))
        object.__setattr__(self, "generators", tuple(p.embed(self.vars) for p in self.generators))

    @property
    def r(self) -> int:
        return len(self.generators)

    def sphere_vars(self, prefix: str = "u") -> tuple:
        names = (prefix,) if self.r == 1 else tuple(f"{prefix}{i}" for i in range(1, self.r + 1))
        clash = set(names) & set(self.vars)
        if clash:
            raise ValueError(f"sphere variable names {sorted(clash)} clash with ambient variables")
        return names

    def f_values(self, x: Sequence[float]) -> np.ndarray:
        pt = dict(zip(self.vars, x))
        return np.array([float(eval_poly(f, pt)) for f in self.generators])

    def to_json(self) -> dict:
        return {
            "vars": list(self.vars),
            "equations": [p.to_json() for p in self.ambient_equations],
            "generators": [p.to_json() for p in self.generators],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "CenterData":
        return cls(
            tuple(data["vars"]),
            tuple(MPoly.from_json(p) for p in data.get("equations", [])),
            tuple(MPoly.from_json(p) for p in data["generators"]),
        )


def _sign(eps) -> int | None:
    if eps in ("both", None):
        return None
    if eps in (1, "+", "+1", "plus"):
        return 1
    if eps in (-1, "-", "-1", "minus"):
        return -1
    raise ValueError(f"epsilon must be +1, -1 or 'both', got {eps!r}")


def emit_twisted_double(c: CenterData, eps="both", prefix: str = "u") -> VarietySystem:
    sign = _sign(eps)
    us = c.sphere_vars(prefix)
    allv = c.vars + us
    u = [MPoly.var(n, allv) for n in us]
    f = [g.embed(allv) for g in c.generators]
    eqs = [p.embed(allv) for p in c.ambient_equations]
    eqs += [u[i] * f[j] - u[j] * f[i] for i in range(c.r) for j in range(i + 1, c.r)]
    eqs.append(sum((ui * ui for ui in u), MPoly.const(0, allv)) - 1)
    ineqs = ()
    if sign is not None:
        pairing = sum((ui * fi for ui, fi in zip(u, f)), MPoly.const(0, allv))
        ineqs = ((pairing * sign, ">="),)
    label = "twisted double" if sign is None else f"one-sided blow-up (epsilon={sign:+d})"
    meta = {"epsilon": "both" if sign is None else sign, "center": c.to_json()}
    return VarietySystem(allv, tuple(eqs), ineqs, f"{label}; {CENTER_NOTE}", meta)


def lift_point(c: CenterData, x: Sequence[float], eps=1) -> tuple:
    """``(x, eps * f(x)/|f(x)|)`` for a point ``x`` of ``X`` off the center."""
    sign = _sign(eps)
    if sign is None:
        raise ValueError("lift_point needs a sign, not 'both'")
    fx = c.f_values(x)
    norm = float(np.linalg.norm(fx))
    if norm <= 1e-9:
        raise ValueError("center-adjacent point")
    return tuple(x) + tuple(float(v) for v in sign * fx / norm)


def project(point: Sequence, c: CenterData) -> tuple:
    return tuple(point[: len(c.vars)])


def projective_class(u: Sequence[float], tol: float = 1e-12) -> tuple:
    """Representative of ``[u]`` with first nonzero coordinate made positive."""
    for val in u:
        if abs(val) > tol:
            s = 1.0 if val > 0 else -1.0
            return tuple(s * v for v in u)
    raise ValueError("zero vector has no projective class")


def _numeric_jacobian(polys: Sequence[MPoly], names: Sequence[str], x: Sequence[float]) -> np.ndarray:
    if not polys:
        return np.zeros((0, len(names)))
    pt = dict(zip(names, x))
    rows = jacobian(list(polys), names)
    return np.array([[float(eval_poly(d, pt)) for d in row] for row in rows])


def project_to_variety(c: CenterData, x: Sequence[float], iters: int = 50, tol: float = 1e-13) -> np.ndarray:
    """Newton (minimum-norm step) projection of ``x`` onto the ambient equations."""
    x = np.array(x, dtype=float)
    if not c.ambient_equations:
        return x
    for _ in range(iters):
        pt = dict(zip(c.vars, x))
        g = np.array([float(eval_poly(p, pt)) for p in c.ambient_equations])
        if np.max(np.abs(g)) < tol:
            break
        J = _numeric_jacobian(c.ambient_equations, c.vars, x)
        x = x - np.linalg.lstsq(J, g, rcond=None)[0]
    return x


def sample_off_center(c: CenterData, rng: np.random.Generator, n: int, anchor: Sequence[float] | None = None) -> list:
    """``n`` points of ``X`` from the unit box around ``anchor``, at distance > 1e-9 from ``Y``."""
    anchor = np.zeros(len(c.vars)) if anchor is None else np.asarray(anchor, dtype=float)
    pts = []
    while len(pts) < n:
        x = project_to_variety(c, anchor + rng.uniform(-1, 1, size=len(c.vars)))
        if np.linalg.norm(c.f_values(x)) > 1e-9:
            pts.append(x)
    return pts


def verify_fiber(c: CenterData, q: Sequence[float], samples: int = 32,
                 rng: np.random.Generator | None = None, tol: float = 1e-9) -> dict:
    """Sample the fiber of the twisted double over a point ``q`` of the center.

    The fiber is the unit sphere of ``df_q(T_q X)``.  Its points come from
    normalized images of random tangent vectors; each is checked against the
    emitted equations and against the limit of lifts along ``q + t v``.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    q = np.asarray(q, dtype=float)
    fq = c.f_values(q)
    if np.max(np.abs(fq)) > tol:
        raise ValueError(f"q is not on the center: |f(q)| = {np.max(np.abs(fq)):.3g}")
    report = {"q": q.tolist(), "errors": []}
    G = _numeric_jacobian(c.ambient_equations, c.vars, q)
    if G.shape[0]:
        _, sv, vt = np.linalg.svd(G)
        rk = int((sv > 1e-10 * max(1.0, sv.max(initial=0.0))).sum())
        tangent = vt[rk:].T
    else:
        tangent = np.eye(len(c.vars))
    A = _numeric_jacobian(c.generators, c.vars, q) @ tangent
    sv = np.linalg.svd(A, compute_uv=False)
    k = int((sv > 1e-10 * max(1.0, sv.max(initial=0.0))).sum())
    report["dimension"] = k - 1
    report["count"] = 2 if k == 1 else (None if k > 1 else 0)
    system = emit_twisted_double(c, "both")
    points, eq_ok, lim_ok = [], True, True
    for _ in range(samples):
        coeffs = rng.normal(size=tangent.shape[1])
        v, w = tangent @ coeffs, A @ coeffs
        if k == 0 or np.linalg.norm(w) < 1e-12:
            report["errors"].append("degenerate tangent sample")
            continue
        u = w / np.linalg.norm(w)
        for s in (1, -1):
            pt = tuple(q) + tuple(s * u)
            points.append(pt)
            if not system.satisfies(pt, tol):
                eq_ok = False
            try:
                t = 1e-6
                xt = project_to_variety(c, q + t * v)
                lifted = np.array(lift_point(c, xt, s)[len(c.vars):])
                if np.linalg.norm(lifted - s * u) > 1e-4:
                    lim_ok = False
            except ValueError as exc:
                report["errors"].append(str(exc))
    distinct = {tuple(np.round(p[len(c.vars):], 9)) for p in points}
    report["observed_distinct"] = len(distinct)
    report["points"] = [list(p) for p in points[:8]]
    report["equations_ok"] = eq_ok
    report["limits_ok"] = lim_ok
    ok = eq_ok and lim_ok and k >= 1
    if c.r == 1 or k == 1:
        ok = ok and report["count"] == 2 and len(distinct) == 2
    report["ok"] = ok
    return report


def theta_check(c: CenterData, samples: int = 100, rng: np.random.Generator | None = None,
                anchor: Sequence[float] | None = None, tol: float = 1e-9) -> dict:
    """Check that ``(x, u) -> (x, [u])`` is two-to-one on sampled points of the double."""
    rng = rng if rng is not None else np.random.default_rng(0)
    both = emit_twisted_double(c, "both")
    plus, minus = emit_twisted_double(c, 1), emit_twisted_double(c, -1)
    n = len(c.vars)
    cardinalities, failures = [], []
    for x in sample_off_center(c, rng, samples, anchor):
        for s in (1, -1):
            p = lift_point(c, x, s)
            x_part, u = p[:n], np.array(p[n:])
            q = tuple(x_part) + tuple(-u)
            fiber = {tuple(np.round(u, 12)), tuple(np.round(-u, 12))}
            checks = {
                "on_double": both.satisfies(p, tol) and both.satisfies(q, tol),
                "same_class": np.allclose(projective_class(u), projective_class(-u), atol=tol),
                "involution": plus.satisfies(p, tol) == minus.satisfies(q, tol),
            }
            cardinalities.append(len(fiber))
            if not all(checks.values()) or len(fiber) != 2:
                failures.append({"point": list(p), **checks, "fiber": len(fiber)})
    return {
        "samples": len(cardinalities),
        "cardinalities": sorted(set(cardinalities)),
        "failures": failures[:5],
        "ok": not failures and set(cardinalities) == {2},
    }


def plane_line_center() -> CenterData:
    """``X = R^2`` with center the line ``{x = 0}``."""
    x = MPoly.var("x", ("x", "y"))
    return CenterData(("x", "y"), (), (x,))


def plane_origin_center() -> CenterData:
    """``X = R^2`` with center the origin."""
    x, y = MPoly.var("x", ("x", "y")), MPoly.var("y", ("x", "y"))
    return CenterData(("x", "y"), (), (x, y))


def sphere_equator_center() -> CenterData:
    names = ("x", "y", "z")
    x, y, z = (MPoly.var(n, names) for n in names)
    return CenterData(names, (x * x + y * y + z * z - 1,), (z,))


EXAMPLE_CENTERS = {
    "plane-line": plane_line_center,
    "plane-origin": plane_origin_center,
    "sphere-equator": sphere_equator_center,
}
