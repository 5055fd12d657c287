"""Exact rational numbers and sparse multivariate polynomials.

Coefficients are :class:`fractions.Fraction` values.  A polynomial carries its
own ordered variable names; arithmetic between polynomials over different
variable tuples works on the union of the names (left operand's order first).
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial, lcm
from typing import Iterable, Mapping, Sequence

Rat = Fraction


def as_rat(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction.

    Floats are rejected: silently converting a float would smuggle binary
    rounding into exact computations.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def rat_to_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


class MPoly:
    """Immutable sparse polynomial with rational coefficients.

    ``terms`` maps exponent tuples (aligned with ``vars``) to nonzero
    coefficients.
    """

    __slots__ = ("vars", "terms", "_hash")

    def __init__(self, variables: Sequence[str], terms: Mapping[tuple, object] | None = None):
        variables = tuple(variables)
        if len(set(variables)) != len(variables):
            raise ValueError(f"duplicate variable names in {variables}")
        clean = {}
        for exps, c in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != len(variables):
                raise ValueError(f"exponent vector {exps} does not match variables {variables}")
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            c = as_rat(c)
            if c:
                clean[exps] = clean.get(exps, Fraction(0)) + c
                if not clean[exps]:
                    del clean[exps]
        self.vars = variables
        self.terms = clean
        self._hash = None

    # -- constructors -------------------------------------------------------

    @classmethod
    def const(cls, value, variables: Sequence[str] = ()) -> "MPoly":
        variables = tuple(variables)
        return cls(variables, {(0,) * len(variables): as_rat(value)})

    @classmethod
    def var(cls, name: str, variables: Sequence[str] | None = None) -> "MPoly":
        variables = tuple(variables) if variables is not None else (name,)
        if name not in variables:
            raise ValueError(f"{name!r} not among {variables}")
        exps = tuple(1 if v == name else 0 for v in variables)
        return cls(variables, {exps: 1})

    @classmethod
    def from_json(cls, data: Mapping) -> "MPoly":
        variables = tuple(data["vars"])
        terms = {}
        for term in data["terms"]:
            exps = tuple(term["exps"])
            terms[exps] = terms.get(exps, Fraction(0)) + as_rat(term["coeff"])
        return cls(variables, terms)

    def to_json(self) -> dict:
        terms = [
            {"coeff": rat_to_str(c), "exps": list(e)}
            for e, c in sorted(self.terms.items(), key=lambda item: item[0], reverse=True)
        ]
        return {"vars": list(self.vars), "terms": terms}

    # -- variable handling --------------------------------------------------

    def embed(self, variables: Sequence[str]) -> "MPoly":
        """Re-express over a larger variable tuple (all current names must appear)."""
        variables = tuple(variables)
        if variables == self.vars:
            return self
        missing = [v for v in self.vars if v not in variables]
        if missing:
            # dropping a variable is allowed only if it never occurs
            idx = [self.vars.index(v) for v in missing]
            if any(e[i] for e in self.terms for i in idx):
                raise ValueError(f"cannot drop variables {missing} that occur in the polynomial")
        pos = {v: i for i, v in enumerate(self.vars)}
        new_terms = {}
        for e, c in self.terms.items():
            new_terms[tuple(e[pos[v]] if v in pos else 0 for v in variables)] = c
        return MPoly(variables, new_terms)

    def _aligned(self, other: "MPoly") -> tuple["MPoly", "MPoly"]:
        if self.vars == other.vars:
            return self, other
        union = self.vars + tuple(v for v in other.vars if v not in self.vars)
        return self.embed(union), other.embed(union)

    def _coerce(self, other) -> "MPoly":
        if isinstance(other, MPoly):
            return other
        return MPoly.const(other, self.vars)

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        a, b = self._aligned(self._coerce(other))
        terms = dict(a.terms)
        for e, c in b.terms.items():
            terms[e] = terms.get(e, Fraction(0)) + c
        return MPoly(a.vars, terms)

    __radd__ = __add__

    def __neg__(self):
        return MPoly(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        if not isinstance(other, MPoly):
            c = as_rat(other)
            return MPoly(self.vars, {e: c * v for e, v in self.terms.items()})
        a, b = self._aligned(other)
        terms: dict = {}
        for ea, ca in a.terms.items():
            for eb, cb in b.terms.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                terms[e] = terms.get(e, Fraction(0)) + ca * cb
        return MPoly(a.vars, terms)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = MPoly.const(1, self.vars)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if not isinstance(other, MPoly):
            try:
                other = MPoly.const(other, self.vars)
            except TypeError:
                return NotImplemented
        a, b = self._aligned(other)
        return a.terms == b.terms

    def __hash__(self):
        if self._hash is None:
            used = tuple(v for i, v in enumerate(self.vars) if any(e[i] for e in self.terms))
            p = self.embed(used)
            self._hash = hash(frozenset(p.terms.items()) | {used})
        return self._hash

    def __repr__(self):
        return f"MPoly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in sorted(self.terms.items(), reverse=True):
            mono = "*".join(
                v if k == 1 else f"{v}^{k}" for v, k in zip(self.vars, e) if k
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    # -- queries ------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def used_vars(self) -> tuple[str, ...]:
        return tuple(v for i, v in enumerate(self.vars) if any(e[i] for e in self.terms))

    def coefficient(self, exps: Sequence[int]) -> Fraction:
        return self.terms.get(tuple(exps), Fraction(0))

    def univariate_coeffs(self) -> list[Fraction]:
        """Dense coefficient list ``[c0, c1, ...]`` of a one-variable polynomial."""
        if len(self.vars) != 1:
            raise ValueError(f"polynomial is not univariate: variables {self.vars}")
        deg = self.degree()
        coeffs = [Fraction(0)] * (deg + 1)
        for (k,), c in self.terms.items():
            coeffs[k] = c
        return coeffs


def _lookup(point: Mapping[str, object], name: str):
    try:
        return point[name]
    except KeyError:
        raise KeyError(f"no value assigned to variable {name!r}") from None


def eval_poly(p: MPoly, point: Mapping[str, object]):
    """Evaluate ``p`` at ``point`` (a mapping variable -> value).

    Exact when the values are rationals; floats are accepted too and give a
    float result (used only by the numeric samplers).
    """
    values = []
    for v in p.vars:
        val = _lookup(point, v)
        if not isinstance(val, (float, complex)) and not hasattr(val, "_mpf_"):
            val = as_rat(val)
        values.append(val)
    total = Fraction(0)
    for e, c in p.terms.items():
        term = c
        for val, k in zip(values, e):
            if k:
                term = term * val**k
        total = total + term
    return total


def partial(p: MPoly, v: str) -> MPoly:
    if v not in p.vars:
        raise KeyError(f"unknown variable {v!r}; polynomial variables are {p.vars}")
    i = p.vars.index(v)
    terms = {}
    for e, c in p.terms.items():
        if e[i]:
            ne = list(e)
            ne[i] -= 1
            terms[tuple(ne)] = c * e[i]
    return MPoly(p.vars, terms)


def common_vars(polys: Iterable[MPoly]) -> tuple[str, ...]:
    names: list[str] = []
    for p in polys:
        for v in p.vars:
            if v not in names:
                names.append(v)
    return tuple(names)


def jacobian(polys: Sequence[MPoly], variables: Sequence[str] | None = None) -> list[list[MPoly]]:
    variables = tuple(variables) if variables is not None else common_vars(polys)
    return [[partial(p.embed(variables), v) for v in variables] for p in polys]


def rank(matrix: Sequence[Sequence[object]]) -> int:
    """Exact rank of a rational matrix by fraction-free (Bareiss) elimination."""
    rows = []
    for row in matrix:
        row = [as_rat(x) for x in row]
        scale = lcm(*(x.denominator for x in row)) if row else 1
        rows.append([int(x * scale) for x in row])
    if not rows or not rows[0]:
        return 0
    m, n = len(rows), len(rows[0])
    r = 0
    prev = 1
    for col in range(n):
        pivot = next((i for i in range(r, m) if rows[i][col]), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        for i in range(r + 1, m):
            for j in range(col + 1, n):
                rows[i][j] = (rows[r][col] * rows[i][j] - rows[i][col] * rows[r][j]) // prev
            rows[i][col] = 0
        prev = rows[r][col]
        r += 1
        if r == m:
            break
    return r


def jacobian_rank(polys: Sequence[MPoly], point: Mapping[str, object]) -> int:
    """Rank over Q of the Jacobian of ``polys`` evaluated at ``point``."""
    if not polys:
        return 0
    variables = common_vars(polys)
    for v in variables:
        _lookup(point, v)
    jac = jacobian(polys, variables)
    return rank([[eval_poly(d, point) for d in row] for row in jac])


def univariate_taylor(p: MPoly, center, order: int) -> list[Fraction]:
    """Taylor coefficients ``c_0..c_order`` of a univariate ``p`` at ``center``."""
    if len(p.used_vars()) > 1:
        raise ValueError(f"univariate polynomial required, got variables {p.used_vars()}")
    if len(p.vars) != 1:
        name = p.used_vars()[0] if p.used_vars() else "t"
        p = p.embed((name,))
    (name,) = p.vars
    center = as_rat(center)
    coeffs = []
    d = p
    for j in range(order + 1):
        coeffs.append(eval_poly(d, {name: center}) / factorial(j))
        d = partial(d, name)
    return coeffs


def variables(*names: str) -> tuple[MPoly, ...]:
    """Coordinate polynomials sharing the variable tuple ``names``."""
    return tuple(MPoly.var(n, names) for n in names)
