"""Polynomial systems: named variables, equations and inequalities."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .poly import MPoly, eval_poly

RELATIONS = (">=", ">")


@dataclass(frozen=True)
class VarietySystem:
    vars: tuple
    equations: tuple
    inequalities: tuple = ()  # ((MPoly, ">=" | ">"), ...)
    description: str = ""
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "vars", tuple(self.vars))
        object.__setattr__(self, "equations", tuple(p.embed(self.vars) for p in self.equations))
        ineqs = []
        for p, rel in self.inequalities:
            if rel not in RELATIONS:
                raise ValueError(f"unknown relation {rel!r}")
            ineqs.append((p.embed(self.vars), rel))
        object.__setattr__(self, "inequalities", tuple(ineqs))

    def point(self, values: Sequence) -> dict:
        if len(values) != len(self.vars):
            raise ValueError(f"expected {len(self.vars)} coordinates, got {len(values)}")
        return dict(zip(self.vars, values))

    def residuals(self, point: Mapping | Sequence) -> list:
        if not isinstance(point, Mapping):
            point = self.point(point)
        return [eval_poly(p, point) for p in self.equations]

    def satisfies(self, point: Mapping | Sequence, tol: float = 1e-9, inequalities: bool = True) -> bool:
        if not isinstance(point, Mapping):
            point = self.point(point)
        if any(abs(r) > tol for r in self.residuals(point)):
            return False
        if inequalities:
            for p, rel in self.inequalities:
                v = eval_poly(p, point)
                if v < -tol or (rel == ">" and v <= tol):
                    return False
        return True

    def to_json(self) -> dict:
        data = {
            "vars": list(self.vars),
            "equations": [p.to_json() for p in self.equations],
            "inequalities": [{"poly": p.to_json(), "rel": rel} for p, rel in self.inequalities],
            "description": self.description,
        }
        if self.meta:
            data["meta"] = self.meta
        return data

    @classmethod
    def from_json(cls, data: Mapping) -> "VarietySystem":
        return cls(
            tuple(data["vars"]),
            tuple(MPoly.from_json(p) for p in data["equations"]),
            tuple((MPoly.from_json(q["poly"]), q["rel"]) for q in data.get("inequalities", [])),
            data.get("description", ""),
            dict(data.get("meta", {})),
        )
