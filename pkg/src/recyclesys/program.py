"""Named linear programs and their line-oriented text format.

Text grammar, one item per line (``#`` starts a comment line)::

    var <name> <lower> <upper> <cost>
    con <name> <relation> <rhs> [<coefficient> <variable>]...

``relation`` is one of ``<=``, ``=``, ``>=``; bounds may be ``inf``/``-inf``.
The objective is always minimized. Names must not contain whitespace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, Mapping

from .errors import DomainError, UnknownNameError

LE, EQ, GE = "<=", "=", ">="
RELATIONS = (LE, EQ, GE)


@dataclass(frozen=True)
class Variable:
    name: str
    lower: float = 0.0
    upper: float = math.inf
    cost: float = 0.0


@dataclass(frozen=True, eq=False)
class Constraint:
    name: str
    coefficients: Mapping[str, float]
    relation: str
    rhs: float

    def __eq__(self, other):
        if not isinstance(other, Constraint):
            return NotImplemented
        return (self.name, dict(self.coefficients), self.relation, self.rhs) == (
            other.name,
            dict(other.coefficients),
            other.relation,
            other.rhs,
        )


class LinearProgram:
    """Minimize ``sum(cost * x)`` subject to named rows and variable bounds."""

    def __init__(self, variables: Iterable[Variable] = (), constraints: Iterable[Constraint] = ()):
        self.variables: list[Variable] = []
        self.constraints: list[Constraint] = []
        self._vindex: dict[str, int] = {}
        self._cindex: dict[str, int] = {}
        for v in variables:
            self._add_var(v)
        for c in constraints:
            self._add_con(c)

    def __repr__(self):
        return f"LinearProgram({len(self.variables)} variables, {len(self.constraints)} constraints)"

    def _add_var(self, v: Variable):
        if v.name in self._vindex:
            raise DomainError(f"duplicate variable {v.name!r}")
        if not v.lower <= v.upper:
            raise DomainError(f"variable {v.name!r}: lower bound exceeds upper bound")
        if not math.isfinite(v.cost):
            raise DomainError(f"variable {v.name!r}: objective coefficient not finite")
        self._vindex[v.name] = len(self.variables)
        self.variables.append(v)

    def _add_con(self, c: Constraint):
        if c.name in self._cindex:
            raise DomainError(f"duplicate constraint {c.name!r}")
        if c.relation not in RELATIONS:
            raise DomainError(f"constraint {c.name!r}: unknown relation {c.relation!r}")
        for name in c.coefficients:
            if name not in self._vindex:
                raise UnknownNameError(f"constraint {c.name!r} references unknown variable {name!r}")
        self._cindex[c.name] = len(self.constraints)
        self.constraints.append(c)

    def add_variable(self, name: str, lower: float = 0.0, upper: float = math.inf, cost: float = 0.0) -> Variable:
        v = Variable(name, float(lower), float(upper), float(cost))
        self._add_var(v)
        return v

    def add_constraint(self, name: str, coefficients: Mapping[str, float], relation: str, rhs: float) -> Constraint:
        c = Constraint(name, {k: float(v) for k, v in coefficients.items() if v != 0}, relation, float(rhs))
        self._add_con(c)
        return c

    def has_variable(self, name: str) -> bool:
        return name in self._vindex

    def has_constraint(self, name: str) -> bool:
        return name in self._cindex

    def variable(self, name: str) -> Variable:
        try:
            return self.variables[self._vindex[name]]
        except KeyError:
            raise UnknownNameError(f"unknown variable {name!r}") from None

    def constraint(self, name: str) -> Constraint:
        try:
            return self.constraints[self._cindex[name]]
        except KeyError:
            raise UnknownNameError(f"unknown constraint {name!r}") from None

    def update_variable(self, name: str, **changes) -> Variable:
        v = replace(self.variable(name), **changes)
        if not v.lower <= v.upper:
            raise DomainError(f"variable {name!r}: lower bound exceeds upper bound")
        self.variables[self._vindex[name]] = v
        return v

    def update_constraint(self, name: str, **changes) -> Constraint:
        c = replace(self.constraint(name), **changes)
        for var in c.coefficients:
            if var not in self._vindex:
                raise UnknownNameError(f"constraint {name!r} references unknown variable {var!r}")
        self.constraints[self._cindex[name]] = c
        return c

    def copy(self) -> "LinearProgram":
        out = LinearProgram()
        out.variables = list(self.variables)
        out.constraints = list(self.constraints)
        out._vindex = dict(self._vindex)
        out._cindex = dict(self._cindex)
        return out

    def objective_value(self, values: Mapping[str, float]) -> float:
        return sum(v.cost * values.get(v.name, 0.0) for v in self.variables)

    def residual(self, name: str, values: Mapping[str, float]) -> float:
        """Row activity minus right-hand side."""
        c = self.constraint(name)
        return sum(a * values.get(k, 0.0) for k, a in c.coefficients.items()) - c.rhs

    def to_text(self) -> str:
        lines = [f"# {len(self.variables)} variables, {len(self.constraints)} constraints"]
        for v in self.variables:
            lines.append(f"var {v.name} {v.lower!r} {v.upper!r} {v.cost!r}")
        for c in self.constraints:
            terms = " ".join(f"{a!r} {k}" for k, a in c.coefficients.items())
            lines.append(f"con {c.name} {c.relation} {c.rhs!r} {terms}".rstrip())
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "LinearProgram":
        lp = cls()
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            try:
                if parts[0] == "var":
                    _, name, lo, hi, cost = parts
                    lp.add_variable(name, float(lo), float(hi), float(cost))
                elif parts[0] == "con":
                    name, rel, rhs, terms = parts[1], parts[2], float(parts[3]), parts[4:]
                    if len(terms) % 2:
                        raise ValueError("unpaired coefficient")
                    coefs = {terms[i + 1]: float(terms[i]) for i in range(0, len(terms), 2)}
                    lp.add_constraint(name, coefs, rel, rhs)
                else:
                    raise ValueError(f"unknown record {parts[0]!r}")
            except (ValueError, IndexError) as exc:
                raise DomainError(f"line {lineno}: {exc}") from None
        return lp
