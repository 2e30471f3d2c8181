"""Linear systems ``A a = b (mod 1)`` with integer ``A`` and unknowns in the torus.

Solvability is decided exactly through the Smith form ``U A V = D``: after the
unimodular change ``a = V a'`` the system decouples into ``d_i a'_i = (U b)_i``,
which is solvable in T whenever ``d_i != 0`` and otherwise needs ``(U b)_i`` to
be an integer. A failing row of ``U`` is an integer functional ``lam`` with
``lam A = 0`` and ``lam . b`` not an integer: the infeasibility certificate.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction

from . import smith
from .torus import format_fraction, frac_mod1


@dataclass(frozen=True)
class InfeasibilityCertificate:
    """Integer functional ``lam`` with ``lam A == 0`` and ``lam . b`` not in Z."""

    matrix: tuple[tuple[int, ...], ...]
    rhs: tuple[Fraction, ...]
    functional: tuple[int, ...]
    labels: tuple = ()

    @property
    def lhs(self) -> tuple[int, ...]:
        n = len(self.matrix[0]) if self.matrix else 0
        return tuple(sum(l * row[j] for l, row in zip(self.functional, self.matrix)) for j in range(n))

    @property
    def value(self) -> Fraction:
        return sum((l * b for l, b in zip(self.functional, self.rhs)), Fraction(0))

    def verify(self) -> bool:
        return all(x == 0 for x in self.lhs) and self.value.denominator != 1

    def support(self) -> list:
        """Labels of the rows the functional actually uses."""
        return [lab for lab, l in zip(self.labels, self.functional) if l]

    def to_json(self) -> dict:
        return {
            "functional": list(self.functional),
            "value": format_fraction(frac_mod1(self.value)),
            "rows_used": [list(lab) if isinstance(lab, tuple) else lab for lab in self.support()],
            "verified": self.verify(),
        }


@dataclass
class TorusSystem:
    """Rows ``sum_j A[i][j] a_j = b_i (mod 1)``, optionally labelled."""

    nvars: int
    rows: list[list[int]] = field(default_factory=list)
    rhs: list[Fraction] = field(default_factory=list)
    labels: list = field(default_factory=list)

    def add(self, coeffs: Sequence[int], value, label=None) -> None:
        if len(coeffs) != self.nvars:
            raise ValueError("row length mismatch")
        self.rows.append([int(c) for c in coeffs])
        self.rhs.append(Fraction(value))
        self.labels.append(label)

    def select(self, pred) -> "TorusSystem":
        sub = TorusSystem(self.nvars)
        for r, b, lab in zip(self.rows, self.rhs, self.labels):
            if pred(lab):
                sub.add(r, b, lab)
        return sub

    def solve(self) -> "TorusSolution":
        return solve_torus_system(self)


@dataclass(frozen=True)
class TorusSolution:
    feasible: bool
    particular: tuple[Fraction, ...] | None
    certificate: InfeasibilityCertificate | None
    # kernel description: a = V a', a'_i in (1/d_i)Z/Z for d_i > 0, free otherwise
    V: tuple[tuple[int, ...], ...]
    diag: tuple[int, ...]

    def ambiguity_order(self, j: int) -> int | None:
        """Size of the set of values unknown ``j`` can take (None: a continuum)."""
        order = 1
        for col, d in enumerate(self.diag):
            v = self.V[j][col]
            if v == 0:
                continue
            if d == 0:
                return None
            order = math.lcm(order, d // math.gcd(v, d))
        return order

    def annihilating_multiple(self, j: int) -> int | None:
        """Least ``m > 0`` with ``m * a_j = 0`` for every solution, if any."""
        order = self.ambiguity_order(j)
        if order is None or self.particular is None:
            return None
        return math.lcm(order, frac_mod1(self.particular[j]).denominator)

    def is_forced(self, j: int) -> bool:
        return self.ambiguity_order(j) == 1


def solve_torus_system(system: TorusSystem) -> TorusSolution:
    n = system.nvars
    m = len(system.rows)
    if m == 0:
        V = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
        return TorusSolution(True, (Fraction(0),) * n, None, V, (0,) * n)
    sf = smith.smith_form(system.rows)
    diag = sf.diagonal
    ub = [sum((u * b for u, b in zip(row, system.rhs)), Fraction(0)) for row in sf.U]
    kernel_diag = tuple(diag[i] if i < len(diag) else 0 for i in range(n))
    V = tuple(tuple(r) for r in sf.V)
    for i in range(m):
        d = diag[i] if i < len(diag) else 0
        if d == 0 and ub[i].denominator != 1:
            cert = InfeasibilityCertificate(
                tuple(tuple(r) for r in system.rows), tuple(system.rhs), tuple(sf.U[i]), tuple(system.labels)
            )
            return TorusSolution(False, None, cert, V, kernel_diag)
    y = [ub[i] / kernel_diag[i] if i < m and kernel_diag[i] else Fraction(0) for i in range(n)]
    a = tuple(frac_mod1(sum((sf.V[r][c] * y[c] for c in range(n)), Fraction(0))) for r in range(n))
    return TorusSolution(True, a, None, V, kernel_diag)
