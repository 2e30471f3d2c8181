"""Smith normal form over the integers, with unimodular transforms.

Matrices are plain lists of lists of Python ints. ``smith_form(A)`` returns
``(D, U, Uinv, V, Vinv)`` with ``U @ A @ V == D``; ``D`` is diagonal with
nonnegative entries ``d_1 | d_2 | ...`` (zeros last).
"""

from __future__ import annotations

from dataclasses import dataclass

Matrix = list[list[int]]


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def zeros(m: int, n: int) -> Matrix:
    return [[0] * n for _ in range(m)]


def copy(a: Matrix) -> Matrix:
    return [list(row) for row in a]


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if not a:
        return []
    inner = len(b)
    ncols = len(b[0]) if b else 0
    if len(a[0]) != inner:
        raise ValueError(f"shape mismatch: {len(a)}x{len(a[0])} @ {inner}x{ncols}")
    return [[sum(a[i][t] * b[t][j] for t in range(inner)) for j in range(ncols)] for i in range(len(a))]


def matvec(a: Matrix, x: list[int]) -> list[int]:
    return [sum(row[j] * x[j] for j in range(len(x))) for row in a]


def transpose(a: Matrix, ncols: int | None = None) -> Matrix:
    if not a:
        return [[] for _ in range(ncols or 0)]
    return [list(col) for col in zip(*a)]


@dataclass(frozen=True)
class SmithForm:
    D: Matrix
    U: Matrix
    Uinv: Matrix
    V: Matrix
    Vinv: Matrix

    @property
    def diagonal(self) -> list[int]:
        return [self.D[i][i] for i in range(min(len(self.D), len(self.D[0]) if self.D else 0))]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)


class _Work:
    """Mutable state for the reduction; every op keeps U A V = D in sync."""

    def __init__(self, a: Matrix, m: int, n: int):
        self.a = copy(a)
        self.m, self.n = m, n
        self.U, self.Uinv = identity(m), identity(m)
        self.V, self.Vinv = identity(n), identity(n)

    def swap_rows(self, i: int, j: int) -> None:
        if i == j:
            return
        for mat in (self.a, self.U):
            mat[i], mat[j] = mat[j], mat[i]
        for row in self.Uinv:
            row[i], row[j] = row[j], row[i]

    def add_row(self, i: int, j: int, c: int) -> None:
        # row_i += c * row_j
        if c == 0:
            return
        for mat in (self.a, self.U):
            ri, rj = mat[i], mat[j]
            for t in range(len(ri)):
                ri[t] += c * rj[t]
        for row in self.Uinv:
            row[j] -= c * row[i]

    def negate_row(self, i: int) -> None:
        for mat in (self.a, self.U):
            mat[i] = [-x for x in mat[i]]
        for row in self.Uinv:
            row[i] = -row[i]

    def swap_cols(self, i: int, j: int) -> None:
        if i == j:
            return
        for mat in (self.a, self.V):
            for row in mat:
                row[i], row[j] = row[j], row[i]
        self.Vinv[i], self.Vinv[j] = self.Vinv[j], self.Vinv[i]

    def add_col(self, j: int, i: int, c: int) -> None:
        # col_j += c * col_i
        if c == 0:
            return
        for mat in (self.a, self.V):
            for row in mat:
                row[j] += c * row[i]
        ri, rj = self.Vinv[i], self.Vinv[j]
        for t in range(len(ri)):
            ri[t] -= c * rj[t]


def smith_form(a: Matrix, ncols: int | None = None) -> SmithForm:
    """Reduce ``a`` (m x n) to Smith normal form.

    ``ncols`` is only needed when ``a`` has zero rows.
    """
    m = len(a)
    n = len(a[0]) if m else (ncols or 0)
    w = _Work(a, m, n)
    A = w.a
    for t in range(min(m, n)):
        while True:
            pivot = None
            for i in range(t, m):
                for j in range(t, n):
                    if A[i][j] and (pivot is None or abs(A[i][j]) < abs(A[pivot[0]][pivot[1]])):
                        pivot = (i, j)
            if pivot is None:
                break
            w.swap_rows(t, pivot[0])
            w.swap_cols(t, pivot[1])
            p = A[t][t]
            dirty = False
            for i in range(t + 1, m):
                if A[i][t]:
                    w.add_row(i, t, -(A[i][t] // p))
                    dirty = dirty or A[i][t] != 0
            for j in range(t + 1, n):
                if A[t][j]:
                    w.add_col(j, t, -(A[t][j] // p))
                    dirty = dirty or A[t][j] != 0
            if dirty:
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % p),
                None,
            )
            if bad is None:
                break
            w.add_row(t, bad, 1)
        if A[t][t] < 0:
            w.negate_row(t)
    return SmithForm(A, w.U, w.Uinv, w.V, w.Vinv)


def kernel_basis(a: Matrix, ncols: int | None = None) -> list[list[int]]:
    """Integer basis (as vectors) of {x in Z^n : a x = 0}."""
    sf = smith_form(a, ncols)
    n = len(sf.V)
    rank = sf.rank
    return [[sf.V[i][j] for i in range(n)] for j in range(rank, n)]


def solve_integer(a: Matrix, b: list[int], ncols: int | None = None) -> list[int] | None:
    """One integer solution of ``a x = b`` or ``None``."""
    sf = smith_form(a, ncols)
    n = len(sf.V)
    ub = matvec(sf.U, b)
    diag = sf.diagonal
    y = [0] * n
    for i, val in enumerate(ub):
        d = diag[i] if i < len(diag) else 0
        if d == 0:
            if val != 0:
                return None
        else:
            if val % d:
                return None
            y[i] = val // d
    return matvec(sf.V, y)
