"""Gowers uniformity norms and correlations on finite abelian groups.

Normalization: expectations are uniform averages over the group, so
``||f||_{U^1} = |E f|`` and

    ||f||_{U^d}^{2^d} = E_h ||Delta_h f||_{U^{d-1}}^{2^{d-1}},
    Delta_h f(x) = f(x + h) * conj(f(x)).

On a product group the averages run over the whole product; no per-factor
weighting. The Fourier transform is ``f^(xi) = E_x f(x) e(-xi . x)`` so that
``||f||_{U^2}^4 = sum_xi |f^(xi)|^4`` and Parseval reads
``sum |f^|^2 = E |f|^2``.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .abgroup import FinAbGroup, GroupElement


class GowersError(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    """An enumeration would exceed the configured budget."""


#: default cap on the number of summands in brute-force sums
DEFAULT_BUDGET = 10**8


def expectation(values) -> complex:
    """Mean with exactly rounded summation of real and imaginary parts."""
    arr = np.asarray(values, dtype=complex).ravel()
    if arr.size == 0:
        raise GowersError("expectation over an empty set")
    return complex(math.fsum(arr.real), math.fsum(arr.imag)) / arr.size


@dataclass(frozen=True, eq=False)
class GroupFunction:
    """Complex table on ``parent``, indexed by coordinates (row-major)."""

    parent: FinAbGroup
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        shape = self.parent.factors
        if vals.size != self.parent.order:
            raise GowersError(f"table has {vals.size} entries, group has {self.parent.order}")
        object.__setattr__(self, "values", vals.reshape(shape))

    @classmethod
    def from_callable(cls, parent: FinAbGroup, fn) -> "GroupFunction":
        return cls(parent, np.array([fn(x) for x in parent.elements()], dtype=complex))

    @classmethod
    def phase(cls, parent: FinAbGroup, phase_fn) -> "GroupFunction":
        """``x -> e(phase_fn(x))`` with ``phase_fn`` returning a rational (or TorusPoint)."""

        def fn(x):
            q = phase_fn(x)
            q = getattr(q, "value", q)
            return cmath.exp(2j * math.pi * float(q % 1))

        return cls.from_callable(parent, fn)

    def __call__(self, x: GroupElement) -> complex:
        return complex(self.values[x.coords] if x.coords else self.values[()])

    def is_one_bounded(self, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.values), initial=0.0) <= 1 + tol)

    def conj(self) -> "GroupFunction":
        return GroupFunction(self.parent, np.conj(self.values))

    def __add__(self, other: "GroupFunction") -> "GroupFunction":
        _same_parent(self, other)
        return GroupFunction(self.parent, self.values + other.values)

    def __mul__(self, other) -> "GroupFunction":
        if isinstance(other, GroupFunction):
            _same_parent(self, other)
            return GroupFunction(self.parent, self.values * other.values)
        return GroupFunction(self.parent, self.values * other)

    __rmul__ = __mul__

    def to_json(self) -> list:
        return [[float(z.real), float(z.imag)] for z in self.values.ravel()]

    @classmethod
    def from_json(cls, parent: FinAbGroup, data: list) -> "GroupFunction":
        return cls(parent, np.array([complex(re, im) for re, im in data], dtype=complex))


def _same_parent(f: GroupFunction, g: GroupFunction) -> None:
    if f.parent != g.parent:
        raise GowersError(f"functions on different groups: {f.parent} vs {g.parent}")


def correlation(f: GroupFunction, g: GroupFunction) -> complex:
    """``E_x f(x) conj(g(x))``."""
    _same_parent(f, g)
    return expectation(f.values * np.conj(g.values))


# ----------------------------------------------------------------------------
# Fourier transform


def dft_naive(f: GroupFunction) -> np.ndarray:
    """Per-coordinate O(n^2) transform, normalized as an average."""
    out = f.values.astype(complex)
    for axis, n in enumerate(f.parent.factors):
        idx = np.arange(n)
        w = np.exp(-2j * np.pi * np.outer(idx, idx) / n)
        out = np.moveaxis(np.tensordot(w, np.moveaxis(out, axis, 0), axes=(1, 0)), 0, axis)
    return out / f.parent.order


def dft(f: GroupFunction) -> np.ndarray:
    """``f^(xi) = E_x f(x) e(-xi . x)`` via a mixed-radix FFT."""
    if f.parent.rank == 0:
        return f.values.astype(complex)
    return np.fft.fftn(f.values) / f.parent.order


def gowers_u2_fourier(f: GroupFunction) -> float:
    """``||f||_{U^2} = (sum |f^|^4)^{1/4}``."""
    c = np.abs(dft(f)) ** 2
    return math.fsum((c * c).ravel()) ** 0.25


# ----------------------------------------------------------------------------
# recursive evaluation


def _autocorrelation(batch: np.ndarray, axes: tuple[int, ...], inner: str) -> np.ndarray:
    """``a(h) = E_x g(x + h) conj(g(x))`` for every ``h``, batched over axis 0."""
    n = math.prod(batch.shape[1:])
    if inner == "fft" and axes:
        spec = np.fft.fftn(batch, axes=axes)
        return np.fft.ifftn(np.abs(spec) ** 2, axes=axes) / n
    out = np.empty_like(batch)
    shape = batch.shape[1:]
    conj = np.conj(batch)
    for h in itertools.product(*(range(m) for m in shape)):
        shifted = np.roll(batch, tuple(-x for x in h), axis=axes) if axes else batch
        out[(slice(None),) + h] = np.sum(shifted * conj, axis=axes) / n
    return out


def _power(batch: np.ndarray, d: int, inner: str, chunk: int) -> np.ndarray:
    """``||g||_{U^d}^{2^d}`` for each function ``g`` in the batch (axis 0)."""
    axes = tuple(range(1, batch.ndim))
    if d == 1:
        m = batch.reshape(batch.shape[0], -1).mean(axis=1)
        return np.abs(m) ** 2
    if d == 2:
        a = _autocorrelation(batch, axes, inner)
        return (np.abs(a) ** 2).reshape(batch.shape[0], -1).mean(axis=1).real
    shape = batch.shape[1:]
    shifts = list(itertools.product(*(range(m) for m in shape)))
    conj = np.conj(batch)
    out = np.zeros(batch.shape[0])
    terms = np.empty((batch.shape[0], len(shifts)))
    for start in range(0, len(shifts), chunk):
        block = shifts[start : start + chunk]
        derived = np.stack(
            [np.roll(batch, tuple(-x for x in h), axis=axes) * conj if axes else batch * conj for h in block],
            axis=1,
        )  # (B, len(block), *shape)
        flat = derived.reshape((-1,) + shape)
        vals = _power(flat, d - 1, inner, chunk).reshape(batch.shape[0], len(block))
        terms[:, start : start + len(block)] = vals
    for b in range(batch.shape[0]):
        out[b] = math.fsum(terms[b]) / len(shifts)
    return out


def gowers_power(f: GroupFunction, d: int, inner: str = "auto", chunk: int | None = None) -> float:
    """``||f||_{U^d}^{2^d}`` by the derivative recursion."""
    if d < 1:
        raise GowersError("Gowers norms need d >= 1")
    n = f.parent.order
    if inner == "auto":
        inner = "direct" if n <= 512 else "fft"
    if inner not in ("direct", "fft"):
        raise GowersError(f"unknown inner method {inner!r}")
    if chunk is None:
        chunk = max(1, min(n, 2**22 // max(n, 1)))
    batch = f.values[np.newaxis, ...]
    val = float(_power(batch, d, inner, chunk)[0])
    return max(val, 0.0)


def gowers_norm(f: GroupFunction, d: int, inner: str = "auto") -> float:
    """``||f||_{U^d}`` (nonnegative ``2^d``-th root of the recursion)."""
    return gowers_power(f, d, inner) ** (1.0 / 2**d)


def _addition_table(g: FinAbGroup) -> np.ndarray:
    elems = list(g.elements())
    table = np.empty((len(elems), len(elems)), dtype=np.int64)
    for i, x in enumerate(elems):
        for j, y in enumerate(elems):
            table[i, j] = g.index_of(x + y)
    return table


def gowers_naive(f: GroupFunction, d: int, budget: int = DEFAULT_BUDGET) -> float:
    """Direct average over all ``(x, h_1, ..., h_d)`` of the cube product."""
    if d < 1:
        raise GowersError("Gowers norms need d >= 1")
    n = f.parent.order
    if n ** (d + 1) > budget:
        raise BudgetExceeded(f"{n}^{d + 1} summands exceed budget {budget}")
    add = _addition_table(f.parent)
    vals = f.values.ravel()
    x = np.arange(n)
    partial = []
    # vectorize over x and h_1; loop over the remaining directions
    for rest in itertools.product(range(n), repeat=d - 1):
        prod = np.ones((n, n), dtype=complex)
        for omega in itertools.product((0, 1), repeat=d):
            pos = np.broadcast_to(x[:, None], (n, n))
            if omega[0]:
                pos = add[pos, np.broadcast_to(x[None, :], (n, n))]
            for bit, h in zip(omega[1:], rest):
                if bit:
                    pos = add[pos, h]
            term = vals[pos]
            prod *= np.conj(term) if sum(omega) % 2 else term
        partial.append(prod.sum())
    total = complex(math.fsum(z.real for z in partial), math.fsum(z.imag for z in partial))
    return max(total.real / n ** (d + 1), 0.0) ** (1.0 / 2**d)


# ----------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class CorrelationReport:
    """Outcome of a correlation search: ``|E f conj(F(g))| = epsilon``."""

    delta: float
    epsilon: float
    k: int
    complexity: dict
    epsilon0: float | None = None
    bound: float | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.epsilon > 1 + 1e-9:
            raise GowersError(f"correlation {self.epsilon} exceeds 1")

    def to_json(self) -> dict:
        out = {
            "delta": self.delta,
            "epsilon": self.epsilon,
            "k": self.k,
            "complexity": self.complexity,
            "epsilon0": self.epsilon0,
            "bound": self.bound,
        }
        out.update(self.extra)
        return out
