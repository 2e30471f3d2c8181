"""Polynomial maps in the multi-binomial (Taylor) basis.

A map ``f: Z^r -> target`` of degree at most ``k`` is stored as its Taylor
coefficients ``a_w`` (``w`` a multi-index with ``|w| <= k``) so that

    f(v) = sum_w a_w * binom(v_1, w_1) * ... * binom(v_r, w_r).

Targets are ``Q^d`` (plain rationals), ``T^d`` (rationals mod 1) or ``Z_m^d``.
Evaluation accepts rational points; the generalized binomial
``binom(q, j) = q (q-1) ... (q-j+1) / j!`` keeps everything exact.
"""

from __future__ import annotations

import itertools
import math
import re
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .torus import Rational, TorusPoint, check_denominator, format_fraction, frac_mod1, parse_fraction

MultiIndex = tuple[int, ...]
Vector = tuple[Fraction, ...]


class PolyMapError(ValueError):
    pass


@dataclass(frozen=True)
class Target:
    kind: str  # "Q", "T" or "Z"
    dim: int = 1
    modulus: int | None = None

    def __post_init__(self):
        if self.kind not in ("Q", "T", "Z"):
            raise PolyMapError(f"unknown target kind {self.kind!r}")
        if self.kind == "Z" and (self.modulus is None or self.modulus < 1):
            raise PolyMapError("Z_m target needs a modulus m >= 1")
        if self.dim < 0:
            raise PolyMapError("negative target dimension")

    def reduce(self, q: Rational) -> Fraction:
        if self.kind == "T":
            return frac_mod1(q)
        if self.kind == "Z":
            q = Fraction(q)
            if q.denominator != 1:
                raise PolyMapError(f"non-integral value {q} in Z_{self.modulus}")
            return Fraction(q.numerator % self.modulus)
        return check_denominator(Fraction(q))

    def __str__(self) -> str:
        if self.kind == "Z":
            return f"Z_{self.modulus}" + (f"^{self.dim}" if self.dim != 1 else "")
        return f"{self.kind}^{self.dim}"

    @classmethod
    def parse(cls, s: str) -> "Target":
        m = re.fullmatch(r"\s*(Q|T|Z_(\d+))\s*(?:\^\s*(\d+))?\s*", s)
        if not m:
            raise PolyMapError(f"cannot parse target {s!r}")
        dim = int(m.group(3)) if m.group(3) else 1
        if m.group(2):
            return cls("Z", dim, int(m.group(2)))
        return cls(m.group(1), dim)


T1 = Target("T", 1)
Q1 = Target("Q", 1)


@lru_cache(maxsize=1 << 16)
def binom(q: Rational, j: int) -> Fraction:
    """Generalized binomial coefficient for rational ``q``."""
    if j < 0:
        return Fraction(0)
    if isinstance(q, int) or (isinstance(q, Fraction) and q.denominator == 1):
        n = int(q)
        if n >= 0:
            return Fraction(math.comb(n, j))
    num = Fraction(1)
    for i in range(j):
        num *= Fraction(q) - i
    return num / math.factorial(j)


def multi_binom(v: Sequence[Rational], w: MultiIndex) -> Fraction:
    out = Fraction(1)
    for x, j in zip(v, w):
        if j:
            out *= binom(x, j)
            if not out:
                break
    return out


@lru_cache(maxsize=None)
def multi_indices(r: int, k: int) -> tuple[MultiIndex, ...]:
    """All ``w`` with ``|w| <= k`` in graded order (degree, then lex descending)."""
    out = [w for w in itertools.product(range(k + 1), repeat=r) if sum(w) <= k]
    out.sort(key=lambda w: (sum(w), tuple(-x for x in w)))
    return tuple(out)


def simplex_points(r: int, k: int) -> tuple[MultiIndex, ...]:
    """Integer points ``v >= 0`` with ``|v| <= k``; values there determine a degree-k map."""
    return multi_indices(r, k)


def _add_index(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    return tuple(x + y for x, y in zip(a, b))


@dataclass(frozen=True)
class PolyMap:
    arity: int
    degree_bound: int
    target: Target
    coeffs: tuple[tuple[MultiIndex, Vector], ...]

    def __init__(self, arity: int, degree_bound: int, target: Target, coeffs: dict | Iterable = ()):
        items = coeffs.items() if isinstance(coeffs, dict) else coeffs
        table: dict[MultiIndex, list[Fraction]] = {}
        for w, a in items:
            w = tuple(int(x) for x in w)
            if len(w) != arity or any(x < 0 for x in w):
                raise PolyMapError(f"bad multi-index {w} for arity {arity}")
            if sum(w) > degree_bound:
                raise PolyMapError(f"multi-index {w} exceeds degree bound {degree_bound}")
            vec = _as_vector(a, target.dim)
            acc = table.setdefault(w, [Fraction(0)] * target.dim)
            for i, x in enumerate(vec):
                acc[i] += x
        clean = []
        for w in multi_indices(arity, degree_bound):
            if w in table:
                vec = tuple(target.reduce(x) for x in table[w])
                if any(vec):
                    clean.append((w, vec))
        object.__setattr__(self, "arity", arity)
        object.__setattr__(self, "degree_bound", degree_bound)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "coeffs", tuple(clean))

    @classmethod
    def _trusted(cls, arity: int, degree_bound: int, target: Target, table: dict) -> "PolyMap":
        """Skip validation: ``table`` maps valid multi-indices to Fraction lists."""
        clean = []
        for w in multi_indices(arity, degree_bound):
            vec = table.get(w)
            if vec is not None:
                vec = tuple(target.reduce(x) for x in vec)
                if any(vec):
                    clean.append((w, vec))
        obj = object.__new__(cls)
        object.__setattr__(obj, "arity", arity)
        object.__setattr__(obj, "degree_bound", degree_bound)
        object.__setattr__(obj, "target", target)
        object.__setattr__(obj, "coeffs", tuple(clean))
        return obj

    # -- construction -------------------------------------------------------

    @classmethod
    def zero(cls, arity: int, degree_bound: int, target: Target) -> "PolyMap":
        return cls(arity, degree_bound, target, {})

    @classmethod
    def constant(cls, arity: int, degree_bound: int, target: Target, value) -> "PolyMap":
        return cls(arity, degree_bound, target, {(0,) * arity: value})

    @classmethod
    def from_function(cls, fn, arity: int, degree_bound: int, target: Target) -> "PolyMap":
        """Interpolate a degree-<=k map from its values on the simplex (Newton differences)."""
        pts = simplex_points(arity, degree_bound)
        vals = {v: _as_vector(fn(v), target.dim) for v in pts}
        coeffs = {}
        for w in pts:
            acc = [Fraction(0)] * target.dim
            for b in itertools.product(*(range(x + 1) for x in w)):
                sign = -1 if (sum(w) - sum(b)) % 2 else 1
                c = sign * math.prod(math.comb(x, y) for x, y in zip(w, b))
                for i, val in enumerate(vals[b]):
                    acc[i] += c * val
            coeffs[w] = acc
        return cls(arity, degree_bound, target, coeffs)

    @classmethod
    def from_monomials(cls, arity: int, degree_bound: int, target: Target, monos: dict) -> "PolyMap":
        """Build from ordinary monomial coefficients ``{exponent: value}``."""

        def fn(v):
            acc = [Fraction(0)] * target.dim
            for e, a in monos.items():
                m = math.prod(x**y for x, y in zip(v, e))
                for i, val in enumerate(_as_vector(a, target.dim)):
                    acc[i] += m * val
            return acc

        return cls.from_function(fn, arity, degree_bound, target)

    # -- accessors ----------------------------------------------------------

    def coeff_dict(self) -> dict[MultiIndex, Vector]:
        return dict(self.coeffs)

    def coeff(self, w: MultiIndex) -> Vector:
        return self.coeff_dict().get(tuple(w), (Fraction(0),) * self.target.dim)

    def degree(self) -> int:
        """Actual degree (-1 for the zero map)."""
        return max((sum(w) for w, _ in self.coeffs), default=-1)

    def is_zero(self) -> bool:
        return not self.coeffs

    def max_denominator(self) -> int:
        return max((x.denominator for _, vec in self.coeffs for x in vec), default=1)

    def has_integer_coeffs(self) -> bool:
        return all(x.denominator == 1 for _, vec in self.coeffs for x in vec)

    def with_target(self, target: Target, degree_bound: int | None = None) -> "PolyMap":
        return PolyMap(self.arity, self.degree_bound if degree_bound is None else degree_bound, target, self.coeffs)

    def component(self, i: int) -> "PolyMap":
        tgt = Target(self.target.kind, 1, self.target.modulus)
        return PolyMap(self.arity, self.degree_bound, tgt, [(w, (vec[i],)) for w, vec in self.coeffs])

    # -- arithmetic ---------------------------------------------------------

    def _check_compatible(self, other: "PolyMap") -> None:
        if (self.arity, self.target) != (other.arity, other.target):
            raise PolyMapError("polynomial maps have different arity or target")

    def __add__(self, other: "PolyMap") -> "PolyMap":
        self._check_compatible(other)
        table = {w: list(v) for w, v in self.coeffs}
        for w, v in other.coeffs:
            acc = table.get(w)
            if acc is None:
                table[w] = list(v)
            else:
                for i, x in enumerate(v):
                    acc[i] += x
        return PolyMap._trusted(self.arity, max(self.degree_bound, other.degree_bound), self.target, table)

    def __neg__(self) -> "PolyMap":
        return PolyMap._trusted(self.arity, self.degree_bound, self.target, {w: [-x for x in v] for w, v in self.coeffs})

    def __sub__(self, other: "PolyMap") -> "PolyMap":
        return self + (-other)

    def scale(self, c: Rational) -> "PolyMap":
        c = Fraction(c)
        if self.target.kind == "Z" and c.denominator != 1:
            raise PolyMapError("finite target needs an integral scalar")
        return PolyMap._trusted(self.arity, self.degree_bound, self.target, {w: [c * x for x in v] for w, v in self.coeffs})

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyMap):
            return NotImplemented
        return (self.arity, self.target, self.coeffs) == (other.arity, other.target, other.coeffs)

    def __hash__(self) -> int:
        return hash((self.arity, self.target, self.coeffs))

    def __call__(self, v: Sequence[Rational]) -> Vector:
        return eval_poly(self, v)

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        def enc(vec):
            return format_fraction(vec[0]) if self.target.dim == 1 else [format_fraction(x) for x in vec]

        return {
            "r": self.arity,
            "k": self.degree_bound,
            "target": str(self.target),
            "coeffs": [{"w": list(w), "a": enc(vec)} for w, vec in self.coeffs],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "PolyMap":
        target = Target.parse(obj["target"]) if isinstance(obj.get("target", "T^1"), str) else Target(**obj["target"])
        coeffs = []
        for item in obj.get("coeffs", []):
            a = item["a"]
            vec = [parse_fraction(a)] if not isinstance(a, list) else [parse_fraction(x) for x in a]
            coeffs.append((tuple(item["w"]), vec))
        return cls(int(obj["r"]), int(obj["k"]), target, coeffs)

    def __repr__(self) -> str:
        terms = ", ".join(f"{w}: {'/'.join(map(str, v)) if len(v) > 1 else v[0]}" for w, v in self.coeffs)
        return f"PolyMap(r={self.arity}, k={self.degree_bound}, {self.target}, {{{terms}}})"


def _as_vector(a, dim: int) -> list[Fraction]:
    if isinstance(a, TorusPoint):
        a = a.value
    if isinstance(a, (int, Fraction, str)):
        if dim != 1:
            raise PolyMapError(f"scalar coefficient for target of dimension {dim}")
        return [parse_fraction(a)]
    if isinstance(a, float):
        raise PolyMapError("float coefficients are not exact; pass a Fraction or 'p/q' string")
    vec = [parse_fraction(x.value if isinstance(x, TorusPoint) else x) for x in a]
    if len(vec) != dim:
        raise PolyMapError(f"coefficient has {len(vec)} components, target has {dim}")
    return vec


# ----------------------------------------------------------------------------
# calculus


def eval_poly(f: PolyMap, v: Sequence[Rational]) -> Vector:
    """Exact value ``f(v)``, reduced in the target."""
    if len(v) != f.arity:
        raise PolyMapError(f"point of length {len(v)} for arity {f.arity}")
    v = [Fraction(x) for x in v]
    if f.target.kind == "Z" and any(x.denominator != 1 for x in v):
        raise PolyMapError("finite target needs an integral point")
    acc = [Fraction(0)] * f.target.dim
    for w, vec in f.coeffs:
        b = multi_binom(v, w)
        if b:
            for i, a in enumerate(vec):
                acc[i] += a * b
    return tuple(f.target.reduce(x) for x in acc)


def taylor_shift(f: PolyMap, x: Sequence[Rational]) -> PolyMap:
    """Coefficients of ``v -> f(v + x)`` (Vandermonde convolution)."""
    if len(x) != f.arity:
        raise PolyMapError("shift vector has the wrong length")
    x = [Fraction(c) for c in x]
    if f.target.kind == "Z" and any(c.denominator != 1 for c in x):
        raise PolyMapError("finite target needs an integral shift")
    table = f.coeff_dict()
    out: dict[MultiIndex, list[Fraction]] = {}
    for a in multi_indices(f.arity, f.degree_bound):
        acc = [Fraction(0)] * f.target.dim
        hit = False
        for w, vec in table.items():
            if all(wi >= ai for wi, ai in zip(w, a)):
                b = tuple(wi - ai for wi, ai in zip(w, a))
                c = multi_binom(x, b)
                if c:
                    hit = True
                    for i, val in enumerate(vec):
                        acc[i] += val * c
        if hit:
            out[a] = acc
    return PolyMap._trusted(f.arity, f.degree_bound, f.target, out)


def derivative(f: PolyMap, x: Sequence[Rational]) -> PolyMap:
    """``v -> f(v + x) - f(v)``."""
    return taylor_shift(f, x) - f


def unit(r: int, i: int, scale: Rational = 1) -> tuple[Fraction, ...]:
    return tuple(Fraction(scale) if j == i else Fraction(0) for j in range(r))


def descends_to_quotient(f: PolyMap, moduli: Sequence[int]) -> bool:
    """True iff ``f(v + n_i e_i) == f(v)`` for every ``i`` (as maps into the target)."""
    if len(moduli) != f.arity:
        raise PolyMapError("one modulus per variable required")
    return all(derivative(f, unit(f.arity, i, n)).is_zero() for i, n in enumerate(moduli))


def check_period_bound(f: PolyMap, k: int | None = None) -> bool:
    """A map into ``Z_m`` of degree ``<= k`` is ``m * k!``-periodic in each variable."""
    if f.target.kind != "Z":
        raise PolyMapError("period bound applies to finite cyclic targets")
    k = f.degree_bound if k is None else k
    period = f.target.modulus * math.factorial(k)
    return descends_to_quotient(f, [period] * f.arity)


def compose_linear(f: PolyMap, matrix: Sequence[Sequence[int]], arity: int) -> PolyMap:
    """``u -> f(M u)`` for an integer ``f.arity x arity`` matrix ``M``."""

    def fn(u):
        v = [sum(int(m) * x for m, x in zip(row, u)) for row in matrix]
        return eval_poly(f, v)

    return PolyMap.from_function(fn, arity, f.degree_bound, f.target)


def project_to_tail(f: PolyMap, extra: int = 1) -> PolyMap:
    """``(z, v) -> f(v)`` with ``extra`` new leading variables."""
    pad = (0,) * extra
    return PolyMap(f.arity + extra, f.degree_bound, f.target, [(pad + w, vec) for w, vec in f.coeffs])


def as_rational(f: PolyMap) -> PolyMap:
    """Lift a torus- or Z_m-valued map to Q by taking coefficient representatives."""
    return f.with_target(Target("Q", f.target.dim))


def as_torus(f: PolyMap) -> PolyMap:
    return f.with_target(Target("T", f.target.dim))


# ----------------------------------------------------------------------------
# extension feasibility


@dataclass(frozen=True)
class ExtensionResult:
    """Outcome of ``check_extension_feasible``.

    ``extension`` is set when feasible; otherwise ``certificate`` holds the
    failing functional for the first infeasible target component.
    """

    feasible: bool
    extension: PolyMap | None
    certificate: object
    systems: tuple  # one TorusSystem per target component
    unknowns: tuple[MultiIndex, ...]


def extension_system(g: PolyMap, emb_matrix, amb_factors: Sequence[int], sub_factors: Sequence[int], k: int, component: int = 0):
    """Torus linear system for a degree-<=k extension of ``g`` along an embedding.

    Unknowns are the ambient Taylor coefficients ``a_w`` (``|w| <= k``).
    Rows are labelled ``("periodic", i, v)``: ``h(v + n_i e_i) - h(v) = 0`` and
    ``("restrict", u)``: ``h(M u) = g(u)``, for ``v``/``u`` on the degree-k simplex,
    which pins both identities down as maps on the whole lattice.
    """
    from .congruence import TorusSystem

    r = len(amb_factors)
    r0 = len(sub_factors)
    unknowns = multi_indices(r, k)
    sys = TorusSystem(len(unknowns))

    def row_at(pt):
        return [math.prod(math.comb(x, y) for x, y in zip(pt, w)) for w in unknowns]

    for i, n in enumerate(amb_factors):
        for v in simplex_points(r, k):
            shifted = tuple(x + (n if j == i else 0) for j, x in enumerate(v))
            row = [a - b for a, b in zip(row_at(shifted), row_at(v))]
            sys.add(row, 0, ("periodic", i, v))
    g1 = g.component(component)
    for u in simplex_points(r0, k):
        pt = tuple(sum(int(emb_matrix[i][j]) * u[j] for j in range(r0)) for i in range(r))
        sys.add(row_at(pt), eval_poly(g1, u)[0], ("restrict", u))
    return sys, unknowns


def check_extension_feasible(g: PolyMap, emb, k: int) -> ExtensionResult:
    """Decide whether ``g`` (on ``emb.sub``) extends to a degree-<=k map on ``emb.amb``.

    Solved per target component with exact Smith-form arithmetic over T.
    """
    if g.target.kind != "T":
        raise PolyMapError("extension problems are posed for torus targets")
    sub, amb = emb.sub, emb.amb
    if g.arity != sub.rank:
        raise PolyMapError("g must be given in the subgroup's coordinates")
    if not descends_to_quotient(g, sub.factors):
        raise PolyMapError("g is not well defined on the subgroup")
    systems = []
    coeffs: dict[MultiIndex, list[Fraction]] = {}
    unknowns: tuple = ()
    for c in range(g.target.dim):
        sys, unknowns = extension_system(g, emb.matrix, amb.factors, sub.factors, k, c)
        systems.append(sys)
        sol = sys.solve()
        if not sol.feasible:
            return ExtensionResult(False, None, sol.certificate, tuple(systems), unknowns)
        for w, a in zip(unknowns, sol.particular):
            coeffs.setdefault(w, [Fraction(0)] * g.target.dim)[c] = a
    ext = PolyMap(amb.rank, k, g.target, coeffs)
    return ExtensionResult(True, ext, None, tuple(systems), unknowns)


def search_extension_bruteforce(g: PolyMap, emb, k: int, denominator: int, component: int = 0, limit: int = 1) -> list[dict]:
    """Enumerate Taylor coefficient tuples in ``(1/denominator) Z / Z``.

    Independent of the Smith-form route: constraints are checked by direct
    evaluation at lattice points, each one as soon as every coefficient it
    touches has been assigned. Returns up to ``limit`` solutions.
    """
    sub, amb = emb.sub, emb.amb
    r, r0 = amb.rank, sub.rank
    unknowns = list(multi_indices(r, k))
    pos = {w: i for i, w in enumerate(unknowns)}
    g1 = g.component(component)
    M = emb.matrix

    def weights(pt):
        return {w: math.prod(math.comb(x, y) for x, y in zip(pt, w)) for w in unknowns}

    constraints = []  # (weights dict over unknowns, rhs)
    for i, n in enumerate(amb.factors):
        for v in itertools.product(range(k + 1), repeat=r):
            hi = tuple(x + (n if j == i else 0) for j, x in enumerate(v))
            w1, w0 = weights(hi), weights(v)
            constraints.append(({w: w1[w] - w0[w] for w in unknowns if w1[w] - w0[w]}, Fraction(0)))
    for u in itertools.product(range(k + 1), repeat=r0):
        pt = tuple(sum(int(M[i][j]) * u[j] for j in range(r0)) for i in range(r))
        w1 = weights(pt)
        constraints.append(({w: c for w, c in w1.items() if c}, eval_poly(g1, u)[0]))
    # check each constraint at the depth where its last unknown gets assigned
    by_depth: dict[int, list] = {}
    for wts, rhs in constraints:
        depth = max((pos[w] for w in wts), default=-1)
        by_depth.setdefault(depth, []).append(([(pos[w], c) for w, c in wts.items()], rhs))
    if any(rhs.denominator != 1 for _, rhs in by_depth.get(-1, [])):
        return []
    D = denominator
    found: list[dict] = []
    assign = [0] * len(unknowns)

    def ok(depth):
        for terms, rhs in by_depth.get(depth, ()):
            total = Fraction(sum(c * assign[j] for j, c in terms), D) - rhs
            if total.denominator != 1:
                return False
        return True

    def rec(depth):
        if depth == len(unknowns):
            found.append({w: Fraction(assign[i], D) for i, w in enumerate(unknowns)})
            return len(found) >= limit
        for c in range(D):
            assign[depth] = c
            if ok(depth) and rec(depth + 1):
                return True
        return False

    rec(0)
    return found


def nonext_instance(p: int):
    """The degree-2 non-extendable example on ``Z_{p^2} x Z_p``.

    Returns ``(g, emb)`` with ``g(x, y) = x y / p`` on ``(p Z_{p^2}) x Z_p``
    written in subgroup coordinates, and the embedding ``(x, y) -> (p x, y)``.
    """
    from .abgroup import FinAbGroup, SubgroupEmbedding

    amb = FinAbGroup((p * p, p))
    sub = FinAbGroup((p, p))
    emb = SubgroupEmbedding(sub, amb, [[p, 0], [0, 1]])
    g = PolyMap(2, 2, T1, {(1, 1): Fraction(1, p)})
    return g, emb


def nonext_deduction(p: int, k: int = 2) -> dict:
    """Replays the classical argument for the non-extendable example.

    Step 1: restriction at (0,0), (0,1), (0,2) forces the constant, ``y`` and
    ``binom(y,2)`` coefficients to vanish. Step 2: adding periodicity in ``y``
    forces ``p * a_xy = 0``. Step 3: the remaining restriction rows make the
    system infeasible, without using periodicity in ``x``.
    """
    g, emb = nonext_instance(p)
    full, unknowns = extension_system(g, emb.matrix, emb.amb.factors, emb.sub.factors, k)
    idx = {w: i for i, w in enumerate(unknowns)}
    early = {(0, 0), (0, 1), (0, 2)}
    step1 = full.select(lambda lab: lab[0] == "restrict" and lab[1] in early).solve()
    step2 = full.select(lambda lab: (lab[0] == "restrict" and lab[1] in early) or lab[:2] == ("periodic", 1)).solve()
    no_x_period = full.select(lambda lab: lab[:2] != ("periodic", 0)).solve()
    complete = full.solve()
    forced_zero = [w for w in ((0, 0), (0, 1), (0, 2)) if w in idx and step1.is_forced(idx[w]) and step1.particular[idx[w]] == 0]
    xy = idx.get((1, 1))
    return {
        "forced_zero_after_restriction": [list(w) for w in forced_zero],
        "xy_annihilated_by": step2.annihilating_multiple(xy) if xy is not None else None,
        "infeasible_without_x_periodicity": not no_x_period.feasible,
        "infeasible": not complete.feasible,
        "certificate": complete.certificate,
        "certificate_without_x_periodicity": no_x_period.certificate,
    }


def periodic_lattice(moduli: Sequence[int], k: int):
    """Kernel description of degree-<=k maps ``prod Z_{n_i} -> T``.

    Returns ``(unknowns, solution)`` where ``solution.V``/``solution.diag``
    parameterize every periodic coefficient vector as ``V a'`` with
    ``a'_c in (1/d_c) Z`` (``d_c > 0``) or arbitrary (``d_c == 0``).
    """
    from .congruence import TorusSystem

    r = len(moduli)
    unknowns = multi_indices(r, k)
    sys = TorusSystem(len(unknowns))
    for i, n in enumerate(moduli):
        for v in simplex_points(r, k):
            hi = tuple(x + (n if j == i else 0) for j, x in enumerate(v))
            sys.add(
                [math.prod(math.comb(x, y) for x, y in zip(hi, w)) - math.prod(math.comb(x, y) for x, y in zip(v, w)) for w in unknowns],
                0,
                ("periodic", i, v),
            )
    return unknowns, sys.solve()


def random_periodic_polymap(rng, moduli: Sequence[int], k: int, dim: int = 1, max_den: int = 24) -> PolyMap:
    """A uniformly-parameterized random degree-<=k map ``prod Z_{n_i} -> T^dim``.

    Free directions (only the constant term in practice) get denominators up
    to ``max_den``.
    """
    unknowns, sol = periodic_lattice(moduli, k)
    n = len(unknowns)
    coeffs: dict[MultiIndex, list[Fraction]] = {w: [Fraction(0)] * dim for w in unknowns}
    for c in range(dim):
        y = []
        for d in sol.diag:
            if d:
                y.append(Fraction(rng.randrange(d), d))
            else:
                den = rng.randint(1, max_den)
                y.append(Fraction(rng.randrange(den), den))
        for i, w in enumerate(unknowns):
            coeffs[w][c] = sum((sol.V[i][j] * y[j] for j in range(n)), Fraction(0))
    return PolyMap(len(moduli), k, Target("T", dim), coeffs)
