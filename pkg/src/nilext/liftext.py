"""Extension of nilsequences from a subgroup to the whole group.

Ambient nilpotent group is abelian, ``G = R^d`` with ``G_i = R^d`` for
``i <= k``. Polynomial orbits on ``Z^r`` then live in the semidirect product
``H' = Poly_{<=k}(Z^r -> R^d) x| R^r`` with law

    (f, x) * (g, y) = (f + g(. + x), x + y)

and lattice ``Lambda' = {(h, m): h integer-valued, m in Z^r}``. A polynomial
orbit ``phi`` is traded for the linear orbit ``prod h_i^{z_i}`` with
``h_i = (phi, 0)^{-1} (0, e_i) (phi, 0) = (phi(. + e_i) - phi, e_i)``; the
fibre value is read off with ``ev_0: (g, 0) Lambda' -> g(0) mod Z^d``.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .abgroup import (
    Character,
    FinAbGroup,
    GroupElement,
    Homomorphism,
    Ladder,
    SubgroupEmbedding,
    annihilator,
    build_ladder,
    prime_factor_count,
)
from .polymap import (
    PolyMap,
    Target,
    as_rational,
    binom,
    compose_linear,
    derivative,
    descends_to_quotient,
    eval_poly,
    project_to_tail,
    taylor_shift,
    unit,
)
from .torus import DenominatorOverflow, TorusPoint, check_denominator, format_fraction, frac_mod1, parse_fraction


class ExtensionError(ValueError):
    """Shape mismatch or a violated precondition in the extension pipeline."""


class IdentityViolation(AssertionError):
    """An identity that must hold exactly failed."""


# ----------------------------------------------------------------------------
# the semidirect product


@dataclass(frozen=True)
class HPoint:
    """Element ``(poly, shift)`` of ``Poly_{<=k}(Z^r -> Q^d) x| Q^r``."""

    poly: PolyMap
    shift: tuple[Fraction, ...]

    def __post_init__(self):
        if self.poly.target.kind != "Q":
            raise ExtensionError("HPoint fibre must be rational-valued")
        shift = tuple(check_denominator(Fraction(x)) for x in self.shift)
        if len(shift) != self.poly.arity:
            raise ExtensionError("shift length must equal polynomial arity")
        object.__setattr__(self, "shift", shift)

    @classmethod
    def identity(cls, r: int, k: int, d: int) -> "HPoint":
        return cls(PolyMap.zero(r, k, Target("Q", d)), (Fraction(0),) * r)

    @classmethod
    def pure_shift(cls, x: Sequence, k: int, d: int) -> "HPoint":
        return cls(PolyMap.zero(len(x), k, Target("Q", d)), tuple(Fraction(c) for c in x))

    @property
    def arity(self) -> int:
        return self.poly.arity

    @property
    def dim(self) -> int:
        return self.poly.target.dim

    def __mul__(self, other: "HPoint") -> "HPoint":
        return h_mul(self, other)

    def inverse(self) -> "HPoint":
        return h_inv(self)

    def __pow__(self, t) -> "HPoint":
        return h_pow(self, t)

    def is_identity(self) -> bool:
        return self.poly.is_zero() and not any(self.shift)

    def in_lattice(self) -> bool:
        return all(x.denominator == 1 for x in self.shift) and self.poly.has_integer_coeffs()

    def max_denominator(self) -> int:
        return max([self.poly.max_denominator()] + [x.denominator for x in self.shift])

    def to_json(self) -> dict:
        return {"poly": self.poly.to_json(), "shift": [format_fraction(x) for x in self.shift]}

    @classmethod
    def from_json(cls, obj: dict) -> "HPoint":
        return cls(PolyMap.from_json(obj["poly"]), tuple(parse_fraction(x) for x in obj["shift"]))


def _check_shapes(a: HPoint, b: HPoint) -> None:
    if (a.arity, a.dim) != (b.arity, b.dim):
        raise ExtensionError(f"HPoint shapes differ: (r={a.arity}, d={a.dim}) vs (r={b.arity}, d={b.dim})")


def h_mul(a: HPoint, b: HPoint) -> HPoint:
    _check_shapes(a, b)
    poly = a.poly + taylor_shift(b.poly, a.shift)
    return HPoint(poly, tuple(x + y for x, y in zip(a.shift, b.shift)))


def h_inv(a: HPoint) -> HPoint:
    neg = tuple(-x for x in a.shift)
    return HPoint(-taylor_shift(a.poly, neg), neg)


@lru_cache(maxsize=4096)
def _iterated_differences(a: HPoint) -> tuple[PolyMap, ...]:
    """``(f, D f, D^2 f, ...)`` with ``D f = f(. + x) - f`` until it vanishes."""
    out = [a.poly]
    if any(a.shift):
        while not out[-1].is_zero() and len(out) <= a.poly.degree_bound + 1:
            out.append(derivative(out[-1], a.shift))
    return tuple(p for p in out if not p.is_zero())


def h_pow(a: HPoint, t) -> HPoint:
    """One-parameter power ``a^t`` for rational ``t``.

    For integer ``n >= 0``, ``a^n = (sum_{j<n} f(. + j x), n x)``; expanding
    ``f(. + j x)`` by forward differences gives the closed form
    ``a^t = (sum_m binom(t, m+1) D^m f, t x)``, a polynomial in ``t`` that is
    the unique one-parameter subgroup through ``a``.
    """
    t = Fraction(t)
    diffs = _iterated_differences(a)
    poly = PolyMap.zero(a.arity, a.poly.degree_bound, a.poly.target)
    for m, dm in enumerate(diffs):
        c = binom(t, m + 1)
        if c:
            poly = poly + dm.scale(c)
    return HPoint(poly, tuple(t * x for x in a.shift))


def commutator(a: HPoint, b: HPoint) -> HPoint:
    """``a^{-1} b^{-1} a b``."""
    return h_mul(h_mul(h_inv(a), h_inv(b)), h_mul(a, b))


def lambda_coset_eq(a: HPoint, b: HPoint) -> bool:
    """True iff ``a Lambda' == b Lambda'``, i.e. ``b^{-1} a`` lies in the lattice."""
    _check_shapes(a, b)
    return h_mul(h_inv(b), a).in_lattice()


def filtration_level_ok(c: HPoint, level: int, k: int) -> bool:
    """Membership in ``H_level`` of the degree-(k+1) filtration on ``H'``."""
    if level <= 1 or c.is_identity():
        return True
    return not any(c.shift) and c.poly.degree() <= k - level + 1


# ----------------------------------------------------------------------------
# orbits and nilsequences


OUTSIDE = None  # off rho^{-1}(0): the point has a non-integral shift


@dataclass(frozen=True)
class LinearOrbit:
    """``z -> base * prod_i h_i^{z_i}`` with commuting ``h_i``, ``h_i^{n_i}`` in the lattice."""

    base: HPoint
    generators: tuple[HPoint, ...]
    moduli: tuple[int, ...]

    def __post_init__(self):
        if len(self.generators) != len(self.moduli):
            raise ExtensionError("one modulus per generator")
        for h in self.generators:
            _check_shapes(self.base, h)

    @property
    def arity(self) -> int:
        return self.base.arity

    @property
    def dim(self) -> int:
        return self.base.dim

    @property
    def degree_bound(self) -> int:
        return self.base.poly.degree_bound

    def validate(self) -> None:
        gens = self.generators
        for i in range(len(gens)):
            for j in range(i + 1, len(gens)):
                if h_mul(gens[i], gens[j]) != h_mul(gens[j], gens[i]):
                    raise IdentityViolation(f"generators {i} and {j} do not commute")
            if not h_pow(gens[i], self.moduli[i]).in_lattice():
                raise IdentityViolation(f"generator {i} raised to {self.moduli[i]} is not in the lattice")

    def point(self, z: Sequence[int]) -> HPoint:
        p = self.base
        for h, zi in zip(self.generators, z):
            if zi:
                p = h_mul(p, h_pow(h, zi))
        return p

    def max_denominator(self) -> int:
        return max(h.max_denominator() for h in (self.base,) + self.generators)

    def to_json(self) -> dict:
        return {
            "base": self.base.to_json(),
            "generators": [h.to_json() for h in self.generators],
            "moduli": list(self.moduli),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "LinearOrbit":
        return cls(
            HPoint.from_json(obj["base"]),
            tuple(HPoint.from_json(h) for h in obj["generators"]),
            tuple(int(n) for n in obj["moduli"]),
        )


def orbit_eval(orbit: LinearOrbit, z: GroupElement | Sequence[int]):
    """Fibre point ``ev_0(base * prod h_i^{z_i})`` in ``T^d``, or ``OUTSIDE``."""
    coords = z.coords if isinstance(z, GroupElement) else tuple(z)
    p = orbit.point(coords)
    if any(x.denominator != 1 for x in p.shift):
        return OUTSIDE
    # right-multiplying by (0, -s) in Lambda' leaves (poly, 0)
    return tuple(frac_mod1(v) for v in eval_poly(p.poly, (0,) * p.arity))


@dataclass(frozen=True)
class FiberFunction:
    """``F(theta) = e(c . theta)`` on ``T^d``; zero off ``rho^{-1}(0)``."""

    coeffs: tuple[int, ...]

    def __call__(self, theta) -> complex:
        if theta is OUTSIDE:
            return 0j
        return TorusPoint(sum((c * t for c, t in zip(self.coeffs, theta)), Fraction(0))).e()

    def phase(self, theta) -> TorusPoint | None:
        if theta is OUTSIDE:
            return None
        return TorusPoint(sum((c * t for c, t in zip(self.coeffs, theta)), Fraction(0)))

    def to_json(self) -> dict:
        return {"kind": "character", "coeffs": list(self.coeffs)}

    @classmethod
    def from_json(cls, obj: dict) -> "FiberFunction":
        if obj.get("kind", "character") != "character":
            raise ExtensionError(f"unsupported fibre function {obj.get('kind')!r}")
        return cls(tuple(int(c) for c in obj["coeffs"]))


@dataclass(frozen=True)
class Complexity:
    """Concrete complexity record: degree, variables, fibre dimension, denominators."""

    k: int
    r: int
    d: int
    max_denominator: int
    nonsplit_steps: int = 0
    split_steps: int = 0

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "r": self.r,
            "d": self.d,
            "max_denominator": self.max_denominator,
            "nonsplit_steps": self.nonsplit_steps,
            "split_steps": self.split_steps,
        }


@dataclass(frozen=True)
class Nilsequence:
    """``z -> F(orbit(z))`` on a finite abelian group.

    ``orbit`` is either a torus-valued ``PolyMap`` (polynomial form) or a
    ``LinearOrbit`` (linear form).
    """

    domain: FinAbGroup
    orbit: PolyMap | LinearOrbit
    fiber: FiberFunction
    complexity: Complexity | None = None

    def __post_init__(self):
        if isinstance(self.orbit, PolyMap):
            if self.orbit.arity != self.domain.rank or self.orbit.target.kind != "T":
                raise ExtensionError("polynomial orbit must be T^d-valued on the domain coordinates")
        elif tuple(self.orbit.moduli) != self.domain.factors:
            raise ExtensionError("linear orbit moduli must match the domain")
        if len(self.fiber.coeffs) != self.dim:
            raise ExtensionError("fibre function dimension mismatch")
        if self.complexity is None:
            object.__setattr__(self, "complexity", self._measure())

    @property
    def is_linear(self) -> bool:
        return isinstance(self.orbit, LinearOrbit)

    @property
    def dim(self) -> int:
        return self.orbit.target.dim if isinstance(self.orbit, PolyMap) else self.orbit.dim

    @property
    def degree_bound(self) -> int:
        return self.orbit.degree_bound

    def _measure(self, **extra) -> Complexity:
        if isinstance(self.orbit, PolyMap):
            return Complexity(self.orbit.degree_bound, self.orbit.arity, self.dim, self.orbit.max_denominator(), **extra)
        return Complexity(self.orbit.degree_bound, self.orbit.arity, self.dim, self.orbit.max_denominator(), **extra)

    def torus_value(self, z: GroupElement | Sequence[int]):
        coords = z.coords if isinstance(z, GroupElement) else tuple(int(c) for c in z)
        if isinstance(self.orbit, PolyMap):
            return eval_poly(self.orbit, coords)
        return orbit_eval(self.orbit, coords)

    def phase(self, z):
        return self.fiber.phase(self.torus_value(z))

    def __call__(self, z) -> complex:
        return self.fiber(self.torus_value(z))

    def values(self) -> np.ndarray:
        """Complex table over the domain in row-major order."""
        vals = np.array([self(x) for x in self.domain.elements()], dtype=complex)
        return vals.reshape(self.domain.factors) if self.domain.rank else vals.reshape(())

    def check_periodic(self) -> bool:
        if isinstance(self.orbit, PolyMap):
            return descends_to_quotient(self.orbit, self.domain.factors)
        try:
            self.orbit.validate()
        except IdentityViolation:
            return False
        return True

    def to_json(self) -> dict:
        if isinstance(self.orbit, PolyMap):
            orbit = {"kind": "polynomial", "map": self.orbit.to_json()}
        else:
            orbit = {"kind": "linear", **self.orbit.to_json()}
        return {
            "domain": self.domain.to_json(),
            "orbit": orbit,
            "fiber": self.fiber.to_json(),
            "complexity": self.complexity.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Nilsequence":
        domain = FinAbGroup.from_json(obj["domain"])
        o = obj["orbit"]
        orbit = PolyMap.from_json(o["map"]) if o["kind"] == "polynomial" else LinearOrbit.from_json(o)
        dim = orbit.target.dim if isinstance(orbit, PolyMap) else orbit.dim
        fiber = FiberFunction.from_json(obj["fiber"]) if "fiber" in obj else FiberFunction((1,) * dim)
        comp = obj.get("complexity")
        return cls(domain, orbit, fiber, Complexity(**comp) if comp else None)


def polynomial_nilsequence(domain: FinAbGroup, phi: PolyMap, fiber: Sequence[int] | None = None) -> Nilsequence:
    if not descends_to_quotient(phi, domain.factors):
        raise ExtensionError("polynomial orbit is not periodic on the domain")
    fib = FiberFunction(tuple(fiber) if fiber is not None else (1,) * phi.target.dim)
    return Nilsequence(domain, phi, fib)


# ----------------------------------------------------------------------------
# linearization and extension steps


def linearize(phi: PolyMap, moduli: Sequence[int]) -> LinearOrbit:
    """Linear orbit with base ``(phi, 0)`` and ``h_i = (phi(. + e_i) - phi, e_i)``."""
    if phi.target.kind != "T":
        raise ExtensionError("linearize expects a torus-valued polynomial map")
    if not descends_to_quotient(phi, moduli):
        raise ExtensionError("phi is not periodic with the given moduli")
    lift = as_rational(phi)
    r, k = phi.arity, phi.degree_bound
    gens = tuple(HPoint(derivative(lift, unit(r, i)), unit(r, i)) for i in range(r))
    orbit = LinearOrbit(HPoint(lift, (Fraction(0),) * r), gens, tuple(moduli))
    orbit.validate()
    return orbit


def to_linear(N: Nilsequence) -> Nilsequence:
    if N.is_linear:
        return N
    orbit = linearize(N.orbit, N.domain.factors)
    return Nilsequence(N.domain, orbit, N.fiber, replace(N.complexity, max_denominator=orbit.max_denominator()))


def transport(N: Nilsequence, hom: Homomorphism) -> Nilsequence:
    """Pull ``N`` back along a homomorphism ``hom: new_domain -> N.domain``."""
    if hom.dst != N.domain:
        raise ExtensionError("homomorphism does not land in the nilsequence domain")
    M = hom.as_lists()
    if isinstance(N.orbit, PolyMap):
        orbit = compose_linear(N.orbit, M, hom.src.rank) if hom.src.rank else PolyMap.constant(0, N.orbit.degree_bound, N.orbit.target, eval_poly(N.orbit, (0,) * N.orbit.arity))
        return Nilsequence(hom.src, orbit, N.fiber, replace(N.complexity, max_denominator=orbit.max_denominator()))
    gens = []
    r = N.orbit.arity
    for col in range(hom.src.rank):
        h = HPoint.identity(r, N.degree_bound, N.dim)
        for j, g in enumerate(N.orbit.generators):
            if M[j][col]:
                h = h_mul(h, h_pow(g, M[j][col]))
        gens.append(h)
    orbit = LinearOrbit(N.orbit.base, tuple(gens), hom.src.factors)
    return Nilsequence(hom.src, orbit, N.fiber, replace(N.complexity, max_denominator=orbit.max_denominator()))


def extend_split(N: Nilsequence, p: int) -> Nilsequence:
    """``(z, x) -> N(x)`` on ``Z_p + domain``."""
    domain = FinAbGroup((p,) + N.domain.factors)
    comp = replace(N.complexity, split_steps=N.complexity.split_steps + 1)
    if isinstance(N.orbit, PolyMap):
        return Nilsequence(domain, project_to_tail(N.orbit), N.fiber, comp)
    ident = HPoint.identity(N.orbit.arity, N.degree_bound, N.dim)
    orbit = LinearOrbit(N.orbit.base, (ident,) + N.orbit.generators, domain.factors)
    return Nilsequence(domain, orbit, N.fiber, comp)


def extend_nonsplit(N: Nilsequence, p: int, d: int) -> Nilsequence:
    """Extend from ``(p Z_{pd}) + K`` (first coordinate of order ``d``) to ``Z_{pd} + K``.

    The first generator ``h_1`` is replaced by its p-th root ``w_1 = h_1^{1/p}``
    on the one-parameter subgroup through it.
    """
    if not N.domain.rank or N.domain.factors[0] != d:
        raise ExtensionError(f"first domain factor must be {d}, got {N.domain.factors[:1]}")
    N = to_linear(N)
    h1 = N.orbit.generators[0]
    w1 = h_pow(h1, Fraction(1, p))
    if h_pow(w1, p) != h1:
        raise IdentityViolation("p-th root does not recover h_1")
    orbit = LinearOrbit(N.orbit.base, (w1,) + N.orbit.generators[1:], (p * d,) + N.domain.factors[1:])
    orbit.validate()
    domain = FinAbGroup(orbit.moduli)
    comp = replace(
        N.complexity,
        max_denominator=orbit.max_denominator(),
        nonsplit_steps=N.complexity.nonsplit_steps + 1,
    )
    if comp.max_denominator >= 2**63:
        raise DenominatorOverflow("denominator budget exceeded in non-split step")
    return Nilsequence(domain, orbit, N.fiber, comp)


@dataclass(frozen=True)
class ExtensionRecord:
    nilsequence: Nilsequence
    ladder: Ladder

    @property
    def steps(self) -> int:
        return self.ladder.length


def extend_along_ladder(N0: Nilsequence, ladder: Ladder) -> Nilsequence:
    """Fold split / non-split steps over a ladder, ending in ambient coordinates."""
    if N0.domain != ladder.base.sub:
        raise ExtensionError("nilsequence domain differs from the ladder base")
    index = ladder.base.index
    if 2**ladder.length > index:
        raise IdentityViolation("ladder longer than log2 of the index")
    if not ladder.steps:
        return transport(N0, ladder.final)
    N = to_linear(N0)
    for st in ladder.steps:
        N = transport(N, st.from_lower)
        N = extend_split(N, st.p) if st.kind == "split" else extend_nonsplit(N, st.p, st.d)
        if N.domain != st.upper:
            raise IdentityViolation("extended domain does not match the ladder rung")
    return transport(N, ladder.final)


def extend_to(N0: Nilsequence, emb: SubgroupEmbedding) -> tuple[Nilsequence, Ladder]:
    ladder = build_ladder(emb)
    return extend_along_ladder(N0, ladder), ladder


# ----------------------------------------------------------------------------
# translation and character twist


def translate(N: Nilsequence, t0: GroupElement) -> Nilsequence:
    """``x -> N(x - t0)``."""
    if t0.parent != N.domain:
        raise ExtensionError("translation by an element of another group")
    if isinstance(N.orbit, PolyMap):
        phi = taylor_shift(N.orbit, [-c for c in t0.coords])
        return Nilsequence(N.domain, phi, N.fiber, N.complexity)
    base = N.orbit.base
    for h, c in zip(N.orbit.generators, t0.coords):
        if c:
            base = h_mul(base, h_pow(h, -c))
    orbit = LinearOrbit(base, N.orbit.generators, N.orbit.moduli)
    return Nilsequence(N.domain, orbit, N.fiber, replace(N.complexity, max_denominator=orbit.max_denominator()))


def _append_component(p: PolyMap, const: Fraction) -> PolyMap:
    d = p.target.dim
    tgt = Target(p.target.kind, d + 1, p.target.modulus)
    coeffs = [(w, vec + (Fraction(0),)) for w, vec in p.coeffs]
    coeffs.append(((0,) * p.arity, (Fraction(0),) * d + (Fraction(const),)))
    return PolyMap(p.arity, p.degree_bound, tgt, coeffs)


def twist(N: Nilsequence, chi: Character) -> Nilsequence:
    """Product with a character: one extra torus coordinate carrying ``xi . x``."""
    if chi.parent != N.domain:
        raise ExtensionError("character of another group")
    fiber = FiberFunction(N.fiber.coeffs + (1,))
    steps = [Fraction(x, n) for x, n in zip(chi.xi, N.domain.factors)]
    if isinstance(N.orbit, PolyMap):
        phi = N.orbit
        d = phi.target.dim
        tgt = Target("T", d + 1)
        coeffs = [(w, vec + (Fraction(0),)) for w, vec in phi.coeffs]
        for i, s in enumerate(steps):
            w = tuple(int(j == i) for j in range(phi.arity))
            coeffs.append((w, (Fraction(0),) * d + (s,)))
        orbit = PolyMap(phi.arity, max(phi.degree_bound, 1), tgt, coeffs)
    else:
        base = HPoint(_append_component(N.orbit.base.poly, Fraction(0)), N.orbit.base.shift)
        gens = tuple(HPoint(_append_component(h.poly, s), h.shift) for h, s in zip(N.orbit.generators, steps))
        orbit = LinearOrbit(base, gens, N.orbit.moduli)
    comp = replace(N.complexity, d=N.complexity.d + 1)
    return Nilsequence(N.domain, orbit, fiber, comp)


# ----------------------------------------------------------------------------
# assembling a correlating nilsequence on the whole group


class PreconditionError(ValueError):
    def __init__(self, message: str, measured: float | None = None):
        super().__init__(message)
        self.measured = measured


def _character_phases(chi: Character, t0: GroupElement) -> np.ndarray:
    """Table of ``xi . (x - t0) / n`` (mod 1) as floats, row-major."""
    g = chi.parent
    if not g.rank:
        return np.zeros(())
    grids = np.meshgrid(*[np.arange(n) for n in g.factors], indexing="ij")
    acc = np.zeros(g.factors, dtype=np.int64)
    L = g.exponent
    for grid, xi, n, t in zip(grids, chi.xi, g.factors, t0.coords):
        acc = (acc + xi * (L // n) * (grid - t)) % L
    return acc / L


def assemble_full_nilsequence(f, emb: SubgroupEmbedding, t0: GroupElement, N0: Nilsequence, eps0: float, delta: float | None = None):
    """Correlating nilsequence on ``emb.amb`` from one on ``emb.sub``.

    Returns ``(N, report)`` where ``N(x) = N0ext(x - t0) chi(x - t0)`` for the
    annihilator character ``chi`` maximising ``|E f conj(N)|``.
    """
    from .gowers import CorrelationReport, GroupFunction, correlation, expectation, gowers_norm

    Z, Z0 = emb.amb, emb.sub
    if f.parent != Z or N0.domain != Z0 or t0.parent != Z:
        raise ExtensionError("inputs live on mismatched groups")
    sub_vals = []
    for y in Z0.elements():
        x = t0 + emb(y)
        sub_vals.append(f(x) * np.conj(N0(y)))
    measured = abs(expectation(sub_vals))
    if measured < eps0 - 1e-12:
        raise PreconditionError(f"subgroup correlation {measured:.12g} is below eps0 = {eps0:.12g}", measured)

    N, ladder = extend_to(N0, emb)
    base_vals = translate(N, t0).values()
    weighted = f.values * np.conj(base_vals)
    best, best_val = None, -1.0
    for chi in annihilator(emb):
        c = abs(expectation(weighted * np.exp(-2j * math.pi * _character_phases(chi, t0))))
        if c > best_val + 1e-12:
            best, best_val = chi, c
    final = translate(twist(N, best), t0)
    eps = abs(correlation(f, GroupFunction(Z, final.values())))
    bound = eps0 * Z0.order / Z.order
    if eps < bound - 1e-9:
        raise IdentityViolation(f"achieved correlation {eps} below {bound}")
    k = N0.degree_bound
    if delta is None:
        delta = gowers_norm(f, k + 1)
    report = CorrelationReport(
        delta=float(delta),
        epsilon=float(eps),
        k=k,
        complexity=final.complexity.to_json(),
        epsilon0=float(eps0),
        bound=float(bound),
        extra={
            "subgroup_correlation": float(measured),
            "character": list(best.xi),
            "ladder": ladder.summary(),
        },
    )
    return final, report
