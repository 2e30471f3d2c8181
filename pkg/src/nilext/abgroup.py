"""Finite abelian groups of bounded rank.

Groups are products of cyclic groups ``Z_{n_1} x ... x Z_{n_r}`` and every
isomorphism or embedding between them is an explicit integer matrix acting on
coordinate column vectors. Smith normal form does the structural work
(canonical forms, generated subgroups, kernels, preimages).
"""

from __future__ import annotations

import cmath
import itertools
import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import smith
from .smith import Matrix
from .torus import TorusPoint


class GroupError(ValueError):
    """Invalid group data or a mismatch between groups."""


def factorize(n: int) -> dict[int, int]:
    if n < 1:
        raise GroupError(f"cannot factor {n}")
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def is_prime(n: int) -> bool:
    return n >= 2 and factorize(n) == {n: 1}


def prime_factor_count(n: int) -> int:
    """Number of prime factors of ``n`` counted with multiplicity."""
    return sum(factorize(n).values())


@dataclass(frozen=True)
class FinAbGroup:
    """``Z_{n_1} x ... x Z_{n_r}``; the trivial group is ``factors == ()``."""

    factors: tuple[int, ...]

    def __post_init__(self):
        fs = tuple(int(n) for n in self.factors)
        if any(n < 1 for n in fs):
            raise GroupError(f"moduli must be >= 1, got {fs}")
        object.__setattr__(self, "factors", fs)

    @classmethod
    def of(cls, *factors: int) -> "FinAbGroup":
        return cls(tuple(factors))

    @property
    def rank(self) -> int:
        return len(self.factors)

    @property
    def order(self) -> int:
        return math.prod(self.factors)

    @property
    def exponent(self) -> int:
        return math.lcm(*self.factors) if self.factors else 1

    def element(self, coords: Sequence[int]) -> "GroupElement":
        return GroupElement(self, tuple(coords))

    def zero(self) -> "GroupElement":
        return GroupElement(self, (0,) * self.rank)

    def basis(self) -> list["GroupElement"]:
        return [self.element([int(i == j) for j in range(self.rank)]) for i in range(self.rank)]

    def elements(self) -> Iterator["GroupElement"]:
        """All elements in row-major order (last coordinate fastest)."""
        for c in itertools.product(*(range(n) for n in self.factors)):
            yield GroupElement(self, c, _reduced=True)

    def index_of(self, x: "GroupElement") -> int:
        i = 0
        for c, n in zip(x.coords, self.factors):
            i = i * n + c
        return i

    def reduce(self, v: Sequence[int]) -> tuple[int, ...]:
        if len(v) != self.rank:
            raise GroupError(f"expected {self.rank} coordinates, got {len(v)}")
        return tuple(int(c) % n for c, n in zip(v, self.factors))

    def canonical(self) -> "CanonicalDecomposition":
        return canonical_decomposition(list(self.factors))

    def to_json(self) -> dict:
        return {"factors": list(self.factors)}

    @classmethod
    def from_json(cls, obj: dict) -> "FinAbGroup":
        return cls(tuple(obj["factors"]))

    def __str__(self) -> str:
        return " x ".join(f"Z_{n}" for n in self.factors) or "0"


@dataclass(frozen=True)
class GroupElement:
    parent: FinAbGroup
    coords: tuple[int, ...]
    _reduced: bool = field(default=False, repr=False, compare=False)

    def __post_init__(self):
        if not self._reduced:
            object.__setattr__(self, "coords", self.parent.reduce(self.coords))

    def _check(self, other: "GroupElement") -> None:
        if other.parent != self.parent:
            raise GroupError(f"elements of different groups: {self.parent} vs {other.parent}")

    def __add__(self, other: "GroupElement") -> "GroupElement":
        self._check(other)
        return GroupElement(self.parent, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "GroupElement") -> "GroupElement":
        self._check(other)
        return GroupElement(self.parent, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "GroupElement":
        return GroupElement(self.parent, tuple(-a for a in self.coords))

    def __mul__(self, m: int) -> "GroupElement":
        return GroupElement(self.parent, tuple(m * a for a in self.coords))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.coords)

    def order(self) -> int:
        return math.lcm(*(n // math.gcd(n, c) for c, n in zip(self.coords, self.parent.factors))) if self.coords else 1


# ----------------------------------------------------------------------------
# homomorphisms


def _check_hom_matrix(src: FinAbGroup, dst: FinAbGroup, matrix: Matrix) -> Matrix:
    if len(matrix) != dst.rank or any(len(row) != src.rank for row in matrix):
        raise GroupError(f"matrix shape does not match {src} -> {dst}")
    mat = [[int(x) % n for x in row] for row, n in zip(matrix, dst.factors)]
    for j, nj in enumerate(src.factors):
        for i, ni in enumerate(dst.factors):
            if (nj * mat[i][j]) % ni:
                raise GroupError(f"generator {j} of order {nj} maps to an element of coordinate order not dividing it")
    return mat


@dataclass(frozen=True)
class Homomorphism:
    """Group homomorphism ``src -> dst`` given by an integer matrix."""

    src: FinAbGroup
    dst: FinAbGroup
    matrix: tuple[tuple[int, ...], ...]

    def __init__(self, src: FinAbGroup, dst: FinAbGroup, matrix: Matrix):
        mat = _check_hom_matrix(src, dst, [list(r) for r in matrix])
        object.__setattr__(self, "src", src)
        object.__setattr__(self, "dst", dst)
        object.__setattr__(self, "matrix", tuple(tuple(r) for r in mat))

    def as_lists(self) -> Matrix:
        return [list(r) for r in self.matrix]

    def __call__(self, x: GroupElement) -> GroupElement:
        if x.parent != self.src:
            raise GroupError(f"element of {x.parent} given to map from {self.src}")
        return self.dst.element(smith.matvec(self.as_lists(), list(x.coords)))

    def compose(self, inner: "Homomorphism") -> "Homomorphism":
        """``self o inner``."""
        if inner.dst != self.src:
            raise GroupError("cannot compose: codomain/domain mismatch")
        if not inner.src.rank:
            return Homomorphism(inner.src, self.dst, [[] for _ in range(self.dst.rank)])
        if not self.src.rank:
            return Homomorphism(inner.src, self.dst, smith.zeros(self.dst.rank, inner.src.rank))
        return Homomorphism(inner.src, self.dst, smith.matmul(self.as_lists(), inner.as_lists()))

    def is_injective(self) -> bool:
        return kernel(self).sub.order == 1

    def to_json(self) -> dict:
        return {"src": self.src.to_json(), "dst": self.dst.to_json(), "matrix": self.as_lists()}

    @classmethod
    def identity(cls, g: FinAbGroup) -> "Homomorphism":
        return cls(g, g, smith.identity(g.rank))


@dataclass(frozen=True)
class SubgroupEmbedding:
    """Injective homomorphism ``sub -> amb``; its image is the subgroup."""

    sub: FinAbGroup
    amb: FinAbGroup
    map: Homomorphism

    def __init__(self, sub: FinAbGroup, amb: FinAbGroup, matrix: Matrix | Homomorphism, check: bool = True):
        hom = matrix if isinstance(matrix, Homomorphism) else Homomorphism(sub, amb, matrix)
        if hom.src != sub or hom.dst != amb:
            raise GroupError("homomorphism does not match sub/amb")
        if check and not hom.is_injective():
            raise GroupError("embedding matrix is not injective")
        object.__setattr__(self, "sub", sub)
        object.__setattr__(self, "amb", amb)
        object.__setattr__(self, "map", hom)

    @property
    def matrix(self) -> Matrix:
        return self.map.as_lists()

    @property
    def index(self) -> int:
        return self.amb.order // self.sub.order

    def __call__(self, x: GroupElement) -> GroupElement:
        return self.map(x)

    def image(self) -> list[GroupElement]:
        return [self.map(x) for x in self.sub.elements()]

    def contains(self, x: GroupElement) -> bool:
        return preimage(self.map, x) is not None

    def preimage(self, x: GroupElement) -> GroupElement:
        y = preimage(self.map, x)
        if y is None:
            raise GroupError(f"{x.coords} is not in the subgroup")
        return y

    def to_json(self) -> dict:
        return {"sub": self.sub.to_json(), "amb": self.amb.to_json(), "matrix": self.matrix}

    @classmethod
    def from_json(cls, obj: dict) -> "SubgroupEmbedding":
        return cls(FinAbGroup.from_json(obj["sub"]), FinAbGroup.from_json(obj["amb"]), obj["matrix"])


def preimage(hom: Homomorphism, x: GroupElement) -> GroupElement | None:
    """Some ``y`` with ``hom(y) == x``, or ``None`` if ``x`` is not in the image."""
    if x.parent != hom.dst:
        raise GroupError("element not in codomain")
    src, dst = hom.src, hom.dst
    if dst.rank == 0:
        return src.zero()
    a = [list(row) + [dst.factors[i] * int(i == j) for j in range(dst.rank)] for i, row in enumerate(hom.matrix)]
    sol = smith.solve_integer(a, list(x.coords))
    if sol is None:
        return None
    return src.element(sol[: src.rank])


# ----------------------------------------------------------------------------
# canonical forms


@dataclass(frozen=True)
class CanonicalDecomposition:
    """Invariant-factor form of a presented group with both coordinate changes.

    ``to_canonical`` (s x n) sends generator coordinates to canonical ones;
    ``from_canonical`` (n x s) sends canonical coordinates back.
    """

    group: FinAbGroup
    primary: dict[int, list[int]]
    to_canonical: Matrix
    from_canonical: Matrix
    source: FinAbGroup | None = None

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        return self.group.factors

    def iso_to(self) -> Homomorphism:
        if self.source is None:
            raise GroupError("presentation has no finite source group")
        return Homomorphism(self.source, self.group, self.to_canonical)

    def iso_from(self) -> Homomorphism:
        if self.source is None:
            raise GroupError("presentation has no finite source group")
        return Homomorphism(self.group, self.source, self.from_canonical)


def _decompose_relations(rows: Matrix, ngens: int) -> tuple[list[int], Matrix, Matrix]:
    """Z^ngens / (row lattice) -> invariant factors and coordinate changes."""
    if ngens == 0:
        return [], [], []
    if not rows:
        raise GroupError("no relations: infinite group")
    cols = smith.transpose(rows)  # ngens x m, lattice = column span
    sf = smith.smith_form(cols)
    diag = sf.diagonal + [0] * (ngens - len(sf.diagonal))
    if any(d == 0 for d in diag):
        raise GroupError("relations do not have full rank: infinite group")
    keep = [i for i, d in enumerate(diag) if d > 1]
    to_c = [list(sf.U[i]) for i in keep]
    from_c = [[sf.Uinv[r][i] for i in keep] for r in range(ngens)]
    return [diag[i] for i in keep], to_c, from_c


def canonical_decomposition(relations: Sequence[int] | Matrix, ngens: int | None = None) -> CanonicalDecomposition:
    """Canonical form of a finite abelian group.

    ``relations`` is either a list of cyclic moduli or an integer matrix whose
    rows are relations among ``ngens`` generators.
    """
    if not len(relations) or not isinstance(relations[0], (list, tuple)):
        factors = [int(n) for n in relations]
        if any(n <= 0 for n in factors):
            raise GroupError(f"moduli must be positive, got {factors}")
        rows = [[n * int(i == j) for j in range(len(factors))] for i, n in enumerate(factors)]
        source: FinAbGroup | None = FinAbGroup(tuple(factors))
        ngens = len(factors)
    else:
        rows = [list(map(int, r)) for r in relations]
        if ngens is None:
            ngens = len(rows[0]) if rows else 0
        source = None
    invs, to_c, from_c = _decompose_relations(rows, ngens)
    primary: dict[int, list[int]] = {}
    for d in invs:
        for p, e in factorize(d).items():
            primary.setdefault(p, []).append(e)
    primary = {p: sorted(es) for p, es in sorted(primary.items())}
    return CanonicalDecomposition(FinAbGroup(tuple(invs)), primary, to_c, from_c, source)


def primary_form(g: FinAbGroup) -> tuple[FinAbGroup, Homomorphism, Homomorphism]:
    """Prime-power decomposition of ``g`` with isomorphisms both ways.

    Factors are sorted by prime, then by exponent.
    """
    canon = g.canonical()
    slots = []  # (p, e, canonical index)
    for idx, d in enumerate(canon.group.factors):
        for p, e in factorize(d).items():
            slots.append((p, e, idx))
    slots.sort()
    target = FinAbGroup(tuple(p**e for p, e, _ in slots))
    s = canon.group.rank
    split = [[int(idx == j) for j in range(s)] for _, _, idx in slots]
    merge = smith.zeros(s, len(slots))
    for col, (p, e, idx) in enumerate(slots):
        d = canon.group.factors[idx]
        q = p**e
        rest = d // q
        merge[idx][col] = rest * pow(rest, -1, q) if q > 1 else 0
    to_prim = Homomorphism(canon.group, target, split).compose(canon.iso_to())
    from_prim = canon.iso_from().compose(Homomorphism(target, canon.group, merge))
    return target, to_prim, from_prim


def subgroup_from_generators(amb: FinAbGroup, gens: Sequence[GroupElement]) -> SubgroupEmbedding:
    """The subgroup generated by ``gens``, in canonical form, embedded in ``amb``."""
    for g in gens:
        if g.parent != amb:
            raise GroupError("generator not in ambient group")
    ngen = len(gens)
    if ngen == 0 or amb.rank == 0:
        triv = FinAbGroup(())
        return SubgroupEmbedding(triv, amb, smith.zeros(amb.rank, 0) if amb.rank else [], check=False)
    gm = [[g.coords[i] for g in gens] for i in range(amb.rank)]
    # relations on generator coefficients: c with gm c in diag(n) Z^r
    big = [gm[i] + [amb.factors[i] * int(i == j) for j in range(amb.rank)] for i in range(amb.rank)]
    ker = smith.kernel_basis(big)
    rel_rows = [v[:ngen] for v in ker]
    invs, _, from_c = _decompose_relations(rel_rows, ngen)
    sub = FinAbGroup(tuple(invs))
    if not invs:
        return SubgroupEmbedding(sub, amb, [[] for _ in range(amb.rank)], check=False)
    mat = smith.matmul(gm, from_c)
    return SubgroupEmbedding(sub, amb, mat, check=False)


def kernel(hom: Homomorphism) -> SubgroupEmbedding:
    """Kernel of ``hom`` as a subgroup of its source."""
    src, dst = hom.src, hom.dst
    if src.rank == 0:
        return subgroup_from_generators(src, [])
    if dst.rank == 0:
        return subgroup_from_generators(src, src.basis())
    big = [list(row) + [dst.factors[i] * int(i == j) for j in range(dst.rank)] for i, row in enumerate(hom.matrix)]
    ker = smith.kernel_basis(big)
    gens = [src.element(v[: src.rank]) for v in ker]
    return subgroup_from_generators(src, gens)


# ----------------------------------------------------------------------------
# characters


@dataclass(frozen=True)
class Character:
    """``x -> sum_i xi_i x_i / n_i  (mod 1)``."""

    parent: FinAbGroup
    xi: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "xi", self.parent.reduce(self.xi))

    def __call__(self, x: GroupElement) -> TorusPoint:
        return eval_character(self, x)

    def is_trivial(self) -> bool:
        return not any(self.xi)


def eval_character(chi: Character, x: GroupElement) -> TorusPoint:
    if x.parent != chi.parent:
        raise GroupError(f"character of {chi.parent} evaluated on element of {x.parent}")
    return TorusPoint(sum((Fraction(a * b, n) for a, b, n in zip(chi.xi, x.coords, chi.parent.factors)), Fraction(0)))


def annihilator(emb: SubgroupEmbedding) -> list[Character]:
    """All characters of ``emb.amb`` trivial on the image of ``emb``."""
    amb, sub = emb.amb, emb.sub
    if amb.rank == 0:
        return [Character(amb, ())]
    L = amb.exponent
    m = emb.matrix
    # xi -> (sum_i xi_i M_ij L/n_i mod L)_j  must vanish
    psi = [[m[i][j] * (L // amb.factors[i]) for i in range(amb.rank)] for j in range(sub.rank)]
    target = FinAbGroup((L,) * sub.rank)
    ann = kernel(Homomorphism(amb, target, psi))
    return [Character(amb, y.coords) for y in ann.image()]


def _mobius(n: int) -> int:
    f = factorize(n)
    return 0 if any(e > 1 for e in f.values()) else (-1) ** len(f)


@lru_cache(maxsize=256)
def _cyclotomic(n: int) -> tuple[int, ...]:
    """Coefficients (low degree first) of Phi_n = prod_{d | n} (z^d - 1)^mu(n/d)."""
    poly = [1]
    divisors = [d for d in range(1, n + 1) if n % d == 0]
    for d in divisors:
        if _mobius(n // d) == 1:
            # multiply by z^d - 1
            out = [0] * (len(poly) + d)
            for i, c in enumerate(poly):
                out[i] -= c
                out[i + d] += c
            poly = out
    for d in divisors:
        if _mobius(n // d) == -1:
            # exact division by z^d - 1: a_i = q_{i-d} - q_i
            q = [0] * (len(poly) - d)
            for i in range(len(q)):
                q[i] = (q[i - d] if i >= d else 0) - poly[i]
            poly = q
    return tuple(poly)


def _reduce_mod_cyclotomic(residues: Sequence[int], N: int) -> list[int]:
    """``sum_j zeta_N^{r_j}`` reduced modulo ``Phi_N`` (low degree first, trimmed)."""
    acc = np.zeros(N, dtype=np.int64)
    np.add.at(acc, np.asarray(residues, dtype=np.int64) % N, 1)
    phi = np.array(_cyclotomic(N), dtype=np.int64)
    deg = len(phi) - 1
    for i in range(N - 1, deg - 1, -1):
        c = acc[i]
        if c:
            acc[i - deg : i + 1] -= c * phi
    nz = np.flatnonzero(acc[:deg])
    rem = acc[: nz[-1] + 1] if len(nz) else acc[:0]
    # int64 guard: the reduced form must still evaluate to the float sum
    zeta = np.exp(2j * np.pi * np.arange(N) / N)
    approx = complex(np.sum(zeta[np.asarray(residues, dtype=np.int64) % N])) if len(residues) else 0j
    value = complex(np.dot(rem, zeta[: len(rem)]))
    if abs(value - approx) > 1e-6 * (1 + len(residues)):
        raise ArithmeticError("cyclotomic reduction overflowed")
    return [int(a) for a in rem]


def exact_root_of_unity_sum(points: Sequence[TorusPoint]) -> list[int]:
    """``sum_j e(q_j)`` exactly, as integer coefficients in Z[zeta_N]/Phi_N.

    ``N`` is the lcm of the denominators. Returns the reduced coefficient
    vector; a rational sum ``c`` comes back as ``[c]`` (or ``[]`` for 0).
    """
    N = math.lcm(*(p.value.denominator for p in points)) if points else 1
    return _reduce_mod_cyclotomic([(p.value * N).numerator % N for p in points], N)


def indicator_via_annihilator(emb: SubgroupEmbedding, x: GroupElement, ann: list[Character] | None = None) -> Fraction:
    """``E_{chi in ann} chi(x)`` computed exactly; equals ``1_{image}(x)``."""
    ann = annihilator(emb) if ann is None else ann
    amb = emb.amb
    if x.parent != amb:
        raise GroupError("point is not in the ambient group")
    L = amb.exponent
    weights = np.array([c * (L // n) for c, n in zip(x.coords, amb.factors)], dtype=np.int64)
    xi = np.array([chi.xi for chi in ann], dtype=np.int64).reshape(len(ann), amb.rank)
    residues = (xi % L) @ weights % L
    rem = _reduce_mod_cyclotomic(residues, L)
    if len(rem) > 1:
        raise ArithmeticError("character average is not rational")
    return Fraction(rem[0] if rem else 0, len(ann))


# ----------------------------------------------------------------------------
# ladders


@dataclass(frozen=True)
class LadderStep:
    """One index-p extension ``lower <= upper``.

    ``kind`` is ``"split"`` (upper = Z_p + lower, embedding [0; I]) or
    ``"nonsplit"`` (lower = Z_d + K inside upper = Z_{pd} + K, embedding
    diag(p, 1, ..., 1)). ``to_lower``/``from_lower`` re-express the previous
    rung's coordinates in this step's basis of ``lower``; ``inclusion`` maps
    ``upper`` into the ambient group.
    """

    kind: str
    p: int
    d: int | None
    pivot: int
    embedding: SubgroupEmbedding
    to_lower: Homomorphism
    from_lower: Homomorphism
    inclusion: Homomorphism

    @property
    def lower(self) -> FinAbGroup:
        return self.embedding.sub

    @property
    def upper(self) -> FinAbGroup:
        return self.embedding.amb


@dataclass(frozen=True)
class Ladder:
    base: SubgroupEmbedding
    steps: tuple[LadderStep, ...]
    final: Homomorphism  # amb -> last rung's coordinates

    @property
    def length(self) -> int:
        return len(self.steps)

    @property
    def top(self) -> FinAbGroup:
        return self.steps[-1].upper if self.steps else self.base.sub

    def composed(self) -> Homomorphism:
        """Composite of all rungs as a map ``base.sub -> base.amb``."""
        h = Homomorphism.identity(self.base.sub)
        for st in self.steps:
            h = st.embedding.map.compose(st.to_lower.compose(h))
        top_incl = self.steps[-1].inclusion if self.steps else self.base.map
        return top_incl.compose(h)

    def summary(self) -> list[dict]:
        return [
            {"kind": s.kind, "p": s.p, "d": s.d, "lower": list(s.lower.factors), "upper": list(s.upper.factors)}
            for s in self.steps
        ]


def _quotient_step(amb: FinAbGroup, gens: list[GroupElement]) -> tuple[int, GroupElement] | None:
    """Next (prime, element) to adjoin; None when ``gens`` generate ``amb``."""
    rows = [[n * int(i == j) for j in range(amb.rank)] for i, n in enumerate(amb.factors)]
    rows += [list(g.coords) for g in gens]
    if amb.rank == 0:
        return None
    canon = canonical_decomposition(rows, amb.rank)
    if canon.group.order == 1:
        return None
    best = None
    for idx, q in enumerate(canon.group.factors):
        for p, e in factorize(q).items():
            key = (p, e, idx)
            if best is None or key < best:
                best = key
    p, e, idx = best
    q = canon.group.factors[idx]
    # element of order p in the cyclic factor idx, lifted to amb
    y = [0] * canon.group.rank
    y[idx] = q // p
    lift = smith.matvec(canon.from_canonical, y)
    return p, amb.element(lift)


def build_ladder(emb: SubgroupEmbedding) -> Ladder:
    """Chain ``Z_0 = sub <= Z_1 <= ... <= Z_t = amb`` of index-p steps.

    The adjoined element at each step comes from the quotient's primary
    decomposition: smallest prime first, and within a prime the cyclic
    quotient factor of smallest exponent first.
    """
    amb = emb.amb
    gens = [emb.map(b) for b in emb.sub.basis()]
    prev_incl = emb.map  # previous rung coordinates -> amb
    steps: list[LadderStep] = []
    while True:
        nxt = _quotient_step(amb, gens)
        if nxt is None:
            break
        p, y = nxt
        gens = gens + [y]
        upper_emb = subgroup_from_generators(amb, gens)
        prim, to_prim, from_prim = primary_form(upper_emb.sub)
        upper_incl = upper_emb.map.compose(from_prim)  # prim coords -> amb
        # character of prim trivial exactly on the previous rung
        lower_in_prim = [
            preimage(upper_incl, prev_incl(b)) for b in prev_incl.src.basis()
        ]
        ann = annihilator(SubgroupEmbedding(
            prev_incl.src, prim,
            [[v.coords[i] for v in lower_in_prim] for i in range(prim.rank)] if lower_in_prim else [[] for _ in range(prim.rank)],
            check=False,
        ))
        chi = next(c for c in ann if not c.is_trivial())
        vals = [(chi.xi[l] * p // prim.factors[l]) % p if prim.factors[l] % p == 0 else 0 for l in range(prim.rank)]
        cand = [l for l in range(prim.rank) if vals[l]]
        j = min(cand, key=lambda l: (prim.factors[l], l))
        inv = pow(vals[j], -1, p)
        # new basis of prim: e_j, and e_l - c_l e_j for l != j
        new_basis = []
        for l in range(prim.rank):
            v = [int(t == l) for t in range(prim.rank)]
            if l != j and vals[l]:
                v[j] = -(vals[l] * inv) % prim.factors[j]
            new_basis.append(v)
        others = [l for l in range(prim.rank) if l != j]
        order_j = prim.factors[j]
        upper_group = FinAbGroup((order_j,) + tuple(prim.factors[l] for l in others))
        cols = [new_basis[j]] + [new_basis[l] for l in others]
        basis_to_prim = Homomorphism(upper_group, prim, [[c[i] for c in cols] for i in range(prim.rank)])
        inclusion = upper_incl.compose(basis_to_prim)
        if order_j == p:
            kind, d = "split", None
            lower_group = FinAbGroup(tuple(prim.factors[l] for l in others))
            step_mat = [[0] * lower_group.rank] + [[int(a == b) for b in range(lower_group.rank)] for a in range(lower_group.rank)]
        else:
            kind, d = "nonsplit", order_j // p
            lower_group = FinAbGroup((d,) + tuple(prim.factors[l] for l in others))
            step_mat = [[(p if a == 0 else 1) * int(a == b) for b in range(lower_group.rank)] for a in range(upper_group.rank)]
        step_emb = SubgroupEmbedding(lower_group, upper_group, step_mat, check=False)
        lower_incl = inclusion.compose(step_emb.map)
        from_lower = Homomorphism(
            lower_group, prev_incl.src,
            _columns([preimage(prev_incl, lower_incl(b)) for b in lower_group.basis()], prev_incl.src.rank),
        )
        to_lower = Homomorphism(
            prev_incl.src, lower_group,
            _columns([preimage(lower_incl, prev_incl(b)) for b in prev_incl.src.basis()], lower_group.rank),
        )
        steps.append(LadderStep(kind, p, d, j, step_emb, to_lower, from_lower, inclusion))
        prev_incl = inclusion
    final = Homomorphism(
        amb, prev_incl.src,
        _columns([preimage(prev_incl, b) for b in amb.basis()], prev_incl.src.rank),
    )
    return Ladder(emb, tuple(steps), final)


def _columns(vecs: list[GroupElement | None], nrows: int) -> Matrix:
    if any(v is None for v in vecs):
        raise GroupError("basis element outside the expected subgroup")
    return [[v.coords[i] for v in vecs] for i in range(nrows)]
