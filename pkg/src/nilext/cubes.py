"""Host-Kra cubes of the degree-k group nilspace D_k(Z_m).

A map ``c: {0,1}^n -> Z_m`` is a cube of ``D_k(Z_m)`` iff every
(k+1)-dimensional face has vanishing alternating sum; equivalently
``c(v) = sum_{S <= supp(v), |S| <= k} a_S`` for free parameters ``a_S``.
Vertices ``v`` are encoded as integers with little-endian bits.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass

from .gowers import BudgetExceeded

DEFAULT_BUDGET = 10**6


class InvalidCorner(ValueError):
    pass


def popcount(v: int) -> int:
    return bin(v).count("1")


@dataclass(frozen=True)
class CubeMap:
    n: int
    m: int
    values: tuple[int, ...]

    def __post_init__(self):
        if len(self.values) != 2**self.n:
            raise ValueError(f"a {self.n}-cube needs {2 ** self.n} values, got {len(self.values)}")
        object.__setattr__(self, "values", tuple(int(x) % self.m for x in self.values))

    def __getitem__(self, v: int) -> int:
        return self.values[v]

    def to_json(self) -> dict:
        return {"n": self.n, "m": self.m, "values": list(self.values)}

    @classmethod
    def from_json(cls, obj: dict) -> "CubeMap":
        return cls(int(obj["n"]), int(obj["m"]), tuple(obj["values"]))


@dataclass(frozen=True)
class Corner:
    """Values on every vertex except ``1^n`` (index ``2^n - 1``)."""

    n: int
    m: int
    values: tuple[int, ...]

    def __post_init__(self):
        if len(self.values) != 2**self.n - 1:
            raise ValueError(f"an {self.n}-corner needs {2 ** self.n - 1} values")
        object.__setattr__(self, "values", tuple(int(x) % self.m for x in self.values))

    @classmethod
    def of_cube(cls, c: CubeMap) -> "Corner":
        return cls(c.n, c.m, c.values[:-1])


def faces(n: int, dim: int) -> Iterator[list[int]]:
    """Vertex lists (in sign order) of all ``dim``-faces of ``{0,1}^n``."""
    for free in itertools.combinations(range(n), dim):
        fixed = [i for i in range(n) if i not in free]
        for bits in itertools.product((0, 1), repeat=len(fixed)):
            base = sum(b << i for b, i in zip(bits, fixed))
            yield [base + sum(1 << free[j] for j in range(dim) if (u >> j) & 1) for u in range(2**dim)]


def _face_sum(c: Sequence[int], verts: list[int], m: int) -> int:
    return sum(-c[v] if popcount(u) % 2 else c[v] for u, v in enumerate(verts)) % m


def is_cube(c: CubeMap, k: int) -> bool:
    """Membership in ``C^n(D_k(Z_m))`` via (k+1)-face alternating sums."""
    if c.n <= k:
        return True
    return all(_face_sum(c.values, verts, c.m) == 0 for verts in faces(c.n, k + 1))


def parameter_sets(n: int, k: int) -> list[tuple[int, ...]]:
    """Subsets ``S`` of ``[n]`` with ``|S| <= k`` in graded-lex order."""
    return [s for j in range(min(k, n) + 1) for s in itertools.combinations(range(n), j)]


def cube_from_parameters(n: int, m: int, k: int, params: Sequence[int]) -> CubeMap:
    sets = parameter_sets(n, k)
    masks = [sum(1 << i for i in s) for s in sets]
    vals = [sum(a for a, mask in zip(params, masks) if mask & v == mask) for v in range(2**n)]
    return CubeMap(n, m, tuple(vals))


def cube_count(m: int, k: int, n: int) -> int:
    return m ** sum(math.comb(n, j) for j in range(min(k, n) + 1))


def enumerate_cubes(m: int, k: int, n: int, budget: int = DEFAULT_BUDGET) -> tuple[int, Iterator[CubeMap]]:
    """Number of cubes and an iterator over them (free-parameter enumeration)."""
    count = cube_count(m, k, n)
    if count > budget:
        raise BudgetExceeded(f"{count} cubes exceed budget {budget}")
    nparams = len(parameter_sets(n, k))

    def gen():
        for params in itertools.product(range(m), repeat=nparams):
            yield cube_from_parameters(n, m, k, params)

    return count, gen()


def brute_force_cube_count(m: int, k: int, n: int, budget: int = DEFAULT_BUDGET) -> int:
    """Filter all ``m^(2^n)`` maps through ``is_cube``."""
    total = m ** (2**n)
    if total > budget:
        raise BudgetExceeded(f"{total} maps exceed budget {budget}")
    return sum(is_cube(CubeMap(n, m, vals), k) for vals in itertools.product(range(m), repeat=2**n))


def gray_code(c: CubeMap, k: int) -> int:
    """``sum_v (-1)^(k - |v|) c(v)`` for a k-dimensional cube."""
    if c.n != k:
        raise ValueError(f"Gray code map needs a {k}-cube, got dimension {c.n}")
    return sum(c.values[v] if (k - popcount(v)) % 2 == 0 else -c.values[v] for v in range(2**k)) % c.m


def restrict_to_face(c: CubeMap, coords: Sequence[int]) -> CubeMap:
    """``c o phi`` where ``phi`` embeds ``{0,1}^len(coords)`` on the given coordinates at 0."""
    vals = [c.values[sum(1 << coords[j] for j in range(len(coords)) if (u >> j) & 1)] for u in range(2 ** len(coords))]
    return CubeMap(len(coords), c.m, tuple(vals))


def complete_corner(corner: Corner, k: int) -> CubeMap:
    """Completion of a corner; unique for ``n >= k + 1``.

    For ``n <= k`` every completion is a cube; the canonical one sets the top
    free parameter to 0.
    """
    n, m = corner.n, corner.m
    full = corner.values + (0,)
    for i in range(n):
        face = [v for v in range(2**n) if not (v >> i) & 1]
        sub = CubeMap(n - 1, m, tuple(full[v] for v in face))
        if not is_cube(sub, k):
            raise InvalidCorner(f"lower face x_{i} = 0 is not a cube")
    params = []
    for s in parameter_sets(n, k):
        mask = sum(1 << i for i in s)
        if mask == 2**n - 1:
            params.append(0)
            continue
        a = 0
        for j in range(len(s) + 1):
            for t in itertools.combinations(s, j):
                sign = -1 if (len(s) - j) % 2 else 1
                a += sign * full[sum(1 << i for i in t)]
        params.append(a)
    out = cube_from_parameters(n, m, k, params)
    if out.values[:-1] != corner.values:
        raise InvalidCorner("corner is not the restriction of a cube")
    return out


def count_completions(corner: Corner, k: int) -> int:
    full = list(corner.values) + [0]
    hits = 0
    for x in range(corner.m):
        full[-1] = x
        hits += is_cube(CubeMap(corner.n, corner.m, tuple(full)), k)
    return hits


def signature_image_count(m: int, k: int, n: int, budget: int = DEFAULT_BUDGET) -> int:
    """Distinct tuples ``(gray_code(c o phi_F))_F`` over cubes ``c``.

    ``F`` runs over the ``binom(n, k)`` lower k-faces through ``0^n``.
    """
    if n < k:
        return 1
    lower = list(itertools.combinations(range(n), k))
    _, cubes = enumerate_cubes(m, k, n, budget)
    seen = set()
    for c in cubes:
        seen.add(tuple(gray_code(restrict_to_face(c, F), k) for F in lower))
    return len(seen)


# ----------------------------------------------------------------------------
# discrete cube morphisms and the generator definition


def cube_morphism(n: int, spec: Sequence[tuple[str, int]]):
    """Map ``{0,1}^m -> {0,1}^n``; each output coordinate is one of
    ``("const", b)``, ``("id", j)`` or ``("flip", j)``."""
    if len(spec) != n:
        raise ValueError("one rule per output coordinate")

    def phi(u: int) -> int:
        out = 0
        for i, (kind, j) in enumerate(spec):
            if kind == "const":
                bit = j
            elif kind == "id":
                bit = (u >> j) & 1
            else:
                bit = 1 - ((u >> j) & 1)
            out |= bit << i
        return out

    return phi


def compose(c: CubeMap, phi, m_dim: int) -> CubeMap:
    return CubeMap(m_dim, c.m, tuple(c.values[phi(u)] for u in range(2**m_dim)))


def host_kra_cube_group(m: int, k: int, n: int, budget: int = DEFAULT_BUDGET) -> set[tuple[int, ...]]:
    """Subgroup of ``Z_m^(2^n)`` generated by face cubes ``g^F`` with codim(F) <= k."""
    gens = []
    for j in range(min(k, n) + 1):
        for fixed in itertools.combinations(range(n), j):
            mask = sum(1 << i for i in fixed)
            gens.append(tuple(1 if v & mask == mask else 0 for v in range(2**n)))
    group = {(0,) * 2**n}
    frontier = list(group)
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = tuple((a + b) % m for a, b in zip(x, g))
                if y not in group:
                    group.add(y)
                    nxt.append(y)
                    if len(group) > budget:
                        raise BudgetExceeded("cube group larger than budget")
        frontier = nxt
    return group
