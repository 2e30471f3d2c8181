import json
import random
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nilext.abgroup import FinAbGroup, SubgroupEmbedding, annihilator
from nilext.gowers import GroupFunction
from nilext.liftext import (
    OUTSIDE,
    ExtensionError,
    HPoint,
    LinearOrbit,
    Nilsequence,
    PreconditionError,
    assemble_full_nilsequence,
    commutator,
    extend_nonsplit,
    extend_split,
    extend_to,
    filtration_level_ok,
    h_inv,
    h_mul,
    h_pow,
    linearize,
    orbit_eval,
    polynomial_nilsequence,
    to_linear,
    translate,
    twist,
)
from nilext.polymap import Q1, T1, PolyMap, eval_poly, nonext_instance, random_periodic_polymap
from nilext.sampling import random_embedding, random_group, random_hpoint

seeds = st.integers(0, 10_000)


@given(seeds)
def test_group_axioms(seed):
    rng = random.Random(seed)
    r, k = rng.randint(1, 2), rng.randint(1, 3)
    a, b, c = (random_hpoint(rng, r, k) for _ in range(3))
    assert h_mul(h_mul(a, b), c) == h_mul(a, h_mul(b, c))
    assert h_mul(a, h_inv(a)).is_identity()
    assert h_mul(h_inv(a), a).is_identity()


@given(seeds)
def test_powers(seed):
    rng = random.Random(seed)
    a = random_hpoint(rng, rng.randint(1, 2), rng.randint(1, 3))
    acc = HPoint.identity(a.arity, a.poly.degree_bound, a.dim)
    for n in range(4):
        assert h_pow(a, n) == acc
        acc = h_mul(acc, a)
    s, t = F(rng.randint(-6, 6), rng.randint(1, 5)), F(rng.randint(-6, 6), rng.randint(1, 5))
    assert h_mul(h_pow(a, s), h_pow(a, t)) == h_pow(a, s + t)
    assert h_pow(a, -1) == h_inv(a)
    p = rng.choice([2, 3, 5])
    assert h_pow(h_pow(a, F(1, p)), p) == a


@given(seeds)
def test_commutator_filtration(seed):
    rng = random.Random(seed)
    k, r = rng.randint(1, 3), rng.randint(1, 3)
    i, j = rng.randint(1, k + 1), rng.randint(1, k + 1)
    a, b = random_hpoint(rng, r, k, level=i), random_hpoint(rng, r, k, level=j)
    assert filtration_level_ok(commutator(a, b), i + j, k)


def test_filtration_rejects_wrong_level():
    a = HPoint(PolyMap(1, 2, Q1, {(2,): 1}), (F(0),))
    b = HPoint.pure_shift([1], 2, 1)
    c = commutator(a, b)
    assert filtration_level_ok(c, 2, 2)
    assert not filtration_level_ok(c, 3, 2)


def test_orbit_eval_outside():
    phi = PolyMap(1, 1, T1, {(1,): F(1, 4)})
    orbit = linearize(phi, [4])
    half = LinearOrbit(orbit.base, (h_pow(orbit.generators[0], F(1, 2)),), (8,))
    assert orbit_eval(half, [1]) is OUTSIDE
    assert orbit_eval(half, [2]) == eval_poly(phi, [1])


@given(seeds)
def test_linearize_bit_exact(seed):
    rng = random.Random(seed)
    moduli = [rng.randint(1, 8) for _ in range(rng.randint(1, 2))]
    phi = random_periodic_polymap(rng, moduli, rng.randint(1, 3))
    orbit = linearize(phi, moduli)
    for x in FinAbGroup(tuple(moduli)).elements():
        assert orbit_eval(orbit, x.coords) == eval_poly(phi, x.coords)


def test_linearize_rejects_non_periodic():
    with pytest.raises(ExtensionError):
        linearize(PolyMap(1, 1, T1, {(1,): F(1, 4)}), [2])


@pytest.mark.parametrize("p", [2, 3, 5])
def test_nonext_extends_in_linear_form(p):
    g, emb = nonext_instance(p)
    N0 = polynomial_nilsequence(emb.sub, g)
    N, ladder = extend_to(N0, emb)
    assert ladder.length == 1 and ladder.steps[0].kind == "nonsplit"
    for y in emb.sub.elements():
        assert N.phase(emb(y)) == N0.phase(y)
    assert N.check_periodic()


def test_split_extension_ignores_new_coordinate():
    phi = PolyMap(1, 2, T1, {(2,): F(1, 3)})
    N0 = polynomial_nilsequence(FinAbGroup((3,)), phi)
    for base in (N0, to_linear(N0)):
        N = extend_split(base, 2)
        for z in range(2):
            for x in range(3):
                assert N.phase((z, x)) == N0.phase((x,))


def test_nonsplit_requires_matching_factor():
    N0 = polynomial_nilsequence(FinAbGroup((3,)), PolyMap(1, 1, T1, {(1,): F(1, 3)}))
    with pytest.raises(ExtensionError):
        extend_nonsplit(N0, 2, 5)


@given(seeds)
def test_random_extensions_agree(seed):
    rng = random.Random(seed)
    amb = random_group(rng, 3, 300, 20)
    emb = random_embedding(rng, amb)
    phi = random_periodic_polymap(rng, list(emb.sub.factors), rng.randint(1, 2))
    N0 = polynomial_nilsequence(emb.sub, phi)
    N, ladder = extend_to(N0, emb)
    assert 2**ladder.length <= emb.index
    for y in emb.sub.elements():
        assert N.phase(emb(y)) == N0.phase(y)


def test_translate_and_twist():
    g = FinAbGroup((6,))
    N = polynomial_nilsequence(g, PolyMap(1, 2, T1, {(2,): F(1, 3)}))
    t0 = g.element([2])
    for lin in (False, True):
        M = to_linear(N) if lin else N
        T = translate(M, t0)
        for x in g.elements():
            assert T.phase(x) == N.phase(x - t0)
    emb = SubgroupEmbedding(FinAbGroup((3,)), g, [[2]])
    chi = [c for c in annihilator(emb) if not c.is_trivial()][0]
    for lin in (False, True):
        M = to_linear(N) if lin else N
        W = twist(M, chi)
        for x in g.elements():
            assert W(x) == pytest.approx(N(x) * chi(x).e())


def test_json_round_trip():
    g, emb = nonext_instance(3)
    N, _ = extend_to(polynomial_nilsequence(emb.sub, g), emb)
    back = Nilsequence.from_json(json.loads(json.dumps(N.to_json())))
    assert back == N
    h = N.orbit.generators[0]
    assert HPoint.from_json(h.to_json()) == h


def _closed_loop(p, noise, seed):
    from nilext.cli import build_pipeline_instance

    return build_pipeline_instance(p, [1, 1], noise, seed)


@pytest.mark.parametrize("p", [2, 3])
def test_assemble_closed_loop(p):
    f, emb, t0, N0 = _closed_loop(p, 0.0, 0)
    N, rep = assemble_full_nilsequence(f, emb, t0, N0, 1.0)
    assert rep.epsilon == pytest.approx(emb.sub.order / emb.amb.order, abs=1e-9)
    assert N.domain == emb.amb


def test_assemble_whole_group():
    g = FinAbGroup((5,))
    N0 = polynomial_nilsequence(g, PolyMap(1, 2, T1, {(2,): F(2, 5)}))
    emb = SubgroupEmbedding(g, g, [[1]])
    f = GroupFunction(g, N0.values())
    N, rep = assemble_full_nilsequence(f, emb, g.zero(), N0, 1.0)
    assert rep.epsilon == pytest.approx(1.0, abs=1e-12)
    assert rep.extra["character"] == [0]


def test_assemble_precondition():
    f, emb, t0, N0 = _closed_loop(2, 0.0, 0)
    zero = GroupFunction(emb.amb, np.zeros(emb.amb.factors))
    with pytest.raises(PreconditionError) as info:
        assemble_full_nilsequence(zero, emb, t0, N0, 0.5)
    assert info.value.measured == 0.0
