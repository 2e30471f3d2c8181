import json
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nilext.abgroup import (
    FinAbGroup,
    GroupError,
    Homomorphism,
    SubgroupEmbedding,
    annihilator,
    build_ladder,
    canonical_decomposition,
    exact_root_of_unity_sum,
    factorize,
    indicator_via_annihilator,
    kernel,
    preimage,
    primary_form,
    subgroup_from_generators,
)
from nilext.sampling import random_embedding, random_group
from nilext.torus import TorusPoint


def test_factorize():
    assert factorize(360) == {2: 3, 3: 2, 5: 1}
    assert factorize(1) == {}


def test_canonical_of_6_4():
    cd = canonical_decomposition([6, 4])
    assert cd.group.factors == (2, 12)
    assert cd.primary == {2: [1, 2], 3: [1]}


def test_canonical_isomorphisms_round_trip():
    cd = canonical_decomposition([6, 4, 10])
    src = cd.source
    for x in list(src.elements())[:60]:
        assert cd.iso_from()(cd.iso_to()(x)) == x


def test_trivial_group():
    g = FinAbGroup(())
    assert g.order == 1
    assert list(g.elements()) == [g.zero()]
    assert canonical_decomposition([]).group.order == 1


def test_elements_row_major_and_index():
    g = FinAbGroup((2, 3))
    els = list(g.elements())
    assert [e.coords for e in els[:4]] == [(0, 0), (0, 1), (0, 2), (1, 0)]
    assert [g.index_of(e) for e in els] == list(range(6))


def test_primary_form():
    target, to_p, from_p = primary_form(FinAbGroup((12,)))
    assert sorted(target.factors) == [3, 4]
    for x in FinAbGroup((12,)).elements():
        assert from_p(to_p(x)) == x


def test_non_injective_embedding_rejected():
    with pytest.raises(GroupError):
        SubgroupEmbedding(FinAbGroup((4,)), FinAbGroup((4,)), [[2]])


def test_ill_defined_homomorphism_rejected():
    with pytest.raises(GroupError):
        Homomorphism(FinAbGroup((3,)), FinAbGroup((4,)), [[1]])


def test_annihilator_of_2z4():
    emb = SubgroupEmbedding(FinAbGroup((2,)), FinAbGroup((4,)), [[2]])
    assert sorted(chi.xi for chi in annihilator(emb)) == [(0,), (2,)]


def test_kernel_and_preimage():
    src, dst = FinAbGroup((12,)), FinAbGroup((4,))
    hom = Homomorphism(src, dst, [[1]])
    ker = kernel(hom)
    assert ker.sub.order == 3
    assert preimage(hom, dst.element([3])).coords[0] % 4 == 3


def test_root_of_unity_sum_exact():
    pts = [TorusPoint(Fraction(j, 6)) for j in range(6)]
    assert exact_root_of_unity_sum(pts) == []
    assert exact_root_of_unity_sum([TorusPoint(0)] * 3) == [3]


@given(st.integers(0, 10_000))
def test_indicator_identity(seed):
    rng = random.Random(seed)
    amb = random_group(rng, 3, 200)
    emb = random_embedding(rng, amb)
    ann = annihilator(emb)
    assert len(ann) * emb.sub.order == amb.order
    image = {x.coords for x in emb.image()}
    for x in list(amb.elements())[:40]:
        assert indicator_via_annihilator(emb, x, ann) == (1 if x.coords in image else 0)


def test_ladder_nonext_single_nonsplit():
    emb = SubgroupEmbedding(FinAbGroup((2, 2)), FinAbGroup((4, 2)), [[2, 0], [0, 1]])
    lad = build_ladder(emb)
    assert [(s.kind, s.p, s.d) for s in lad.steps] == [("nonsplit", 2, 2)]


def test_ladder_split_step():
    emb = SubgroupEmbedding(FinAbGroup((2,)), FinAbGroup((2, 3)), [[1], [0]])
    lad = build_ladder(emb)
    assert [(s.kind, s.p) for s in lad.steps] == [("split", 3)]


def test_ladder_mixed():
    amb = FinAbGroup((2, 8))
    emb = subgroup_from_generators(amb, [amb.element([1, 2])])
    lad = build_ladder(emb)
    assert [s.kind for s in lad.steps] == ["split", "nonsplit"]
    assert lad.composed().matrix == emb.map.matrix


@given(st.integers(0, 10_000))
def test_ladder_properties(seed):
    rng = random.Random(seed)
    amb = random_group(rng, 4, 2000, 30)
    emb = random_embedding(rng, amb)
    lad = build_ladder(emb)
    assert lad.composed().matrix == emb.map.matrix
    prod = 1
    for st_ in lad.steps:
        prod *= st_.p
        assert st_.embedding.index == st_.p
        if st_.kind == "split":
            assert st_.upper.factors == (st_.p,) + st_.lower.factors
        else:
            assert st_.lower.factors[0] == st_.d
            assert st_.upper.factors[0] == st_.p * st_.d
    assert prod == emb.index
    assert 2**lad.length <= emb.index


def test_json_round_trip():
    amb = FinAbGroup((6, 4))
    emb = subgroup_from_generators(amb, [amb.element([2, 2])])
    obj = json.loads(json.dumps(emb.to_json()))
    back = SubgroupEmbedding.from_json(obj)
    assert back.matrix == emb.matrix and back.amb == amb
