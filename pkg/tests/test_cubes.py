import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nilext.cubes import (
    Corner,
    CubeMap,
    InvalidCorner,
    brute_force_cube_count,
    complete_corner,
    compose,
    count_completions,
    cube_count,
    cube_from_parameters,
    cube_morphism,
    enumerate_cubes,
    gray_code,
    host_kra_cube_group,
    is_cube,
    parameter_sets,
    signature_image_count,
)
from nilext.gowers import BudgetExceeded


def bits(v, n):
    return [(v >> i) & 1 for i in range(n)]


def test_membership_examples():
    x, h1, h2 = 2, 3, 4
    affine = CubeMap(2, 5, tuple(x + b[0] * h1 + b[1] * h2 for b in (bits(v, 2) for v in range(4))))
    assert is_cube(affine, 1)
    assert not is_cube(CubeMap(2, 2, (0, 0, 0, 1)), 1)
    prod3 = CubeMap(3, 3, tuple(b[0] * b[1] * b[2] for b in (bits(v, 3) for v in range(8))))
    prod2 = CubeMap(3, 3, tuple(b[0] * b[1] for b in (bits(v, 3) for v in range(8))))
    assert not is_cube(prod3, 2)
    assert is_cube(prod2, 2)


@pytest.mark.parametrize("m,k,n,expected", [(2, 1, 2, 8), (3, 2, 2, 81), (2, 1, 3, 16)])
def test_counts(m, k, n, expected):
    assert cube_count(m, k, n) == expected
    assert brute_force_cube_count(m, k, n) == expected
    count, it = enumerate_cubes(m, k, n)
    cubes = list(it)
    assert len(cubes) == count == len({c.values for c in cubes})
    assert all(is_cube(c, k) for c in cubes)


def test_budget():
    with pytest.raises(BudgetExceeded):
        enumerate_cubes(5, 3, 6, budget=1000)


def test_gray_code_examples():
    assert gray_code(CubeMap(1, 7, (2, 5)), 1) == 3
    c00, c01, c10, c11 = 1, 2, 4, 6
    # index = v_1 + 2 v_2, so c_{v1 v2} sits at v_1 + 2 v_2
    c = CubeMap(2, 11, (c00, c10, c01, c11))
    assert gray_code(c, 2) == (c11 - c10 - c01 + c00) % 11
    for g in range(5):
        top = CubeMap(3, 5, tuple(g if v == 7 else 0 for v in range(8)))
        assert gray_code(top, 3) == g


def test_corner_completion_examples():
    x, a, b = 1, 2, 4
    assert complete_corner(Corner(2, 5, (x, x + a, x + b)), 1).values[-1] == (x + a + b) % 5
    assert complete_corner(Corner(3, 3, (0,) * 7), 2).values[-1] == 0
    affine = [(1 + v0 + v2) % 2 for v0, v1, v2 in (bits(v, 3) for v in range(8))]
    corner = Corner(3, 2, tuple(affine[:-1]))
    assert complete_corner(corner, 1).values[-1] == affine[-1]
    assert count_completions(corner, 1) == 1


def test_invalid_corner():
    with pytest.raises(InvalidCorner):
        complete_corner(Corner(3, 2, (0, 0, 0, 1, 0, 0, 0)), 1)


@pytest.mark.parametrize("m,k", [(2, 1), (3, 1), (2, 2), (3, 2)])
def test_unique_completion_exhaustive(m, k):
    n = k + 1
    for c in enumerate_cubes(m, k, n)[1]:
        corner = Corner.of_cube(c)
        assert count_completions(corner, k) == 1
        assert complete_corner(corner, k) == c


@pytest.mark.parametrize("m,k,n,expected", [(2, 1, 2, 4), (2, 2, 2, 2), (3, 2, 3, 27), (5, 3, 1, 1)])
def test_signature_counts(m, k, n, expected):
    assert signature_image_count(m, k, n) == expected


@pytest.mark.parametrize("m,k,n", [(2, 1, 3), (3, 1, 2), (2, 2, 3), (3, 2, 3)])
def test_generator_definition_matches(m, k, n):
    group = host_kra_cube_group(m, k, n)
    assert len(group) == cube_count(m, k, n)
    assert all(is_cube(CubeMap(n, m, vals), k) for vals in group)


def test_parameter_sets_graded():
    assert parameter_sets(3, 1) == [(), (0,), (1,), (2,)]


rules = st.sampled_from(["const0", "const1", "id", "flip"])


@given(st.integers(0, 10_000))
def test_composition_axiom(seed):
    rng = random.Random(seed)
    m_mod, k = rng.randint(2, 4), rng.randint(1, 3)
    n, mdim = rng.randint(1, 4), rng.randint(1, 4)
    params = [rng.randrange(m_mod) for _ in parameter_sets(n, k)]
    c = cube_from_parameters(n, m_mod, k, params)
    spec = []
    for _ in range(n):
        kind = rng.choice(["const", "id", "flip"])
        spec.append((kind, rng.randint(0, 1) if kind == "const" else rng.randrange(mdim)))
    phi = cube_morphism(n, spec)
    assert is_cube(compose(c, phi, mdim), k)


def test_json_round_trip():
    c = CubeMap(2, 4, (1, 2, 3, 0))
    assert CubeMap.from_json(c.to_json()) == c
