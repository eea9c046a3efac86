import pytest
from hypothesis import given, settings, strategies as st

from uforest.algebra import is_group
from uforest.errors import InputError, SizeOverflow
from uforest.gen import compose, random_morphism, sweep_instances, transformation_semigroup
from uforest.pipeline import PipelineConfig, check_instance

import oracles


def test_compose_applies_right_map_first():
    x, y = (1, 1), (0, 0)
    assert compose(x, y) == (1, 1)
    assert compose((1, 0), (1, 1)) == (0, 0)


def test_one_point_is_trivial():
    phi = random_morphism(1, 3, seed=0)
    assert len(phi.semigroup) == 1 and is_group(phi.semigroup)


def test_constant_maps_form_left_zero():
    S, idx = transformation_semigroup([(0, 0), (1, 1)])
    assert len(S) == 2
    for x in S.elements:
        for y in S.elements:
            assert S.mul(x, y) == x


def test_cap_and_arguments():
    with pytest.raises(SizeOverflow):
        transformation_semigroup([(1, 2, 0), (1, 0, 2)], cap=3)
    with pytest.raises(InputError):
        random_morphism(0, 1)


def test_seeded_generation_is_stable():
    a = random_morphism(3, 2, seed=42)
    b = random_morphism(3, 2, seed=42)
    assert a == b and a.to_json() == b.to_json()


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 4), st.integers(1, 3), st.integers(0, 10 ** 6))
def test_generated_tables_are_associative(points, gens, seed):
    try:
        phi = random_morphism(points, gens, seed=seed)
    except SizeOverflow:
        return
    assert oracles.is_associative(phi.semigroup.table)
    assert phi.semigroup.generated(phi.letter_images()) == frozenset(phi.semigroup.elements)


def test_sweep_instances_are_small_and_distinct():
    inst = sweep_instances(20, seed=3)
    assert len({phi.key for phi in inst}) == 20
    assert all(len(phi.semigroup) <= 6 and len(phi.alphabet) <= 3 for phi in inst)
    assert [p.key for p in sweep_instances(20, seed=3)] == [p.key for p in inst]


def test_pipeline_on_a_few_instances():
    cfg = PipelineConfig(len_bound=5, up_bound=(1, 2), n_words=20, seed=1)
    for i, phi in enumerate(sweep_instances(4, seed=9, max_size=4)):
        res = check_instance(phi, cfg, f"#{i}")
        assert res.ok, res.failures
