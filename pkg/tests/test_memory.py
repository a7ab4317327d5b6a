import numpy as np
import pytest
from hypothesis import given, strategies as st

from gngstream.memory import (ConceptModel, Memory, export_memory_csv, footprint_iou,
                              load_memory_csv, should_store, store, try_retrieve)
from gngstream.models import LabeledPointSet


def model(rng, center, created=0, n=40):
    nodes = LabeledPointSet(rng.normal(size=(n, 2)) + center, rng.integers(0, 2, size=n))
    protos = LabeledPointSet([np.add(center, [-0.5, 0]), np.add(center, [0.5, 0])], [0, 1])
    return ConceptModel(protos, nodes, created)


def test_identical_model_is_retrieved(rng):
    m = model(rng, [0, 0])
    mem = Memory([m])
    hit = try_retrieve(mem, m.prototypes, m.nodes.points, 0.2, 0.6)
    assert hit.index == 0 and hit.model is m
    assert hit.iou == pytest.approx(1.0)


def test_far_centroids_never_retrieved(rng):
    mem = Memory([model(rng, [0, 0]), model(rng, [3, 3])])
    far = LabeledPointSet([[100, 100], [-100, 40]], [0, 1])
    assert try_retrieve(mem, far, rng.normal(size=(50, 2)), 0.2, 0.6) is None


def test_low_iou_blocks_retrieval(rng):
    m = model(rng, [0, 0])
    shifted = m.nodes.points + [3.0, 0.0]
    assert try_retrieve(Memory([m]), m.prototypes, shifted, 0.2, 0.6) is None
    assert footprint_iou(shifted, m) < 0.6


def test_degenerate_batch_is_no_match(rng):
    m = model(rng, [0, 0])
    line = np.column_stack([np.arange(10.0), np.arange(10.0)])
    assert try_retrieve(Memory([m]), m.prototypes, line, 0.2, 0.6) is None


def test_high_dimensional_skips_iou(rng):
    nodes = LabeledPointSet(rng.normal(size=(20, 3)), [0] * 20)
    protos = LabeledPointSet([[0, 0, 0]], [0])
    m = ConceptModel(protos, nodes, 0)
    hit = try_retrieve(Memory([m]), protos, rng.normal(size=(30, 3)) + 50, 0.2, 0.99)
    assert hit.index == 0 and hit.iou is None


def test_first_match_wins(rng):
    a = model(rng, [0, 0])
    b = ConceptModel(a.prototypes, a.nodes, 5)
    assert try_retrieve(Memory([a, b]), a.prototypes, a.nodes.points, 0.2, 0.6).index == 0


@given(st.integers(0, 2**31), st.integers(1, 6))
def test_own_data_retrieves_index_at_most_j(seed, k):
    r = np.random.default_rng(seed)
    mem = Memory()
    for i in range(k):
        store(mem, model(r, r.uniform(-3, 3, size=2), created=i))
    for j, m in enumerate(mem):
        hit = try_retrieve(mem, m.prototypes, m.nodes.points, 0.2, 0.6)
        assert hit is not None and hit.index <= j


def test_should_store(rng):
    m = model(rng, [0, 0])
    mem = Memory([m])
    assert not should_store(mem, m.prototypes, 4.0)
    moved = LabeledPointSet(m.prototypes.points + [[0, 0], [8.0, 0]], [0, 1])
    assert should_store(mem, moved, 4.0)


def test_store_appends_without_mutation(rng):
    a, b = model(rng, [0, 0]), model(rng, [5, 5], created=3)
    mem = Memory([a])
    before = a.nodes.points.copy()
    store(mem, b)
    assert len(mem) == 2 and mem[0] is a and mem.last is b
    np.testing.assert_array_equal(mem[0].nodes.points, before)


def test_csv_round_trip(tmp_path, rng):
    mem = Memory([model(rng, [0, 0]), model(rng, [4, 1], created=7)])
    path = tmp_path / "memory.csv"
    export_memory_csv(mem, path)
    back = load_memory_csv(path)
    assert len(back) == 2
    for a, b in zip(mem, back):
        assert a.batch_index_created == b.batch_index_created
        assert a.prototypes == b.prototypes
        assert a.nodes == b.nodes
