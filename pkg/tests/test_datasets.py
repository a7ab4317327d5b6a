import numpy as np
import pytest
from hypothesis import given, strategies as st

from gngstream.datasets import (DATASETS, SyntheticParams, Stream, batchify, generate_synthetic,
                                induce_rcd, load_csv, mean_path, save_csv, surrogate_stream)
from gngstream.errors import DimensionMismatch, InvalidParams, OutOfRange, ParseError


def write(tmp_path, text, name="s.csv"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_load_remaps_by_first_appearance(tmp_path):
    s = load_csv(write(tmp_path, "0.1,0.2,1\n0.3,0.4,2\n0.5,0.6,1\n"))
    assert len(s) == 3 and s.dim == 2
    assert s.labels.tolist() == [0, 1, 0]
    assert s.class_names == ("1", "2")


@pytest.mark.parametrize("text,row", [("1,2,a\nx,2,b\n", 2), ("1,a\n5\n", 2)])
def test_parse_error_names_row(tmp_path, text, row):
    with pytest.raises(ParseError) as exc:
        load_csv(write(tmp_path, text))
    assert exc.value.row == row


def test_dimension_mismatch(tmp_path):
    with pytest.raises(DimensionMismatch):
        load_csv(write(tmp_path, "1,2,a\n1,2,3,a\n"))


def test_empty_file(tmp_path):
    with pytest.raises(ParseError):
        load_csv(write(tmp_path, ""))


@given(st.integers(0, 2**31))
def test_save_load_round_trip(seed):
    import tempfile, os
    r = np.random.default_rng(seed)
    s = Stream(r.normal(size=(20, 3)) * 10 ** r.uniform(-5, 5), r.integers(0, 3, size=20))
    with tempfile.TemporaryDirectory() as d:
        path = os.path.join(d, "x.csv")
        save_csv(s, path)
        back = load_csv(path)
    assert back.features.tobytes() == s.features.tobytes()
    # labels survive up to the first-appearance renaming
    _, first = np.unique(s.labels, return_index=True)
    order = s.labels[np.sort(first)]
    np.testing.assert_array_equal(order[back.labels], s.labels)


def test_induce_rcd():
    s = generate_synthetic("translating-gaussians", SyntheticParams(n_instances=500))
    out = induce_rcd(s, 100, source_start=50)
    assert len(out) == 600
    np.testing.assert_array_equal(out.features[500:], s.features[50:150])
    np.testing.assert_array_equal(out.labels[500:], s.labels[50:150])
    same = induce_rcd(s, 0, t_s=10)
    np.testing.assert_array_equal(same.features, s.features)
    assert len(induce_rcd(s, 20, t_s=10)) == 520
    with pytest.raises(OutOfRange):
        induce_rcd(s, 100, source_start=450)
    with pytest.raises(InvalidParams):
        induce_rcd(s, 10)


def test_table_rows():
    d = DATASETS["1CDT"]
    assert (d.n_instances, d.n_batches, d.t_s) == (16000, 100, 800)
    assert d.batch_size == 152
    assert DATASETS["1CDT-RCD"].append_count == 4000
    assert DATASETS["MG2C2D-RCD"].append_count == 18900
    assert DATASETS["1CDT-RCD"].rcd_of == "1CDT"
    assert all(not n.startswith(("4CR", "UG", "4CE")) for n in DATASETS if n.endswith("-RCD"))
    assert len(DATASETS) == 25


def test_batchify_1cdt_shape():
    s = surrogate_stream("1CDT")
    assert (len(s), s.dim, s.n_classes) == (16000, 2, 2)
    prefix, batches, truths = batchify(s, 152, 800)
    assert len(prefix) == 800 and len(batches) == 100
    assert {len(b) for b in batches} == {152}


@given(st.integers(2, 200), st.integers(1, 50), st.data())
def test_batchify_partition(n, b, data):
    t_s = data.draw(st.integers(1, n - 1))
    X = np.arange(n * 2, dtype=float).reshape(n, 2)
    s = Stream(X, np.arange(n) % 3)
    prefix, batches, truths = batchify(s, b, t_s)
    assert len(prefix) + sum(map(len, batches)) == n
    np.testing.assert_array_equal(np.concatenate([prefix.features] + batches), X)
    np.testing.assert_array_equal(np.concatenate([prefix.labels] + truths), s.labels)
    assert all(len(x) == b for x in batches[:-1])


def test_batchify_edges():
    s = Stream(np.zeros((10, 2)), np.zeros(10, dtype=int))
    _, batches, _ = batchify(s, 4, 9)
    assert [len(x) for x in batches] == [1]
    with pytest.raises(OutOfRange):
        batchify(s, 4, 10)


def test_stationary_generator():
    p = SyntheticParams(n_instances=4000, start=((0, 0), (3, 0)), end=((0, 0), (3, 0)))
    s = generate_synthetic("translating-gaussians", p, seed=1)
    w = 500
    for c in (0, 1):
        pts = s.features[s.labels == c]
        means = [pts[i:i + w].mean(axis=0) for i in range(0, len(pts) - w + 1, w)]
        drift = np.abs(np.diff(means, axis=0)).max()
        assert drift < 2 * 3 * p.sigma / np.sqrt(w)


def test_recurrent_jump_restores_start_means():
    p = SyntheticParams()
    s = generate_synthetic("recurrent-translating", p, seed=0)
    w = 600
    for c in (0, 1):
        early = s.features[:w][s.labels[:w] == c].mean(axis=0)
        after = s.features[p.jump_at:p.jump_at + w][s.labels[p.jump_at:p.jump_at + w] == c]
        assert np.abs(after.mean(axis=0) - early).max() <= 0.1
    path = mean_path("recurrent-translating", p, [0, p.jump_at])
    np.testing.assert_array_equal(path[0], path[1])


def test_rotating_path_keeps_radius():
    p = SyntheticParams(start=((2.0, 0.0), (0.0, 3.0)))
    m = mean_path("rotating-gaussians", p, np.linspace(0, p.n_instances - 1, 11))
    np.testing.assert_allclose(np.linalg.norm(m, axis=2), np.tile([2.0, 3.0], (len(m), 1)))
    np.testing.assert_allclose(m[-1, 0], [0.0, 2.0], atol=1e-12)


def test_generator_deterministic_and_validated():
    a = generate_synthetic("rotating-gaussians", seed=3)
    b = generate_synthetic("rotating-gaussians", seed=3)
    assert a.features.tobytes() == b.features.tobytes()
    with pytest.raises(InvalidParams):
        generate_synthetic("spiral")
    with pytest.raises(InvalidParams):
        generate_synthetic("recurrent-translating", SyntheticParams(jump_at=0))


def test_surrogate_rcd_copies_first_unsupervised_region():
    base, rcd = surrogate_stream("2CDT", 4), surrogate_stream("2CDT-RCD", 4)
    assert len(rcd) == DATASETS["2CDT-RCD"].n_instances
    np.testing.assert_array_equal(rcd.features[16000:], base.features[800:4800])
    with pytest.raises(InvalidParams):
        surrogate_stream("GEARS")
