"""Smoke tests for the python bindings."""

import numpy as np
import pytest

import avrkit


def ramp_sequence(ident: str, frames: int = 12, dim: int = 3, scale: float = 1.0):
    rng = np.random.default_rng(abs(hash(ident)) % 2**32)
    data = rng.normal(size=(frames, dim)).astype(np.float32) * scale
    return avrkit.FeatureSequence(ident, data)


def test_sequence_roundtrip(tmp_path):
    seq = ramp_sequence("clip")
    path = tmp_path / "clip.avrf"
    avrkit.save_sequence(seq, path)
    loaded = avrkit.load_sequence(path)
    assert loaded.id == "clip"
    np.testing.assert_array_equal(loaded.frames(), seq.frames())


def test_contextualize_shapes_and_centering():
    seq = ramp_sequence("clip", frames=20, dim=4)
    ctx = avrkit.contextualize(seq)
    assert ctx.width == 8
    assert np.abs(ctx.frames().mean(axis=0)).max() < 1e-5

    raw = avrkit.contextualize(seq, with_context=False)
    assert raw.width == 4


def test_dtw_on_identical_sequences_is_diagonal():
    seq = ramp_sequence("clip", frames=10)
    ctx = avrkit.contextualize(seq)
    cost = avrkit.cost_matrix(ctx, ctx)
    path, total = avrkit.dtw(cost)
    assert total == pytest.approx(0.0, abs=1e-9)
    assert path == [(i, i) for i in range(1, 11)]


def test_draq_is_zero_for_self_and_deterministic():
    seq = ramp_sequence("clip", frames=15)
    ctx = avrkit.contextualize(seq)
    cost = avrkit.cost_matrix(ctx, ctx)
    score = avrkit.draq(cost, k=50, seed=9)
    again = avrkit.draq(cost, k=50, seed=9)
    assert score.value == pytest.approx(0.0, abs=1e-9)
    assert not score.degenerate
    assert score.value == again.value


def test_random_path_endpoints():
    path = avrkit.sample_random_path(6, 9, seed=4)
    assert path[0] == (1, 1)
    assert path[-1] == (6, 9)


def test_warp_labels_and_apa():
    path = [(1, 1), (2, 1), (3, 2)]
    assert avrkit.warp_labels(path, [10.0, 20.0, 30.0], "second") == [10.0, 30.0]
    assert avrkit.apa([1, 1, 2], [1, 2, 2], [(1, 1), (2, 2), (3, 3)]) == pytest.approx(2 / 3)


def test_index_query_and_pipeline(tmp_path):
    corpus = [ramp_sequence(f"clip{i}") for i in range(6)]
    query = ramp_sequence("query")
    copy = avrkit.FeatureSequence("copy", query.frames())
    corpus.append(copy)

    index = avrkit.build_index(corpus)
    assert len(index) == 7
    hits = avrkit.query_topk(index, query, k=3)
    assert hits[0][0] == "copy"
    assert hits[0][1] == pytest.approx(1.0)

    index_path = tmp_path / "index.avri"
    avrkit.save_index(index, index_path)
    reloaded = avrkit.load_index(index_path)
    assert avrkit.query_topk(reloaded, query, k=3) == hits

    store = avrkit.SequenceStore.in_memory(corpus)
    result = avrkit.avr_query(index, store, query, topk=4, seed=1)
    assert result["best"]["id"] == "copy"
    assert result["best"]["draq"] == pytest.approx(0.0, abs=1e-9)
    assert not result["filtered"]


def test_cycle_consistency_identity():
    seq = ramp_sequence("clip", frames=9)
    fpe, cpe = avrkit.cycle_consistency(seq, [0, 0, 0, 1, 1, 1, 2, 2, 2], seq)
    assert fpe == 0.0
    assert cpe == 0.0


def test_synthetic_generation(tmp_path):
    spec = avrkit.SyntheticSpec()
    spec.prototypes = 2
    spec.clips_per_prototype = 2
    spec.min_frames = 12
    spec.max_frames = 16
    spec.alignable_pairs = 2
    spec.cross_pairs = 2
    out = tmp_path / "corpus"
    ids = avrkit.generate_synthetic(spec, out)
    assert len(ids) == 4
    assert (out / "manifest.json").exists()
    seq = avrkit.load_sequence(out / f"{ids[0]}.avrf")
    assert seq.dim == spec.latent_dim
