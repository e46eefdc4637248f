"""Ingestion: normalization, proxy stacking, manifest validation."""

import json

import numpy as np
import pytest

from adaneg.embeddings import (
    Dataset,
    GroundTruth,
    ProxyMatrix,
    load_manifest,
    normalize_rows,
    write_manifest,
)
from adaneg.embfile import write_embedding_file
from adaneg.errors import (
    DimensionMismatch,
    EmptyInput,
    ManifestError,
    NonFiniteValue,
    ZeroVector,
)


def test_normalize_rows_basics():
    out = normalize_rows(np.array([[3.0, 4.0], [0.0, 2.0]]))
    assert np.allclose(np.linalg.norm(out, axis=1), 1.0)
    assert out.dtype == np.float64
    # 1-D input is promoted to a single row
    assert normalize_rows(np.array([2.0, 0.0])).shape == (1, 2)
    with pytest.raises(ZeroVector):
        normalize_rows(np.array([[1.0, 0.0], [0.0, 0.0]]))
    with pytest.raises(NonFiniteValue):
        normalize_rows(np.array([[np.inf, 1.0]]))
    with pytest.raises(EmptyInput):
        normalize_rows(np.zeros((0, 3)))


def test_proxy_matrix_normalizes_and_validates():
    pm = ProxyMatrix(id_proxies=np.eye(3) * 2.0, neg_proxies=np.eye(3)[:2] * 7.0)
    assert np.allclose(np.linalg.norm(pm.stacked, axis=1), 1.0)
    assert pm.num_id == 3 and pm.num_neg == 2 and pm.dim == 3
    # id rows come first in the stacked matrix
    assert np.allclose(pm.stacked[:3], np.eye(3))
    with pytest.raises(DimensionMismatch):
        ProxyMatrix(id_proxies=np.eye(3), neg_proxies=np.eye(4))
    with pytest.raises(ManifestError):
        ProxyMatrix(id_proxies=np.eye(3), neg_proxies=np.eye(3), id_label_names=["a"])


def test_ground_truth_mask():
    gt = GroundTruth([0, None, 2])
    assert list(gt.is_id) == [True, False, True]
    assert len(gt) == 3


def _write_dataset(tmp_path, truth=None, stream=None):
    rng = np.random.default_rng(1)
    write_embedding_file(tmp_path / "id.emb", rng.standard_normal((3, 4)).astype(np.float32))
    write_embedding_file(tmp_path / "neg.emb", rng.standard_normal((5, 4)).astype(np.float32))
    if stream is None:
        stream = rng.standard_normal((6, 4)).astype(np.float32)
    write_embedding_file(tmp_path / "stream.emb", stream)
    write_manifest(
        tmp_path / "manifest.json",
        files={"id_proxies": "id.emb", "neg_proxies": "neg.emb", "test_stream": "stream.emb"},
        id_label_names=["a", "b", "c"],
        neg_label_names=["n0", "n1", "n2", "n3", "n4"],
        ground_truth=truth,
    )
    return tmp_path / "manifest.json"


def test_manifest_round_trip(tmp_path):
    truth = [{"kind": "id", "class": 0}, {"kind": "ood"}] * 3
    ds = load_manifest(_write_dataset(tmp_path, truth))
    assert isinstance(ds, Dataset)
    assert ds.proxies.num_id == 3 and ds.proxies.num_neg == 5
    assert ds.stream.shape == (6, 4)
    assert np.allclose(np.linalg.norm(ds.stream, axis=1), 1.0)
    assert ds.truth.labels == [0, None, 0, None, 0, None]
    assert ds.proxies.id_label_names == ["a", "b", "c"]


def test_manifest_without_truth(tmp_path):
    ds = load_manifest(_write_dataset(tmp_path))
    assert ds.truth is None


def test_manifest_error_paths(tmp_path):
    path = _write_dataset(tmp_path)
    doc = json.loads(path.read_text())

    del doc["files"]["test_stream"]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    with pytest.raises(ManifestError, match="test_stream"):
        load_manifest(bad)

    bad.write_text("{not json")
    with pytest.raises(ManifestError, match="JSON"):
        load_manifest(bad)

    with pytest.raises(ManifestError, match="cannot read"):
        load_manifest(tmp_path / "absent.json")

    doc = json.loads(path.read_text())
    doc["neg_label_names"][0] = "a"  # collides with an id label
    bad.write_text(json.dumps(doc))
    with pytest.raises(ManifestError, match="both"):
        load_manifest(bad)


def test_ground_truth_validation(tmp_path):
    for truth, msg in (
        ([{"kind": "id", "class": 3}] * 6, "class"),
        ([{"kind": "id", "class": True}] * 6, "class"),
        ([{"kind": "mystery"}] * 6, "kind"),
        ([{"kind": "ood"}] * 4, "entries"),
    ):
        path = _write_dataset(tmp_path, truth)
        with pytest.raises(ManifestError, match=msg):
            load_manifest(path)


def test_stream_dim_mismatch(tmp_path):
    stream = np.ones((2, 7), dtype=np.float32)
    path = _write_dataset(tmp_path, stream=stream)
    with pytest.raises(DimensionMismatch):
        load_manifest(path)
