"""Embedding ingestion: normalization, proxy matrices, dataset manifests.

All scoring math downstream assumes unit-norm float64 rows; this module is
the single place where raw file payloads are checked and normalized.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .embfile import read_embedding_file
from .errors import (
    DimensionMismatch,
    EmptyInput,
    ManifestError,
    NonFiniteValue,
    ZeroVector,
)

ROLE_ID_PROXIES = "id_proxies"
ROLE_NEG_PROXIES = "neg_proxies"
ROLE_TEST_STREAM = "test_stream"

_REQUIRED_ROLES = (ROLE_ID_PROXIES, ROLE_NEG_PROXIES, ROLE_TEST_STREAM)


def normalize_rows(rows: np.ndarray) -> np.ndarray:
    """L2-normalize rows into a float64 array.

    Rejects non-finite input and rows whose norm underflows to zero, since a
    zero row has no direction and would silently poison every cosine later.
    """
    out = np.asarray(rows, dtype=np.float64)
    if out.ndim == 1:
        out = out[None, :]
    if out.size == 0:
        raise EmptyInput("cannot normalize an empty array")
    if not np.isfinite(out).all():
        raise NonFiniteValue("embedding rows contain NaN or Inf")
    norms = np.linalg.norm(out, axis=1)
    if (norms == 0.0).any():
        bad = int(np.nonzero(norms == 0.0)[0][0])
        raise ZeroVector(f"row {bad} has zero norm")
    return out / norms[:, None]


@dataclass
class ProxyMatrix:
    """Unit-norm text proxies: C in-distribution rows then M negative rows."""

    id_proxies: np.ndarray  # (C, D)
    neg_proxies: np.ndarray  # (M, D)
    id_label_names: list[str] = field(default_factory=list)
    neg_label_names: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.id_proxies = normalize_rows(self.id_proxies)
        self.neg_proxies = normalize_rows(self.neg_proxies)
        if self.id_proxies.shape[1] != self.neg_proxies.shape[1]:
            raise DimensionMismatch(
                f"id proxies are {self.id_proxies.shape[1]}-dim but negative "
                f"proxies are {self.neg_proxies.shape[1]}-dim"
            )
        if self.id_label_names and len(self.id_label_names) != self.num_id:
            raise ManifestError(
                f"{len(self.id_label_names)} id label names for {self.num_id} proxies"
            )
        if self.neg_label_names and len(self.neg_label_names) != self.num_neg:
            raise ManifestError(
                f"{len(self.neg_label_names)} negative label names for {self.num_neg} proxies"
            )

    @property
    def num_id(self) -> int:
        return self.id_proxies.shape[0]

    @property
    def num_neg(self) -> int:
        return self.neg_proxies.shape[0]

    @property
    def dim(self) -> int:
        return self.id_proxies.shape[1]

    @property
    def stacked(self) -> np.ndarray:
        """(C+M, D) matrix with id rows first."""
        return np.vstack([self.id_proxies, self.neg_proxies])


@dataclass
class GroundTruth:
    """Per-sample truth: class index for id samples, None for ood."""

    labels: list[int | None]

    @property
    def is_id(self) -> np.ndarray:
        return np.array([lab is not None for lab in self.labels], dtype=bool)

    def __len__(self) -> int:
        return len(self.labels)


@dataclass
class Dataset:
    """A loaded manifest: proxies, a normalized test stream, optional truth."""

    proxies: ProxyMatrix
    stream: np.ndarray  # (N, D) unit-norm float64
    truth: GroundTruth | None = None


def _parse_ground_truth(entries: list, num_classes: int) -> GroundTruth:
    labels: list[int | None] = []
    for pos, entry in enumerate(entries):
        if not isinstance(entry, dict) or "kind" not in entry:
            raise ManifestError(f"ground_truth[{pos}] must be an object with a 'kind' key")
        kind = entry["kind"]
        if kind == "ood":
            labels.append(None)
        elif kind == "id":
            cls = entry.get("class")
            if not isinstance(cls, int) or isinstance(cls, bool) or not 0 <= cls < num_classes:
                raise ManifestError(
                    f"ground_truth[{pos}]: class must be an int in [0, {num_classes}), got {cls!r}"
                )
            labels.append(cls)
        else:
            raise ManifestError(f"ground_truth[{pos}]: unknown kind {kind!r}")
    return GroundTruth(labels)


def load_manifest(path: str | Path) -> Dataset:
    """Load a dataset manifest and every file it references.

    Relative file paths resolve against the manifest's directory. Validation
    failures raise ManifestError; file-level problems raise the embfile
    errors unchanged.
    """
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise ManifestError(f"{path}: cannot read manifest ({exc})") from exc
    except json.JSONDecodeError as exc:
        raise ManifestError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise ManifestError(f"{path}: top level must be an object")

    files = doc.get("files")
    if not isinstance(files, dict):
        raise ManifestError(f"{path}: missing 'files' object")
    for role in _REQUIRED_ROLES:
        if role not in files:
            raise ManifestError(f"{path}: files is missing role '{role}'")

    id_names = doc.get("id_label_names", [])
    neg_names = doc.get("neg_label_names", [])
    if not isinstance(id_names, list) or not all(isinstance(s, str) for s in id_names):
        raise ManifestError(f"{path}: id_label_names must be a list of strings")
    if not isinstance(neg_names, list) or not all(isinstance(s, str) for s in neg_names):
        raise ManifestError(f"{path}: neg_label_names must be a list of strings")
    overlap = set(id_names) & set(neg_names)
    if overlap:
        raise ManifestError(
            f"{path}: labels appear in both id and negative lists: {sorted(overlap)[:5]}"
        )

    base = path.parent

    def load_role(role: str) -> np.ndarray:
        return read_embedding_file(base / files[role]).rows

    proxies = ProxyMatrix(
        id_proxies=load_role(ROLE_ID_PROXIES),
        neg_proxies=load_role(ROLE_NEG_PROXIES),
        id_label_names=list(id_names),
        neg_label_names=list(neg_names),
    )
    stream_raw = load_role(ROLE_TEST_STREAM)
    if stream_raw.shape[0] == 0:
        raise ManifestError(f"{path}: test stream has no rows")
    if stream_raw.shape[1] != proxies.dim:
        raise DimensionMismatch(
            f"{path}: test stream is {stream_raw.shape[1]}-dim, proxies are {proxies.dim}-dim"
        )
    stream = normalize_rows(stream_raw)

    truth = None
    if "ground_truth" in doc:
        entries = doc["ground_truth"]
        if not isinstance(entries, list):
            raise ManifestError(f"{path}: ground_truth must be a list")
        if len(entries) != stream.shape[0]:
            raise ManifestError(
                f"{path}: ground_truth has {len(entries)} entries for "
                f"{stream.shape[0]} stream rows"
            )
        truth = _parse_ground_truth(entries, proxies.num_id)

    return Dataset(proxies=proxies, stream=stream, truth=truth)


def write_manifest(
    path: str | Path,
    *,
    files: dict[str, str],
    id_label_names: list[str] | None = None,
    neg_label_names: list[str] | None = None,
    ground_truth: list[dict] | None = None,
) -> None:
    """Serialize a manifest JSON next to already-written embedding files."""
    doc: dict = {
        "id_label_names": id_label_names or [],
        "neg_label_names": neg_label_names or [],
        "files": files,
    }
    if ground_truth is not None:
        doc["ground_truth"] = ground_truth
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")
