"""Export driver: prompts, image scan, EMB1 emission, manifest JSON.

The manifest layout matches what the scoring engine ingests: a files object
mapping the roles id_proxies / neg_proxies / test_stream to EMB1 paths,
label name lists, and one ground-truth entry per stream row. Row order is
the global sorted-path order of the scanned images; index alignment is the
only linkage between stream rows and truth entries.
"""

from __future__ import annotations

import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .emb1 import write_emb1
from .errors import EmptyLabels, ExportError, UnreadableImage

DEFAULT_PROMPT = "The nice <label>."
PLACEHOLDER = "<label>"
OOD_TAG = "ood"
IMAGE_BATCH = 32


@dataclass
class ExportJob:
    """One export request, validated before any file is written."""

    id_labels: list[str]
    neg_labels: list[str]
    image_dirs: list[tuple[Path, str]] = field(default_factory=list)
    out_dir: Path = Path(".")
    prompt: str = DEFAULT_PROMPT

    def validate(self) -> None:
        if not self.id_labels:
            raise EmptyLabels("id label list is empty")
        if not self.neg_labels:
            raise EmptyLabels("negative label list is empty")
        overlap = set(self.id_labels) & set(self.neg_labels)
        if overlap:
            raise ExportError(
                f"labels appear in both lists: {sorted(overlap)[:5]}"
            )
        if PLACEHOLDER not in self.prompt:
            raise ExportError(f"prompt template must contain {PLACEHOLDER!r}")
        known = set(self.id_labels)
        for folder, tag in self.image_dirs:
            if tag != OOD_TAG and tag not in known:
                raise ExportError(
                    f"{folder}: tag {tag!r} is neither an id label nor {OOD_TAG!r}"
                )


def read_labels(path: str | Path) -> list[str]:
    """Non-empty stripped lines of a label file."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ExportError(f"cannot read label file {path}: {exc}") from exc
    return [line.strip() for line in text.splitlines() if line.strip()]


def build_prompts(labels: list[str], template: str) -> list[str]:
    return [template.replace(PLACEHOLDER, label) for label in labels]


def scan_images(image_dirs: list[tuple[Path, str]]) -> list[tuple[Path, str]]:
    """(path, tag) pairs over all directories, in global sorted-path order."""
    entries: list[tuple[Path, str]] = []
    for folder, tag in image_dirs:
        folder = Path(folder)
        if not folder.is_dir():
            raise ExportError(f"{folder} is not a directory")
        entries.extend((p, tag) for p in folder.iterdir() if p.is_file())
    return sorted(entries, key=lambda entry: str(entry[0]))


def _load_image(path: Path) -> Image.Image:
    try:
        with Image.open(path) as raw:
            return raw.convert("RGB")
    except (OSError, UnidentifiedImageError) as exc:
        raise UnreadableImage(f"{path}: {exc}") from exc


def _dump_json(doc, path: Path) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(json.dumps(doc, indent=2) + "\n")
    os.replace(tmp, path)


def run_export(job: ExportJob, encoder) -> dict:
    """Encode labels and images, write EMB1 files plus manifest.

    Unreadable images are skipped with a warning on stderr and recorded in
    skipped.json; everything else is written atomically. Returns a summary
    dict with row counts.
    """
    job.validate()
    out = Path(job.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    prompts = build_prompts(job.id_labels + job.neg_labels, job.prompt)
    text_rows = encoder.encode_texts(prompts)
    n_id = len(job.id_labels)
    write_emb1(out / "id_proxies.emb", text_rows[:n_id])
    write_emb1(out / "neg_proxies.emb", text_rows[n_id:])

    class_of = {label: pos for pos, label in enumerate(job.id_labels)}
    images: list[Image.Image] = []
    truth: list[dict] = []
    skipped: list[dict] = []
    for path, tag in scan_images(job.image_dirs):
        try:
            images.append(_load_image(path))
        except UnreadableImage as exc:
            print(f"warning: skipping {exc}", file=sys.stderr)
            skipped.append({"path": str(path), "reason": str(exc)})
            continue
        if tag == OOD_TAG:
            truth.append({"kind": "ood"})
        else:
            truth.append({"kind": "id", "class": class_of[tag]})
    if not images:
        raise ExportError("no readable images were found")

    batches = [
        encoder.encode_images(images[i : i + IMAGE_BATCH])
        for i in range(0, len(images), IMAGE_BATCH)
    ]
    write_emb1(out / "test_stream.emb", np.vstack(batches))

    manifest = {
        "id_label_names": list(job.id_labels),
        "neg_label_names": list(job.neg_labels),
        "files": {
            "id_proxies": "id_proxies.emb",
            "neg_proxies": "neg_proxies.emb",
            "test_stream": "test_stream.emb",
        },
        "ground_truth": truth,
    }
    _dump_json(manifest, out / "manifest.json")
    if skipped:
        _dump_json(skipped, out / "skipped.json")
    return {
        "labels": len(prompts),
        "images": len(images),
        "skipped": len(skipped),
        "dim": int(text_rows.shape[1]),
    }
