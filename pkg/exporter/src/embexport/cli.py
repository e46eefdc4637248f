"""Command-line front end for the exporter."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .encoders import DEFAULT_CLIP_MODEL, ClipEncoder, ToyEncoder
from .errors import ExportError
from .export import DEFAULT_PROMPT, ExportJob, read_labels, run_export


def _dir_tag(value: str) -> tuple[Path, str]:
    folder, sep, tag = value.rpartition("=")
    if not sep or not folder or not tag:
        raise argparse.ArgumentTypeError(
            f"expected DIR=LABEL with LABEL an id label or 'ood', got {value!r}"
        )
    return Path(folder), tag


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="embexport",
        description="Export text and image embeddings as EMB1 files plus a "
        "dataset manifest for the scoring engine.",
    )
    parser.add_argument(
        "--id-labels", type=Path, required=True, help="file with one known label per line"
    )
    parser.add_argument(
        "--neg-labels", type=Path, required=True, help="file with one negative label per line"
    )
    parser.add_argument(
        "--images",
        action="append",
        type=_dir_tag,
        default=[],
        metavar="DIR=LABEL",
        help="image directory tagged with an id label or 'ood'; repeatable",
    )
    parser.add_argument("--out-dir", type=Path, required=True)
    parser.add_argument("--encoder", choices=("clip", "toy"), default="clip")
    parser.add_argument("--model", default=DEFAULT_CLIP_MODEL, help="clip checkpoint name")
    parser.add_argument(
        "--prompt",
        default=DEFAULT_PROMPT,
        help=f"template applied to every label; must contain the literal <label> "
        f"placeholder (default {DEFAULT_PROMPT!r})",
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        job = ExportJob(
            id_labels=read_labels(args.id_labels),
            neg_labels=read_labels(args.neg_labels),
            image_dirs=list(args.images),
            out_dir=args.out_dir,
            prompt=args.prompt,
        )
        encoder = ToyEncoder() if args.encoder == "toy" else ClipEncoder(args.model)
        summary = run_export(job, encoder)
    except ExportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(
        f"wrote {args.out_dir / 'manifest.json'}: {summary['images']} images, "
        f"{summary['labels']} labels, dim {summary['dim']}"
        + (f", {summary['skipped']} skipped" if summary["skipped"] else "")
    )
    return 0
