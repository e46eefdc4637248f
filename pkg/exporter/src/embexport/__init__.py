"""Embedding exporter: CLIP (or toy) features to EMB1 files plus manifest."""

from .emb1 import write_emb1
from .encoders import ClipEncoder, ToyEncoder
from .errors import EmptyLabels, ExportError, ModelLoadFailure, UnreadableImage
from .export import DEFAULT_PROMPT, ExportJob, read_labels, run_export, scan_images

__version__ = "0.1.0"

__all__ = [
    "ClipEncoder",
    "DEFAULT_PROMPT",
    "EmptyLabels",
    "ExportError",
    "ExportJob",
    "ModelLoadFailure",
    "ToyEncoder",
    "UnreadableImage",
    "read_labels",
    "run_export",
    "scan_images",
    "write_emb1",
]
