"""Streaming out-of-distribution detection with negative labels and a
test-time feature memory.

The engine scores unit-norm embeddings against text proxies (known classes
plus mined negative labels), caches confident test features into a per-class
memory, and re-scores against memory-derived proxies that adapt to the
deployment distribution as the stream unfolds.
"""

from .adagap import MixRatioEstimator, adaptive_decision, adaptive_gaps
from .embeddings import Dataset, GroundTruth, ProxyMatrix, load_manifest, normalize_rows
from .embfile import EmbeddingFile, read_embedding_file, write_embedding_file
from .errors import AdanegError
from .memory import CacheDecision, TaskAwareMemory, caching_decision, footprint_bytes
from .metrics import auroc, fpr_at_95_tpr, id_accuracy, isor, metric_report
from .pipeline import (
    RunConfig,
    RunResult,
    SampleRecord,
    read_records_csv,
    run_stream,
    write_records_csv,
)
from .scoring import binary_entropy, class_posteriors, neglabel_score, pseudo_label
from .synth import SyntheticSpec, benchmark_spec, sample_vmf, synthesize_dataset

__version__ = "0.1.0"

__all__ = [
    "AdanegError",
    "CacheDecision",
    "Dataset",
    "EmbeddingFile",
    "GroundTruth",
    "MixRatioEstimator",
    "ProxyMatrix",
    "RunConfig",
    "RunResult",
    "SampleRecord",
    "SyntheticSpec",
    "TaskAwareMemory",
    "adaptive_decision",
    "adaptive_gaps",
    "auroc",
    "benchmark_spec",
    "binary_entropy",
    "caching_decision",
    "class_posteriors",
    "footprint_bytes",
    "fpr_at_95_tpr",
    "id_accuracy",
    "isor",
    "load_manifest",
    "metric_report",
    "neglabel_score",
    "normalize_rows",
    "pseudo_label",
    "read_embedding_file",
    "read_records_csv",
    "run_stream",
    "sample_vmf",
    "synthesize_dataset",
    "write_embedding_file",
    "write_records_csv",
]
