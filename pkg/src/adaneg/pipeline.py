"""Streaming engine: one pass over a test stream, scoring and caching.

Order of operations per sample, which tests replay exactly:

1. posteriors against the text proxies, text score s_nl
2. caching decision from s_nl (gaps widened by the mix-ratio estimate when
   the adaptive queue is on; the estimate excludes the current sample)
3. pseudo-label on the side s_nl falls on
4. memory insert when the decision was not skip (never in text-only mode)
5. push the sample's ID vote into the estimator
6. memory scores s_ta and s_sa against the post-insert memory, fused score

The caching decision reads only s_nl, so the memory evolves identically in
every memory-backed mode; modes differ only in which score becomes s_all.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .adagap import DEFAULT_QUEUE_LEN, MixRatioEstimator, RECORD_THRESHOLD, adaptive_gaps, vote_for
from .embeddings import Dataset
from .errors import ConfigInvalid, EmptyInput, FileUnreadable, LengthMismatch
from .memory import (
    DEFAULT_MEM_LEN,
    KIND_SKIP,
    TaskAwareMemory,
    caching_decision,
)
from .scoring import (
    DEFAULT_TAU,
    binary_entropy,
    class_posteriors,
    combined_score,
    id_mass,
    pseudo_label,
    score_from_cosines,
)

MODES = ("nl", "ta", "sa", "all")
FUSES = ("ta", "sa")

CSV_COLUMNS = (
    "index",
    "truth",
    "s_nl",
    "s_ta",
    "s_sa",
    "s_all",
    "pseudo_label",
    "cached",
    "mr",
)


@dataclass
class RunConfig:
    """Engine knobs. Defaults are the operating point used throughout."""

    gamma: float = 0.5
    gap: float = 0.5
    beta: float = 5.5
    lam: float = 0.1
    tau: float = DEFAULT_TAU
    mem_len: int = DEFAULT_MEM_LEN
    mode: str = "all"
    fuse: str = "sa"
    adagap: bool = False
    queue_len: int = DEFAULT_QUEUE_LEN
    record_rule: str = RECORD_THRESHOLD

    def validate(self) -> None:
        if not 0.0 < self.gamma < 1.0:
            raise ConfigInvalid(f"gamma must be in (0, 1), got {self.gamma}")
        if not 0.0 <= self.gap <= 1.0:
            raise ConfigInvalid(f"gap must be in [0, 1], got {self.gap}")
        if self.beta < 0.0:
            raise ConfigInvalid(f"beta must be >= 0, got {self.beta}")
        if self.lam < 0.0:
            raise ConfigInvalid(f"lambda must be >= 0, got {self.lam}")
        if self.tau <= 0.0:
            raise ConfigInvalid(f"tau must be positive, got {self.tau}")
        if self.mem_len < 1:
            raise ConfigInvalid(f"mem_len must be >= 1, got {self.mem_len}")
        if self.mode not in MODES:
            raise ConfigInvalid(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.fuse not in FUSES:
            raise ConfigInvalid(f"fuse must be one of {FUSES}, got {self.fuse!r}")
        if self.queue_len < 1:
            raise ConfigInvalid(f"queue_len must be >= 1, got {self.queue_len}")
        if self.record_rule not in ("threshold", "gap"):
            raise ConfigInvalid(f"unknown record_rule {self.record_rule!r}")

    @classmethod
    def from_dict(cls, doc: dict) -> "RunConfig":
        known = {f for f in cls.__dataclass_fields__}
        bad = set(doc) - known
        if bad:
            raise ConfigInvalid(f"unknown config keys: {sorted(bad)}")
        cfg = cls(**doc)
        cfg.validate()
        return cfg


@dataclass
class SampleRecord:
    """One scored stream sample, exactly one CSV row."""

    index: int
    truth: int | str | None  # class for id, "ood" for ood, None when unknown
    s_nl: float
    s_ta: float
    s_sa: float
    s_all: float
    pseudo_label: int
    cached: str  # positive | negative | skip
    mr: float | None  # estimator value used for the decision, None if off


@dataclass
class RunResult:
    records: list[SampleRecord]
    memory: TaskAwareMemory | None
    config: RunConfig
    occupancy: dict = field(default_factory=dict)

    def score_column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records])

    @property
    def truth(self) -> list[int | None]:
        return truth_labels(self.records)


def truth_labels(records: list["SampleRecord"]) -> list[int | None]:
    """Ground truth as metrics expect it: int class per id row, None per ood.

    Raises if any row has no recorded truth at all.
    """
    out: list[int | None] = []
    for r in records:
        if r.truth is None:
            raise EmptyInput(f"record {r.index} has no ground truth")
        out.append(None if r.truth == "ood" else int(r.truth))
    return out


class _TaskProxyCache:
    """Recomputes the task-adaptive proxy matrix only after a mutation."""

    def __init__(self, memory: TaskAwareMemory, text: np.ndarray):
        self.memory = memory
        self.text = text
        self._version = -1
        self._proxies: np.ndarray | None = None

    def get(self) -> np.ndarray:
        if self._version != self.memory.version:
            self._proxies = self.memory.task_adaptive_proxies(self.text)
            self._version = self.memory.version
        return self._proxies


def run_stream(dataset: Dataset, config: RunConfig | None = None) -> RunResult:
    """Score every stream sample in arrival order."""
    config = config or RunConfig()
    config.validate()
    proxies = dataset.proxies
    text = proxies.stacked
    num_id = proxies.num_id
    if dataset.truth is not None:
        truth = ["ood" if lab is None else lab for lab in dataset.truth.labels]
    else:
        truth = [None] * len(dataset.stream)
    if len(truth) != len(dataset.stream):
        raise LengthMismatch(
            f"{len(truth)} truth entries for {len(dataset.stream)} stream rows"
        )

    use_memory = config.mode != "nl"
    memory = (
        TaskAwareMemory(text.shape[0], text.shape[1], config.mem_len)
        if use_memory
        else None
    )
    task_cache = _TaskProxyCache(memory, text) if memory is not None else None
    estimator = MixRatioEstimator(config.queue_len) if config.adagap else None

    records: list[SampleRecord] = []
    for index, vector in enumerate(dataset.stream):
        posteriors = class_posteriors(vector, text, config.tau)
        s_nl = float(id_mass(posteriors, num_id))

        if estimator is not None:
            mr = estimator.mix_ratio
            gap_neg, gap_pos = adaptive_gaps(config.gap, mr)
        else:
            mr = None
            gap_neg = gap_pos = config.gap
        kind = caching_decision(s_nl, config.gamma, gap_neg, gap_pos)

        side = "id" if s_nl >= config.gamma else "neg"
        label = pseudo_label(posteriors, num_id, side)

        if memory is not None and kind != KIND_SKIP:
            memory.insert(label, vector, binary_entropy(s_nl))
        if estimator is not None:
            vote = vote_for(kind, s_nl, config.gamma, config.record_rule)
            if vote is not None:
                estimator.record(vote)

        if memory is not None:
            task_proxies = task_cache.get()
            s_ta = score_from_cosines(task_proxies @ vector, num_id, config.tau)
            sample_proxies = memory.sample_adaptive_proxies(vector, text, config.beta)
            s_sa = score_from_cosines(sample_proxies @ vector, num_id, config.tau)
        else:
            s_ta = s_nl
            s_sa = s_nl

        if config.mode == "nl":
            s_all = s_nl
        elif config.mode == "ta":
            s_all = s_ta
        elif config.mode == "sa":
            s_all = s_sa
        else:
            s_all = combined_score(s_nl, s_sa if config.fuse == "sa" else s_ta, config.lam)

        records.append(
            SampleRecord(
                index=index,
                truth=truth[index],
                s_nl=s_nl,
                s_ta=s_ta,
                s_sa=s_sa,
                s_all=s_all,
                pseudo_label=label,
                cached=kind if memory is not None else KIND_SKIP,
                mr=mr,
            )
        )

    return RunResult(
        records=records,
        memory=memory,
        config=config,
        occupancy=memory.occupancy() if memory is not None else {},
    )


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_records_csv(path: str | Path, records: list[SampleRecord]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for r in records:
            writer.writerow(
                [
                    r.index,
                    "" if r.truth is None else r.truth,
                    _fmt(r.s_nl),
                    _fmt(r.s_ta),
                    _fmt(r.s_sa),
                    _fmt(r.s_all),
                    r.pseudo_label,
                    r.cached,
                    "" if r.mr is None else _fmt(r.mr),
                ]
            )


def read_records_csv(path: str | Path) -> list[SampleRecord]:
    records: list[SampleRecord] = []
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise FileUnreadable(f"{path}: cannot read records ({exc})") from exc
    with fh:
        reader = csv.DictReader(fh)
        missing = set(CSV_COLUMNS) - set(reader.fieldnames or [])
        if missing:
            raise LengthMismatch(f"{path}: missing columns {sorted(missing)}")
        for row in reader:
            raw_truth = row["truth"]
            if raw_truth == "":
                truth: int | str | None = None
            elif raw_truth == "ood":
                truth = "ood"
            else:
                truth = int(raw_truth)
            records.append(
                SampleRecord(
                    index=int(row["index"]),
                    truth=truth,
                    s_nl=float(row["s_nl"]),
                    s_ta=float(row["s_ta"]),
                    s_sa=float(row["s_sa"]),
                    s_all=float(row["s_all"]),
                    pseudo_label=int(row["pseudo_label"]),
                    cached=row["cached"],
                    mr=float(row["mr"]) if row["mr"] else None,
                )
            )
    return records


def config_to_json(config: RunConfig, path: str | Path) -> None:
    Path(path).write_text(json.dumps(asdict(config), indent=2) + "\n")
