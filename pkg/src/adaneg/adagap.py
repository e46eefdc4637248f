"""Streaming estimate of the in-distribution mix ratio and the gap widening
it drives.

The estimator keeps a bounded FIFO of boolean "looked in-distribution" votes.
Its mean is the estimated fraction of ID traffic. When the stream is lopsided
the gap test widens on the rare side: a scarce class must clear a larger
margin before it is allowed into the memory, which keeps a 100:1 stream from
flooding the negative rows with misjudged ID features.
"""

from __future__ import annotations

from collections import deque

from .memory import KIND_NEGATIVE, KIND_POSITIVE, KIND_SKIP, caching_decision

DEFAULT_QUEUE_LEN = 10000

RECORD_THRESHOLD = "threshold"
RECORD_GAP = "gap"

_RECORD_RULES = (RECORD_THRESHOLD, RECORD_GAP)


class MixRatioEstimator:
    """Bounded FIFO of ID votes with an O(1) running mean.

    Before any vote arrives the ratio reports 0.5: no evidence either way.
    """

    def __init__(self, queue_len: int = DEFAULT_QUEUE_LEN):
        if queue_len < 1:
            raise ValueError(f"queue_len must be >= 1, got {queue_len}")
        self.queue_len = queue_len
        self._votes: deque[bool] = deque()
        self._positive = 0

    def __len__(self) -> int:
        return len(self._votes)

    @property
    def mix_ratio(self) -> float:
        if not self._votes:
            return 0.5
        return self._positive / len(self._votes)

    def record(self, looks_id: bool) -> None:
        if len(self._votes) == self.queue_len:
            self._positive -= self._votes.popleft()
        self._votes.append(bool(looks_id))
        self._positive += bool(looks_id)


def adaptive_gaps(gap: float, mix_ratio: float) -> tuple[float, float]:
    """Widen each side's margin to at least the estimated share of the
    opposite class: (gap_neg, gap_pos) = (max(gap, mr), max(gap, 1 - mr))."""
    return max(gap, mix_ratio), max(gap, 1.0 - mix_ratio)


def adaptive_decision(
    s_nl: float, gamma: float, gap: float, mix_ratio: float
) -> str:
    """Gap test with margins widened by the current mix-ratio estimate."""
    gap_neg, gap_pos = adaptive_gaps(gap, mix_ratio)
    return caching_decision(s_nl, gamma, gap_neg, gap_pos)


def vote_for(kind: str, s_nl: float, gamma: float, record_rule: str) -> bool | None:
    """What to push into the estimator after a decision, or None to skip.

    "threshold" votes on every sample from the plain s >= gamma test;
    "gap" votes only when the sample was actually cached, using the side
    it was cached on.
    """
    if record_rule == RECORD_THRESHOLD:
        return s_nl >= gamma
    if record_rule == RECORD_GAP:
        if kind == KIND_POSITIVE:
            return True
        if kind == KIND_NEGATIVE:
            return False
        if kind == KIND_SKIP:
            return None
        raise ValueError(f"unknown decision kind {kind!r}")
    raise ValueError(f"record_rule must be one of {_RECORD_RULES}, got {record_rule!r}")
