"""Task-aware feature memory and the proxies computed from it.

The memory is a fixed (C+M, L, D) block of float32 slots, zero-initialized.
Class k owns row k; the first C rows belong to in-distribution labels and the
remaining M to negative labels. Slots fill in arrival order. Once a class is
full, a candidate replaces the first highest-entropy slot, and only if the
candidate's entropy is strictly lower. Low entropy means the score was far
from the decision boundary, so the memory drifts toward confident features.

Zero slots are algebraically neutral in both proxy constructions: they add
nothing to the task-adaptive average (normalization absorbs the constant
divisor) and nothing to the sample-adaptive weighted sum (the weighted vector
is the zero vector). No occupancy masking is needed.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DegenerateProxy, DimensionMismatch

DEFAULT_MEM_LEN = 10

KIND_POSITIVE = "positive"
KIND_NEGATIVE = "negative"
KIND_SKIP = "skip"


@dataclass(frozen=True)
class CacheDecision:
    """Outcome of the gap test for one sample."""

    kind: str  # positive | negative | skip
    label: int | None  # class row to insert into, None when skipped


def caching_decision(
    s_nl: float, gamma: float, gap_neg: float, gap_pos: float
) -> str:
    """Two-sided gap test around the detection threshold.

    A score must clear the threshold by a margin scaled to the room on its
    side: negative iff s < gamma - gap_neg*gamma, positive iff
    s >= gamma + gap_pos*(1-gamma), otherwise skip.
    """
    if s_nl < gamma - gap_neg * gamma:
        return KIND_NEGATIVE
    if s_nl >= gamma + gap_pos * (1.0 - gamma):
        return KIND_POSITIVE
    return KIND_SKIP


def footprint_bytes(num_rows: int, mem_len: int, dim: int) -> int:
    """Storage cost of the slot block alone (float32 payload)."""
    return num_rows * mem_len * dim * 4


class TaskAwareMemory:
    """Per-class slot store with entropy-gated replacement."""

    def __init__(self, num_rows: int, dim: int, mem_len: int = DEFAULT_MEM_LEN):
        if num_rows < 1 or dim < 1 or mem_len < 1:
            raise ValueError("num_rows, dim and mem_len must all be >= 1")
        self.num_rows = num_rows
        self.dim = dim
        self.mem_len = mem_len
        self.slots = np.zeros((num_rows, mem_len, dim), dtype=np.float32)
        self.entropies = np.full((num_rows, mem_len), np.inf, dtype=np.float64)
        self.counts = np.zeros(num_rows, dtype=np.int64)
        # Bumped on every mutation; lets callers cache derived proxies.
        self.version = 0

    def insert(self, row: int, vector: np.ndarray, entropy: float) -> bool:
        """Offer a feature to class `row`. Returns True if it was stored."""
        if not 0 <= row < self.num_rows:
            raise IndexError(f"row {row} out of range for {self.num_rows} classes")
        v = np.asarray(vector, dtype=np.float64)
        if v.shape != (self.dim,):
            raise DimensionMismatch(f"expected a ({self.dim},) vector, got {v.shape}")
        n = int(self.counts[row])
        if n < self.mem_len:
            self.slots[row, n] = v.astype(np.float32)
            self.entropies[row, n] = entropy
            self.counts[row] += 1
            self.version += 1
            return True
        worst = int(np.argmax(self.entropies[row]))
        if entropy < self.entropies[row, worst]:
            self.slots[row, worst] = v.astype(np.float32)
            self.entropies[row, worst] = entropy
            self.version += 1
            return True
        return False

    def task_adaptive_proxies(self, text_proxies: np.ndarray) -> np.ndarray:
        """Average each class's slots with its text proxy, then renormalize.

        Every class yields one unit vector; empty classes reduce to their
        text proxy exactly.
        """
        text = np.asarray(text_proxies, dtype=np.float64)
        if text.shape != (self.num_rows, self.dim):
            raise DimensionMismatch(
                f"expected ({self.num_rows}, {self.dim}) text proxies, got {text.shape}"
            )
        summed = self.slots.astype(np.float64).sum(axis=1) + text
        norms = np.linalg.norm(summed, axis=1)
        if (norms == 0.0).any():
            bad = int(np.nonzero(norms == 0.0)[0][0])
            raise DegenerateProxy(f"class {bad}: slot sum cancelled its text proxy")
        return summed / norms[:, None]

    def sample_adaptive_proxies(
        self, vector: np.ndarray, text_proxies: np.ndarray, beta: float
    ) -> np.ndarray:
        """Per-class proxies reweighted toward the query vector.

        Each slot (and the text proxy, as an extra always-present slot) gets
        weight exp(-beta * (1 - <slot, v>)); the weighted sum is renormalized
        to unit length. Weights stay unnormalized: only the direction of the
        sum matters after the final normalization.
        """
        v = np.asarray(vector, dtype=np.float64)
        if v.shape != (self.dim,):
            raise DimensionMismatch(f"expected a ({self.dim},) vector, got {v.shape}")
        text = np.asarray(text_proxies, dtype=np.float64)
        if text.shape != (self.num_rows, self.dim):
            raise DimensionMismatch(
                f"expected ({self.num_rows}, {self.dim}) text proxies, got {text.shape}"
            )
        slots = self.slots.astype(np.float64)
        slot_w = np.exp(-beta * (1.0 - slots @ v))  # (K, L)
        text_w = np.exp(-beta * (1.0 - text @ v))  # (K,)
        weighted = np.einsum("kl,kld->kd", slot_w, slots) + text_w[:, None] * text
        norms = np.linalg.norm(weighted, axis=1)
        if (norms == 0.0).any():
            bad = int(np.nonzero(norms == 0.0)[0][0])
            raise DegenerateProxy(f"class {bad}: weighted slot sum has zero norm")
        return weighted / norms[:, None]

    def occupancy(self) -> dict:
        """Fill statistics, cheap enough to log every few thousand samples."""
        used = int(self.counts.sum())
        total = self.num_rows * self.mem_len
        return {
            "used_slots": used,
            "total_slots": total,
            "fill_fraction": used / total,
            "full_rows": int((self.counts == self.mem_len).sum()),
            "empty_rows": int((self.counts == 0).sum()),
            "version": self.version,
        }

    def save(self, path: str | Path) -> None:
        np.savez_compressed(
            path,
            slots=self.slots,
            entropies=self.entropies,
            counts=self.counts,
            version=np.int64(self.version),
        )

    @classmethod
    def load(cls, path: str | Path) -> "TaskAwareMemory":
        with np.load(path) as data:
            slots = data["slots"]
            mem = cls(slots.shape[0], slots.shape[2], slots.shape[1])
            mem.slots = slots.copy()
            mem.entropies = data["entropies"].copy()
            mem.counts = data["counts"].copy()
            mem.version = int(data["version"])
        return mem
