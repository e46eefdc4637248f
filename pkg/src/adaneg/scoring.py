"""Score kernel: temperature softmax over proxy cosines and derived scores.

Every score in the engine has the same shape: cosine similarities against a
proxy matrix whose first `num_id` rows are in-distribution labels, pushed
through a temperature softmax, then summed over the in-distribution block.
The result lives in (0, 1) up to floating-point saturation and reads as
"probability mass on known labels".
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, EmptyInput, NonFiniteValue

DEFAULT_TAU = 0.01


def softmax(logits: np.ndarray, axis: int = -1) -> np.ndarray:
    """Numerically stable softmax along `axis` in float64."""
    z = np.asarray(logits, dtype=np.float64)
    z = z - z.max(axis=axis, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=axis, keepdims=True)


def class_posteriors(
    vectors: np.ndarray, proxies: np.ndarray, tau: float = DEFAULT_TAU
) -> np.ndarray:
    """Softmax posteriors of unit vectors against a stacked proxy matrix.

    vectors: (D,) or (N, D); proxies: (K, D). Returns (K,) or (N, K).
    """
    if tau <= 0.0:
        raise ValueError(f"tau must be positive, got {tau}")
    v = np.asarray(vectors, dtype=np.float64)
    p = np.asarray(proxies, dtype=np.float64)
    if p.ndim != 2 or p.shape[0] == 0:
        raise EmptyInput("proxy matrix must have at least one row")
    if v.shape[-1] != p.shape[1]:
        raise DimensionMismatch(
            f"vector dim {v.shape[-1]} does not match proxy dim {p.shape[1]}"
        )
    logits = v @ p.T / tau
    if not np.isfinite(logits).all():
        raise NonFiniteValue("cosine logits contain NaN or Inf")
    return softmax(logits, axis=-1)


def id_mass(posteriors: np.ndarray, num_id: int) -> np.ndarray | float:
    """Sum of posterior mass on the first `num_id` entries."""
    p = np.asarray(posteriors, dtype=np.float64)
    if not 0 < num_id <= p.shape[-1]:
        raise DimensionMismatch(
            f"num_id={num_id} out of range for {p.shape[-1]} posterior entries"
        )
    out = p[..., :num_id].sum(axis=-1)
    return float(out) if out.ndim == 0 else out

def neglabel_score(
    vector: np.ndarray, proxies: np.ndarray, num_id: int, tau: float = DEFAULT_TAU
) -> float:
    """Known-label mass of one unit vector against the stacked text proxies."""
    return float(id_mass(class_posteriors(vector, proxies, tau), num_id))


def score_from_cosines(cosines: np.ndarray, num_id: int, tau: float = DEFAULT_TAU) -> float:
    """Known-label mass from precomputed cosines (one row)."""
    return float(id_mass(softmax(np.asarray(cosines, dtype=np.float64) / tau), num_id))


def pseudo_label(posteriors: np.ndarray, num_id: int, side: str) -> int:
    """Most likely label on one side of the proxy split.

    side="id" returns argmax over the first num_id entries; side="neg"
    returns num_id + argmax over the rest. Ties break to the lowest index.
    """
    p = np.asarray(posteriors, dtype=np.float64)
    if side == "id":
        return int(np.argmax(p[:num_id]))
    if side == "neg":
        if p.shape[-1] <= num_id:
            raise DimensionMismatch("no negative entries to label")
        return num_id + int(np.argmax(p[num_id:]))
    raise ValueError(f"side must be 'id' or 'neg', got {side!r}")


def combined_score(s_base: float, s_proxy: float, lam: float) -> float:
    """Late fusion of the text-proxy score with a memory-proxy score."""
    return s_base + lam * s_proxy


_ENTROPY_EPS = 1e-12


def binary_entropy(score: float) -> float:
    """Entropy (nats) of a Bernoulli with parameter `score`.

    The argument is clamped to [1e-12, 1 - 1e-12] so saturated scores map to
    a tiny positive entropy instead of a 0*log(0) NaN.
    """
    p = min(max(float(score), _ENTROPY_EPS), 1.0 - _ENTROPY_EPS)
    return float(-(p * np.log(p) + (1.0 - p) * np.log1p(-p)))
