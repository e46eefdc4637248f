"""Detection metrics. Convention throughout: higher score means more
in-distribution, ID samples are the positive class.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import EmptyPopulation, LengthMismatch, NonFiniteValue
from .scoring import DEFAULT_TAU, id_mass, softmax


def _as_scores(x, name: str) -> np.ndarray:
    a = np.asarray(x, dtype=np.float64).ravel()
    if a.size == 0:
        raise EmptyPopulation(f"{name} is empty")
    if not np.isfinite(a).all():
        raise NonFiniteValue(f"{name} contains NaN or Inf")
    return a


def _average_ranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks with ties sharing their group's average rank."""
    order = np.argsort(values, kind="mergesort")
    svals = values[order]
    n = svals.size
    boundaries = np.nonzero(np.diff(svals))[0] + 1
    starts = np.concatenate([[0], boundaries])
    ends = np.concatenate([boundaries, [n]])
    group_avg = (starts + ends - 1) / 2.0 + 1.0
    ranks = np.empty(n, dtype=np.float64)
    ranks[order] = np.repeat(group_avg, ends - starts)
    return ranks


def auroc(id_scores, ood_scores) -> float:
    """Area under the ROC curve via the rank-sum identity.

    Equals the probability that a random ID score exceeds a random OOD
    score, with ties counted half. Tie groups get average ranks, so the
    result matches the O(n*m) pairwise count exactly.
    """
    pos = _as_scores(id_scores, "id_scores")
    neg = _as_scores(ood_scores, "ood_scores")
    ranks = _average_ranks(np.concatenate([pos, neg]))
    rank_sum = ranks[: pos.size].sum()
    u = rank_sum - pos.size * (pos.size + 1) / 2.0
    return float(u / (pos.size * neg.size))


def fpr_at_95_tpr(id_scores, ood_scores) -> float:
    """False positive rate at the lowest threshold reaching 95% TPR.

    The threshold is the k-th largest ID score with k = ceil(0.95 * n_id);
    scoring >= threshold counts as an ID call on both sides.
    """
    pos = _as_scores(id_scores, "id_scores")
    neg = _as_scores(ood_scores, "ood_scores")
    k = math.ceil(0.95 * pos.size)
    threshold = np.sort(pos)[::-1][k - 1]
    return float(np.mean(neg >= threshold))


def id_accuracy(scores, pseudo_labels, truth, gamma: float = 0.5) -> float:
    """Fraction of ID samples both detected (score >= gamma) and labeled
    with their true class. OOD samples are ignored.

    truth holds an int class per ID sample and None per OOD sample.
    """
    s = np.asarray(scores, dtype=np.float64).ravel()
    labels = list(pseudo_labels)
    truths = list(truth)
    if not len(s) == len(labels) == len(truths):
        raise LengthMismatch(
            f"scores/pseudo_labels/truth lengths differ: {len(s)}/{len(labels)}/{len(truths)}"
        )
    hits = 0
    total = 0
    for score, label, true_cls in zip(s, labels, truths):
        if true_cls is None:
            continue
        total += 1
        if score >= gamma and label == true_cls:
            hits += 1
    if total == 0:
        raise EmptyPopulation("no ID samples in truth")
    return hits / total


def isor(
    proxy_vectors: np.ndarray,
    id_proxies: np.ndarray,
    ood_proxies: np.ndarray,
    tau: float = DEFAULT_TAU,
) -> np.ndarray:
    """In-distribution mass of proxy vectors scored against the true split.

    Each proxy vector is scored with the usual temperature-softmax mass, but
    the contrast set is the ground-truth one: ID label proxies as the
    positive block and the actual OOD directions as the negative block. High
    values mean a learned proxy still points at ID semantics; low values on
    negative-row proxies mean the memory really captured the OOD region.
    """
    v = np.atleast_2d(np.asarray(proxy_vectors, dtype=np.float64))
    idp = np.atleast_2d(np.asarray(id_proxies, dtype=np.float64))
    oodp = np.atleast_2d(np.asarray(ood_proxies, dtype=np.float64))
    if idp.size == 0 or oodp.size == 0:
        raise EmptyPopulation("both proxy blocks must be non-empty")
    stacked = np.vstack([idp, oodp])
    p = softmax(v @ stacked.T / tau, axis=-1)
    return np.asarray(id_mass(p, idp.shape[0]), dtype=np.float64)


def metric_report(
    scores,
    truth,
    pseudo_labels=None,
    gamma: float = 0.5,
    dataset_names=None,
) -> dict:
    """Bundle the headline metrics for one scored stream.

    truth holds int class per ID sample, None per OOD sample. When
    dataset_names is given (one string per sample; ignored for ID rows) the
    report adds a per_dataset breakdown of each OOD source against the
    shared ID population.
    """
    s = np.asarray(scores, dtype=np.float64).ravel()
    truths = list(truth)
    if len(s) != len(truths):
        raise LengthMismatch(f"{len(s)} scores for {len(truths)} truth entries")
    is_id = np.array([t is not None for t in truths], dtype=bool)
    id_scores = s[is_id]
    ood_scores = s[~is_id]
    report = {
        "auroc": auroc(id_scores, ood_scores),
        "fpr95": fpr_at_95_tpr(id_scores, ood_scores),
        "id_acc": None,
        "n_id": int(is_id.sum()),
        "n_ood": int((~is_id).sum()),
        "per_dataset": {},
    }
    if pseudo_labels is not None:
        report["id_acc"] = id_accuracy(s, pseudo_labels, truths, gamma)
    if dataset_names is not None:
        names = list(dataset_names)
        if len(names) != len(truths):
            raise LengthMismatch(f"{len(names)} dataset names for {len(truths)} samples")
        by_name: dict[str, list[float]] = {}
        for score, t, name in zip(s, truths, names):
            if t is None:
                by_name.setdefault(name, []).append(score)
        for name in sorted(by_name):
            block = np.array(by_name[name])
            report["per_dataset"][name] = {
                "auroc": auroc(id_scores, block),
                "fpr95": fpr_at_95_tpr(id_scores, block),
                "n_ood": int(block.size),
            }
    return report
