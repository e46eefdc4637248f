"""Experiment drivers built on run_stream.

Each driver returns a JSON-serializable dict; the CLI owns file writing and
figure rendering. Anything that only re-fuses already-computed scores avoids
a rerun: the memory trajectory depends only on s_nl and the gap knobs, so
one memory-backed run carries every fusion variant of itself.
"""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from .embeddings import Dataset, GroundTruth
from .errors import ConfigInvalid
from .metrics import auroc, fpr_at_95_tpr, metric_report
from .pipeline import RunConfig, RunResult, SampleRecord, run_stream, truth_labels
from .scoring import combined_score
from .synth import SyntheticSpec, synthesize_dataset, with_mix_ratio

# Knobs that change s_all without touching the memory trajectory.
_REFUSE_ONLY = ("lam",)
_INT_FIELDS = ("mem_len", "queue_len")


def rescore(records: list[SampleRecord], mode: str, lam: float, fuse: str = "sa") -> np.ndarray:
    """Recompute s_all from stored component scores."""
    if mode == "nl":
        return np.array([r.s_nl for r in records])
    if mode == "ta":
        return np.array([r.s_ta for r in records])
    if mode == "sa":
        return np.array([r.s_sa for r in records])
    if mode == "all":
        key = "s_sa" if fuse == "sa" else "s_ta"
        return np.array(
            [combined_score(r.s_nl, getattr(r, key), lam) for r in records]
        )
    raise ConfigInvalid(f"unknown mode {mode!r}")


def result_report(result: RunResult, dataset_names=None) -> dict:
    """Headline metrics of one run, from its own records."""
    return metric_report(
        result.score_column("s_all"),
        result.truth,
        pseudo_labels=[r.pseudo_label for r in result.records],
        gamma=result.config.gamma,
        dataset_names=dataset_names,
    )


def mode_table(result: RunResult) -> dict:
    """AUROC/FPR95 of every score column of one memory-backed run."""
    truth = result.truth
    is_id = np.array([t is not None for t in truth])
    table = {}
    for column in ("s_nl", "s_ta", "s_sa", "s_all"):
        scores = result.score_column(column)
        table[column] = {
            "auroc": auroc(scores[is_id], scores[~is_id]),
            "fpr95": fpr_at_95_tpr(scores[is_id], scores[~is_id]),
        }
    return table


def sweep_parameter(
    dataset: Dataset, config: RunConfig, param: str, values: list[float]
) -> dict:
    """Metrics as one knob moves. Fusion-only knobs reuse a single run."""
    if param not in RunConfig.__dataclass_fields__:
        raise ConfigInvalid(f"unknown config field {param!r}")
    if not values:
        raise ConfigInvalid("sweep needs at least one value")
    rows = []
    if param in _REFUSE_ONLY:
        base = run_stream(dataset, replace(config, mode="all"))
        is_id = np.array([t is not None for t in base.truth])
        for value in values:
            scores = rescore(base.records, "all", float(value), config.fuse)
            rows.append(
                {
                    "value": value,
                    "auroc": auroc(scores[is_id], scores[~is_id]),
                    "fpr95": fpr_at_95_tpr(scores[is_id], scores[~is_id]),
                }
            )
    else:
        for value in values:
            cast = int(value) if param in _INT_FIELDS else float(value)
            result = run_stream(dataset, replace(config, **{param: cast}))
            report = result_report(result)
            rows.append(
                {"value": value, "auroc": report["auroc"], "fpr95": report["fpr95"]}
            )
    return {"param": param, "rows": rows}


def mixture_experiment(
    spec: SyntheticSpec,
    config: RunConfig,
    ratios: list[float],
    total: int,
) -> dict:
    """Detection quality as the ID:OOD ratio skews, with and without the
    adaptive gap queue."""
    rows = []
    for ratio in ratios:
        dataset = synthesize_dataset(with_mix_ratio(spec, ratio, total))
        row = {"ratio": ratio}
        for label, adagap in (("base", False), ("adagap", True)):
            result = run_stream(dataset, replace(config, adagap=adagap))
            report = result_report(result)
            row[label] = {
                "auroc": report["auroc"],
                "fpr95": report["fpr95"],
                "n_id": report["n_id"],
                "n_ood": report["n_ood"],
            }
        rows.append(row)
    return {"total": total, "rows": rows}


def _permuted(dataset: Dataset, rng: np.random.Generator) -> Dataset:
    order = rng.permutation(len(dataset.stream))
    truth = None
    if dataset.truth is not None:
        truth = GroundTruth([dataset.truth.labels[i] for i in order])
    return Dataset(proxies=dataset.proxies, stream=dataset.stream[order], truth=truth)


def ordering_experiment(
    dataset: Dataset, config: RunConfig, repeats: int, seed: int = 0
) -> dict:
    """Sensitivity to arrival order: same stream, shuffled, scored repeatedly."""
    if repeats < 2:
        raise ConfigInvalid("ordering experiment needs repeats >= 2")
    rng = np.random.default_rng(seed)
    aurocs = []
    fprs = []
    for _ in range(repeats):
        result = run_stream(_permuted(dataset, rng), config)
        report = result_report(result)
        aurocs.append(report["auroc"])
        fprs.append(report["fpr95"])
    return {
        "repeats": repeats,
        "auroc": aurocs,
        "fpr95": fprs,
        "auroc_spread": max(aurocs) - min(aurocs),
        "fpr95_spread": max(fprs) - min(fprs),
    }


def isor_report(dataset: Dataset, config: RunConfig, tau: float | None = None) -> dict:
    """ISOR of the learned task proxies against the true OOD directions.

    Only meaningful for generated datasets that carry their cluster centers.
    """
    from .metrics import isor

    ood_centers = getattr(dataset, "ood_centers", None)
    if ood_centers is None or len(ood_centers) == 0:
        raise ConfigInvalid("dataset carries no ground-truth ood directions")
    result = run_stream(dataset, config)
    if result.memory is None:
        raise ConfigInvalid("text-only mode builds no proxies to evaluate")
    proxies = result.memory.task_adaptive_proxies(dataset.proxies.stacked)
    values = isor(
        proxies,
        dataset.proxies.id_proxies,
        ood_centers,
        tau if tau is not None else config.tau,
    )
    num_id = dataset.proxies.num_id
    text_values = isor(
        dataset.proxies.stacked,
        dataset.proxies.id_proxies,
        ood_centers,
        tau if tau is not None else config.tau,
    )
    return {
        "id_rows": values[:num_id].tolist(),
        "neg_rows": values[num_id:].tolist(),
        "id_rows_text_only": text_values[:num_id].tolist(),
        "neg_rows_text_only": text_values[num_id:].tolist(),
        "id_mean": float(values[:num_id].mean()),
        "neg_mean": float(values[num_id:].mean()) if num_id < len(values) else None,
        "occupancy": result.occupancy,
    }
