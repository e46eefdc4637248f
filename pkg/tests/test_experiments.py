"""Drivers on top of run_stream: sweeps, mixtures, ordering, proxy audit."""

from dataclasses import replace

import numpy as np
import pytest

from adaneg.embeddings import Dataset
from adaneg.errors import ConfigInvalid
from adaneg.experiments import (
    isor_report,
    mixture_experiment,
    mode_table,
    ordering_experiment,
    rescore,
    result_report,
    sweep_parameter,
)
from adaneg.pipeline import RunConfig, run_stream
from adaneg.synth import SyntheticSpec, synthesize_dataset


def small_spec(**overrides) -> SyntheticSpec:
    base = dict(
        num_classes=3,
        num_negatives=6,
        dim=12,
        misaligned_dim=3,
        n_id=60,
        n_ood=60,
        kappa_id=60.0,
        kappa_ood=60.0,
        ood_clusters=2,
        seed=11,
    )
    base.update(overrides)
    return SyntheticSpec(**base)


@pytest.fixture(scope="module")
def small_dataset():
    return synthesize_dataset(small_spec())


@pytest.fixture(scope="module")
def small_result(small_dataset):
    return run_stream(small_dataset, RunConfig())


def test_rescore_reproduces_every_column(small_result):
    records = small_result.records
    for mode in ("nl", "ta", "sa"):
        assert np.array_equal(
            rescore(records, mode, lam=0.3), small_result.score_column(f"s_{mode}")
        )
    assert np.array_equal(
        rescore(records, "all", lam=0.1, fuse="sa"), small_result.score_column("s_all")
    )
    with pytest.raises(ConfigInvalid):
        rescore(records, "everything", lam=0.1)


def test_result_report_fields(small_result):
    report = result_report(small_result)
    assert report["n_id"] == 60 and report["n_ood"] == 60
    assert 0.0 <= report["auroc"] <= 1.0
    assert 0.0 <= report["fpr95"] <= 1.0
    assert 0.0 <= report["id_acc"] <= 1.0


def test_mode_table_covers_all_columns(small_result):
    table = mode_table(small_result)
    assert set(table) == {"s_nl", "s_ta", "s_sa", "s_all"}
    headline = result_report(small_result)
    assert table["s_all"]["auroc"] == headline["auroc"]
    assert table["s_all"]["fpr95"] == headline["fpr95"]


def test_lambda_sweep_matches_fresh_runs(small_dataset):
    cfg = RunConfig()
    swept = sweep_parameter(small_dataset, cfg, "lam", [0.0, 0.1, 0.3])
    assert swept["param"] == "lam"
    for row in swept["rows"]:
        fresh = result_report(run_stream(small_dataset, replace(cfg, lam=row["value"])))
        assert row["auroc"] == fresh["auroc"]
        assert row["fpr95"] == fresh["fpr95"]


def test_gamma_sweep_runs_fresh(small_dataset):
    swept = sweep_parameter(small_dataset, RunConfig(), "gamma", [0.3, 0.5, 0.7])
    assert [row["value"] for row in swept["rows"]] == [0.3, 0.5, 0.7]
    assert all(0.0 <= row["auroc"] <= 1.0 for row in swept["rows"])


def test_sweep_rejects_bad_requests(small_dataset):
    with pytest.raises(ConfigInvalid):
        sweep_parameter(small_dataset, RunConfig(), "warp", [1.0])
    with pytest.raises(ConfigInvalid):
        sweep_parameter(small_dataset, RunConfig(), "gamma", [])


def test_mixture_experiment_row_shape():
    out = mixture_experiment(small_spec(), RunConfig(), ratios=[1.0, 9.0], total=60)
    assert out["total"] == 60
    assert [row["ratio"] for row in out["rows"]] == [1.0, 9.0]
    skewed = out["rows"][1]
    for arm in ("base", "adagap"):
        assert skewed[arm]["n_id"] == 54 and skewed[arm]["n_ood"] == 6
        assert 0.0 <= skewed[arm]["auroc"] <= 1.0


def test_ordering_experiment_spread(small_dataset):
    out = ordering_experiment(small_dataset, RunConfig(), repeats=3, seed=1)
    assert len(out["auroc"]) == 3 and len(out["fpr95"]) == 3
    assert out["auroc_spread"] == max(out["auroc"]) - min(out["auroc"])
    with pytest.raises(ConfigInvalid):
        ordering_experiment(small_dataset, RunConfig(), repeats=1)


def test_ordering_is_exact_zero_for_text_only(small_dataset):
    out = ordering_experiment(small_dataset, RunConfig(mode="nl"), repeats=3, seed=2)
    assert out["auroc_spread"] == 0.0
    assert out["fpr95_spread"] == 0.0


def test_isor_report_shape(small_dataset):
    out = isor_report(small_dataset, RunConfig())
    assert len(out["id_rows"]) == 3 and len(out["neg_rows"]) == 6
    # softmax masses, up to one ulp of rounding past the rails
    assert all(-1e-12 <= v <= 1.0 + 1e-12 for v in out["id_rows"] + out["neg_rows"])
    assert len(out["id_rows_text_only"]) == 3
    assert out["occupancy"]["used_slots"] >= 1


def test_isor_report_needs_centers_and_memory(small_dataset):
    bare = Dataset(
        proxies=small_dataset.proxies,
        stream=small_dataset.stream,
        truth=small_dataset.truth,
    )
    with pytest.raises(ConfigInvalid, match="ood directions"):
        isor_report(bare, RunConfig())
    with pytest.raises(ConfigInvalid, match="text-only"):
        isor_report(small_dataset, RunConfig(mode="nl"))
