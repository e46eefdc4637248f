"""Generator properties: reproducibility, geometry pins, population shaping."""

import numpy as np
import pytest

from adaneg.errors import ConfigInvalid
from adaneg.pipeline import RunConfig, run_stream
from adaneg.synth import (
    OodProfile,
    SyntheticSpec,
    _split_counts,
    benchmark_spec,
    sample_vmf,
    synthesize_dataset,
    with_mix_ratio,
)

SMALL = dict(
    num_classes=4,
    num_negatives=10,
    dim=16,
    misaligned_dim=4,
    n_id=120,
    n_ood=120,
    kappa_id=200.0,
    kappa_ood=200.0,
    ood_clusters=3,
)


def test_vmf_unit_norm_and_shapes():
    rng = np.random.default_rng(0)
    mu = np.zeros(8)
    mu[0] = 1.0
    x = sample_vmf(rng, mu, 50.0, 200)
    assert x.shape == (200, 8)
    assert np.allclose(np.linalg.norm(x, axis=1), 1.0)
    assert sample_vmf(rng, mu, 10.0, 0).shape == (0, 8)


def test_vmf_concentration_scales_with_kappa():
    rng = np.random.default_rng(1)
    mu = np.zeros(12)
    mu[0] = 1.0
    loose = sample_vmf(rng, mu, 5.0, 500) @ mu
    tight = sample_vmf(rng, mu, 500.0, 500) @ mu
    assert tight.mean() > loose.mean() > 0.0
    assert tight.mean() > 0.98


def test_vmf_degenerate_kappas():
    rng = np.random.default_rng(2)
    mu = np.zeros(6)
    mu[2] = 1.0
    exact = sample_vmf(rng, mu, np.inf, 5)
    assert np.array_equal(exact, np.tile(mu, (5, 1)))
    # kappa 0 is uniform: the mean direction carries almost no mass
    uniform = sample_vmf(rng, mu, 0.0, 4000)
    assert abs((uniform @ mu).mean()) < 0.05
    with pytest.raises(ConfigInvalid):
        sample_vmf(rng, mu, -1.0, 3)
    with pytest.raises(ConfigInvalid):
        sample_vmf(rng, np.ones(1), 1.0, 3)


def test_synthesis_is_seed_deterministic():
    a = synthesize_dataset(SyntheticSpec(seed=5, **SMALL))
    b = synthesize_dataset(SyntheticSpec(seed=5, **SMALL))
    c = synthesize_dataset(SyntheticSpec(seed=6, **SMALL))
    assert np.array_equal(a.stream, b.stream)
    assert a.truth.labels == b.truth.labels
    assert not np.array_equal(a.stream, c.stream)


def test_stream_composition():
    ds = synthesize_dataset(SyntheticSpec(seed=3, **SMALL))
    assert ds.stream.shape == (240, 16)
    assert np.allclose(np.linalg.norm(ds.stream, axis=1), 1.0)
    labels = ds.truth.labels
    assert sum(1 for t in labels if t is not None) == 120
    assert sum(1 for t in labels if t is None) == 120
    assert all(t is None or 0 <= t < 4 for t in labels)
    assert len(ds.sample_names) == 240
    # proxies are confined to the text subspace, styles to its complement
    assert np.abs(ds.proxies.stacked[:, 12:]).max() == 0.0


def test_fully_hidden_ood_centers_are_orthogonal_to_text():
    spec = SyntheticSpec(seed=4, ood_misalignment=1.0, **SMALL)
    ds = synthesize_dataset(spec)
    cos = ds.ood_centers @ ds.proxies.stacked.T
    assert np.abs(cos).max() < 1e-12


def test_aligned_clusters_sit_on_negative_proxies():
    spec = SyntheticSpec(seed=5, aligned_fraction=1.0, **SMALL)
    ds = synthesize_dataset(spec)
    best = (ds.ood_centers @ ds.proxies.neg_proxies.T).max(axis=1)
    assert best.min() > 1.0 - 1e-12


def test_boundary_anchor_scores_land_in_window():
    spec = SyntheticSpec(
        seed=6,
        synonym_negatives=4,
        synonym_blend=0.6,
        id_boundary_fraction=0.9,
        id_boundary_kappa=1e6,
        id_boundary_score_low=0.3,
        id_boundary_score_high=0.45,
        **SMALL,
    )
    ds = synthesize_dataset(spec)
    result = run_stream(ds, RunConfig(mode="nl"))
    s_nl = result.score_column("s_nl")
    is_id = np.array([t is not None for t in ds.truth.labels])
    # ~90% of id samples hug their anchor; the window holds them up to the
    # tiny vMF spread around the anchor point
    in_window = ((s_nl > 0.25) & (s_nl < 0.5) & is_id).sum()
    assert in_window >= 0.8 * is_id.sum()


def test_ood_profiles_mixture():
    profiles = [
        OodProfile(weight=0.5, confusion=0.0, kappa=300.0, clusters=2, name="far"),
        OodProfile(weight=0.5, confusion=0.9, kappa=300.0, clusters=2, name="near"),
    ]
    spec = SyntheticSpec(seed=7, ood_profiles=profiles, **SMALL)
    ds = synthesize_dataset(spec)
    names = {n for n in ds.sample_names if n != "id"}
    assert names == {"far", "near"}
    assert ds.ood_centers.shape[0] == 4


def test_split_counts_conserves_total():
    assert _split_counts(10, [0.5, 0.5]) == [5, 5]
    assert _split_counts(10, [1 / 3, 1 / 3, 1 / 3]) == [4, 3, 3]
    assert sum(_split_counts(7, [0.21, 0.49, 0.3])) == 7


def test_with_mix_ratio_counts():
    spec = benchmark_spec(0)
    skewed = with_mix_ratio(spec, 100.0, 5050)
    assert skewed.n_ood == 50 and skewed.n_id == 5000
    even = with_mix_ratio(spec, 1.0, 1000)
    assert even.n_ood == 500 and even.n_id == 500
    with pytest.raises(ConfigInvalid):
        with_mix_ratio(spec, 0.0, 100)


def test_benchmark_spec_fixed_point():
    spec = benchmark_spec(2)
    assert spec.seed == 2
    assert spec.num_classes == 50 and spec.num_negatives == 200
    assert spec.ood_misalignment == 1.0
    # overrides go through validation
    small = benchmark_spec(0, n_id=100, n_ood=100)
    assert small.n_id == 100
    with pytest.raises(ConfigInvalid):
        benchmark_spec(0, id_boundary_fraction=1.5)


def test_spec_validation_rejects_bad_configs():
    for kwargs in (
        dict(num_classes=0),
        dict(misaligned_dim=64),
        dict(misalignment=1.0),
        dict(id_styles=2, id_submodes=1),
        dict(id_boundary_fraction=0.5, id_boundary_score_low=0.0),
        dict(id_boundary_fraction=0.6, id_captured_fraction=0.5),
        dict(synonym_negatives=300),
        dict(id_captured_fraction=0.2, id_captured_kappa=0.0),
        dict(ood_misalignment=1.5),
        dict(n_id=0, n_ood=0),
    ):
        with pytest.raises(ConfigInvalid):
            SyntheticSpec(**kwargs).validate()
    # profile weights must sum to one
    with pytest.raises(ConfigInvalid):
        SyntheticSpec(
            ood_profiles=[OodProfile(weight=0.6, confusion=0.5, kappa=10.0)]
        ).validate()
