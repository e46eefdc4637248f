"""Synthetic benchmark generator.

Builds unit-norm embedding streams with a controlled text/image misalignment.
Text proxies are confined to a coordinate subspace of dimension
dim - misaligned_dim. Image embeddings get an extra component in the
complementary coordinates: style directions for ID samples (a domain shift)
and per-cluster directions for OOD samples. Those complement components are
exactly orthogonal to every text proxy by construction, so a text-only
scorer cannot see them, while a feature memory can.

OOD clusters span a difficulty dial. `aligned_fraction` of them sit exactly
at negative proxies, where text labels already reject them. The rest carry a
hidden component whose weight is the profile's misalignment: at 1.0 the
cluster center is orthogonal to every text proxy and only the feature memory
can learn it; below 1.0 the in-plane remainder can additionally be pulled
toward a random ID proxy by `confusion`, imitating a known class.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .embeddings import Dataset, GroundTruth, ProxyMatrix, normalize_rows
from .errors import ConfigInvalid
from .scoring import DEFAULT_TAU, score_from_cosines


def sample_vmf(rng: np.random.Generator, mu: np.ndarray, kappa: float, n: int) -> np.ndarray:
    """Draw n unit vectors from a von Mises-Fisher distribution around mu.

    Uses Wood's rejection scheme for the cosine w = <x, mu>, then a uniform
    tangent direction. kappa=0 is uniform on the sphere; kappa=inf returns
    the center exactly.
    """
    mu = np.asarray(mu, dtype=np.float64)
    d = mu.size
    if d < 2:
        raise ConfigInvalid("vMF sampling needs dim >= 2")
    if kappa < 0:
        raise ConfigInvalid(f"kappa must be >= 0, got {kappa}")
    if n == 0:
        return np.zeros((0, d))
    if math.isinf(kappa):
        return np.tile(mu, (n, 1))
    if kappa == 0.0:
        return normalize_rows(rng.standard_normal((n, d)))

    b = (-2.0 * kappa + math.sqrt(4.0 * kappa**2 + (d - 1.0) ** 2)) / (d - 1.0)
    x0 = (1.0 - b) / (1.0 + b)
    c = kappa * x0 + (d - 1.0) * math.log(1.0 - x0**2)

    w = np.empty(n, dtype=np.float64)
    filled = 0
    while filled < n:
        batch = max(n - filled, 64)
        z = rng.beta((d - 1.0) / 2.0, (d - 1.0) / 2.0, size=batch)
        cand = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z)
        u = rng.uniform(size=batch)
        keep = kappa * cand + (d - 1.0) * np.log(1.0 - x0 * cand) - c >= np.log(u)
        kept = cand[keep][: n - filled]
        w[filled : filled + kept.size] = kept
        filled += kept.size

    tangent = rng.standard_normal((n, d))
    tangent -= np.outer(tangent @ mu, mu)
    tangent = normalize_rows(tangent)
    return w[:, None] * mu + np.sqrt(np.maximum(0.0, 1.0 - w**2))[:, None] * tangent


@dataclass(frozen=True)
class OodProfile:
    """One out-of-distribution population in the generated stream.

    confusion pulls the population's cluster centers toward a random known
    class; kappa sets how tightly samples concentrate around the centers. A
    tight high-confusion profile imitates a class, a loose mid-confusion one
    is a diffuse halo, a zero-confusion one is unrelated traffic.

    facets > 1 splits a cluster into populations that share the in-plane
    direction but carry distinct hidden components, the way one semantic
    object renders in several visual styles.

    misalignment overrides the hidden-component weight for this population;
    None inherits the dataset-wide value. 1.0 puts cluster centers fully in
    the hidden complement, exactly orthogonal to every text proxy.
    """

    weight: float
    confusion: float
    kappa: float
    clusters: int = 1
    facets: int = 1
    misalignment: float | None = None
    name: str = ""


@dataclass
class SyntheticSpec:
    """Knobs for one generated benchmark."""

    num_classes: int = 50
    num_negatives: int = 200
    dim: int = 64
    misaligned_dim: int = 8
    misalignment: float = 0.45  # weight of the hidden complement component
    confusion: float = 0.55  # pull of ood cluster centers toward an id proxy
    id_jitter: float = 0.25  # in-subspace spread of id centers around their proxy
    id_submodes: int = 1  # separate appearance modes per class
    # Distinct hidden directions cycled over submodes. One style means every
    # id sample shares a single domain-shift direction; more styles split the
    # shift per appearance mode.
    id_styles: int = 1
    # Share of id samples drawn at a much lower concentration, standing in
    # for blurry or occluded captures. They score poorly against text while
    # still carrying (weakened) style structure.
    id_degraded_fraction: float = 0.0
    id_degraded_kappa: float = 70.0
    # Negatives blended toward a class proxy, like mined labels that hug the
    # known-label boundary. They cap the best achievable text margin, which
    # keeps scores off the exact 0/1 rails.
    synonym_negatives: int = 0
    synonym_blend: float = 0.5
    # Share of id samples drawn tightly around per-class anchor points placed
    # on the decision boundary between the class proxy and its nearest
    # negative, where the text score lands inside [score_low, score_high].
    # They model captures that text prompts genuinely cannot separate from a
    # boundary-hugging negative label, while their style component keeps them
    # recognizable to a feature memory.
    id_boundary_fraction: float = 0.0
    id_boundary_kappa: float = 20000.0
    id_boundary_score_low: float = 0.38
    id_boundary_score_high: float = 0.62
    # Scale on the hidden style amplitude of boundary anchors relative to the
    # bulk (1.0 = same). Below 1.0 the anchor keeps more in-plane mass, so
    # text rivals sit closer while cached class features stay recognizable.
    id_boundary_style: float = 1.0
    # How many nearest negative proxies the anchor chord aims at. With more
    # than one, the tie is shared by a rival group rather than one negative.
    id_boundary_rivals: int = 1
    # Share of id samples placed farther along the same chord, past the point
    # where text scoring writes them off: captures that look more like the
    # mined negative than like their own label. They carry no style component
    # and score inside [score_low, score_high], low enough to be cached as
    # negatives, where they crowd junk out of the synonym rows.
    id_captured_fraction: float = 0.0
    id_captured_kappa: float = 1e6
    id_captured_score_low: float = 0.10
    id_captured_score_high: float = 0.18
    n_id: int = 5000
    n_ood: int = 5000
    kappa_id: float = 300.0
    kappa_ood: float = 200.0
    ood_clusters: int = 5
    # Hidden-component weight for ood cluster centers; None inherits
    # `misalignment`. Unlike the id value, 1.0 is legal and makes centers
    # exactly orthogonal to the text proxies.
    ood_misalignment: float | None = None
    # Fraction of each profile's clusters centered exactly at a negative
    # proxy, where text labels already cover them.
    aligned_fraction: float = 0.0
    seed: int = 0
    # Optional mixture of ood populations; when set it replaces the scalar
    # confusion/kappa_ood/ood_clusters knobs above.
    ood_profiles: list[OodProfile] = field(default_factory=list)

    def profiles(self) -> list[OodProfile]:
        if self.ood_profiles:
            return self.ood_profiles
        return [
            OodProfile(
                weight=1.0,
                confusion=self.confusion,
                kappa=self.kappa_ood,
                clusters=self.ood_clusters,
            )
        ]

    def profile_misalignment(self, profile: OodProfile) -> float:
        """Hidden weight a profile's clusters actually use."""
        if self.misaligned_dim == 0:
            return 0.0
        if profile.misalignment is not None:
            return profile.misalignment
        if self.ood_misalignment is not None:
            return self.ood_misalignment
        return self.misalignment

    def validate(self) -> None:
        if self.num_classes < 1 or self.num_negatives < 0:
            raise ConfigInvalid("need at least one class and >= 0 negatives")
        if self.misaligned_dim < 0 or self.misaligned_dim >= self.dim:
            raise ConfigInvalid("misaligned_dim must be in [0, dim)")
        if self.dim - self.misaligned_dim < 2:
            raise ConfigInvalid("proxy subspace needs at least 2 dims")
        if not 0.0 <= self.misalignment < 1.0:
            raise ConfigInvalid("misalignment must be in [0, 1)")
        if self.id_submodes < 1:
            raise ConfigInvalid("id_submodes must be >= 1")
        if not 1 <= self.id_styles <= self.id_submodes:
            raise ConfigInvalid("id_styles must be in [1, id_submodes]")
        if not 0.0 <= self.id_degraded_fraction < 1.0:
            raise ConfigInvalid("id_degraded_fraction must be in [0, 1)")
        if self.id_degraded_kappa < 0:
            raise ConfigInvalid("id_degraded_kappa must be >= 0")
        if not 0.0 <= self.id_boundary_fraction < 1.0:
            raise ConfigInvalid("id_boundary_fraction must be in [0, 1)")
        if not 0.0 <= self.id_captured_fraction < 1.0:
            raise ConfigInvalid("id_captured_fraction must be in [0, 1)")
        special = (
            self.id_boundary_fraction
            + self.id_captured_fraction
            + self.id_degraded_fraction
        )
        if special >= 1.0:
            raise ConfigInvalid("boundary, captured, and degraded fractions must stay below 1")
        if self.id_captured_fraction > 0.0:
            if self.num_negatives < 1:
                raise ConfigInvalid("captured samples need at least one negative")
            if self.id_captured_kappa <= 0:
                raise ConfigInvalid("id_captured_kappa must be positive")
            low, high = self.id_captured_score_low, self.id_captured_score_high
            if not 0.0 < low <= high < 1.0:
                raise ConfigInvalid("captured score window must satisfy 0 < low <= high < 1")
        if self.id_boundary_fraction > 0.0:
            if self.num_negatives < 1:
                raise ConfigInvalid("boundary anchors need at least one negative")
            if self.id_boundary_kappa <= 0:
                raise ConfigInvalid("id_boundary_kappa must be positive")
            if not 0.0 < self.id_boundary_score_low <= self.id_boundary_score_high < 1.0:
                raise ConfigInvalid("boundary score window must satisfy 0 < low <= high < 1")
            if not 0.0 <= self.id_boundary_style <= 1.0:
                raise ConfigInvalid("id_boundary_style must be in [0, 1]")
            if not 1 <= self.id_boundary_rivals <= self.num_negatives:
                raise ConfigInvalid("id_boundary_rivals must be in [1, num_negatives]")
        if not 0 <= self.synonym_negatives <= self.num_negatives:
            raise ConfigInvalid("synonym_negatives must be in [0, num_negatives]")
        if not 0.0 <= self.synonym_blend < 1.0:
            raise ConfigInvalid("synonym_blend must be in [0, 1)")
        if self.ood_misalignment is not None and not 0.0 <= self.ood_misalignment <= 1.0:
            raise ConfigInvalid("ood_misalignment must be in [0, 1]")
        if not 0.0 <= self.aligned_fraction <= 1.0:
            raise ConfigInvalid("aligned_fraction must be in [0, 1]")
        if self.n_id < 0 or self.n_ood < 0 or self.n_id + self.n_ood == 0:
            raise ConfigInvalid("stream must contain at least one sample")
        ood_hidden = False
        if self.n_ood > 0:
            profiles = self.profiles()
            if abs(sum(p.weight for p in profiles) - 1.0) > 1e-9:
                raise ConfigInvalid("ood profile weights must sum to 1")
            for p in profiles:
                if p.weight < 0:
                    raise ConfigInvalid("ood profile weights must be >= 0")
                if not 0.0 <= p.confusion <= 1.0:
                    raise ConfigInvalid("confusion must be in [0, 1]")
                if p.kappa < 0:
                    raise ConfigInvalid("kappa must be >= 0")
                if p.clusters < 1:
                    raise ConfigInvalid("each ood profile needs >= 1 cluster")
                if p.facets < 1:
                    raise ConfigInvalid("each ood profile needs >= 1 facet")
                if p.misalignment is not None and not 0.0 <= p.misalignment <= 1.0:
                    raise ConfigInvalid("profile misalignment must be in [0, 1]")
                if self.profile_misalignment(p) > 0.0:
                    ood_hidden = True
            if self.aligned_fraction > 0.0 and self.num_negatives == 0:
                raise ConfigInvalid("aligned clusters need at least one negative")
        styles_used = self.id_styles if self.misalignment > 0.0 else 0
        need = styles_used + (1 if ood_hidden else 0)
        if need and self.misaligned_dim < max(need, 2 if ood_hidden else 1):
            raise ConfigInvalid(
                "misaligned_dim too small for id styles plus ood directions"
            )


def benchmark_spec(seed: int = 0, **overrides) -> SyntheticSpec:
    """The calibrated evaluation benchmark, one geometry per seed.

    Fifty classes against two hundred negatives in 64 dimensions, with a
    quarter of the negatives mined so close to a class that text scoring
    alone cannot separate the boundary. The ID bulk is tight (kappa 350,
    five appearance modes per class sharing one hidden style direction) and
    45% of ID samples sit on per-class boundary anchors whose text score is
    pinned inside [0.28, 0.45]: captures the prompt genuinely confuses with
    a mined near-label. OOD arrives in eight tight clusters (kappa 1800)
    centered fully in the hidden complement, orthogonal to every text proxy,
    so only cached image evidence can learn them. The tight OOD clusters
    keep stray OOD samples out of the positive-cache region, which keeps the
    memory rows clean; looser values poison class rows with a few
    high-scoring OOD captures and drag the fused scores down.
    """
    spec = SyntheticSpec(
        num_classes=50,
        num_negatives=200,
        dim=64,
        misaligned_dim=16,
        misalignment=0.5,
        id_jitter=0.25,
        id_submodes=5,
        id_styles=1,
        synonym_negatives=50,
        synonym_blend=0.65,
        id_boundary_fraction=0.45,
        id_boundary_kappa=1e6,
        id_boundary_score_low=0.28,
        id_boundary_score_high=0.45,
        n_id=5000,
        n_ood=5000,
        kappa_id=350.0,
        kappa_ood=1800.0,
        ood_clusters=8,
        ood_misalignment=1.0,
        seed=seed,
    )
    if overrides:
        spec = replace(spec, **overrides)
    spec.validate()
    return spec


def _split_counts(total: int, weights: list[float]) -> list[int]:
    """Integer allocation of `total` by weight, largest remainders first."""
    raw = [total * w for w in weights]
    out = [int(x) for x in raw]
    short = total - sum(out)
    order = sorted(range(len(raw)), key=lambda i: raw[i] - out[i], reverse=True)
    for i in order[:short]:
        out[i] += 1
    return out


def _subspace_unit(rng: np.random.Generator, n: int, dim: int, sub: int) -> np.ndarray:
    """n unit vectors living in the first `sub` coordinates of R^dim."""
    out = np.zeros((n, dim))
    out[:, :sub] = normalize_rows(rng.standard_normal((n, sub)))
    return out


def _complement_unit(rng: np.random.Generator, n: int, dim: int, sub: int) -> np.ndarray:
    """n unit vectors living in the last dim - sub coordinates of R^dim."""
    out = np.zeros((n, dim))
    out[:, sub:] = normalize_rows(rng.standard_normal((n, dim - sub)))
    return out


def _chord_point(
    text: np.ndarray,
    start: np.ndarray,
    rival: np.ndarray,
    target: float,
    scale: float,
    num_classes: int,
) -> np.ndarray:
    """Unit point on the start-to-rival chord whose text score hits target.

    `scale` is the in-plane amplitude the emitted sample will carry, so the
    bisection sees the same cosines the pipeline will.
    """
    lo, hi = 0.0, 1.0
    for _ in range(48):
        t = 0.5 * (lo + hi)
        u = start + t * (rival - start)
        u /= np.linalg.norm(u)
        s = score_from_cosines(scale * (text @ u), num_classes, DEFAULT_TAU)
        if s > target:
            lo = t
        else:
            hi = t
    u = start + 0.5 * (lo + hi) * (rival - start)
    return u / np.linalg.norm(u)


def _chord_centers(
    spec: SyntheticSpec,
    rng: np.random.Generator,
    id_proxies: np.ndarray,
    neg_proxies: np.ndarray,
    id_inplane: np.ndarray,
    styles: np.ndarray,
    inplane: float,
    mis: float,
) -> tuple[np.ndarray | None, np.ndarray | None]:
    """Per-class chord points whose text score lands at drawn targets.

    The chord for class k starts from the appearance submode closest to the
    class's most similar negative proxies and runs toward their centroid;
    walking toward a centroid of several rivals keeps the tie spread across
    all of them instead of hinging on a single negative. Boundary anchors sit
    where the score window says, keeping the start submode's style so the
    class's own cached features stay near the anchor. Captured points sit
    farther along the same chord, inside the cache-negative score window,
    with no style at all: pure in-plane points that read as the rival.
    """
    want_anchor = spec.id_boundary_fraction > 0.0
    want_captured = spec.id_captured_fraction > 0.0
    text = np.vstack([id_proxies, neg_proxies])
    anchor_targets = captured_targets = None
    if want_anchor:
        anchor_targets = rng.uniform(
            spec.id_boundary_score_low,
            spec.id_boundary_score_high,
            size=spec.num_classes,
        )
    if want_captured:
        captured_targets = rng.uniform(
            spec.id_captured_score_low,
            spec.id_captured_score_high,
            size=spec.num_classes,
        )
    mis_b = mis * spec.id_boundary_style
    inplane_b = math.sqrt(1.0 - mis_b**2)
    anchors = np.zeros((spec.num_classes, spec.dim)) if want_anchor else None
    captured = np.zeros((spec.num_classes, spec.dim)) if want_captured else None
    for k in range(spec.num_classes):
        proxy = id_proxies[k]
        order = np.argsort(neg_proxies @ proxy)
        rival = neg_proxies[order[-spec.id_boundary_rivals :]].sum(axis=0)
        rival /= np.linalg.norm(rival)
        modes = id_inplane[k * spec.id_submodes : (k + 1) * spec.id_submodes]
        sub = int(np.argmax(modes @ rival))
        start = modes[sub]
        if want_anchor:
            u = _chord_point(
                text, start, rival, float(anchor_targets[k]), inplane_b, spec.num_classes
            )
            if mis_b > 0.0:
                style = mis_b * styles[sub % spec.id_styles]
            else:
                style = np.zeros(spec.dim)
            anchors[k] = inplane_b * u + style
        if want_captured:
            captured[k] = _chord_point(
                text, start, rival, float(captured_targets[k]), 1.0, spec.num_classes
            )
    return anchors, captured


def synthesize_dataset(spec: SyntheticSpec) -> Dataset:
    """Generate proxies, a shuffled scored stream, and ground truth."""
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    sub = spec.dim - spec.misaligned_dim
    mis = spec.misalignment if spec.misaligned_dim > 0 else 0.0
    inplane = math.sqrt(1.0 - mis**2)

    id_proxies = _subspace_unit(rng, spec.num_classes, spec.dim, sub)
    neg_proxies = _subspace_unit(rng, max(spec.num_negatives, 1), spec.dim, sub)
    if spec.num_negatives == 0:
        neg_proxies = neg_proxies[:0]
    # ID centers: the class proxy nudged inside the subspace (independently
    # per appearance submode), plus a hidden direction standing in for the
    # image-domain shift. Styles are exactly orthonormal; submode s draws
    # style s mod id_styles, the same style across classes.
    n_modes = spec.num_classes * spec.id_submodes
    jitter = _subspace_unit(rng, n_modes, spec.dim, sub)
    id_inplane = normalize_rows(
        np.repeat(id_proxies, spec.id_submodes, axis=0) + spec.id_jitter * jitter
    )
    if spec.synonym_negatives:
        # Synonyms hug their class through the label direction alone: the
        # residual is orthogonalized against the class's appearance submodes
        # so intra-class jitter can never tip a sample past its synonym.
        near = np.arange(spec.synonym_negatives) % spec.num_classes
        for i, k in enumerate(near):
            group = np.vstack(
                [
                    id_proxies[k : k + 1],
                    id_inplane[k * spec.id_submodes : (k + 1) * spec.id_submodes],
                ]
            )
            q, _ = np.linalg.qr(group.T)
            resid = neg_proxies[i] - q @ (q.T @ neg_proxies[i])
            norm = np.linalg.norm(resid)
            if norm > 1e-9:
                neg_proxies[i] = resid / norm
            neg_proxies[i] = (
                spec.synonym_blend * id_proxies[k]
                + (1.0 - spec.synonym_blend) * neg_proxies[i]
            )
        neg_proxies[: spec.synonym_negatives] = normalize_rows(
            neg_proxies[: spec.synonym_negatives]
        )
    if mis > 0.0:
        raw = rng.standard_normal((spec.misaligned_dim, spec.id_styles))
        q, _ = np.linalg.qr(raw)
        styles = np.zeros((spec.id_styles, spec.dim))
        styles[:, sub:] = q.T
        mode_styles = np.array(
            [(m % spec.id_submodes) % spec.id_styles for m in range(n_modes)]
        )
        id_centers = inplane * id_inplane + mis * styles[mode_styles]
    else:
        styles = np.zeros((0, spec.dim))
        id_centers = id_inplane

    samples: list[np.ndarray] = []
    labels: list[int | None] = []
    names: list[str] = []

    if spec.n_id:
        anchors, captured = _chord_centers(
            spec, rng, id_proxies, neg_proxies, id_inplane, styles, inplane, mis
        )
        id_assign = rng.integers(0, n_modes, size=spec.n_id)
        channel = rng.uniform(size=spec.n_id)
        boundary = channel < spec.id_boundary_fraction
        edge = spec.id_boundary_fraction + spec.id_captured_fraction
        captive = ~boundary & (channel < edge)
        degraded = ~boundary & ~captive & (channel < edge + spec.id_degraded_fraction)
        for m in range(n_modes):
            mine = id_assign == m
            cls = m // spec.id_submodes
            for mask, centers, kappa in (
                (boundary, anchors, spec.id_boundary_kappa),
                (captive, captured, spec.id_captured_kappa),
            ):
                if centers is None:
                    continue
                count = int((mine & mask).sum())
                if count:
                    samples.append(sample_vmf(rng, centers[cls], kappa, count))
                    labels.extend([cls] * count)
                    names.extend(["id"] * count)
            rest = mine & ~boundary & ~captive
            for is_degraded, kappa in ((False, spec.kappa_id), (True, spec.id_degraded_kappa)):
                count = int((rest & (degraded == is_degraded)).sum())
                if count:
                    samples.append(sample_vmf(rng, id_centers[m], kappa, count))
                    labels.extend([cls] * count)
                    names.extend(["id"] * count)

    all_centers: list[np.ndarray] = []
    if spec.n_ood:
        profiles = spec.profiles()
        counts = _split_counts(spec.n_ood, [p.weight for p in profiles])
        for pos, (profile, n_p) in enumerate(zip(profiles, counts)):
            imitated = rng.integers(0, spec.num_classes, size=profile.clusters)
            blend = _subspace_unit(rng, profile.clusters, spec.dim, sub)
            centers_inplane = normalize_rows(
                profile.confusion * id_proxies[imitated]
                + (1.0 - profile.confusion) * blend
            )
            n_aligned = int(round(spec.aligned_fraction * profile.clusters))
            if n_aligned:
                covered = rng.integers(0, spec.num_negatives, size=n_aligned)
                centers_inplane[:n_aligned] = neg_proxies[covered]
            # Facets share a cluster's in-plane direction.
            centers_inplane = np.repeat(centers_inplane, profile.facets, axis=0)
            n_cells = profile.clusters * profile.facets
            p_mis = spec.profile_misalignment(profile)
            if p_mis > 0.0:
                # Hidden ood directions are projected off the id style span
                # so the memory channel separating the two kinds of traffic
                # never collapses by a chance collision in a small complement.
                hidden = _complement_unit(rng, n_cells, spec.dim, sub)
                hidden = normalize_rows(hidden - (hidden @ styles.T) @ styles)
                centers = math.sqrt(1.0 - p_mis**2) * centers_inplane + p_mis * hidden
                if n_aligned:
                    # Aligned clusters sit exactly at their negative proxy.
                    keep = n_aligned * profile.facets
                    centers[:keep] = centers_inplane[:keep]
            else:
                centers = centers_inplane
            all_centers.append(centers)
            tag = profile.name or f"ood{pos}"
            assign = rng.integers(0, n_cells, size=n_p)
            for j in range(n_cells):
                count = int((assign == j).sum())
                if count:
                    samples.append(sample_vmf(rng, centers[j], profile.kappa, count))
                    labels.extend([None] * count)
                    names.extend([tag] * count)
    ood_centers = np.vstack(all_centers) if all_centers else np.zeros((0, spec.dim))

    stream = np.vstack(samples)
    order = rng.permutation(stream.shape[0])
    stream = normalize_rows(stream[order])
    labels = [labels[i] for i in order]
    names = [names[i] for i in order]

    dataset = Dataset(
        proxies=ProxyMatrix(
            id_proxies=id_proxies,
            neg_proxies=neg_proxies,
            id_label_names=[f"class{k}" for k in range(spec.num_classes)],
            neg_label_names=[f"neg{m}" for m in range(spec.num_negatives)],
        ),
        stream=stream,
        truth=GroundTruth(labels),
    )
    # Stash generator-only context used by experiments and the isor report.
    dataset.ood_centers = ood_centers  # type: ignore[attr-defined]
    dataset.sample_names = names  # type: ignore[attr-defined]
    return dataset


def with_mix_ratio(spec: SyntheticSpec, id_per_ood: float, total: int) -> SyntheticSpec:
    """Rescale stream counts to id_per_ood : 1 at roughly `total` samples."""
    if id_per_ood <= 0 or total < 2:
        raise ConfigInvalid("id_per_ood must be positive and total >= 2")
    n_ood = max(1, round(total / (1.0 + id_per_ood)))
    return replace(spec, n_id=total - n_ood, n_ood=n_ood)
