"""Command-line front end.

Every report-producing command writes machine-readable output (CSV/JSON)
into --out-dir and, unless --no-figures is given, a PNG rendering of the
same numbers next to it.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, fields, replace
from pathlib import Path

from . import figures
from .embfile import read_embedding_file, write_embedding_file
from .embeddings import (
    ROLE_ID_PROXIES,
    ROLE_NEG_PROXIES,
    ROLE_TEST_STREAM,
    load_manifest,
    write_manifest,
)
from .errors import AdanegError, ConfigInvalid
from .experiments import (
    isor_report,
    mixture_experiment,
    mode_table,
    ordering_experiment,
    result_report,
    sweep_parameter,
)
from .metrics import metric_report
from .pipeline import (
    RunConfig,
    read_records_csv,
    run_stream,
    truth_labels,
    write_records_csv,
)
from .synth import SyntheticSpec, benchmark_spec, synthesize_dataset

ROLE_OOD_CENTERS = "ood_centers"  # extra manifest role written by synth


def _config_flags(parser: argparse.ArgumentParser) -> None:
    g = parser.add_argument_group("engine config")
    g.add_argument("--config", type=Path, help="JSON file of engine settings; flags override it")
    g.add_argument("--gamma", type=float, help="detection threshold")
    g.add_argument("--gap", type=float, help="base caching margin")
    g.add_argument("--beta", type=float, help="sample-adaptive weight sharpness")
    g.add_argument("--lambda", dest="lam", type=float, help="fusion weight")
    g.add_argument("--tau", type=float, help="softmax temperature")
    g.add_argument("--mem-len", type=int, help="slots per class")
    g.add_argument("--mode", choices=("nl", "ta", "sa", "all"), help="which score is s_all")
    g.add_argument("--fuse", choices=("ta", "sa"), help="proxy score fused in mode=all")
    g.add_argument("--adagap", action="store_true", default=None, help="enable the mix-ratio queue")
    g.add_argument("--queue-len", type=int, help="mix-ratio queue capacity")
    g.add_argument(
        "--record-rule", choices=("threshold", "gap"), help="what the queue records"
    )
    g.add_argument("--seed", type=int, help="rng seed where a command draws randomness")


def _build_config(args: argparse.Namespace) -> RunConfig:
    doc: dict = {}
    if args.config is not None:
        try:
            doc = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigInvalid(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(doc, dict):
            raise ConfigInvalid(f"{args.config}: config must be a JSON object")
    for f in fields(RunConfig):
        value = getattr(args, f.name, None)
        if value is not None:
            doc[f.name] = value
    return RunConfig.from_dict(doc)


# flag -> SyntheticSpec field; every flag defaults to None so presets show through
_SPEC_FLAGS = {
    "--classes": "num_classes",
    "--negatives": "num_negatives",
    "--dim": "dim",
    "--misaligned-dim": "misaligned_dim",
    "--misalignment": "misalignment",
    "--confusion": "confusion",
    "--id-jitter": "id_jitter",
    "--id-submodes": "id_submodes",
    "--id-styles": "id_styles",
    "--degraded-fraction": "id_degraded_fraction",
    "--degraded-kappa": "id_degraded_kappa",
    "--synonyms": "synonym_negatives",
    "--synonym-blend": "synonym_blend",
    "--boundary-fraction": "id_boundary_fraction",
    "--boundary-kappa": "id_boundary_kappa",
    "--boundary-low": "id_boundary_score_low",
    "--boundary-high": "id_boundary_score_high",
    "--boundary-style": "id_boundary_style",
    "--boundary-rivals": "id_boundary_rivals",
    "--captured-fraction": "id_captured_fraction",
    "--captured-kappa": "id_captured_kappa",
    "--captured-low": "id_captured_score_low",
    "--captured-high": "id_captured_score_high",
    "--n-id": "n_id",
    "--n-ood": "n_ood",
    "--kappa-id": "kappa_id",
    "--kappa-ood": "kappa_ood",
    "--ood-clusters": "ood_clusters",
    "--ood-misalignment": "ood_misalignment",
    "--aligned-fraction": "aligned_fraction",
}
_SPEC_INTS = {
    "num_classes",
    "num_negatives",
    "dim",
    "misaligned_dim",
    "id_submodes",
    "id_styles",
    "synonym_negatives",
    "id_boundary_rivals",
    "n_id",
    "n_ood",
    "ood_clusters",
}


def _spec_flags(parser: argparse.ArgumentParser) -> None:
    g = parser.add_argument_group("synthetic data")
    g.add_argument(
        "--preset",
        choices=("plain", "benchmark"),
        default="plain",
        help="starting point the other flags override; 'benchmark' is the "
        "calibrated misaligned evaluation set",
    )
    for flag, field in _SPEC_FLAGS.items():
        cast = int if field in _SPEC_INTS else float
        g.add_argument(flag, dest=field, type=cast, default=None)


def _build_spec(args: argparse.Namespace) -> SyntheticSpec:
    seed = args.seed if args.seed is not None else 0
    overrides = {
        field: getattr(args, field)
        for field in _SPEC_FLAGS.values()
        if getattr(args, field, None) is not None
    }
    if args.preset == "benchmark":
        return benchmark_spec(seed, **overrides)
    spec = replace(SyntheticSpec(seed=seed), **overrides)
    spec.validate()
    return spec


def _out_dir(args: argparse.Namespace) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _dump_json(doc: dict, path: Path) -> None:
    path.write_text(json.dumps(doc, indent=2) + "\n")


def _load_dataset_with_centers(manifest: Path):
    dataset = load_manifest(manifest)
    doc = json.loads(Path(manifest).read_text())
    rel = doc.get("files", {}).get(ROLE_OOD_CENTERS)
    if rel:
        centers = read_embedding_file(Path(manifest).parent / rel).rows
        dataset.ood_centers = centers.astype(float)  # type: ignore[attr-defined]
    return dataset


def _cmd_run(args: argparse.Namespace) -> int:
    config = _build_config(args)
    dataset = load_manifest(args.manifest)
    result = run_stream(dataset, config)
    out = _out_dir(args)
    write_records_csv(out / "records.csv", result.records)
    _dump_json(asdict(config), out / "config.json")
    print(f"wrote {out / 'records.csv'} ({len(result.records)} rows)")
    if dataset.truth is not None:
        report = result_report(result)
        report["occupancy"] = result.occupancy
        if result.memory is not None:
            report["modes"] = mode_table(result)
        _dump_json(report, out / "report.json")
        print(
            f"auroc={report['auroc']:.4f} fpr95={report['fpr95']:.4f} "
            f"id_acc={report['id_acc']:.4f} (report.json)"
        )
        if not args.no_figures:
            figures.plot_score_histogram(result.records, out / "scores.png")
            print(f"wrote {out / 'scores.png'}")
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    records = read_records_csv(args.records)
    truth = truth_labels(records)
    scores = [getattr(r, args.column) for r in records]
    report = metric_report(
        scores, truth, pseudo_labels=[r.pseudo_label for r in records], gamma=args.gamma
    )
    out = _out_dir(args)
    _dump_json(report, out / "report.json")
    print(
        f"auroc={report['auroc']:.4f} fpr95={report['fpr95']:.4f} "
        f"id_acc={report['id_acc']:.4f} (report.json)"
    )
    if not args.no_figures:
        figures.plot_score_histogram(records, out / "scores.png", column=args.column)
        print(f"wrote {out / 'scores.png'}")
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    config = _build_config(args)
    dataset = load_manifest(args.manifest)
    values = [float(v) for v in args.values.split(",") if v.strip()]
    sweep = sweep_parameter(dataset, config, args.param, values)
    out = _out_dir(args)
    _dump_json(sweep, out / "sweep.json")
    print(f"wrote {out / 'sweep.json'} ({len(values)} points)")
    if not args.no_figures:
        figures.plot_sweep(sweep, out / "sweep.png")
        print(f"wrote {out / 'sweep.png'}")
    return 0


def _cmd_mixratio(args: argparse.Namespace) -> int:
    config = _build_config(args)
    spec = _build_spec(args)
    ratios = [float(v) for v in args.ratios.split(",") if v.strip()]
    if not ratios:
        raise ConfigInvalid("--ratios must list at least one value")
    mixture = mixture_experiment(spec, config, ratios, args.total)
    out = _out_dir(args)
    _dump_json(mixture, out / "mixratio.json")
    print(f"wrote {out / 'mixratio.json'} ({len(ratios)} ratios)")
    if not args.no_figures:
        figures.plot_mixture(mixture, out / "mixratio.png")
        print(f"wrote {out / 'mixratio.png'}")
    return 0


def _cmd_order(args: argparse.Namespace) -> int:
    config = _build_config(args)
    dataset = load_manifest(args.manifest)
    ordering = ordering_experiment(
        dataset, config, args.repeats, seed=args.seed if args.seed is not None else 0
    )
    out = _out_dir(args)
    _dump_json(ordering, out / "ordering.json")
    print(
        f"wrote {out / 'ordering.json'} "
        f"(auroc spread {ordering['auroc_spread']:.5f} over {args.repeats} shuffles)"
    )
    if not args.no_figures:
        figures.plot_ordering(ordering, out / "ordering.png")
        print(f"wrote {out / 'ordering.png'}")
    return 0


def _cmd_synth(args: argparse.Namespace) -> int:
    spec = _build_spec(args)
    dataset = synthesize_dataset(spec)
    out = _out_dir(args)
    write_embedding_file(out / "id_proxies.emb", dataset.proxies.id_proxies, unit_norm=True)
    write_embedding_file(out / "neg_proxies.emb", dataset.proxies.neg_proxies, unit_norm=True)
    write_embedding_file(out / "test_stream.emb", dataset.stream, unit_norm=True)
    files = {
        ROLE_ID_PROXIES: "id_proxies.emb",
        ROLE_NEG_PROXIES: "neg_proxies.emb",
        ROLE_TEST_STREAM: "test_stream.emb",
    }
    centers = getattr(dataset, "ood_centers")
    if len(centers):
        write_embedding_file(out / "ood_centers.emb", centers, unit_norm=True)
        files[ROLE_OOD_CENTERS] = "ood_centers.emb"
    truth = [
        {"kind": "ood"} if lab is None else {"kind": "id", "class": lab}
        for lab in dataset.truth.labels
    ]
    write_manifest(
        out / "manifest.json",
        files=files,
        id_label_names=dataset.proxies.id_label_names,
        neg_label_names=dataset.proxies.neg_label_names,
        ground_truth=truth,
    )
    print(
        f"wrote {out / 'manifest.json'}: {spec.n_id} id + {spec.n_ood} ood samples, "
        f"{spec.num_classes} classes, {spec.num_negatives} negatives, dim {spec.dim}"
    )
    return 0


def _cmd_isor(args: argparse.Namespace) -> int:
    config = _build_config(args)
    dataset = _load_dataset_with_centers(args.manifest)
    report = isor_report(dataset, config)
    out = _out_dir(args)
    _dump_json(report, out / "isor.json")
    neg = report["neg_mean"]
    print(
        f"wrote {out / 'isor.json'} (id rows mean {report['id_mean']:.4f}, "
        f"negative rows mean {neg:.4f})" if neg is not None else f"wrote {out / 'isor.json'}"
    )
    if not args.no_figures:
        figures.plot_isor(report, out / "isor.png")
        print(f"wrote {out / 'isor.png'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adaneg",
        description="Streaming out-of-distribution detection with negative labels "
        "and a test-time feature memory.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="score a manifest's test stream")
    p.add_argument("--manifest", type=Path, required=True)
    p.add_argument("--out-dir", type=Path, required=True)
    p.add_argument("--no-figures", action="store_true")
    _config_flags(p)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("eval", help="recompute metrics from a records CSV")
    p.add_argument("--records", type=Path, required=True)
    p.add_argument("--out-dir", type=Path, required=True)
    p.add_argument("--column", default="s_all", choices=("s_nl", "s_ta", "s_sa", "s_all"))
    p.add_argument("--gamma", type=float, default=0.5)
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("sweep", help="metrics as one engine knob moves")
    p.add_argument("--manifest", type=Path, required=True)
    p.add_argument("--out-dir", type=Path, required=True)
    p.add_argument("--param", required=True)
    p.add_argument("--values", required=True, help="comma-separated values")
    p.add_argument("--no-figures", action="store_true")
    _config_flags(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("mixratio", help="skewed-stream comparison, base vs adaptive gap")
    p.add_argument("--out-dir", type=Path, required=True)
    p.add_argument("--ratios", default="1,2,5,10,25,50,100", help="id:ood ratios")
    p.add_argument("--total", type=int, default=5050, help="samples per stream")
    p.add_argument("--no-figures", action="store_true")
    _spec_flags(p)
    _config_flags(p)
    p.set_defaults(func=_cmd_mixratio)

    p = sub.add_parser("order", help="arrival-order sensitivity on one manifest")
    p.add_argument("--manifest", type=Path, required=True)
    p.add_argument("--out-dir", type=Path, required=True)
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--no-figures", action="store_true")
    _config_flags(p)
    p.set_defaults(func=_cmd_order)

    p = sub.add_parser("synth", help="generate a benchmark manifest")
    p.add_argument("--out-dir", type=Path, required=True)
    _spec_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("isor", help="score learned proxies against true ood directions")
    p.add_argument("--manifest", type=Path, required=True)
    p.add_argument("--out-dir", type=Path, required=True)
    p.add_argument("--no-figures", action="store_true")
    _config_flags(p)
    p.set_defaults(func=_cmd_isor)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except AdanegError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
