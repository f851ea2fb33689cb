"""Command-line pipeline: clean, annotate, count, index, verify, map, chart.

Every command reads declared inputs, writes its outputs plus a
manifest_<command>.json listing input and output content hashes with
the config snapshot and tool version, and exits nonzero with a one-line
diagnostic on failure (2 for I/O and malformed inputs, 3 for backend
exhaustion, 1 otherwise). Outputs carry no timestamps and all reals are
formatted at fixed precision, so identical inputs give byte-identical
outputs.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
from dataclasses import dataclass, replace
from datetime import date
from importlib import resources
from pathlib import Path
from typing import Callable

from . import __version__
from .agreement import agreement_report, load_annotations_csv
from .annotation import (
    AnnotationError,
    Backend,
    ClientPolicy,
    MockBackend,
    RemoteBackend,
    annotate_dataset,
    clean_dataset,
)
from .chart import chart_csv_to_svg
from .core import (
    DisasterTag,
    Domain,
    ImpactCategory,
    IndexConfig,
    category_from_code,
)
from .errors import (
    DisimpactError,
    MalformedCsv,
    MalformedInput,
    MalformedLine,
    OutOfRange,
    TransportError,
    UnknownPostId,
)
from .impact import compute_impact_series, write_domain_csv, write_index_csv
from .ingestion import (
    load_ground_truth,
    load_labels,
    load_posts,
    write_labels_csv,
    write_posts_jsonl,
)
from .spatial import (
    SourceFilter,
    aggregate_state_month,
    load_gazetteer,
    locate_posts,
    write_spatial_csv,
)
from .validation import (
    interpret_profile,
    lead_lag_profile,
    read_domain_csv,
    write_leadlag_csv,
)
from .windowing import build_count_series, full_range, read_counts_csv, resolve_config, write_counts_csv

QUANTILE_METHODS = ("linear", "lower", "higher", "nearest", "midpoint")
COMPOSITE_OPERATORS = ("sum", "mean")


@dataclass
class RunConfig:
    """Flat config surface; file values lose to explicit flags."""

    alpha: float = 0.5
    category_count: int = 11
    window_days: int = 7
    window_anchor: date | None = None
    max_lag: int = 3
    quantile_method: str = "linear"
    composite_operator: str = "sum"
    min_group_size: int = 1

    def validate(self) -> None:
        self.index_config()
        if self.max_lag < 0:
            raise OutOfRange(f"max_lag must be >= 0, got {self.max_lag}")
        if self.quantile_method not in QUANTILE_METHODS:
            raise OutOfRange(f"quantile_method must be one of {QUANTILE_METHODS}")
        if self.composite_operator not in COMPOSITE_OPERATORS:
            raise OutOfRange(f"composite_operator must be one of {COMPOSITE_OPERATORS}")
        if self.min_group_size < 1:
            raise OutOfRange("min_group_size must be >= 1")

    def index_config(self) -> IndexConfig:
        return IndexConfig(
            alpha=self.alpha,
            category_count=self.category_count,
            window_days=self.window_days,
            window_anchor=self.window_anchor,
        )

    def snapshot(self) -> dict:
        return {
            "alpha": self.alpha,
            "category_count": self.category_count,
            "window_days": self.window_days,
            "window_anchor": (
                None if self.window_anchor is None else self.window_anchor.isoformat()
            ),
            "max_lag": self.max_lag,
            "quantile_method": self.quantile_method,
            "composite_operator": self.composite_operator,
            "min_group_size": self.min_group_size,
        }


_CONFIG_PARSERS: dict[str, Callable[[str], object]] = {
    "alpha": float,
    "category_count": int,
    "window_days": int,
    "window_anchor": lambda v: None if v.lower() in ("", "none") else date.fromisoformat(v),
    "max_lag": int,
    "quantile_method": str,
    "composite_operator": str,
    "min_group_size": int,
}


def load_config_file(path: Path) -> dict:
    """Parse a flat key=value file; '#' starts a comment line."""
    values: dict = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise MalformedInput(f"{path}:{lineno}: expected key=value")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _CONFIG_PARSERS:
            raise MalformedInput(f"{path}:{lineno}: unknown config key {key!r}")
        try:
            values[key] = _CONFIG_PARSERS[key](value)
        except ValueError as exc:
            raise MalformedInput(f"{path}:{lineno}: {exc}") from exc
    return values


def resolve_run_config(args: argparse.Namespace) -> RunConfig:
    config = RunConfig()
    if getattr(args, "config", None):
        config = replace(config, **load_config_file(args.config))
    overrides = {}
    for key in _CONFIG_PARSERS:
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            overrides[key] = flag_value
    if overrides:
        config = replace(config, **overrides)
    config.validate()
    return config


def sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with path.open("rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(
    args: argparse.Namespace,
    command: str,
    config: RunConfig,
    inputs: dict[str, str],
    outputs: list[Path],
) -> Path:
    manifest = {
        "command": command,
        "version": __version__,
        "seed": args.seed,
        "config": config.snapshot(),
        "inputs": inputs,
        "outputs": {p.name: sha256_file(p) for p in outputs if p.exists()},
    }
    path = args.out / f"manifest_{command}.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def make_backend(args: argparse.Namespace) -> Backend:
    if args.backend == "remote":
        if not args.endpoint:
            raise ValueError("remote backend needs --endpoint")
        return RemoteBackend(args.endpoint, timeout=args.timeout)
    return MockBackend()


def make_policy(args: argparse.Namespace) -> ClientPolicy:
    return ClientPolicy(
        max_in_flight=args.max_in_flight,
        max_retries=args.max_retries,
        timeout=args.timeout,
    )


def _round9(value):
    if isinstance(value, float):
        return round(value, 9)
    return value


def _report_errors(errors: list[AnnotationError]) -> int:
    for error in errors:
        print(f"error: post {error.post_id}: {error.stage}: {error.message}", file=sys.stderr)
    if any(e.stage == "TransportError" for e in errors):
        return 3
    return 1 if errors else 0


def cmd_clean(args: argparse.Namespace, outputs: list[Path]) -> int:
    config = resolve_run_config(args)
    result = load_posts(args.input, DisasterTag(args.disaster))
    backend = make_backend(args)
    cache_path = args.cache if args.cache else args.out / "annotation_cache.jsonl"
    kept, report = clean_dataset(
        result.dataset, backend, make_policy(args), cache_path
    )
    out_posts = args.out / "posts_clean.jsonl"
    outputs.append(out_posts)
    write_posts_jsonl(kept, out_posts)
    manifest_outputs = [out_posts] + ([cache_path] if cache_path.exists() else [])
    write_manifest(
        args, "clean", config, {str(args.input): sha256_file(args.input)}, manifest_outputs
    )
    print(report.summary())
    if result.report.dropped_malformed or result.report.dropped_duplicate:
        print(
            f"dropped {result.report.dropped_malformed} malformed, "
            f"{result.report.dropped_duplicate} duplicate lines",
            file=sys.stderr,
        )
    return _report_errors(report.errors)


def cmd_annotate(args: argparse.Namespace, outputs: list[Path]) -> int:
    config = resolve_run_config(args)
    result = load_posts(args.input, DisasterTag(args.disaster))
    backend = make_backend(args)
    cache_path = args.cache if args.cache else args.out / "annotation_cache.jsonl"
    annotations, report = annotate_dataset(
        result.dataset, backend, make_policy(args), cache_path
    )
    out_labels = args.out / "labels.csv"
    outputs.append(out_labels)
    write_labels_csv(annotations, out_labels)
    manifest_outputs = [out_labels] + ([cache_path] if cache_path.exists() else [])
    write_manifest(
        args, "annotate", config, {str(args.input): sha256_file(args.input)}, manifest_outputs
    )
    relevant = sum(1 for a in annotations if a.relevant)
    print(
        f"annotated {len(annotations)}/{len(result.dataset)} posts "
        f"({relevant} relevant, {report.cache_hits} cache hits)"
    )
    return _report_errors(report.errors)


def cmd_counts(args: argparse.Namespace, outputs: list[Path]) -> int:
    config = resolve_run_config(args)
    result = load_posts(args.input)
    annotated, label_report = load_labels(args.labels, result.dataset)
    index_config = resolve_config(config.index_config(), annotated, args.range_start)
    if args.range_start and args.range_end:
        window_range = (args.range_start, args.range_end)
    else:
        window_range = full_range(annotated, index_config)
    series, report = build_count_series(annotated, index_config, *window_range)
    out_counts = args.out / "counts.csv"
    outputs.append(out_counts)
    write_counts_csv(series, out_counts)
    write_manifest(
        args,
        "counts",
        config,
        {
            str(args.input): sha256_file(args.input),
            str(args.labels): sha256_file(args.labels),
        },
        [out_counts],
    )
    print(
        f"{len(series.windows)} windows from {window_range[0]} to {window_range[1]}, "
        f"{sum(series.totals)} posts"
    )
    if label_report.unlabeled_ids:
        print(f"{len(label_report.unlabeled_ids)} posts had no label", file=sys.stderr)
    if report.outside_range:
        print(f"{len(report.outside_range)} posts outside range", file=sys.stderr)
    return 0


def cmd_index(args: argparse.Namespace, outputs: list[Path]) -> int:
    config = resolve_run_config(args)
    counts = read_counts_csv(args.input, config.index_config())
    series = compute_impact_series(
        counts,
        config.index_config(),
        quantile_method=config.quantile_method,
        composite_op=config.composite_operator,
    )
    out_index = args.out / "index.csv"
    out_domain = args.out / "domain.csv"
    outputs.extend([out_index, out_domain])
    write_index_csv(series, out_index)
    write_domain_csv(series, out_domain)
    write_manifest(
        args,
        "index",
        config,
        {str(args.input): sha256_file(args.input)},
        [out_index, out_domain],
    )
    weights = series.weights
    print(
        f"{len(series.windows)} windows; weight range "
        f"[{min(weights):.6f}, {max(weights):.6f}]"
    )
    return 0


def _load_model_labels(path: Path) -> dict[str, ImpactCategory]:
    labels: dict[str, ImpactCategory] = {}
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["post_id", "category_code"]:
            raise MalformedCsv(f"{path}: expected header post_id,category_code")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 2:
                raise MalformedCsv(f"{path}:{lineno}: expected 2 fields")
            try:
                labels[row[0].strip()] = category_from_code(int(row[1]))
            except ValueError as exc:
                raise MalformedCsv(f"{path}:{lineno}: {exc}") from exc
    return labels


def cmd_agreement(args: argparse.Namespace, outputs: list[Path]) -> int:
    config = resolve_run_config(args)
    table = load_annotations_csv(args.input)
    model_labels = _load_model_labels(args.labels) if args.labels else None
    report = agreement_report(table, model_labels)
    report = {key: _round9(value) for key, value in report.items()}
    out_report = args.out / "agreement.json"
    outputs.append(out_report)
    out_report.write_text(
        json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    inputs = {str(args.input): sha256_file(args.input)}
    if args.labels:
        inputs[str(args.labels)] = sha256_file(args.labels)
    write_manifest(args, "agreement", config, inputs, [out_report])
    print(
        f"consistency {report['consistency']:.4f}, "
        f"fleiss_kappa {report['fleiss_kappa']:.4f} over {report['n_items']} items"
    )
    return 0


def _sniff_header(path: Path) -> list[str]:
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
    if header is None:
        raise MalformedCsv(f"{path}: empty file")
    return [h.strip() for h in header]


def cmd_validate(args: argparse.Namespace, outputs: list[Path]) -> int:
    config = resolve_run_config(args)
    header = _sniff_header(args.input)
    if header == ["window_start", "domain", "composite"]:
        index_series = read_domain_csv(args.input, Domain(args.domain))
    elif header == ["week_start", "value"]:
        index_series, _ = load_ground_truth(args.input)
    else:
        raise MalformedCsv(
            f"{args.input}: expected a domain export or a week_start,value series"
        )
    truth, truth_report = load_ground_truth(args.truth)
    profile = lead_lag_profile(index_series, truth, config.max_lag)
    out_leadlag = args.out / "leadlag.csv"
    outputs.append(out_leadlag)
    write_leadlag_csv(profile, out_leadlag)
    interpretation = {
        key: _round9(value) for key, value in interpret_profile(profile).items()
    }
    out_report = args.out / "validate_report.json"
    outputs.append(out_report)
    out_report.write_text(
        json.dumps(interpretation, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    write_manifest(
        args,
        "validate",
        config,
        {
            str(args.input): sha256_file(args.input),
            str(args.truth): sha256_file(args.truth),
        },
        [out_leadlag, out_report],
    )
    print(interpretation["statement"])
    if truth_report.filled_weeks:
        print(
            f"zero-filled {len(truth_report.filled_weeks)} missing truth weeks",
            file=sys.stderr,
        )
    return 0


def cmd_spatial(args: argparse.Namespace, outputs: list[Path]) -> int:
    config = resolve_run_config(args)
    result = load_posts(args.input)
    annotated, _ = load_labels(args.labels, result.dataset)
    if args.gazetteer:
        gazetteer = load_gazetteer(args.gazetteer)
        gazetteer_input = {str(args.gazetteer): sha256_file(args.gazetteer)}
    else:
        gazetteer = load_gazetteer()
        data = resources.files("disimpact").joinpath("data/gazetteer.csv").read_bytes()
        gazetteer_input = {"gazetteer.csv": hashlib.sha256(data).hexdigest()}
    located = locate_posts(annotated, gazetteer)
    rows, report = aggregate_state_month(
        located,
        config.index_config(),
        SourceFilter(args.source_filter),
        min_posts=config.min_group_size,
    )
    out_spatial = args.out / "spatial.csv"
    outputs.append(out_spatial)
    write_spatial_csv(rows, SourceFilter(args.source_filter), out_spatial)
    inputs = {
        str(args.input): sha256_file(args.input),
        str(args.labels): sha256_file(args.labels),
    }
    inputs.update(gazetteer_input)
    write_manifest(args, "spatial", config, inputs, [out_spatial])
    states = sorted({row.state for row in rows})
    print(f"{len(rows)} state-month cells across {len(states)} states")
    if report.unlocated:
        print(f"{report.unlocated} posts could not be located", file=sys.stderr)
    if report.suppressed_cells:
        print(
            f"{len(report.suppressed_cells)} cells under min_group_size suppressed",
            file=sys.stderr,
        )
    return 0


def cmd_chart(args: argparse.Namespace, outputs: list[Path]) -> int:
    config = resolve_run_config(args)
    svg, warnings = chart_csv_to_svg(args.input, title=args.title)
    out_chart = args.out / args.outfile
    outputs.append(out_chart)
    out_chart.write_text(svg, encoding="utf-8")
    write_manifest(
        args, "chart", config, {str(args.input): sha256_file(args.input)}, [out_chart]
    )
    for warning in warnings:
        print(f"warning: {warning}", file=sys.stderr)
    print(f"wrote {out_chart}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="disimpact",
        description="Two-stage disaster impact pipeline: classify posts, "
        "index weekly impact, and validate against ground truth.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="flat key=value config file")
    common.add_argument("--out", type=Path, default=Path("."), help="output directory")
    common.add_argument("--seed", type=int, default=0, help="recorded in the manifest")
    common.add_argument(
        "--backend", choices=("mock", "remote"), default="mock",
        help="classifier backend (clean/annotate only)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    backend_flags = argparse.ArgumentParser(add_help=False)
    backend_flags.add_argument("--endpoint", help="remote backend URL")
    backend_flags.add_argument("--cache", type=Path, help="annotation cache JSONL")
    backend_flags.add_argument("--max-in-flight", type=int, default=4)
    backend_flags.add_argument("--max-retries", type=int, default=2)
    backend_flags.add_argument("--timeout", type=float, default=30.0)

    p = sub.add_parser(
        "clean", parents=[common, backend_flags],
        help="relevance-filter posts, writing posts_clean.jsonl",
    )
    p.add_argument("--in", dest="input", type=Path, required=True, help="posts.jsonl")
    p.add_argument(
        "--disaster", choices=("hurricane", "wildfire"), required=True
    )
    p.set_defaults(handler=cmd_clean)

    p = sub.add_parser(
        "annotate", parents=[common, backend_flags],
        help="classify posts into impact categories, writing labels.csv",
    )
    p.add_argument("--in", dest="input", type=Path, required=True, help="posts.jsonl")
    p.add_argument(
        "--disaster", choices=("hurricane", "wildfire"), required=True
    )
    p.set_defaults(handler=cmd_annotate)

    p = sub.add_parser(
        "counts", parents=[common],
        help="count labeled posts per window and category, writing counts.csv",
    )
    p.add_argument("--in", dest="input", type=Path, required=True, help="posts.jsonl")
    p.add_argument("--labels", type=Path, required=True, help="labels.csv")
    p.add_argument("--range-start", type=date.fromisoformat)
    p.add_argument("--range-end", type=date.fromisoformat)
    p.add_argument("--window-days", dest="window_days", type=int)
    p.add_argument("--window-anchor", dest="window_anchor", type=date.fromisoformat)
    p.set_defaults(handler=cmd_counts)

    p = sub.add_parser(
        "index", parents=[common],
        help="compute weekly impact indices, writing index.csv and domain.csv",
    )
    p.add_argument("--in", dest="input", type=Path, required=True, help="counts.csv")
    p.add_argument("--alpha", type=float)
    p.add_argument("--quantile-method", dest="quantile_method", choices=QUANTILE_METHODS)
    p.add_argument(
        "--composite-operator", dest="composite_operator", choices=COMPOSITE_OPERATORS
    )
    p.set_defaults(handler=cmd_index)

    p = sub.add_parser(
        "agreement", parents=[common],
        help="annotator agreement statistics, writing agreement.json",
    )
    p.add_argument("--in", dest="input", type=Path, required=True, help="annotations.csv")
    p.add_argument("--labels", type=Path, help="model labels.csv for comparison")
    p.set_defaults(handler=cmd_agreement)

    p = sub.add_parser(
        "validate", parents=[common],
        help="lead-lag rank correlation against ground truth, writing leadlag.csv",
    )
    p.add_argument(
        "--in", dest="input", type=Path, required=True,
        help="domain.csv or a week_start,value series",
    )
    p.add_argument("--truth", type=Path, required=True, help="groundtruth.csv")
    p.add_argument("--domain", choices=("physical", "social"), default="physical")
    p.add_argument("--max-lag", dest="max_lag", type=int)
    p.set_defaults(handler=cmd_validate)

    p = sub.add_parser(
        "spatial", parents=[common],
        help="state-month impact aggregation, writing spatial.csv",
    )
    p.add_argument("--in", dest="input", type=Path, required=True, help="posts.jsonl")
    p.add_argument("--labels", type=Path, required=True, help="labels.csv")
    p.add_argument("--gazetteer", type=Path, help="override the bundled place index")
    p.add_argument(
        "--source-filter", choices=("metadata", "text", "both"), default="both"
    )
    p.add_argument("--min-group-size", dest="min_group_size", type=int)
    p.set_defaults(handler=cmd_spatial)

    p = sub.add_parser(
        "chart", parents=[common],
        help="render an index or domain export as a deterministic SVG chart",
    )
    p.add_argument(
        "--in", dest="input", type=Path, required=True, help="index.csv or domain.csv"
    )
    p.add_argument("--title", default="")
    p.add_argument("--outfile", default="chart.svg")
    p.set_defaults(handler=cmd_chart)
    return parser


def _exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, TransportError):
        return 3
    if isinstance(
        exc, (OSError, MalformedInput, MalformedLine, MalformedCsv, UnknownPostId)
    ):
        return 2
    return 1


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.out.mkdir(parents=True, exist_ok=True)
    outputs: list[Path] = []
    try:
        return args.handler(args, outputs)
    except (DisimpactError, OSError, ValueError) as exc:
        for path in outputs:
            try:
                path.unlink()
            except OSError:
                pass
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return _exit_code_for(exc)


if __name__ == "__main__":
    sys.exit(main())
