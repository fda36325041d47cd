"""Command line front end.

Exit codes: 0 when the requested check passes (or the command produces
plain output), 1 when a verdict comes back negative (failed
classification, INVALID certificate, broken trend, incomplete Monte
Carlo run), 2 for usage errors including unreadable or malformed input.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .classifier import ALL_CONDITIONS, Overrides, check_membership, derive_params
from .decomposition import build_chart, decompose, verify_decomposition
from .embedding_glue import assemble_asymptotic_kernel
from .experiments import (
    ExperimentConfig,
    classify_batch,
    export_report,
    graph_id,
    pipeline_run,
    run_montecarlo,
)
from .graph_core import DomainError, Graph, GraphFormatError, parse_graph, serialize_graph
from .random_regular import SamplerConfig, SamplingBudgetError, sample_batch, sample_regular

USAGE_ERROR = 2


def _add_graph_source(p: argparse.ArgumentParser) -> None:
    src = p.add_argument_group("graph source (file or sampler)")
    src.add_argument("--input", type=Path, help="graph file: 'n m' header then edge lines")
    src.add_argument("--n", type=int, help="vertex count for sampling")
    src.add_argument("--d", type=int, help="degree for sampling")
    src.add_argument("--seed", type=int, default=0, help="sampler seed")
    src.add_argument("--index", type=int, default=0, help="sample index within the seed's stream")


def _load_graph(args: argparse.Namespace, parser: argparse.ArgumentParser) -> Graph:
    if args.input is not None:
        try:
            text = args.input.read_text()
        except OSError as exc:
            parser.exit(USAGE_ERROR, f"cannot read {args.input}: {exc}\n")
        return parse_graph(text)
    if args.n is None or args.d is None:
        parser.exit(USAGE_ERROR, "need --input or both --n and --d\n")
    config = SamplerConfig(n=args.n, d=args.d, seed=args.seed)
    return sample_regular(config, index=args.index)


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def _parse_conditions(raw: str | None) -> tuple[str, ...]:
    if raw is None:
        return ALL_CONDITIONS
    names = tuple(s.strip() for s in raw.split(",") if s.strip())
    unknown = set(names) - set(ALL_CONDITIONS)
    if unknown:
        raise DomainError(
            f"unknown conditions {sorted(unknown)}; choose from {', '.join(ALL_CONDITIONS)}"
        )
    return names


def _overrides(args: argparse.Namespace) -> Overrides | None:
    ov = Overrides(
        t=getattr(args, "t", None),
        delta=getattr(args, "delta", None),
        size_threshold=getattr(args, "size_threshold", None),
        cycle_bound=getattr(args, "cycle_bound", None),
    )
    return ov if ov.any_set() else None


def _int_list(raw: str) -> tuple[int, ...]:
    try:
        return tuple(int(s) for s in raw.split(",") if s.strip())
    except ValueError as exc:
        raise DomainError(f"expected comma-separated integers, got {raw!r}") from exc


# ---------------------------------------------------------------------------
# subcommands


def _cmd_sample(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    config = SamplerConfig(n=args.n, d=args.d, seed=args.seed, max_rejections=args.max_rejections)
    graphs = sample_batch(config, args.count, start_index=args.index)
    text = "\n".join(serialize_graph(g) for g in graphs)
    _emit(text, args.out)
    return 0


def _cmd_classify(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    g = _load_graph(args, parser)
    d = args.d if args.d is not None else g.max_degree
    params = derive_params(d, args.epsilon, args.m_const, g.n, _overrides(args))
    conditions = _parse_conditions(args.conditions)
    report = check_membership(g, params, conditions=conditions)
    if args.format == "json":
        _emit(export_report(report), args.out)
    else:
        lines = [f"graph {graph_id(g)}: {report.status}"]
        if not params.n_valid:
            lines.append("  note: derived parameters are outside the valid regime")
        for name, cond in sorted(report.conditions.items()):
            detail = f" [{cond.mode}]" if cond.mode else ""
            extra = f" ({cond.note})" if cond.note else ""
            lines.append(f"  {name}: {cond.status}{detail}{extra}")
        _emit("\n".join(lines) + "\n", args.out)
    return 0 if report.passed else 1


def _cmd_decompose(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    g = _load_graph(args, parser)
    dec = decompose(g, args.threshold)
    report = verify_decomposition(dec)
    payload: object = report
    ok = report.ok
    if args.chart:
        chart = build_chart(dec)
        payload = {"decomposition": report, "chart": chart}
        ok = ok and all(c.ok for c in chart.checks.values())
    if args.format == "json":
        _emit(export_report(payload), args.out)
    else:
        lines = [
            f"graph {graph_id(g)}: threshold {args.threshold}, "
            f"{dec.cycles.count} short cycles, {len(dec.removed_edges)} edges removed"
        ]
        for c in report.checks.values():
            mark = "ok" if c.ok else "FAIL"
            lines.append(f"  {c.name}: {mark} ({c.note})" if c.note else f"  {c.name}: {mark}")
        if args.chart:
            chart = build_chart(dec)
            for c in chart.checks.values():
                mark = "ok" if c.ok else "FAIL"
                lines.append(f"  chart/{c.name}: {mark}")
        _emit("\n".join(lines) + "\n", args.out)
    return 0 if ok else 1


def _cmd_kernel(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    g = _load_graph(args, parser)
    cert = assemble_asymptotic_kernel(
        g,
        threshold=args.threshold,
        radius=args.radius,
        sample_budget=args.budget,
        seed=args.check_seed,
    )
    if args.format == "json":
        _emit(export_report(cert), args.out)
    else:
        lines = [f"graph {graph_id(g)}: certificate {cert.status}"]
        for c in cert.checks:
            mark = "ok" if c.ok else "FAIL"
            lines.append(f"  {c.name}: {mark}" + (f" ({c.detail})" if c.detail else ""))
        _emit("\n".join(lines) + "\n", args.out)
    return 0 if cert.valid else 1


def _cmd_pipeline(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    g = _load_graph(args, parser)
    d = args.d if args.d is not None else g.max_degree
    result = pipeline_run(
        g,
        d,
        args.epsilon,
        args.m_const,
        conditions=_parse_conditions(args.conditions),
        overrides=_overrides(args),
        require_membership=not args.force_kernel,
        radius=args.radius,
        sample_budget=args.budget,
        seed=args.check_seed,
    )
    if args.format == "json":
        _emit(export_report(result), args.out)
    else:
        lines = [
            f"graph {result.graph_id}: classification {result.membership.status}",
        ]
        if result.certificate is None:
            lines.append(f"  kernel: skipped ({result.skipped_reason})")
        else:
            lines.append(f"  kernel: {result.certificate.status}")
            for c in result.certificate.checks:
                mark = "ok" if c.ok else "FAIL"
                lines.append(f"    {c.name}: {mark}")
        _emit("\n".join(lines) + "\n", args.out)
    return 0 if result.ok else 1


def _cmd_montecarlo(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    config = ExperimentConfig(
        n=args.n,
        d=args.d,
        samples=args.samples,
        seed=args.seed,
        cycle_lengths=_int_list(args.lengths),
        max_rejections=args.max_rejections,
    )
    report = run_montecarlo(config, threads=args.threads)
    _emit(export_report(report, fmt=args.format), args.out)
    return 0 if report.complete else 1


def _cmd_batch(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    report = classify_batch(
        _int_list(args.sizes),
        args.d,
        args.epsilon,
        args.m_const,
        samples=args.samples,
        seed=args.seed,
        conditions=_parse_conditions(args.conditions),
        overrides=_overrides(args),
        confidence=args.confidence,
        threads=args.threads,
    )
    _emit(export_report(report, fmt=args.format), args.out)
    return 0 if report.trends_ok else 1


def _add_class_params(p: argparse.ArgumentParser) -> None:
    p.add_argument("--epsilon", type=float, required=True, help="sparsity exponent in (0,1)")
    p.add_argument("--m-const", type=float, required=True, help="diameter and expansion constant")
    p.add_argument("--t", type=int, help="override: cycle threshold")
    p.add_argument("--delta", type=float, help="override: density slack")
    p.add_argument("--size-threshold", type=float, help="override: subset size cap")
    p.add_argument("--cycle-bound", type=float, help="override: short cycle cap")
    p.add_argument("--conditions", help="comma list from: " + ",".join(ALL_CONDITIONS))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="asymembed",
        description="random regular graphs: sampling, classification, "
        "cycle-deletion decomposition, certified kernels",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="sample simple regular graphs")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--index", type=int, default=0, help="first sample index")
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--max-rejections", type=int, default=100_000)
    p.add_argument("--out", type=Path)
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("classify", help="membership check for one graph")
    _add_graph_source(p)
    _add_class_params(p)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("decompose", help="delete short cycles and verify the zones")
    _add_graph_source(p)
    p.add_argument("--threshold", type=int, required=True, help="cycle length threshold")
    p.add_argument("--chart", action="store_true", help="also build and check the chart")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=_cmd_decompose)

    p = sub.add_parser("kernel", help="assemble and certify the kernel")
    _add_graph_source(p)
    p.add_argument("--threshold", type=int, required=True)
    p.add_argument("--radius", type=int, default=3, help="certification ball radius")
    p.add_argument("--budget", type=int, default=32, help="random subset checks")
    p.add_argument("--check-seed", type=int, default=0, help="seed for subset checks")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=_cmd_kernel)

    p = sub.add_parser("pipeline", help="classify then assemble with certificate")
    _add_graph_source(p)
    _add_class_params(p)
    p.add_argument("--radius", type=int, help="certification ball radius")
    p.add_argument("--budget", type=int, default=32)
    p.add_argument("--check-seed", type=int, default=0)
    p.add_argument(
        "--force-kernel", action="store_true",
        help="assemble even when classification does not pass",
    )
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=_cmd_pipeline)

    p = sub.add_parser("montecarlo", help="cycle count statistics over many samples")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--lengths", default="3,4,5", help="comma list of cycle lengths")
    p.add_argument("--max-rejections", type=int, default=100_000)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=_cmd_montecarlo)

    p = sub.add_parser("batch", help="failure rate trend across sizes")
    p.add_argument("--sizes", required=True, help="comma list, increasing")
    p.add_argument("--d", type=int, required=True)
    _add_class_params(p)
    p.add_argument("--samples", type=int, required=True, help="graphs per size")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--confidence", type=float, default=0.95)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=_cmd_batch)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except (GraphFormatError, DomainError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return USAGE_ERROR
    except SamplingBudgetError as exc:
        sys.stderr.write(f"sampling failed: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
