"""Monte Carlo harness, batch classification trends, the end-to-end
pipeline, and byte-stable report export.

Exports are deterministic functions of the run configuration and seed:
floats are rounded to 12 significant digits before serialization, keys are
sorted, and wall-clock data never enters a report.  Worker threads only
split the work; results are merged in sample-index order, so the thread
count cannot change a single byte of output.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields, is_dataclass
from typing import Any, Mapping, Sequence

import numpy as np
from scipy import stats as _stats

from .classifier import (
    ALL_CONDITIONS,
    FAIL,
    INCONCLUSIVE,
    ClassParams,
    MembershipReport,
    Overrides,
    check_membership,
    derive_params,
)
from .embedding_glue import KernelCertificate, assemble_asymptotic_kernel
from .graph_core import DomainError, Graph, count_cycles, serialize_graph
from .random_regular import (
    DEFAULT_MAX_REJECTIONS,
    SamplerConfig,
    SamplingBudgetError,
    expected_cycle_count,
    sample_regular,
)


def graph_id(g: Graph) -> str:
    """Stable content hash of a graph's canonical serialization."""
    return hashlib.sha256(serialize_graph(g).encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# Monte Carlo cycle counts


@dataclass(frozen=True)
class ExperimentConfig:
    n: int
    d: int
    samples: int
    seed: int
    cycle_lengths: tuple[int, ...] = (3, 4, 5)
    max_rejections: int = DEFAULT_MAX_REJECTIONS

    def __post_init__(self) -> None:
        if self.samples < 1:
            raise DomainError(f"samples must be >= 1, got {self.samples}")
        if not self.cycle_lengths:
            raise DomainError("cycle_lengths must be nonempty")
        if any(r < 3 for r in self.cycle_lengths):
            raise DomainError("cycle lengths start at 3")
        # surfaces n/d problems before any sampling happens
        SamplerConfig(n=self.n, d=self.d, seed=self.seed, max_rejections=self.max_rejections)


@dataclass(frozen=True)
class CycleStat:
    """Sample statistics for one cycle length against the sparse limit."""

    length: int
    mean: float
    std_error: float
    target: float
    z_score: float


@dataclass(frozen=True)
class MCReport:
    config: ExperimentConfig
    completed: int
    failed_indices: tuple[int, ...]
    stats: tuple[CycleStat, ...]
    counts: tuple[tuple[int, ...], ...]

    @property
    def complete(self) -> bool:
        return not self.failed_indices


def _cycle_stats(config: ExperimentConfig, counts: np.ndarray) -> tuple[CycleStat, ...]:
    out = []
    for j, r in enumerate(config.cycle_lengths):
        col = counts[:, j].astype(float)
        mean = float(col.mean())
        if len(col) > 1:
            se = float(col.std(ddof=1) / math.sqrt(len(col)))
        else:
            se = 0.0
        target = expected_cycle_count(config.d, r)
        if se > 0.0:
            z = (mean - target) / se
        else:
            z = 0.0 if mean == target else math.inf
        out.append(CycleStat(length=r, mean=mean, std_error=se, target=target, z_score=z))
    return tuple(out)


def run_montecarlo(config: ExperimentConfig, threads: int = 1) -> MCReport:
    """Sample random regular graphs and count short cycles.

    Sample ``index`` always draws from its own random stream, and results
    are merged in index order, so any ``threads`` value produces the same
    report.  Indices whose rejection budget runs out are recorded and
    skipped rather than aborting the run.
    """
    sampler = SamplerConfig(
        n=config.n, d=config.d, seed=config.seed, max_rejections=config.max_rejections
    )

    def one(index: int) -> tuple[int, tuple[int, ...] | None]:
        try:
            g = sample_regular(sampler, index)
        except SamplingBudgetError:
            return index, None
        return index, tuple(count_cycles(g, r) for r in config.cycle_lengths)

    indices = range(config.samples)
    if threads <= 1:
        results = [one(i) for i in indices]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, indices))
    results.sort(key=lambda pair: pair[0])
    failed = tuple(i for i, row in results if row is None)
    rows = [row for _, row in results if row is not None]
    counts = np.array(rows, dtype=int) if rows else np.zeros((0, len(config.cycle_lengths)), int)
    stats = _cycle_stats(config, counts) if len(rows) else ()
    return MCReport(
        config=config,
        completed=len(rows),
        failed_indices=failed,
        stats=stats,
        counts=tuple(tuple(r) for r in rows),
    )


# ---------------------------------------------------------------------------
# batch classification across sizes


@dataclass(frozen=True)
class SizeOutcome:
    n: int
    params_valid: bool
    samples: int
    sampler_failures: int
    statuses: tuple[str, ...]
    condition_failures: Mapping[str, int]
    condition_inconclusive: Mapping[str, int]

    def failure_rate(self, condition: str) -> float:
        if self.samples == 0:
            return 0.0
        return self.condition_failures.get(condition, 0) / self.samples


@dataclass(frozen=True)
class TrendCheck:
    """One-sided two-proportion tests between consecutive sizes.

    ``non_increasing`` holds when no adjacent pair shows a significant
    rate increase at the report's confidence level.
    """

    condition: str
    rates: tuple[float, ...]
    z_scores: tuple[float, ...]
    non_increasing: bool


@dataclass(frozen=True)
class BatchReport:
    d: int
    epsilon: float
    m_const: float
    seed: int
    confidence: float
    conditions: tuple[str, ...]
    sizes: tuple[int, ...]
    outcomes: tuple[SizeOutcome, ...]
    trends: tuple[TrendCheck, ...]

    @property
    def trends_ok(self) -> bool:
        return all(t.non_increasing for t in self.trends)


def _increase_z(k1: int, n1: int, k2: int, n2: int) -> float:
    """z-score for the alternative 'the second rate is larger'."""
    if n1 == 0 or n2 == 0:
        return 0.0
    p1, p2 = k1 / n1, k2 / n2
    pooled = (k1 + k2) / (n1 + n2)
    var = pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2)
    if var <= 0.0:
        return 0.0
    return (p2 - p1) / math.sqrt(var)


def classify_batch(
    sizes: Sequence[int],
    d: int,
    epsilon: float,
    m_const: float,
    samples: int,
    seed: int,
    conditions: Sequence[str] = ALL_CONDITIONS,
    overrides: Overrides | None = None,
    confidence: float = 0.95,
    threads: int = 1,
) -> BatchReport:
    """Classify sampled graphs at each size and test the failure-rate trend.

    For every condition, adjacent sizes are compared with a one-sided
    two-proportion z-test; the trend passes when no comparison shows a
    significant increase.  Zero failure rates everywhere pass trivially.
    """
    if len(sizes) < 2:
        raise DomainError("need at least two sizes for a trend")
    if sorted(sizes) != list(sizes):
        raise DomainError("sizes must be increasing")
    wanted = tuple(conditions)
    outcomes: list[SizeOutcome] = []
    for n in sizes:
        params = derive_params(d, epsilon, m_const, n, overrides)
        sampler = SamplerConfig(n=n, d=d, seed=seed)

        def one(index: int) -> MembershipReport | None:
            try:
                g = sample_regular(sampler, index)
            except SamplingBudgetError:
                return None
            return check_membership(g, params, conditions=wanted)

        if threads <= 1:
            reports = [one(i) for i in range(samples)]
        else:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                reports = list(pool.map(one, range(samples)))
        ok_reports = [r for r in reports if r is not None]
        failures = {c: 0 for c in wanted}
        open_ = {c: 0 for c in wanted}
        for rep in ok_reports:
            for c in wanted:
                status = rep.conditions[c].status
                if status == FAIL:
                    failures[c] += 1
                elif status == INCONCLUSIVE:
                    open_[c] += 1
        outcomes.append(
            SizeOutcome(
                n=n,
                params_valid=params.n_valid,
                samples=len(ok_reports),
                sampler_failures=len(reports) - len(ok_reports),
                statuses=tuple(r.status for r in ok_reports),
                condition_failures=failures,
                condition_inconclusive=open_,
            )
        )
    crit = float(_stats.norm.ppf(confidence))
    trends = []
    for c in wanted:
        zs = []
        for prev, cur in zip(outcomes, outcomes[1:]):
            zs.append(
                _increase_z(
                    prev.condition_failures[c], prev.samples,
                    cur.condition_failures[c], cur.samples,
                )
            )
        rates = tuple(o.failure_rate(c) for o in outcomes)
        trends.append(
            TrendCheck(
                condition=c,
                rates=rates,
                z_scores=tuple(zs),
                non_increasing=all(z <= crit for z in zs),
            )
        )
    return BatchReport(
        d=d,
        epsilon=epsilon,
        m_const=m_const,
        seed=seed,
        confidence=confidence,
        conditions=wanted,
        sizes=tuple(sizes),
        outcomes=tuple(outcomes),
        trends=tuple(trends),
    )


# ---------------------------------------------------------------------------
# end-to-end pipeline


@dataclass(frozen=True)
class PipelineResult:
    graph_id: str
    params: ClassParams
    membership: MembershipReport
    certificate: KernelCertificate | None
    skipped_reason: str = ""

    @property
    def ok(self) -> bool:
        return self.certificate is not None and self.certificate.valid


def pipeline_run(
    g: Graph,
    d: int,
    epsilon: float,
    m_const: float,
    conditions: Sequence[str] = ALL_CONDITIONS,
    overrides: Overrides | None = None,
    require_membership: bool = True,
    radius: int | None = None,
    sample_budget: int = 32,
    seed: int = 0,
) -> PipelineResult:
    """Classify a graph, then assemble and certify its kernel.

    With ``require_membership`` the kernel stage only runs on graphs whose
    aggregate classification is PASS; otherwise assembly runs regardless
    (useful for planted instances that are deliberately irregular).
    """
    params = derive_params(d, epsilon, m_const, g.n, overrides)
    membership = check_membership(g, params, conditions=conditions)
    gid = graph_id(g)
    if require_membership and not membership.passed:
        return PipelineResult(
            graph_id=gid,
            params=params,
            membership=membership,
            certificate=None,
            skipped_reason=f"classification {membership.status}",
        )
    if radius is None:
        radius = max(1, round(params.radius_coeff * params.logd_n))
    cert = assemble_asymptotic_kernel(
        g,
        threshold=params.t,
        radius=radius,
        sample_budget=sample_budget,
        seed=seed,
    )
    return PipelineResult(graph_id=gid, params=params, membership=membership, certificate=cert)


# ---------------------------------------------------------------------------
# byte-stable export


def _round_float(x: float) -> Any:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(f"{x:.12g}")


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, KernelCertificate):
        return _jsonable(summarize_certificate(obj))
    if is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: _jsonable(getattr(obj, f.name)) for f in fields(obj)}
    if isinstance(obj, Mapping):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _round_float(float(obj))
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (frozenset, set)):
        return sorted(_jsonable(v) for v in obj)
    if isinstance(obj, (tuple, list)):
        return [_jsonable(v) for v in obj]
    if obj is None or isinstance(obj, str):
        return obj
    return repr(obj)


def summarize_certificate(cert: KernelCertificate) -> dict[str, Any]:
    """Exportable view of a certificate: verdict and checks, not the
    kernel table itself."""
    return {
        "status": cert.status,
        "checks": [
            {"name": c.name, "ok": c.ok, "detail": c.detail} for c in cert.checks
        ],
        "grades_accepted": list(cert.grades_accepted),
        "grades_total": cert.grades_total,
        "truncation_bound": cert.truncation_bound,
        "overlap_width": cert.overlap_width,
        "lebesgue": cert.lebesgue,
        "radius": cert.radius,
        "note": cert.note,
    }


def export_report(report: Any, fmt: str = "json") -> str:
    """Serialize a report deterministically.

    JSON works for every report type; CSV covers the tabular ones
    (Monte Carlo stats and batch failure rates).
    """
    if fmt == "json":
        return json.dumps(_jsonable(report), sort_keys=True, indent=2) + "\n"
    if fmt == "csv":
        if isinstance(report, MCReport):
            return _montecarlo_csv(report)
        if isinstance(report, BatchReport):
            return _batch_csv(report)
        raise DomainError(f"csv export not defined for {type(report).__name__}")
    raise DomainError(f"unknown format {fmt!r}")


def _fmt(x: Any) -> Any:
    if isinstance(x, float):
        r = _round_float(x)
        return f"{r:.12g}" if isinstance(r, float) else r
    return x


def _montecarlo_csv(report: MCReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["length", "mean", "std_error", "target", "z_score"])
    for s in report.stats:
        writer.writerow([s.length, _fmt(s.mean), _fmt(s.std_error), _fmt(s.target), _fmt(s.z_score)])
    return buf.getvalue()


def _batch_csv(report: BatchReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "condition", "samples", "failures", "inconclusive", "failure_rate"])
    for outcome in report.outcomes:
        for c in report.conditions:
            writer.writerow(
                [
                    outcome.n,
                    c,
                    outcome.samples,
                    outcome.condition_failures[c],
                    outcome.condition_inconclusive[c],
                    _fmt(outcome.failure_rate(c)),
                ]
            )
    return buf.getvalue()
