"""Seeded replication harness, report serialization, and point-set I/O.

An experiment pairs a point process with a sample size, a replicate count,
and a set of statistic requests.  Replicate ``r`` always draws from the
substream ``(master_seed, r)``, so a report is bit-for-bit reproducible no
matter how the replicates are scheduled across workers.  A degenerate
sample (coincident points) is retried on a fresh substream a bounded
number of times and then recorded as a failure, never dropped silently.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import repeat
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from . import __version__
from .errors import ConfigError, DuplicatePointError, ParseError
from .geometry import PAIRWISE_CAP, PointSet
from .processes import GENERATOR_NAME, ProcessSpec, generate, substream
from .slide_stats import (
    MAX_NUMERIC_ORDER,
    SlideReport,
    TangibilityVerdict,
    assembly_numbers,
    dimension_estimates,
    level_numbers,
    slide_numbers,
    tangibility_check,
)

__all__ = [
    "SCHEMA_VERSION",
    "Aggregate",
    "ExperimentConfig",
    "ExperimentReport",
    "FailedReplicate",
    "StatisticRequest",
    "emit_report",
    "format_table",
    "load_points",
    "load_report",
    "render_report",
    "render_reports",
    "run_experiment",
]

SCHEMA_VERSION = 1

_STAT_KINDS = ("slide", "assembly", "level")
_STAT_SYMBOL = {"slide": "rho", "assembly": "alpha", "level": "lambda"}

_MAX_ATTEMPTS = 4  # initial draw plus three retries
_ATTEMPT_STRIDE = 2**32  # retry substreams must never collide with replicates


def _as_int(name: str, value: Any) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{name} must be an integer, got {value!r}")
    return value


@dataclass(frozen=True)
class StatisticRequest:
    """One family of statistics to compute on every replicate."""

    kind: str
    orders: tuple[int, ...] = (1, 2)

    def __post_init__(self) -> None:
        if self.kind not in _STAT_KINDS:
            raise ConfigError(
                f"unknown statistic kind {self.kind!r}; "
                f"choose from {list(_STAT_KINDS)}"
            )
        orders = tuple(sorted(_as_int("order", o) for o in self.orders))
        object.__setattr__(self, "orders", orders)
        if not orders:
            raise ConfigError("at least one order is required")
        if len(set(orders)) != len(orders):
            raise ConfigError("orders must be distinct")
        if orders[0] < 1:
            raise ConfigError("orders must be positive")
        if self.kind != "level" and orders[-1] > MAX_NUMERIC_ORDER:
            raise ConfigError(
                f"{self.kind} orders above {MAX_NUMERIC_ORDER} are not computable"
            )

    def key(self, order: int) -> str:
        return f"{self.kind}:{order}"


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce one experiment."""

    process: ProcessSpec
    sample_size: int
    replicates: int
    statistics: tuple[StatisticRequest, ...] = (StatisticRequest("slide", (1, 2)),)
    master_seed: int = 0
    tangibility_tol: float = 0.1
    workers: int = 1
    pairwise_cap: int = PAIRWISE_CAP
    cross_check: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "statistics", tuple(self.statistics))
        if not isinstance(self.process, ProcessSpec):
            raise ConfigError("process must be a ProcessSpec")
        if _as_int("sample_size", self.sample_size) < 2:
            raise ConfigError("sample_size must be at least 2")
        if _as_int("replicates", self.replicates) < 1:
            raise ConfigError("replicates must be at least 1")
        if not self.statistics:
            raise ConfigError("at least one statistic request is required")
        kinds = [request.kind for request in self.statistics]
        if len(set(kinds)) != len(kinds):
            raise ConfigError("statistic kinds must not repeat")
        if _as_int("master_seed", self.master_seed) < 0:
            raise ConfigError("master_seed must be nonnegative")
        if not self.tangibility_tol > 0.0:
            raise ConfigError("tangibility_tol must be positive")
        if _as_int("workers", self.workers) < 1:
            raise ConfigError("workers must be at least 1")
        if "assembly" in kinds and self.sample_size > self.pairwise_cap:
            raise ConfigError(
                f"assembly statistics need sample_size <= pairwise_cap "
                f"({self.sample_size} > {self.pairwise_cap})"
            )

    def to_dict(self) -> dict[str, Any]:
        return {
            "process": {
                "kind": self.process.kind,
                "params": dict(self.process.params),
                "seed": self.process.seed,
            },
            "sample_size": self.sample_size,
            "replicates": self.replicates,
            "statistics": [
                {"kind": request.kind, "orders": list(request.orders)}
                for request in self.statistics
            ],
            "master_seed": self.master_seed,
            "tangibility_tol": self.tangibility_tol,
            "workers": self.workers,
            "pairwise_cap": self.pairwise_cap,
            "cross_check": self.cross_check,
        }

    @classmethod
    def from_dict(cls, data: Any) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("experiment config must be a JSON object")
        known = {
            "process",
            "sample_size",
            "replicates",
            "statistics",
            "master_seed",
            "tangibility_tol",
            "workers",
            "pairwise_cap",
            "cross_check",
        }
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        missing = {"process", "sample_size", "replicates"} - set(data)
        if missing:
            raise ConfigError(f"missing config keys: {sorted(missing)}")
        process = data["process"]
        if not isinstance(process, dict):
            raise ConfigError("process must be an object with a kind")
        extra = set(process) - {"kind", "params", "seed"}
        if extra:
            raise ConfigError(f"unknown process keys: {sorted(extra)}")
        if "kind" not in process:
            raise ConfigError("process needs a kind")
        params = process.get("params", {})
        if not isinstance(params, dict):
            raise ConfigError("process params must be an object")
        spec = ProcessSpec(
            process["kind"], dict(params), _as_int("seed", process.get("seed", 0))
        )
        requests = data.get("statistics", [{"kind": "slide", "orders": [1, 2]}])
        if not isinstance(requests, list):
            raise ConfigError("statistics must be an array of requests")
        statistics = []
        for entry in requests:
            if not isinstance(entry, dict) or "kind" not in entry:
                raise ConfigError("each statistic request needs a kind")
            extra = set(entry) - {"kind", "orders"}
            if extra:
                raise ConfigError(f"unknown statistic keys: {sorted(extra)}")
            statistics.append(
                StatisticRequest(entry["kind"], tuple(entry.get("orders", (1, 2))))
            )
        tol = data.get("tangibility_tol", 0.1)
        if isinstance(tol, bool) or not isinstance(tol, (int, float)):
            raise ConfigError("tangibility_tol must be a number")
        cross_check = data.get("cross_check", True)
        if not isinstance(cross_check, bool):
            raise ConfigError("cross_check must be a boolean")
        return cls(
            process=spec,
            sample_size=_as_int("sample_size", data["sample_size"]),
            replicates=_as_int("replicates", data["replicates"]),
            statistics=tuple(statistics),
            master_seed=_as_int("master_seed", data.get("master_seed", 0)),
            tangibility_tol=float(tol),
            workers=_as_int("workers", data.get("workers", 1)),
            pairwise_cap=_as_int("pairwise_cap", data.get("pairwise_cap", PAIRWISE_CAP)),
            cross_check=cross_check,
        )


@dataclass(frozen=True)
class Aggregate:
    """Mean and spread of one statistic across successful replicates."""

    mean: float
    sd: float | None
    count: int


@dataclass(frozen=True)
class FailedReplicate:
    replicate: int
    attempts: int
    error: str


@dataclass
class ExperimentReport:
    """Full result of one experiment, round-trippable through JSON."""

    config: ExperimentConfig
    per_replicate: dict[str, tuple[float, ...]]
    aggregates: dict[str, Aggregate]
    dimension_estimates: dict[int, float | None] | None
    tangibility: TangibilityVerdict | None
    failed_replicates: tuple[FailedReplicate, ...]
    provenance: dict[str, Any]

    def to_dict(self) -> dict[str, Any]:
        verdict = None
        if self.tangibility is not None:
            verdict = {
                "dimension_estimates": {
                    str(order): value
                    for order, value in self.tangibility.dimension_estimates.items()
                },
                "consensus_dimension": self.tangibility.consensus_dimension,
                "residuals": {
                    str(order): value
                    for order, value in self.tangibility.residuals.items()
                },
                "tangible": self.tangibility.tangible,
                "tolerance": self.tangibility.tolerance,
            }
        estimates = None
        if self.dimension_estimates is not None:
            estimates = {
                str(order): value
                for order, value in self.dimension_estimates.items()
            }
        return {
            "schema_version": SCHEMA_VERSION,
            "config": self.config.to_dict(),
            "provenance": dict(self.provenance),
            "per_replicate": {
                key: list(values) for key, values in self.per_replicate.items()
            },
            "aggregates": {
                key: {"mean": agg.mean, "sd": agg.sd, "count": agg.count}
                for key, agg in self.aggregates.items()
            },
            "dimension_estimates": estimates,
            "tangibility": verdict,
            "failed_replicates": [
                {
                    "replicate": failure.replicate,
                    "attempts": failure.attempts,
                    "error": failure.error,
                }
                for failure in self.failed_replicates
            ],
        }

    @classmethod
    def from_dict(cls, data: Any) -> "ExperimentReport":
        if not isinstance(data, dict):
            raise ParseError("report must be a JSON object")
        version = data.get("schema_version")
        if version != SCHEMA_VERSION:
            raise ParseError(
                f"unsupported report schema {version!r}; expected {SCHEMA_VERSION}"
            )
        try:
            config = ExperimentConfig.from_dict(data["config"])
            verdict = None
            if data["tangibility"] is not None:
                raw = data["tangibility"]
                verdict = TangibilityVerdict(
                    {int(k): v for k, v in raw["dimension_estimates"].items()},
                    raw["consensus_dimension"],
                    {int(k): v for k, v in raw["residuals"].items()},
                    raw["tangible"],
                    raw["tolerance"],
                )
            estimates = None
            if data["dimension_estimates"] is not None:
                estimates = {
                    int(k): v for k, v in data["dimension_estimates"].items()
                }
            return cls(
                config=config,
                per_replicate={
                    key: tuple(values)
                    for key, values in data["per_replicate"].items()
                },
                aggregates={
                    key: Aggregate(raw["mean"], raw["sd"], raw["count"])
                    for key, raw in data["aggregates"].items()
                },
                dimension_estimates=estimates,
                tangibility=verdict,
                failed_replicates=tuple(
                    FailedReplicate(raw["replicate"], raw["attempts"], raw["error"])
                    for raw in data["failed_replicates"]
                ),
                provenance=dict(data["provenance"]),
            )
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed report: {exc}") from exc


def _method(kind: str, order: int) -> str:
    if kind == "level" or order == 1:
        return "closed_form"
    if order == 2:
        return "conjectured_closed_form"
    return "numeric_oracle"


def _point_statistics(config: ExperimentConfig, points: PointSet) -> dict[str, float]:
    values: dict[str, float] = {}
    for request in config.statistics:
        if request.kind == "slide":
            report = slide_numbers(
                points, orders=request.orders, cross_check=config.cross_check
            )
        elif request.kind == "assembly":
            report = assembly_numbers(
                points,
                orders=request.orders,
                cross_check=config.cross_check,
                max_points=config.pairwise_cap,
            )
        else:
            report = level_numbers(points, max_order=request.orders[-1])
        for order in request.orders:
            values[request.key(order)] = report.values[order]
            if order in report.oracle_error:
                values[f"{request.key(order)}:oracle_gap"] = report.oracle_error[order]
    return values


def _replicate_outcome(
    config: ExperimentConfig, replicate: int
) -> dict[str, float] | FailedReplicate:
    last_error = "unknown"
    for attempt in range(_MAX_ATTEMPTS):
        stream = substream(config.master_seed, attempt * _ATTEMPT_STRIDE + replicate)
        points = generate(config.process, config.sample_size, stream=stream)
        try:
            return _point_statistics(config, points)
        except DuplicatePointError as exc:
            last_error = str(exc)
    return FailedReplicate(replicate, _MAX_ATTEMPTS, last_error)


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Run every replicate, aggregate, and attach provenance.

    Deterministic for a given config, independent of the worker count;
    tangibility is judged on the aggregate slide means when order 1 and at
    least one higher order were requested.
    """
    if config.workers == 1:
        outcomes = [
            _replicate_outcome(config, r) for r in range(config.replicates)
        ]
    else:
        chunk = max(1, config.replicates // (4 * config.workers))
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            outcomes = list(
                pool.map(
                    _replicate_outcome,
                    repeat(config),
                    range(config.replicates),
                    chunksize=chunk,
                )
            )
    failures = tuple(o for o in outcomes if isinstance(o, FailedReplicate))
    successes = [o for o in outcomes if not isinstance(o, FailedReplicate)]
    per_replicate: dict[str, tuple[float, ...]] = {}
    if successes:
        for key in successes[0]:
            per_replicate[key] = tuple(values[key] for values in successes)
    aggregates = {key: _aggregate(values) for key, values in per_replicate.items()}

    estimates = None
    verdict = None
    slide_request = next(
        (request for request in config.statistics if request.kind == "slide"), None
    )
    if slide_request is not None and successes:
        mean_report = SlideReport(
            list(slide_request.orders),
            {
                order: aggregates[slide_request.key(order)].mean
                for order in slide_request.orders
            },
            {order: _method("slide", order) for order in slide_request.orders},
        )
        estimates = dimension_estimates(mean_report)
        if slide_request.orders[0] == 1 and len(slide_request.orders) > 1:
            verdict = tangibility_check(mean_report, tol=config.tangibility_tol)

    provenance = {
        "package": "slidestats",
        "version": __version__,
        "generator": GENERATOR_NAME,
        "master_seed": config.master_seed,
        "schema_version": SCHEMA_VERSION,
    }
    return ExperimentReport(
        config=config,
        per_replicate=per_replicate,
        aggregates=aggregates,
        dimension_estimates=estimates,
        tangibility=verdict,
        failed_replicates=failures,
        provenance=provenance,
    )


def _aggregate(values: Sequence[float]) -> Aggregate:
    arr = np.asarray(values, dtype=float)
    sd = float(arr.std(ddof=1)) if arr.size > 1 else None
    return Aggregate(float(arr.mean()), sd, int(arr.size))


def _process_label(spec: ProcessSpec) -> str:
    if not spec.params:
        return spec.kind
    inner = ",".join(f"{k}={spec.params[k]}" for k in sorted(spec.params))
    return f"{spec.kind}({inner})"


def render_report(report: ExperimentReport, format: str = "json") -> str:
    """Render one report as json, csv, or a text table."""
    if format == "json":
        return json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
    return render_reports([report], format)


def render_reports(
    reports: Sequence[ExperimentReport], format: str = "table"
) -> str:
    """Render several reports together; csv and table concatenate rows.

    A json rendering of a single report is the bare report object (the form
    ``load_report`` reads back); several reports nest under ``reports``.
    """
    if not reports:
        raise ValueError("at least one report is required")
    if format == "json":
        if len(reports) == 1:
            return render_report(reports[0], "json")
        payload = {
            "schema_version": SCHEMA_VERSION,
            "reports": [report.to_dict() for report in reports],
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if format == "csv":
        return _render_csv(reports)
    if format == "table":
        return format_table(reports)
    raise ConfigError(
        f"unknown report format {format!r}; choose from ['csv', 'json', 'table']"
    )


def _render_csv(reports: Sequence[ExperimentReport]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(
        ["process", "statistic", "order", "method", "replicates", "mean", "sd"]
    )
    for report in reports:
        label = _process_label(report.config.process)
        for request in report.config.statistics:
            for order in request.orders:
                agg = report.aggregates.get(request.key(order))
                if agg is None:
                    writer.writerow(
                        [label, request.kind, order, _method(request.kind, order), 0, "", ""]
                    )
                    continue
                writer.writerow(
                    [
                        label,
                        request.kind,
                        order,
                        _method(request.kind, order),
                        agg.count,
                        repr(agg.mean),
                        "" if agg.sd is None else repr(agg.sd),
                    ]
                )
    return buffer.getvalue()


def format_table(reports: Sequence[ExperimentReport]) -> str:
    """Aligned text table, one row per statistic order."""
    header = ("process", "statistic", "n", "reps", "mean", "sd", "1/mean")
    rows: list[tuple[str, ...]] = [header]
    for report in reports:
        label = _process_label(report.config.process)
        for request in report.config.statistics:
            for order in request.orders:
                agg = report.aggregates.get(request.key(order))
                if agg is None:
                    rows.append(
                        (label, _STAT_SYMBOL[request.kind], str(order), "0",
                         "all replicates failed", "", "")
                    )
                    continue
                inverse = ""
                if order == 1 and agg.mean > 0.0:
                    inverse = f"{1.0 / agg.mean:.6f}"
                rows.append(
                    (
                        label,
                        _STAT_SYMBOL[request.kind],
                        str(order),
                        str(agg.count),
                        f"{agg.mean:.6f}",
                        "" if agg.sd is None else f"{agg.sd:.6f}",
                        inverse,
                    )
                )
    widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
    lines = []
    for index, row in enumerate(rows):
        lines.append(
            "  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip()
        )
        if index == 0:
            lines.append("  ".join("-" * width for width in widths))
    return "\n".join(lines) + "\n"


def emit_report(
    report: ExperimentReport,
    format: str = "json",
    path: str | Path | None = None,
) -> str:
    """Render a report and optionally write it to ``path``; returns the text."""
    text = render_report(report, format)
    if path is not None:
        Path(path).write_text(text)
    return text


def load_report(path: str | Path) -> ExperimentReport:
    """Read back a json report written by ``emit_report``."""
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    return ExperimentReport.from_dict(data)


def load_points(path: str | Path, format: str | None = None) -> PointSet:
    """Read a point set from a CSV or JSON file.

    CSV holds one point per line, coordinates comma separated; one header
    line is tolerated and ``#`` or blank lines are skipped.  JSON holds an
    array of numbers (one dimension) or of equal-length coordinate arrays.
    Malformed input raises :class:`ParseError` naming the offending line.
    """
    p = Path(path)
    fmt = format
    if fmt is None:
        suffix = p.suffix.lower()
        if suffix == ".json":
            fmt = "json"
        elif suffix in (".csv", ".txt", ".dat"):
            fmt = "csv"
        else:
            raise ParseError(
                f"{p}: cannot infer format from suffix {suffix!r}; "
                "pass format='csv' or format='json'"
            )
    if fmt not in ("csv", "json"):
        raise ConfigError(f"unknown point format {fmt!r}")
    coords = _parse_json_points(p) if fmt == "json" else _parse_csv_points(p)
    try:
        return PointSet.from_coords(coords)
    except ValueError as exc:
        raise ParseError(f"{p}: {exc}") from exc


def _parse_csv_points(path: Path) -> np.ndarray:
    rows: list[list[float]] = []
    width = None
    header_seen = False
    try:
        handle = open(path)
    except OSError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    with handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            cells = [cell.strip() for cell in line.split(",")]
            row: list[float] = []
            bad = None
            for cell in cells:
                try:
                    row.append(float(cell))
                except ValueError:
                    bad = cell
                    break
            if bad is not None:
                # one non-numeric line is fine if nothing parsed yet: a header
                if not rows and not header_seen:
                    header_seen = True
                    continue
                raise ParseError(
                    f"{path}: line {lineno}: non-numeric value {bad!r}"
                )
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise ParseError(
                    f"{path}: line {lineno}: expected {width} columns, "
                    f"found {len(row)}"
                )
            rows.append(row)
    if not rows:
        raise ParseError(f"{path}: no data rows")
    return np.asarray(rows, dtype=float)


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _parse_json_points(path: Path) -> np.ndarray:
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    if not isinstance(data, list) or not data:
        raise ParseError(f"{path}: expected a nonempty JSON array of points")
    if all(_is_number(value) for value in data):
        return np.asarray(data, dtype=float)
    if all(isinstance(value, list) for value in data):
        width = len(data[0])
        for index, point in enumerate(data):
            if len(point) != width:
                raise ParseError(
                    f"{path}: point {index} has {len(point)} coordinates, "
                    f"expected {width}"
                )
            if not all(_is_number(coord) for coord in point):
                raise ParseError(f"{path}: point {index} has a non-numeric coordinate")
        return np.asarray(data, dtype=float)
    raise ParseError(f"{path}: points must be all numbers or all coordinate arrays")
