"""Fischer benchmark grid: run both encodings side by side and tabulate.

``run_benchmark`` measures each configuration twice — plain reachability for
the system state count, then the verification run for product size and the
verdict — and records wall time for the pair plus the process's peak RSS
(best effort; 0 when the platform doesn't report it).  A state-limit abort
doesn't kill the grid: the record keeps the partial count and a ``None``
verdict, serialized as ``limit``.

``emit_table`` renders the records as RFC-4180 CSV (one row per
configuration, stable column set) or as a markdown table with the two
encodings' columns side by side for each (T, threads, algorithm) cell.
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass

from .checking import verify
from .explorer import LimitExceeded, explore_reachable
from .fischer import FischerConfig, build_fischer

__all__ = ["BenchmarkRecord", "run_benchmark", "emit_table", "CSV_COLUMNS"]

CSV_COLUMNS = (
    "method",
    "T",
    "threads",
    "algorithm",
    "product_states",
    "system_states",
    "transitions",
    "time_s",
    "peak_mem_mb",
    "verdict",
)


@dataclass(frozen=True)
class BenchmarkRecord:
    config: FischerConfig
    product_states: int
    system_states: int
    transitions: int
    wall_time_s: float
    peak_memory_mb: float
    verdict: bool | None  # None: aborted by the state limit


def _peak_rss_mb() -> float:
    try:
        import resource

        kb = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss
    except (ImportError, ValueError, OSError):
        return 0.0
    return round(kb / 1024.0, 1)  # Linux reports kilobytes


def _sort_key(r: BenchmarkRecord):
    return (r.config.T, r.config.method, r.config.n_threads, r.config.algorithm)


def run_benchmark(
    grid: list[FischerConfig], max_states: int | None = None
) -> list[BenchmarkRecord]:
    records = []
    for cfg in grid:
        model, formula = build_fischer(cfg)
        start = time.perf_counter()
        try:
            report = explore_reachable(model, max_states)
            result = verify(model, formula, cfg.algorithm, max_states)
            record = BenchmarkRecord(
                cfg,
                result.stats.states,
                report.state_count,
                result.stats.transitions,
                time.perf_counter() - start,
                _peak_rss_mb(),
                result.holds,
            )
        except LimitExceeded as stop:
            record = BenchmarkRecord(
                cfg,
                stop.states_seen,
                stop.states_seen,
                0,
                time.perf_counter() - start,
                _peak_rss_mb(),
                None,
            )
        records.append(record)
    return sorted(records, key=_sort_key)


def _verdict_text(v: bool | None) -> str:
    return "limit" if v is None else ("true" if v else "false")


def _row(r: BenchmarkRecord) -> list[str]:
    return [
        r.config.method,
        str(r.config.T),
        str(r.config.n_threads),
        r.config.algorithm,
        str(r.product_states),
        str(r.system_states),
        str(r.transitions),
        repr(round(r.wall_time_s, 6)),
        repr(r.peak_memory_mb),
        _verdict_text(r.verdict),
    ]


def _emit_csv(records: list[BenchmarkRecord]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in sorted(records, key=_sort_key):
        writer.writerow(_row(r))
    return out.getvalue()


def _emit_markdown(records: list[BenchmarkRecord]) -> str:
    cells: dict[tuple[int, int, str], dict[str, BenchmarkRecord]] = {}
    for r in sorted(records, key=_sort_key):
        key = (r.config.T, r.config.n_threads, r.config.algorithm)
        cells.setdefault(key, {})[r.config.method] = r

    header = [
        "T",
        "threads",
        "algorithm",
        "ledm states",
        "ledm product",
        "ledm time_s",
        "ledm verdict",
        "sedm states",
        "sedm product",
        "sedm time_s",
        "sedm verdict",
        "sedm/ledm",
    ]
    lines = [
        "| " + " | ".join(header) + " |",
        "|" + "|".join(" --- " for _ in header) + "|",
    ]
    for (T, n, algo), by_method in cells.items():
        row = [str(T), str(n), algo]
        for method in ("ledm", "sedm"):
            r = by_method.get(method)
            if r is None:
                row += ["", "", "", ""]
            else:
                row += [
                    str(r.system_states),
                    str(r.product_states),
                    f"{r.wall_time_s:.3f}",
                    _verdict_text(r.verdict),
                ]
        both = "ledm" in by_method and "sedm" in by_method
        if both and by_method["ledm"].system_states:
            ratio = by_method["sedm"].system_states / by_method["ledm"].system_states
            row.append(f"{ratio:.2f}")
        else:
            row.append("")
        lines.append("| " + " | ".join(row) + " |")
    return "\n".join(lines) + "\n"


def emit_table(records: list[BenchmarkRecord], format: str = "markdown") -> str:
    if format == "csv":
        return _emit_csv(records)
    if format == "markdown":
        return _emit_markdown(records)
    raise ValueError(f"unknown table format {format!r}")
