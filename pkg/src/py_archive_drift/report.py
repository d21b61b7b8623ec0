# SPDX-License-Identifier: MIT

"""
Report bundle of a campaign: one CSV file per table, a JSON document with
all the tables and a long-format CSV for plotting.

Everything in the bundle is derived from the walk records (plus the echoed
run configuration), so re-aggregating the same records produces byte-identical
files. No timestamps are written.
"""

import json
import logging
import os
from dataclasses import dataclass
from typing import Any, Dict, List, Mapping, Optional, Sequence

import pandas as pd

from .stats import (
    CampaignSummary,
    DriftSeries,
    DistributionRow,
    LengthTable,
    PolicyStats,
    StopCauseTable,
    compare_summaries,
    drift_by_choice,
    drift_by_class,
    drift_by_domains,
    drift_by_step,
    drift_distribution,
    occurrences_by_length,
    stop_causes,
    summarize,
    summarize_by_class,
)
from .types import SECONDS_PER_DAY, DriftBasis, Walk
from .walk import deduplicate_walks

logger = logging.getLogger(__name__)

REPORT_FORMAT = "py-archive-drift-report"
REPORT_VERSION = 1

REPORT_JSON = "report.json"
PLOT_CSV = "plot_data.csv"

# Lower bounds of the choice buckets of the drift-by-choice table
DEFAULT_CHOICE_BUCKETS = (1, 2, 3, 5, 10, 20, 50, 100)

_POLICY_COLUMNS = [
    "count",
    "mean_days",
    "median_days",
    "std_days",
    "median_whole_days",
    "mean_seconds",
    "median_seconds",
    "std_seconds",
]

SERIES_COLUMNS = (
    ["group", "label", "steps"]
    + [f"sticky_{c}" for c in _POLICY_COLUMNS if c != "count"]
    + [f"sliding_{c}" for c in _POLICY_COLUMNS if c != "count"]
)

SUMMARY_COLUMNS = [
    "sample_class",
    "attempted_walks",
    "unique_walks",
    "successful_walks",
    "pct_successful",
    "steps",
    "successful_steps",
    "steps_over_1yr",
    "steps_over_5yr",
    "mean_successful_steps",
    "sticky_median_days",
    "sliding_median_days",
]

LENGTH_COLUMNS = ["length", "walks"]

STOP_CAUSE_COLUMNS = [
    "cause",
    "first_timemap",
    "first_timemap_pct",
    "first_memento",
    "first_memento_pct",
    "other_timemap",
    "other_timemap_pct",
    "other_memento",
    "other_memento_pct",
]

DISTRIBUTION_COLUMNS = ["step", "policy", "drift_days", "steps"]

COMPARISON_COLUMNS = ["measure", "strict", "relaxed", "change_pct"]

PLOT_COLUMNS = ["series", "group", "policy", "statistic", "value"]


@dataclass(frozen=True)
class CampaignReport:
    """
    All the tables of one campaign.
    """

    basis: DriftBasis
    summary: CampaignSummary
    summary_by_class: Dict[str, CampaignSummary]
    by_step: List[DriftSeries]
    by_choice: List[DriftSeries]
    by_domains: List[DriftSeries]
    by_class: List[DriftSeries]
    lengths: LengthTable
    stop_causes: StopCauseTable
    distribution: List[DistributionRow]


def build_report(
    walks: Sequence[Walk],
    basis: DriftBasis = DriftBasis.WALK_TARGET,
    choice_buckets: Sequence[int] = DEFAULT_CHOICE_BUCKETS,
    registered_domains: bool = False,
    max_steps: int = 50,
) -> CampaignReport:
    """
    Aggregate the attempted walks of a campaign. Duplicate walks are removed
    first; every table is computed over the unique walks.
    """
    unique = deduplicate_walks(walks)
    return CampaignReport(
        basis=basis,
        summary=summarize(unique, attempted=len(walks), basis=basis),
        summary_by_class=summarize_by_class(unique, basis),
        by_step=drift_by_step(unique, basis),
        by_choice=drift_by_choice(unique, basis, choice_buckets),
        by_domains=drift_by_domains(unique, basis, registered_domains),
        by_class=drift_by_class(unique, basis),
        lengths=occurrences_by_length(unique, max_steps),
        stop_causes=stop_causes(unique),
        distribution=drift_distribution(unique, basis),
    )


def _days(seconds: float) -> float:
    return round(seconds / SECONDS_PER_DAY, 2)


def _policy_values(p: PolicyStats) -> Dict[str, Any]:
    return {
        "count": p.count,
        "mean_days": round(p.mean_days, 2),
        "median_days": round(p.median_days, 2),
        "std_days": round(p.std_days, 2),
        "median_whole_days": p.median_seconds // SECONDS_PER_DAY,
        "mean_seconds": round(p.mean_seconds, 3),
        "median_seconds": p.median_seconds,
        "std_seconds": round(p.std_seconds, 3),
    }


def series_rows(series: Sequence[DriftSeries]) -> List[Dict[str, Any]]:
    rows = []
    for s in series:
        row: Dict[str, Any] = {"group": s.key, "label": s.label, "steps": s.count}
        for policy, stats in (("sticky", s.sticky), ("sliding", s.sliding)):
            for name, value in _policy_values(stats).items():
                if name != "count":
                    row[f"{policy}_{name}"] = value
        rows.append(row)
    return rows


def summary_row(summary: CampaignSummary, sample_class: str = "") -> Dict[str, Any]:
    return {
        "sample_class": sample_class,
        "attempted_walks": summary.attempted_walks,
        "unique_walks": summary.unique_walks,
        "successful_walks": summary.successful_walks,
        "pct_successful": round(summary.pct_successful, 2),
        "steps": summary.steps,
        "successful_steps": summary.successful_steps,
        "steps_over_1yr": summary.steps_over_1yr,
        "steps_over_5yr": summary.steps_over_5yr,
        "mean_successful_steps": round(summary.mean_successful_steps, 2),
        "sticky_median_days": (
            _days(summary.sticky.median_seconds) if summary.sticky else 0.0
        ),
        "sliding_median_days": (
            _days(summary.sliding.median_seconds) if summary.sliding else 0.0
        ),
    }


def length_rows(table: LengthTable) -> List[Dict[str, Any]]:
    rows: List[Dict[str, Any]] = [
        {"length": r.label, "walks": r.count} for r in table.rows
    ]
    rows.append({"length": "Total", "walks": table.total})
    return rows


def stop_cause_rows(table: StopCauseTable) -> List[Dict[str, Any]]:
    rows: List[Dict[str, Any]] = []
    totals = {c: 0 for c in STOP_CAUSE_COLUMNS[1::2]}
    for r in table.rows:
        row: Dict[str, Any] = {"cause": r.kind.label}
        for name in totals:
            cell = getattr(r, name)
            row[name] = cell.count
            row[f"{name}_pct"] = round(cell.percent, 2)
            totals[name] += cell.count
        rows.append(row)

    total_row: Dict[str, Any] = {"cause": "Total"}
    for name, n in totals.items():
        total_row[name] = n
        whole = table.first_total if name.startswith("first") else table.other_total
        total_row[f"{name}_pct"] = round(100.0 * n / whole, 2) if whole else 0.0
    rows.append(total_row)
    return rows


def distribution_rows(rows: Sequence[DistributionRow]) -> List[Dict[str, Any]]:
    return [
        {
            "step": r.step,
            "policy": r.policy,
            "drift_days": r.bin_label,
            "steps": r.count,
        }
        for r in rows
    ]


def comparison_rows(
    strict: CampaignSummary, relaxed: CampaignSummary
) -> List[Dict[str, Any]]:
    """
    Rows of the strict vs. relaxed comparison table.
    """
    rows = []
    for r in compare_summaries(strict, relaxed):
        change = r.change_pct
        rows.append(
            {
                "measure": r.label,
                "strict": round(r.strict, 2),
                "relaxed": round(r.relaxed, 2),
                "change_pct": round(change, 2) if change is not None else None,
            }
        )
    return rows


def plot_rows(report: CampaignReport) -> List[Dict[str, Any]]:
    """
    Long-format data behind the drift plots: one row per series, group,
    policy and statistic.
    """
    rows = []
    for name, series in (
        ("step", report.by_step),
        ("choice", report.by_choice),
        ("domains", report.by_domains),
        ("sample_class", report.by_class),
    ):
        for s in series:
            for policy, stats in (("sticky", s.sticky), ("sliding", s.sliding)):
                values = _policy_values(stats)
                for statistic in ("count", "mean_days", "median_days", "std_days"):
                    rows.append(
                        {
                            "series": name,
                            "group": s.label,
                            "policy": policy,
                            "statistic": statistic,
                            "value": values[statistic],
                        }
                    )
    return rows


def report_tables(report: CampaignReport) -> Dict[str, List[Dict[str, Any]]]:
    """
    The tables of a report as lists of rows, keyed by table name.
    """
    summaries = [summary_row(report.summary)]
    summaries += [summary_row(s, c) for c, s in report.summary_by_class.items()]
    return {
        "summary": summaries,
        "drift_by_step": series_rows(report.by_step),
        "drift_by_choice": series_rows(report.by_choice),
        "drift_by_domains": series_rows(report.by_domains),
        "drift_by_class": series_rows(report.by_class),
        "occurrences_by_length": length_rows(report.lengths),
        "stop_causes": stop_cause_rows(report.stop_causes),
        "drift_distribution": distribution_rows(report.distribution),
    }


TABLE_COLUMNS: Dict[str, List[str]] = {
    "summary": SUMMARY_COLUMNS,
    "drift_by_step": SERIES_COLUMNS,
    "drift_by_choice": SERIES_COLUMNS,
    "drift_by_domains": SERIES_COLUMNS,
    "drift_by_class": SERIES_COLUMNS,
    "occurrences_by_length": LENGTH_COLUMNS,
    "stop_causes": STOP_CAUSE_COLUMNS,
    "drift_distribution": DISTRIBUTION_COLUMNS,
    "comparison": COMPARISON_COLUMNS,
}


def write_csv(path: str, rows: Sequence[Mapping[str, Any]], columns: List[str]) -> None:
    frame = pd.DataFrame(list(rows), columns=columns)
    frame.to_csv(path, index=False, lineterminator="\n")


def report_document(
    report: CampaignReport,
    config: Optional[Mapping[str, Any]] = None,
    corpus_hash: Optional[str] = None,
) -> Dict[str, Any]:
    return {
        "basis": report.basis.value,
        "config": dict(config) if config is not None else {},
        "corpus_hash": corpus_hash,
        "format": REPORT_FORMAT,
        "tables": report_tables(report),
        "version": REPORT_VERSION,
    }


def write_report(
    report: CampaignReport,
    out_dir: str,
    config: Optional[Mapping[str, Any]] = None,
    corpus_hash: Optional[str] = None,
) -> List[str]:
    """
    Write the report bundle into ``out_dir`` (created if missing).
    Returns the paths of the written files.
    """
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for name, rows in report_tables(report).items():
        path = os.path.join(out_dir, f"{name}.csv")
        write_csv(path, rows, TABLE_COLUMNS[name])
        written.append(path)

    path = os.path.join(out_dir, PLOT_CSV)
    write_csv(path, plot_rows(report), PLOT_COLUMNS)
    written.append(path)

    path = os.path.join(out_dir, REPORT_JSON)
    doc = report_document(report, config, corpus_hash)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    written.append(path)

    logger.info(f"Report written to {out_dir} ({len(written)} files)")
    return written


def write_comparison(
    strict: CampaignSummary, relaxed: CampaignSummary, path: str
) -> None:
    write_csv(path, comparison_rows(strict, relaxed), COMPARISON_COLUMNS)


def format_summary(summary: CampaignSummary) -> str:
    """
    Human-readable summary of a campaign, as printed by the command line.
    """
    lines = [
        f"Walks attempted:        {summary.attempted_walks}",
        f"Unique walks:           {summary.unique_walks}",
        f"Successful walks:       {summary.successful_walks} "
        f"({summary.pct_successful:.2f}%)",
        f"Steps:                  {summary.steps}",
        f"Successful steps:       {summary.successful_steps}",
        f"Steps with drift > 1yr: {summary.steps_over_1yr}",
        f"Steps with drift > 5yr: {summary.steps_over_5yr}",
        f"Mean successful steps:  {summary.mean_successful_steps:.2f}",
    ]
    for label, stats in (("Sticky", summary.sticky), ("Sliding", summary.sliding)):
        if stats is not None:
            lines.append(
                f"{label} drift (days):   mean {stats.mean_days:.2f}, "
                f"median {stats.median_days:.2f}, sd {stats.std_days:.2f}"
            )
    return "\n".join(lines)
