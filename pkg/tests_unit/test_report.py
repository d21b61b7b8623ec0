# SPDX-License-Identifier: MIT

import csv
import json
import os

import pytest

from py_archive_drift import (
    Drift,
    DriftBasis,
    StopCause,
    StopKind,
    StopStage,
    Walk,
    WalkStep,
)
from py_archive_drift.report import (
    PLOT_COLUMNS,
    REPORT_FORMAT,
    REPORT_JSON,
    SERIES_COLUMNS,
    STOP_CAUSE_COLUMNS,
    build_report,
    format_summary,
    length_rows,
    plot_rows,
    series_rows,
    stop_cause_rows,
    write_comparison,
    write_report,
)

_DAY = 86400


def _step(index, api_days, ui_days, choice=0):
    return WalkStep(
        index=index,
        r=f"http://p{index}.sim/",
        r_ui=f"http://p{index}.sim/",
        t_sticky=None,
        t_sliding=None,
        drift_api=Drift(api_days * _DAY),
        drift_ui=Drift(ui_days * _DAY),
        drift_ui_walk=Drift(ui_days * _DAY),
        choice=choice,
        domains_so_far=index,
    )


def _stop(index):
    cause = StopCause(StopStage.MEMENTO, StopKind.NO_COMMON_LINKS)
    return WalkStep(index, None, None, None, None, outcome=cause)


@pytest.fixture
def walks():
    a = Walk(
        seed=1,
        steps=(_step(1, 0, 0), _step(2, 3, 9, choice=4), _stop(3)),
        stop=StopCause(StopStage.MEMENTO, StopKind.NO_COMMON_LINKS),
        sample_class="dmoz",
    )
    b = Walk(
        seed=2,
        steps=(_step(1, 0, 0), _step(2, 1, 1, choice=2)),
        stop=None,
        sample_class="bitly",
    )
    # A duplicate of walk a under another seed
    c = Walk(seed=3, steps=a.steps, stop=a.stop, sample_class="dmoz")
    return [a, b, c]


def test_build_report(walks):
    report = build_report(walks, max_steps=2)
    assert report.basis is DriftBasis.WALK_TARGET
    assert report.summary.attempted_walks == 3
    assert report.summary.unique_walks == 2
    assert report.summary.successful_steps == 4
    assert [s.key for s in report.by_step] == [1, 2]
    assert [s.label for s in report.by_choice] == ["2", "3-4"]
    assert list(report.summary_by_class) == ["bitly", "dmoz"]
    assert report.lengths.total == 2
    assert report.stop_causes.completed == 1


def test_series_rows(walks):
    rows = series_rows(build_report(walks).by_step)
    assert list(rows[1]) == SERIES_COLUMNS
    assert rows[1]["group"] == 2
    assert rows[1]["steps"] == 2
    assert rows[1]["sticky_mean_days"] == 2.0
    assert rows[1]["sticky_median_days"] == 1.0
    assert rows[1]["sliding_mean_days"] == 5.0
    assert rows[1]["sliding_median_whole_days"] == 1
    assert rows[1]["sliding_median_seconds"] == _DAY


def test_length_and_stop_cause_rows(walks):
    report = build_report(walks, max_steps=2)
    assert length_rows(report.lengths) == [
        {"length": "1", "walks": 0},
        {"length": "2", "walks": 2},
        {"length": "Total", "walks": 2},
    ]

    rows = stop_cause_rows(report.stop_causes)
    assert list(rows[0]) == STOP_CAUSE_COLUMNS
    assert rows[-1]["cause"] == "Total"
    assert rows[-1]["other_memento"] == 1
    assert rows[-1]["other_memento_pct"] == 100.0
    assert rows[-1]["first_timemap_pct"] == 0.0
    no_links = next(r for r in rows if r["cause"] == "No Common Links")
    assert no_links["other_memento"] == 1


def test_plot_rows(walks):
    rows = plot_rows(build_report(walks))
    assert all(list(r) == PLOT_COLUMNS for r in rows)
    assert {r["series"] for r in rows} == {"step", "choice", "domains", "sample_class"}
    step2_mean = [
        r["value"]
        for r in rows
        if r["series"] == "step"
        and r["group"] == "2"
        and r["policy"] == "sliding"
        and r["statistic"] == "mean_days"
    ]
    assert step2_mean == [5.0]


def test_write_report(walks, tmp_path):
    out = tmp_path / "report"
    written = write_report(
        build_report(walks), str(out), {"seed": 1}, corpus_hash="abc"
    )
    names = sorted(os.path.basename(p) for p in written)
    assert names == sorted(
        [
            "summary.csv",
            "drift_by_step.csv",
            "drift_by_choice.csv",
            "drift_by_domains.csv",
            "drift_by_class.csv",
            "occurrences_by_length.csv",
            "stop_causes.csv",
            "drift_distribution.csv",
            "plot_data.csv",
            REPORT_JSON,
        ]
    )

    with open(out / "drift_by_step.csv", newline="") as f:
        rows = list(csv.reader(f))
    assert rows[0] == SERIES_COLUMNS
    assert len(rows) == 3

    doc = json.loads((out / REPORT_JSON).read_text())
    assert doc["format"] == REPORT_FORMAT
    assert doc["config"] == {"seed": 1}
    assert doc["corpus_hash"] == "abc"
    assert doc["basis"] == "walk"
    assert doc["tables"]["summary"][0]["unique_walks"] == 2
    assert [r["sample_class"] for r in doc["tables"]["summary"]] == [
        "",
        "bitly",
        "dmoz",
    ]


def test_write_report_is_reproducible(walks, tmp_path):
    first = write_report(build_report(walks), str(tmp_path / "a"), {"seed": 1})
    second = write_report(build_report(walks), str(tmp_path / "b"), {"seed": 1})
    for a, b in zip(first, second):
        with open(a, "rb") as fa, open(b, "rb") as fb:
            assert fa.read() == fb.read()


def test_write_report_without_walks(tmp_path):
    write_report(build_report([]), str(tmp_path))
    with open(tmp_path / "drift_by_step.csv", newline="") as f:
        assert list(csv.reader(f)) == [SERIES_COLUMNS]


def test_write_comparison(walks, tmp_path):
    strict = build_report(walks[:1]).summary
    relaxed = build_report(walks).summary
    path = tmp_path / "comparison.csv"
    write_comparison(strict, relaxed, str(path))

    with open(path, newline="") as f:
        rows = list(csv.DictReader(f))
    by_measure = {r["measure"]: r for r in rows}
    assert float(by_measure["Successful steps"]["strict"]) == 2
    assert float(by_measure["Successful steps"]["relaxed"]) == 4
    assert float(by_measure["Successful steps"]["change_pct"]) == 100.0


def test_format_summary(walks):
    text = format_summary(build_report(walks).summary)
    assert "Walks attempted:        3" in text
    assert "Unique walks:           2" in text
    assert "Sliding drift (days):" in text
    assert "Sticky" not in format_summary(build_report([]).summary)
