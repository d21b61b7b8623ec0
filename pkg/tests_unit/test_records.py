# SPDX-License-Identifier: MIT

import json

import pytest

from py_archive_drift import (
    FaultSpec,
    FixedPage,
    HopKind,
    RecordFileError,
    WalkConfig,
    WalkEngine,
    WalkMode,
)
from py_archive_drift.archive_datetime import archive_datetime
from py_archive_drift.records import (
    SCHEMA_VERSION,
    WalkRecordWriter,
    completed_seeds,
    dump_record_line,
    load_walks,
    read_walk_records,
    walk_from_record,
    walk_to_record,
)
from py_archive_drift.sim import SimFaultKind

_JAN = archive_datetime(2005, 1, 1)
_JUN = archive_datetime(2005, 6, 1)


@pytest.fixture
def walks(make_archive, make_client):
    pages = [
        FixedPage("http://a.sim/", [_JAN], ["http://b.sim/"], sample=True),
        FixedPage("http://b.sim/", [_JAN, _JUN], ["http://c.sim/"]),
        FixedPage(
            "http://c.sim/",
            [_JAN, _JUN],
            snapshot_links={_JAN: ["http://x.sim/"], _JUN: ["http://y.sim/"]},
        ),
        FixedPage("http://x.sim/", [_JAN]),
        FixedPage("http://y.sim/", [_JUN]),
    ]
    # The sliding side is redirected to June on b.sim and diverges from there
    faults = [
        FaultSpec("http://b.sim/", SimFaultKind.SOFT_REDIRECT, _JAN, redirect_offset=1)
    ]
    archive = make_archive(pages, faults)
    engine = WalkEngine(
        make_client(archive), archive.samples(), WalkConfig(mode=WalkMode.RELAXED)
    )
    return [engine.run_walk(seed) for seed in (1, 2, 3)]


def test_record_contents(walks):
    walk = walks[0]
    record = walk_to_record(walk)
    assert record["schema_version"] == SCHEMA_VERSION
    assert record["seed"] == 1
    assert record["mode"] == "relaxed"
    assert record["length"] == walk.length
    assert record["fingerprint"] == walk.fingerprint
    assert record["stop"] == {"kind": "no_common_links", "stage": "memento"}

    step = record["steps"][0]
    assert step["t_sticky"] == "20050101000000"
    assert step["drift_api"] == 0
    assert step["api_chain"]["final"]["uri"] == (
        "http://sim.archive/web/20050101000000/http://a.sim/"
    )


def test_record_round_trip_keeps_hops(walks):
    walk = walks[0]
    step = walk.steps[1]
    assert [h.kind for h in step.ui_chain.hops] == [HopKind.SOFT]

    restored = walk_from_record(json.loads(dump_record_line(walk)))
    assert restored == walk
    assert restored.fingerprint == walk.fingerprint
    assert restored.steps[1].ui_chain.hops == step.ui_chain.hops


def test_dump_record_line_is_canonical(walks):
    line = dump_record_line(walks[0])
    assert "\n" not in line
    assert line == dump_record_line(walks[0])
    assert json.dumps(json.loads(line), sort_keys=True, separators=(",", ":")) == line


def test_writer_and_reader(walks, tmp_path):
    path = tmp_path / "walks.jsonl"
    with WalkRecordWriter(path) as writer:
        writer.write(walks[0])
        writer.write(walks[1])
    with WalkRecordWriter(path, append=True) as writer:
        writer.write(walks[2])

    assert load_walks(path) == walks
    assert completed_seeds(path) == {1, 2, 3}
    assert path.read_text().count("\n") == 3

    # Truncate on reopen without append
    with WalkRecordWriter(path) as writer:
        writer.write(walks[2])
    assert load_walks(path) == [walks[2]]


def test_writer_closed(walks, tmp_path):
    writer = WalkRecordWriter(tmp_path / "walks.jsonl")
    writer.close()
    writer.close()
    with pytest.raises(ValueError):
        writer.write(walks[0])


def test_read_multiple_files(walks, tmp_path):
    a = tmp_path / "a.jsonl"
    b = tmp_path / "b.jsonl"
    a.write_text(dump_record_line(walks[0]) + "\n\n")
    b.write_text(dump_record_line(walks[1]) + "\n")
    assert list(read_walk_records(a, b)) == walks[:2]


def test_completed_seeds_missing_file(tmp_path):
    assert completed_seeds(tmp_path / "nothing.jsonl") == set()


@pytest.mark.parametrize(
    "bad_line",
    [
        "{not json",
        "[1, 2, 3]",
        '{"schema_version": 999, "seed": 1}',
        '{"schema_version": 1, "seed": 1}',
    ],
)
def test_invalid_line(walks, tmp_path, bad_line):
    path = tmp_path / "walks.jsonl"
    path.write_text(dump_record_line(walks[0]) + "\n" + bad_line + "\n")
    with pytest.raises(RecordFileError) as e:
        load_walks(path)
    assert e.value.line_no == 2
    assert str(e.value).startswith("Line 2: ")


def test_invalid_mode():
    record = {
        "schema_version": SCHEMA_VERSION,
        "seed": 1,
        "steps": [],
        "stop": None,
        "mode": "sideways",
        "sample_class": None,
    }
    with pytest.raises(RecordFileError):
        walk_from_record(record)
