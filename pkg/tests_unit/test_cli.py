# SPDX-License-Identifier: MIT

import json

import pytest

from py_archive_drift import SimArchive, SimConfig
from py_archive_drift.cli import (
    CAMPAIGN_FILE,
    EXIT_CONFIG_ERROR,
    EXIT_IO_ERROR,
    EXIT_OK,
    WALKS_FILE,
    main,
)
from py_archive_drift.report import PLOT_CSV, REPORT_JSON, TABLE_COLUMNS

REPORT_FILES = [f"{name}.csv" for name in TABLE_COLUMNS if name != "comparison"]
REPORT_FILES += [PLOT_CSV, REPORT_JSON]


@pytest.fixture
def corpus(tmp_path):
    path = tmp_path / "corpus.json"
    cfg = SimConfig(seed=3, n_sites=5, sample_classes=["dmoz", "bitly"])
    SimArchive.generate(cfg).save(str(path))
    return path


def _campaign(corpus, out, *extra):
    argv = ["campaign", "--backend", f"sim:{corpus}", "--walks", "12"]
    argv += ["--seed", "9", "--max-steps", "10", "--out", str(out), "-q"]
    return main(argv + list(extra))


def test_replay_example(capsys):
    assert main(["replay-example", "--seed", "4"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "Seed: 4" in out
    assert "44 days" in out
    assert "33 days" in out
    assert "11 days" in out


def test_simgen_deterministic(tmp_path, capsys):
    for name in ("a.json", "b.json"):
        argv = ["simgen", "--seed", "7", "--out", str(tmp_path / name), "-q"]
        argv += ["--export-samples", str(tmp_path / f"{name}.samples")]
        assert main(argv) == EXIT_OK

    lines = capsys.readouterr().out.splitlines()
    hashes = [line for line in lines if line.startswith("Corpus hash: ")]
    assert len(hashes) == 2
    assert hashes[0] == hashes[1]
    assert "Seed: 7" in lines

    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    samples = (tmp_path / "a.json.samples").read_text().splitlines()
    assert len(samples) == 40
    assert samples[0] == "http://site000.sim/\tdmoz"


def test_simgen_config_file(tmp_path, capsys):
    cfg_path = tmp_path / "sim.json"
    cfg_path.write_text(json.dumps(SimConfig(seed=2, n_sites=3).to_json()))
    assert main(["simgen", str(cfg_path), "--out", str(tmp_path / "c.json")]) == 0
    assert "Seed: 2" in capsys.readouterr().out
    assert len(SimArchive.load(str(tmp_path / "c.json")).samples()) == 3


def test_campaign_and_report(tmp_path, corpus, capsys):
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    assert _campaign(corpus, out_a) == EXIT_OK
    assert _campaign(corpus, out_b, "--parallelism", "3") == EXIT_OK
    assert "Walks attempted:        12" in capsys.readouterr().out

    for name in REPORT_FILES + [WALKS_FILE, CAMPAIGN_FILE]:
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes(), name

    meta = json.loads((out_a / CAMPAIGN_FILE).read_text())
    assert meta["config"]["seed"] == 9
    assert meta["corpus_hash"] == SimArchive.load(str(corpus)).corpus_hash

    # Regenerating the report from the records gives the same bundle
    out_c = tmp_path / "c"
    argv = ["report", str(out_a / WALKS_FILE), "--out", str(out_c), "-q"]
    assert main(argv) == EXIT_OK
    assert "Seed: 9" in capsys.readouterr().out
    for name in REPORT_FILES:
        assert (out_a / name).read_bytes() == (out_c / name).read_bytes(), name


def test_campaign_resume(tmp_path, corpus):
    out = tmp_path / "out"
    assert _campaign(corpus, out) == EXIT_OK
    first = (out / WALKS_FILE).read_bytes()

    assert _campaign(corpus, out) == EXIT_OK
    assert (out / WALKS_FILE).read_bytes() == first
    assert len(first.splitlines()) == 12

    # Same output directory, different campaign
    assert _campaign(corpus, out, "--mode", "relaxed") == EXIT_CONFIG_ERROR


def test_compare(tmp_path, corpus, capsys):
    assert _campaign(corpus, tmp_path / "strict") == EXIT_OK
    assert _campaign(corpus, tmp_path / "relaxed", "--mode", "relaxed") == EXIT_OK

    out = tmp_path / "comparison.csv"
    argv = ["compare", str(tmp_path / "strict" / WALKS_FILE)]
    argv += [str(tmp_path / "relaxed" / WALKS_FILE), "--out", str(out), "-q"]
    assert main(argv) == EXIT_OK
    assert "Comparison written to" in capsys.readouterr().out
    lines = out.read_text().splitlines()
    assert lines[0] == "measure,strict,relaxed,change_pct"
    assert len(lines) > 1


def test_campaign_invalid_backend(tmp_path, capsys):
    argv = ["campaign", "--backend", "ftp:corpus.json", "--seed", "1"]
    assert main(argv + ["--out", str(tmp_path)]) == EXIT_CONFIG_ERROR
    assert "Error: Backend must be" in capsys.readouterr().err


def test_campaign_missing_corpus(tmp_path, capsys):
    argv = ["campaign", "--backend", f"sim:{tmp_path / 'missing.json'}"]
    assert main(argv + ["--seed", "1", "--out", str(tmp_path)]) == EXIT_IO_ERROR
    assert capsys.readouterr().err.startswith("Error: ")


def test_report_corrupt_records(tmp_path):
    records = tmp_path / "walks.jsonl"
    records.write_text("{not json\n")
    argv = ["report", str(records), "--out", str(tmp_path / "out"), "-q"]
    assert main(argv) == EXIT_IO_ERROR


def test_live_backend_needs_samples(tmp_path):
    argv = ["campaign", "--backend", "live:http://web.archive.org", "--seed", "1"]
    assert main(argv + ["--out", str(tmp_path)]) == EXIT_CONFIG_ERROR
