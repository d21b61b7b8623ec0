# SPDX-License-Identifier: MIT

import pytest

from py_archive_drift import (
    ArchiveClient,
    ArchiveFetchError,
    ArchiveTransportError,
    ClientConfig,
    FetchKind,
    HopKind,
    HttpBackend,
    SimArchiveServer,
    StopKind,
    StopStage,
    WalkEngine,
    generate_walk_seeds,
)
from py_archive_drift.archive_datetime import archive_datetime
from py_archive_drift.cli import WALKS_FILE, main
from py_archive_drift.config import write_samples
from py_archive_drift.records import load_walks

D1 = archive_datetime(2005, 1, 1)
D2 = archive_datetime(2005, 3, 2)


def _client(server, backend):
    return ArchiveClient(backend, server.base_url, ClientConfig(retry_delay=0))


def _path(walk):
    return [(s.r, s.drift_api, s.drift_ui, s.outcome) for s in walk.steps]


def test_server_lifecycle(sim_archive):
    server = SimArchiveServer(sim_archive)
    with pytest.raises(RuntimeError):
        server.base_url
    server.start()
    try:
        assert server.base_url.startswith("http://127.0.0.1:")
        with pytest.raises(RuntimeError):
            server.start()
    finally:
        server.stop()
    # Stopping twice is harmless
    server.stop()


def test_fetch_timemap(sim_archive, sim_server):
    with HttpBackend(politeness_delay=0) as backend:
        client = _client(sim_server, backend)
        tm = client.fetch_timemap("http://site000.sim/")
    assert tm.original == "http://site000.sim/"
    assert tm.datetimes == list(sim_archive.page("http://site000.sim/").snapshots)
    assert all(m.uri.startswith(sim_server.base_url + "/web/") for m in tm.mementos)


def test_timemap_503_is_retried(sim_server):
    with HttpBackend(politeness_delay=0) as backend:
        client = _client(sim_server, backend)
        tm = client.fetch_timemap("http://flaky.test/")
    assert tm.datetimes == [D1, D2]


def test_unarchived_uri(sim_server):
    with HttpBackend(politeness_delay=0) as backend:
        with pytest.raises(ArchiveFetchError) as e:
            _client(sim_server, backend).fetch_timemap("http://nowhere.test/")
    assert e.value.outcome.kind is FetchKind.HTTP_404
    assert e.value.outcome.status == 404


def test_hard_redirect_over_http(sim_server):
    with HttpBackend(politeness_delay=0) as backend:
        client = _client(sim_server, backend)
        tm = client.fetch_timemap("http://moved.test/")
        chain = client.dereference_sticky("http://moved.test/", D2, tm)
    assert chain.final.datetime == D1
    assert [h.kind for h in chain.hops] == [HopKind.HARD]


def test_dropped_connection(sim_server):
    url = f"{sim_server.base_url}/web/20050101000000/http://broken.test/"
    with HttpBackend(politeness_delay=0) as backend:
        with pytest.raises(ArchiveTransportError) as e:
            backend.get(url)
    assert e.value.url == url


def test_walks_match_in_process_archive(sim_archive, sim_server):
    seeds = generate_walk_seeds(5, 30)
    expected = WalkEngine(
        ArchiveClient(sim_archive, "http://sim.archive", ClientConfig(retry_delay=0)),
        sim_archive.samples(),
    ).run_campaign(seeds)

    # The one-shot 503 of the TimeMap was consumed above
    sim_archive.reset_fault_state()
    with HttpBackend(politeness_delay=0) as backend:
        engine = WalkEngine(_client(sim_server, backend), sim_archive.samples())
        result = engine.run_campaign(seeds)

    assert [_path(w) for w in result.attempted] == [
        _path(w) for w in expected.attempted
    ]


def test_broken_link_stops_walk(sim_archive, sim_server):
    with HttpBackend(politeness_delay=0) as backend:
        samples = [s for s in sim_archive.samples() if s.uri == "http://flaky.test/"]
        walk = WalkEngine(_client(sim_server, backend), samples).run_walk(1)
    assert walk.length == 1
    assert walk.stop.stage is StopStage.MEMENTO
    assert walk.stop.kind is StopKind.DOWNLOAD_FAILED


def test_cli_campaign_over_http(sim_archive, sim_server, tmp_path):
    samples = tmp_path / "samples.txt"
    write_samples(str(samples), sim_archive.samples())
    out = tmp_path / "out"
    argv = ["campaign", "--backend", f"live:{sim_server.base_url}"]
    argv += ["--samples", str(samples), "--walks", "5", "--seed", "3"]
    argv += ["--politeness-delay", "0.001", "--retry-delay", "0"]
    argv += ["--max-steps", "5", "--out", str(out), "-q"]
    assert main(argv) == 0
    walks = load_walks(str(out / WALKS_FILE))
    assert [w.seed for w in walks] == generate_walk_seeds(3, 5)
    assert (out / "report.json").exists()
