# SPDX-License-Identifier: MIT

import pytest

from py_archive_drift import ArchiveClient, ClientConfig, SimArchive, SimConfig

SIM_BASE = "http://sim.archive"


@pytest.fixture
def make_archive():
    # Simulated archive made of explicitly given pages only
    def make(pages, faults=(), **kwargs):
        cfg = SimConfig(
            n_sites=0, fixed_pages=list(pages), faults=list(faults), **kwargs
        )
        return SimArchive.generate(cfg)

    return make


@pytest.fixture
def make_client():
    def make(backend, **kwargs):
        kwargs.setdefault("retry_delay", 0)
        return ArchiveClient(backend, SIM_BASE, ClientConfig(**kwargs))

    return make
