# SPDX-License-Identifier: MIT

import pytest

from py_archive_drift import (
    FaultSpec,
    FixedPage,
    SimArchive,
    SimArchiveServer,
    SimConfig,
)
from py_archive_drift.archive_datetime import archive_datetime
from py_archive_drift.sim import SimFaultKind

D1 = archive_datetime(2005, 1, 1)
D2 = archive_datetime(2005, 3, 2)


@pytest.fixture(scope="module")
def sim_archive():
    cfg = SimConfig(
        seed=11,
        n_sites=6,
        sample_classes=["dmoz", "bitly"],
        fixed_pages=[
            FixedPage(
                "http://flaky.test/", [D1, D2], ["http://broken.test/"], sample=True
            ),
            FixedPage("http://broken.test/", [D1, D2]),
            FixedPage("http://moved.test/", [D1, D2], sample=True),
        ],
        faults=[
            FaultSpec("http://flaky.test/", SimFaultKind.HTTP_503),
            FaultSpec("http://broken.test/", SimFaultKind.DOWNLOAD_FAILED, D1),
            FaultSpec("http://broken.test/", SimFaultKind.DOWNLOAD_FAILED, D2),
            FaultSpec("http://moved.test/", SimFaultKind.REDIRECT, D2),
        ],
    )
    return SimArchive.generate(cfg)


@pytest.fixture
def sim_server(sim_archive):
    sim_archive.reset_fault_state()
    # Port 0: let the OS pick a free port, avoid clashes between runs
    with SimArchiveServer(sim_archive) as server:
        yield server
