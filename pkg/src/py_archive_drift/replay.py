# SPDX-License-Identifier: MIT

"""
Replay of a scripted browsing session under both target policies.

The bundled fixture is a three-click session over two archived home pages:
the Computer Science home page is opened at 2005-05-14T01:36:08Z, then
the College of Sciences page is clicked, then the link back to
Computer Science. Following the archive's user interface, the second visit
of the CS page lands 44 days before the datetime originally asked for;
the Memento API returns the same version again.
"""

import logging
from dataclasses import dataclass
from datetime import datetime
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .archive_datetime import archive_datetime
from .client import ArchiveClient, ClientConfig
from .links import extract_links
from .memento import build_wayback_uri, compute_drift
from .sim import FixedPage, SimArchive, SimConfig
from .types import DereferenceChain, Drift, OriginalUri

logger = logging.getLogger(__name__)

EXAMPLE_ARCHIVE_BASE = "http://web.archive.org"

CS_HOME = "http://www.cs.example.edu/"
SCI_HOME = "http://sci.example.edu/"

CS_SNAPSHOTS = (
    archive_datetime(2005, 3, 31, 0, 56, 12),
    archive_datetime(2005, 5, 14, 1, 36, 8),
)
SCI_SNAPSHOTS = (archive_datetime(2005, 4, 22, 0, 17, 52),)

# The datetime the session starts at
EXAMPLE_START = archive_datetime(2005, 5, 14, 1, 36, 8)

EXAMPLE_CLICKS = (("CS Home", CS_HOME), ("Sci Home", SCI_HOME), ("CS Home", CS_HOME))


@dataclass(frozen=True)
class ReplayRow:
    """
    One page of the replayed session as reached by both policies.
    """

    label: str
    r: OriginalUri
    ui_chain: DereferenceChain
    api_chain: DereferenceChain

    ui_drift: Optional[Drift]
    """
    Drift of the Sliding Target memento against the session's start datetime;
    ``None`` for the page the session starts at.
    """

    api_drift: Optional[Drift]


@dataclass(frozen=True)
class ReplayResult:
    start: datetime
    rows: List[ReplayRow]

    @property
    def ui_mean_days(self) -> float:
        """
        Mean Sliding Target drift, in whole days per page.
        """
        return _mean_days([r.ui_drift for r in self.rows])

    @property
    def api_mean_days(self) -> float:
        return _mean_days([r.api_drift for r in self.rows])


def _mean_days(drifts: Sequence[Optional[Drift]]) -> float:
    days = [d.whole_days for d in drifts if d is not None]
    return float(np.mean(days)) if days else 0.0


def example_sim_config(
    cs_snapshots: Sequence[datetime] = CS_SNAPSHOTS,
    sci_snapshots: Sequence[datetime] = SCI_SNAPSHOTS,
) -> SimConfig:
    """
    Simulated archive holding only the two pages of the worked example,
    linking to each other.
    """
    return SimConfig(
        n_sites=0,
        fixed_pages=[
            FixedPage(
                uri=CS_HOME,
                snapshots=list(cs_snapshots),
                links=[SCI_HOME],
                sample=True,
            ),
            FixedPage(uri=SCI_HOME, snapshots=list(sci_snapshots), links=[CS_HOME]),
        ],
    )


def replay_session(
    client: ArchiveClient,
    clicks: Sequence[Tuple[str, OriginalUri]],
    start: datetime,
) -> ReplayResult:
    """
    Replay a session that opens the first page at ``start`` and then clicks
    the links to the following pages one by one.

    The Sticky Target policy asks for ``start`` at every page; the Sliding
    Target policy asks for the datetime of the memento it displayed last.
    Both drifts are measured against ``start``.

    Raises :py:exc:`ValueError` if a clicked page is not linked from
    the previous page, :py:exc:`ArchiveFetchError` if a download fails.
    """
    if not clicks:
        raise ValueError("At least one page is required")

    rows: List[ReplayRow] = []
    for label, r in clicks:
        if rows:
            _check_linked(rows[-1].ui_chain, r, client.archive_base)
            _check_linked(rows[-1].api_chain, r, client.archive_base)
            target = rows[-1].ui_chain.final.datetime
        else:
            target = start

        ui_chain = client.dereference_sliding(
            build_wayback_uri(client.archive_base, target, r)
        )
        api_chain = client.dereference_sticky(r, start, client.fetch_timemap(r))
        first = not rows
        ui_final = ui_chain.final.datetime
        api_final = api_chain.final.datetime
        rows.append(
            ReplayRow(
                label=label,
                r=r,
                ui_chain=ui_chain,
                api_chain=api_chain,
                ui_drift=None if first else compute_drift(start, ui_final),
                api_drift=None if first else compute_drift(start, api_final),
            )
        )
        logger.debug(f"{label}: UI {ui_chain.final.uri}, API {api_chain.final.uri}")
    return ReplayResult(start=start, rows=rows)


def _check_linked(
    chain: DereferenceChain, r: OriginalUri, archive_base: str
) -> None:
    links = extract_links(chain.body, chain.final.uri, archive_base=archive_base)
    if r not in links:
        raise ValueError(f"{r} is not linked from {chain.final.uri}")


def replay_example(
    archive: Optional[SimArchive] = None, start: datetime = EXAMPLE_START
) -> ReplayResult:
    """
    Replay the bundled worked example (CS -> Sci -> CS), by default over
    :py:func:`example_sim_config`.
    """
    if archive is None:
        archive = SimArchive.generate(example_sim_config())
    client = ArchiveClient(archive, EXAMPLE_ARCHIVE_BASE, ClientConfig(retry_delay=0))
    return replay_session(client, EXAMPLE_CLICKS, start)


def _format_days(d: Optional[Drift]) -> str:
    return "--" if d is None else f"{d.whole_days} days"


def format_replay(result: ReplayResult) -> str:
    """
    Render a replayed session as a text table: per page the datetime and
    drift under the Wayback user interface and under the Memento API.
    """
    header = (
        f"{'Page':<10}{'Wayback UI':<14}{'Drift':>9}   "
        f"{'Memento API':<14}{'Drift':>9}"
    )
    lines = [header, "-" * len(header)]
    for row in result.rows:
        lines.append(
            f"{row.label:<10}"
            f"{row.ui_chain.final.datetime.date().isoformat():<14}"
            f"{_format_days(row.ui_drift):>9}   "
            f"{row.api_chain.final.datetime.date().isoformat():<14}"
            f"{_format_days(row.api_drift):>9}"
        )
    lines.append("-" * len(header))
    ui_mean = f"{result.ui_mean_days:g} days"
    api_mean = f"{result.api_mean_days:g} days"
    lines.append(f"{'Mean':<10}{'':<14}{ui_mean:>9}   {'':<14}{api_mean:>9}")
    return "\n".join(lines)
