# SPDX-License-Identifier: MIT

"""
Seeded acyclic walks performed under both target policies in lockstep,
and campaigns of many such walks.
"""

import logging
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from datetime import datetime
from typing import Callable, Iterable, List, Optional, Sequence, Set

from .backend import walk_scope
from .client import ArchiveClient
from .errors import ArchiveFetchError, RelaxedPairExhaustedError
from .links import common_usable, extract_links, relaxed_pair, sorted_links
from .memento import build_wayback_uri, compute_drift
from .types import (
    DereferenceChain,
    MementoUri,
    OriginalUri,
    Sample,
    StopCause,
    StopKind,
    StopStage,
    Walk,
    WalkMode,
    WalkStep,
)
from .uri import uri_host

logger = logging.getLogger(__name__)

# Walk seeds are unsigned 64-bit values
SEED_BITS = 64


@dataclass(frozen=True)
class WalkConfig:
    """
    Settings of :py:class:`WalkEngine`.
    """

    mode: WalkMode = WalkMode.STRICT

    max_steps: int = 50
    """
    A walk completes after this many successful steps.
    """

    strip_chrome: bool = False
    """
    Remove the archive's navigation toolbar before extracting links.
    """

    parallelism: int = 1
    """
    Number of walks of a campaign that run concurrently.
    """

    def __post_init__(self) -> None:
        if self.max_steps < 1:
            raise ValueError("Maximum number of steps must be at least 1")
        if self.parallelism < 1:
            raise ValueError("Parallelism must be at least 1")


@dataclass
class WalkProgress:
    """
    State of a walk in progress.
    """

    steps: List[WalkStep] = field(default_factory=list)

    sample: Optional[Sample] = None
    """
    The sample the walk started from.
    """

    visited: Set[OriginalUri] = field(default_factory=set)
    """
    URI-Rs visited by either policy -- never selected again.
    """

    hosts: Set[str] = field(default_factory=set)

    @property
    def t1(self) -> Optional[datetime]:
        """
        Initial target datetime, once the first step has selected it.
        """
        return self.steps[0].t_sticky if self.steps else None

    @property
    def last(self) -> Optional[WalkStep]:
        return self.steps[-1] if self.steps else None

    @property
    def stopped(self) -> bool:
        return self.last is not None and not self.last.succeeded

    @property
    def successful_steps(self) -> int:
        return sum(1 for s in self.steps if s.succeeded)


@dataclass(frozen=True)
class CampaignResult:
    """
    Walks of one campaign.
    """

    attempted: List[Walk]
    """
    All walks, in the order of their seeds.
    """

    unique: List[Walk]
    """
    Walks left after removing duplicates; the first occurrence is kept.
    """

    @property
    def successful(self) -> List[Walk]:
        """
        Unique walks with at least one successful step.
        """
        return [w for w in self.unique if w.length > 0]


def generate_walk_seeds(master_seed: int, n: int) -> List[int]:
    """
    Derive ``n`` distinct 64-bit walk seeds from one master seed.
    """
    if n < 0:
        raise ValueError("Number of seeds must not be negative")
    rng = random.Random(master_seed)
    seeds: List[int] = []
    seen: Set[int] = set()
    while len(seeds) < n:
        s = rng.getrandbits(SEED_BITS)
        if s not in seen:
            seen.add(s)
            seeds.append(s)
    return seeds


def deduplicate_walks(walks: Iterable[Walk]) -> List[Walk]:
    """
    Remove walks whose path duplicates an earlier walk's path.
    """
    seen: Set[str] = set()
    unique = []
    for w in walks:
        fp = w.fingerprint
        if fp not in seen:
            seen.add(fp)
            unique.append(w)
    return unique


class WalkEngine:
    """
    Performs acyclic walks through an archive, following the same links
    under the Sticky Target policy (Memento API) and the Sliding Target policy
    (Wayback Machine user interface) at the same time.

    Every random choice of a walk is made by a generator seeded with the walk's
    seed, so a walk is fully determined by its seed, the samples and
    the content of the archive.

    .. code-block:: python

        engine = WalkEngine(client, samples, WalkConfig(max_steps=50))
        walk = engine.run_walk(seed=1234)
        for step in walk.steps:
            print(step.index, step.r, step.drift_api, step.drift_ui_walk)

    """

    def __init__(
        self,
        client: ArchiveClient,
        samples: Sequence[Sample],
        config: Optional[WalkConfig] = None,
    ) -> None:
        if len(samples) == 0:
            raise ValueError("At least one sample URI-R is required")
        self._client = client
        self._samples = list(samples)
        self._config = config if config is not None else WalkConfig()

    @property
    def config(self) -> WalkConfig:
        return self._config

    def first_step(self, progress: WalkProgress, rng: random.Random) -> WalkStep:
        """
        Perform the first step of a walk: select a sample URI-R, select one
        of its mementos at random and use its datetime as the target datetime
        of both policies.

        The step is appended to ``progress``. A failure is recorded as the
        step's outcome, never raised.
        """
        if progress.steps:
            raise ValueError("The walk has already started")

        sample = self._samples[rng.randrange(len(self._samples))]
        progress.sample = sample
        r = sample.uri
        step = WalkStep(index=1, r=r, r_ui=r, t_sticky=None, t_sliding=None)

        try:
            tm = self._client.fetch_timemap(r)
        except ArchiveFetchError as e:
            return self._record(progress, self._failed(step, StopStage.TIMEMAP, e))

        t1 = tm.mementos[rng.randrange(len(tm))].datetime
        step = WalkStep(index=1, r=r, r_ui=r, t_sticky=t1, t_sliding=t1)
        m = build_wayback_uri(self._client.archive_base, t1, r)
        sticky = self._client.dereference_sticky
        step = self._dereference_both(step, lambda: sticky(r, t1, tm), m)
        return self._record(progress, step)

    def next_step(self, progress: WalkProgress, rng: random.Random) -> WalkStep:
        """
        Perform the next step of a walk: select a URI-R linked from both
        policies' previous mementos and not visited yet, dereference it with
        the initial target datetime (sticky) and with the datetime of the
        previous Sliding Target memento (sliding).

        The step is appended to ``progress``. A failure is recorded as the
        step's outcome, never raised.
        """
        prev = progress.last
        t1 = progress.t1
        if prev is None or not prev.succeeded or t1 is None:
            raise ValueError("The previous step must have succeeded")
        assert prev.api_chain is not None and prev.ui_chain is not None

        index = prev.index + 1
        t_i = prev.ui_chain.final.datetime
        strip = self._config.strip_chrome
        base = self._client.archive_base
        la = extract_links(prev.api_chain.body, prev.api_chain.final.uri, strip, base)
        lw = extract_links(prev.ui_chain.body, prev.ui_chain.final.uri, strip, base)
        lp = frozenset(progress.visited)

        lu = sorted_links(common_usable(la, lw, lp))
        relaxed = False
        if lu:
            r = r_ui = lu[rng.randrange(len(lu))]
            choice = len(lu)
        elif self._config.mode is WalkMode.RELAXED:
            try:
                r, r_ui = relaxed_pair(la, lw, lp, rng)
            except RelaxedPairExhaustedError:
                return self._record(progress, self._no_common_links(index, t1, t_i))
            choice = max(len(la - lp), len(lw - lp))
            relaxed = True
        else:
            return self._record(progress, self._no_common_links(index, t1, t_i))

        step = WalkStep(
            index=index,
            r=r,
            r_ui=r_ui,
            t_sticky=t1,
            t_sliding=t_i,
            choice=choice,
            relaxed=relaxed,
        )

        try:
            tm = self._client.fetch_timemap(r)
        except ArchiveFetchError as e:
            return self._record(progress, self._failed(step, StopStage.TIMEMAP, e))

        m = build_wayback_uri(self._client.archive_base, t_i, r_ui)
        sticky = self._client.dereference_sticky
        step = self._dereference_both(step, lambda: sticky(r, t1, tm), m)
        return self._record(progress, step)

    def run_walk(self, seed: int) -> Walk:
        """
        Perform one complete walk. It stops when no common unvisited link
        is left, when a download fails or after ``max_steps`` successful steps.

        The walk runs in its own
        :py:func:`~py_archive_drift.backend.walk_scope`, so its responses do
        not depend on the walks performed before it or in parallel.
        """
        rng = random.Random(seed)
        progress = WalkProgress()

        max_steps = self._config.max_steps
        with walk_scope():
            self.first_step(progress, rng)
            while not progress.stopped and progress.successful_steps < max_steps:
                self.next_step(progress, rng)

        last = progress.last
        assert last is not None
        walk = Walk(
            seed=seed,
            steps=tuple(progress.steps),
            stop=last.outcome,
            mode=self._config.mode,
            sample_class=progress.sample.sample_class if progress.sample else None,
        )
        if walk.stop is None:
            logger.debug(f"Walk {seed}: completed {walk.length} steps")
        else:
            logger.debug(
                f"Walk {seed}: length {walk.length}, stopped by "
                f"{walk.stop.kind.label} ({walk.stop.stage.value})"
            )
        return walk

    def run_campaign(
        self,
        seeds: Sequence[int],
        on_walk: Optional[Callable[[Walk], None]] = None,
    ) -> CampaignResult:
        """
        Perform one walk per seed (up to ``parallelism`` at a time) and
        remove duplicate walks.

        ``on_walk`` is called for every finished walk, in the order of
        the seeds, regardless of the parallelism.
        """
        if len(set(seeds)) != len(seeds):
            raise ValueError("Walk seeds must be distinct")

        logger.info(
            f"Running {len(seeds)} walks ({self._config.mode.value} mode, "
            f"parallelism {self._config.parallelism})"
        )
        attempted: List[Walk] = []
        with ThreadPoolExecutor(max_workers=self._config.parallelism) as executor:
            for walk in executor.map(self.run_walk, seeds):
                attempted.append(walk)
                if on_walk is not None:
                    on_walk(walk)

        unique = deduplicate_walks(attempted)
        result = CampaignResult(attempted=attempted, unique=unique)
        logger.info(
            f"Campaign finished: {len(result.attempted)} walks attempted, "
            f"{len(result.unique)} unique, {len(result.successful)} successful"
        )
        return result

    def _dereference_both(
        self,
        step: WalkStep,
        sticky: Callable[[], DereferenceChain],
        sliding_m: MementoUri,
    ) -> WalkStep:
        assert step.t_sticky is not None and step.t_sliding is not None
        try:
            api_chain = sticky()
        except ArchiveFetchError as e:
            return self._failed(step, StopStage.MEMENTO, e)
        step = replace(step, api_chain=api_chain)

        try:
            ui_chain = self._client.dereference_sliding(sliding_m)
        except ArchiveFetchError as e:
            return self._failed(step, StopStage.MEMENTO, e)

        return replace(
            step,
            ui_chain=ui_chain,
            drift_api=compute_drift(step.t_sticky, api_chain.final.datetime),
            drift_ui=compute_drift(step.t_sliding, ui_chain.final.datetime),
            drift_ui_walk=compute_drift(step.t_sticky, ui_chain.final.datetime),
        )

    @staticmethod
    def _failed(step: WalkStep, stage: StopStage, e: ArchiveFetchError) -> WalkStep:
        return replace(
            step, outcome=StopCause(stage, StopKind.from_fetch_kind(e.outcome.kind))
        )

    @staticmethod
    def _no_common_links(index: int, t1: datetime, t_i: datetime) -> WalkStep:
        return WalkStep(
            index=index,
            r=None,
            r_ui=None,
            t_sticky=t1,
            t_sliding=t_i,
            outcome=StopCause(StopStage.MEMENTO, StopKind.NO_COMMON_LINKS),
        )

    @staticmethod
    def _record(progress: WalkProgress, step: WalkStep) -> WalkStep:
        for r in (step.r, step.r_ui):
            if r is not None:
                progress.visited.add(r)
                progress.hosts.add(uri_host(r))
        step = replace(step, domains_so_far=len(progress.hosts))
        progress.steps.append(step)
        return step
