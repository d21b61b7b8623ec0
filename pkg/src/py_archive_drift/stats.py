# SPDX-License-Identifier: MIT

"""
Aggregation of walk records into drift statistics and the summary tables
of a campaign.

All drift statistics are computed over successful steps only. Unless stated
otherwise, the Sliding Target drift is measured against the walk's initial
target datetime (:py:attr:`DriftBasis.WALK_TARGET`).
"""

import math
from dataclasses import dataclass
from typing import (
    Callable,
    Dict,
    Iterable,
    List,
    Optional,
    Sequence,
    Set,
    Tuple,
    Union,
)

import numpy as np
from scipy import stats as scipy_stats

from .types import SECONDS_PER_DAY, DriftBasis, StopKind, StopStage, Walk, WalkStep
from .uri import registered_domain, uri_host

# Length of a year for the drift thresholds
DAYS_PER_YEAR = 365.25

# Walk lengths above this are counted in buckets of LENGTH_BUCKET_SIZE
LENGTH_INDIVIDUAL_MAX = 25
LENGTH_BUCKET_SIZE = 5

# Upper edges (days) of the bins of drift_distribution(); the last bin is open
DEFAULT_DISTRIBUTION_BINS = (1.0, 7.0, 30.0, 90.0, DAYS_PER_YEAR, 5 * DAYS_PER_YEAR)

GroupKey = Union[int, str]


@dataclass(frozen=True)
class PolicyStats:
    """
    Aggregate of the drifts of one target policy.

    The median of an even number of values is the lower of the two
    central values. The standard deviation is the population one.
    """

    count: int
    mean_seconds: float
    median_seconds: int
    std_seconds: float

    @property
    def mean_days(self) -> float:
        return self.mean_seconds / SECONDS_PER_DAY

    @property
    def median_days(self) -> float:
        return self.median_seconds / SECONDS_PER_DAY

    @property
    def std_days(self) -> float:
        return self.std_seconds / SECONDS_PER_DAY

    @staticmethod
    def of(seconds: Sequence[int]) -> "PolicyStats":
        if len(seconds) == 0:
            raise ValueError("Statistics of an empty set of drifts")
        values = np.sort(np.asarray(seconds, dtype=np.int64))
        return PolicyStats(
            count=len(values),
            mean_seconds=float(np.mean(values)),
            median_seconds=int(values[(len(values) - 1) // 2]),
            std_seconds=float(np.std(values)),
        )


@dataclass(frozen=True)
class DriftSeries:
    """
    One row of a drift grouping: the drift statistics of both policies
    over the steps of one group.
    """

    key: GroupKey
    """
    The group: step index, choice bucket (its lower bound), number of domains
    or sample class.
    """

    label: str
    sticky: PolicyStats
    sliding: PolicyStats

    @property
    def count(self) -> int:
        return self.sticky.count


@dataclass(frozen=True)
class WalkDriftStats:
    """
    Drift statistics of the successful steps of one walk.
    """

    sticky: PolicyStats
    sliding: PolicyStats


@dataclass(frozen=True)
class LengthRow:
    label: str
    low: int
    high: int
    count: int


@dataclass(frozen=True)
class LengthTable:
    """
    Numbers of walks by length (successful steps). Walks without any
    successful step are not counted.
    """

    rows: List[LengthRow]
    total: int


@dataclass(frozen=True)
class StopCauseCell:
    count: int
    percent: float
    """
    Percentage of all stops of the same split (first step or other steps).
    """


@dataclass(frozen=True)
class StopCauseRow:
    kind: StopKind
    first_timemap: StopCauseCell
    first_memento: StopCauseCell
    other_timemap: StopCauseCell
    other_memento: StopCauseCell


@dataclass(frozen=True)
class StopCauseTable:
    """
    Stop causes split by the step that stopped the walk (the first one or
    a later one) and by the download that failed (TimeMap or memento).
    Walks that completed the maximum number of steps have no stop cause.
    """

    rows: List[StopCauseRow]
    first_total: int
    other_total: int
    completed: int


@dataclass(frozen=True)
class CampaignSummary:
    """
    Overall numbers of walks and steps of a campaign.
    """

    attempted_walks: int
    unique_walks: int
    successful_walks: int
    """
    Unique walks with at least one successful step.
    """

    steps: int
    """
    All steps, the failed ones included.
    """

    successful_steps: int
    steps_over_1yr: int
    """
    Successful steps whose Sliding Target drift exceeds one year.
    """

    steps_over_5yr: int
    sticky: Optional[PolicyStats]
    sliding: Optional[PolicyStats]

    @property
    def pct_successful(self) -> float:
        return _percent(self.successful_walks, self.unique_walks)

    @property
    def mean_successful_steps(self) -> float:
        """
        Successful steps per successful walk.
        """
        if self.successful_walks == 0:
            return 0.0
        return self.successful_steps / self.successful_walks


@dataclass(frozen=True)
class ComparisonRow:
    label: str
    strict: float
    relaxed: float

    @property
    def change_pct(self) -> Optional[float]:
        """
        Relative change from strict to relaxed mode, in percent;
        ``None`` if the strict value is zero.
        """
        if self.strict == 0:
            return None
        return (self.relaxed - self.strict) / self.strict * 100.0


@dataclass(frozen=True)
class DistributionRow:
    step: int
    policy: str
    """
    ``"sticky"`` or ``"sliding"``.
    """

    bin_label: str
    count: int


def _percent(part: int, whole: int) -> float:
    return 100.0 * part / whole if whole else 0.0


def _successful(walks: Iterable[Walk]) -> Iterable[Tuple[Walk, WalkStep]]:
    for w in walks:
        for s in w.steps:
            if s.succeeded:
                yield w, s


def _drift_pair(step: WalkStep, basis: DriftBasis) -> Tuple[int, int]:
    api = step.drift_api
    ui = step.drift_sliding(basis)
    assert api is not None and ui is not None
    return api.seconds, ui.seconds


def _group(
    walks: Iterable[Walk],
    basis: DriftBasis,
    key_of: Callable[[Walk, WalkStep], Optional[GroupKey]],
    label_of: Callable[[GroupKey], str] = str,
) -> List[DriftSeries]:
    groups: Dict[GroupKey, Tuple[List[int], List[int]]] = {}
    for w, s in _successful(walks):
        key = key_of(w, s)
        if key is None:
            continue
        api, ui = _drift_pair(s, basis)
        sticky, sliding = groups.setdefault(key, ([], []))
        sticky.append(api)
        sliding.append(ui)

    return [
        DriftSeries(
            key=key,
            label=label_of(key),
            sticky=PolicyStats.of(groups[key][0]),
            sliding=PolicyStats.of(groups[key][1]),
        )
        for key in sorted(groups, key=lambda k: (isinstance(k, str), k))
    ]


def _class_filter(walks: Iterable[Walk], sample_class: Optional[str]) -> List[Walk]:
    if sample_class is None:
        return list(walks)
    return [w for w in walks if w.sample_class == sample_class]


def drift_by_step(
    walks: Iterable[Walk],
    basis: DriftBasis = DriftBasis.WALK_TARGET,
    sample_class: Optional[str] = None,
) -> List[DriftSeries]:
    """
    Drift of both policies by step index.
    """
    return _group(_class_filter(walks, sample_class), basis, lambda w, s: s.index)


def _choice_buckets(buckets: Sequence[int]) -> Callable[[int], Tuple[int, str]]:
    bounds = sorted(set(buckets))
    if not bounds or bounds[0] < 1:
        raise ValueError("Choice buckets must be positive lower bounds")

    def bucket(choice: int) -> Tuple[int, str]:
        i = max(0, np.searchsorted(bounds, choice, side="right") - 1)
        low = bounds[i]
        if i + 1 < len(bounds):
            high = bounds[i + 1] - 1
            return low, str(low) if low == high else f"{low}-{high}"
        return low, f"{low}+"

    return bucket


def drift_by_choice(
    walks: Iterable[Walk],
    basis: DriftBasis = DriftBasis.WALK_TARGET,
    buckets: Optional[Sequence[int]] = None,
) -> List[DriftSeries]:
    """
    Drift of both policies by choice -- the number of links the step's URI-R
    was selected from. The first step of a walk has no choice and is skipped.

    ``buckets`` lists the lower bounds of the choice buckets
    (``[1, 2, 5, 10]`` gives ``1``, ``2-4``, ``5-9`` and ``10+``);
    without it every choice value is a group of its own.
    """
    if buckets is None:
        return _group(walks, basis, lambda w, s: s.choice if s.index >= 2 else None)

    bucket = _choice_buckets(buckets)
    labels: Dict[GroupKey, str] = {}

    def key_of(w: Walk, s: WalkStep) -> Optional[GroupKey]:
        if s.index < 2:
            return None
        low, label = bucket(s.choice)
        labels[low] = label
        return low

    return _group(walks, basis, key_of, lambda k: labels[k])


def _domain_counts(walk: Walk) -> List[int]:
    seen: Set[str] = set()
    counts = []
    for s in walk.steps:
        for r in (s.r, s.r_ui):
            if r is not None:
                seen.add(registered_domain(uri_host(r)))
        counts.append(len(seen))
    return counts


def drift_by_domains(
    walks: Iterable[Walk],
    basis: DriftBasis = DriftBasis.WALK_TARGET,
    registered_domains: bool = False,
) -> List[DriftSeries]:
    """
    Drift of both policies by the number of distinct domains the walk has
    visited up to (and including) the step.

    A domain is a full host name, or with ``registered_domains`` the last
    two labels of the host name.
    """
    if not registered_domains:
        return _group(walks, basis, lambda w, s: s.domains_so_far)

    counts: Dict[Tuple[int, int], int] = {}
    walk_list = list(walks)
    for i, w in enumerate(walk_list):
        for s, n in zip(w.steps, _domain_counts(w)):
            counts[(i, s.index)] = n

    index_of = {id(w): i for i, w in enumerate(walk_list)}
    return _group(walk_list, basis, lambda w, s: counts[(index_of[id(w)], s.index)])


def drift_by_class(
    walks: Iterable[Walk], basis: DriftBasis = DriftBasis.WALK_TARGET
) -> List[DriftSeries]:
    """
    Drift of both policies by the sample class of the walks.
    """
    return _group(walks, basis, lambda w, s: w.sample_class)


def walk_drift_stats(
    walk: Walk, basis: DriftBasis = DriftBasis.WALK_TARGET
) -> Optional[WalkDriftStats]:
    """
    Drift statistics of one walk; ``None`` if it has no successful step.
    """
    pairs = [_drift_pair(s, basis) for s in walk.successful_steps]
    if not pairs:
        return None
    return WalkDriftStats(
        sticky=PolicyStats.of([p[0] for p in pairs]),
        sliding=PolicyStats.of([p[1] for p in pairs]),
    )


def occurrences_by_length(
    walks: Iterable[Walk], max_steps: int = 50, sample_class: Optional[str] = None
) -> LengthTable:
    """
    Numbers of walks by length: lengths up to 25 one by one, longer ones
    in buckets of five (26-30, 31-35, ...).
    """
    lengths = [w.length for w in _class_filter(walks, sample_class) if w.length > 0]
    bounds = [(n, n) for n in range(1, min(LENGTH_INDIVIDUAL_MAX, max_steps) + 1)]
    low = LENGTH_INDIVIDUAL_MAX + 1
    while low <= max_steps:
        bounds.append((low, min(low + LENGTH_BUCKET_SIZE - 1, max_steps)))
        low += LENGTH_BUCKET_SIZE

    rows = []
    for lo, hi in bounds:
        label = str(lo) if lo == hi else f"{lo}-{hi}"
        count = sum(1 for n in lengths if lo <= n <= hi)
        rows.append(LengthRow(label, lo, hi, count))
    return LengthTable(rows=rows, total=len(lengths))


def stop_causes(walks: Iterable[Walk]) -> StopCauseTable:
    """
    Table of the stop causes of the walks.
    """
    counts: Dict[Tuple[StopKind, bool, StopStage], int] = {}
    first_total = other_total = completed = 0
    for w in walks:
        if w.stop is None:
            completed += 1
            continue
        first = w.length == 0
        key = (w.stop.kind, first, w.stop.stage)
        counts[key] = counts.get(key, 0) + 1
        if first:
            first_total += 1
        else:
            other_total += 1

    def cell(kind: StopKind, first: bool, stage: StopStage) -> StopCauseCell:
        n = counts.get((kind, first, stage), 0)
        return StopCauseCell(n, _percent(n, first_total if first else other_total))

    rows = [
        StopCauseRow(
            kind=kind,
            first_timemap=cell(kind, True, StopStage.TIMEMAP),
            first_memento=cell(kind, True, StopStage.MEMENTO),
            other_timemap=cell(kind, False, StopStage.TIMEMAP),
            other_memento=cell(kind, False, StopStage.MEMENTO),
        )
        for kind in StopKind
    ]
    return StopCauseTable(rows, first_total, other_total, completed)


def summarize(
    walks: Iterable[Walk],
    attempted: Optional[int] = None,
    basis: DriftBasis = DriftBasis.WALK_TARGET,
) -> CampaignSummary:
    """
    Summary of a campaign. ``walks`` are the unique walks; ``attempted`` is
    the number of walks attempted before deduplication (by default the
    number of unique walks).
    """
    walk_list = list(walks)
    pairs = [_drift_pair(s, basis) for _, s in _successful(walk_list)]
    sliding = [p[1] for p in pairs]
    year = DAYS_PER_YEAR * SECONDS_PER_DAY
    return CampaignSummary(
        attempted_walks=len(walk_list) if attempted is None else attempted,
        unique_walks=len(walk_list),
        successful_walks=sum(1 for w in walk_list if w.length > 0),
        steps=sum(len(w.steps) for w in walk_list),
        successful_steps=len(pairs),
        steps_over_1yr=sum(1 for d in sliding if d > year),
        steps_over_5yr=sum(1 for d in sliding if d > 5 * year),
        sticky=PolicyStats.of([p[0] for p in pairs]) if pairs else None,
        sliding=PolicyStats.of(sliding) if pairs else None,
    )


def summarize_by_class(
    walks: Iterable[Walk], basis: DriftBasis = DriftBasis.WALK_TARGET
) -> Dict[str, CampaignSummary]:
    """
    Summaries of the walks of each sample class. Walks without a class
    are left out.
    """
    by_class: Dict[str, List[Walk]] = {}
    for w in walks:
        if w.sample_class is not None:
            by_class.setdefault(w.sample_class, []).append(w)
    return {c: summarize(ws, basis=basis) for c, ws in sorted(by_class.items())}


def compare_summaries(
    strict: CampaignSummary, relaxed: CampaignSummary
) -> List[ComparisonRow]:
    """
    Compare a strict-mode and a relaxed-mode campaign run with the same seeds.
    """
    rows = [
        ComparisonRow("Walks", strict.attempted_walks, relaxed.attempted_walks),
        ComparisonRow("Unique walks", strict.unique_walks, relaxed.unique_walks),
        ComparisonRow(
            "Successful walks", strict.successful_walks, relaxed.successful_walks
        ),
        ComparisonRow("Steps", strict.steps, relaxed.steps),
        ComparisonRow(
            "Successful steps", strict.successful_steps, relaxed.successful_steps
        ),
        ComparisonRow(
            "Mean successful steps",
            strict.mean_successful_steps,
            relaxed.mean_successful_steps,
        ),
    ]
    for label, attr in (("Sticky", "sticky"), ("Sliding", "sliding")):
        s: Optional[PolicyStats] = getattr(strict, attr)
        r: Optional[PolicyStats] = getattr(relaxed, attr)
        rows.append(
            ComparisonRow(
                f"{label} mean drift (days)",
                s.mean_days if s else 0.0,
                r.mean_days if r else 0.0,
            )
        )
        rows.append(
            ComparisonRow(
                f"{label} median drift (days)",
                s.median_days if s else 0.0,
                r.median_days if r else 0.0,
            )
        )
    return rows


def drift_distribution(
    walks: Iterable[Walk],
    basis: DriftBasis = DriftBasis.WALK_TARGET,
    bins: Sequence[float] = DEFAULT_DISTRIBUTION_BINS,
) -> List[DistributionRow]:
    """
    Numbers of successful steps by step index, policy and drift range.

    ``bins`` are the ascending upper edges (in days, exclusive) of the
    drift ranges; drifts at or above the last edge fall into an open range.
    """
    edges = list(bins)
    if any(b <= a for a, b in zip(edges, edges[1:])) or (edges and edges[0] <= 0):
        raise ValueError("Bin edges must be positive and ascending")

    labels = []
    low = 0.0
    for edge in edges:
        labels.append(f"{low:g}-{edge:g}")
        low = edge
    labels.append(f">={low:g}")

    counts: Dict[Tuple[int, str, int], int] = {}
    for _, s in _successful(walks):
        api, ui = _drift_pair(s, basis)
        for policy, seconds in (("sticky", api), ("sliding", ui)):
            days = seconds / SECONDS_PER_DAY
            i = int(np.searchsorted(edges, days, side="right"))
            counts[(s.index, policy, i)] = counts.get((s.index, policy, i), 0) + 1

    rows = []
    for step in sorted({k[0] for k in counts}):
        for policy in ("sticky", "sliding"):
            for i, label in enumerate(labels):
                n = counts.get((step, policy, i), 0)
                rows.append(DistributionRow(step, policy, label, n))
    return rows


def rank_correlation(xs: Sequence[float], ys: Sequence[float]) -> float:
    """
    Spearman rank correlation of two sequences. Returns 0.0 if it is not
    defined (fewer than two values or a constant sequence).
    """
    if len(xs) != len(ys):
        raise ValueError("Sequences must have the same length")
    if len(xs) < 2 or len(set(xs)) < 2 or len(set(ys)) < 2:
        return 0.0
    rho = scipy_stats.spearmanr(xs, ys)[0]
    rho = float(rho)
    return 0.0 if math.isnan(rho) else rho
