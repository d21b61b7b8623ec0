# SPDX-License-Identifier: MIT

import hashlib
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from typing import Dict, FrozenSet, List, Optional, Tuple

OriginalUri = str
"""
A normalized absolute URI of an original (live web) resource -- a URI-R.
"""

LinkSet = FrozenSet[OriginalUri]
"""
A deduplicated set of URI-Rs found in one memento.
"""

SECONDS_PER_DAY = 86400


@dataclass(frozen=True, order=True)
class MementoUri:
    """
    URI of a memento (URI-M) together with its Memento-Datetime and the URI-R
    it is a capture of.

    Instances order by datetime first and by the URI-M string second,
    which is the order of mementos in a :py:class:`TimeMap`.
    """

    datetime: datetime
    """
    Memento-Datetime -- the instant the memento was captured (UTC).
    """

    uri: str
    """
    The URI-M.
    """

    original: OriginalUri
    """
    The URI-R the memento is a capture of.
    """


@dataclass(frozen=True)
class TimeMap:
    """
    List of all mementos an archive holds for one URI-R.

    The mementos are always kept sorted by datetime (ascending); mementos
    captured within the same second are ordered by their URI-M.
    """

    original: OriginalUri
    """
    The URI-R this TimeMap belongs to.
    """

    mementos: Tuple[MementoUri, ...]
    """
    Mementos, sorted ascending by datetime.
    """

    def __post_init__(self) -> None:
        if any(m.original != self.original for m in self.mementos):
            raise ValueError(
                f"All mementos of a TimeMap must belong to {self.original}"
            )
        object.__setattr__(self, "mementos", tuple(sorted(self.mementos)))

    def __len__(self) -> int:
        return len(self.mementos)

    @property
    def datetimes(self) -> List[datetime]:
        """
        Memento-Datetimes of all mementos, in TimeMap order.
        """
        return [m.datetime for m in self.mementos]


@dataclass(frozen=True, order=True)
class Drift:
    """
    Temporal drift: the absolute distance between a target datetime and the
    Memento-Datetime of the memento actually obtained. Only the amount of drift
    is kept, not its direction.
    """

    seconds: int
    """
    Magnitude of the drift in whole seconds (never negative).
    """

    def __post_init__(self) -> None:
        if self.seconds < 0:
            raise ValueError("Drift cannot be negative")

    @property
    def days(self) -> float:
        """
        Drift in (fractional) days.
        """
        return self.seconds / SECONDS_PER_DAY

    @property
    def whole_days(self) -> int:
        """
        Drift in days, rounded down.
        """
        return self.seconds // SECONDS_PER_DAY


class DriftBasis(Enum):
    """
    Which target datetime the Sliding Target drift is measured against.
    """

    WALK_TARGET = "walk"
    """
    Against the walk's initial target datetime t\\ :sub:`1` -- the datetime
    the user originally asked for.
    """

    STEP_TARGET = "step"
    """
    Against the step's own (moving) target datetime t\\ :sub:`i`.
    """


class FetchKind(Enum):
    """
    Classification of the result of fetching a TimeMap or a memento.
    """

    SUCCESS = "success"
    HTTP_403 = "http_403"
    HTTP_404 = "http_404"
    HTTP_503 = "http_503"
    DOWNLOAD_FAILED = "download_failed"
    NOT_HTML = "not_html"
    OTHER = "other"

    @property
    def is_failure(self) -> bool:
        return self is not FetchKind.SUCCESS

    @property
    def label(self) -> str:
        """
        Human-readable label, as used in the stop-cause tables.
        """
        return _FETCH_KIND_LABELS[self]


_FETCH_KIND_LABELS = {
    FetchKind.SUCCESS: "Success",
    FetchKind.HTTP_403: "HTTP 403",
    FetchKind.HTTP_404: "HTTP 404",
    FetchKind.HTTP_503: "HTTP 503",
    FetchKind.DOWNLOAD_FAILED: "Download failed",
    FetchKind.NOT_HTML: "Not HTML",
    FetchKind.OTHER: "Other",
}


@dataclass(frozen=True)
class FetchOutcome:
    """
    Result of one fetch (of a TimeMap or a memento), after classification.
    """

    kind: FetchKind
    """
    Classification of the result.
    """

    url: str
    """
    URL that was requested last.
    """

    status: Optional[int] = None
    """
    HTTP status code. ``None`` if the download failed.
    """

    headers: Dict[str, str] = field(default_factory=dict, repr=False)
    """
    Response headers (lower-case names).
    """

    body: Optional[bytes] = field(default=None, repr=False)
    """
    Retrieved content, if any.
    """

    final_memento: Optional[MementoUri] = None
    """
    The memento finally obtained. Always present for a successful dereference.
    """

    redirect_hops: int = 0
    """
    Number of redirects followed before this outcome.
    """

    message: str = ""
    """
    Additional detail about a failure.
    """

    retried: bool = False
    """
    Whether this outcome is the result of a repeated attempt.
    """


class HopKind(Enum):
    """
    Kind of redirect followed while dereferencing a memento.
    """

    HARD = "hard-redirect"
    """
    HTTP 3xx response with a ``Location`` header.
    """

    SOFT = "soft-redirect"
    """
    HTTP 200 response whose HTML redirects the browser via a script
    or a meta refresh.
    """


@dataclass(frozen=True)
class Hop:
    """
    One redirect followed during dereferencing.
    """

    uri: str
    """
    Target of the redirect.
    """

    kind: HopKind
    """
    Hard or soft redirect.
    """


@dataclass(frozen=True)
class DereferenceChain:
    """
    Record of dereferencing one memento: the URI-M requested, the redirects
    followed and the memento finally obtained.
    """

    requested: MementoUri
    """
    The URI-M initially requested.
    """

    hops: Tuple[Hop, ...]
    """
    Redirects followed, in order.
    """

    final: MementoUri
    """
    The memento finally obtained; its datetime is the one drift is measured from.
    """

    body: bytes = field(default=b"", repr=False, compare=False)
    """
    HTML content of the final memento. Not part of walk records.
    """


class StopStage(Enum):
    """
    Which download stopped a walk.
    """

    TIMEMAP = "timemap"
    MEMENTO = "memento"


class StopKind(Enum):
    """
    Reason a walk stopped before completing the maximum number of steps.
    """

    HTTP_403 = "http_403"
    HTTP_404 = "http_404"
    HTTP_503 = "http_503"
    DOWNLOAD_FAILED = "download_failed"
    NOT_HTML = "not_html"
    NO_COMMON_LINKS = "no_common_links"
    OTHER = "other"

    @staticmethod
    def from_fetch_kind(kind: FetchKind) -> "StopKind":
        if kind is FetchKind.SUCCESS:
            raise ValueError("A successful fetch is not a stop cause")
        return StopKind(kind.value)

    @property
    def label(self) -> str:
        if self is StopKind.NO_COMMON_LINKS:
            return "No Common Links"
        return FetchKind(self.value).label


@dataclass(frozen=True)
class StopCause:
    """
    Classified reason why a walk stopped.
    """

    stage: StopStage
    kind: StopKind

    def __post_init__(self) -> None:
        no_links = self.kind is StopKind.NO_COMMON_LINKS
        if no_links and self.stage is not StopStage.MEMENTO:
            raise ValueError("'No common links' can only occur at the memento stage")


class WalkMode(Enum):
    """
    How the next URI-R of a walk is selected.
    """

    STRICT = "strict"
    """
    The next URI-R must be linked from both policies' current mementos.
    """

    RELAXED = "relaxed"
    """
    If there is no common link, each policy follows a link of its own.
    """


@dataclass(frozen=True)
class Sample:
    """
    One sample URI-R from which walks can start.
    """

    uri: OriginalUri
    sample_class: Optional[str] = None
    """
    Name of the sample collection the URI comes from (e.g. ``dmoz``), if known.
    """


@dataclass(frozen=True)
class WalkStep:
    """
    One step of an acyclic walk, performed under both target policies.

    Failed steps keep whatever was obtained before the failure; their drift
    fields are ``None``.
    """

    index: int
    """
    Step number, starting from 1.
    """

    r: Optional[OriginalUri]
    """
    URI-R selected for this step (Sticky Target side). ``None`` if no link
    could be selected.
    """

    r_ui: Optional[OriginalUri]
    """
    URI-R selected for the Sliding Target side. Equal to :py:attr:`r` unless
    the step was taken in relaxed mode.
    """

    t_sticky: Optional[datetime]
    """
    Sticky target datetime -- always the walk's initial target t\\ :sub:`1`.
    """

    t_sliding: Optional[datetime]
    """
    Sliding target datetime t\\ :sub:`i`.
    """

    api_chain: Optional[DereferenceChain] = None
    ui_chain: Optional[DereferenceChain] = None

    drift_api: Optional[Drift] = None
    """
    Sticky drift: distance of the obtained memento from t\\ :sub:`1`.
    """

    drift_ui: Optional[Drift] = None
    """
    Sliding drift against the step's own target t\\ :sub:`i`.
    """

    drift_ui_walk: Optional[Drift] = None
    """
    Sliding drift against the walk's initial target t\\ :sub:`1`.
    """

    choice: int = 0
    """
    Number of links the URI-R was selected from (0 for the first step).
    """

    relaxed: bool = False
    """
    Whether the two policies followed different links on this step.
    """

    domains_so_far: int = 0
    """
    Number of distinct hosts visited by the walk up to and including this step.
    """

    outcome: Optional[StopCause] = None
    """
    ``None`` for a successful step, otherwise the reason the walk stopped here.
    """

    @property
    def succeeded(self) -> bool:
        return self.outcome is None

    def drift_sliding(self, basis: DriftBasis) -> Optional[Drift]:
        """
        Sliding drift of this step measured against the given basis.
        """
        if basis is DriftBasis.WALK_TARGET:
            return self.drift_ui_walk
        return self.drift_ui


@dataclass(frozen=True)
class Walk:
    """
    Record of one seeded acyclic walk.
    """

    seed: int
    """
    The walk identifier, which is also the seed of its random choices.
    """

    steps: Tuple[WalkStep, ...]

    stop: Optional[StopCause]
    """
    Why the walk stopped; ``None`` if it completed the maximum number of steps.
    """

    mode: WalkMode = WalkMode.STRICT
    sample_class: Optional[str] = None
    """
    Sample class of the walk's first URI-R.
    """

    @property
    def length(self) -> int:
        """
        Number of successful steps. A walk that fails on its 6th step
        has length 5.
        """
        return sum(1 for s in self.steps if s.succeeded)

    @property
    def completed(self) -> bool:
        return self.stop is None

    @property
    def successful_steps(self) -> List[WalkStep]:
        return [s for s in self.steps if s.succeeded]

    @property
    def fingerprint(self) -> str:
        """
        Hash of the walk path: the URI-Rs and the finally obtained mementos
        of every step, plus the stop cause. Walks with equal fingerprints
        are duplicates.
        """
        h = hashlib.sha256()
        for s in self.steps:
            parts = [
                s.r or "",
                s.r_ui or "",
                s.api_chain.final.uri if s.api_chain else "",
                s.ui_chain.final.uri if s.ui_chain else "",
            ]
            h.update(("\t".join(parts) + "\n").encode("utf-8"))
        if self.stop is not None:
            h.update(f"stop {self.stop.stage.value} {self.stop.kind.value}".encode())
        return h.hexdigest()

