# SPDX-License-Identifier: MIT

"""
Deterministic simulated web archive.

A :py:class:`SimArchive` holds a synthetic corpus of sites, pages,
capture schedules and link graphs, generated from a :py:class:`SimConfig`
and its seed. It answers the same requests as a Wayback-style archive
(TimeMaps, mementos, redirects, injected faults), so it can stand in for
a real archive behind :py:class:`py_archive_drift.ArchiveClient`.

Capture model: the archive crawls at regular intervals (with optional
jitter shared by all pages) and each page is captured at each crawl with
its own probability. Link model: each page draws its outlinks once and
re-draws a fraction of them at every change epoch, so that older captures
of a page link to different pages than newer ones.
"""

from __future__ import annotations

import bisect
import hashlib
import html
import json
import logging
import os
import random
import threading
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union
from urllib.parse import urlsplit

from .archive_datetime import (
    archive_datetime,
    decode_wayback_datetime,
    encode_wayback_datetime,
    to_archive_datetime,
)
from .backend import ArchiveResponse, walk_state
from .errors import (
    ArchiveTransportError,
    InvalidConfigError,
    MalformedDatetimeError,
    MalformedUriError,
    NotArchiveUriError,
    UnknownUriError,
)
from .links import TOOLBAR_BEGIN_MARKER, TOOLBAR_END_MARKER
from .memento import parse_wayback_uri
from .timemap_parser import _TimeMapParser
from .types import (
    SECONDS_PER_DAY,
    Drift,
    MementoUri,
    OriginalUri,
    Sample,
    TimeMap,
    Walk,
)
from .uri import normalize_uri, uri_host

logger = logging.getLogger(__name__)

CORPUS_FORMAT = "py-archive-drift-sim"
CORPUS_VERSION = 1

SIM_TLD = "sim"

TIMEMAP_PATH = "/web/timemap/link/"

# Same limit as the default of the archive client
ORACLE_REDIRECT_LIMIT = 10

# Minimal valid GIF, served for injected "not HTML" faults
_GIF_BYTES = b"GIF89a\x01\x00\x01\x00\x00\x00\x00;"

PathLike = Union[str, os.PathLike[str]]


class SimFaultKind(Enum):
    """
    Kind of fault injected into the simulated archive.
    """

    HTTP_403 = "http_403"
    HTTP_404 = "http_404"
    HTTP_503 = "http_503"
    NOT_HTML = "not_html"
    REDIRECT = "redirect"
    """
    HTTP 302 to another capture of the same page.
    """
    SOFT_REDIRECT = "soft_redirect"
    """
    HTTP 200 page whose script redirects to another capture of the same page.
    """
    DOWNLOAD_FAILED = "download_failed"
    OTHER = "other"
    """
    HTTP 500.
    """


# Faults that make sense for TimeMap requests
TIMEMAP_FAULT_KINDS = frozenset(
    {
        SimFaultKind.HTTP_403,
        SimFaultKind.HTTP_404,
        SimFaultKind.HTTP_503,
        SimFaultKind.DOWNLOAD_FAILED,
        SimFaultKind.OTHER,
    }
)

_REDIRECT_FAULT_KINDS = (SimFaultKind.REDIRECT, SimFaultKind.SOFT_REDIRECT)


def site_host(index: int) -> str:
    """
    Host name of the generated site with the given index.
    """
    return f"site{index:03d}.{SIM_TLD}"


def _ts(dt: datetime) -> str:
    return encode_wayback_datetime(dt)


def _parse_ts(value: Any, what: str) -> datetime:
    if not isinstance(value, str):
        raise InvalidConfigError(f"{what}: expected a 14-digit datetime string")
    try:
        return decode_wayback_datetime(value)
    except MalformedDatetimeError as e:
        raise InvalidConfigError(f"{what}: {e}") from e


def _normalize(uri: Any, what: str) -> OriginalUri:
    if not isinstance(uri, str):
        raise InvalidConfigError(f"{what}: expected a URI string")
    try:
        return normalize_uri(uri)
    except MalformedUriError as e:
        raise InvalidConfigError(f"{what}: {e}") from e


@dataclass
class FaultSpec:
    """
    One fault injected into the simulated archive.
    """

    uri: OriginalUri
    """
    URI-R the fault applies to.
    """

    kind: SimFaultKind

    snapshot: Optional[datetime] = None
    """
    Capture the fault applies to; ``None`` for the TimeMap of :py:attr:`uri`.
    """

    redirect_offset: int = -1
    """
    For redirect faults: the target capture, relative to the faulty one
    (-1 is the previous capture). Clamped to the existing captures.
    """

    failures: int = 1
    """
    For HTTP 503 faults: number of requests that fail before the resource
    becomes available again. -1 means the fault is permanent.

    Requests are counted separately for every walk (see
    :py:func:`~py_archive_drift.backend.walk_scope`); requests made outside
    of a walk share one archive-wide count.
    """

    def to_json(self) -> Dict[str, Any]:
        return {
            "failures": self.failures,
            "kind": self.kind.value,
            "redirect_offset": self.redirect_offset,
            "snapshot": _ts(self.snapshot) if self.snapshot is not None else None,
            "uri": self.uri,
        }

    @staticmethod
    def from_json(obj: Dict[str, Any]) -> FaultSpec:
        _check_keys(obj, {"uri", "kind", "snapshot", "redirect_offset", "failures"})
        try:
            kind = SimFaultKind(obj["kind"])
        except (KeyError, ValueError) as e:
            raise InvalidConfigError(f"Invalid fault kind: {obj.get('kind')!r}") from e
        snapshot = obj.get("snapshot")
        return FaultSpec(
            uri=_normalize(obj.get("uri"), "Fault URI"),
            kind=kind,
            snapshot=_parse_ts(snapshot, "Fault snapshot") if snapshot else None,
            redirect_offset=int(obj.get("redirect_offset", -1)),
            failures=int(obj.get("failures", 1)),
        )


@dataclass
class FixedPage:
    """
    A page of the simulated corpus given explicitly instead of generated.
    """

    uri: OriginalUri
    snapshots: List[datetime]
    """
    Capture datetimes. An empty list makes the page unarchived.
    """

    links: List[OriginalUri] = field(default_factory=list)
    """
    URI-Rs linked from every capture.
    """

    snapshot_links: Dict[datetime, List[OriginalUri]] = field(default_factory=dict)
    """
    URI-Rs linked from particular captures, replacing :py:attr:`links`.
    """

    sample: bool = False
    """
    Whether walks may start at this page.
    """

    sample_class: Optional[str] = None

    def to_json(self) -> Dict[str, Any]:
        return {
            "links": list(self.links),
            "sample": self.sample,
            "sample_class": self.sample_class,
            "snapshot_links": {
                _ts(d): list(links) for d, links in sorted(self.snapshot_links.items())
            },
            "snapshots": [_ts(d) for d in self.snapshots],
            "uri": self.uri,
        }

    @staticmethod
    def from_json(obj: Dict[str, Any]) -> FixedPage:
        keys = {"uri", "snapshots", "links", "snapshot_links", "sample", "sample_class"}
        _check_keys(obj, keys)
        return FixedPage(
            uri=_normalize(obj.get("uri"), "Page URI"),
            snapshots=[_parse_ts(d, "Page snapshot") for d in obj.get("snapshots", [])],
            links=[_normalize(u, "Page link") for u in obj.get("links", [])],
            snapshot_links={
                _parse_ts(d, "Page snapshot"): [_normalize(u, "Page link") for u in us]
                for d, us in obj.get("snapshot_links", {}).items()
            },
            sample=bool(obj.get("sample", False)),
            sample_class=obj.get("sample_class"),
        )


def _check_keys(obj: Any, allowed: Iterable[str]) -> None:
    if not isinstance(obj, dict):
        raise InvalidConfigError("Expected a JSON object")
    unknown = set(obj) - set(allowed)
    if unknown:
        raise InvalidConfigError(f"Unknown configuration keys: {sorted(unknown)}")


def _pair(value: Any, what: str, cast: Any) -> Any:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise InvalidConfigError(f"{what}: expected a pair [min, max]")
    return (cast(value[0]), cast(value[1]))


@dataclass
class SimConfig:
    """
    Parameters of a simulated archive. The configuration (including its seed)
    fully determines the generated corpus.
    """

    seed: int = 0

    n_sites: int = 20

    pages_per_site: Tuple[int, int] = (10, 30)
    """
    Range (inclusive) of the number of pages of each site, home page included.
    """

    span_start: datetime = archive_datetime(2000, 1, 1)
    """
    Datetime of the first crawl.
    """

    span_days: float = 4748.0
    """
    Length of the crawled period.
    """

    crawl_interval_days: float = 60.0

    crawl_jitter_days: float = 0.0
    """
    Each crawl is shifted by a random offset within +/- this many days.
    """

    capture_probability: Tuple[float, float] = (0.5, 1.0)
    """
    Range of the per-page probability of being captured by a crawl.
    Every archived page is captured at least once.
    """

    intra_site_links: Tuple[int, int] = (3, 10)
    """
    Range (inclusive) of the number of outlinks of a page.
    """

    cross_site_link_probability: float = 0.3
    """
    Probability that an outlink points to another site.
    """

    change_interval_days: float = 365.0
    """
    Interval of the change epochs at which pages re-draw some outlinks.
    """

    link_churn: float = 0.1
    """
    Fraction of outlinks re-drawn at every change epoch.
    """

    sample_classes: List[str] = field(default_factory=list)
    """
    Sample classes assigned to the sites' home pages in round-robin order.
    """

    archival_rates: Dict[str, float] = field(default_factory=dict)
    """
    Probability that a home page of the given sample class is archived at all.
    """

    page_archival_rate: float = 1.0
    """
    Probability that any other page is archived at all.
    """

    hub_site: bool = False
    """
    Make the first site a hub: every page links to every other page of the site.
    """

    hub_pages: int = 1000

    inject_toolbar: bool = False
    """
    Insert an archive navigation toolbar into the served mementos.
    """

    fault_rates: Dict[str, float] = field(default_factory=dict)
    """
    Probability of a fault per capture, by :py:class:`SimFaultKind` value.
    Injected HTTP 503 faults are permanent.
    """

    timemap_fault_rates: Dict[str, float] = field(default_factory=dict)
    """
    Probability of a fault per TimeMap, by :py:class:`SimFaultKind` value.
    """

    redirect_max_offset: int = 2
    """
    Random redirect faults point at most this many captures away.
    """

    faults: List[FaultSpec] = field(default_factory=list)
    """
    Explicit faults, in addition to the random ones.
    """

    fixed_pages: List[FixedPage] = field(default_factory=list)
    """
    Explicit pages, in addition to the generated sites.
    """

    def validate(self) -> None:
        """
        Raise :py:exc:`InvalidConfigError` if the configuration is not usable.
        """

        def check(condition: bool, msg: str) -> None:
            if not condition:
                raise InvalidConfigError(msg)

        def probability(p: float, what: str) -> None:
            check(0.0 <= p <= 1.0, f"{what} must be between 0 and 1 (got {p})")

        check(self.n_sites >= 0, "Number of sites must not be negative")
        lo, hi = self.pages_per_site
        check(1 <= lo <= hi, "Invalid pages-per-site range")
        check(self.span_days > 0, "Span must be longer than zero days")
        check(self.crawl_interval_days > 0, "Crawl interval must be positive")
        check(
            0 <= self.crawl_jitter_days < self.crawl_interval_days / 2,
            "Crawl jitter must be less than half of the crawl interval",
        )
        qlo, qhi = self.capture_probability
        check(0 < qlo <= qhi <= 1, "Invalid capture probability range")
        llo, lhi = self.intra_site_links
        check(0 <= llo <= lhi, "Invalid link count range")
        check(self.change_interval_days > 0, "Change interval must be positive")
        probability(self.cross_site_link_probability, "Cross-site link probability")
        probability(self.link_churn, "Link churn")
        probability(self.page_archival_rate, "Page archival rate")
        for name, rate in self.archival_rates.items():
            probability(rate, f"Archival rate of {name}")
        check(self.hub_pages >= 1, "Hub site needs at least one page")
        check(self.redirect_max_offset >= 1, "Redirect offset must be at least 1")

        for rates, kinds, what in (
            (self.fault_rates, set(SimFaultKind), "Fault rate"),
            (self.timemap_fault_rates, TIMEMAP_FAULT_KINDS, "TimeMap fault rate"),
        ):
            for name, rate in rates.items():
                check(
                    name in {k.value for k in kinds},
                    f"{what}: unsupported fault kind {name!r}",
                )
                probability(rate, f"{what} of {name}")
            check(sum(rates.values()) <= 1.0, f"{what}s must not sum above 1")

        seen = set()
        for f in self.faults:
            key = (f.uri, f.snapshot)
            check(key not in seen, f"Duplicate fault for {f.uri}")
            seen.add(key)
            check(f.failures >= 1 or f.failures == -1, "Invalid number of failures")
            if f.snapshot is None:
                check(
                    f.kind in TIMEMAP_FAULT_KINDS,
                    f"Fault {f.kind.value} cannot apply to a TimeMap",
                )
            if f.kind in _REDIRECT_FAULT_KINDS:
                check(f.redirect_offset != 0, "Redirect offset must not be zero")

        uris = [p.uri for p in self.fixed_pages]
        check(len(set(uris)) == len(uris), "Fixed page URIs must be unique")

    def to_json(self) -> Dict[str, Any]:
        return {
            "archival_rates": dict(sorted(self.archival_rates.items())),
            "capture_probability": list(self.capture_probability),
            "change_interval_days": self.change_interval_days,
            "crawl_interval_days": self.crawl_interval_days,
            "crawl_jitter_days": self.crawl_jitter_days,
            "cross_site_link_probability": self.cross_site_link_probability,
            "fault_rates": dict(sorted(self.fault_rates.items())),
            "faults": [f.to_json() for f in self.faults],
            "fixed_pages": [p.to_json() for p in self.fixed_pages],
            "hub_pages": self.hub_pages,
            "hub_site": self.hub_site,
            "inject_toolbar": self.inject_toolbar,
            "intra_site_links": list(self.intra_site_links),
            "link_churn": self.link_churn,
            "n_sites": self.n_sites,
            "page_archival_rate": self.page_archival_rate,
            "pages_per_site": list(self.pages_per_site),
            "redirect_max_offset": self.redirect_max_offset,
            "sample_classes": list(self.sample_classes),
            "seed": self.seed,
            "span_days": self.span_days,
            "span_start": _ts(self.span_start),
            "timemap_fault_rates": dict(sorted(self.timemap_fault_rates.items())),
        }

    @staticmethod
    def from_json(obj: Any) -> SimConfig:
        """
        Build a configuration from its JSON form. Missing keys take their
        default values; unknown keys are rejected.
        """
        defaults = SimConfig()
        _check_keys(obj, defaults.to_json().keys())
        try:
            cfg = SimConfig(
                seed=int(obj.get("seed", defaults.seed)),
                n_sites=int(obj.get("n_sites", defaults.n_sites)),
                pages_per_site=_pair(
                    obj.get("pages_per_site", defaults.pages_per_site),
                    "pages_per_site",
                    int,
                ),
                span_start=(
                    _parse_ts(obj["span_start"], "span_start")
                    if "span_start" in obj
                    else defaults.span_start
                ),
                span_days=float(obj.get("span_days", defaults.span_days)),
                crawl_interval_days=float(
                    obj.get("crawl_interval_days", defaults.crawl_interval_days)
                ),
                crawl_jitter_days=float(
                    obj.get("crawl_jitter_days", defaults.crawl_jitter_days)
                ),
                capture_probability=_pair(
                    obj.get("capture_probability", defaults.capture_probability),
                    "capture_probability",
                    float,
                ),
                intra_site_links=_pair(
                    obj.get("intra_site_links", defaults.intra_site_links),
                    "intra_site_links",
                    int,
                ),
                cross_site_link_probability=float(
                    obj.get(
                        "cross_site_link_probability",
                        defaults.cross_site_link_probability,
                    )
                ),
                change_interval_days=float(
                    obj.get("change_interval_days", defaults.change_interval_days)
                ),
                link_churn=float(obj.get("link_churn", defaults.link_churn)),
                sample_classes=[str(c) for c in obj.get("sample_classes", [])],
                archival_rates={
                    str(k): float(v) for k, v in obj.get("archival_rates", {}).items()
                },
                page_archival_rate=float(
                    obj.get("page_archival_rate", defaults.page_archival_rate)
                ),
                hub_site=bool(obj.get("hub_site", defaults.hub_site)),
                hub_pages=int(obj.get("hub_pages", defaults.hub_pages)),
                inject_toolbar=bool(obj.get("inject_toolbar", defaults.inject_toolbar)),
                fault_rates={
                    str(k): float(v) for k, v in obj.get("fault_rates", {}).items()
                },
                timemap_fault_rates={
                    str(k): float(v)
                    for k, v in obj.get("timemap_fault_rates", {}).items()
                },
                redirect_max_offset=int(
                    obj.get("redirect_max_offset", defaults.redirect_max_offset)
                ),
                faults=[FaultSpec.from_json(f) for f in obj.get("faults", [])],
                fixed_pages=[
                    FixedPage.from_json(p) for p in obj.get("fixed_pages", [])
                ],
            )
        except (TypeError, ValueError, AttributeError) as e:
            msg = f"Invalid simulated archive configuration: {e}"
            raise InvalidConfigError(msg) from e
        cfg.validate()
        return cfg

    @staticmethod
    def load(path: PathLike) -> SimConfig:
        """
        Load a configuration from a JSON file.
        """
        with open(path, "r", encoding="utf-8") as f:
            try:
                obj = json.load(f)
            except json.JSONDecodeError as e:
                raise InvalidConfigError(f"{path}: not valid JSON: {e}") from e
        return SimConfig.from_json(obj)


@dataclass(frozen=True)
class LinkEpoch:
    """
    Outlinks of a page from :py:attr:`start` until the next epoch.
    """

    start: datetime
    links: Tuple[OriginalUri, ...]


@dataclass(frozen=True)
class SimPage:
    """
    One page of the simulated corpus.
    """

    uri: OriginalUri

    snapshots: Tuple[datetime, ...]
    """
    Capture datetimes, ascending. Empty for a page that was never archived.
    """

    epochs: Tuple[LinkEpoch, ...] = ()
    """
    Outlinks over time, ascending by start.
    """

    site_wide: bool = False
    """
    The page links to every other page of its site (hub sites).
    """

    sample: bool = False
    sample_class: Optional[str] = None


@dataclass(frozen=True)
class TranscriptEntry:
    """
    One walk step as seen by :py:meth:`SimArchive.oracle_drift`: the URI-Rs
    followed and the target datetimes of both policies.
    """

    r: OriginalUri
    r_ui: OriginalUri
    t_sticky: datetime
    t_sliding: datetime


@dataclass(frozen=True)
class ExpectedDrift:
    """
    Drifts a walk step must report according to the corpus. ``None`` means
    the step is expected to fail on that side.
    """

    drift_api: Optional[Drift]
    drift_ui: Optional[Drift]
    drift_ui_walk: Optional[Drift]


def transcript_of(walk: Walk) -> List[TranscriptEntry]:
    """
    Transcript of the steps of a walk that got as far as selecting
    their target datetimes.
    """
    entries = []
    for s in walk.steps:
        if s.r is None or s.r_ui is None or s.t_sticky is None or s.t_sliding is None:
            continue
        entries.append(TranscriptEntry(s.r, s.r_ui, s.t_sticky, s.t_sliding))
    return entries


class _CorpusGenerator:
    """
    Helper internal class that draws the pages and random faults of
    a simulated corpus. Every page draws from its own generators, seeded by
    the configuration seed, a purpose and the page URI.

    .. warning::
        This class is not intended for direct use.
    """

    def __init__(self, cfg: SimConfig) -> None:
        self._cfg = cfg
        self._sites: List[List[OriginalUri]] = []
        for k in range(cfg.n_sites):
            host = site_host(k)
            if cfg.hub_site and k == 0:
                n = cfg.hub_pages
            else:
                n = self._rng("site", host).randint(*cfg.pages_per_site)
            pages = [f"http://{host}/"]
            pages += [f"http://{host}/page{j:04d}.html" for j in range(1, n)]
            self._sites.append(pages)
        self._crawls = self._crawl_schedule()
        self._epoch_starts = [
            cfg.span_start + timedelta(days=e * cfg.change_interval_days)
            for e in range(int(cfg.span_days // cfg.change_interval_days) + 1)
        ]

    def _rng(self, purpose: str, key: str) -> random.Random:
        return random.Random(f"{self._cfg.seed}:{purpose}:{key}")

    def _crawl_schedule(self) -> List[datetime]:
        cfg = self._cfg
        rng = self._rng("crawl", "schedule")
        crawls = set()
        for k in range(int(cfg.span_days // cfg.crawl_interval_days) + 1):
            days = k * cfg.crawl_interval_days
            if cfg.crawl_jitter_days > 0:
                days += rng.uniform(-cfg.crawl_jitter_days, cfg.crawl_jitter_days)
            seconds = round(max(0.0, days) * SECONDS_PER_DAY)
            crawls.add(cfg.span_start + timedelta(seconds=seconds))
        return sorted(crawls)

    def generate(self) -> Tuple[List[SimPage], List[FaultSpec]]:
        cfg = self._cfg
        pages: List[SimPage] = []
        classes = cfg.sample_classes
        for k, site in enumerate(self._sites):
            sample_class = classes[k % len(classes)] if classes else None
            hub = cfg.hub_site and k == 0
            for j, uri in enumerate(site):
                home = j == 0
                rate = cfg.page_archival_rate
                if home and sample_class is not None:
                    rate = cfg.archival_rates.get(sample_class, rate)
                pages.append(
                    SimPage(
                        uri=uri,
                        snapshots=self._snapshots(uri, rate),
                        epochs=() if hub else self._link_epochs(k, j),
                        site_wide=hub,
                        sample=home,
                        sample_class=sample_class if home else None,
                    )
                )
        faults = self._random_faults(pages)

        for fp in cfg.fixed_pages:
            pages.append(self._fixed_page(fp))
        faults += cfg.faults
        return pages, faults

    def _snapshots(self, uri: OriginalUri, rate: float) -> Tuple[datetime, ...]:
        rng = self._rng("snapshots", uri)
        if rng.random() >= rate:
            return ()
        q = rng.uniform(*self._cfg.capture_probability)
        captures = [c for c in self._crawls if rng.random() < q]
        if not captures:
            captures = [self._crawls[rng.randrange(len(self._crawls))]]
        return tuple(captures)

    def _link_epochs(self, k: int, j: int) -> Tuple[LinkEpoch, ...]:
        uri = self._sites[k][j]
        rng = self._rng("links", uri)
        slots = [
            self._draw_link(rng, k, j)
            for _ in range(rng.randint(*self._cfg.intra_site_links))
        ]
        epochs = []
        for e, start in enumerate(self._epoch_starts):
            if e > 0:
                churn = self._cfg.link_churn
                slots = [
                    self._draw_link(rng, k, j) if rng.random() < churn else s
                    for s in slots
                ]
            links = tuple(dict.fromkeys(s for s in slots if s is not None))
            epochs.append(LinkEpoch(start, links))
        return tuple(epochs)

    def _draw_link(self, rng: random.Random, k: int, j: int) -> Optional[OriginalUri]:
        site = self._sites[k]
        cross = rng.random() < self._cfg.cross_site_link_probability
        if len(site) == 1:
            cross = True
        if cross and len(self._sites) > 1:
            other = rng.randrange(len(self._sites) - 1)
            if other >= k:
                other += 1
            target = self._sites[other]
            # Half of cross-site links point to a home page
            if rng.random() < 0.5:
                return target[0]
            return target[rng.randrange(len(target))]
        if len(site) == 1:
            return None
        other = rng.randrange(len(site) - 1)
        if other >= j:
            other += 1
        return site[other]

    def _random_faults(self, pages: Sequence[SimPage]) -> List[FaultSpec]:
        cfg = self._cfg
        if not cfg.fault_rates and not cfg.timemap_fault_rates:
            return []
        faults = []
        for page in pages:
            if not page.snapshots:
                continue
            rng = self._rng("faults", page.uri)
            kind = self._draw_fault_kind(rng, cfg.timemap_fault_rates)
            if kind is not None:
                faults.append(
                    FaultSpec(page.uri, kind, failures=self._failures(kind))
                )
            for d in page.snapshots:
                kind = self._draw_fault_kind(rng, cfg.fault_rates)
                if kind is None:
                    continue
                offset = -1
                if kind in _REDIRECT_FAULT_KINDS:
                    offset = rng.randint(1, cfg.redirect_max_offset)
                    if rng.random() < 0.5:
                        offset = -offset
                faults.append(
                    FaultSpec(page.uri, kind, d, offset, self._failures(kind))
                )
        return faults

    @staticmethod
    def _failures(kind: SimFaultKind) -> int:
        # Injected 503s outlast the client's single retry
        return -1 if kind is SimFaultKind.HTTP_503 else 1

    @staticmethod
    def _draw_fault_kind(
        rng: random.Random, rates: Dict[str, float]
    ) -> Optional[SimFaultKind]:
        u = rng.random()
        acc = 0.0
        for kind in SimFaultKind:
            acc += rates.get(kind.value, 0.0)
            if u < acc:
                return kind
        return None

    def _fixed_page(self, fp: FixedPage) -> SimPage:
        snapshots = tuple(sorted({to_archive_datetime(d) for d in fp.snapshots}))
        links = tuple(dict.fromkeys(fp.links))
        if fp.snapshot_links:
            by_snapshot = {
                to_archive_datetime(d): ls for d, ls in fp.snapshot_links.items()
            }
            epochs = tuple(
                LinkEpoch(d, tuple(dict.fromkeys(by_snapshot.get(d, links))))
                for d in snapshots
            )
        else:
            start = snapshots[0] if snapshots else self._cfg.span_start
            epochs = (LinkEpoch(start, links),)
        return SimPage(
            uri=fp.uri,
            snapshots=snapshots,
            epochs=epochs,
            sample=fp.sample,
            sample_class=fp.sample_class,
        )


class SimArchive:
    """
    Simulated web archive serving a deterministic synthetic corpus through
    the same request/response contract as :py:class:`py_archive_drift.HttpBackend`.

    Basic usage:

    .. code-block:: python

        archive = SimArchive.generate(SimConfig(seed=42, n_sites=10))
        client = ArchiveClient(archive, "http://sim.archive")
        engine = WalkEngine(client, archive.samples())
        walk = engine.run_walk(seed=1)

    The archive is immutable after it is created, except for the request
    counters of one-shot HTTP 503 faults; it is safe for concurrent use.
    """

    def __init__(
        self,
        pages: Iterable[SimPage],
        faults: Iterable[FaultSpec] = (),
        config: Optional[SimConfig] = None,
    ) -> None:
        self._config = config
        self._pages: Dict[OriginalUri, SimPage] = {}
        self._site_pages: Dict[str, List[OriginalUri]] = {}
        for p in pages:
            if p.uri in self._pages:
                raise InvalidConfigError(f"Duplicate page in corpus: {p.uri}")
            _check_ascending(p.snapshots, f"Snapshots of {p.uri}")
            _check_ascending([e.start for e in p.epochs], f"Link epochs of {p.uri}")
            self._pages[p.uri] = p
            self._site_pages.setdefault(uri_host(p.uri), []).append(p.uri)

        self._faults: Dict[Tuple[OriginalUri, Optional[datetime]], FaultSpec] = {}
        for f in faults:
            key = (f.uri, f.snapshot)
            if key in self._faults:
                raise InvalidConfigError(f"Duplicate fault for {f.uri}")
            self._faults[key] = f

        self._lock = threading.Lock()
        self._hits: Dict[Tuple[OriginalUri, Optional[datetime]], int] = {}

    @staticmethod
    def generate(cfg: SimConfig) -> SimArchive:
        """
        Generate the corpus described by ``cfg``.

        Raises :py:exc:`InvalidConfigError` if the configuration is not valid.
        """
        cfg.validate()
        pages, faults = _CorpusGenerator(cfg).generate()
        archive = SimArchive(pages, faults, cfg)
        logger.info(
            f"Generated simulated archive: {len(archive.pages)} pages, "
            f"{sum(len(p.snapshots) for p in archive.pages)} mementos, "
            f"{len(faults)} faults"
        )
        return archive

    @property
    def config(self) -> Optional[SimConfig]:
        return self._config

    @property
    def pages(self) -> List[SimPage]:
        return list(self._pages.values())

    @property
    def faults(self) -> List[FaultSpec]:
        return list(self._faults.values())

    def page(self, r: OriginalUri) -> SimPage:
        try:
            return self._pages[r]
        except KeyError:
            raise UnknownUriError(r) from None

    def samples(self) -> List[Sample]:
        """
        Pages walks may start from: the home pages of the generated sites
        and the fixed pages marked as samples.
        """
        return [Sample(p.uri, p.sample_class) for p in self._pages.values() if p.sample]

    def timemap(self, r: OriginalUri, archive_base: str) -> TimeMap:
        page = self.page(r)
        return TimeMap(
            original=r,
            mementos=tuple(
                MementoUri(d, self._memento_uri(archive_base, d, r), r)
                for d in page.snapshots
            ),
        )

    def links_at(self, r: OriginalUri, d: datetime) -> Tuple[OriginalUri, ...]:
        """
        Outlinks of page ``r`` as captured at ``d``.
        """
        page = self.page(r)
        if page.site_wide:
            return tuple(u for u in self._site_pages[uri_host(r)] if u != r)
        if not page.epochs:
            return ()
        i = bisect.bisect_right([e.start for e in page.epochs], d) - 1
        return page.epochs[max(i, 0)].links

    def max_snapshot_gap(self) -> timedelta:
        """
        Longest interval between two consecutive captures of any page.
        """
        gap = timedelta(0)
        for p in self._pages.values():
            for a, b in zip(p.snapshots, p.snapshots[1:]):
                gap = max(gap, b - a)
        return gap

    def reset_fault_state(self) -> None:
        """
        Forget the requests counted by one-shot HTTP 503 faults outside of
        walk scopes.
        """
        with self._lock:
            self._hits.clear()

    def get(self, url: str) -> ArchiveResponse:
        return self.serve(url)

    def serve(self, url: str) -> ArchiveResponse:
        """
        Answer one GET request: a link-format TimeMap
        (``<base>/web/timemap/link/<URI-R>``) or a memento
        (``<base>/web/<14 digits>/<URI-R>``). A memento requested at
        a datetime without a capture redirects to the nearest capture
        (the earlier one on a tie).

        Raises :py:exc:`ArchiveTransportError` for injected download failures.
        """
        parts = urlsplit(url)
        base = f"{parts.scheme}://{parts.netloc}"
        rest = url[len(base) :]

        if rest.startswith(TIMEMAP_PATH):
            return self._serve_timemap(url, base, rest[len(TIMEMAP_PATH) :])

        try:
            dt, r = parse_wayback_uri(url, base)
        except NotArchiveUriError:
            return self._status(url, 404)
        return self._serve_memento(url, base, dt, r)

    def _serve_timemap(self, url: str, base: str, raw: str) -> ArchiveResponse:
        try:
            r = normalize_uri(raw)
        except MalformedUriError:
            return self._status(url, 404)

        fault = self._faults.get((r, None))
        if fault is not None:
            injected = self._injected(url, fault)
            if injected is not None:
                return injected

        page = self._pages.get(r)
        if page is None or not page.snapshots:
            return self._status(url, 404)

        body = _TimeMapParser.format_timemap(self.timemap(r, base), self_uri=url)
        return ArchiveResponse(
            url, 200, {"content-type": "application/link-format"}, body.encode()
        )

    def _serve_memento(
        self, url: str, base: str, dt: datetime, r: OriginalUri
    ) -> ArchiveResponse:
        page = self._pages.get(r)
        if page is None or not page.snapshots:
            return self._status(url, 404)

        j = self._nearest_index(page.snapshots, dt)
        if page.snapshots[j] != dt:
            return self._redirect(url, self._memento_uri(base, page.snapshots[j], r))

        fault = self._faults.get((r, dt))
        if fault is not None:
            injected = self._injected(url, fault)
            if injected is not None:
                return injected
            if fault.kind in _REDIRECT_FAULT_KINDS:
                last = len(page.snapshots) - 1
                target_j = min(max(j + fault.redirect_offset, 0), last)
                if target_j != j:
                    target = self._memento_uri(base, page.snapshots[target_j], r)
                    if fault.kind is SimFaultKind.REDIRECT:
                        return self._redirect(url, target)
                    return self._html(url, self._render_soft_redirect(target))

        return self._html(url, self._render_page(base, page, dt))

    def _injected(self, url: str, fault: FaultSpec) -> Optional[ArchiveResponse]:
        kind = fault.kind
        if kind is SimFaultKind.HTTP_503:
            key = (fault.uri, fault.snapshot)
            state = walk_state()
            if state is not None:
                # A walk scope is confined to one thread
                walk_key = (id(self), key)
                hits = state.get(walk_key, 0) + 1
                state[walk_key] = hits
            else:
                with self._lock:
                    hits = self._hits.get(key, 0) + 1
                    self._hits[key] = hits
            if fault.failures != -1 and hits > fault.failures:
                return None
            return self._status(url, 503)
        if kind is SimFaultKind.HTTP_403:
            return self._status(url, 403)
        if kind is SimFaultKind.HTTP_404:
            return self._status(url, 404)
        if kind is SimFaultKind.OTHER:
            return self._status(url, 500)
        if kind is SimFaultKind.DOWNLOAD_FAILED:
            raise ArchiveTransportError(url, "connection reset by peer")
        if kind is SimFaultKind.NOT_HTML:
            return ArchiveResponse(url, 200, {"content-type": "image/gif"}, _GIF_BYTES)
        return None

    @staticmethod
    def _nearest_index(snapshots: Sequence[datetime], dt: datetime) -> int:
        i = bisect.bisect_left(snapshots, dt)
        if i == 0:
            return 0
        if i == len(snapshots):
            return i - 1
        if dt - snapshots[i - 1] <= snapshots[i] - dt:
            return i - 1
        return i

    @staticmethod
    def _memento_uri(base: str, dt: datetime, r: OriginalUri) -> str:
        return f"{base.rstrip('/')}/web/{_ts(dt)}/{r}"

    @staticmethod
    def _status(url: str, status: int) -> ArchiveResponse:
        body = f"<html><body><h1>HTTP {status}</h1></body></html>".encode()
        return ArchiveResponse(url, status, {"content-type": "text/html"}, body)

    @staticmethod
    def _redirect(url: str, location: str) -> ArchiveResponse:
        return ArchiveResponse(
            url, 302, {"location": location, "content-type": "text/html"}, b""
        )

    @staticmethod
    def _html(url: str, body: str) -> ArchiveResponse:
        return ArchiveResponse(
            url, 200, {"content-type": "text/html; charset=utf-8"}, body.encode()
        )

    @staticmethod
    def _render_soft_redirect(target: str) -> str:
        return (
            "<!DOCTYPE html>\n<html><head><title>Redirecting</title></head><body>\n"
            "<p>Got an HTTP 302 response at crawl time.</p>\n"
            '<script type="text/javascript">'
            f"window.location.replace({json.dumps(target)});</script>\n"
            "</body></html>\n"
        )

    def _render_page(self, base: str, page: SimPage, dt: datetime) -> str:
        ts = _ts(dt)
        host = uri_host(page.uri)
        items = []
        for link in self.links_at(page.uri, dt):
            # The archive rewrites same-site links as host-relative ones
            if uri_host(link) == host:
                href = f"/web/{ts}/{link}"
            else:
                href = self._memento_uri(base, dt, link)
            text = html.escape(link)
            items.append(f'<li><a href="{html.escape(href)}">{text}</a></li>')

        toolbar = ""
        if self._config is not None and self._config.inject_toolbar:
            toolbar = self._render_toolbar(base, page, dt)

        title = html.escape(f"{page.uri} ({ts})")
        return (
            "<!DOCTYPE html>\n<html><head>"
            f"<title>{title}</title></head><body>\n"
            f"{toolbar}<h1>{html.escape(page.uri)}</h1>\n<ul>\n"
            + "\n".join(items)
            + "\n</ul>\n</body></html>\n"
        )

    def _render_toolbar(self, base: str, page: SimPage, dt: datetime) -> str:
        j = page.snapshots.index(dt)
        nav = [f'<a href="{html.escape(base)}/">Archive home</a>']
        for label, k in (("Previous capture", j - 1), ("Next capture", j + 1)):
            if 0 <= k < len(page.snapshots):
                href = self._memento_uri(base, page.snapshots[k], page.uri)
                nav.append(f'<a href="{html.escape(href)}">{label}</a>')
        return (
            f"<!-- {TOOLBAR_BEGIN_MARKER} -->\n"
            f'<div id="wm-ipp">{" ".join(nav)}</div>\n'
            f"<!-- {TOOLBAR_END_MARKER} -->\n"
        )

    def oracle_drift(
        self, transcript: Sequence[TranscriptEntry]
    ) -> List[ExpectedDrift]:
        """
        Compute the drifts each step of a walk must report, by scanning the
        corpus directly: the nearest capture to the target datetime
        (the earlier one on a tie), then the capture that injected redirects
        lead to -- hard ones for the Sticky Target side, hard and soft ones
        for the Sliding Target side.

        One-shot HTTP 503 faults are assumed to be absorbed by the client's
        retry; permanent faults of any kind make the side fail.

        Raises :py:exc:`UnknownUriError` for a URI-R outside the corpus.
        """
        expected = []
        for entry in transcript:
            api = self._oracle_final(entry.r, entry.t_sticky, follow_soft=False)
            ui = self._oracle_final(entry.r_ui, entry.t_sliding, follow_soft=True)
            if self._oracle_timemap_fails(entry.r):
                api = ui = None
            expected.append(
                ExpectedDrift(
                    drift_api=_abs_drift(entry.t_sticky, api),
                    drift_ui=_abs_drift(entry.t_sliding, ui),
                    drift_ui_walk=_abs_drift(entry.t_sticky, ui),
                )
            )
        return expected

    def _oracle_timemap_fails(self, r: OriginalUri) -> bool:
        page = self.page(r)
        if not page.snapshots:
            return True
        fault = self._faults.get((r, None))
        return fault is not None and not self._oracle_transient(fault)

    @staticmethod
    def _oracle_transient(fault: FaultSpec) -> bool:
        return fault.kind is SimFaultKind.HTTP_503 and fault.failures != -1

    def _oracle_final(
        self, r: OriginalUri, t: datetime, follow_soft: bool
    ) -> Optional[datetime]:
        page = self.page(r)
        if not page.snapshots:
            return None

        best = page.snapshots[0]
        for d in page.snapshots:
            if abs(d - t) < abs(best - t):
                best = d

        hops = 0 if best == t else 1
        current = best
        while True:
            fault = self._faults.get((r, current))
            if fault is None or self._oracle_transient(fault):
                return current
            if fault.kind not in _REDIRECT_FAULT_KINDS:
                return None
            if fault.kind is SimFaultKind.SOFT_REDIRECT and not follow_soft:
                return current

            j = page.snapshots.index(current)
            k = min(max(j + fault.redirect_offset, 0), len(page.snapshots) - 1)
            if k == j:
                return current
            hops += 1
            if hops > ORACLE_REDIRECT_LIMIT:
                return None
            current = page.snapshots[k]

    def to_json(self) -> Dict[str, Any]:
        """
        Complete description of the corpus, loadable by :py:meth:`from_json`.
        """
        pages = []
        for p in self._pages.values():
            pages.append(
                {
                    "epochs": [
                        {"links": list(e.links), "start": _ts(e.start)}
                        for e in p.epochs
                    ],
                    "sample": p.sample,
                    "sample_class": p.sample_class,
                    "site_wide": p.site_wide,
                    "snapshots": [_ts(d) for d in p.snapshots],
                    "uri": p.uri,
                }
            )
        return {
            "config": self._config.to_json() if self._config is not None else None,
            "faults": [f.to_json() for f in self._faults.values()],
            "format": CORPUS_FORMAT,
            "pages": pages,
            "version": CORPUS_VERSION,
        }

    @staticmethod
    def from_json(obj: Any) -> SimArchive:
        _check_keys(obj, {"config", "faults", "format", "pages", "version"})
        if obj.get("format") != CORPUS_FORMAT:
            raise InvalidConfigError("Not a simulated archive description")
        if obj.get("version") != CORPUS_VERSION:
            version = obj.get("version")
            raise InvalidConfigError(f"Unsupported corpus version: {version!r}")

        config = SimConfig.from_json(obj["config"]) if obj.get("config") else None
        try:
            pages = [
                SimPage(
                    uri=_normalize(p["uri"], "Page URI"),
                    snapshots=tuple(
                        _parse_ts(d, "Page snapshot") for d in p["snapshots"]
                    ),
                    epochs=tuple(
                        LinkEpoch(
                            _parse_ts(e["start"], "Epoch start"), tuple(e["links"])
                        )
                        for e in p["epochs"]
                    ),
                    site_wide=bool(p["site_wide"]),
                    sample=bool(p["sample"]),
                    sample_class=p["sample_class"],
                )
                for p in obj.get("pages", [])
            ]
        except (KeyError, TypeError) as e:
            raise InvalidConfigError(f"Invalid page description: {e}") from e
        faults = [FaultSpec.from_json(f) for f in obj.get("faults", [])]
        return SimArchive(pages, faults, config)

    def save(self, path: PathLike) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(_canonical_json(self.to_json()) + "\n")

    @staticmethod
    def load(path: PathLike) -> SimArchive:
        """
        Load a corpus saved by :py:meth:`save`.
        """
        with open(path, "r", encoding="utf-8") as f:
            try:
                obj = json.load(f)
            except json.JSONDecodeError as e:
                raise InvalidConfigError(f"{path}: not valid JSON: {e}") from e
        return SimArchive.from_json(obj)

    @property
    def corpus_hash(self) -> str:
        """
        SHA-256 of the canonical JSON description of the corpus.
        """
        return hashlib.sha256(_canonical_json(self.to_json()).encode()).hexdigest()


def _canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _check_ascending(values: Sequence[datetime], what: str) -> None:
    if any(a >= b for a, b in zip(values, values[1:])):
        raise InvalidConfigError(f"{what} are not in strictly ascending order")


def _abs_drift(target: datetime, obtained: Optional[datetime]) -> Optional[Drift]:
    if obtained is None:
        return None
    return Drift(abs(int((target - obtained).total_seconds())))
