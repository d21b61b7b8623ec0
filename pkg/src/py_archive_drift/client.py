# SPDX-License-Identifier: MIT

import logging
import re
import time
from dataclasses import dataclass, replace
from datetime import datetime
from typing import Callable, List, NoReturn, Optional
from urllib.parse import urljoin

from bs4 import BeautifulSoup, Tag

from .backend import ArchiveBackend, ArchiveResponse
from .errors import (
    ArchiveFetchError,
    ArchiveTransportError,
    NotArchiveUriError,
    _LinkFormatParsingError,
)
from .memento import DEFAULT_ARCHIVE_BASE, best_memento, memento_from_uri
from .timemap_parser import _TimeMapParser
from .types import (
    DereferenceChain,
    FetchKind,
    FetchOutcome,
    Hop,
    HopKind,
    MementoUri,
    OriginalUri,
    TimeMap,
)

logger = logging.getLogger(__name__)

_REDIRECT_STATUSES = (301, 302, 303, 307, 308)

_STATUS_KINDS = {
    200: FetchKind.SUCCESS,
    403: FetchKind.HTTP_403,
    404: FetchKind.HTTP_404,
    503: FetchKind.HTTP_503,
}

# location = "..."; window.location.href = '...'; location.replace("...")
_SCRIPT_REDIRECT_RES = [
    re.compile(
        r"""(?:window\.|document\.|top\.|self\.)?location(?:\.href)?"""
        r"""\s*=\s*["']([^"']+)["']"""
    ),
    re.compile(r"""location\.(?:replace|assign)\(\s*["']([^"']+)["']\s*\)"""),
]
_META_REFRESH_URL_RE = re.compile(r"""url\s*=\s*["']?([^"'\s;]+)""", re.IGNORECASE)

_HTML_SNIFF_TOKENS = (b"<html", b"<!doctype")


@dataclass(frozen=True)
class ClientConfig:
    """
    Settings of :py:class:`ArchiveClient`.
    """

    redirect_limit: int = 10
    """
    Maximum number of redirects (hard and soft combined) per dereference.
    """

    retry_delay: float = 1.0
    """
    Delay (seconds) before the single retry of a 503 response.
    """

    retry_download_failures: bool = True
    """
    Whether failed downloads are also retried once, like 503 responses.
    """

    follow_script_redirects: bool = True
    """
    Detect soft redirects made by a script assigning the location.
    """

    follow_meta_refresh: bool = True
    """
    Detect soft redirects made by ``<meta http-equiv="refresh">``.
    """

    def __post_init__(self) -> None:
        if self.redirect_limit < 0:
            raise ValueError("Redirect limit must not be negative")
        if self.retry_delay < 0:
            raise ValueError("Retry delay must not be negative")


class ArchiveClient:
    """
    Client of a Memento-compliant web archive with Wayback-style URI-Ms.

    It fetches TimeMaps and dereferences mementos through a pluggable
    backend -- :py:class:`py_archive_drift.HttpBackend` for a real archive or
    :py:class:`py_archive_drift.SimArchive` for the built-in simulated one.
    Redirects are followed by the client itself so that every hop is recorded.

    Failures are reported by :py:exc:`ArchiveFetchError`, whose ``outcome``
    classifies them (HTTP 403/404/503, download failed, not HTML, other).

    Basic usage:

    .. code-block:: python

        client = ArchiveClient(SimArchive.generate(SimConfig()), "http://sim.archive")
        tm = client.fetch_timemap("http://site000.sim/")
        chain = client.dereference_sticky(tm.original, tm.mementos[0].datetime, tm)
        print(chain.final.datetime)

    The client is safe for concurrent use by multiple walks.
    """

    TIMEMAP_PATH = "/web/timemap/link/"

    def __init__(
        self,
        backend: ArchiveBackend,
        archive_base: str = DEFAULT_ARCHIVE_BASE,
        config: Optional[ClientConfig] = None,
    ) -> None:
        self._backend = backend
        self._archive_base = archive_base.rstrip("/")
        self._config = config if config is not None else ClientConfig()

    @property
    def archive_base(self) -> str:
        return self._archive_base

    @property
    def config(self) -> ClientConfig:
        return self._config

    def timemap_uri(self, r: OriginalUri) -> str:
        """
        URI of the link-format TimeMap of ``r``.
        """
        return self._archive_base + self.TIMEMAP_PATH + r

    def fetch_timemap(self, r: OriginalUri) -> TimeMap:
        """
        Download and parse the TimeMap of ``r``.

        Raises :py:exc:`ArchiveFetchError` on failure. HTTP 404 means that
        the URI-R is not archived. A TimeMap that cannot be parsed or lists
        no mementos is classified as "Other".
        """
        url = self.timemap_uri(r)
        hops = 0
        while True:
            outcome = self._fetch(url)
            location = self._redirect_location(outcome)
            if location is None:
                break
            hops += 1
            self._check_hop_limit(outcome, hops)
            url = location

        if outcome.kind.is_failure:
            raise ArchiveFetchError(replace(outcome, redirect_hops=hops))

        text = (outcome.body or b"").decode("utf-8", errors="replace")
        try:
            tm = _TimeMapParser.parse_timemap(text, requested=r)
        except _LinkFormatParsingError as e:
            self._fail(outcome, FetchKind.OTHER, hops, f"Invalid TimeMap: {e}")

        if len(tm) == 0:
            self._fail(outcome, FetchKind.OTHER, hops, "TimeMap lists no mementos")

        logger.debug(f"TimeMap of {r}: {len(tm)} mementos")
        return tm

    def dereference_sticky(
        self, r: OriginalUri, t1: datetime, tm: TimeMap
    ) -> DereferenceChain:
        """
        Dereference the memento of ``r`` nearest to ``t1`` -- the Sticky
        Target policy. Only hard (HTTP 3xx) redirects are followed, so the
        final memento's datetime may still differ from the selected one.

        Raises :py:exc:`ArchiveFetchError` on failure.
        """
        selected = best_memento(tm, t1)
        if tm.original != r:
            # Live archives may canonicalize the URI-R differently
            logger.debug(f"TimeMap of {r} names its original as {tm.original}")
        return self._dereference(selected, follow_soft=False)

    def dereference_sliding(self, m: MementoUri) -> DereferenceChain:
        """
        Dereference a Wayback-style URI-M the way the archive's user interface
        does -- the Sliding Target policy. Both hard redirects and soft redirects
        (HTTP 200 pages that redirect by a script or a meta refresh) are followed.

        Raises :py:exc:`ArchiveFetchError` on failure.
        """
        return self._dereference(m, follow_soft=True)

    def retry_503(
        self, outcome: FetchOutcome, op: Callable[[], FetchOutcome]
    ) -> FetchOutcome:
        """
        Retry a request exactly once, after the configured delay, if it
        ended with HTTP 503 (or with a failed download, unless disabled
        in the configuration). The result of the retry is final.

        Other outcomes are returned unchanged.
        """
        retryable = [FetchKind.HTTP_503]
        if self._config.retry_download_failures:
            retryable.append(FetchKind.DOWNLOAD_FAILED)
        if outcome.kind not in retryable or outcome.retried:
            return outcome

        logger.warning(
            f"{outcome.kind.label} for {outcome.url}, "
            f"retrying in {self._config.retry_delay} s"
        )
        if self._config.retry_delay > 0:
            time.sleep(self._config.retry_delay)
        return replace(op(), retried=True)

    def _dereference(
        self, requested: MementoUri, follow_soft: bool
    ) -> DereferenceChain:
        url = requested.uri
        hops: List[Hop] = []

        while True:
            outcome = self._fetch(url)

            location = self._redirect_location(outcome)
            if location is not None:
                hops.append(Hop(location, HopKind.HARD))
                logger.debug(f"Hard redirect: {url} -> {location}")
                self._check_hop_limit(outcome, len(hops))
                url = location
                continue

            if outcome.kind.is_failure:
                raise ArchiveFetchError(replace(outcome, redirect_hops=len(hops)))

            body = outcome.body or b""
            if not self._is_html(outcome):
                self._fail(outcome, FetchKind.NOT_HTML, len(hops), "Not HTML content")

            if follow_soft:
                target = self._soft_redirect_target(url, body)
                if target is not None:
                    hops.append(Hop(target, HopKind.SOFT))
                    logger.debug(f"Soft redirect: {url} -> {target}")
                    self._check_hop_limit(outcome, len(hops))
                    url = target
                    continue

            try:
                final = memento_from_uri(url, self._archive_base)
            except NotArchiveUriError:
                self._fail(
                    outcome, FetchKind.OTHER, len(hops), "Final URI is not a URI-M"
                )
            return DereferenceChain(
                requested=requested, hops=tuple(hops), final=final, body=body
            )

    def _fetch(self, url: str) -> FetchOutcome:
        outcome = self._fetch_once(url)
        return self.retry_503(outcome, lambda: self._fetch_once(url))

    def _fetch_once(self, url: str) -> FetchOutcome:
        try:
            resp = self._backend.get(url)
        except ArchiveTransportError as e:
            logger.debug(f"Download failed: {url}: {e}")
            return FetchOutcome(kind=FetchKind.DOWNLOAD_FAILED, url=url, message=str(e))
        return self._classify(resp)

    @staticmethod
    def _classify(resp: ArchiveResponse) -> FetchOutcome:
        kind = _STATUS_KINDS.get(resp.status, FetchKind.OTHER)
        message = "" if kind is not FetchKind.OTHER else f"HTTP status {resp.status}"
        return FetchOutcome(
            kind=kind,
            url=resp.url,
            status=resp.status,
            headers=dict(resp.headers),
            body=resp.body,
            message=message,
        )

    @staticmethod
    def _redirect_location(outcome: FetchOutcome) -> Optional[str]:
        if outcome.status not in _REDIRECT_STATUSES:
            return None
        location = outcome.headers.get("location")
        if not location:
            # A 3xx without a target remains classified as "Other"
            return None
        return urljoin(outcome.url, location.strip())

    @staticmethod
    def _is_html(outcome: FetchOutcome) -> bool:
        content_type = outcome.headers.get("content-type")
        if content_type is not None and content_type.strip().lower().startswith(
            "text/html"
        ):
            return True
        head = (outcome.body or b"").lstrip()[:32].lower()
        return head.startswith(_HTML_SNIFF_TOKENS)

    def _soft_redirect_target(self, url: str, body: bytes) -> Optional[str]:
        """
        Find the first script or meta-refresh redirect in the page whose
        target is a URI-M.
        """
        config = self._config
        if not (config.follow_script_redirects or config.follow_meta_refresh):
            return None

        soup = BeautifulSoup(body, "html.parser")
        for element in soup.find_all(["script", "meta"]):
            if not isinstance(element, Tag):
                continue
            candidates: List[str] = []
            if element.name == "script" and self._config.follow_script_redirects:
                text = element.string or ""
                for regex in _SCRIPT_REDIRECT_RES:
                    candidates += [m[1] for m in regex.finditer(text)]
            elif element.name == "meta" and self._config.follow_meta_refresh:
                http_equiv = element.get("http-equiv")
                content = element.get("content")
                if (
                    isinstance(http_equiv, str)
                    and http_equiv.strip().lower() == "refresh"
                    and isinstance(content, str)
                ):
                    match = _META_REFRESH_URL_RE.search(content)
                    if match is not None:
                        candidates.append(match[1])

            for candidate in candidates:
                target = urljoin(url, candidate.strip())
                try:
                    memento_from_uri(target, self._archive_base)
                except NotArchiveUriError:
                    continue
                return target
        return None

    def _check_hop_limit(self, outcome: FetchOutcome, hops: int) -> None:
        if hops > self._config.redirect_limit:
            self._fail(outcome, FetchKind.OTHER, hops, "Redirect limit exceeded")

    @staticmethod
    def _fail(
        outcome: FetchOutcome, kind: FetchKind, hops: int, message: str
    ) -> NoReturn:
        raise ArchiveFetchError(
            replace(outcome, kind=kind, redirect_hops=hops, message=message)
        )
