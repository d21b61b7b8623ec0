# SPDX-License-Identifier: MIT

from __future__ import annotations

import logging
import threading
import time
from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Optional, Protocol, Type

import requests

from .errors import ArchiveTransportError
from .uri import uri_host

logger = logging.getLogger(__name__)

_walk_state: ContextVar[Optional[Dict[Any, Any]]] = ContextVar(
    "walk_state", default=None
)


@dataclass(frozen=True)
class ArchiveResponse:
    """
    One HTTP response as seen by :py:class:`py_archive_drift.ArchiveClient`.
    Redirects are never followed by the backend itself.
    """

    url: str
    status: int
    headers: Dict[str, str] = field(default_factory=dict)
    """
    Response headers. Names are lower-case.
    """
    body: bytes = b""

    def header(self, name: str) -> Optional[str]:
        return self.headers.get(name.lower())


class ArchiveBackend(Protocol):
    """
    Contract shared by the live HTTP backend and the simulated archive:
    perform a GET request of one URL and return the response without
    following redirects.

    Raise :py:exc:`ArchiveTransportError` if nothing could be downloaded.
    """

    def get(self, url: str) -> ArchiveResponse: ...


@contextmanager
def walk_scope() -> Iterator[None]:
    """
    Treat the requests made inside the block (in the current thread) as one
    walk. Backends that remember earlier requests, like the transient faults
    of :py:class:`py_archive_drift.SimArchive`, keep that memory per walk
    while a scope is active.
    """
    token = _walk_state.set({})
    try:
        yield
    finally:
        _walk_state.reset(token)


def walk_state() -> Optional[Dict[Any, Any]]:
    """
    Per-walk state of the innermost active :py:func:`walk_scope`,
    ``None`` outside of any scope.
    """
    return _walk_state.get()


class HostRateLimiter:
    """
    Enforce a minimum delay between consecutive requests to the same host.
    Safe for use by multiple threads.
    """

    def __init__(self, min_interval: float) -> None:
        if min_interval < 0:
            raise ValueError("Minimum interval must not be negative")
        self._min_interval = min_interval
        self._lock = threading.Lock()
        self._host_locks: Dict[str, threading.Lock] = {}
        self._last_request: Dict[str, float] = {}

    @property
    def min_interval(self) -> float:
        return self._min_interval

    def _host_lock(self, host: str) -> threading.Lock:
        with self._lock:
            if host not in self._host_locks:
                self._host_locks[host] = threading.Lock()
            return self._host_locks[host]

    def wait(self, host: str) -> None:
        """
        Block until a request to ``host`` is allowed.
        """
        if self._min_interval == 0:
            return
        with self._host_lock(host):
            last = self._last_request.get(host)
            if last is not None:
                remaining = last + self._min_interval - time.monotonic()
                if remaining > 0:
                    logger.debug(f"Rate limiting {host}: sleeping {remaining:.2f}s")
                    time.sleep(remaining)
            self._last_request[host] = time.monotonic()


class HttpBackend:
    """
    Backend that talks HTTP/1.1 to a real archive (or to a
    :py:class:`py_archive_drift.sim_server.SimArchiveServer`).

    Usage as a context manager closes the underlying HTTP session:

    .. code-block:: python

        with HttpBackend(politeness_delay=1.0) as backend:
            client = ArchiveClient(backend, "http://web.archive.org")
            tm = client.fetch_timemap("http://www.cs.odu.edu/")

    """

    DEFAULT_USER_AGENT = "PyArchiveDrift/0.1"

    # Timeout for one request (seconds)
    DEFAULT_TIMEOUT = 30.0

    # Safety limit of the downloaded content size
    MAX_BODY_SIZE = 16 * 1024 * 1024

    # Size of the pieces the body is downloaded in (bytes)
    CHUNK_SIZE = 64 * 1024

    def __init__(
        self,
        user_agent: str = DEFAULT_USER_AGENT,
        timeout: float = DEFAULT_TIMEOUT,
        politeness_delay: float = 1.0,
        session: Optional[requests.Session] = None,
    ) -> None:
        if timeout <= 0:
            raise ValueError("Timeout must be greater than zero")
        self._user_agent = user_agent
        self._timeout = timeout
        self._limiter = HostRateLimiter(politeness_delay)
        self._session = session if session is not None else requests.Session()

    def get(self, url: str) -> ArchiveResponse:
        self._limiter.wait(uri_host(url))
        logger.debug(f"GET {url}")
        try:
            resp = self._session.get(
                url,
                headers={"User-Agent": self._user_agent},
                allow_redirects=False,
                timeout=self._timeout,
                stream=True,
            )
            try:
                body = self._read_body(url, resp)
            finally:
                resp.close()
        except requests.RequestException as e:
            raise ArchiveTransportError(url, str(e)) from e

        return ArchiveResponse(
            url=url,
            status=resp.status_code,
            headers={k.lower(): v for k, v in resp.headers.items()},
            body=body,
        )

    def _read_body(self, url: str, resp: requests.Response) -> bytes:
        """
        Download the body, giving up as soon as it exceeds
        :py:attr:`MAX_BODY_SIZE`.
        """
        too_large = ArchiveTransportError(
            url, f"response exceeds {self.MAX_BODY_SIZE} bytes"
        )
        declared = resp.headers.get("Content-Length")
        if declared is not None and declared.isdigit():
            if int(declared) > self.MAX_BODY_SIZE:
                raise too_large

        chunks: List[bytes] = []
        size = 0
        for chunk in resp.iter_content(chunk_size=self.CHUNK_SIZE):
            size += len(chunk)
            if size > self.MAX_BODY_SIZE:
                raise too_large
            chunks.append(chunk)
        return b"".join(chunks)

    def close(self) -> None:
        self._session.close()

    def __enter__(self) -> HttpBackend:
        return self

    def __exit__(
        self,
        exc_type: Optional[Type[BaseException]],
        exc_val: Optional[BaseException],
        exc_tb: Optional[Type[Any]],
    ) -> None:
        self.close()
