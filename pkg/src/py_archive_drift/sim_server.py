# SPDX-License-Identifier: MIT

from __future__ import annotations

import logging
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Any, Optional, Type

from .errors import ArchiveTransportError
from .sim import SimArchive

logger = logging.getLogger(__name__)


class _SimRequestHandler(BaseHTTPRequestHandler):
    """
    Helper internal class that answers HTTP requests from a :py:class:`SimArchive`.

    .. warning::
        This class is not intended for direct use.
    """

    protocol_version = "HTTP/1.1"

    def __init__(self, *args: Any, archive: SimArchive, base: str) -> None:
        self._archive = archive
        self._base = base
        super().__init__(*args)

    def do_GET(self) -> None:
        url = self._base + self.path
        try:
            resp = self._archive.serve(url)
        except ArchiveTransportError:
            # Injected download failure: drop the connection without a response
            logger.debug(f"Dropping connection for {url}")
            self.close_connection = True
            return

        self.send_response(resp.status)
        for name, value in resp.headers.items():
            self.send_header(name, value)
        self.send_header("Content-Length", str(len(resp.body)))
        self.end_headers()
        self.wfile.write(resp.body)

    def log_message(self, format: str, *args: Any) -> None:
        logger.debug("%s - " + format, self.address_string(), *args)


class SimArchiveServer:
    """
    Loopback HTTP server exposing a :py:class:`SimArchive`, so that the
    simulated archive can be reached over real sockets
    (for instance by :py:class:`py_archive_drift.HttpBackend`).

    .. code-block:: python

        with SimArchiveServer(archive) as server:
            with HttpBackend(politeness_delay=0) as backend:
                client = ArchiveClient(backend, server.base_url)
                tm = client.fetch_timemap("http://site000.sim/")

    Port 0 (the default) selects a free port.
    """

    # Interval (seconds) of checking for a shutdown request
    POLL_INTERVAL = 0.05

    def __init__(self, archive: SimArchive, host: str = "127.0.0.1", port: int = 0):
        if port < 0 or port > 65535:
            raise ValueError("Invalid port number")
        self._archive = archive
        self._host = host
        self._port = port
        self._httpd: Optional[ThreadingHTTPServer] = None
        self._thread: Optional[threading.Thread] = None

    @property
    def base_url(self) -> str:
        """
        Archive base URI of the running server (``http://127.0.0.1:<port>``).
        """
        if self._httpd is None:
            raise RuntimeError("Server is not running")
        host, port = self._httpd.server_address[:2]
        return f"http://{host}:{port}"

    def start(self) -> None:
        if self._httpd is not None:
            raise RuntimeError("Server is already running")

        def create_handler(*args: Any) -> _SimRequestHandler:
            return _SimRequestHandler(*args, archive=self._archive, base=self.base_url)

        httpd = ThreadingHTTPServer((self._host, self._port), create_handler)
        httpd.daemon_threads = True
        self._httpd = httpd

        self._thread = threading.Thread(
            target=httpd.serve_forever,
            kwargs={"poll_interval": self.POLL_INTERVAL},
            name="sim-archive-server",
            daemon=True,
        )
        self._thread.start()
        logger.info(f"Simulated archive listening on {self.base_url}")

    def stop(self) -> None:
        if self._httpd is None:
            return
        self._httpd.shutdown()
        self._httpd.server_close()
        if self._thread is not None:
            self._thread.join()
        self._httpd = None
        self._thread = None

    def __enter__(self) -> SimArchiveServer:
        self.start()
        return self

    def __exit__(
        self,
        exc_type: Optional[Type[BaseException]],
        exc_val: Optional[BaseException],
        exc_tb: Optional[Type[Any]],
    ) -> None:
        self.stop()
