# SPDX-License-Identifier: MIT

from typing import Optional

from .types import FetchOutcome


class ArchiveDriftBaseException(Exception):
    """
    Base exception class for all exceptions of PyArchiveDrift.
    """

    pass


class MalformedDatetimeError(ArchiveDriftBaseException):
    """
    Exception which denotes that a datetime string could not be decoded --
    for instance a 14-digit archive datetime of a wrong length or with
    an invalid calendar value (month 13, February 30, ...).
    """

    def __init__(self, value: str, reason: str = ""):
        self._value = value
        msg = f"Malformed archive datetime: {value!r}"
        if reason:
            msg += f" ({reason})"
        super().__init__(msg)

    @property
    def value(self) -> str:
        """
        The string that could not be decoded.
        """
        return self._value


class MalformedUriError(ArchiveDriftBaseException):
    """
    Exception raised when a string is not an absolute URI that could be
    normalized (scheme or host missing, invalid port, ...).
    """

    def __init__(self, uri: str, reason: str = ""):
        self._uri = uri
        msg = f"Malformed URI: {uri!r}"
        if reason:
            msg += f" ({reason})"
        super().__init__(msg)

    @property
    def uri(self) -> str:
        """
        The offending URI.
        """
        return self._uri


class NotArchiveUriError(ArchiveDriftBaseException):
    """
    Exception raised when a URI does not have the form of an archive URI-M
    (``<archive>/web/<14 digits>/<URI-R>``).

    Callers typically react by treating the URI as a live-web URI-R.
    """

    def __init__(self, uri: str):
        self._uri = uri
        super().__init__(f"Not an archive URI: {uri!r}")

    @property
    def uri(self) -> str:
        """
        The URI that did not match the archive pattern.
        """
        return self._uri


class EmptyTimeMapError(ArchiveDriftBaseException):
    """
    Exception raised when a memento is to be selected from a TimeMap
    that contains no mementos.
    """

    def __init__(self, original: str):
        self._original = original
        super().__init__(f"TimeMap of {original} contains no mementos")

    @property
    def original(self) -> str:
        """
        URI-R of the empty TimeMap.
        """
        return self._original


class ArchiveFetchError(ArchiveDriftBaseException):
    """
    Exception which denotes that fetching a TimeMap or dereferencing
    a memento did not succeed. The reason is classified by the attached
    :py:class:`py_archive_drift.FetchOutcome`.

    Example of use:

    .. code-block:: python

        try:
            tm = client.fetch_timemap("http://www.cs.odu.edu/")
        except ArchiveFetchError as e:
            print(f"Not available: {e.outcome.kind.label}")

    """

    def __init__(self, outcome: FetchOutcome):
        assert outcome.kind.is_failure
        self._outcome = outcome
        msg = f"Fetch failed: {outcome.url} ({outcome.kind.label})"
        if outcome.message:
            msg += f": {outcome.message}"
        super().__init__(msg)

    @property
    def outcome(self) -> FetchOutcome:
        """
        Classified outcome of the failed fetch.
        """
        return self._outcome


class ArchiveTransportError(ArchiveDriftBaseException):
    """
    Exception raised by archive backends when the resource could not be
    downloaded at all (connection refused, timeout, broken transfer, ...).

    :py:class:`py_archive_drift.ArchiveClient` classifies it as
    "Download failed".
    """

    def __init__(self, url: str, reason: str):
        self._url = url
        super().__init__(f"Could not download {url}: {reason}")

    @property
    def url(self) -> str:
        """
        URL whose download failed.
        """
        return self._url


class RelaxedPairExhaustedError(ArchiveDriftBaseException):
    """
    Exception raised when the relaxed link selection has no unused link
    on at least one of the two sides.
    """

    pass


class InvalidConfigError(ArchiveDriftBaseException):
    """
    Exception that denotes an invalid configuration -- a simulated archive
    configuration or a run configuration.
    """

    pass


class UnknownUriError(ArchiveDriftBaseException):
    """
    Exception raised when a simulated archive is asked about a URI-R
    that is not part of its corpus.
    """

    def __init__(self, uri: str):
        self._uri = uri
        super().__init__(f"URI-R is not part of the simulated corpus: {uri}")

    @property
    def uri(self) -> str:
        """
        The unknown URI-R.
        """
        return self._uri


class RecordFileError(ArchiveDriftBaseException):
    """
    Exception raised when a walk-record file cannot be read -- a line is not
    valid JSON or uses an unsupported schema version.
    """

    def __init__(self, msg: str, line_no: Optional[int] = None):
        self._line_no = line_no
        if line_no is not None:
            msg = f"Line {line_no}: {msg}"
        super().__init__(msg)

    @property
    def line_no(self) -> Optional[int]:
        """
        Number of the offending line (1-based), if known.
        """
        return self._line_no


class _LinkFormatParsingError(ArchiveDriftBaseException):
    """
    Internal exception that denotes a TimeMap parsing error.

    .. warning::
        This exception is not part of the public API of PyArchiveDrift.
        It may change between releases.
    """

    pass
