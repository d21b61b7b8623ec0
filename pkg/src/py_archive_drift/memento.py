# SPDX-License-Identifier: MIT

"""
Pure functions over the Memento model: drift computation, best memento
selection and Wayback-style URI-M construction and parsing.
"""

import bisect
import re
from datetime import datetime
from typing import Optional, Tuple
from urllib.parse import urlsplit

from .archive_datetime import (
    ArchiveDatetime,
    decode_wayback_datetime,
    encode_wayback_datetime,
    epoch_seconds,
    to_archive_datetime,
)
from .errors import (
    EmptyTimeMapError,
    MalformedDatetimeError,
    MalformedUriError,
    NotArchiveUriError,
)
from .types import Drift, MementoUri, OriginalUri, TimeMap
from .uri import normalize_uri

DEFAULT_ARCHIVE_BASE = "http://web.archive.org"

# "<scheme>://<host>[/prefix]/web/<14 digits>[flag_]/<URI-R>"
# The flag is a replay mode such as "im_", "js_" or "id_".
_WAYBACK_URI_RE = re.compile(
    r"^(https?://[^/?#]+(?:/[^?#]*?)??)/web/([0-9]{14})(?:[A-Za-z]+_)?/(.+)$"
)

# Some servers collapse "http://" into "http:/" inside paths
_COLLAPSED_SCHEME_RE = re.compile(r"^(https?):/+", re.IGNORECASE)

_DEFAULT_PORTS = (80, 443)


def compute_drift(target: datetime, memento_dt: datetime) -> Drift:
    """
    Return the drift |target - memento_dt|, in whole seconds.
    """
    return Drift(abs(epoch_seconds(target) - epoch_seconds(memento_dt)))


def best_memento(tm: TimeMap, target: datetime) -> MementoUri:
    """
    Select the memento whose datetime is nearest to ``target``.

    If two mementos are equally distant, the earlier one is selected.
    Among mementos captured within the same second, the first one in TimeMap
    order wins.

    Raises :py:exc:`EmptyTimeMapError` for an empty TimeMap.
    """
    if len(tm.mementos) == 0:
        raise EmptyTimeMapError(tm.original)

    target = to_archive_datetime(target)
    datetimes = tm.datetimes
    i = bisect.bisect_left(datetimes, target)

    if i == 0:
        return tm.mementos[0]
    before_dt = datetimes[i - 1]
    before = tm.mementos[bisect.bisect_left(datetimes, before_dt)]
    if i == len(datetimes):
        return before

    after = tm.mementos[i]
    if compute_drift(target, before.datetime) <= compute_drift(target, after.datetime):
        return before
    return after


def build_wayback_uri(
    archive_base: str, dt: datetime, r: OriginalUri
) -> MementoUri:
    """
    Construct the Wayback-style URI-M ``<archive_base>/web/<YYYYMMDDHHMMSS>/<r>``.
    """
    uri = f"{archive_base.rstrip('/')}/web/{encode_wayback_datetime(dt)}/{r}"
    return MementoUri(datetime=to_archive_datetime(dt), uri=uri, original=r)


def _archive_authority(uri: str) -> Tuple[str, Optional[int], str]:
    parts = urlsplit(uri)
    port = parts.port
    if port in _DEFAULT_PORTS:
        port = None
    return (parts.hostname or "", port, parts.path.rstrip("/"))


def parse_wayback_uri(
    m: str, archive_base: str = DEFAULT_ARCHIVE_BASE
) -> Tuple[ArchiveDatetime, OriginalUri]:
    """
    Extract the datetime and the (normalized) URI-R embedded in
    a Wayback-style URI-M. A replay-mode flag following the datetime
    (``20050514013608im_``) is accepted and ignored.

    The URI-M must be served by ``archive_base``: its host, port and path
    prefix have to match the base, while the scheme may be either HTTP or
    HTTPS. A live URI whose path merely looks like ``/web/<14 digits>/...``
    is not a URI-M.

    Raises :py:exc:`NotArchiveUriError` if ``m`` does not have that form.
    """
    match = _WAYBACK_URI_RE.match(m.strip())
    if match is None:
        raise NotArchiveUriError(m)

    try:
        same_archive = _archive_authority(match[1]) == _archive_authority(
            archive_base
        )
    except ValueError:
        same_archive = False
    if not same_archive:
        raise NotArchiveUriError(m)

    original = _COLLAPSED_SCHEME_RE.sub(lambda g: g[1].lower() + "://", match[3])
    if "://" not in original:
        original = "http://" + original

    try:
        dt = decode_wayback_datetime(match[2])
        r = normalize_uri(original)
    except (MalformedDatetimeError, MalformedUriError) as e:
        raise NotArchiveUriError(m) from e
    return dt, r


def memento_from_uri(m: str, archive_base: str = DEFAULT_ARCHIVE_BASE) -> MementoUri:
    """
    Build a :py:class:`MementoUri` from a Wayback-style URI-M served by
    ``archive_base``.
    """
    dt, r = parse_wayback_uri(m, archive_base)
    return MementoUri(datetime=dt, uri=m, original=r)


def is_archive_uri(uri: str, archive_base: str = DEFAULT_ARCHIVE_BASE) -> bool:
    try:
        parse_wayback_uri(uri, archive_base)
    except NotArchiveUriError:
        return False
    return True
