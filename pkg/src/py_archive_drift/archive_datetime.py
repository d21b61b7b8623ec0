# SPDX-License-Identifier: MIT

"""
Archive datetimes: UTC instants with one-second precision, their 14-digit
``YYYYMMDDHHMMSS`` encoding used in Wayback URIs, and the RFC 1123 form
used in TimeMaps and HTTP headers.
"""

import re
from datetime import datetime, timedelta, timezone
from email.utils import format_datetime, parsedate_to_datetime

from .errors import MalformedDatetimeError

_EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)

ArchiveDatetime = datetime
"""
Timezone-aware :py:class:`datetime.datetime` in UTC, without microseconds.
"""

_WAYBACK_DATETIME_RE = re.compile(
    r"^([0-9]{4})([0-9]{2})([0-9]{2})([0-9]{2})([0-9]{2})([0-9]{2})$"
)


def to_archive_datetime(dt: datetime) -> ArchiveDatetime:
    """
    Convert any datetime to an archive datetime: UTC, second precision.
    Naive datetimes are taken to be in UTC already.
    """
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    else:
        dt = dt.astimezone(timezone.utc)
    return dt.replace(microsecond=0)


def archive_datetime(
    year: int, month: int, day: int, hour: int = 0, minute: int = 0, second: int = 0
) -> ArchiveDatetime:
    """
    Shortcut to construct an archive datetime from its calendar fields (UTC).
    """
    return datetime(year, month, day, hour, minute, second, tzinfo=timezone.utc)


def encode_wayback_datetime(dt: datetime) -> str:
    """
    Encode a datetime as the 14-digit ``YYYYMMDDHHMMSS`` string (UTC).
    """
    dt = to_archive_datetime(dt)
    return (
        f"{dt.year:04d}{dt.month:02d}{dt.day:02d}"
        f"{dt.hour:02d}{dt.minute:02d}{dt.second:02d}"
    )


def decode_wayback_datetime(s: str) -> ArchiveDatetime:
    """
    Decode a 14-digit ``YYYYMMDDHHMMSS`` string.

    Raises :py:exc:`MalformedDatetimeError` on wrong length, non-digit
    characters or invalid calendar values.
    """
    match = _WAYBACK_DATETIME_RE.match(s)
    if match is None:
        raise MalformedDatetimeError(s, "expecting exactly 14 decimal digits")
    try:
        return archive_datetime(*(int(g, 10) for g in match.groups()))
    except ValueError as e:
        raise MalformedDatetimeError(s, str(e)) from e


def parse_http_datetime(s: str) -> ArchiveDatetime:
    """
    Parse an RFC 1123 datetime (e.g. ``Sat, 14 May 2005 01:36:08 GMT``).
    """
    try:
        dt = parsedate_to_datetime(s.strip())
    except (TypeError, ValueError, IndexError) as e:
        raise MalformedDatetimeError(s, "not an RFC 1123 date") from e
    if dt is None:
        raise MalformedDatetimeError(s, "not an RFC 1123 date")
    return to_archive_datetime(dt)


def format_http_datetime(dt: datetime) -> str:
    """
    Format a datetime in the RFC 1123 form used by Memento.
    """
    return format_datetime(to_archive_datetime(dt), usegmt=True)


def epoch_seconds(dt: datetime) -> int:
    """
    Whole seconds since the Unix epoch.
    """
    return (to_archive_datetime(dt) - _EPOCH) // timedelta(seconds=1)


def from_epoch_seconds(seconds: int) -> ArchiveDatetime:
    return _EPOCH + timedelta(seconds=seconds)
