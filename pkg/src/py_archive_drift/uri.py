# SPDX-License-Identifier: MIT

import re
from urllib.parse import urlsplit, urlunsplit

from .errors import MalformedUriError
from .types import OriginalUri

_DEFAULT_PORTS = {"http": 80, "https": 443}

_SCHEME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*$")

# Percent-escape, e.g. "%2f"
_PCT_ESCAPE_RE = re.compile(r"%([0-9A-Fa-f]{2})")

_UNRESERVED = frozenset(
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-._~"
)


def _normalize_percent_encoding(part: str) -> str:
    # Decode escapes of unreserved characters, upper-case the remaining ones.
    # Reserved characters (like "%2F") stay encoded.
    def repl(match: "re.Match[str]") -> str:
        ch = chr(int(match[1], 16))
        if ch in _UNRESERVED:
            return ch
        return "%" + match[1].upper()

    return _PCT_ESCAPE_RE.sub(repl, part)


def normalize_uri(uri: str) -> OriginalUri:
    """
    Normalize an absolute URI:

    - scheme and host are lower-cased,
    - default port (80 for http, 443 for https) is removed,
    - the fragment is removed,
    - percent-encoding is normalized (escapes of unreserved characters
      decoded, other escapes upper-cased),
    - an empty path becomes ``/``; a trailing ``/`` is otherwise kept as-is.

    Query parameters are not reordered.

    Raises :py:exc:`MalformedUriError` if the URI is not absolute.
    """
    stripped = uri.strip()
    if not stripped or any(c.isspace() for c in stripped):
        raise MalformedUriError(uri, "empty or contains whitespace")

    try:
        parts = urlsplit(stripped)
        port = parts.port
    except ValueError as e:
        raise MalformedUriError(uri, str(e)) from e

    if not parts.scheme or _SCHEME_RE.match(parts.scheme) is None:
        raise MalformedUriError(uri, "missing scheme")
    if not parts.hostname:
        raise MalformedUriError(uri, "missing host")

    scheme = parts.scheme.lower()
    host = parts.hostname.lower()
    if ":" in host:
        # IPv6 literal
        host = "[" + host + "]"

    netloc = host
    if port is not None and _DEFAULT_PORTS.get(scheme) != port:
        netloc += f":{port}"
    if parts.username is not None:
        userinfo = parts.username
        if parts.password is not None:
            userinfo += ":" + parts.password
        netloc = userinfo + "@" + netloc

    path = _normalize_percent_encoding(parts.path) or "/"
    query = _normalize_percent_encoding(parts.query)

    return urlunsplit((scheme, netloc, path, query, ""))


def uri_host(uri: str) -> str:
    """
    Return the lower-cased host name of a URI (empty string if it has none).
    """
    try:
        return (urlsplit(uri).hostname or "").lower()
    except ValueError:
        return ""


def registered_domain(host: str) -> str:
    """
    Rough approximation of the registrable domain: the last two labels
    of the host name (``www.cs.odu.edu`` -> ``odu.edu``).
    """
    labels = host.lower().strip(".").split(".")
    return ".".join(labels[-2:])
