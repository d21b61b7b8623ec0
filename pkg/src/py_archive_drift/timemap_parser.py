# SPDX-License-Identifier: MIT

import re
from typing import Dict, Iterator, List, Optional, Tuple

from .archive_datetime import format_http_datetime, parse_http_datetime
from .errors import MalformedDatetimeError, MalformedUriError, _LinkFormatParsingError
from .types import MementoUri, OriginalUri, TimeMap
from .uri import normalize_uri

# One link: "<uri>" followed by zero or more ";name=value" parameters.
# Values may be quoted and then contain commas (RFC 1123 dates do).
_LINK_RE = re.compile(
    r"""<([^>]*)>((?:\s*;\s*[A-Za-z0-9_*\-]+\s*=\s*(?:"[^"]*"|[^;,\s"]+))*)"""
)
_PARAM_RE = re.compile(r"""([A-Za-z0-9_*\-]+)\s*=\s*(?:"([^"]*)"|([^;,\s"]+))""")
_SEPARATOR_RE = re.compile(r"^[\s,]*$")


class _TimeMapParser:
    """
    Helper internal class to parse (and produce) TimeMaps in the
    link-format serialization used by Memento::

        <http://www.cs.odu.edu/>; rel="original",
        <http://web.archive.org/web/timemap/link/http://www.cs.odu.edu/>;
            rel="self"; type="application/link-format",
        <http://web.archive.org/web/20050514013608/http://www.cs.odu.edu/>;
            rel="first memento"; datetime="Sat, 14 May 2005 01:36:08 GMT",
        ...

    Links with relation types other than ``original`` and ``memento``
    are skipped. Both LF and CRLF line separators are accepted.

    .. warning::
        This class is not intended for direct use.
        Its API is not guaranteed to remain stable between releases.
    """

    @staticmethod
    def parse_timemap(text: str, requested: Optional[OriginalUri] = None) -> TimeMap:
        """
        Parse a link-format TimeMap.

        ``requested`` is the URI-R the TimeMap was requested for; it is used
        if the TimeMap lacks a ``rel="original"`` link.
        """
        original: Optional[OriginalUri] = None
        raw_mementos: List[Tuple[str, str]] = []

        for uri, params in _TimeMapParser._iter_links(text):
            rels = params.get("rel", "").split()
            if "original" in rels:
                try:
                    original = normalize_uri(uri)
                except MalformedUriError as e:
                    raise _LinkFormatParsingError(
                        f"Invalid original URI in TimeMap: {uri}"
                    ) from e
            if "memento" in rels:
                if "datetime" not in params:
                    raise _LinkFormatParsingError(
                        f"Memento link without datetime: {uri}"
                    )
                raw_mementos.append((uri, params["datetime"]))

        if original is None:
            if requested is None:
                raise _LinkFormatParsingError("TimeMap has no original URI")
            original = requested

        mementos = []
        for uri, dt_str in raw_mementos:
            try:
                dt = parse_http_datetime(dt_str)
            except MalformedDatetimeError as e:
                raise _LinkFormatParsingError(
                    f"Invalid memento datetime in TimeMap: {dt_str!r}"
                ) from e
            mementos.append(MementoUri(datetime=dt, uri=uri, original=original))

        return TimeMap(original=original, mementos=tuple(mementos))

    @staticmethod
    def _iter_links(text: str) -> Iterator[Tuple[str, Dict[str, str]]]:
        pos = 0
        found_any = False
        for match in _LINK_RE.finditer(text):
            # Only separators (commas, whitespace) may appear between links
            if _SEPARATOR_RE.match(text[pos : match.start()]) is None:
                raise _LinkFormatParsingError(
                    "Unexpected content in TimeMap: "
                    + repr(text[pos : match.start()][:80])
                )
            pos = match.end()
            found_any = True

            params: Dict[str, str] = {}
            for p in _PARAM_RE.finditer(match[2]):
                value = p[2] if p[2] is not None else p[3]
                params.setdefault(p[1].lower(), value)
            yield match[1].strip(), params

        if _SEPARATOR_RE.match(text[pos:]) is None:
            raise _LinkFormatParsingError(
                "Unexpected trailing content in TimeMap: " + repr(text[pos:][:80])
            )
        if not found_any:
            raise _LinkFormatParsingError("TimeMap contains no links")

    @staticmethod
    def format_timemap(tm: TimeMap, self_uri: Optional[str] = None) -> str:
        """
        Serialize a TimeMap in link-format (LF separated).
        """
        lines = [f'<{tm.original}>; rel="original"']
        if self_uri is not None:
            lines.append(f'<{self_uri}>; rel="self"; type="application/link-format"')

        n = len(tm.mementos)
        for i, m in enumerate(tm.mementos):
            rels = []
            if i == 0:
                rels.append("first")
            if i == n - 1:
                rels.append("last")
            rel = " ".join(rels + ["memento"])
            lines.append(
                f'<{m.uri}>; rel="{rel}"; datetime="{format_http_datetime(m.datetime)}"'
            )
        return ",\n".join(lines) + "\n"
