# SPDX-License-Identifier: MIT

"""
Extraction of link URI-Rs from memento HTML and the set algebra that decides
which links a walk step can follow.
"""

import random
from typing import List, Optional, Set, Tuple, Union
from urllib.parse import urljoin, urlsplit

from bs4 import BeautifulSoup, Comment, Tag

from .errors import MalformedUriError, NotArchiveUriError, RelaxedPairExhaustedError
from .memento import DEFAULT_ARCHIVE_BASE, parse_wayback_uri
from .types import LinkSet, OriginalUri
from .uri import normalize_uri

# Markers the Wayback Machine puts around the toolbar it injects into mementos
TOOLBAR_BEGIN_MARKER = "BEGIN WAYBACK TOOLBAR INSERT"
TOOLBAR_END_MARKER = "END WAYBACK TOOLBAR INSERT"
TOOLBAR_ELEMENT_IDS = ("wm-ipp", "wm-ipp-base", "wm-ipp-print")

_LINK_SCHEMES = ("http", "https")


def _to_original(uri: str, archive_base: str) -> Optional[OriginalUri]:
    """
    Turn an absolute URI (archive-rewritten or not) into a normalized URI-R.
    """
    try:
        _, r = parse_wayback_uri(uri, archive_base)
        return r
    except NotArchiveUriError:
        pass
    try:
        return normalize_uri(uri)
    except MalformedUriError:
        return None


def _strip_archive_chrome(soup: BeautifulSoup) -> None:
    for comment in soup.find_all(
        string=lambda s: isinstance(s, Comment) and TOOLBAR_BEGIN_MARKER in s
    ):
        # Everything between the begin and end markers is toolbar
        doomed = []
        for sibling in comment.next_siblings:
            if isinstance(sibling, Comment) and TOOLBAR_END_MARKER in sibling:
                break
            doomed.append(sibling)
        for node in doomed:
            node.extract()

    for element_id in TOOLBAR_ELEMENT_IDS:
        for element in soup.find_all(id=element_id):
            element.decompose()


def extract_links(
    html: Union[bytes, str],
    base: str,
    strip_chrome: bool = False,
    archive_base: str = DEFAULT_ARCHIVE_BASE,
) -> LinkSet:
    """
    Extract the set of URI-Rs linked from a memento's HTML.

    Only anchor (``<a href>``) elements are considered. Relative links are
    resolved against ``base`` (normally the URI-M of the memento), links
    rewritten by the archive at ``archive_base`` are unwrapped to their URI-R,
    non-HTTP(S) links and fragment-only links are dropped, and so are links to
    the page itself. Links into any other host are kept as live URI-Rs, even
    when their path looks like a Wayback path.

    If ``strip_chrome`` is set, the navigation toolbar injected by the
    archive is removed before the links are collected.

    Malformed HTML never raises; hrefs that cannot be interpreted are skipped.
    """
    soup = BeautifulSoup(html, "html.parser")
    if strip_chrome:
        _strip_archive_chrome(soup)

    own = _to_original(base, archive_base)
    links: Set[OriginalUri] = set()

    for anchor in soup.find_all("a", href=True):
        if not isinstance(anchor, Tag):
            continue
        href = anchor.get("href")
        if not isinstance(href, str):
            continue
        href = href.strip()
        if not href or href.startswith("#"):
            continue

        try:
            absolute = urljoin(base, href)
        except ValueError:
            continue
        if urlsplit(absolute).scheme.lower() not in _LINK_SCHEMES:
            continue

        r = _to_original(absolute, archive_base)
        if r is None or r == own:
            continue
        links.add(r)

    return frozenset(links)


def common_usable(la: LinkSet, lw: LinkSet, lp: LinkSet) -> LinkSet:
    """
    Links usable for the next walk step: present in both policies' mementos
    and not visited yet.
    """
    return (la & lw) - lp


def sorted_links(links: LinkSet) -> List[OriginalUri]:
    """
    Canonical (lexicographic) order used when drawing from a link set.
    """
    return sorted(links)


def relaxed_pair(
    la: LinkSet, lw: LinkSet, lp: LinkSet, rng: random.Random
) -> Tuple[OriginalUri, OriginalUri]:
    """
    Select one unused link for each policy independently -- for walk steps
    where the two mementos have no link in common.

    Raises :py:exc:`RelaxedPairExhaustedError` if either side has no unused link.
    """
    api_side = sorted_links(la - lp)
    ui_side = sorted_links(lw - lp)
    if not api_side or not ui_side:
        raise RelaxedPairExhaustedError(
            "No unused link available "
            f"(sticky side: {len(api_side)}, sliding side: {len(ui_side)})"
        )
    r_api = api_side[rng.randrange(len(api_side))]
    r_ui = ui_side[rng.randrange(len(ui_side))]
    return r_api, r_ui
