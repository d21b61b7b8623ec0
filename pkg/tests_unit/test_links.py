# SPDX-License-Identifier: MIT

import random

import pytest

from py_archive_drift import RelaxedPairExhaustedError
from py_archive_drift.links import (
    common_usable,
    extract_links,
    relaxed_pair,
    sorted_links,
)

_BASE = "http://web.archive.org/web/20050514013608/http://www.cs.odu.edu/"


def test_extract_links():
    html = """
    <html><body>
      <a href="/web/20050514013608/http://sci.odu.edu/">Sciences</a>
      <a href="http://web.archive.org/web/20050514013608/http://www.odu.edu/">ODU</a>
      <a href="http://Example.org:80/a#section">Live link</a>
      <a href="http://example.org/a">Same link again</a>
      <a href="people.html">Relative</a>
      <a href="mailto:webmaster@cs.odu.edu">Mail</a>
      <a href="javascript:void(0)">Script</a>
      <a href="#top">Top</a>
      <a href="">Empty</a>
      <a>No href</a>
      <a href="/web/20050514013608/http://www.cs.odu.edu/">Home</a>
    </body></html>
    """
    assert extract_links(html, _BASE) == frozenset(
        {
            "http://sci.odu.edu/",
            "http://www.odu.edu/",
            "http://example.org/a",
            "http://www.cs.odu.edu/people.html",
        }
    )


def test_extract_links_other_archive_host():
    html = """
    <a href="http://example.com/web/20200101000000/page">Live</a>
    <a href="/web/20050514013608/http://sci.odu.edu/">Sciences</a>
    """
    assert extract_links(html, _BASE) == frozenset(
        {"http://example.com/web/20200101000000/page", "http://sci.odu.edu/"}
    )

    # Against another archive, the same URI-Ms are live links
    other = extract_links(html, _BASE, archive_base="http://archive.example")
    assert other == frozenset(
        {
            "http://example.com/web/20200101000000/page",
            "http://web.archive.org/web/20050514013608/http://sci.odu.edu/",
        }
    )


def test_extract_links_bytes():
    html = b'<a href="/web/20050514013608/http://sci.odu.edu/">Sciences</a>'
    assert extract_links(html, _BASE) == frozenset({"http://sci.odu.edu/"})


@pytest.mark.parametrize(
    "html",
    [
        "",
        "plain text",
        "<a href='http://a.org/'>unclosed <a href=",
        "<<<>>><a href=http://b.org/>x</a",
        b"\xff\xfe\x00garbage",
    ],
)
def test_extract_links_malformed_html(html):
    links = extract_links(html, _BASE)
    assert isinstance(links, frozenset)


_TOOLBAR_HTML = """
<html><body>
<!-- BEGIN WAYBACK TOOLBAR INSERT -->
<div><a href="/web/">Archive home</a></div>
<!-- END WAYBACK TOOLBAR INSERT -->
<div id="wm-ipp"><a href="http://web.archive.org/about/">About</a></div>
<a href="/web/20050514013608/http://sci.odu.edu/">Sciences</a>
</body></html>
"""


def test_extract_links_strip_chrome():
    everything = extract_links(_TOOLBAR_HTML, _BASE)
    assert "http://sci.odu.edu/" in everything
    assert "http://web.archive.org/web/" in everything
    assert "http://web.archive.org/about/" in everything

    content = extract_links(_TOOLBAR_HTML, _BASE, strip_chrome=True)
    assert content == frozenset({"http://sci.odu.edu/"})


def test_common_usable():
    la = frozenset({"http://a/", "http://b/", "http://c/"})
    lw = frozenset({"http://b/", "http://c/", "http://d/"})
    lp = frozenset({"http://c/"})
    assert common_usable(la, lw, lp) == frozenset({"http://b/"})
    assert common_usable(la, frozenset(), lp) == frozenset()


def test_sorted_links():
    assert sorted_links(frozenset({"http://b/", "http://a/"})) == [
        "http://a/",
        "http://b/",
    ]


def test_relaxed_pair():
    la = frozenset({"http://a/", "http://b/", "http://p/"})
    lw = frozenset({"http://x/", "http://y/", "http://p/"})
    lp = frozenset({"http://p/"})

    first = relaxed_pair(la, lw, lp, random.Random(3))
    assert first == relaxed_pair(la, lw, lp, random.Random(3))
    assert first[0] in {"http://a/", "http://b/"}
    assert first[1] in {"http://x/", "http://y/"}

    # Set iteration order does not matter, only the sorted order does
    shuffled = frozenset(reversed(sorted(la)))
    assert relaxed_pair(shuffled, lw, lp, random.Random(3)) == first


def test_relaxed_pair_exhausted():
    lp = frozenset({"http://p/"})
    with pytest.raises(RelaxedPairExhaustedError):
        relaxed_pair(frozenset({"http://a/"}), lp, lp, random.Random(0))
    with pytest.raises(RelaxedPairExhaustedError):
        relaxed_pair(frozenset(), frozenset({"http://a/"}), lp, random.Random(0))
