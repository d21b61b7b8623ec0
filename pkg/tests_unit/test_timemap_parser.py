# SPDX-License-Identifier: MIT

import pytest

from py_archive_drift import MementoUri, TimeMap
from py_archive_drift.archive_datetime import archive_datetime
from py_archive_drift.errors import _LinkFormatParsingError
from py_archive_drift.timemap_parser import _TimeMapParser

_TIMEMAP = """<http://www.cs.odu.edu/>; rel="original",
<http://web.archive.org/web/timemap/link/http://www.cs.odu.edu/>; rel="self";
    type="application/link-format",
<http://web.archive.org/web/http://www.cs.odu.edu/>; rel="timegate",
<http://web.archive.org/web/20050514013608/http://www.cs.odu.edu/>;
    rel="memento"; datetime="Sat, 14 May 2005 01:36:08 GMT",
<http://web.archive.org/web/20050331005612/http://www.cs.odu.edu/>;
    rel="first memento"; datetime="Thu, 31 Mar 2005 00:56:12 GMT",
<http://web.archive.org/web/20060101000000/http://www.cs.odu.edu/>;
    rel="last memento"; datetime="Sun, 01 Jan 2006 00:00:00 GMT"
"""


def test_parse_timemap():
    tm = _TimeMapParser.parse_timemap(_TIMEMAP)
    assert tm.original == "http://www.cs.odu.edu/"
    # Sorted by datetime, whatever the order in the document
    assert tm.datetimes == [
        archive_datetime(2005, 3, 31, 0, 56, 12),
        archive_datetime(2005, 5, 14, 1, 36, 8),
        archive_datetime(2006, 1, 1),
    ]
    assert tm.mementos[0].uri == (
        "http://web.archive.org/web/20050331005612/http://www.cs.odu.edu/"
    )
    assert all(m.original == tm.original for m in tm.mementos)


def test_parse_timemap_crlf():
    tm = _TimeMapParser.parse_timemap(_TIMEMAP.replace("\n", "\r\n"))
    assert len(tm.mementos) == 3


def test_parse_timemap_without_original():
    text = (
        "<http://web.archive.org/web/20050514013608/http://a.org/>; "
        'rel="memento"; datetime="Sat, 14 May 2005 01:36:08 GMT"'
    )
    tm = _TimeMapParser.parse_timemap(text, requested="http://a.org/")
    assert tm.original == "http://a.org/"
    assert len(tm.mementos) == 1

    with pytest.raises(_LinkFormatParsingError):
        _TimeMapParser.parse_timemap(text)


def test_parse_timemap_without_mementos():
    tm = _TimeMapParser.parse_timemap('<http://a.org/>; rel="original"\n')
    assert tm.original == "http://a.org/"
    assert tm.mementos == ()


@pytest.mark.parametrize(
    "text",
    [
        "",
        "\n\n",
        "<html><body>Not found</body></html>",
        '<http://a.org/>; rel="original", garbage',
        '<http://a.org/>; rel="original",\n<http://m/>; rel="memento"',
        '<http://a.org/>; rel="original",\n'
        '<http://m/>; rel="memento"; datetime="sometime"',
        '<not a uri>; rel="original"',
    ],
)
def test_parse_timemap_invalid(text):
    with pytest.raises(_LinkFormatParsingError):
        _TimeMapParser.parse_timemap(text)


def test_format_timemap():
    r = "http://a.org/"
    tm = TimeMap(
        original=r,
        mementos=(
            MementoUri(
                archive_datetime(2005, 1, 1),
                "http://sim.archive/web/20050101000000/http://a.org/",
                r,
            ),
            MementoUri(
                archive_datetime(2005, 3, 1),
                "http://sim.archive/web/20050301000000/http://a.org/",
                r,
            ),
        ),
    )
    text = _TimeMapParser.format_timemap(tm, "http://sim.archive/timemap/link/" + r)
    lines = text.splitlines()
    assert lines[0] == '<http://a.org/>; rel="original",'
    assert 'rel="self"' in lines[1]
    assert 'rel="first memento"' in lines[2]
    assert 'rel="last memento"' in lines[3]
    assert 'datetime="Tue, 01 Mar 2005 00:00:00 GMT"' in lines[3]
    assert _TimeMapParser.parse_timemap(text) == tm
