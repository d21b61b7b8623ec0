# SPDX-License-Identifier: MIT

from unittest import mock

import pytest

from py_archive_drift import (
    ArchiveClient,
    ArchiveFetchError,
    ArchiveTransportError,
    ClientConfig,
    FetchKind,
    HopKind,
    MementoUri,
    TimeMap,
)
from py_archive_drift.archive_datetime import archive_datetime
from py_archive_drift.backend import ArchiveResponse
from py_archive_drift.timemap_parser import _TimeMapParser

_BASE = "http://archive.test"
_R = "http://a.org/"
_D1 = archive_datetime(2005, 3, 31, 0, 56, 12)
_D2 = archive_datetime(2005, 5, 14, 1, 36, 8)
_M1 = f"{_BASE}/web/20050331005612/{_R}"
_M2 = f"{_BASE}/web/20050514013608/{_R}"
_TM_URL = f"{_BASE}/web/timemap/link/{_R}"

_PAGE = b"<html><body><a href='/web/20050514013608/http://b.org/'>b</a></body></html>"


class _RoutedBackend:
    """
    Backend answering from a table. A route may hold a list of answers
    that are served in turn; the last one repeats.
    """

    def __init__(self, routes):
        self.routes = routes
        self.calls = []

    def get(self, url):
        self.calls.append(url)
        answer = self.routes.get(url)
        if answer is None:
            return ArchiveResponse(url, 404, {"content-type": "text/html"}, b"")
        if isinstance(answer, list):
            answer = answer.pop(0) if len(answer) > 1 else answer[0]
        if isinstance(answer, Exception):
            raise answer
        status, headers, body = answer
        return ArchiveResponse(url, status, headers, body)


def _html(body=_PAGE):
    return (200, {"content-type": "text/html; charset=utf-8"}, body)


def _redirect(location, status=302):
    return (status, {"location": location}, b"")


def _timemap_text():
    tm = TimeMap(
        original=_R,
        mementos=(MementoUri(_D1, _M1, _R), MementoUri(_D2, _M2, _R)),
    )
    return _TimeMapParser.format_timemap(tm).encode()


def _client(routes, **kwargs):
    kwargs.setdefault("retry_delay", 0)
    backend = _RoutedBackend(routes)
    return ArchiveClient(backend, _BASE + "/", ClientConfig(**kwargs)), backend


def test_fetch_timemap():
    client, backend = _client(
        {_TM_URL: (200, {"content-type": "application/link-format"}, _timemap_text())}
    )
    assert client.archive_base == _BASE
    assert client.timemap_uri(_R) == _TM_URL

    tm = client.fetch_timemap(_R)
    assert tm.original == _R
    assert tm.datetimes == [_D1, _D2]
    assert backend.calls == [_TM_URL]


def test_fetch_timemap_follows_redirect():
    other = f"{_BASE}/timemaps/a.org"
    client, backend = _client(
        {_TM_URL: _redirect("/timemaps/a.org"), other: (200, {}, _timemap_text())}
    )
    assert len(client.fetch_timemap(_R)) == 2
    assert backend.calls == [_TM_URL, other]


@pytest.mark.parametrize(
    "answer, kind",
    [
        ((404, {}, b""), FetchKind.HTTP_404),
        ((403, {}, b""), FetchKind.HTTP_403),
        ((500, {}, b""), FetchKind.OTHER),
        ((302, {}, b""), FetchKind.OTHER),
        ((200, {}, b"<html>Not a TimeMap</html>"), FetchKind.OTHER),
        ((200, {}, b'<http://a.org/>; rel="original"\n'), FetchKind.OTHER),
        ((200, {}, b""), FetchKind.OTHER),
        (ArchiveTransportError(_TM_URL, "reset"), FetchKind.DOWNLOAD_FAILED),
    ],
)
def test_fetch_timemap_failure(answer, kind):
    client, _ = _client({_TM_URL: answer})
    with pytest.raises(ArchiveFetchError) as e:
        client.fetch_timemap(_R)
    assert e.value.outcome.kind == kind


def test_503_retried_once_after_delay():
    client, backend = _client(
        {_TM_URL: [(503, {}, b""), (200, {}, _timemap_text())]}, retry_delay=5
    )
    with mock.patch("py_archive_drift.client.time.sleep") as sleep:
        tm = client.fetch_timemap(_R)
    assert len(tm) == 2
    assert backend.calls == [_TM_URL, _TM_URL]
    sleep.assert_called_once_with(5)


def test_503_twice_is_final():
    client, backend = _client({_TM_URL: [(503, {}, b"")]})
    with pytest.raises(ArchiveFetchError) as e:
        client.fetch_timemap(_R)
    assert e.value.outcome.kind == FetchKind.HTTP_503
    assert e.value.outcome.retried
    assert len(backend.calls) == 2


def test_download_failure_retry():
    failure = ArchiveTransportError(_M2, "Connection reset")
    client, backend = _client({_M2: [failure]})
    with pytest.raises(ArchiveFetchError) as e:
        client.dereference_sliding(MementoUri(_D2, _M2, _R))
    assert e.value.outcome.kind == FetchKind.DOWNLOAD_FAILED
    assert len(backend.calls) == 2

    client, backend = _client({_M2: [failure]}, retry_download_failures=False)
    with pytest.raises(ArchiveFetchError):
        client.dereference_sliding(MementoUri(_D2, _M2, _R))
    assert len(backend.calls) == 1


def test_retry_503_leaves_other_outcomes():
    client, _ = _client({})
    outcome = client.retry_503(
        mock.Mock(kind=FetchKind.HTTP_404, retried=False), mock.Mock()
    )
    assert outcome.kind == FetchKind.HTTP_404


def test_dereference_sticky_selects_nearest():
    client, backend = _client({_M1: _html(), _M2: _html()})
    tm = TimeMap(_R, (MementoUri(_D1, _M1, _R), MementoUri(_D2, _M2, _R)))

    chain = client.dereference_sticky(_R, archive_datetime(2005, 5, 1), tm)

    assert chain.requested.uri == _M2
    assert chain.hops == ()
    assert chain.final.datetime == _D2
    assert chain.body == _PAGE
    assert backend.calls == [_M2]


def test_dereference_hard_redirect():
    client, _ = _client({_M2: _redirect(_M1), _M1: _html()})
    chain = client.dereference_sliding(MementoUri(_D2, _M2, _R))
    assert [h.kind for h in chain.hops] == [HopKind.HARD]
    assert chain.hops[0].uri == _M1
    assert chain.final.datetime == _D1


_SCRIPT_REDIRECT = (
    b"<html><head><script>window.location.replace('"
    + _M1.encode()
    + b"');</script></head><body>Got an HTTP 302 response</body></html>"
)
_META_REFRESH = (
    b'<html><head><meta http-equiv="Refresh" content="0; url='
    + _M1.encode()
    + b'"></head></html>'
)


@pytest.mark.parametrize("body", [_SCRIPT_REDIRECT, _META_REFRESH])
def test_dereference_soft_redirect(body):
    client, _ = _client({_M2: _html(body), _M1: _html()})
    requested = MementoUri(_D2, _M2, _R)

    sliding = client.dereference_sliding(requested)
    assert [h.kind for h in sliding.hops] == [HopKind.SOFT]
    assert sliding.final.datetime == _D1

    # The memento API does not execute scripts
    tm = TimeMap(_R, (requested,))
    sticky = client.dereference_sticky(_R, _D2, tm)
    assert sticky.hops == ()
    assert sticky.final.datetime == _D2
    assert sticky.body == body


def test_soft_redirect_detection_disabled():
    client, _ = _client(
        {_M2: _html(_SCRIPT_REDIRECT)},
        follow_script_redirects=False,
        follow_meta_refresh=False,
    )
    chain = client.dereference_sliding(MementoUri(_D2, _M2, _R))
    assert chain.final.datetime == _D2


def test_soft_redirect_to_live_web_ignored():
    body = b"<script>location.href = 'http://elsewhere.org/';</script><html></html>"
    client, _ = _client({_M2: _html(body)})
    chain = client.dereference_sliding(MementoUri(_D2, _M2, _R))
    assert chain.hops == ()


def test_dereference_not_html():
    client, _ = _client({_M2: (200, {"content-type": "image/gif"}, b"GIF89a")})
    with pytest.raises(ArchiveFetchError) as e:
        client.dereference_sliding(MementoUri(_D2, _M2, _R))
    assert e.value.outcome.kind == FetchKind.NOT_HTML


def test_dereference_sniffs_html_without_content_type():
    client, _ = _client({_M2: (200, {}, b"  <!DOCTYPE html><html></html>")})
    chain = client.dereference_sliding(MementoUri(_D2, _M2, _R))
    assert chain.final.datetime == _D2


def test_dereference_redirect_loop():
    client, backend = _client(
        {_M2: _redirect(_M1), _M1: _redirect(_M2)}, redirect_limit=3
    )
    with pytest.raises(ArchiveFetchError) as e:
        client.dereference_sliding(MementoUri(_D2, _M2, _R))
    assert e.value.outcome.kind == FetchKind.OTHER
    assert e.value.outcome.redirect_hops == 4
    assert len(backend.calls) == 4


def test_dereference_redirect_out_of_archive():
    client, _ = _client({_M2: _redirect("http://a.org/"), "http://a.org/": _html()})
    with pytest.raises(ArchiveFetchError) as e:
        client.dereference_sliding(MementoUri(_D2, _M2, _R))
    assert e.value.outcome.kind == FetchKind.OTHER


def test_dereference_404_after_redirect():
    client, _ = _client({_M2: _redirect(_M1)})
    with pytest.raises(ArchiveFetchError) as e:
        client.dereference_sliding(MementoUri(_D2, _M2, _R))
    assert e.value.outcome.kind == FetchKind.HTTP_404
    assert e.value.outcome.redirect_hops == 1
    assert e.value.outcome.url == _M1


def test_client_config_validation():
    with pytest.raises(ValueError):
        ClientConfig(redirect_limit=-1)
    with pytest.raises(ValueError):
        ClientConfig(retry_delay=-0.5)
