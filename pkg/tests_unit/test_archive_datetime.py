# SPDX-License-Identifier: MIT

import random
from datetime import datetime, timedelta, timezone

import pytest

from py_archive_drift import MalformedDatetimeError
from py_archive_drift.archive_datetime import (
    archive_datetime,
    decode_wayback_datetime,
    encode_wayback_datetime,
    epoch_seconds,
    format_http_datetime,
    from_epoch_seconds,
    parse_http_datetime,
    to_archive_datetime,
)


def test_encode_decode():
    dt = archive_datetime(2005, 5, 14, 1, 36, 8)
    assert encode_wayback_datetime(dt) == "20050514013608"
    assert decode_wayback_datetime("20050514013608") == dt
    assert decode_wayback_datetime("20050514013608").tzinfo == timezone.utc


@pytest.mark.parametrize(
    "value",
    [
        "2005051401360",  # too short
        "200505140136080",  # too long
        "2005O514013608",  # not a digit
        "20051314013608",  # month 13
        "20050230000000",  # February 30
        "20050514253608",  # hour 25
        "",
    ],
)
def test_decode_malformed(value):
    with pytest.raises(MalformedDatetimeError) as e:
        decode_wayback_datetime(value)
    assert e.value.value == value


def test_encode_decode_random_instants():
    rng = random.Random(12)
    lo = epoch_seconds(archive_datetime(1996, 1, 1))
    hi = epoch_seconds(archive_datetime(2030, 12, 31, 23, 59, 59))
    for _ in range(10000):
        dt = from_epoch_seconds(rng.randint(lo, hi))
        assert decode_wayback_datetime(encode_wayback_datetime(dt)) == dt


def test_to_archive_datetime():
    naive = datetime(2005, 5, 14, 1, 36, 8, 999999)
    assert to_archive_datetime(naive) == archive_datetime(2005, 5, 14, 1, 36, 8)

    plus_two = timezone(timedelta(hours=2))
    aware = datetime(2005, 5, 14, 3, 36, 8, tzinfo=plus_two)
    converted = to_archive_datetime(aware)
    assert converted == archive_datetime(2005, 5, 14, 1, 36, 8)
    assert converted.tzinfo == timezone.utc

    # Encoding always happens in UTC
    assert encode_wayback_datetime(aware) == "20050514013608"


def test_http_datetime():
    dt = archive_datetime(2005, 5, 14, 1, 36, 8)
    assert parse_http_datetime("Sat, 14 May 2005 01:36:08 GMT") == dt
    assert parse_http_datetime("  Sat, 14 May 2005 01:36:08 GMT\n") == dt
    assert format_http_datetime(dt) == "Sat, 14 May 2005 01:36:08 GMT"


@pytest.mark.parametrize("value", ["yesterday", "", "14 May"])
def test_http_datetime_malformed(value):
    with pytest.raises(MalformedDatetimeError):
        parse_http_datetime(value)


def test_epoch_seconds():
    assert epoch_seconds(archive_datetime(1970, 1, 1)) == 0
    assert epoch_seconds(archive_datetime(1970, 1, 2)) == 86400
    assert epoch_seconds(archive_datetime(1969, 12, 31, 23, 59, 59)) == -1
    assert from_epoch_seconds(86400) == archive_datetime(1970, 1, 2)
