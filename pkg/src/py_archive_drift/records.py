# SPDX-License-Identifier: MIT

"""
Walk-record files: one JSON object per line, one walk per object.

Records are written with sorted keys and without optional whitespace, so the
same walks always produce byte-identical files. Memento bodies are not stored.
"""

from __future__ import annotations

import json
import logging
import os
from datetime import datetime
from typing import IO, Any, Dict, Iterator, List, Optional, Set, Type, Union

from .archive_datetime import decode_wayback_datetime, encode_wayback_datetime
from .errors import MalformedDatetimeError, RecordFileError
from .types import (
    DereferenceChain,
    Drift,
    Hop,
    HopKind,
    MementoUri,
    StopCause,
    StopKind,
    StopStage,
    Walk,
    WalkMode,
    WalkStep,
)

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

PathLike = Union[str, os.PathLike[str]]


def _dt_out(dt: Optional[datetime]) -> Optional[str]:
    return encode_wayback_datetime(dt) if dt is not None else None


def _dt_in(value: Optional[str]) -> Optional[datetime]:
    return decode_wayback_datetime(value) if value is not None else None


def _drift_out(d: Optional[Drift]) -> Optional[int]:
    return d.seconds if d is not None else None


def _drift_in(value: Optional[int]) -> Optional[Drift]:
    return Drift(value) if value is not None else None


def _memento_out(m: MementoUri) -> Dict[str, Any]:
    return {"datetime": _dt_out(m.datetime), "original": m.original, "uri": m.uri}


def _memento_in(obj: Dict[str, Any]) -> MementoUri:
    return MementoUri(
        datetime=decode_wayback_datetime(obj["datetime"]),
        uri=obj["uri"],
        original=obj["original"],
    )


def _chain_out(chain: Optional[DereferenceChain]) -> Optional[Dict[str, Any]]:
    if chain is None:
        return None
    return {
        "final": _memento_out(chain.final),
        "hops": [[h.uri, h.kind.value] for h in chain.hops],
        "requested": _memento_out(chain.requested),
    }


def _chain_in(obj: Optional[Dict[str, Any]]) -> Optional[DereferenceChain]:
    if obj is None:
        return None
    return DereferenceChain(
        requested=_memento_in(obj["requested"]),
        hops=tuple(Hop(uri, HopKind(kind)) for uri, kind in obj["hops"]),
        final=_memento_in(obj["final"]),
    )


def _stop_out(stop: Optional[StopCause]) -> Optional[Dict[str, str]]:
    if stop is None:
        return None
    return {"kind": stop.kind.value, "stage": stop.stage.value}


def _stop_in(obj: Optional[Dict[str, str]]) -> Optional[StopCause]:
    if obj is None:
        return None
    return StopCause(StopStage(obj["stage"]), StopKind(obj["kind"]))


def walk_to_record(walk: Walk) -> Dict[str, Any]:
    """
    Convert a walk to its JSON-compatible record.
    """
    steps = []
    for s in walk.steps:
        steps.append(
            {
                "api_chain": _chain_out(s.api_chain),
                "choice": s.choice,
                "domains_so_far": s.domains_so_far,
                "drift_api": _drift_out(s.drift_api),
                "drift_ui": _drift_out(s.drift_ui),
                "drift_ui_walk": _drift_out(s.drift_ui_walk),
                "index": s.index,
                "outcome": _stop_out(s.outcome),
                "r": s.r,
                "r_ui": s.r_ui,
                "relaxed": s.relaxed,
                "t_sliding": _dt_out(s.t_sliding),
                "t_sticky": _dt_out(s.t_sticky),
                "ui_chain": _chain_out(s.ui_chain),
            }
        )
    return {
        "fingerprint": walk.fingerprint,
        "length": walk.length,
        "mode": walk.mode.value,
        "sample_class": walk.sample_class,
        "schema_version": SCHEMA_VERSION,
        "seed": walk.seed,
        "steps": steps,
        "stop": _stop_out(walk.stop),
    }


def walk_from_record(record: Dict[str, Any]) -> Walk:
    """
    Rebuild a walk from its record.

    Raises :py:exc:`RecordFileError` for an unsupported schema version
    or an incomplete record.
    """
    version = record.get("schema_version")
    if version != SCHEMA_VERSION:
        raise RecordFileError(f"Unsupported schema version: {version!r}")

    try:
        steps = tuple(
            WalkStep(
                index=s["index"],
                r=s["r"],
                r_ui=s["r_ui"],
                t_sticky=_dt_in(s["t_sticky"]),
                t_sliding=_dt_in(s["t_sliding"]),
                api_chain=_chain_in(s["api_chain"]),
                ui_chain=_chain_in(s["ui_chain"]),
                drift_api=_drift_in(s["drift_api"]),
                drift_ui=_drift_in(s["drift_ui"]),
                drift_ui_walk=_drift_in(s["drift_ui_walk"]),
                choice=s["choice"],
                relaxed=s["relaxed"],
                domains_so_far=s["domains_so_far"],
                outcome=_stop_in(s["outcome"]),
            )
            for s in record["steps"]
        )
        return Walk(
            seed=record["seed"],
            steps=steps,
            stop=_stop_in(record["stop"]),
            mode=WalkMode(record["mode"]),
            sample_class=record["sample_class"],
        )
    except (KeyError, TypeError, ValueError, MalformedDatetimeError) as e:
        raise RecordFileError(f"Invalid walk record: {e}") from e


def dump_record_line(walk: Walk) -> str:
    """
    Serialize a walk as one line of a walk-record file (without the newline).
    """
    return json.dumps(walk_to_record(walk), sort_keys=True, separators=(",", ":"))


class WalkRecordWriter:
    """
    Writer of a walk-record file. Each walk is flushed as soon as it is
    written, so an interrupted campaign can be resumed from the file.

    .. code-block:: python

        with WalkRecordWriter("walks.jsonl", append=True) as writer:
            engine.run_campaign(seeds, on_walk=writer.write)

    """

    def __init__(self, path: PathLike, append: bool = False) -> None:
        self._path = path
        self._file: Optional[IO[str]] = open(
            path, "a" if append else "w", encoding="utf-8", newline="\n"
        )

    def write(self, walk: Walk) -> None:
        if self._file is None:
            raise ValueError("The walk-record file is closed")
        self._file.write(dump_record_line(walk) + "\n")
        self._file.flush()

    def close(self) -> None:
        if self._file is not None:
            self._file.close()
            self._file = None

    def __enter__(self) -> WalkRecordWriter:
        return self

    def __exit__(
        self,
        exc_type: Optional[Type[BaseException]],
        exc_val: Optional[BaseException],
        exc_tb: Optional[Type[Any]],
    ) -> None:
        self.close()


def read_walk_records(*paths: PathLike) -> Iterator[Walk]:
    """
    Read walks from one or more walk-record files, in file order.
    Blank lines are skipped.

    Raises :py:exc:`RecordFileError` for a line that is not a valid record.
    """
    for path in paths:
        logger.debug(f"Reading walk records from {path}")
        with open(path, "r", encoding="utf-8") as f:
            for line_no, line in enumerate(f, start=1):
                if not line.strip():
                    continue
                try:
                    record = json.loads(line)
                except json.JSONDecodeError as e:
                    raise RecordFileError(f"Not valid JSON: {e}", line_no) from e
                if not isinstance(record, dict):
                    raise RecordFileError("A record must be a JSON object", line_no)
                try:
                    yield walk_from_record(record)
                except RecordFileError as e:
                    raise RecordFileError(str(e), line_no) from e


def load_walks(*paths: PathLike) -> List[Walk]:
    return list(read_walk_records(*paths))


def completed_seeds(path: PathLike) -> Set[int]:
    """
    Seeds of the walks already present in a walk-record file;
    an empty set if the file does not exist.
    """
    if not os.path.exists(path):
        return set()
    return {w.seed for w in read_walk_records(path)}
