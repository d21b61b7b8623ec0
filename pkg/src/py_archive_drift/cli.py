# SPDX-License-Identifier: MIT

"""
Command line interface.

.. code-block:: text

    py-archive-drift simgen --preset default --seed 7 --out corpus.json
    py-archive-drift campaign --backend sim:corpus.json --walks 1000 --seed 1 \\
        --out results/
    py-archive-drift report results/walks.jsonl --out results/
    py-archive-drift replay-example

Exit codes: 0 on success (failed walks are results, not errors),
1 for an invalid configuration, 2 for an I/O error.
"""

import argparse
import json
import logging
import os
import random
import sys
from dataclasses import replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .backend import ArchiveBackend, HttpBackend
from .client import ArchiveClient, ClientConfig
from .config import (
    BACKEND_SIM,
    SIM_PRESETS,
    RunConfig,
    load_samples,
    write_samples,
)
from .errors import InvalidConfigError, RecordFileError
from .records import WalkRecordWriter, completed_seeds, load_walks
from .replay import format_replay, replay_example
from .report import build_report, format_summary, write_comparison, write_report
from .sim import SimArchive, SimConfig
from .types import DriftBasis, Sample, WalkMode
from .walk import WalkConfig, WalkEngine

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG_ERROR = 1
EXIT_IO_ERROR = 2

WALKS_FILE = "walks.jsonl"
CAMPAIGN_FILE = "campaign.json"


def _add_logging_args(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument(
        "-v", "--verbose", action="store_true", help="Log every request"
    )
    group.add_argument(
        "-q", "--quiet", action="store_true", help="Log warnings and errors only"
    )


def _add_basis_arg(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--basis",
        choices=[b.value for b in DriftBasis],
        default=DriftBasis.WALK_TARGET.value,
        help=(
            "Target datetime the Sliding Target drift is measured against: "
            "the walk's initial one or the step's own (default: %(default)s)"
        ),
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="py-archive-drift",
        description=(
            "Measure the temporal drift of web archive browsing under the "
            "Sliding Target and Sticky Target policies"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simgen", help="Generate a simulated archive")
    p.add_argument("config", nargs="?", help="SimConfig JSON file")
    p.add_argument(
        "--preset",
        choices=sorted(SIM_PRESETS),
        default="default",
        help="Configuration used when no file is given (default: %(default)s)",
    )
    p.add_argument("--seed", type=int, help="Override the seed of the config")
    p.add_argument("--out", required=True, help="Corpus file to write")
    p.add_argument(
        "--export-samples", metavar="FILE", help="Also write the sample file"
    )
    _add_logging_args(p)

    p = sub.add_parser("campaign", help="Run a campaign of walks")
    p.add_argument(
        "--backend",
        required=True,
        help="sim:<corpus file> or live:<archive base URI>",
    )
    p.add_argument("--samples", help="Sample file (one URI-R per line)")
    p.add_argument(
        "--mode",
        choices=[m.value for m in WalkMode],
        default=WalkMode.STRICT.value,
    )
    p.add_argument("--walks", type=int, default=1000)
    p.add_argument("--max-steps", type=int, default=50)
    seeds = p.add_mutually_exclusive_group()
    seeds.add_argument("--seed", type=int, help="Master seed of the walk seeds")
    seeds.add_argument("--seed-file", help="File with one walk seed per line")
    p.add_argument("--parallelism", type=int, default=1)
    p.add_argument(
        "--retry-delay",
        type=float,
        default=None,
        help="Seconds before retrying a 503 (default: 1 sim, 600 live)",
    )
    p.add_argument("--politeness-delay", type=float, default=1.0)
    p.add_argument("--out", required=True, help="Output directory")
    p.add_argument(
        "--strip-chrome",
        action="store_true",
        help="Ignore links in the archive's navigation toolbar",
    )
    _add_basis_arg(p)
    _add_logging_args(p)

    p = sub.add_parser("replay-example", help="Replay the bundled worked example")
    p.add_argument("--seed", type=int, default=0, help="Printed for the record")
    _add_logging_args(p)

    p = sub.add_parser("report", help="Aggregate walk-record files")
    p.add_argument("records", nargs="+", help="Walk-record files")
    p.add_argument("--out", required=True, help="Output directory")
    p.add_argument(
        "--meta",
        help=(
            "Campaign description to echo in the report "
            f"(default: {CAMPAIGN_FILE} next to the first record file)"
        ),
    )
    p.add_argument("--seed", type=int, help="Printed for the record")
    _add_basis_arg(p)
    _add_logging_args(p)

    p = sub.add_parser(
        "compare", help="Compare a strict and a relaxed campaign on the same seeds"
    )
    p.add_argument("strict", help="Walk-record file of the strict-mode campaign")
    p.add_argument("relaxed", help="Walk-record file of the relaxed-mode campaign")
    p.add_argument("--out", required=True, help="CSV file to write")
    p.add_argument("--seed", type=int, help="Printed for the record")
    _add_basis_arg(p)
    _add_logging_args(p)

    return parser


def _setup_logging(args: argparse.Namespace) -> None:
    level = logging.INFO
    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.WARNING
    logging.basicConfig(
        level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s"
    )


def _print_seed(seed: Optional[int]) -> None:
    print(f"Seed: {seed if seed is not None else '-'}")


def cmd_simgen(args: argparse.Namespace) -> int:
    if args.config is not None:
        cfg = SimConfig.load(args.config)
    else:
        cfg = SIM_PRESETS[args.preset]()
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    _print_seed(cfg.seed)

    archive = SimArchive.generate(cfg)
    archive.save(args.out)
    if args.export_samples:
        write_samples(args.export_samples, archive.samples())
    print(f"Corpus hash: {archive.corpus_hash}")
    return EXIT_OK


def _open_backend(
    cfg: RunConfig,
) -> Tuple[ArchiveBackend, str, List[Sample], Optional[str]]:
    if cfg.backend_kind == BACKEND_SIM:
        archive = SimArchive.load(cfg.backend_target)
        samples = (
            load_samples(cfg.samples) if cfg.samples is not None else archive.samples()
        )
        # The simulated archive answers any base; this one only names its URI-Ms
        return archive, "http://sim.archive", samples, archive.corpus_hash

    assert cfg.samples is not None
    backend = HttpBackend(politeness_delay=cfg.politeness_delay)
    return backend, cfg.backend_target, load_samples(cfg.samples), None


def _check_campaign_file(path: str, meta: Dict[str, Any]) -> None:
    if not os.path.exists(path):
        return
    with open(path, "r", encoding="utf-8") as f:
        existing = json.load(f)
    if existing != meta:
        raise InvalidConfigError(
            f"{path} describes a different campaign; use another output directory"
        )


def _write_json(path: str, obj: Any) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def cmd_campaign(args: argparse.Namespace) -> int:
    cfg = RunConfig.from_args(args)
    if cfg.seed is None and cfg.seed_file is None:
        cfg = replace(cfg, seed=random.SystemRandom().getrandbits(32))
    _print_seed(cfg.seed)

    seeds = cfg.walk_seeds()
    backend, archive_base, samples, corpus_hash = _open_backend(cfg)
    meta = {"config": cfg.echo(), "corpus_hash": corpus_hash}

    os.makedirs(cfg.out, exist_ok=True)
    meta_path = os.path.join(cfg.out, CAMPAIGN_FILE)
    records_path = os.path.join(cfg.out, WALKS_FILE)
    _check_campaign_file(meta_path, meta)
    _write_json(meta_path, meta)

    done = completed_seeds(records_path)
    todo = [s for s in seeds if s not in done]
    if done:
        logger.info(f"Resuming: {len(seeds) - len(todo)} walks already recorded")

    client = ArchiveClient(
        backend, archive_base, ClientConfig(retry_delay=cfg.effective_retry_delay)
    )
    engine = WalkEngine(
        client,
        samples,
        WalkConfig(
            mode=cfg.mode,
            max_steps=cfg.max_steps,
            strip_chrome=cfg.strip_chrome,
            parallelism=cfg.parallelism,
        ),
    )
    try:
        with WalkRecordWriter(records_path, append=True) as writer:
            engine.run_campaign(todo, on_walk=writer.write)
    finally:
        if isinstance(backend, HttpBackend):
            backend.close()

    walks = load_walks(records_path)
    basis = DriftBasis(args.basis)
    report = build_report(walks, basis, max_steps=cfg.max_steps)
    write_report(report, cfg.out, meta["config"], corpus_hash)
    print(format_summary(report.summary))
    return EXIT_OK


def _load_meta(args: argparse.Namespace) -> Dict[str, Any]:
    path = args.meta
    if path is None:
        candidate = os.path.join(os.path.dirname(args.records[0]), CAMPAIGN_FILE)
        if not os.path.exists(candidate):
            return {"config": {}, "corpus_hash": None}
        path = candidate
    with open(path, "r", encoding="utf-8") as f:
        meta = json.load(f)
    if not isinstance(meta, dict) or "config" not in meta:
        raise InvalidConfigError(f"{path}: not a campaign description")
    return meta


def cmd_report(args: argparse.Namespace) -> int:
    meta = _load_meta(args)
    seed = meta["config"].get("seed") if args.seed is None else args.seed
    _print_seed(seed)

    walks = load_walks(*args.records)
    max_steps = meta["config"].get("max_steps", 50)
    report = build_report(walks, DriftBasis(args.basis), max_steps=max_steps)
    write_report(report, args.out, meta["config"], meta.get("corpus_hash"))
    print(format_summary(report.summary))
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    _print_seed(args.seed)
    basis = DriftBasis(args.basis)
    strict = build_report(load_walks(args.strict), basis).summary
    relaxed = build_report(load_walks(args.relaxed), basis).summary
    write_comparison(strict, relaxed, args.out)
    print(f"Comparison written to {args.out}")
    return EXIT_OK


def cmd_replay_example(args: argparse.Namespace) -> int:
    _print_seed(args.seed)
    print(format_replay(replay_example()))
    return EXIT_OK


_COMMANDS = {
    "simgen": cmd_simgen,
    "campaign": cmd_campaign,
    "replay-example": cmd_replay_example,
    "report": cmd_report,
    "compare": cmd_compare,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    _setup_logging(args)
    try:
        return _COMMANDS[args.command](args)
    except InvalidConfigError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except (OSError, RecordFileError, json.JSONDecodeError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_IO_ERROR


if __name__ == "__main__":
    sys.exit(main())
