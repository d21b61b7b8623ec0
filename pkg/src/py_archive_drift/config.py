# SPDX-License-Identifier: MIT

"""
Run configuration of the command line, sample files and the presets of
the simulated archive.
"""

import argparse
import os
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Optional, Tuple

from .errors import InvalidConfigError, MalformedUriError
from .sim import SimConfig
from .types import Sample, WalkMode
from .uri import normalize_uri
from .walk import generate_walk_seeds

# Sample classes of the four sources of sample URI-Rs
SAMPLE_CLASSES = ("dmoz", "delicious", "bitly", "searchengine")

BACKEND_SIM = "sim"
BACKEND_LIVE = "live"

# Default delay before retrying an HTTP 503, per backend kind
DEFAULT_RETRY_DELAY = {BACKEND_SIM: 1.0, BACKEND_LIVE: 600.0}


@dataclass(frozen=True)
class RunConfig:
    """
    Settings of one campaign run.
    """

    backend: str
    """
    ``sim:<corpus file>`` or ``live:<archive base URI>``.
    """

    samples: Optional[str] = None
    """
    Sample file. Optional for a simulated archive, whose own samples are used.
    """

    mode: WalkMode = WalkMode.STRICT
    max_steps: int = 50
    walks: int = 1000

    seed: Optional[int] = None
    """
    Master seed the walk seeds are derived from.
    """

    seed_file: Optional[str] = None
    """
    File with one walk seed per line, used instead of :py:attr:`seed`.
    """

    parallelism: int = 1

    retry_delay: Optional[float] = None
    """
    Delay before retrying an HTTP 503; by default 1 s for a simulated
    archive and 600 s for a live one.
    """

    politeness_delay: float = 1.0
    """
    Minimum interval (seconds) between requests to the same live host.
    """

    out: str = "out"
    strip_chrome: bool = False

    @property
    def backend_kind(self) -> str:
        return self.backend.partition(":")[0]

    @property
    def backend_target(self) -> str:
        return self.backend.partition(":")[2]

    @property
    def effective_retry_delay(self) -> float:
        if self.retry_delay is not None:
            return self.retry_delay
        return DEFAULT_RETRY_DELAY[self.backend_kind]

    def validate(self) -> None:
        """
        Raise :py:exc:`InvalidConfigError` if the configuration is not usable.
        """
        kind, sep, target = self.backend.partition(":")
        if not sep or kind not in (BACKEND_SIM, BACKEND_LIVE) or not target:
            raise InvalidConfigError(
                f"Backend must be sim:<corpus file> or live:<archive URI>, "
                f"got {self.backend!r}"
            )
        if kind == BACKEND_LIVE:
            if self.politeness_delay <= 0:
                raise InvalidConfigError("A live archive needs a politeness delay")
            if self.samples is None:
                raise InvalidConfigError("A live archive needs a sample file")
        if self.max_steps < 1:
            raise InvalidConfigError("Maximum number of steps must be at least 1")
        if self.walks < 0:
            raise InvalidConfigError("Number of walks must not be negative")
        if self.parallelism < 1:
            raise InvalidConfigError("Parallelism must be at least 1")
        if self.retry_delay is not None and self.retry_delay < 0:
            raise InvalidConfigError("Retry delay must not be negative")
        if self.politeness_delay < 0:
            raise InvalidConfigError("Politeness delay must not be negative")
        if self.seed is not None and self.seed_file is not None:
            raise InvalidConfigError("Use either a seed or a seed file, not both")

    @staticmethod
    def from_args(args: argparse.Namespace) -> "RunConfig":
        cfg = RunConfig(
            backend=args.backend,
            samples=args.samples,
            mode=WalkMode(args.mode),
            max_steps=args.max_steps,
            walks=args.walks,
            seed=args.seed,
            seed_file=args.seed_file,
            parallelism=args.parallelism,
            retry_delay=args.retry_delay,
            politeness_delay=args.politeness_delay,
            out=args.out,
            strip_chrome=args.strip_chrome,
        )
        cfg.validate()
        return cfg

    def walk_seeds(self) -> List[int]:
        """
        Seeds of the walks of the run: read from the seed file, or derived
        from the master seed.
        """
        if self.seed_file is not None:
            return load_seeds(self.seed_file)
        if self.seed is None:
            raise InvalidConfigError("No seed given")
        return generate_walk_seeds(self.seed, self.walks)

    def echo(self) -> Dict[str, Any]:
        """
        The settings that determine the results of the run, for the report.
        The output directory is left out.
        """
        return {
            "backend": self.backend,
            "max_steps": self.max_steps,
            "mode": self.mode.value,
            "samples": self.samples,
            "seed": self.seed,
            "seed_file": self.seed_file,
            "strip_chrome": self.strip_chrome,
            "walks": self.walks,
        }


def load_seeds(path: str) -> List[int]:
    """
    Read walk seeds, one integer per line. Blank lines and lines starting
    with ``#`` are skipped.
    """
    seeds: List[int] = []
    with open(path, "r", encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                seeds.append(int(line, 0))
            except ValueError:
                raise InvalidConfigError(
                    f"{path}:{line_no}: not a valid seed: {line!r}"
                ) from None
    if len(set(seeds)) != len(seeds):
        raise InvalidConfigError(f"{path}: walk seeds must be distinct")
    return seeds


def parse_sample_line(line: str) -> Optional[Tuple[str, Optional[str]]]:
    """
    Split one line of a sample file into the URI and the optional sample class.
    Returns ``None`` for blank lines and comments.
    """
    line = line.strip()
    if not line or line.startswith("#"):
        return None
    fields = line.split()
    if len(fields) > 2:
        raise ValueError(f"Expected a URI and an optional class: {line!r}")
    return fields[0], fields[1] if len(fields) == 2 else None


def load_samples(path: str) -> List[Sample]:
    """
    Read a sample file: one URI-R per line, optionally followed by
    whitespace and a sample class. URIs are normalized; duplicates after
    normalization are dropped (the first one is kept).

    Raises :py:exc:`InvalidConfigError` for a line that cannot be used.
    """
    samples: List[Sample] = []
    seen = set()
    with open(path, "r", encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            try:
                parsed = parse_sample_line(line)
                if parsed is None:
                    continue
                uri = normalize_uri(parsed[0])
            except (ValueError, MalformedUriError) as e:
                raise InvalidConfigError(f"{path}:{line_no}: {e}") from e
            if uri not in seen:
                seen.add(uri)
                samples.append(Sample(uri, parsed[1]))
    if not samples:
        raise InvalidConfigError(f"{path}: no sample URIs")
    return samples


def write_samples(path: str, samples: Iterable[Sample]) -> None:
    dirname = os.path.dirname(path)
    if dirname:
        os.makedirs(dirname, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for s in samples:
            f.write(s.uri if s.sample_class is None else f"{s.uri}\t{s.sample_class}")
            f.write("\n")


def default_campaign_sim_config(seed: int = 0) -> SimConfig:
    """
    The simulated archive the drift properties are checked on.

    40 sites of 10-30 pages crawled every 60 days for 13 years with no jitter;
    each page is captured by a crawl with a probability of its own between
    0.5 and 1. Pages have 3-10 outlinks, 30 % of them to other sites, and
    re-draw 10 % of them every year. Every home page is archived and there
    are no faults.
    """
    return SimConfig(
        seed=seed,
        n_sites=40,
        pages_per_site=(10, 30),
        crawl_interval_days=60.0,
        crawl_jitter_days=0.0,
        capture_probability=(0.5, 1.0),
        intra_site_links=(3, 10),
        cross_site_link_probability=0.3,
        change_interval_days=365.0,
        link_churn=0.1,
        sample_classes=list(SAMPLE_CLASSES),
    )


def realistic_sim_config(seed: int = 0) -> SimConfig:
    """
    A simulated archive with the weaknesses of a real one: home pages of the
    four sample classes archived at very different rates, many unarchived
    pages, an archive toolbar in every memento, redirects and failing
    downloads. Walks on it are mostly short.
    """
    return SimConfig(
        seed=seed,
        n_sites=100,
        pages_per_site=(5, 40),
        crawl_interval_days=45.0,
        crawl_jitter_days=10.0,
        capture_probability=(0.2, 0.9),
        intra_site_links=(2, 15),
        cross_site_link_probability=0.4,
        change_interval_days=180.0,
        link_churn=0.3,
        sample_classes=list(SAMPLE_CLASSES),
        archival_rates={
            "dmoz": 0.952,
            "delicious": 0.919,
            "bitly": 0.235,
            "searchengine": 0.264,
        },
        page_archival_rate=0.7,
        hub_site=True,
        inject_toolbar=True,
        fault_rates={
            "http_403": 0.002,
            "http_404": 0.01,
            "http_503": 0.002,
            "not_html": 0.002,
            "redirect": 0.05,
            "soft_redirect": 0.02,
            "download_failed": 0.002,
            "other": 0.001,
        },
        timemap_fault_rates={
            "http_403": 0.002,
            "http_503": 0.001,
            "download_failed": 0.001,
            "other": 0.001,
        },
    )


SIM_PRESETS = {
    "default": default_campaign_sim_config,
    "realistic": realistic_sim_config,
}
