# SPDX-License-Identifier: MIT

from .backend import ArchiveBackend, ArchiveResponse, HttpBackend  # noqa: F401
from .client import ArchiveClient, ClientConfig  # noqa: F401
from .errors import (  # noqa: F401
    ArchiveDriftBaseException,
    ArchiveFetchError,
    ArchiveTransportError,
    EmptyTimeMapError,
    InvalidConfigError,
    MalformedDatetimeError,
    MalformedUriError,
    NotArchiveUriError,
    RecordFileError,
    RelaxedPairExhaustedError,
    UnknownUriError,
)
from .memento import (  # noqa: F401
    best_memento,
    build_wayback_uri,
    compute_drift,
    parse_wayback_uri,
)
from .sim import FaultSpec, FixedPage, SimArchive, SimConfig  # noqa: F401
from .sim_server import SimArchiveServer  # noqa: F401
from .types import (  # noqa: F401
    DereferenceChain,
    Drift,
    DriftBasis,
    FetchKind,
    FetchOutcome,
    Hop,
    HopKind,
    MementoUri,
    Sample,
    StopCause,
    StopKind,
    StopStage,
    TimeMap,
    Walk,
    WalkMode,
    WalkStep,
)
from .walk import WalkConfig, WalkEngine, generate_walk_seeds  # noqa: F401
