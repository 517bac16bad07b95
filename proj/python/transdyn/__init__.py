"""Transient population dynamics from geolocated mobility events."""

from ._transdyn import (
    BaseAssignment,
    ConfigError,
    DataError,
    EventBatch,
    IoError,
    MobilityEvent,
    ModelParams,
    MovementEdge,
    OracleSizeError,
    cell_token,
    cli,
    generate,
    infer_bases,
    movement_edges,
    parse_events,
    run_oracle,
    run_pipeline,
)

__all__ = [
    "BaseAssignment",
    "ConfigError",
    "DataError",
    "EventBatch",
    "IoError",
    "MobilityEvent",
    "ModelParams",
    "MovementEdge",
    "OracleSizeError",
    "cell_token",
    "cli",
    "generate",
    "infer_bases",
    "movement_edges",
    "parse_events",
    "run_oracle",
    "run_pipeline",
]
