"""tacx: exact verification of totally acyclic complexes over short graded algebras."""

__version__ = "0.1.0"

from .linalg import DEFAULT_PRIME, FieldError, PrimeField
from .presentation import (
    BipartiteGraph,
    InvalidPresentation,
    ParseError,
    Presentation,
    load_graph,
    load_ring,
    parse_graph_file,
    parse_ring_file,
    presentations_equivalent,
    serialize_graph,
    serialize_ring,
    write_report,
)
from .algebra import Element, ShortAlgebra, build_algebra, derive_r0, verify_truncation

__all__ = [
    "DEFAULT_PRIME",
    "FieldError",
    "PrimeField",
    "BipartiteGraph",
    "InvalidPresentation",
    "ParseError",
    "Presentation",
    "load_graph",
    "load_ring",
    "parse_graph_file",
    "parse_ring_file",
    "presentations_equivalent",
    "serialize_graph",
    "serialize_ring",
    "write_report",
    "Element",
    "ShortAlgebra",
    "build_algebra",
    "derive_r0",
    "verify_truncation",
]
