"""Bitmap and maxLength encodings of route origin authorizations."""

from ._hroa import (
    AddressBlock,
    Error,
    ErrorReportReceived,
    HangingLevels,
    HybridConfig,
    ParseError,
    Prefix,
    ProtocolError,
    RangeError,
    SubTreeBlock,
    TransportError,
    WireError,
    Workload,
    compress_minimal,
    decode,
    decode_blocks,
    encode,
    encode_batch,
    node_number,
    optimize_levels,
    pdu_types,
    scatter_degree,
    simulated_cost,
    subtree_id,
    sweep,
)

__all__ = [name for name in dir() if not name.startswith("_")]
