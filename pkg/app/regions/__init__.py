"""
Region families, realizations and the retrieval oracle
"""

from app.regions.family import (
    Family, RegionDesc, RegionKind, RegionState, Realization, RetrievalOracle,
    VertexRecord, build_family, vertex_set, vertically_separated,
)
from app.regions.sampling import sample_realization

__all__ = [
    "Family",
    "RegionDesc",
    "RegionKind",
    "RegionState",
    "Realization",
    "RetrievalOracle",
    "VertexRecord",
    "build_family",
    "vertex_set",
    "vertically_separated",
    "sample_realization",
]
