"""
Exception hierarchy for the reconstruction toolkit
All errors raised by the library derive from ReconstructionException
"""

from typing import Optional


class ReconstructionException(Exception):
    """Base exception for reconstruction operations"""
    pass


class GeometryException(ReconstructionException):
    """Base exception for geometric primitives"""
    pass


class ChainPreconditionError(GeometryException):
    """Raised when two chains handed to the bridge search are not x-separated"""
    pass


class ShapeError(GeometryException):
    """Raised when a shape cannot be constructed from its inputs"""
    pass


class FamilyValidationError(ReconstructionException):
    """Raised when a region family violates its mode constraints"""

    def __init__(self, message: str, reason: Optional[str] = None,
                 region_ids: Optional[tuple] = None):
        super().__init__(message)
        self.reason = reason
        self.region_ids = region_ids or ()


class RetrievalError(ReconstructionException):
    """Raised when a retrieval targets a sentinel or an unknown region"""
    pass


class OracleLimitError(ReconstructionException):
    """Raised when brute-force optimum search is asked for an oversized instance"""
    pass


class StructureError(ReconstructionException):
    """Raised when a dynamic structure receives an invalid update or query"""
    pass


class EngineModeError(ReconstructionException):
    """Raised when an engine is run on a family of the wrong mode"""
    pass


class WitnessAuditError(ReconstructionException):
    """Raised when an engine step disagrees with the ground-truth classifier"""
    pass


class InstanceFormatError(ReconstructionException):
    """Raised when an instance file cannot be parsed"""
    pass


__all__ = [
    "ReconstructionException",
    "GeometryException",
    "ChainPreconditionError",
    "ShapeError",
    "FamilyValidationError",
    "RetrievalError",
    "OracleLimitError",
    "StructureError",
    "EngineModeError",
    "InstanceFormatError",
    "WitnessAuditError",
]
