"""Enumeration and certification of combinatorial 3-spheres with prescribed f-vector."""

from .fvector import FVector, candidate_stream, fatness, screen, size, steinitz3_member
from .lattice import FaceLattice, lattice_code
from .pipeline import ClassificationRecord, find_lattices, verify_bundle

__all__ = [
    "FVector",
    "FaceLattice",
    "ClassificationRecord",
    "candidate_stream",
    "fatness",
    "find_lattices",
    "lattice_code",
    "screen",
    "size",
    "steinitz3_member",
    "verify_bundle",
]
__version__ = "0.1.0"
