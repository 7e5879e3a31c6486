"""Search for primes p at which the harmonic number H_floor(p/N) vanishes mod p."""
from .congruence import (
    HarmonicInstance,
    MethodKind,
    fermat_quotient,
    harmonic_residue_direct,
    is_zero,
    lehmer_residue,
    residue,
    residue_432,
    scaled_zero_form,
)
from .search import SearchSpec, ZeroRecord, resume, run_search, verify_single

__version__ = "0.1.0"

__all__ = [
    "HarmonicInstance",
    "MethodKind",
    "SearchSpec",
    "ZeroRecord",
    "fermat_quotient",
    "harmonic_residue_direct",
    "is_zero",
    "lehmer_residue",
    "residue",
    "residue_432",
    "resume",
    "run_search",
    "scaled_zero_form",
    "verify_single",
]
