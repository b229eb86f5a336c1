"""Molecular graph core: SMILES parsing, perception, canonicalization."""

from .build import from_graph
from .canon import canonicalize, structural_match, write_smiles
from .mol import (
    AROMATIC,
    DOUBLE,
    SINGLE,
    STEREO_CIS,
    STEREO_NONE,
    STEREO_TRANS,
    TRIPLE,
    Atom,
    Bond,
    Molecule,
)
from .parser import parse_smiles


def perceive_rings(mol: Molecule) -> tuple[tuple[int, ...], ...]:
    """Smallest set of smallest rings, as atom-index cycles."""
    return mol.rings


__all__ = [
    "Atom",
    "Bond",
    "Molecule",
    "parse_smiles",
    "write_smiles",
    "canonicalize",
    "structural_match",
    "perceive_rings",
    "from_graph",
    "SINGLE",
    "DOUBLE",
    "TRIPLE",
    "AROMATIC",
    "STEREO_NONE",
    "STEREO_CIS",
    "STEREO_TRANS",
]
