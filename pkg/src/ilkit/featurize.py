"""Graph featurization: per-atom and per-bond encodings plus multi-molecule
system assembly.

Atom rows follow canonical SMILES order, so two encodings of the same
molecule produce identical feature matrices. Each one-hot block sums to 1
on every row.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chem.mol import AROMATIC, DOUBLE, Molecule, SINGLE, STEREO_CIS, STEREO_TRANS, TRIPLE
from .errors import RecordError

ELEMENT_VOCAB = ("H", "B", "C", "N", "O", "F", "Si", "P", "S", "Cl", "Br", "I", "other")
DEGREE_MAX = 6
HYBRIDIZATIONS = ("sp", "sp2", "sp3", "other")
IMPLICIT_VALENCE_MAX = 5
CHARGE_RANGE = (-2, -1, 0, 1, 2)
BOND_TYPES = (SINGLE, DOUBLE, TRIPLE, AROMATIC)
STEREO_STATES = ("none", STEREO_CIS, STEREO_TRANS)

ATOM_FEATURE_WIDTH = (
    len(ELEMENT_VOCAB) + (DEGREE_MAX + 1) + len(HYBRIDIZATIONS)
    + (IMPLICIT_VALENCE_MAX + 1) + 1 + len(CHARGE_RANGE) + 2
)
BOND_FEATURE_WIDTH = len(BOND_TYPES) + len(STEREO_STATES) + 2

ROLE_ORDER = ("cation", "anion", "solute", "solvent")
CATEGORIES = ("il_solute", "organic_solute", "il_bulk_with_T", "il_bulk_no_T")

# Role sets each record category must carry; see ilkit.datasets.
CATEGORY_ROLES = {
    "il_solute": ("cation", "anion", "solute"),
    "organic_solute": ("solvent", "solute"),
    "il_bulk_with_T": ("cation", "anion"),
    "il_bulk_no_T": ("cation", "anion"),
}


def _one_hot(size: int, index: int) -> list[float]:
    row = [0.0] * size
    row[index] = 1.0
    return row


def hybridization(mol: Molecule, idx: int) -> str:
    """Topological heuristic: aromatic -> sp2, triple -> sp, double -> sp2,
    otherwise sp3."""
    atom = mol.atoms[idx]
    if atom.aromatic:
        return "sp2"
    orders = [mol.bonds[bi].order for _j, bi in mol.neighbors(idx)]
    if TRIPLE in orders:
        return "sp"
    if DOUBLE in orders:
        return "sp2"
    return "sp3"


def atom_features(mol: Molecule) -> np.ndarray:
    """One row per atom, rows in canonical SMILES order."""
    rows = []
    for idx in mol.canonical_order:
        atom = mol.atoms[idx]
        element = atom.element if atom.element in ELEMENT_VOCAB[:-1] else "other"
        row: list[float] = []
        row += _one_hot(len(ELEMENT_VOCAB), ELEMENT_VOCAB.index(element))
        row += _one_hot(DEGREE_MAX + 1, min(mol.degree(idx), DEGREE_MAX))
        row += _one_hot(len(HYBRIDIZATIONS), HYBRIDIZATIONS.index(hybridization(mol, idx)))
        row += _one_hot(IMPLICIT_VALENCE_MAX + 1, min(atom.implicit_h, IMPLICIT_VALENCE_MAX))
        row.append(1.0 if atom.aromatic else 0.0)
        charge = max(CHARGE_RANGE[0], min(CHARGE_RANGE[-1], atom.formal_charge))
        row += _one_hot(len(CHARGE_RANGE), CHARGE_RANGE.index(charge))
        is_no = atom.element in ("N", "O")
        row.append(1.0 if is_no and atom.total_h >= 1 else 0.0)  # donor
        row.append(1.0 if is_no else 0.0)                        # acceptor
        rows.append(row)
    out = np.array(rows, dtype=float) if rows else np.zeros((0, ATOM_FEATURE_WIDTH))
    assert out.shape[1] == ATOM_FEATURE_WIDTH
    return out


def is_conjugated(mol: Molecule, bond_index: int) -> bool:
    """Aromatic bonds, and single bonds flanked by a multiple/aromatic bond
    on each side."""
    bond = mol.bonds[bond_index]
    if bond.order == AROMATIC:
        return True
    if bond.order != SINGLE:
        return False

    def side_has_multiple(end: int) -> bool:
        for _j, bi in mol.neighbors(end):
            if bi == bond_index:
                continue
            if mol.bonds[bi].order in (DOUBLE, TRIPLE, AROMATIC):
                return True
        return False

    return side_has_multiple(bond.a) and side_has_multiple(bond.b)


def bond_features(mol: Molecule) -> tuple[np.ndarray, list[tuple[int, int]]]:
    """One row per bond plus endpoint pairs re-indexed to canonical order."""
    pos = {orig: k for k, orig in enumerate(mol.canonical_order)}
    rows = []
    endpoints = []
    for bi, bond in enumerate(mol.bonds):
        row: list[float] = []
        row += _one_hot(len(BOND_TYPES), BOND_TYPES.index(bond.order))
        row += _one_hot(len(STEREO_STATES), STEREO_STATES.index(bond.stereo))
        row.append(1.0 if is_conjugated(mol, bi) else 0.0)
        row.append(1.0 if bond.in_ring else 0.0)
        rows.append(row)
        endpoints.append((pos[bond.a], pos[bond.b]))
    out = np.array(rows, dtype=float) if rows else np.zeros((0, BOND_FEATURE_WIDTH))
    assert out.shape[1] == BOND_FEATURE_WIDTH
    return out, endpoints


@dataclass(frozen=True)
class MoleculeGraph:
    role: str
    smiles: str
    atoms: np.ndarray
    bonds: np.ndarray
    endpoints: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class SystemGraph:
    category: str
    temperature: float | None
    molecules: tuple[MoleculeGraph, ...]

    @property
    def category_one_hot(self) -> list[float]:
        return _one_hot(len(CATEGORIES), CATEGORIES.index(self.category))

    @property
    def n_atoms(self) -> int:
        return sum(g.atoms.shape[0] for g in self.molecules)

    def to_json_dict(self) -> dict:
        return {
            "schema_version": 1,
            "category": self.category,
            "temperature_K": self.temperature,
            "category_one_hot": self.category_one_hot,
            "atom_feature_width": ATOM_FEATURE_WIDTH,
            "bond_feature_width": BOND_FEATURE_WIDTH,
            "molecules": [
                {
                    "role": g.role,
                    "smiles": g.smiles,
                    "n_atoms": g.atoms.shape[0],
                    "atom_features": g.atoms.tolist(),
                    "bonds": [list(e) for e in g.endpoints],
                    "bond_features": g.bonds.tolist(),
                }
                for g in self.molecules
            ],
        }


def assemble_system(record) -> SystemGraph:
    """Concatenate a record's molecule graphs in fixed role order with the
    temperature feature and category tag. No cross-molecule edges exist."""
    from .chem import parse_smiles

    required = CATEGORY_ROLES[record.category]
    graphs = []
    for role in ROLE_ORDER:
        smiles = getattr(record, role)
        if smiles is None:
            if role in required:
                raise RecordError(f"category {record.category} requires a {role}")
            continue
        if role not in required:
            raise RecordError(f"category {record.category} must not carry a {role}")
        mol = parse_smiles(smiles)
        atoms = atom_features(mol)
        bonds, endpoints = bond_features(mol)
        graphs.append(MoleculeGraph(role, mol.canonical_smiles, atoms, bonds, tuple(endpoints)))
    return SystemGraph(record.category, record.temperature, tuple(graphs))
