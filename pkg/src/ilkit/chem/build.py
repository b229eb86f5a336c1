"""Programmatic molecule construction (used by generators and tests)."""

from __future__ import annotations

from dataclasses import replace
from typing import Iterable, Sequence

from ..errors import IlkitError
from .mol import DOUBLE, Molecule, SINGLE
from .parser import _RawAtom, finalize

_HYDROGEN_SENTINEL = -1


def from_graph(atoms: Iterable[dict], bonds: Iterable[Sequence]) -> Molecule:
    """Build a molecule from explicit atoms and bonds.

    Each atom dict accepts: element (required), charge, explicit_h, aromatic,
    isotope, chirality. When ``explicit_h`` is omitted the atom is treated
    like a bare SMILES atom and implicit hydrogens are filled from the
    valence table; chiral atoms must state ``explicit_h`` so their neighbor
    frame (ascending indices, hydrogen first) is well defined.

    Bonds are (a, b, order) triples (order defaults to single) with an
    optional fourth stereo entry ("cis"/"trans") interpreted relative to the
    lowest-rank substituent on each end.

    The same perception pipeline as SMILES parsing runs afterwards, so the
    result is indistinguishable from a parsed molecule.
    """
    raw_atoms = []
    atom_specs = list(atoms)
    for spec in atom_specs:
        element = spec["element"]
        explicit_h = spec.get("explicit_h")
        chirality = spec.get("chirality", "")
        if chirality and explicit_h is None:
            raise IlkitError("chiral atoms need an explicit hydrogen count")
        raw_atoms.append(
            _RawAtom(
                element=element,
                charge=spec.get("charge", 0),
                explicit_h=explicit_h if explicit_h is not None else 0,
                aromatic=spec.get("aromatic", False),
                isotope=spec.get("isotope"),
                chirality=chirality,
                bracket=explicit_h is not None,
            )
        )

    raw_bonds = []
    stereo_requests: list[tuple[int, str]] = []
    neighbors: dict[int, list[int]] = {}
    for spec in bonds:
        if len(spec) < 2:
            raise IlkitError("bond spec needs at least two atom indices")
        a, b = int(spec[0]), int(spec[1])
        order = spec[2] if len(spec) > 2 else SINGLE
        raw_bonds.append([a, b, order, 0])
        neighbors.setdefault(a, []).append(b)
        neighbors.setdefault(b, []).append(a)
        if len(spec) > 3 and spec[3] not in (None, "none"):
            stereo_requests.append((len(raw_bonds) - 1, spec[3]))

    # Default chiral frame: implicit-H slot first, then neighbors ascending.
    seqs: dict[int, list] = {}
    for i, raw in enumerate(raw_atoms):
        if raw.chirality:
            seq: list = [_HYDROGEN_SENTINEL] if raw.explicit_h else []
            seq.extend(sorted(neighbors.get(i, [])))
            seqs[i] = seq

    mol = finalize(raw_atoms, raw_bonds, seqs)
    if stereo_requests:
        new_bonds = list(mol.bonds)
        for bi, stereo in stereo_requests:
            if new_bonds[bi].order != DOUBLE:
                raise IlkitError("stereo labels are only valid on double bonds")
            new_bonds[bi] = replace(new_bonds[bi], stereo=stereo)
        chiral = {
            i: mol.chiral_neighbor_order(i)
            for i in range(len(mol.atoms))
            if mol.chiral_neighbor_order(i) is not None
        }
        mol = Molecule(mol.atoms, tuple(new_bonds), mol.rings, chiral)
    return mol
