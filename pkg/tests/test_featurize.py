import json
import random

import numpy as np
import pytest

from genmol import corpus
from ilkit.chem import parse_smiles, write_smiles
from ilkit.datasets import STANDARD_TEMPERATURE, SystemRecord, validate_record
from ilkit.errors import RecordError
from ilkit.featurize import (
    ATOM_FEATURE_WIDTH,
    BOND_FEATURE_WIDTH,
    ELEMENT_VOCAB,
    assemble_system,
    atom_features,
    bond_features,
    is_conjugated,
)

_ONE_HOT_BLOCKS = [
    (0, len(ELEMENT_VOCAB)),
    (13, 7),        # degree 0-6
    (20, 4),        # hybridization
    (24, 6),        # implicit valence 0-5
    (31, 5),        # formal charge -2..+2
]


def test_methane_row():
    rows = atom_features(parse_smiles("C"))
    assert rows.shape == (1, ATOM_FEATURE_WIDTH)
    row = rows[0]
    assert row[ELEMENT_VOCAB.index("C")] == 1.0
    assert row[13 + 0] == 1.0          # degree 0
    assert row[20 + 2] == 1.0          # sp3
    assert row[24 + 4] == 1.0          # 4 implicit hydrogens
    assert row[30] == 0.0              # not aromatic
    assert row[31 + 2] == 1.0          # neutral
    assert row[36] == 0.0 and row[37] == 0.0


def test_benzene_rows_identical_sp2_aromatic():
    rows = atom_features(parse_smiles("c1ccccc1"))
    assert rows.shape == (6, ATOM_FEATURE_WIDTH)
    assert np.allclose(rows, rows[0])
    assert rows[0][20 + 1] == 1.0      # sp2
    assert rows[0][30] == 1.0          # aromatic


def test_emim_single_positive_charge_row(ions):
    rows = atom_features(parse_smiles(ions["EMIM_cation"]))
    plus_column = rows[:, 31 + 3]
    assert plus_column.sum() == 1.0


def test_one_hot_blocks_sum_to_one():
    for mol in corpus(seed=13, size=60):
        rows = atom_features(mol)
        for start, width in _ONE_HOT_BLOCKS:
            sums = rows[:, start : start + width].sum(axis=1)
            assert np.allclose(sums, 1.0)


def test_row_order_is_canonical():
    rng = random.Random(8)
    for mol in corpus(seed=17, size=40):
        ref = atom_features(mol)
        perm = list(range(len(mol.atoms)))
        rng.shuffle(perm)
        again = atom_features(parse_smiles(write_smiles(mol, order=perm)))
        assert np.allclose(ref, again)


def test_ethane_bond_row():
    rows, endpoints = bond_features(parse_smiles("CC"))
    assert rows.shape == (1, BOND_FEATURE_WIDTH)
    row = rows[0]
    assert row[0] == 1.0               # single
    assert row[4] == 1.0               # stereo none
    assert row[7] == 0.0               # not conjugated
    assert row[8] == 0.0               # not in ring


def test_benzene_bond_rows():
    rows, _ = bond_features(parse_smiles("c1ccccc1"))
    assert rows.shape == (6, BOND_FEATURE_WIDTH)
    assert np.all(rows[:, 3] == 1.0)   # aromatic type
    assert np.all(rows[:, 7] == 1.0)   # conjugated
    assert np.all(rows[:, 8] == 1.0)   # in ring


def test_trans_butene_stereo_row():
    mol = parse_smiles("C/C=C/C")
    rows, _ = bond_features(mol)
    double_row = next(
        rows[i] for i, b in enumerate(mol.bonds) if b.order == "double"
    )
    assert double_row[6] == 1.0        # trans slot


def test_butadiene_conjugation():
    mol = parse_smiles("C=CC=C")
    middle = next(
        bi for bi, b in enumerate(mol.bonds) if b.order == "single"
    )
    assert is_conjugated(mol, middle)


def test_isolated_single_bond_not_conjugated():
    mol = parse_smiles("CCC=C")
    first = next(
        bi
        for bi, b in enumerate(mol.bonds)
        if b.order == "single" and mol.atoms[b.a].element == "C"
        and {b.a, b.b} == {0, 1}
    )
    assert not is_conjugated(mol, first)


def _record(**kw):
    return validate_record(SystemRecord(**kw))


def test_assemble_il_bulk(ions):
    rec = _record(
        category="il_bulk_with_T",
        cation=ions["EMIM_cation"],
        anion=ions["TF2N_anion"],
        temperature=STANDARD_TEMPERATURE,
    )
    sg = assemble_system(rec)
    assert [g.role for g in sg.molecules] == ["cation", "anion"]
    assert sg.temperature == STANDARD_TEMPERATURE
    assert sg.category_one_hot == [0.0, 0.0, 1.0, 0.0]
    assert sg.n_atoms == sum(g.atoms.shape[0] for g in sg.molecules)


def test_assemble_il_solute_three_graphs(ions):
    rec = _record(
        category="il_solute",
        cation=ions["EMIM_cation"],
        anion=ions["TF2N_anion"],
        solute=ions["CO2_solute"],
        temperature=298.15,
    )
    sg = assemble_system(rec)
    assert [g.role for g in sg.molecules] == ["cation", "anion", "solute"]


def test_assemble_melting_point_record(ions):
    rec = _record(
        category="il_bulk_no_T",
        cation=ions["EMIM_cation"],
        anion=ions["TF2N_anion"],
        property="melting_point",
        value=250.0,
    )
    sg = assemble_system(rec)
    assert sg.temperature is None
    assert sg.category_one_hot == [0.0, 0.0, 0.0, 1.0]


def test_role_category_mismatch_rejected(ions):
    rec = SystemRecord(
        category="il_bulk_with_T",
        cation=ions["EMIM_cation"],
        anion=ions["TF2N_anion"],
        solute=ions["CO2_solute"],
        temperature=298.15,
    )
    with pytest.raises(RecordError):
        assemble_system(rec)


def test_json_payload_shape(ions):
    rec = _record(
        category="il_bulk_with_T",
        cation=ions["EMIM_cation"],
        anion=ions["TF2N_anion"],
        temperature=298.15,
    )
    payload = assemble_system(rec).to_json_dict()
    blob = json.loads(json.dumps(payload))
    assert blob["schema_version"] == 1
    assert blob["atom_feature_width"] == ATOM_FEATURE_WIDTH
    for g in blob["molecules"]:
        assert len(g["atom_features"]) == g["n_atoms"]
        assert all(len(row) == ATOM_FEATURE_WIDTH for row in g["atom_features"])
        assert all(len(row) == BOND_FEATURE_WIDTH for row in g["bond_features"])
        for a, b in g["bonds"]:
            assert 0 <= a < g["n_atoms"] and 0 <= b < g["n_atoms"]
