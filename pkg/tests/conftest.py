import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ilkit.chem import parse_smiles


def load_ions() -> dict[str, str]:
    """name -> SMILES for the bundled ion fixture."""
    from importlib import resources

    text = resources.files("ilkit").joinpath("data/ions.smi").read_text()
    out = {}
    for line in text.strip().splitlines():
        smiles, name = line.split()
        out[name] = smiles
    return out


@pytest.fixture(scope="session")
def ions() -> dict[str, str]:
    return load_ions()


@pytest.fixture(scope="session")
def ion_molecules(ions):
    return {name: parse_smiles(smiles) for name, smiles in ions.items()}
