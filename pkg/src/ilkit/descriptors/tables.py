"""Loaders for the versioned contribution-table data files."""

from __future__ import annotations

from functools import lru_cache
from importlib import resources

from ..errors import SchemaError


def _read_table(name: str, n_values: int) -> dict[str, tuple[float, ...]]:
    text = resources.files("ilkit.descriptors").joinpath("data", name).read_text()
    expected_rows = expected_checksum = None
    rows: dict[str, tuple[float, ...]] = {}
    checksum = 0
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            if "rows=" in line and "checksum=" in line:
                parts = dict(p.split("=") for p in line[1:].split())
                expected_rows = int(parts["rows"])
                expected_checksum = int(parts["checksum"])
            continue
        fields = line.split("\t")
        if len(fields) != n_values + 1:
            raise SchemaError(f"{name}: row {line!r} has {len(fields)} fields, expected {n_values + 1}")
        key = fields[0]
        if key in rows:
            raise SchemaError(f"{name}: duplicate entry {key!r}")
        values = []
        for v in fields[1:]:
            x = 0.0 if v == "-" else float(v)
            if v != "-":
                checksum += round(x * 10000)
            values.append(x)
        rows[key] = tuple(values)
    if expected_rows is None:
        raise SchemaError(f"{name}: missing '# rows=... checksum=...' header")
    if len(rows) != expected_rows:
        raise SchemaError(f"{name}: {len(rows)} rows, header declares {expected_rows}")
    if checksum != expected_checksum:
        raise SchemaError(f"{name}: checksum {checksum} != declared {expected_checksum}")
    return rows


@lru_cache(maxsize=None)
def crippen_table() -> dict[str, tuple[float, float]]:
    """Atom type -> (logp, mr) contributions."""
    return _read_table("crippen_contributions.txt", 2)


@lru_cache(maxsize=None)
def tpsa_table() -> dict[str, float]:
    """Fragment label -> polar surface area contribution (A^2)."""
    return {k: v[0] for k, v in _read_table("tpsa_fragments.txt", 1).items()}
