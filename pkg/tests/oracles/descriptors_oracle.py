"""Independent brute-force reference for the 21 descriptors.

Written before the production implementations, straight from the published
definitions, with deliberately different algorithmics: simple-path counts by
DFS enumeration, distances by Floyd-Warshall, Crippen typing as an ordered
predicate-rule list, and TPSA as an exhaustive environment lookup. Shares
only the published contribution tables with the production code.
"""

from __future__ import annotations

import math

from ilkit.chem.elements import atomic_weight
from ilkit.descriptors.tables import crippen_table, tpsa_table

INF = float("inf")


def _heavy_graph(mol):
    heavy = [i for i, a in enumerate(mol.atoms) if a.element != "H"]
    remap = {h: k for k, h in enumerate(heavy)}
    edges = []
    orders = {}
    for b in mol.bonds:
        if b.a in remap and b.b in remap:
            e = (remap[b.a], remap[b.b])
            edges.append(e)
            orders[frozenset(e)] = b.order
    return heavy, remap, edges, orders


def _floyd_warshall(n, edges):
    dist = [[0 if i == j else INF for j in range(n)] for i in range(n)]
    for a, b in edges:
        dist[a][b] = dist[b][a] = 1
    for k in range(n):
        for i in range(n):
            dik = dist[i][k]
            if dik == INF:
                continue
            row_k = dist[k]
            row_i = dist[i]
            for j in range(n):
                alt = dik + row_k[j]
                if alt < row_i[j]:
                    row_i[j] = alt
    return dist


def _simple_paths_of_length(n, edges, length):
    """Count simple paths with `length` edges; reverse not double counted."""
    adj = [[] for _ in range(n)]
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    count = 0

    def extend(path):
        nonlocal count
        if len(path) == length + 1:
            count += 1
            return
        for nxt in adj[path[-1]]:
            if nxt not in path:
                extend(path + [nxt])

    for start in range(n):
        extend([start])
    return count // 2  # every path enumerated once per direction


def oracle_kappa(mol):
    heavy, _remap, edges, _orders = _heavy_graph(mol)
    a = len(heavy)
    p1 = _simple_paths_of_length(a, edges, 1)
    p2 = _simple_paths_of_length(a, edges, 2)
    p3 = _simple_paths_of_length(a, edges, 3)
    k1 = a * (a - 1) ** 2 / p1**2 if p1 else 0.0
    k2 = (a - 1) * (a - 2) ** 2 / p2**2 if p2 else 0.0
    if p3:
        k3 = (a - 1) * (a - 3) ** 2 / p3**2 if a % 2 else (a - 3) * (a - 2) ** 2 / p3**2
    else:
        k3 = 0.0
    return k1, k2, max(k3, 0.0)


def oracle_balaban(mol):
    heavy, _remap, edges, _orders = _heavy_graph(mol)
    n = len(heavy)
    if n == 0:
        return 0.0
    dist = _floyd_warshall(n, edges)
    # Components from the distance matrix.
    comp = [-1] * n
    c = 0
    for i in range(n):
        if comp[i] == -1:
            for j in range(n):
                if dist[i][j] < INF:
                    comp[j] = c
            c += 1
    total = 0.0
    for ci in range(c):
        members = [i for i in range(n) if comp[i] == ci]
        comp_edges = [(a, b) for a, b in edges if comp[a] == ci]
        m = len(comp_edges)
        if m == 0:
            continue
        mu = m - len(members) + 1
        s = {i: sum(dist[i][j] for j in members) for i in members}
        total += (m / (mu + 1)) * sum((s[a] * s[b]) ** -0.5 for a, b in comp_edges)
    return total


def oracle_bertz(mol):
    heavy, _remap, edges, orders = _heavy_graph(mol)
    n = len(heavy)
    if n == 0:
        return 0.0
    order_value = {"single": 1.0, "double": 2.0, "triple": 3.0, "aromatic": 1.5}
    deg = [0] * n
    for a, b in edges:
        deg[a] += 1
        deg[b] += 1
    pair_classes: dict = {}
    for i, (a1, b1) in enumerate(edges):
        for a2, b2 in edges[i + 1 :]:
            shared = {a1, b1} & {a2, b2}
            if len(shared) != 1:
                continue
            center = shared.pop()
            o1 = ({a1, b1} - {center}).pop()
            o2 = ({a2, b2} - {center}).pop()
            v1 = order_value[orders[frozenset((a1, b1))]]
            v2 = order_value[orders[frozenset((a2, b2))]]
            key = (deg[center], tuple(sorted(((deg[o1], v1), (deg[o2], v2)))))
            pair_classes[key] = pair_classes.get(key, 0) + 1

    def info(counts):
        total = sum(counts)
        if total == 0:
            return 0.0
        return 2 * total * math.log2(total) - sum(c * math.log2(c) for c in counts)

    elements: dict[str, int] = {}
    for i in heavy:
        elements[mol.atoms[i].element] = elements.get(mol.atoms[i].element, 0) + 1
    return info(list(pair_classes.values())) + info(list(elements.values()))


# --- Crippen reference typing: ordered (name, predicate) rules ------------


def _summary(mol, i):
    """Plain dict describing atom i and its bonds."""
    atom = mol.atoms[i]
    nbrs = []
    for j, bi in mol.neighbors(i):
        o = mol.atoms[j]
        nbrs.append(
            {
                "element": o.element,
                "aromatic": o.aromatic,
                "order": mol.bonds[bi].order,
                "index": j,
            }
        )
    return {
        "element": atom.element,
        "aromatic": atom.aromatic,
        "charge": atom.formal_charge,
        "h": atom.total_h,
        "n": len(nbrs),
        "nbrs": nbrs,
    }


_HET = {"N", "O", "P", "S", "F", "Cl", "Br", "I"}


def _only_aliph_c(s):
    return all(x["element"] == "C" and not x["aromatic"] for x in s["nbrs"])


def _sp3(s):
    return all(x["order"] == "single" for x in s["nbrs"])


def _dbl(s, pred):
    return any(x["order"] == "double" and pred(x) for x in s["nbrs"])


_CARBON_RULES = [
    ("C1", lambda s, m, i: _sp3(s) and (s["h"], s["n"]) in ((4, 0), (3, 1), (2, 2)) and _only_aliph_c(s)),
    ("C2", lambda s, m, i: _sp3(s) and (s["h"], s["n"]) in ((1, 3), (0, 4)) and _only_aliph_c(s)),
    ("C3", lambda s, m, i: _sp3(s) and s["h"] >= 2
        and any(x["element"] in _HET and not x["aromatic"] for x in s["nbrs"])),
    ("C4", lambda s, m, i: _sp3(s) and s["h"] + s["n"] == 4
        and any(x["element"] in _HET and not x["aromatic"] for x in s["nbrs"])),
    ("C5", lambda s, m, i: _dbl(s, lambda x: x["element"] != "C" and not x["aromatic"])),
    ("C6", lambda s, m, i: _dbl(s, lambda x: x["element"] == "C" and not x["aromatic"])
        and not any(x["aromatic"] for x in s["nbrs"])),
    ("C26a", lambda s, m, i: _dbl(s, lambda x: x["element"] == "C" and not x["aromatic"])
        and any(x["aromatic"] for x in s["nbrs"])),
    ("C7", lambda s, m, i: s["h"] + s["n"] == 2
        and any(x["order"] == "triple" and not x["aromatic"] for x in s["nbrs"])),
    ("C8", lambda s, m, i: _sp3(s) and s["h"] == 3
        and all(x["element"] == "C" for x in s["nbrs"] if x["aromatic"])
        and any(x["aromatic"] for x in s["nbrs"])),
    ("C9", lambda s, m, i: _sp3(s) and s["h"] == 3 and any(x["aromatic"] for x in s["nbrs"])),
    ("C10", lambda s, m, i: _sp3(s) and s["h"] == 2 and s["n"] == 2 and any(x["aromatic"] for x in s["nbrs"])),
    ("C11", lambda s, m, i: _sp3(s) and s["h"] == 1 and s["n"] == 3 and any(x["aromatic"] for x in s["nbrs"])),
    ("C12", lambda s, m, i: _sp3(s) and s["h"] == 0 and s["n"] == 4 and any(x["aromatic"] for x in s["nbrs"])),
    ("C26b", lambda s, m, i: _dbl(s, lambda x: x["element"] == "C" and x["aromatic"])),
    ("C27", lambda s, m, i: _sp3(s) and s["h"] + s["n"] == 4
        and any(x["element"] not in _HET | {"C"} for x in s["nbrs"])),
]

_AROMATIC_CARBON_RULES = [
    ("C13", lambda s: s["h"] == 0 and any(
        x["order"] == "single" and not x["aromatic"] and x["element"] not in _HET | {"C"}
        for x in s["nbrs"])),
    ("C14", lambda s: any(x["element"] == "F" for x in s["nbrs"])),
    ("C15", lambda s: any(x["element"] == "Cl" for x in s["nbrs"])),
    ("C16", lambda s: any(x["element"] == "Br" for x in s["nbrs"])),
    ("C17", lambda s: any(x["element"] == "I" for x in s["nbrs"])),
    ("C18", lambda s: s["h"] >= 1),
    ("C19", lambda s: sum(1 for x in s["nbrs"] if x["order"] == "aromatic") >= 3),
    ("C20", lambda s: any(x["order"] == "single" and x["aromatic"] for x in s["nbrs"])),
    ("C21", lambda s: any(x["order"] == "single" and not x["aromatic"] and x["element"] == "C" for x in s["nbrs"])),
    ("C22", lambda s: any(x["order"] == "single" and not x["aromatic"] and x["element"] == "N" for x in s["nbrs"])),
    ("C23", lambda s: any(x["order"] == "single" and not x["aromatic"] and x["element"] == "O" for x in s["nbrs"])),
    ("C24", lambda s: any(x["order"] == "single" and not x["aromatic"] and x["element"] == "S" for x in s["nbrs"])),
    ("C25", lambda s: any(x["order"] == "double" and x["element"] in ("C", "N", "O") for x in s["nbrs"])),
]


def _oracle_carbon(mol, i, s):
    if s["aromatic"]:
        for name, rule in _AROMATIC_CARBON_RULES:
            if rule(s):
                return name
        return "CS"
    for name, rule in _CARBON_RULES:
        if rule(s, mol, i):
            return name.rstrip("ab")
    return "CS"


def _oracle_nitrogen(mol, i, s):
    q, h, n = s["charge"], s["h"], s["n"]
    has_double = any(x["order"] == "double" for x in s["nbrs"])
    has_triple = any(x["order"] == "triple" for x in s["nbrs"])
    if s["aromatic"]:
        return "N11" if q == 0 else ("N12" if q > 0 else "NS")
    if q == 0:
        if h == 2 and n == 1:
            return "N3" if s["nbrs"][0]["aromatic"] else "N1"
        if h == 1 and n == 2 and not has_double and not has_triple:
            return "N4" if any(x["aromatic"] for x in s["nbrs"]) else "N2"
        if h == 1 and has_double:
            return "N5"
        if h == 0 and n == 2 and has_double:
            return "N6"
        if h == 0 and n == 3 and not has_double and not has_triple:
            return "N8" if any(x["aromatic"] for x in s["nbrs"]) else "N7"
        if h == 0 and has_triple:
            return "N9"
        return "NS"
    if q > 0:
        if h >= 1:
            return "N10"
        if has_triple:
            return "N14"
        if n == 4 or has_double:
            return "N13"
        return "NS"
    return "N14"


def _oracle_oxygen(mol, i, s):
    q, h, n = s["charge"], s["h"], s["n"]
    if s["aromatic"]:
        return "O1"
    if h >= 1:
        return "O2"
    doubles = [x for x in s["nbrs"] if x["order"] == "double"]
    if n == 2 and not doubles:
        return "O3" if all(not x["aromatic"] for x in s["nbrs"]) else "O4"
    if (doubles and doubles[0]["element"] in ("N", "O")) or (
        q < 0 and n == 1 and s["nbrs"][0]["element"] == "N"
    ):
        return "O5"
    if (q < 0 and n == 1 and s["nbrs"][0]["element"] == "S") or (
        q == 0 and doubles and doubles[0]["element"] == "S"
        and mol.atoms[doubles[0]["index"]].formal_charge == 0
    ):
        return "O6"
    if q < 0 and n == 1:
        j = s["nbrs"][0]["index"]
        if s["nbrs"][0]["element"] == "C":
            carbonyl = any(
                mol.bonds[bi].order == "double" and mol.atoms[k].element == "O"
                for k, bi in mol.neighbors(j)
            )
            if carbonyl:
                return "O12"
        if s["nbrs"][0]["element"] not in ("N", "S"):
            return "O7"
        return "OS"
    if doubles and doubles[0]["element"] == "C":
        if doubles[0]["aromatic"]:
            return "O8"
        j = doubles[0]["index"]
        others = [
            (mol.atoms[k], mol.bonds[bi].order)
            for k, bi in mol.neighbors(j)
            if k != i
        ]
        if any(x.aromatic for x, _ in others):
            return "O10"
        if mol.atoms[j].total_h >= 1 or not others:
            return "O9"
        if all(x.element != "C" for x, _ in others):
            return "O11"
        return "O9"
    return "OS"


def _oracle_hydrogen(mol, parent):
    p = mol.atoms[parent]
    if p.element in ("C", "H"):
        return "H1"
    if p.element == "N":
        return "H3"
    if p.element == "O":
        heavy = [
            (mol.atoms[j], j) for j, _bi in mol.neighbors(parent) if mol.atoms[j].element != "H"
        ]
        if not heavy:
            return "H2"
        y, yj = heavy[0]
        if y.element == "C":
            y_orders = [mol.bonds[bi].order for _k, bi in mol.neighbors(yj)]
            if y.aromatic or all(o == "single" for o in y_orders):
                return "H2"
            y_doubles = [
                mol.atoms[k].element
                for k, bi in mol.neighbors(yj)
                if mol.bonds[bi].order == "double"
            ]
            if any(e in ("C", "N", "O", "S") for e in y_doubles):
                return "H4"
            return "HS"
        if y.element in ("O", "S"):
            return "H4"
        if y.element == "N":
            return "H3"
        return "H2"
    return "H2"


_ME2 = {"B", "Si", "As", "Se", "Al", "Ga", "Ge", "In", "Sn", "Sb", "Te", "Tl", "Pb", "Bi"}


def oracle_crippen(mol):
    table = crippen_table()
    logp = mr = 0.0
    for i, atom in enumerate(mol.atoms):
        s = _summary(mol, i)
        el = atom.element
        if el == "C":
            t = _oracle_carbon(mol, i, s)
        elif el == "N":
            t = _oracle_nitrogen(mol, i, s)
        elif el == "O":
            t = _oracle_oxygen(mol, i, s)
        elif el == "H":
            t = _oracle_hydrogen(mol, mol.neighbor_atoms(i)[0]) if s["n"] else "HS"
        elif el in ("F", "Cl", "Br", "I"):
            t = el if atom.formal_charge == 0 else "Hal"
        elif el == "P":
            t = "P"
        elif el == "S":
            t = "S3" if atom.aromatic else ("S2" if atom.formal_charge else "S1")
        elif el in _ME2:
            t = "Me2"
        else:
            t = "Me1"
        lv, mv = table[t]
        logp += lv
        mr += mv
        if atom.total_h:
            ht = _oracle_hydrogen(mol, i)
            lv, mv = table[ht]
            logp += atom.total_h * lv
            mr += atom.total_h * mv
    return logp, mr


def oracle_tpsa(mol):
    table = tpsa_table()
    total = 0.0
    for i, atom in enumerate(mol.atoms):
        if atom.element not in ("N", "O"):
            continue
        s = _summary(mol, i)
        counts = {"single": 0, "double": 0, "triple": 0, "aromatic": 0}
        for x in s["nbrs"]:
            counts[x["order"]] += 1
        in3 = any(len(r) == 3 and i in r for r in mol.rings)
        key = (
            atom.element,
            atom.aromatic,
            atom.formal_charge,
            atom.total_h,
            counts["single"],
            counts["double"],
            counts["triple"],
            counts["aromatic"],
            in3,
        )
        contribution = _TPSA_CASES.get(key)
        if contribution is None and in3:
            contribution = _TPSA_CASES.get(key[:-1] + (False,))
        if contribution is not None:
            total += table[contribution]
        else:
            x = s["n"] + atom.total_h
            if atom.element == "N":
                total += max(0.0, 30.5 - x * 8.2 + atom.total_h * 1.5)
            else:
                total += max(0.0, 28.5 - x * 8.6 + atom.total_h * 1.5)
    return total


# (element, aromatic, charge, H, singles, doubles, triples, aromatics, 3ring)
_TPSA_CASES = {
    ("N", False, 0, 0, 3, 0, 0, 0, False): "N_s3",
    ("N", False, 0, 0, 3, 0, 0, 0, True): "N_s3_r3",
    ("N", False, 0, 0, 1, 1, 0, 0, False): "N_s1d1",
    ("N", False, 0, 0, 0, 0, 1, 0, False): "N_t1",
    ("N", False, 0, 0, 1, 2, 0, 0, False): "N_s1d2",
    ("N", False, 0, 0, 0, 1, 1, 0, False): "N_d1t1",
    ("N", False, 0, 1, 2, 0, 0, 0, False): "NH1_s2",
    ("N", False, 0, 1, 2, 0, 0, 0, True): "NH1_s2_r3",
    ("N", False, 0, 1, 0, 1, 0, 0, False): "NH1_d1",
    ("N", False, 0, 2, 1, 0, 0, 0, False): "NH2_s1",
    ("N", False, 1, 0, 4, 0, 0, 0, False): "Np_s4",
    ("N", False, 1, 0, 2, 1, 0, 0, False): "Np_s2d1",
    ("N", False, 1, 0, 1, 0, 1, 0, False): "Np_s1t1",
    ("N", False, 1, 1, 3, 0, 0, 0, False): "NpH1_s3",
    ("N", False, 1, 1, 1, 1, 0, 0, False): "NpH1_s1d1",
    ("N", False, 1, 2, 2, 0, 0, 0, False): "NpH2_s2",
    ("N", False, 1, 2, 0, 1, 0, 0, False): "NpH2_d1",
    ("N", False, 1, 3, 1, 0, 0, 0, False): "NpH3_s1",
    ("N", True, 0, 0, 0, 0, 0, 2, False): "n_a2",
    ("N", True, 0, 0, 0, 0, 0, 3, False): "n_a3",
    ("N", True, 0, 0, 1, 0, 0, 2, False): "n_s1a2",
    ("N", True, 0, 0, 0, 1, 0, 2, False): "n_d1a2",
    ("N", True, 0, 1, 0, 0, 0, 2, False): "nH1_a2",
    ("N", True, 1, 0, 0, 0, 0, 3, False): "np_a3",
    ("N", True, 1, 0, 1, 0, 0, 2, False): "np_s1a2",
    ("N", True, 1, 1, 0, 0, 0, 2, False): "npH1_a2",
    ("O", False, 0, 0, 2, 0, 0, 0, False): "O_s2",
    ("O", False, 0, 0, 2, 0, 0, 0, True): "O_s2_r3",
    ("O", False, 0, 0, 0, 1, 0, 0, False): "O_d1",
    ("O", False, 0, 1, 1, 0, 0, 0, False): "OH1_s1",
    ("O", False, -1, 0, 1, 0, 0, 0, False): "Om_s1",
    ("O", True, 0, 0, 0, 0, 0, 2, False): "o_a2",
}


def oracle_descriptors(mol) -> list[float]:
    """All 21 descriptors, independently recomputed, in canonical order."""
    atoms = mol.atoms
    no = [a for a in atoms if a.element in ("N", "O")]
    hbd = sum(1 for a in no if a.total_h >= 1)
    hba = len(no)

    def heavy_degree(i):
        return sum(1 for j, _bi in mol.neighbors(i) if atoms[j].element != "H")

    rotatable = 0
    for bond in mol.bonds:
        if bond.order != "single" or bond.in_ring:
            continue
        if atoms[bond.a].element == "H" or atoms[bond.b].element == "H":
            continue
        if heavy_degree(bond.a) < 2 or heavy_degree(bond.b) < 2:
            continue
        amide = False
        for c, nn in ((bond.a, bond.b), (bond.b, bond.a)):
            if atoms[c].element == "C" and atoms[nn].element == "N":
                for k, bi in mol.neighbors(c):
                    if mol.bonds[bi].order == "double" and atoms[k].element == "O":
                        amide = True
        if not amide:
            rotatable += 1

    stereocenters = sum(1 for a in atoms if a.chirality)
    logp, mr = oracle_crippen(mol)

    carbons = [i for i, a in enumerate(atoms) if a.element == "C"]
    sp3 = sum(
        1
        for i in carbons
        if not atoms[i].aromatic
        and all(mol.bonds[bi].order == "single" for _j, bi in mol.neighbors(i))
    )
    fcsp3 = sp3 / len(carbons) if carbons else 0.0

    rings = mol.rings
    hetero_rings = sum(1 for r in rings if any(atoms[i].element != "C" for i in r))
    arom_rings = sum(1 for r in rings if all(atoms[i].aromatic for i in r))
    arom_hetero = sum(
        1
        for r in rings
        if all(atoms[i].aromatic for i in r) and any(atoms[i].element != "C" for i in r)
    )
    spiro = 0
    for i in range(len(atoms)):
        mine = [set(r) for r in rings if i in r]
        if len(mine) >= 2 and all(
            mine[p] & mine[q] == {i}
            for p in range(len(mine))
            for q in range(p + 1, len(mine))
        ):
            spiro += 1

    weight = sum(
        (a.isotope if a.isotope is not None else atomic_weight(a.element))
        + a.total_h * atomic_weight("H")
        for a in atoms
    )
    hetero = sum(1 for a in atoms if a.element not in ("C", "H"))
    heavy = sum(1 for a in atoms if a.element != "H")
    k1, k2, k3 = oracle_kappa(mol)
    return [
        hbd, hba, rotatable, oracle_tpsa(mol), stereocenters, logp, mr, fcsp3,
        len(rings), hetero_rings, arom_rings, arom_hetero, spiro, weight,
        hetero, heavy, k1, k2, k3, oracle_balaban(mol), oracle_bertz(mol),
    ]
