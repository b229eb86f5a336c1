import random

import numpy as np
import pytest

from ilkit.cluster import hierarchical_cluster
from ilkit.errors import IlkitError
from oracles.cluster_oracle import oracle_average_linkage


def _random_similarity(rng, n):
    m = np.zeros((n, n))
    for i in range(n):
        m[i, i] = 1.0
        for j in range(i + 1, n):
            m[i, j] = m[j, i] = rng.random()
    return m


def test_two_items_single_merge():
    m = np.array([[1.0, 0.4], [0.4, 1.0]])
    res = hierarchical_cluster(m)
    assert len(res.merges) == 1
    assert res.merges[0].distance == pytest.approx(0.6)
    assert res.leaf_order == (0, 1)


def test_block_diagonal_clusters_merge_internally_first():
    m = np.eye(4)
    m[0, 1] = m[1, 0] = 1.0
    m[2, 3] = m[3, 2] = 1.0
    res = hierarchical_cluster(m)
    first_two = {(res.merges[0].left, res.merges[0].right), (res.merges[1].left, res.merges[1].right)}
    assert (0, 1) in first_two and (2, 3) in first_two
    assert res.merges[2].size == 4


def test_merge_sequence_matches_oracle():
    rng = random.Random(6)
    for trial in range(20):
        n = rng.randint(5, 10)
        m = _random_similarity(rng, n)
        res = hierarchical_cluster(m)
        want = oracle_average_linkage(m)
        assert len(res.merges) == len(want)
        for got, (a, b, d, size) in zip(res.merges, want):
            assert {got.left, got.right} == {a, b}, f"trial {trial}"
            assert got.distance == pytest.approx(d, abs=1e-9)
            assert got.size == size


def test_leaf_order_is_permutation():
    rng = random.Random(8)
    m = _random_similarity(rng, 9)
    res = hierarchical_cluster(m)
    assert sorted(res.leaf_order) == list(range(9))


def test_non_symmetric_rejected():
    m = np.array([[1.0, 0.2], [0.5, 1.0]])
    with pytest.raises(IlkitError):
        hierarchical_cluster(m)


def test_out_of_range_rejected():
    m = np.array([[1.0, 1.4], [1.4, 1.0]])
    with pytest.raises(IlkitError):
        hierarchical_cluster(m)


def test_determinism_with_ties():
    m = np.full((4, 4), 0.5)
    np.fill_diagonal(m, 1.0)
    a = hierarchical_cluster(m)
    b = hierarchical_cluster(m)
    assert a == b
    # All distances tie; lowest-leaf pairs must merge first.
    assert (a.merges[0].left, a.merges[0].right) == (0, 1)
