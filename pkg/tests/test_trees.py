from fractions import Fraction

import numpy as np
import pytest

from mdkern import (
    Tree,
    ValidationError,
    complement_double,
    decompose,
    distance_kernel,
    is_negative_definite,
    one_sided_difference,
    pushforward,
    symmetric_difference_kernel,
    tree_representation,
)
from mdkern.trees import star_tree


def floyd_warshall(T):
    idx = {v: i for i, v in enumerate(T.vertices)}
    n = len(idx)
    D = np.full((n, n), np.inf)
    np.fill_diagonal(D, 0.0)
    for u, v, w in T.edges:
        D[idx[u], idx[v]] = D[idx[v], idx[u]] = float(w)
    for k in range(n):
        D = np.minimum(D, D[:, [k]] + D[[k], :])
    return D


def random_tree(rng, n, exact=False):
    verts = [f"v{i}" for i in range(n)]
    edges = []
    for i in range(1, n):
        w = Fraction(int(rng.integers(1, 20)), int(rng.integers(1, 5))) if exact else float(rng.uniform(0.1, 3))
        edges.append((verts[int(rng.integers(0, i))], verts[i], w))
    return Tree(verts, edges, verts[int(rng.integers(0, n))])


def test_star_distances(star_d):
    K = distance_kernel(star_tree())
    assert K.is_exact
    assert all(a == b for a, b in zip(K.values.flat, star_d.values.flat))
    assert K("1", "4") == K("2", "4") == K("3", "4") == 1
    assert K("1", "2") == K("2", "3") == K("3", "1") == 2


def test_star_representation():
    G = tree_representation(star_tree())
    assert sorted(G.points) == sorted([("1000", 1), ("0100", 1), ("0010", 1)])


def test_star_one_sided_differences_after_doubling(star_d):
    D = complement_double(pushforward(tree_representation(star_tree())))
    for x in star_d.labels:
        for y in star_d.labels:
            assert one_sided_difference(D, x, y) == star_d(x, y)


def test_path_tree():
    T = Tree(["a", "b", "c"], [("a", "b", 2), ("b", "c", 3)], "a")
    K = distance_kernel(T)
    assert K("a", "c") == 5
    G = tree_representation(T)
    assert sorted(G.points) == [("001", 3), ("011", 2)]


def test_leaf_as_root():
    G = tree_representation(star_tree(root="1"))
    K = symmetric_difference_kernel(G)
    assert all(a == b for a, b in zip(K.values.flat, distance_kernel(star_tree()).values.flat))


@pytest.mark.parametrize("root", ["1", "2", "3", "4"])
def test_root_does_not_change_kernel(root, star_d):
    K = symmetric_difference_kernel(tree_representation(star_tree(root)))
    assert all(a == b for a, b in zip(K.values.flat, star_d.values.flat))


@pytest.mark.parametrize("seed", range(25))
def test_random_trees(seed):
    rng = np.random.default_rng(seed)
    T = random_tree(rng, int(rng.integers(2, 10)), exact=seed % 2 == 0)
    K = distance_kernel(T)
    np.testing.assert_allclose(K.as_float(), floyd_warshall(T), rtol=1e-12)
    R = symmetric_difference_kernel(tree_representation(T))
    if K.is_exact:
        assert all(a == b for a, b in zip(R.values.flat, K.values.flat))
    else:
        np.testing.assert_allclose(R.as_float(), K.as_float(), rtol=1e-12)
    assert is_negative_definite(K).negative_definite
    assert decompose(K).feasible


@pytest.mark.parametrize(
    "verts,edges",
    [
        (["a", "b"], [("a", "b", 0)]),
        (["a", "b"], [("a", "b", -1)]),
        (["a", "b", "c"], [("a", "b", 1)]),
        (["a", "b", "c"], [("a", "b", 1), ("b", "a", 1)]),
        (["a", "b", "c", "d"], [("a", "b", 1), ("b", "a", 1), ("c", "d", 1)]),
        (["a", "b"], [("a", "z", 1)]),
        (["a", "b"], [("a", "a", 1)]),
    ],
)
def test_invalid_trees(verts, edges):
    with pytest.raises(ValidationError):
        Tree(verts, edges, verts[0])


def test_unknown_root():
    with pytest.raises(ValidationError):
        star_tree(root="9")


def test_json_round_trip():
    T = Tree.from_dict({"root": "2", "edges": [["1", "2", "1/2"], ["2", "10", 3]]})
    assert T.vertices == ("1", "2", "10")
    assert distance_kernel(T)("1", "10") == Fraction(7, 2)
    back = Tree.from_dict(T.to_dict())
    assert back.edges == T.edges and back.root == T.root
