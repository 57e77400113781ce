from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mdkern import (
    AtomicRepresentation,
    GroundedRepresentation,
    ValidationError,
    complement_double,
    one_sided_difference,
    pushforward,
    symmetric_difference_kernel,
)
from mdkern.measurespace import complement, mask_from_pattern, pattern_from_mask, pattern_from_set


def set_oracle(labels, points):
    """Kernel from explicit sets: S_x = indices of points with a 1 at x."""
    sets = {x: {t for t, (p, _) in enumerate(points) if p[i] == "1"} for i, x in enumerate(labels)}
    weight = [w for _, w in points]
    return {(x, y): sum((weight[t] for t in sets[x] ^ sets[y]), 0) for x in labels for y in labels}


def random_grounded(rng, n, m, exact):
    pts = []
    for _ in range(m):
        p = pattern_from_mask(int(rng.integers(0, 1 << n)), n)
        w = Fraction(int(rng.integers(0, 100)), int(rng.integers(1, 20))) if exact else float(rng.uniform(0, 5))
        pts.append((p, w))
    return GroundedRepresentation([str(i) for i in range(n)], tuple(pts))


def test_star_leaf_atoms_give_tree_metric(star_d):
    R = AtomicRepresentation(["1", "2", "3", "4"], {"1000": 1, "0100": 1, "0010": 1})
    K = symmetric_difference_kernel(R)
    assert K.is_exact
    assert all(a == b for a, b in zip(K.values.flat, star_d.values.flat))


def test_empty_representation_gives_zero_kernel():
    K = symmetric_difference_kernel(AtomicRepresentation(["a", "b"], {}))
    np.testing.assert_array_equal(K.as_float(), 0.0)


@pytest.mark.parametrize("atoms", [{"111": 1}, {"000": 1}, {"01": 1}, {"012": 1}, {"011": -1},
                                   {"011": float("inf")}, {"011": "x"}])
def test_bad_atoms_rejected(atoms):
    with pytest.raises(ValidationError):
        AtomicRepresentation(["a", "b", "c"], atoms)


def test_pattern_helpers():
    assert pattern_from_mask(0b0110, 4) == "0110"
    assert pattern_from_mask(0b0001, 4) == "1000"
    assert mask_from_pattern("1000") == 1
    assert complement("0110") == "1001"
    assert pattern_from_set({"b", "c"}, ["a", "b", "c"]) == "011"
    with pytest.raises(ValidationError):
        pattern_from_set({"z"}, ["a"])


def test_one_sided_difference():
    R = AtomicRepresentation(["a", "b", "c"], {"100": 2, "011": 5, "110": 1})
    assert one_sided_difference(R, "a", "b") == 2
    assert one_sided_difference(R, "b", "a") == 5
    assert one_sided_difference(R, "c", "a") == 5


def test_pushforward_merges_and_drops_constants():
    G = GroundedRepresentation(["a", "b"], (("10", 1), ("10", 2), ("11", 7), ("00", 3), ("01", 4)))
    A = pushforward(G)
    assert A.atoms == {"10": 3, "01": 4}


def test_complement_double_balances_one_sided_masses(rng):
    R = AtomicRepresentation(["a", "b", "c"], {"100": Fraction(1, 2), "011": 3, "110": 1})
    D = complement_double(R)
    assert D.sheets == (0,) * 3 + (1,) * 3
    K = symmetric_difference_kernel(R)
    for x in R.labels:
        for y in R.labels:
            assert one_sided_difference(D, x, y) == one_sided_difference(D, y, x) == K(x, y)


def test_json_round_trips():
    R = AtomicRepresentation(["a", "b", "c"], {"100": Fraction(1, 3), "011": 2.5})
    back = AtomicRepresentation.from_json(R.to_json())
    assert back.atoms == R.atoms
    G = complement_double(R)
    back = GroundedRepresentation.from_dict(G.to_dict())
    assert back.points == G.points and back.sheets == G.sheets


def test_duplicate_pattern_in_json_rejected():
    with pytest.raises(ValidationError):
        AtomicRepresentation.from_dict({"labels": ["a", "b"], "atoms": [{"pattern": "10", "weight": 1},
                                                                         {"pattern": "10", "weight": 2}]})


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 6), st.integers(0, 15), st.booleans())
def test_kernel_matches_set_oracle(seed, n, m, exact):
    G = random_grounded(np.random.default_rng(seed), n, m, exact)
    K = symmetric_difference_kernel(G)
    ref = set_oracle(G.labels, G.points)
    for (x, y), v in ref.items():
        if exact:
            assert K(x, y) == v
        else:
            assert K(x, y) == pytest.approx(v, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 6), st.integers(0, 15))
def test_pushforward_preserves_kernel_exactly(seed, n, m):
    G = random_grounded(np.random.default_rng(seed), n, m, exact=True)
    a = symmetric_difference_kernel(G)
    b = symmetric_difference_kernel(pushforward(G))
    assert all(x == y for x, y in zip(a.values.flat, b.values.flat))
