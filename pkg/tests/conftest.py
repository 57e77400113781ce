from fractions import Fraction

import numpy as np
import pytest

from mdkern import AtomicRepresentation, Kernel
from mdkern.measurespace import pattern_from_mask

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


def random_atomic(rng, n, max_atoms=20, high=10.0, exact=False):
    """Random atomic representation on labels '0'..'n-1' (may have no atoms)."""
    labels = [str(i) for i in range(n)]
    atoms = {}
    if n >= 2:
        for _ in range(int(rng.integers(0, max_atoms + 1))):
            mask = int(rng.integers(1, (1 << n) - 1))
            if exact:
                w = Fraction(int(rng.integers(0, 1000)), int(rng.integers(1, 50)))
            else:
                w = float(rng.uniform(0, high))
            atoms[pattern_from_mask(mask, n)] = w
    return AtomicRepresentation(labels, atoms)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def star_d():
    labels = ["1", "2", "3", "4"]
    d = {frozenset("14"): 1, frozenset("24"): 1, frozenset("34"): 1,
         frozenset("12"): 2, frozenset("23"): 2, frozenset("13"): 2}
    return Kernel.from_function(labels, lambda x, y: 0 if x == y else d[frozenset(x + y)])


@pytest.fixture
def star_dsq(star_d):
    return star_d.map_values(lambda v: v * v)


@pytest.fixture
def line_sq():
    return Kernel.from_function(["0", "1", "2"], lambda x, y: (int(x) - int(y)) ** 2)
