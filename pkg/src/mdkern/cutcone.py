"""Measure-definiteness of finite kernels as membership in the cut cone.

On n labels a kernel is measure definite iff it is a nonnegative combination of
cut kernels delta_S(x, y) = [S separates x and y]. A pattern and its complement
separate the same pairs, so the LP runs over the 2^(n-1) - 1 cuts whose pattern
has a 0 at the first label. :func:`decompose` returns either the weights or a
Farkas certificate y on pairs with

    sum_xy y_xy K(x, y) > 0    and    sum_{xy separated by S} y_xy <= 0 for every cut S.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

import numpy as np

from ._numbers import encode_scalar, parse_scalar
from .errors import SizeError, SolverError, ValidationError
from .kernel import Kernel
from .measurespace import AtomicRepresentation, pattern_from_mask, symmetric_difference_kernel
from .simplex import phase_one

DEFAULT_CAP = 14
RECONSTRUCTION_TOL = 1e-7
CERTIFICATE_MARGIN = 1e-9


@dataclass(frozen=True)
class DecomposeOptions:
    exact: bool = False
    cap: int = DEFAULT_CAP
    tol: float = RECONSTRUCTION_TOL
    pivot_tol: float = 1e-10


@dataclass(frozen=True, eq=False)
class InfeasibilityCertificate:
    labels: tuple
    pair_weights: dict  # {(x, y): weight} with x before y in label order

    def weight(self, x, y):
        x, y = str(x), str(y)
        return self.pair_weights.get((x, y), self.pair_weights.get((y, x), 0))

    def to_dict(self) -> dict:
        return {
            "labels": list(self.labels),
            "pair_weights": [
                {"pair": [x, y], "weight": encode_scalar(w)} for (x, y), w in self.pair_weights.items()
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "InfeasibilityCertificate":
        try:
            pw = {(str(e["pair"][0]), str(e["pair"][1])): parse_scalar(e["weight"]) for e in data["pair_weights"]}
            return cls(tuple(str(x) for x in data["labels"]), pw)
        except (KeyError, TypeError, IndexError) as exc:
            raise ValidationError(f"bad certificate JSON: {exc}") from exc


@dataclass(frozen=True)
class Feasible:
    representation: AtomicRepresentation
    max_residual: float  # max |K_rep - K| / K.scale
    feasible: bool = field(default=True, init=False)


@dataclass(frozen=True)
class Infeasible:
    certificate: InfeasibilityCertificate
    margin: float  # sum_xy y_xy K(x, y) / K.scale, with max |y| = 1
    feasible: bool = field(default=False, init=False)


# -- cut enumeration ------------------------------------------------------------------


def cut_masks(n: int) -> np.ndarray:
    """Bit masks of all cuts, never containing label 0; ascending."""
    return np.arange(1, 1 << (n - 1), dtype=np.int64) << 1


def label_pairs(n: int) -> list[tuple[int, int]]:
    return list(combinations(range(n), 2))


def separation_matrix(n: int) -> np.ndarray:
    """0/1 matrix of shape (pairs, cuts): entry 1 iff the cut separates the pair."""
    masks = cut_masks(n)
    bits = (masks[:, None] >> np.arange(n)) & 1
    pairs = label_pairs(n)
    i = np.array([p[0] for p in pairs], dtype=int)
    j = np.array([p[1] for p in pairs], dtype=int)
    return (bits[:, i] != bits[:, j]).T.astype(np.int64)


def _check_size(K: Kernel, cap: int) -> None:
    if K.n > cap:
        raise SizeError(f"{K.n} labels exceed the cut-cone cap of {cap}")


# -- certificate checking ---------------------------------------------------------------


def _condition_values(K: Kernel, cert: InfeasibilityCertificate):
    """Exact (condition A value, max over cuts of condition B sum)."""
    n = K.n
    pairs = label_pairs(n)
    ys = [Fraction(cert.weight(K.labels[i], K.labels[j])) for i, j in pairs]
    Kf = K.as_fractions()
    cond_a = sum((y * Kf[i, j] for y, (i, j) in zip(ys, pairs)), Fraction(0))
    if n < 2:
        return cond_a, Fraction(0)
    denom = math.lcm(*(y.denominator for y in ys)) if ys else 1
    nums = [int(y * denom) for y in ys]
    S = separation_matrix(n)
    if max((abs(v) for v in nums), default=0) * len(nums) < 2**62:
        sums = S.T @ np.array(nums, dtype=np.int64)
        worst = int(sums.max())
    else:
        worst = max(sum(int(s) * v for s, v in zip(col, nums)) for col in S.T)
    return cond_a, Fraction(worst, denom)


def verify_certificate(K: Kernel, cert: InfeasibilityCertificate) -> bool:
    """Re-check both Farkas conditions in exact rational arithmetic.

    Floats are converted to Fractions without rounding, so the check is exact for
    any finite input.
    """
    if tuple(cert.labels) != K.labels:
        return False
    known = {(x, y) for x in K.labels for y in K.labels if x != y}
    if any(p not in known for p in cert.pair_weights):
        return False
    cond_a, worst = _condition_values(K, cert)
    return cond_a > 0 and worst <= 0


# -- decomposition ------------------------------------------------------------------------


def _pair_vector(K: Kernel, exact: bool):
    vals = K.as_fractions() if exact else K.as_float()
    return [vals[i, j] for i, j in label_pairs(K.n)]


def _representation(K: Kernel, weights) -> AtomicRepresentation:
    masks = cut_masks(K.n)
    atoms = {pattern_from_mask(int(mk), K.n): w for mk, w in zip(masks, weights) if w > 0}
    return AtomicRepresentation(K.labels, atoms)


def _residual(K: Kernel, R: AtomicRepresentation) -> float:
    diff = symmetric_difference_kernel(R).as_float() - K.as_float()
    return float(np.max(np.abs(diff))) / K.scale


def _certificate(K: Kernel, ys) -> InfeasibilityCertificate:
    pw = {}
    for (i, j), y in zip(label_pairs(K.n), ys):
        if y != 0:
            pw[(K.labels[i], K.labels[j])] = y
    return InfeasibilityCertificate(K.labels, pw)


def _normalized(ys, exact: bool):
    top = max(abs(y) for y in ys)
    if top == 0:
        return ys
    return [y / top for y in ys] if exact else [float(y) / float(top) for y in ys]


def _accept(K: Kernel, cert: InfeasibilityCertificate):
    """Margin if the certificate verifies with margin, else None."""
    if not verify_certificate(K, cert):
        return None
    cond_a, _ = _condition_values(K, cert)
    margin = float(cond_a) / K.scale
    return margin if margin > CERTIFICATE_MARGIN else None


def _solve_exact(K: Kernel, opts: DecomposeOptions):
    A = separation_matrix(K.n)
    b = _pair_vector(K, exact=True)
    res = phase_one(A, b, exact=True)
    if res.feasible:
        R = _representation(K, res.x)
        return Feasible(R, _residual(K, R))
    cert = _certificate(K, _normalized(list(res.y), exact=True))
    margin = _accept(K, cert)
    if margin is None:
        raise SolverError("exact simplex produced a certificate that does not verify")
    return Infeasible(cert, margin)


def decompose(K: Kernel, opts: DecomposeOptions | None = None) -> Feasible | Infeasible:
    """Write K as a nonnegative combination of cut kernels, or certify that no such combination exists.

    The float simplex runs first. A feasible answer is kept if it reproduces K to
    ``opts.tol`` relative; an infeasible one if its dual vector, rationalized,
    passes :func:`verify_certificate` with margin. Otherwise the LP is re-solved in
    exact rational arithmetic (always, with ``opts.exact``).
    """
    opts = opts or DecomposeOptions()
    K.require_nonnegative()
    _check_size(K, opts.cap)
    if K.n == 1:
        return Feasible(AtomicRepresentation(K.labels, {}), 0.0)
    if opts.exact:
        return _solve_exact(K, opts)

    scale = K.scale
    A = separation_matrix(K.n)
    b = np.array(_pair_vector(K, exact=False)) / scale
    try:
        res = phase_one(A, b, pivot_tol=opts.pivot_tol)
    except SolverError:
        return _solve_exact(K, opts)

    if res.feasible:
        w = np.clip(res.x, 0.0, None) * scale
        R = _representation(K, [float(v) for v in w])
        resid = _residual(K, R)
        if resid <= opts.tol:
            return Feasible(R, resid)
    else:
        ys = _normalized(list(res.y), exact=False)
        for candidate in (
            [Fraction(y).limit_denominator(10**6) for y in ys],
            [Fraction(y) for y in ys],
        ):
            cert = _certificate(K, candidate)
            margin = _accept(K, cert)
            if margin is not None:
                return Infeasible(cert, margin)
    return _solve_exact(K, opts)


# -- closure under pointwise limits --------------------------------------------------------


@dataclass(frozen=True)
class LimitClosureReport:
    closed: bool
    members: int
    limit: Kernel
    limit_result: Feasible | Infeasible
    deviations: tuple  # max |f_j - f| over pairs, per member

    @property
    def representation(self) -> AtomicRepresentation | None:
        return self.limit_result.representation if self.limit_result.feasible else None


def verify_limit_closed(
    seq: Sequence[Kernel], limit: Kernel | None = None, opts: DecomposeOptions | None = None
) -> LimitClosureReport:
    """Check that every member of a sequence of kernels and its limit are measure definite.

    ``limit`` defaults to the last member. Raises :class:`ValidationError` if the
    members disagree on labels or any member is not measure definite.
    """
    seq = list(seq)
    if not seq:
        raise ValidationError("empty kernel sequence")
    limit = seq[-1] if limit is None else limit
    labels = limit.labels
    for j, f in enumerate(seq):
        if f.labels != labels:
            raise ValidationError(f"member {j} has labels {f.labels}, expected {labels}")
        if not decompose(f, opts).feasible:
            raise ValidationError(f"member {j} of the sequence is not measure definite")
    result = decompose(limit, opts)
    ref = limit.as_float()
    devs = tuple(float(np.max(np.abs(f.as_float() - ref))) for f in seq)
    return LimitClosureReport(bool(result.feasible), len(seq), limit, result, devs)
