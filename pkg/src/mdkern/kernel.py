"""Finite kernels f(x, y) on a labeled set, with negative-definite and pseudometric tests.

A :class:`Kernel` is a symmetric matrix with zero diagonal indexed by string labels.
Values are either float64 or, when every entry is rational (ints or Fractions),
exact :class:`fractions.Fraction` objects; exact kernels feed the rational code paths
in :mod:`mdkern.measurespace` and :mod:`mdkern.cutcone`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, NamedTuple, Sequence

import numpy as np

from ._numbers import encode_scalar, is_exact, parse_scalar
from .errors import ValidationError

# Float inputs may carry round-off asymmetry from upstream arithmetic.
_SYMMETRY_ATOL = 1e-12


def _as_value_array(values) -> np.ndarray:
    if isinstance(values, np.ndarray) and values.dtype != object:
        return np.array(values, dtype=float)
    rows = [list(r) for r in values]
    flat = [v for r in rows for v in r]
    if flat and all(is_exact(v) for v in flat):
        arr = np.empty((len(rows), len(rows[0]) if rows else 0), dtype=object)
        for i, r in enumerate(rows):
            if len(r) != arr.shape[1]:
                raise ValidationError("kernel rows have unequal length")
            for j, v in enumerate(r):
                arr[i, j] = Fraction(v)
        return arr
    try:
        return np.array([[float(v) for v in r] for r in rows], dtype=float)
    except ValueError as exc:
        raise ValidationError("kernel rows have unequal length") from exc


@dataclass(frozen=True, eq=False)
class Kernel:
    """Labeled symmetric matrix with zero diagonal."""

    labels: tuple
    values: np.ndarray

    def __post_init__(self):
        labels = tuple(str(x) for x in self.labels)
        if len(labels) == 0:
            raise ValidationError("a kernel needs at least one label")
        if len(set(labels)) != len(labels):
            raise ValidationError(f"duplicate labels in {labels}")
        vals = _as_value_array(self.values)
        n = len(labels)
        if vals.shape != (n, n):
            raise ValidationError(f"values must be {n}x{n}, got shape {vals.shape}")
        if vals.dtype == object:
            if any(vals[i, j] != vals[j, i] for i in range(n) for j in range(i)):
                raise ValidationError("kernel is not symmetric")
            if any(vals[i, i] != 0 for i in range(n)):
                raise ValidationError("kernel diagonal must be zero")
        else:
            if not np.all(np.isfinite(vals)):
                raise ValidationError("kernel entries must be finite (no NaN/inf)")
            atol = _SYMMETRY_ATOL * max(1.0, float(np.max(np.abs(vals))) if vals.size else 1.0)
            if np.max(np.abs(vals - vals.T), initial=0.0) > atol:
                raise ValidationError("kernel is not symmetric")
            if np.max(np.abs(np.diag(vals)), initial=0.0) > atol:
                raise ValidationError("kernel diagonal must be zero")
            vals = 0.5 * (vals + vals.T)
            np.fill_diagonal(vals, 0.0)
        vals.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "values", vals)

    # -- construction -------------------------------------------------------

    @classmethod
    def from_function(cls, labels: Sequence, f: Callable) -> "Kernel":
        labels = list(labels)
        return cls(tuple(str(x) for x in labels), [[f(x, y) for y in labels] for x in labels])

    @classmethod
    def zeros(cls, labels: Sequence) -> "Kernel":
        n = len(labels)
        return cls(tuple(labels), np.zeros((n, n)))

    # -- accessors ----------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def is_exact(self) -> bool:
        return self.values.dtype == object

    def index(self, label) -> int:
        try:
            return self.labels.index(str(label))
        except ValueError:
            raise ValidationError(f"unknown label {label!r}") from None

    def __call__(self, x, y):
        return self.values[self.index(x), self.index(y)]

    def as_float(self) -> np.ndarray:
        return np.array(self.values, dtype=float)

    def as_fractions(self) -> np.ndarray:
        """Exact copy; float entries are converted without rounding."""
        out = np.empty(self.values.shape, dtype=object)
        for idx, v in np.ndenumerate(self.values):
            out[idx] = Fraction(v)
        return out

    @property
    def scale(self) -> float:
        """max(1, max|K_ij|), the reference magnitude for relative tolerances."""
        return max(1.0, float(np.max(np.abs(self.as_float()))))

    def require_nonnegative(self) -> None:
        if np.any(self.as_float() < 0) or (self.is_exact and any(v < 0 for v in self.values.flat)):
            raise ValidationError("kernel has negative entries")

    def permuted(self, order: Sequence[int]) -> "Kernel":
        order = list(order)
        return Kernel(tuple(self.labels[i] for i in order), self.values[np.ix_(order, order)])

    def map_values(self, fn) -> "Kernel":
        return Kernel(self.labels, [[fn(v) for v in row] for row in self.values])

    def allclose(self, other: "Kernel", rtol: float = 0.0, atol: float = 1e-12) -> bool:
        return self.labels == other.labels and np.allclose(
            self.as_float(), other.as_float(), rtol=rtol, atol=atol
        )

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "labels": list(self.labels),
            "values": [[encode_scalar(v) for v in row] for row in self.values],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Kernel":
        try:
            labels = data["labels"]
            rows = data["values"]
        except (KeyError, TypeError) as exc:
            raise ValidationError("kernel JSON needs 'labels' and 'values'") from exc
        if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
            raise ValidationError("'values' must be a list of rows")
        return cls(tuple(labels), [[parse_scalar(v) for v in r] for r in rows])

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "Kernel":
        try:
            data = json.loads(text, parse_constant=_reject_constant)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"malformed kernel JSON: {exc}") from exc
        return cls.from_dict(data)

    def __repr__(self):
        return f"Kernel(labels={list(self.labels)}, values={self.values.tolist()})"


def _reject_constant(name):
    raise ValidationError(f"non-finite constant {name} not allowed")


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NegDefWitness:
    """Mean-zero coefficient vector c with positive quadratic form sum_ij c_i c_j K_ij."""

    coefficients: tuple
    value: float


class NegDefResult(NamedTuple):
    negative_definite: bool
    witness: NegDefWitness | None
    max_eigenvalue: float


class PseudometricResult(NamedTuple):
    pseudometric: bool
    violation: tuple | None  # (i, k, j) with K_ij > K_ik + K_kj
    excess: float


def quadratic_form(K: Kernel, c: Sequence) -> float | Fraction:
    """sum_ij c_i c_j K_ij, exact when both K and c are rational."""
    if K.is_exact and all(is_exact(x) for x in c):
        cs = [Fraction(x) for x in c]
        n = K.n
        return sum(cs[i] * cs[j] * K.values[i, j] for i in range(n) for j in range(n))
    v = np.asarray(c, dtype=float)
    return float(v @ K.as_float() @ v)


def _centering(n: int) -> np.ndarray:
    return np.eye(n) - np.full((n, n), 1.0 / n)


def _integerize(v: np.ndarray):
    """Rescale a mean-zero vector to small integers when it is (numerically) proportional to one."""
    big = np.max(np.abs(v))
    nz = np.abs(v)[np.abs(v) > 1e-9 * big]
    scaled = v / nz.min()
    ints = np.rint(scaled)
    if np.max(np.abs(ints - scaled)) < 1e-6 and ints.sum() == 0 and np.max(np.abs(ints)) < 1e6:
        return tuple(int(x) for x in ints)
    return None


def is_negative_definite(K: Kernel, tol: float = 1e-9) -> NegDefResult:
    """Conditionally negative definite test via the spectrum of P K P, P = I - 11^T/n.

    Passes iff the largest eigenvalue of the projected matrix is at most
    ``tol * K.scale``. On failure the top eigenvector (mean zero by construction)
    is returned as a witness, rescaled to integers when that is possible.
    """
    if tol <= 0:
        raise ValidationError("tol must be positive")
    n = K.n
    if n == 1:
        return NegDefResult(True, None, 0.0)
    P = _centering(n)
    M = P @ K.as_float() @ P
    evals, evecs = np.linalg.eigh(0.5 * (M + M.T))
    top = float(evals[-1])
    thresh = tol * K.scale
    if top <= thresh:
        return NegDefResult(True, None, top)

    v = evecs[:, -1]
    v = v - v.mean()
    first = v[np.argmax(np.abs(v) > 1e-9 * np.max(np.abs(v)))]
    if first < 0:
        v = -v
    coeffs = _integerize(v)
    if coeffs is None:
        coeffs = tuple(float(x) for x in v / np.max(np.abs(v)))
    value = float(quadratic_form(K, coeffs))
    if not value > thresh:
        # integer rounding is only kept if it still refutes; the raw eigenvector always does
        coeffs = tuple(float(x) for x in v)
        value = float(quadratic_form(K, coeffs))
    return NegDefResult(False, NegDefWitness(coeffs, value), top)


def is_pseudometric(K: Kernel, tol: float = 1e-9) -> PseudometricResult:
    """Triangle inequality check; reports the lexicographically first violating (i, k, j)."""
    K.require_nonnegative()
    A = K.as_float()
    thresh = tol * K.scale
    # excess[i, k, j] = K_ij - K_ik - K_kj
    excess = A[:, None, :] - A[:, :, None] - A[None, :, :]
    bad = np.argwhere(excess > thresh)
    if bad.size == 0:
        return PseudometricResult(True, None, float(max(0.0, excess.max(initial=0.0))))
    i, k, j = (int(t) for t in bad[0])
    return PseudometricResult(False, (i, k, j), float(excess[i, k, j]))


def _checked_sqrt(v):
    if v < 0:
        raise ValidationError("sqrt_kernel needs nonnegative entries")
    if is_exact(v):
        f = Fraction(v)
        rn, rd = math.isqrt(f.numerator), math.isqrt(f.denominator)
        if rn * rn == f.numerator and rd * rd == f.denominator:
            return Fraction(rn, rd)
    return math.sqrt(float(v))


def sqrt_kernel(K: Kernel) -> Kernel:
    """Entrywise square root; perfect rational squares stay exact."""
    K.require_nonnegative()
    roots = [[_checked_sqrt(v) for v in row] for row in K.values]
    if K.is_exact and not all(is_exact(v) for row in roots for v in row):
        roots = [[float(v) for v in row] for row in roots]
    return Kernel(K.labels, roots)
