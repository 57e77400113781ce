"""Atomic measures on the space of non-constant 0/1 membership patterns.

For a finite label set every measure representing a kernel as
f(x, y) = mu(S_x symmetric-difference S_y) can be pushed forward to a weighted
collection of membership patterns: a pattern is a 0/1 word over the labels and
S_x is the set of patterns with a 1 at x. Constant words separate nothing and are
excluded from :class:`AtomicRepresentation`; :class:`GroundedRepresentation` is the
raw, un-normalized form (duplicates and constant words allowed).

Weights are floats or exact rationals (int / Fraction). Kernels computed from
all-rational representations are exact.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from ._numbers import encode_scalar, is_exact, parse_scalar
from .errors import ValidationError
from .kernel import Kernel


def _check_pattern(pattern: str, n: int, allow_constant: bool) -> str:
    if not isinstance(pattern, str) or len(pattern) != n or set(pattern) - {"0", "1"}:
        raise ValidationError(f"pattern {pattern!r} is not a 0/1 word of length {n}")
    if not allow_constant and len(set(pattern)) < 2:
        raise ValidationError(f"constant pattern {pattern!r} is not a point of the pattern space")
    return pattern


def _check_weight(w):
    if isinstance(w, bool) or not isinstance(w, (int, float, Fraction, np.floating, np.integer)):
        raise ValidationError(f"weight {w!r} is not a number")
    if not is_exact(w):
        w = float(w)
        if not math.isfinite(w):
            raise ValidationError("weights must be finite")
    if w < 0:
        raise ValidationError(f"negative weight {w!r}")
    return w


def complement(pattern: str) -> str:
    return pattern.translate(str.maketrans("01", "10"))


def pattern_from_set(members, labels: Sequence) -> str:
    members = {str(m) for m in members}
    unknown = members - {str(x) for x in labels}
    if unknown:
        raise ValidationError(f"labels {sorted(unknown)} not in {list(labels)}")
    return "".join("1" if str(x) in members else "0" for x in labels)


def pattern_from_mask(mask: int, n: int) -> str:
    """Bit i of ``mask`` is the membership of label i."""
    return "".join("1" if mask >> i & 1 else "0" for i in range(n))


def mask_from_pattern(pattern: str) -> int:
    return sum(1 << i for i, ch in enumerate(pattern) if ch == "1")


@dataclass(frozen=True, eq=False)
class AtomicRepresentation:
    labels: tuple
    atoms: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        labels = tuple(str(x) for x in self.labels)
        if not labels:
            raise ValidationError("a representation needs at least one label")
        if len(set(labels)) != len(labels):
            raise ValidationError("duplicate labels")
        n = len(labels)
        atoms = {}
        for p, w in dict(self.atoms).items():
            atoms[_check_pattern(p, n, allow_constant=False)] = _check_weight(w)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "atoms", atoms)

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def is_exact(self) -> bool:
        return all(is_exact(w) for w in self.atoms.values())

    def items(self):
        """(pattern, weight) pairs in sorted pattern order."""
        return sorted(self.atoms.items())

    def total_mass(self):
        return sum((w for _, w in self.items()), Fraction(0) if self.is_exact else 0.0)

    def to_dict(self) -> dict:
        return {
            "labels": list(self.labels),
            "atoms": [{"pattern": p, "weight": encode_scalar(w)} for p, w in self.items()],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AtomicRepresentation":
        try:
            labels = tuple(data["labels"])
            entries = data.get("atoms", [])
            atoms = {}
            for e in entries:
                p = e["pattern"]
                if p in atoms:
                    raise ValidationError(f"pattern {p!r} listed twice")
                atoms[p] = parse_scalar(e["weight"])
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"bad representation JSON: {exc}") from exc
        return cls(labels, atoms)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "AtomicRepresentation":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True, eq=False)
class GroundedRepresentation:
    """A discretized measure space: weighted points with their memberships in the sets S_x.

    ``sheets`` optionally tags each point (complement doubling uses 0 / 1).
    """

    labels: tuple
    points: tuple = ()
    sheets: tuple | None = None

    def __post_init__(self):
        labels = tuple(str(x) for x in self.labels)
        if not labels:
            raise ValidationError("a representation needs at least one label")
        n = len(labels)
        pts = tuple(
            (_check_pattern(p, n, allow_constant=True), _check_weight(w)) for p, w in self.points
        )
        if self.sheets is not None and len(self.sheets) != len(pts):
            raise ValidationError("sheets must tag every point")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "points", pts)
        if self.sheets is not None:
            object.__setattr__(self, "sheets", tuple(self.sheets))

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def is_exact(self) -> bool:
        return all(is_exact(w) for _, w in self.points)

    def items(self):
        return list(self.points)

    def to_dict(self) -> dict:
        out = {
            "labels": list(self.labels),
            "points": [{"pattern": p, "weight": encode_scalar(w)} for p, w in self.points],
        }
        if self.sheets is not None:
            out["sheets"] = list(self.sheets)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "GroundedRepresentation":
        try:
            pts = tuple((e["pattern"], parse_scalar(e["weight"])) for e in data.get("points", []))
            return cls(tuple(data["labels"]), pts, data.get("sheets"))
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"bad representation JSON: {exc}") from exc


Representation = AtomicRepresentation | GroundedRepresentation


def symmetric_difference_kernel(R: Representation) -> Kernel:
    """K(x, y) = total weight of points whose pattern differs at x and y."""
    n = R.n
    items = R.items()
    if R.is_exact:
        vals = [[Fraction(0)] * n for _ in range(n)]
        for p, w in items:
            w = Fraction(w)
            ones = [i for i, ch in enumerate(p) if ch == "1"]
            zeros = [i for i, ch in enumerate(p) if ch == "0"]
            for i in ones:
                for j in zeros:
                    vals[i][j] += w
                    vals[j][i] += w
        return Kernel(R.labels, vals)
    if not items:
        return Kernel(R.labels, np.zeros((n, n)))
    bits = np.array([[ch == "1" for ch in p] for p, _ in items], dtype=bool)
    w = np.array([float(w) for _, w in items])
    sep = bits[:, :, None] != bits[:, None, :]
    return Kernel(R.labels, np.einsum("a,aij->ij", w, sep.astype(float)))


def one_sided_difference(R: Representation, x, y):
    """mu(S_x minus S_y): weight of points with a 1 at x and a 0 at y."""
    try:
        i, j = R.labels.index(str(x)), R.labels.index(str(y))
    except ValueError:
        raise ValidationError(f"labels {x!r}, {y!r} not both present") from None
    total = Fraction(0) if R.is_exact else 0.0
    for p, w in R.items():
        if p[i] == "1" and p[j] == "0":
            total += w
    return total


def pushforward(G: GroundedRepresentation) -> AtomicRepresentation:
    """Send each ground point to its membership pattern: drop constant patterns, merge equal ones."""
    merged: dict[str, object] = {}
    for p, w in G.points:
        if len(set(p)) < 2:
            continue
        merged[p] = merged[p] + w if p in merged else w
    return AtomicRepresentation(G.labels, merged)


def complement_double(R: AtomicRepresentation) -> GroundedRepresentation:
    """Two sheets: the original atoms, and a copy carrying complemented patterns.

    Afterwards mu(S'_x minus S'_y) = mu(S'_y minus S'_x) = f(x, y) for every pair.
    """
    items = R.items()
    pts = [(p, w) for p, w in items] + [(complement(p), w) for p, w in items]
    return GroundedRepresentation(R.labels, tuple(pts), (0,) * len(items) + (1,) * len(items))
