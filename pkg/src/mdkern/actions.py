"""Translation defects mu(S symmetric-difference gS) for group actions.

Two settings are covered exactly:

* the integers with counting measure, acted on through a homomorphism onto Z,
  for eventually constant sets S;
* finite groups acting by permutations on finite weighted ground sets.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .crofton import CroftonEstimate, CroftonOptions, CylinderSpec, cylinder_measure
from .embedding import schoenberg_embed
from .errors import ValidationError
from .kernel import Kernel, is_negative_definite

# ---------------------------------------------------------------------------------------
# Eventually constant subsets of Z


@dataclass(frozen=True)
class EventuallyConstantSet:
    """Membership is ``window_bits`` on [window_lo, window_hi], ``left_tail`` below, ``right_tail`` above."""

    window_lo: int
    window_hi: int
    window_bits: tuple
    left_tail: bool = False
    right_tail: bool = False

    def __post_init__(self):
        lo, hi = int(self.window_lo), int(self.window_hi)
        if lo > hi:
            raise ValidationError("window_lo must be <= window_hi")
        bits = self.window_bits
        if isinstance(bits, str):
            bits = tuple(ch == "1" for ch in bits)
        bits = tuple(bool(b) for b in bits)
        if len(bits) != hi - lo + 1:
            raise ValidationError(f"window [{lo}, {hi}] needs {hi - lo + 1} bits, got {len(bits)}")
        object.__setattr__(self, "window_lo", lo)
        object.__setattr__(self, "window_hi", hi)
        object.__setattr__(self, "window_bits", bits)
        object.__setattr__(self, "left_tail", bool(self.left_tail))
        object.__setattr__(self, "right_tail", bool(self.right_tail))

    @classmethod
    def from_toggles(cls, left: bool, toggles: Sequence[int]) -> "EventuallyConstantSet":
        """Inverse of :meth:`toggles`."""
        toggles = sorted(toggles)
        if not toggles:
            return cls(0, 0, (left,), left, left)
        lo, hi = toggles[0] - 1, toggles[-1]
        bits, state, k = [], left, 0
        for z in range(lo, hi + 1):
            while k < len(toggles) and toggles[k] <= z:
                state = not state
                k += 1
            bits.append(state)
        right = left ^ (len(toggles) % 2 == 1)
        return cls(lo, hi, tuple(bits), left, right)

    @classmethod
    def interval(cls, lo: int | None, hi: int | None) -> "EventuallyConstantSet":
        """[lo, hi] with None meaning unbounded on that side."""
        if lo is None and hi is None:
            return cls(0, 0, (True,), True, True)
        if lo is None:
            return cls.from_toggles(True, [hi + 1])
        if hi is None:
            return cls.from_toggles(False, [lo])
        if lo > hi:
            return cls(0, 0, (False,))
        return cls.from_toggles(False, [lo, hi + 1])

    @classmethod
    def finite(cls, members: Iterable[int]) -> "EventuallyConstantSet":
        members = sorted(set(int(m) for m in members))
        if not members:
            return cls(0, 0, (False,))
        lo, hi = members[0], members[-1]
        s = set(members)
        return cls(lo, hi, tuple(z in s for z in range(lo, hi + 1)))

    @classmethod
    def parse(cls, text: str) -> "EventuallyConstantSet":
        """Union of comma-separated terms: ``ge<a>``, ``le<b>``, ``<a>..<b>``, ``<z>``, ``all``, ``empty``.

        ``"ge1"`` is {1, 2, 3, ...}; ``"0,1,2"`` is a finite set; ``"le-3,5..7"`` mixes both.
        """
        out = cls(0, 0, (False,))
        terms = [t.strip() for t in text.split(",") if t.strip()]
        if not terms:
            raise ValidationError("empty set expression")
        for term in terms:
            if term == "all":
                part = cls.interval(None, None)
            elif term == "empty":
                part = cls(0, 0, (False,))
            elif m := re.fullmatch(r"ge([+-]?\d+)", term):
                part = cls.interval(int(m[1]), None)
            elif m := re.fullmatch(r"le([+-]?\d+)", term):
                part = cls.interval(None, int(m[1]))
            elif m := re.fullmatch(r"([+-]?\d+)\.\.([+-]?\d+)", term):
                part = cls.interval(int(m[1]), int(m[2]))
            elif re.fullmatch(r"[+-]?\d+", term):
                part = cls.finite([int(term)])
            else:
                raise ValidationError(f"cannot parse set term {term!r}")
            out = out.union(part)
        return out

    def to_dict(self) -> dict:
        return {
            "window_lo": self.window_lo,
            "window_hi": self.window_hi,
            "window_bits": "".join("1" if b else "0" for b in self.window_bits),
            "left_tail": "in" if self.left_tail else "out",
            "right_tail": "in" if self.right_tail else "out",
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EventuallyConstantSet":
        def tail(v):
            if v not in ("in", "out"):
                raise ValidationError(f"tail must be 'in' or 'out', got {v!r}")
            return v == "in"

        try:
            return cls(data["window_lo"], data["window_hi"], str(data["window_bits"]),
                       tail(data.get("left_tail", "out")), tail(data.get("right_tail", "out")))
        except KeyError as exc:
            raise ValidationError(f"missing field {exc}") from exc

    # -- membership -------------------------------------------------------------------

    def __contains__(self, z: int) -> bool:
        if z < self.window_lo:
            return self.left_tail
        if z > self.window_hi:
            return self.right_tail
        return self.window_bits[z - self.window_lo]

    def toggles(self) -> list[int]:
        """Sorted integers t where membership of t differs from membership of t - 1."""
        out = []
        prev = self.left_tail
        for off, b in enumerate(self.window_bits):
            if b != prev:
                out.append(self.window_lo + off)
            prev = b
        if self.right_tail != prev:
            out.append(self.window_hi + 1)
        return out

    def shift(self, k: int) -> "EventuallyConstantSet":
        """S + k."""
        return EventuallyConstantSet(
            self.window_lo + k, self.window_hi + k, self.window_bits, self.left_tail, self.right_tail
        )

    def _combine(self, other: "EventuallyConstantSet", op) -> "EventuallyConstantSet":
        lo = min(self.window_lo, other.window_lo)
        hi = max(self.window_hi, other.window_hi)
        bits = tuple(op(z in self, z in other) for z in range(lo, hi + 1))
        return EventuallyConstantSet(lo, hi, bits, op(self.left_tail, other.left_tail),
                                     op(self.right_tail, other.right_tail))

    def union(self, other):
        return self._combine(other, lambda a, b: a or b)

    def symmetric_difference(self, other):
        return self._combine(other, lambda a, b: a != b)

    def measure(self):
        """Counting measure: an int, or ``math.inf`` if a tail is in the set."""
        if self.left_tail or self.right_tail:
            return math.inf
        return sum(self.window_bits)


def defect(S: EventuallyConstantSet, k: int):
    """|S symmetric-difference (S + k)| under counting measure.

    S and S + k share their tails, so the result is always finite. Computed from the
    toggle points in O(#toggles log #toggles), independent of |k|.
    """
    t = S.toggles()
    merged = sorted(t + [x + k for x in t])
    # the XOR indicator starts at 0 and flips at every merged toggle
    return sum(merged[i + 1] - merged[i] for i in range(0, len(merged) - 1, 2))


def defects(S: EventuallyConstantSet, ks) -> np.ndarray:
    """Vectorized :func:`defect` over an integer array of shifts."""
    ks = np.asarray(ks, dtype=np.int64).reshape(-1)
    t = np.asarray(S.toggles(), dtype=np.int64)
    if t.size == 0:
        return np.zeros(ks.shape, dtype=np.int64)
    merged = np.sort(np.concatenate([np.broadcast_to(t, (ks.size, t.size)), t[None, :] + ks[:, None]], axis=1), axis=1)
    return (merged[:, 1::2] - merged[:, 0::2]).sum(axis=1)


@dataclass(frozen=True)
class ZAction:
    """A group acting on Z through a homomorphism; only the generator images matter."""

    amounts: Mapping[str, int]

    def __post_init__(self):
        object.__setattr__(self, "amounts", {str(g): int(a) for g, a in dict(self.amounts).items()})

    @classmethod
    def parse(cls, text: str) -> "ZAction":
        """``"+2,-3"`` -> generators g1 -> 2, g2 -> -3."""
        parts = [p.strip() for p in text.split(",") if p.strip()]
        if not parts:
            raise ValidationError("no generators given")
        try:
            return cls({f"g{i + 1}": int(p) for i, p in enumerate(parts)})
        except ValueError as exc:
            raise ValidationError(f"bad generator amount in {text!r}") from exc

    def evaluate(self, word: Sequence[tuple[str, int]]) -> int:
        """Translation amount of a word given as (generator, +1 / -1) letters."""
        return sum(sign * self.amounts[g] for g, sign in word)


def reachable_layers(amounts: Iterable[int], radius: int) -> np.ndarray:
    """Word-length distance of each integer in [-M*radius, M*radius], -1 if not reachable.

    Entry i corresponds to translation ``i - M*radius`` with M = max |amount|.
    """
    steps = sorted({abs(int(a)) for a in amounts} - {0})
    M = max(steps, default=0)
    span = M * radius
    dist = np.full(2 * span + 1, -1, dtype=np.int64)
    dist[span] = 0
    frontier = np.zeros(2 * span + 1, dtype=bool)
    frontier[span] = True
    seen = frontier.copy()
    for ell in range(1, radius + 1):
        nxt = np.zeros_like(frontier)
        for s in steps:
            nxt[s:] |= frontier[:-s]
            nxt[:-s] |= frontier[s:]
        nxt &= ~seen
        if not nxt.any():
            break
        dist[nxt] = ell
        seen |= nxt
        frontier = nxt
    return dist


def defect_growth(A: ZAction, S: EventuallyConstantSet, radius: int) -> list[tuple[int, int]]:
    """(ell, max defect over group elements of word length <= ell) for ell = 1..radius.

    The defect of a word only depends on its image k in Z, so the scan runs over
    the integers reachable with at most ell generator letters.
    """
    if radius < 1:
        raise ValidationError("radius must be >= 1")
    dist = reachable_layers(A.amounts.values(), radius)
    span = (dist.size - 1) // 2
    ks = np.arange(-span, span + 1, dtype=np.int64)
    reach = dist >= 0
    vals = defects(S, ks[reach])
    per_layer = np.zeros(radius + 1, dtype=np.int64)
    np.maximum.at(per_layer, dist[reach], vals)
    running = np.maximum.accumulate(per_layer)
    return [(ell, int(running[ell])) for ell in range(1, radius + 1)]


# ---------------------------------------------------------------------------------------
# Finite groups


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    elements: tuple
    table: Mapping  # (a, b) -> a*b

    def __post_init__(self):
        els = tuple(str(e) for e in self.elements)
        table = {(str(a), str(b)): str(c) for (a, b), c in dict(self.table).items()}
        for a in els:
            for b in els:
                if table.get((a, b)) not in els:
                    raise ValidationError(f"product {a}*{b} missing or outside the group")
        object.__setattr__(self, "elements", els)
        object.__setattr__(self, "table", table)
        # identity and inverses
        ids = [e for e in els if all(table[(e, x)] == x and table[(x, e)] == x for x in els)]
        if len(ids) != 1:
            raise ValidationError("multiplication table has no identity")
        for a, b, c in itertools.product(els, repeat=3):
            if table[(table[(a, b)], c)] != table[(a, table[(b, c)])]:
                raise ValidationError("multiplication is not associative")
        for a in els:
            if not any(table[(a, b)] == ids[0] for b in els):
                raise ValidationError(f"{a} has no inverse")

    @property
    def identity(self) -> str:
        return next(e for e in self.elements if all(self.table[(e, x)] == x for x in self.elements))

    def mul(self, a, b) -> str:
        try:
            return self.table[(str(a), str(b))]
        except KeyError:
            raise ValidationError(f"{a!r} or {b!r} is not a group element") from None

    def inverse(self, a) -> str:
        e = self.identity
        return next(b for b in self.elements if self.mul(a, b) == e)

    def __contains__(self, a) -> bool:
        return str(a) in self.elements

    @classmethod
    def cyclic(cls, n: int) -> "FiniteGroup":
        els = [str(i) for i in range(n)]
        return cls(tuple(els), {(str(a), str(b)): str((a + b) % n) for a in range(n) for b in range(n)})

    @classmethod
    def symmetric(cls, n: int) -> "FiniteGroup":
        """Permutations of 0..n-1 in one-line notation; (a*b)(i) = a(b(i))."""
        perms = list(itertools.permutations(range(n)))
        name = {p: "".join(map(str, p)) for p in perms}
        table = {(name[a], name[b]): name[tuple(a[b[i]] for i in range(n))] for a in perms for b in perms}
        return cls(tuple(name[p] for p in perms), table)

    @classmethod
    def parse(cls, text: str) -> "FiniteGroup":
        m = re.fullmatch(r"(cyclic|symmetric):(\d+)", text.strip())
        if not m:
            raise ValidationError(f"group must be 'cyclic:<n>' or 'symmetric:<n>', got {text!r}")
        n = int(m[2])
        if n < 1:
            raise ValidationError("group order parameter must be >= 1")
        return cls.cyclic(n) if m[1] == "cyclic" else cls.symmetric(n)


@dataclass(frozen=True, eq=False)
class FiniteGroupAction:
    """Action of a finite group by permutations of a weighted finite ground set."""

    group: FiniteGroup
    ground: tuple
    perms: Mapping  # element -> tuple, perms[g][i] = index of g . ground[i]
    masses: tuple

    def __post_init__(self):
        ground = tuple(str(p) for p in self.ground)
        n = len(ground)
        perms = {str(g): tuple(int(i) for i in p) for g, p in dict(self.perms).items()}
        masses = tuple(self.masses)
        if len(masses) != n or any(not m > 0 for m in masses):
            raise ValidationError("need one positive mass per ground point")
        G = self.group
        for g in G.elements:
            p = perms.get(g)
            if p is None or sorted(p) != list(range(n)):
                raise ValidationError(f"element {g} does not act by a permutation")
            if any(masses[p[i]] != masses[i] for i in range(n)):
                raise ValidationError(f"element {g} does not preserve the masses")
        if perms[G.identity] != tuple(range(n)):
            raise ValidationError("identity must act trivially")
        for a in G.elements:
            for b in G.elements:
                ab = perms[G.mul(a, b)]
                if any(ab[i] != perms[a][perms[b][i]] for i in range(n)):
                    raise ValidationError(f"action is not a homomorphism at ({a}, {b})")
        object.__setattr__(self, "ground", ground)
        object.__setattr__(self, "perms", perms)
        object.__setattr__(self, "masses", masses)

    @classmethod
    def regular(cls, G: FiniteGroup, mass=1) -> "FiniteGroupAction":
        """Left multiplication of G on itself."""
        idx = {e: i for i, e in enumerate(G.elements)}
        perms = {g: tuple(idx[G.mul(g, x)] for x in G.elements) for g in G.elements}
        return cls(G, G.elements, perms, (mass,) * len(G.elements))

    def image(self, g, S: Iterable) -> frozenset:
        if str(g) not in self.group:
            raise ValidationError(f"{g!r} is not a group element")
        idx = {p: i for i, p in enumerate(self.ground)}
        p = self.perms[str(g)]
        return frozenset(self.ground[p[idx[s]]] for s in S)

    def mass(self, subset: Iterable):
        idx = {p: i for i, p in enumerate(self.ground)}
        return sum((self.masses[idx[s]] for s in subset), 0)

    @property
    def total_mass(self):
        return sum(self.masses, 0)


def orbit_kernel(A: FiniteGroupAction, S: Iterable, elements: Sequence | None = None) -> Kernel:
    """K(x, y) = mass of xS symmetric-difference yS."""
    S = frozenset(str(s) for s in S)
    unknown = S - set(A.ground)
    if unknown:
        raise ValidationError(f"{sorted(unknown)} not in the ground set")
    elements = A.group.elements if elements is None else tuple(str(e) for e in elements)
    for e in elements:
        if e not in A.group:
            raise ValidationError(f"{e!r} is not a group element")
    images = {e: A.image(e, S) for e in elements}
    return Kernel.from_function(elements, lambda x, y: A.mass(images[x] ^ images[y]))


def is_left_invariant(K: Kernel, G: FiniteGroup, tol: float = 1e-12) -> bool:
    """K(gx, gy) = K(x, y) for all g, x, y; K must be labeled by all of G."""
    if set(K.labels) != set(G.elements):
        return False
    vals = K.as_float()
    thresh = tol * K.scale
    for g in G.elements:
        perm = [K.index(G.mul(g, x)) for x in K.labels]
        if np.max(np.abs(vals[np.ix_(perm, perm)] - vals)) > thresh:
            return False
    return True


@dataclass(frozen=True)
class InvarianceReport:
    element: str
    cylinder: CylinderSpec
    translated: CylinderSpec
    original_estimate: CroftonEstimate
    translated_estimate: CroftonEstimate

    @property
    def difference(self) -> float:
        return self.translated_estimate.value - self.original_estimate.value

    @property
    def combined_std_error(self) -> float:
        return math.hypot(self.original_estimate.std_error, self.translated_estimate.std_error)

    @property
    def agree(self) -> bool:
        """Within 3 combined standard errors (or 1e-9 relative for deterministic estimates)."""
        slack = max(3 * self.combined_std_error, 1e-9 * max(1.0, abs(self.original_estimate.value)))
        return abs(self.difference) <= slack

    def to_dict(self) -> dict:
        return {
            "element": self.element,
            "cylinder": {"positives": list(self.cylinder.positives), "negatives": list(self.cylinder.negatives)},
            "translated": {"positives": list(self.translated.positives), "negatives": list(self.translated.negatives)},
            "original": self.original_estimate.to_dict(),
            "translated_estimate": self.translated_estimate.to_dict(),
            "difference": self.difference,
            "combined_std_error": self.combined_std_error,
            "agree": self.agree,
        }


def group_cylinder_invariance(
    f: Kernel, G: FiniteGroup, g, cyl: CylinderSpec, opts: CroftonOptions | None = None
) -> InvarianceReport:
    """Half-space mass of a cylinder and of its left translate by g, on the embedding of f.

    f must be negative definite and left invariant; the embedding has
    |v_x - v_y|^2 = f(x, y), so the two cylinders have congruent point sets.
    """
    opts = opts or CroftonOptions()
    g = str(g)
    if g not in G:
        raise ValidationError(f"{g!r} is not a group element")
    if not is_left_invariant(f, G):
        raise ValidationError("kernel is not left invariant under the group")
    res = is_negative_definite(f, opts.embed_tol)
    if not res.negative_definite:
        raise ValidationError("kernel is not negative definite")
    C = schoenberg_embed(f, opts.embed_tol)
    moved = cyl.relabeled(lambda x: G.mul(g, x))
    return InvarianceReport(g, cyl, moved, cylinder_measure(C, cyl, opts), cylinder_measure(C, moved, opts))
