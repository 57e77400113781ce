"""Rigid-motion invariant measure on half-spaces of R^d and its cylinder / atom masses.

A half-space is {p : <u, p> > t} with u a unit vector and t real. The measure is
du dt normalized so the half-spaces containing v but not w have mass |v - w|.
For labels P (must be inside) and N (must be outside) the mass is

    (1 / kappa_d) * E_u[ (min_P <u, v_p> - max_N <u, v_q>)_+ ],

u uniform on the unit sphere and kappa_d = E_u[<u, e>_+]. Three evaluators:

* ``exact``       d = 1, the sphere is {-1, +1}.
* ``quadrature``  d = 2, the circle is cut where two projections cross; on each
  arc the integrand is a single sinusoid and is integrated in closed form.
* ``mc``          any d, randomly rotated orthonormal frames (both signs of each
  axis), one frame per sample index, drawn from a counter-based hash so results
  do not depend on chunking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

import numpy as np

from .embedding import PointConfiguration, schoenberg_embed
from .errors import EstimatorError, SizeError, ValidationError
from .kernel import Kernel, is_negative_definite
from .measurespace import AtomicRepresentation, pattern_from_mask

METHODS = ("auto", "exact", "quadrature", "mc")
_METHOD_NAMES = {"exact": "exact-1d", "quadrature": "quadrature-2d", "mc": "monte-carlo"}
_FRAMES_PER_BLOCK = 2048


@dataclass(frozen=True)
class CroftonOptions:
    method: str = "auto"
    samples: int = 10**6  # number of directions for "mc"
    seed: int = 0
    tol: float = 1e-8  # quadrature tolerance
    atom_cap: int = 12
    embed_tol: float = 1e-9

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValidationError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.samples < 1:
            raise ValidationError("samples must be >= 1")
        if self.tol <= 0:
            raise ValidationError("tol must be positive")


@dataclass(frozen=True)
class CylinderSpec:
    positives: tuple
    negatives: tuple

    def __post_init__(self):
        pos = tuple(dict.fromkeys(str(x) for x in self.positives))
        neg = tuple(dict.fromkeys(str(x) for x in self.negatives))
        if not pos or not neg:
            raise ValidationError("cylinder needs nonempty positive and negative label sets")
        overlap = set(pos) & set(neg)
        if overlap:
            raise ValidationError(f"labels {sorted(overlap)} are both positive and negative")
        object.__setattr__(self, "positives", pos)
        object.__setattr__(self, "negatives", neg)

    def swapped(self) -> "CylinderSpec":
        return CylinderSpec(self.negatives, self.positives)

    def relabeled(self, mapping) -> "CylinderSpec":
        return CylinderSpec([mapping(x) for x in self.positives], [mapping(x) for x in self.negatives])


@dataclass(frozen=True)
class CroftonEstimate:
    value: float
    std_error: float
    method: str
    samples: int
    seed: int

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "std_error": self.std_error,
            "method": self.method,
            "samples": self.samples,
            "seed": self.seed,
        }


# -- calibration constant -----------------------------------------------------


@lru_cache(maxsize=None)
def kappa(d: int) -> float:
    """E[<u, e>_+] for u uniform on the unit sphere of R^d.

    Closed form Gamma(d/2) / (2 sqrt(pi) Gamma((d+1)/2)); kappa(1) = 1/2, kappa(2) = 1/pi.
    """
    if d < 1:
        raise ValidationError("dimension must be >= 1")
    return math.exp(math.lgamma(d / 2) - math.lgamma((d + 1) / 2)) / (2 * math.sqrt(math.pi))


@lru_cache(maxsize=1)
def _check_calibration() -> bool:
    if abs(kappa(1) - 0.5) > 1e-12 or abs(kappa(2) - 1 / math.pi) > 1e-12:
        raise EstimatorError("half-space calibration constants are off")
    return True


# -- counter-based direction frames ---------------------------------------------

def _mix64(z: np.ndarray) -> np.ndarray:
    # splitmix64 finalizer
    with np.errstate(over="ignore"):
        z = z + np.uint64(0x9E3779B97F4A7C15)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))


def _uniforms(key: np.uint64, counters: np.ndarray) -> np.ndarray:
    z = _mix64(_mix64(counters ^ key))
    return ((z >> np.uint64(11)).astype(float) + 0.5) * 2.0**-53


def frame_directions(seed: int, start: int, count: int, d: int) -> np.ndarray:
    """Orthonormal frames for sample indices start..start+count-1, shape (count, d, d).

    Row k of frame i is a unit vector; each frame is Haar distributed and depends
    only on (seed, i).
    """
    key = _mix64(np.array([seed & 0xFFFFFFFFFFFFFFFF], dtype=np.uint64))[0]
    idx = np.arange(start, start + count, dtype=np.uint64)
    entry = np.arange(d * d, dtype=np.uint64)
    c = (idx[:, None] * np.uint64(d * d) + entry[None, :]) * np.uint64(2)
    u1 = _uniforms(key, c)
    u2 = _uniforms(key, c + np.uint64(1))
    g = np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)
    g = g.reshape(count, d, d)
    q, r = np.linalg.qr(g)
    signs = np.sign(np.diagonal(r, axis1=1, axis2=2))
    signs[signs == 0] = 1.0
    q = q * signs[:, None, :]
    return np.swapaxes(q, 1, 2)


# -- method dispatch ----------------------------------------------------------------


def _resolve_method(method: str, d: int) -> str:
    if method == "auto":
        return "exact" if d == 1 else "quadrature" if d == 2 else "mc"
    if method == "exact" and d != 1:
        raise ValidationError(f"exact evaluation needs d = 1, configuration has d = {d}")
    if method == "quadrature" and d != 2:
        raise ValidationError(f"quadrature evaluation needs d = 2, configuration has d = {d}")
    return method


def _frame_count(samples: int, d: int) -> int:
    return max(2, -(-samples // (2 * d)))


def _circle_breakpoints(vecs: Iterable[np.ndarray], scale: float) -> np.ndarray:
    """Angles in [0, 2pi) where <u(theta), w> = 0 for some nonzero w, plus the endpoints."""
    angles = [0.0, 2 * math.pi]
    for w in vecs:
        if math.hypot(w[0], w[1]) <= 1e-15 * scale:
            continue
        phi = math.atan2(w[1], w[0])
        for a in (phi + math.pi / 2, phi - math.pi / 2):
            angles.append(a % (2 * math.pi))
    return np.unique(np.array(angles))


def _arc_integral(w: np.ndarray, a: float, b: float) -> float:
    """Integral over [a, b] of <(cos t, sin t), w> dt."""
    return w[0] * (math.sin(b) - math.sin(a)) - w[1] * (math.cos(b) - math.cos(a))


# -- cylinder masses ------------------------------------------------------------------


def _points_for(C: PointConfiguration, cyl: CylinderSpec):
    P = np.array([C.point(x) for x in cyl.positives])
    N = np.array([C.point(x) for x in cyl.negatives])
    return P, N


def cylinder_measure(
    C: PointConfiguration, cyl: CylinderSpec, opts: CroftonOptions | None = None
) -> CroftonEstimate:
    """Mass of the half-spaces containing every positive point and no negative point."""
    opts = opts or CroftonOptions()
    _check_calibration()
    P, N = _points_for(C, cyl)
    d = C.dim
    method = _resolve_method(opts.method, d)

    if method == "exact":
        p, q = P[:, 0], N[:, 0]
        value = max(p.min() - q.max(), 0.0) + max(q.min() - p.max(), 0.0)
        return CroftonEstimate(float(value), 0.0, _METHOD_NAMES[method], 2, opts.seed)

    if method == "quadrature":
        pts = np.vstack([P, N])
        scale = max(1.0, float(np.max(np.abs(pts))))
        diffs = [pts[i] - pts[j] for i in range(len(pts)) for j in range(i)]
        cuts = _circle_breakpoints(diffs, scale)
        total = 0.0
        for a, b in zip(cuts[:-1], cuts[1:]):
            if b - a <= 0:
                continue
            m = 0.5 * (a + b)
            u = np.array([math.cos(m), math.sin(m)])
            ip, iq = int(np.argmin(P @ u)), int(np.argmax(N @ u))
            if P[ip] @ u > N[iq] @ u:
                total += _arc_integral(P[ip] - N[iq], a, b)
        # 1 / (kappa_2 * 2 pi) = 1/2
        return CroftonEstimate(float(0.5 * total), 0.0, _METHOD_NAMES[method], len(cuts) - 1, opts.seed)

    frames = _frame_count(opts.samples, d)
    s1 = s2 = 0.0
    for start in range(0, frames, _FRAMES_PER_BLOCK):
        count = min(_FRAMES_PER_BLOCK, frames - start)
        U = frame_directions(opts.seed, start, count, d)
        pp = np.einsum("fkd,nd->fkn", U, P)
        qq = np.einsum("fkd,nd->fkn", U, N)
        plus = np.maximum(pp.min(axis=2) - qq.max(axis=2), 0.0)
        minus = np.maximum(qq.min(axis=2) - pp.max(axis=2), 0.0)
        h = (plus + minus).sum(axis=1) / (2 * d)
        s1 += h.sum()
        s2 += (h * h).sum()
    k = kappa(d)
    mean = s1 / frames
    var = max(s2 / frames - mean * mean, 0.0) * frames / (frames - 1)
    return CroftonEstimate(
        float(mean / k), float(math.sqrt(var / frames) / k), _METHOD_NAMES[method], frames * 2 * d, opts.seed
    )


# -- all atoms at once ------------------------------------------------------------------


def _sweep(proj: np.ndarray):
    """For projections of shape (m, n), the upper sets and gaps between consecutive values.

    Returns masks (m, n-1) and gaps (m, n-1): the half-spaces with threshold between
    the k-th and (k+1)-th largest projection contain exactly the points in masks[:, k].
    """
    m, n = proj.shape
    order = np.argsort(-proj, axis=1, kind="stable")
    ranked = np.take_along_axis(proj, order, axis=1)
    masks = np.cumsum(np.left_shift(1, order).astype(np.int64), axis=1)[:, :-1]
    gaps = ranked[:, :-1] - ranked[:, 1:]
    return masks, gaps


def atom_estimates(C: PointConfiguration, opts: CroftonOptions | None = None) -> dict[int, CroftonEstimate]:
    """Cylinder masses of every non-constant membership pattern, keyed by bit mask.

    Equivalent to calling :func:`cylinder_measure` with P = ones of the pattern and
    N = zeros, but done in one sweep over directions. Patterns of mass zero under
    the exact/quadrature evaluators are omitted.
    """
    opts = opts or CroftonOptions()
    _check_calibration()
    n, d = C.n, C.dim
    if n > opts.atom_cap:
        raise SizeError(f"{n} labels exceed the atom cap of {opts.atom_cap}")
    if n < 2:
        return {}
    method = _resolve_method(opts.method, d)
    X = C.points
    name = _METHOD_NAMES[method]

    if method == "exact":
        acc: dict[int, float] = {}
        proj = np.vstack([X[:, 0], -X[:, 0]])
        masks, gaps = _sweep(proj)
        for mk, g in zip(masks.ravel(), gaps.ravel()):
            if g > 0:
                acc[int(mk)] = acc.get(int(mk), 0.0) + float(g)
        return {mk: CroftonEstimate(v, 0.0, name, 2, opts.seed) for mk, v in sorted(acc.items())}

    if method == "quadrature":
        scale = max(1.0, float(np.max(np.abs(X))))
        diffs = [X[i] - X[j] for i in range(n) for j in range(i)]
        cuts = _circle_breakpoints(diffs, scale)
        acc = {}
        for a, b in zip(cuts[:-1], cuts[1:]):
            if b - a <= 0:
                continue
            m = 0.5 * (a + b)
            u = np.array([math.cos(m), math.sin(m)])
            order = np.argsort(-(X @ u), kind="stable")
            mask = 0
            for k in range(n - 1):
                mask |= 1 << int(order[k])
                contrib = _arc_integral(X[order[k]] - X[order[k + 1]], a, b)
                if contrib > 0:
                    acc[mask] = acc.get(mask, 0.0) + 0.5 * contrib
        pieces = len(cuts) - 1
        return {mk: CroftonEstimate(v, 0.0, name, pieces, opts.seed) for mk, v in sorted(acc.items())}

    frames = _frame_count(opts.samples, d)
    size = 1 << n
    s1 = np.zeros(size)
    s2 = np.zeros(size)
    for start in range(0, frames, _FRAMES_PER_BLOCK):
        count = min(_FRAMES_PER_BLOCK, frames - start)
        U = frame_directions(opts.seed, start, count, d)
        proj = np.einsum("fkd,nd->fkn", U, X)
        proj = np.concatenate([proj, -proj], axis=1).reshape(count * 2 * d, n)
        masks, gaps = _sweep(proj)
        frame_id = np.repeat(np.arange(count, dtype=np.int64), 2 * d * (n - 1))
        keys = frame_id * size + masks.ravel()
        uniq, inv = np.unique(keys, return_inverse=True)
        per_frame = np.bincount(inv, weights=gaps.ravel() / (2 * d))
        pat = uniq % size
        s1 += np.bincount(pat, weights=per_frame, minlength=size)
        s2 += np.bincount(pat, weights=per_frame * per_frame, minlength=size)
    k = kappa(d)
    mean = s1 / frames
    var = np.maximum(s2 / frames - mean * mean, 0.0) * frames / (frames - 1)
    se = np.sqrt(var / frames)
    full = size - 1
    return {
        mk: CroftonEstimate(float(mean[mk] / k), float(se[mk] / k), name, frames * 2 * d, opts.seed)
        for mk in range(1, full)
        if s1[mk] > 0
    }


def atom_measures(C: PointConfiguration, opts: CroftonOptions | None = None) -> AtomicRepresentation:
    """Atomic representation on the configuration's labels with kernel |v_x - v_y|.

    A half-space separating v_x from v_y is counted once in S_x minus S_y and once
    more in S_y minus S_x, so the atoms carry half of each cylinder mass.
    """
    est = atom_estimates(C, opts)
    return AtomicRepresentation(
        C.labels, {pattern_from_mask(mk, C.n): 0.5 * e.value for mk, e in est.items()}
    )


def distance_estimates(
    C: PointConfiguration, opts: CroftonOptions | None = None, pairs=None
) -> dict[tuple[int, int], CroftonEstimate]:
    """Two-point masses cylinder_measure(P={x}, N={y}) for many index pairs at once.

    With the same options these agree with :func:`cylinder_measure` sample for
    sample, and with the symmetric-difference kernel of :func:`atom_measures`.
    """
    opts = opts or CroftonOptions()
    _check_calibration()
    n, d = C.n, C.dim
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)] if pairs is None else list(pairs)
    method = _resolve_method(opts.method, d)
    if method != "mc" or not pairs:
        labels = C.labels
        return {
            (i, j): cylinder_measure(C, CylinderSpec([labels[i]], [labels[j]]), opts) for i, j in pairs
        }
    ii = np.array([p[0] for p in pairs])
    jj = np.array([p[1] for p in pairs])
    W = C.points[ii] - C.points[jj]
    frames = _frame_count(opts.samples, d)
    s1 = np.zeros(len(pairs))
    s2 = np.zeros(len(pairs))
    for start in range(0, frames, _FRAMES_PER_BLOCK):
        count = min(_FRAMES_PER_BLOCK, frames - start)
        U = frame_directions(opts.seed, start, count, d)
        h = np.abs(np.einsum("fkd,pd->fkp", U, W)).sum(axis=1) / (2 * d)
        s1 += h.sum(axis=0)
        s2 += (h * h).sum(axis=0)
    k = kappa(d)
    mean = s1 / frames
    se = np.sqrt(np.maximum(s2 / frames - mean * mean, 0.0) * frames / (frames - 1) / frames)
    name = _METHOD_NAMES[method]
    return {
        p: CroftonEstimate(float(mean[t] / k), float(se[t] / k), name, frames * 2 * d, opts.seed)
        for t, p in enumerate(pairs)
    }


def sqrt_representation(K: Kernel, opts: CroftonOptions | None = None) -> AtomicRepresentation:
    """Atomic measure whose symmetric-difference kernel is sqrt(K), for negative definite K."""
    opts = opts or CroftonOptions()
    res = is_negative_definite(K, opts.embed_tol)
    if not res.negative_definite:
        raise ValidationError(
            f"kernel is not negative definite (top projected eigenvalue {res.max_eigenvalue:.6g})"
        )
    return atom_measures(schoenberg_embed(K, opts.embed_tol), opts)
