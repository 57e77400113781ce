"""Point configurations x -> v_x realizing a negative definite kernel as squared distances."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import EmbeddingError, ValidationError
from .kernel import Kernel


@dataclass(frozen=True, eq=False)
class PointConfiguration:
    labels: tuple
    points: np.ndarray  # shape (n, d), d >= 1
    basepoint_index: int = 0

    def __post_init__(self):
        labels = tuple(str(x) for x in self.labels)
        pts = np.array(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] != len(labels):
            raise ValidationError(f"need one point per label, got array of shape {pts.shape}")
        if pts.shape[1] < 1:
            raise ValidationError("points must have dimension >= 1")
        if len(set(labels)) != len(labels):
            raise ValidationError("duplicate labels")
        if not np.all(np.isfinite(pts)):
            raise ValidationError("points must be finite")
        if not 0 <= self.basepoint_index < max(1, len(labels)):
            raise ValidationError("basepoint_index out of range")
        pts.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def index(self, label) -> int:
        try:
            return self.labels.index(str(label))
        except ValueError:
            raise ValidationError(f"label {label!r} not in configuration") from None

    def point(self, label) -> np.ndarray:
        return self.points[self.index(label)]

    def squared_distances(self) -> np.ndarray:
        diff = self.points[:, None, :] - self.points[None, :, :]
        return np.einsum("ijk,ijk->ij", diff, diff)

    def squared_distance_kernel(self) -> Kernel:
        return Kernel(self.labels, self.squared_distances())

    def distance_kernel(self) -> Kernel:
        return Kernel(self.labels, np.sqrt(self.squared_distances()))

    def to_dict(self) -> dict:
        return {"labels": list(self.labels), "points": self.points.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "PointConfiguration":
        try:
            return cls(tuple(data["labels"]), np.array(data["points"], dtype=float))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"bad configuration JSON: {exc}") from exc

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "PointConfiguration":
        return cls.from_dict(json.loads(text))


def gram_matrix(K: Kernel, base: int = 0) -> np.ndarray:
    """G(x, y) = (K(x, x0) + K(y, x0) - K(x, y)) / 2."""
    A = K.as_float()
    col = A[:, base]
    return 0.5 * (col[:, None] + col[None, :] - A)


def schoenberg_embed(K: Kernel, tol: float = 1e-9) -> PointConfiguration:
    """Factor the Gram matrix of K so that |v_x - v_y|^2 = K(x, y).

    The basepoint is the first label and lands at the origin. Eigenvalues of the
    Gram matrix down to ``-tol * K.scale`` are clipped to zero; anything lower
    raises :class:`EmbeddingError`. The output dimension is the numerical rank
    of the Gram matrix (at least 1).
    """
    if tol <= 0:
        raise ValidationError("tol must be positive")
    K.require_nonnegative()
    G = gram_matrix(K)
    evals, evecs = np.linalg.eigh(0.5 * (G + G.T))
    floor = -tol * K.scale
    if evals[0] < floor:
        raise EmbeddingError(
            f"kernel is not negative definite: Gram eigenvalue {evals[0]:.6g} < {floor:.3g}",
            evals[0],
        )
    # numerical rank, as in numpy.linalg.matrix_rank
    rank_tol = max(abs(evals[-1]), 1.0) * K.n * np.finfo(float).eps * 4
    keep = evals > rank_tol
    if not keep.any():
        return PointConfiguration(K.labels, np.zeros((K.n, 1)))
    coords = evecs[:, keep] * np.sqrt(evals[keep])
    # largest variance first; purely cosmetic but keeps 1-d outputs readable
    coords = coords[:, ::-1]
    coords = coords - coords[0]
    return PointConfiguration(K.labels, coords)


def apply_rigid_motion(C: PointConfiguration, Q, t=None) -> PointConfiguration:
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    d = C.dim
    if Q.shape != (d, d):
        raise ValidationError(f"Q must be {d}x{d}, got {Q.shape}")
    if np.max(np.abs(Q.T @ Q - np.eye(d))) > 1e-12:
        raise ValidationError("Q is not orthogonal")
    t = np.zeros(d) if t is None else np.asarray(t, dtype=float).reshape(-1)
    if t.shape != (d,):
        raise ValidationError(f"translation must have length {d}")
    return PointConfiguration(C.labels, C.points @ Q.T + t, C.basepoint_index)


def pad_dimension(C: PointConfiguration, extra: int) -> PointConfiguration:
    if extra < 0:
        raise ValidationError("extra must be >= 0")
    pts = np.hstack([C.points, np.zeros((C.n, extra))])
    return PointConfiguration(C.labels, pts, C.basepoint_index)


def random_rotation(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed orthogonal matrix (QR of a Gaussian with sign fix)."""
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.diag(r))
