"""Weighted trees: path-distance kernels and their rooted-geodesic representations.

With a root o fixed, let S_x be the geodesic [o, x]. The symmetric difference
S_x and S_y consists of whole edges, namely those on the path from x to y, so one
weighted point per edge gives an exact atomic model of the length measure.
"""

from __future__ import annotations

import json
import re
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from ._numbers import encode_scalar, is_exact, parse_scalar
from .errors import ValidationError
from .kernel import Kernel
from .measurespace import GroundedRepresentation


def _natural_key(label: str):
    return [(0, int(t), "") if t.isdigit() else (1, 0, t) for t in re.findall(r"\d+|\D+", label)]


@dataclass(frozen=True, eq=False)
class Tree:
    vertices: tuple
    edges: tuple  # (u, v, length)
    root: str

    def __post_init__(self):
        verts = tuple(str(v) for v in self.vertices)
        if not verts or len(set(verts)) != len(verts):
            raise ValidationError("tree needs distinct vertices")
        vset = set(verts)
        edges = []
        for e in self.edges:
            try:
                u, v, length = e
            except (TypeError, ValueError):
                raise ValidationError(f"edge {e!r} is not (u, v, length)") from None
            u, v = str(u), str(v)
            if u not in vset or v not in vset:
                raise ValidationError(f"edge ({u}, {v}) uses an unknown vertex")
            if u == v:
                raise ValidationError(f"self-loop at {u}")
            if not is_exact(length):
                length = float(length)
            if not length > 0:
                raise ValidationError(f"edge ({u}, {v}) must have positive length")
            edges.append((u, v, length))
        root = str(self.root)
        if root not in vset:
            raise ValidationError(f"root {root!r} is not a vertex")
        if len(edges) != len(verts) - 1:
            raise ValidationError(f"a tree on {len(verts)} vertices has {len(verts) - 1} edges, got {len(edges)}")
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", tuple(edges))
        object.__setattr__(self, "root", root)
        # |E| = |V| - 1 plus connectivity rules out cycles
        if len(self._bfs(root)[0]) != len(verts):
            raise ValidationError("tree is not connected")

    def adjacency(self) -> dict:
        adj = {v: [] for v in self.vertices}
        for u, v, length in self.edges:
            adj[u].append((v, length))
            adj[v].append((u, length))
        return adj

    def _bfs(self, source: str):
        """Distances from ``source`` and the BFS parent map."""
        adj = self.adjacency()
        zero = Fraction(0) if all(is_exact(e[2]) for e in self.edges) else 0.0
        dist = {source: zero}
        parent = {source: None}
        queue = deque([source])
        while queue:
            x = queue.popleft()
            for y, length in adj[x]:
                if y not in dist:
                    dist[y] = dist[x] + length
                    parent[y] = x
                    queue.append(y)
        return dist, parent

    def rerooted(self, root) -> "Tree":
        return Tree(self.vertices, self.edges, root)

    # -- JSON -------------------------------------------------------------------------

    @classmethod
    def from_dict(cls, data: dict) -> "Tree":
        try:
            root = str(data["root"])
            edges = [(str(u), str(v), parse_scalar(w)) for u, v, w in data.get("edges", [])]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"bad tree JSON: {exc}") from exc
        if "vertices" in data:
            verts = [str(v) for v in data["vertices"]]
        else:
            seen = {root} | {u for u, _, _ in edges} | {v for _, v, _ in edges}
            verts = sorted(seen, key=_natural_key)
        return cls(tuple(verts), tuple(edges), root)

    @classmethod
    def from_json(cls, text: str) -> "Tree":
        return cls.from_dict(json.loads(text))

    def to_dict(self) -> dict:
        return {
            "root": self.root,
            "vertices": list(self.vertices),
            "edges": [[u, v, encode_scalar(w)] for u, v, w in self.edges],
        }


def tree_representation(T: Tree) -> GroundedRepresentation:
    """One ground point per edge, weighted by its length, inside S_x iff the edge lies on [root, x]."""
    _, parent = T._bfs(T.root)
    index = {v: i for i, v in enumerate(T.vertices)}
    # S_x contains edge (parent(c), c) iff c lies on [root, x], i.e. x is in the subtree of c
    points = []
    for u, v, length in T.edges:
        child = v if parent.get(v) == u else u
        bits = ["0"] * len(T.vertices)
        for x in T.vertices:
            y = x
            while y is not None and y != child:
                y = parent[y]
            if y == child:
                bits[index[x]] = "1"
        points.append(("".join(bits), length))
    return GroundedRepresentation(T.vertices, tuple(points))


def distance_kernel(T: Tree) -> Kernel:
    """Path-length distances between vertices."""
    rows = []
    for x in T.vertices:
        dist, _ = T._bfs(x)
        rows.append([dist[y] for y in T.vertices])
    return Kernel(T.vertices, rows)


STAR_EDGES = (("4", "1", 1), ("4", "2", 1), ("4", "3", 1))


def star_tree(root: str = "4") -> Tree:
    """The four-vertex star: center 4 joined to leaves 1, 2, 3 by unit edges."""
    return Tree(("1", "2", "3", "4"), STAR_EDGES, root)
