"""Rectangular grid combinatorics and discrete calculus.

Vertices are integer pairs (m, n) with m1 <= m <= m2, n1 <= n <= n2.
Directed edges are vertex pairs one step apart; faces are quadruples
((m,n) (m+1,n) (m+1,n+1) (m,n+1)).  Edge weights that take equal values on
opposite edges of every face are stored as two one-variable arrays.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import PoleParameter
from .tolerances import tol

Vertex = tuple  # (m, n)
Edge = tuple  # ((m, n), (m', n'))


@dataclass(frozen=True)
class GridDomain:
    """Inclusive rectangle of integer vertices."""

    m1: int
    m2: int
    n1: int
    n2: int

    def __post_init__(self):
        if self.m2 < self.m1 or self.n2 < self.n1:
            raise ValueError("empty grid domain")

    @property
    def rows(self) -> int:
        return self.m2 - self.m1 + 1

    @property
    def cols(self) -> int:
        return self.n2 - self.n1 + 1

    def contains(self, v) -> bool:
        m, n = v
        return self.m1 <= m <= self.m2 and self.n1 <= n <= self.n2

    def index(self, v):
        """Array index (row, col) of a vertex."""
        if not self.contains(v):
            raise KeyError(f"vertex {v} outside domain")
        return v[0] - self.m1, v[1] - self.n1

    def vertices(self):
        for m in range(self.m1, self.m2 + 1):
            for n in range(self.n1, self.n2 + 1):
                yield (m, n)

    def interior_vertices(self):
        for m in range(self.m1 + 1, self.m2):
            for n in range(self.n1 + 1, self.n2):
                yield (m, n)

    def edges(self):
        """Each undirected edge once, directed along +m or +n."""
        for m in range(self.m1, self.m2 + 1):
            for n in range(self.n1, self.n2 + 1):
                if m < self.m2:
                    yield ((m, n), (m + 1, n))
                if n < self.n2:
                    yield ((m, n), (m, n + 1))

    def directed_edges(self):
        for i, j in self.edges():
            yield (i, j)
            yield (j, i)

    def faces(self):
        for m in range(self.m1, self.m2):
            for n in range(self.n1, self.n2):
                yield ((m, n), (m + 1, n), (m + 1, n + 1), (m, n + 1))

    @staticmethod
    def face_edges(face):
        """The four directed boundary edges (ij), (jk), (kl), (li)."""
        i, j, k, l = face
        return ((i, j), (j, k), (k, l), (l, i))

    def neighbors(self, v):
        m, n = v
        for w in ((m + 1, n), (m - 1, n), (m, n + 1), (m, n - 1)):
            if self.contains(w):
                yield w

    def center(self):
        return ((self.m1 + self.m2) // 2, (self.n1 + self.n2) // 2)


class VertexField:
    """Dense per-vertex storage with leading axes (rows, cols)."""

    def __init__(self, domain: GridDomain, data):
        data = np.asarray(data, dtype=float)
        if data.shape[:2] != (domain.rows, domain.cols):
            raise ValueError(
                f"data shape {data.shape} does not match {domain.rows}x{domain.cols} grid"
            )
        self.domain = domain
        self.data = data

    @classmethod
    def zeros(cls, domain, value_shape=()):
        return cls(domain, np.zeros((domain.rows, domain.cols) + tuple(value_shape)))

    @classmethod
    def from_function(cls, domain, fn):
        values = [[fn((m, n)) for n in range(domain.n1, domain.n2 + 1)]
                  for m in range(domain.m1, domain.m2 + 1)]
        return cls(domain, np.asarray(values, dtype=float))

    def __getitem__(self, v):
        mi, ni = self.domain.index(v)
        return self.data[mi, ni]

    def __setitem__(self, v, value):
        mi, ni = self.domain.index(v)
        self.data[mi, ni] = value

    def copy(self):
        return VertexField(self.domain, self.data.copy())


def d_edge(field, edge):
    """Discrete differential g_j - g_i on a directed edge; antisymmetric."""
    i, j = edge
    return field[j] - field[i]


def avg_edge(field, edge):
    """Edge average (g_i + g_j) / 2; symmetric."""
    i, j = edge
    return (field[i] + field[j]) / 2.0


class EdgeFunction:
    """Symmetric edge weights with equal values on opposite face edges.

    Stored as two one-variable arrays: ``u[mi]`` on all edges
    ((m,n) (m+1,n)) and ``v[ni]`` on all edges ((m,n) (m,n+1)).
    """

    def __init__(self, domain: GridDomain, u, v):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        if u.shape != (domain.rows - 1,) or v.shape != (domain.cols - 1,):
            raise ValueError("edge weight arrays do not match the grid size")
        self.domain = domain
        self.u = u
        self.v = v

    @classmethod
    def constant(cls, domain, u_value, v_value):
        return cls(domain, np.full(domain.rows - 1, float(u_value)),
                   np.full(domain.cols - 1, float(v_value)))

    def value(self, edge) -> float:
        (m, n), (m2, n2) = edge
        dm, dn = m2 - m, n2 - n
        if abs(dm) + abs(dn) != 1:
            raise KeyError(f"{edge} is not a grid edge")
        if not (self.domain.contains(edge[0]) and self.domain.contains(edge[1])):
            raise KeyError(f"{edge} outside domain")
        if dn == 0:
            return float(self.u[min(m, m2) - self.domain.m1])
        return float(self.v[min(n, n2) - self.domain.n1])

    def scaled(self, factor: float) -> "EdgeFunction":
        return EdgeFunction(self.domain, self.u * factor, self.v * factor)

    def calapso_shifted(self, mu: float) -> "EdgeFunction":
        """The weight function a / (1 - mu*a) of a Calapso transform."""
        du = 1.0 - mu * self.u
        dv = 1.0 - mu * self.v
        scale = 1.0 + float(max(np.abs(self.u).max(), np.abs(self.v).max()))
        if np.any(np.abs(du) <= tol(scale)) or np.any(np.abs(dv) <= tol(scale)):
            raise PoleParameter("parameter hits a pole of the edge weights")
        return EdgeFunction(self.domain, self.u / du, self.v / dv)

    def max_abs(self) -> float:
        return float(max(np.abs(self.u).max(), np.abs(self.v).max()))

    def allclose(self, other, scale=None) -> bool:
        if scale is None:
            scale = 1.0 + max(self.max_abs(), other.max_abs())
        return (np.abs(self.u - other.u).max() <= tol(scale)
                and np.abs(self.v - other.v).max() <= tol(scale))


@dataclass
class ClosednessReport:
    ok: bool
    max_residual: float
    worst_face: tuple | None


def closedness_check(omega, domain: GridDomain, scale=None) -> ClosednessReport:
    """Check that an edge 1-form sums to zero around every face.

    ``omega`` maps a directed edge to a vector; it must be antisymmetric.
    """
    worst = 0.0
    worst_face = None
    max_entry = 0.0
    for face in domain.faces():
        total = None
        for e in GridDomain.face_edges(face):
            w = np.asarray(omega(e), dtype=float)
            max_entry = max(max_entry, float(np.abs(w).max()))
            total = w if total is None else total + w
        r = float(np.linalg.norm(total))
        if r > worst:
            worst, worst_face = r, face
    if scale is None:
        scale = 1.0 + max_entry
    return ClosednessReport(worst <= tol(scale), worst, worst_face)


def propagation_order(domain: GridDomain, basepoint=None):
    """Breadth-first spanning tree from the basepoint.

    Returns (tree, cross): ``tree`` lists directed edges (parent, child) in
    visit order, covering every vertex except the basepoint exactly once;
    ``cross`` lists the remaining undirected edges, which a flat propagation
    must satisfy redundantly.
    """
    if basepoint is None:
        basepoint = (domain.m1, domain.n1)
    if not domain.contains(basepoint):
        raise KeyError(f"basepoint {basepoint} outside domain")
    seen = {basepoint}
    tree = []
    cross = []
    queue = deque([basepoint])
    while queue:
        v = queue.popleft()
        for w in domain.neighbors(v):
            if w not in seen:
                seen.add(w)
                tree.append((v, w))
                queue.append(w)
    tree_set = {frozenset(e) for e in tree}
    for i, j in domain.edges():
        if frozenset((i, j)) not in tree_set:
            cross.append((i, j))
    return tree, cross
