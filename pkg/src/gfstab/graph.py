"""Undirected simple graphs, their shift operators, and spectral-domain helpers.

Graphs are immutable: node count, a set of unordered edges, and an optional
block membership vector. Shift operators are dense symmetric numpy arrays;
dense storage is deliberate since downstream code needs full
eigendecompositions anyway (n stays in the low thousands).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DegenerateInputError, ParseError, ValidationError


def _canonical_edge(u, v):
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on nodes 0..n-1.

    edges holds unordered pairs (i, j) with i < j. membership, when present,
    assigns each node a block label in {0, ..., k-1}.
    """

    n: int
    edges: frozenset
    membership: Optional[tuple] = None

    def __post_init__(self):
        if self.n <= 0:
            raise ValidationError(f"node count must be positive, got {self.n}")
        canon = set()
        for u, v in self.edges:
            if u == v:
                raise ValidationError(f"self-loop on node {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValidationError(f"edge ({u}, {v}) out of range [0, {self.n})")
            canon.add(_canonical_edge(int(u), int(v)))
        object.__setattr__(self, "edges", frozenset(canon))
        if self.membership is not None:
            memb = tuple(int(b) for b in self.membership)
            if len(memb) != self.n:
                raise ValidationError(
                    f"membership length {len(memb)} != node count {self.n}"
                )
            if any(b < 0 for b in memb):
                raise ValidationError("block labels must be nonnegative")
            object.__setattr__(self, "membership", memb)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def edge_array(self) -> np.ndarray:
        """Edges as a sorted (m, 2) int array; deterministic order."""
        if not self.edges:
            return np.empty((0, 2), dtype=np.int64)
        return np.array(sorted(self.edges), dtype=np.int64)

    def degrees(self) -> np.ndarray:
        ea = self.edge_array()
        return np.bincount(ea.ravel(), minlength=self.n).astype(np.int64)

    def with_membership(self, membership: Sequence[int]) -> "Graph":
        return Graph(self.n, self.edges, tuple(membership))


def load_edge_list(path, dedupe: bool = False) -> Graph:
    """Read a whitespace-separated "u v" edge list into a Graph.

    Lines starting with '#' and blank lines are skipped. Node ids are
    0-indexed; n is 1 + the largest id seen. (u, v) and (v, u) denote the
    same edge. With dedupe set, duplicate edges and self-loops are dropped;
    otherwise they raise ValidationError.
    """
    edges = set()
    max_id = -1
    with open(path) as fh:
        for line_no, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            parts = stripped.split()
            if len(parts) != 2:
                raise ParseError(
                    f"expected two integers, got {stripped!r}", line_no=line_no
                )
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise ParseError(
                    f"non-integer node id in {stripped!r}", line_no=line_no
                ) from None
            if u < 0 or v < 0:
                raise ParseError(f"negative node id in {stripped!r}", line_no=line_no)
            max_id = max(max_id, u, v)
            if u == v:
                if dedupe:
                    continue
                raise ValidationError(f"line {line_no}: self-loop on node {u}")
            edge = _canonical_edge(u, v)
            if edge in edges and not dedupe:
                raise ValidationError(f"line {line_no}: duplicate edge {edge}")
            edges.add(edge)
    if max_id < 0:
        raise ValidationError(f"no edges found in {path}")
    return Graph(n=max_id + 1, edges=frozenset(edges))


def load_communities(path, n: int) -> tuple:
    """Read "node label" pairs and return a length-n membership tuple.

    Labels are relabeled to contiguous {0, ..., k-1} by sorted original
    value. Every node in [0, n) must receive exactly one label.
    """
    raw = {}
    with open(path) as fh:
        for line_no, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            parts = stripped.split()
            if len(parts) != 2:
                raise ParseError(
                    f"expected two integers, got {stripped!r}", line_no=line_no
                )
            try:
                node, label = int(parts[0]), int(parts[1])
            except ValueError:
                raise ParseError(
                    f"non-integer entry in {stripped!r}", line_no=line_no
                ) from None
            if not 0 <= node < n:
                raise ValidationError(
                    f"line {line_no}: node id {node} out of range [0, {n})"
                )
            if node in raw and raw[node] != label:
                raise ValidationError(
                    f"line {line_no}: node {node} labeled both {raw[node]} and {label}"
                )
            raw[node] = label
    missing = [i for i in range(n) if i not in raw]
    if missing:
        raise ValidationError(
            f"{len(missing)} node(s) missing a label (first: {missing[0]})"
        )
    relabel = {lab: i for i, lab in enumerate(sorted(set(raw.values())))}
    return tuple(relabel[raw[i]] for i in range(n))


def adjacency(g: Graph) -> np.ndarray:
    """Dense 0/1 adjacency matrix with zero diagonal."""
    a = np.zeros((g.n, g.n))
    ea = g.edge_array()
    if ea.size:
        a[ea[:, 0], ea[:, 1]] = 1.0
        a[ea[:, 1], ea[:, 0]] = 1.0
    return a


def unnormalized_laplacian(g: Graph) -> np.ndarray:
    """Degree matrix minus adjacency; row sums are exactly zero."""
    lap = -adjacency(g)
    np.fill_diagonal(lap, g.degrees().astype(float))
    return lap


def normalized_laplacian(g: Graph) -> np.ndarray:
    """Symmetric degree-normalized Laplacian; eigenvalues lie in [0, 2].

    Requires every node to have degree >= 1.
    """
    deg = g.degrees()
    isolated = np.flatnonzero(deg == 0)
    if isolated.size:
        raise DegenerateInputError(
            f"node {int(isolated[0])} is isolated; normalized Laplacian undefined"
        )
    lap = unnormalized_laplacian(g)
    inv_sqrt = 1.0 / np.sqrt(deg.astype(float))
    lnorm = lap * np.outer(inv_sqrt, inv_sqrt)
    np.fill_diagonal(lnorm, 1.0)
    return lnorm


def total_variation(s: np.ndarray, x: np.ndarray) -> float:
    """Quadratic-form smoothness measure x^T S x / 2 of a node signal."""
    x = np.asarray(x, dtype=float)
    if x.shape != (s.shape[0],):
        raise ValidationError(
            f"signal length {x.shape} does not match operator dimension {s.shape[0]}"
        )
    return float(x @ s @ x) / 2.0


def gft(eig, x: np.ndarray) -> np.ndarray:
    """Project a node signal onto the eigenvector basis: V^T x."""
    x = np.asarray(x, dtype=float)
    if x.shape != (eig.V.shape[0],):
        raise ValidationError(
            f"signal length {x.shape} does not match basis dimension {eig.V.shape[0]}"
        )
    return eig.V.T @ x


def permute(g: Graph, perm: Sequence[int]) -> Graph:
    """Relabel nodes: node i becomes perm[i]."""
    perm = [int(p) for p in perm]
    if sorted(perm) != list(range(g.n)):
        raise ValidationError("perm is not a bijection on [0, n)")
    edges = frozenset(_canonical_edge(perm[u], perm[v]) for u, v in g.edges)
    membership = None
    if g.membership is not None:
        memb = [0] * g.n
        for i, b in enumerate(g.membership):
            memb[perm[i]] = b
        membership = tuple(memb)
    return Graph(g.n, edges, membership)


def is_connected(g: Graph) -> bool:
    """BFS connectivity check."""
    if g.n == 1:
        return True
    adj = [[] for _ in range(g.n)]
    for u, v in g.edges:
        adj[u].append(v)
        adj[v].append(u)
    seen = np.zeros(g.n, dtype=bool)
    stack = [0]
    seen[0] = True
    count = 1
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if not seen[v]:
                seen[v] = True
                count += 1
                stack.append(v)
    return count == g.n
