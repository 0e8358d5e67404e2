"""Block-model random graphs and edge-rewiring perturbations.

Two perturbation schemes are provided:

* ``rewire_sbm`` deletes a fixed fraction of the edges inside every block
  pair and re-adds edges among the resulting non-edge pairs with a
  compensating probability, chosen so that the marginal edge probability of
  the output equals the block model's own edge probability. Rewiring a
  block-model sample therefore yields another sample from the same model.

* ``rewire_count_preserving`` deletes the same fixed fraction per block pair
  and adds back exactly as many edges uniformly at random inside the block
  pair, preserving every per-block edge count (used for real graphs whose
  generative model is unknown).

All sampling is driven by numpy SeedSequence-derived generators, so results
are reproducible for a given seed regardless of call order or parallelism.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence, Union

import numpy as np

from .errors import ParameterError, ValidationError
from .graph import Graph

SeedLike = Union[int, np.random.SeedSequence, np.random.Generator]


def _as_rng(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


@dataclass(frozen=True)
class SbmParams:
    """Block model: n nodes, k blocks, symmetric k x k edge probabilities."""

    n: int
    k: int
    B: np.ndarray
    membership: tuple

    def __post_init__(self):
        B = np.asarray(self.B, dtype=float)
        if B.shape != (self.k, self.k):
            raise ValidationError(f"B must be {self.k}x{self.k}, got {B.shape}")
        if not np.array_equal(B, B.T):
            raise ValidationError("B must be symmetric")
        if np.any(B < 0) or np.any(B > 1):
            raise ValidationError("B entries must lie in [0, 1]")
        memb = tuple(int(b) for b in self.membership)
        if len(memb) != self.n:
            raise ValidationError(
                f"membership length {len(memb)} != node count {self.n}"
            )
        if any(not 0 <= b < self.k for b in memb):
            raise ValidationError("block labels must lie in {0, ..., k-1}")
        counts = np.bincount(memb, minlength=self.k)
        if np.any(counts == 0):
            raise ValidationError(f"block {int(np.argmin(counts > 0))} is empty")
        B = B.copy()
        B.flags.writeable = False
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "membership", memb)


@dataclass(frozen=True)
class PpmParams:
    """Planted partition: k equal blocks, intra prob a+b, inter prob b."""

    n: int
    k: int
    a: float
    b: float

    def __post_init__(self):
        if self.n <= 0 or self.k <= 0:
            raise ValidationError("n and k must be positive")
        if self.n % self.k != 0:
            raise ValidationError(f"k={self.k} does not divide n={self.n}")
        if self.b < 0:
            raise ValidationError(f"base probability must be >= 0, got {self.b}")
        if self.a + self.b > 1:
            raise ValidationError(
                f"intra-block probability a+b={self.a + self.b} exceeds 1"
            )

    def to_sbm(self) -> SbmParams:
        B = self.a * np.eye(self.k) + self.b * np.ones((self.k, self.k))
        block = self.n // self.k
        membership = tuple(i // block for i in range(self.n))
        return SbmParams(self.n, self.k, B, membership)


def sample_sbm(p: SbmParams, seed: SeedLike) -> Graph:
    """Draw a graph: each pair (u, v) gets an edge w.p. B[label(u), label(v)]."""
    rng = _as_rng(seed)
    memb = np.asarray(p.membership, dtype=np.int64)
    iu, ju = np.triu_indices(p.n, k=1)
    probs = p.B[memb[iu], memb[ju]]
    mask = rng.random(iu.size) < probs
    edges = frozenset(zip(iu[mask].tolist(), ju[mask].tolist()))
    return Graph(p.n, edges, membership=p.membership)


def sample_ppm(p: PpmParams, seed: SeedLike) -> Graph:
    """Draw from the equal-block special case (delegates to sample_sbm)."""
    return sample_sbm(p.to_sbm(), seed)


def _round_half_even(x: float) -> int:
    return int(np.round(x))


def _block_pair_ids(memb: np.ndarray, iu: np.ndarray, ju: np.ndarray, k: int):
    bi = memb[iu]
    bj = memb[ju]
    lo = np.minimum(bi, bj)
    hi = np.maximum(bi, bj)
    return lo * k + hi


def rewire_sbm(g: Graph, p: SbmParams, p_re: float, seed: SeedLike) -> Graph:
    """Distribution-preserving rewiring of a block-model sample.

    Per block pair with probability b and m existing edges: delete a uniform
    subset of round(p_re * m) edges (round-half-to-even), then add an edge to
    every pair that is a non-edge after deletion, independently with
    probability p_re / (1/b - (1 - p_re)). Deleted edges may be re-added;
    only with that convention is the output's marginal edge probability b
    again. Block pairs with b = 0 are left untouched.
    """
    if not 0.0 <= p_re <= 1.0:
        raise ParameterError(f"rewiring ratio must lie in [0, 1], got {p_re}")
    if g.n != p.n:
        raise ValidationError(f"graph has {g.n} nodes, params expect {p.n}")
    rng = _as_rng(seed)
    rng_del, rng_add = rng.spawn(2)

    memb = np.asarray(p.membership, dtype=np.int64)
    iu, ju = np.triu_indices(g.n, k=1)
    pair_ids = _block_pair_ids(memb, iu, ju, p.k)

    edge_mask = np.zeros(iu.size, dtype=bool)
    if g.num_edges:
        ea = g.edge_array()
        # index of (i, j), i<j, within the flattened upper triangle
        flat = ea[:, 0] * (2 * g.n - ea[:, 0] - 3) // 2 + ea[:, 1] - 1
        edge_mask[flat] = True

    out_mask = edge_mask.copy()
    for bi in range(p.k):
        for bj in range(bi, p.k):
            b = float(p.B[bi, bj])
            sel = pair_ids == bi * p.k + bj
            edge_idx = np.flatnonzero(sel & edge_mask)
            n_del = _round_half_even(p_re * edge_idx.size)
            if n_del:
                drop = rng_del.choice(edge_idx, size=n_del, replace=False)
                out_mask[drop] = False
            if b == 0.0:
                continue
            denom = 1.0 / b - (1.0 - p_re)
            if denom <= 0.0:
                raise ParameterError(
                    f"add probability undefined for block pair ({bi}, {bj}): "
                    f"b={b}, p_re={p_re}"
                )
            q = p_re / denom
            if q > 1.0:
                raise ParameterError(
                    f"add probability {q:.6g} > 1 for block pair ({bi}, {bj})"
                )
            if q > 0.0:
                free_idx = np.flatnonzero(sel & ~out_mask)
                hits = rng_add.random(free_idx.size) < q
                out_mask[free_idx[hits]] = True

    edges = frozenset(zip(iu[out_mask].tolist(), ju[out_mask].tolist()))
    return Graph(g.n, edges, membership=g.membership)


class CountPreservingResult(NamedTuple):
    graph: Graph
    shortfall: int


def rewire_count_preserving(
    g: Graph, membership: Sequence[int], p_re: float, seed: SeedLike
) -> CountPreservingResult:
    """Rewire while keeping every block pair's edge count fixed.

    Per block pair: delete a uniform subset of round(p_re * m) edges, then
    add the same number of edges uniformly among the block pair's non-edge
    pairs after deletion. If a block pair lacks free slots the difference is
    reported as ``shortfall`` instead of failing.
    """
    if not 0.0 <= p_re <= 1.0:
        raise ParameterError(f"rewiring ratio must lie in [0, 1], got {p_re}")
    memb = np.asarray([int(b) for b in membership], dtype=np.int64)
    if memb.size != g.n:
        raise ValidationError(f"membership length {memb.size} != node count {g.n}")
    k = int(memb.max()) + 1 if memb.size else 0
    rng = _as_rng(seed)
    rng_del, rng_add = rng.spawn(2)

    iu, ju = np.triu_indices(g.n, k=1)
    pair_ids = _block_pair_ids(memb, iu, ju, k)
    edge_mask = np.zeros(iu.size, dtype=bool)
    if g.num_edges:
        ea = g.edge_array()
        flat = ea[:, 0] * (2 * g.n - ea[:, 0] - 3) // 2 + ea[:, 1] - 1
        edge_mask[flat] = True

    out_mask = edge_mask.copy()
    shortfall = 0
    for bi in range(k):
        for bj in range(bi, k):
            sel = pair_ids == bi * k + bj
            edge_idx = np.flatnonzero(sel & edge_mask)
            n_del = _round_half_even(p_re * edge_idx.size)
            if n_del:
                drop = rng_del.choice(edge_idx, size=n_del, replace=False)
                out_mask[drop] = False
            if n_del == 0:
                continue
            free_idx = np.flatnonzero(sel & ~out_mask)
            n_add = min(n_del, free_idx.size)
            shortfall += n_del - n_add
            if n_add:
                put = rng_add.choice(free_idx, size=n_add, replace=False)
                out_mask[put] = True

    edges = frozenset(zip(iu[out_mask].tolist(), ju[out_mask].tolist()))
    return CountPreservingResult(Graph(g.n, edges, membership=g.membership), shortfall)
