"""Mixing-pattern analyses: PageRank, node binning, contingency matrices,
and the assortativity coefficient.

Nodes are grouped into bins either by genre (fractional membership for
multi-genre items) or by popularity (normalized in-degree or PageRank,
three fixed intervals). The contingency matrix tallies what fraction of
edge mass links each bin pair; the assortativity coefficient condenses it
to a single number in [-1, 1], where positive means recommendations stay
within type.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING

import numpy as np
from scipy import sparse

from .errors import DegenerateBinningError, MissingCentralityError

if TYPE_CHECKING:
    from .graph import RecommendationNetwork


@dataclass(frozen=True)
class PageRankVector:
    """PageRank scores aligned to `ids`, plus convergence diagnostics.

    Non-convergence is not an error: the vector is returned as-is with
    the final L1 residual recorded.
    """

    ids: tuple[str, ...]
    scores: np.ndarray
    damping: float
    iterations: int
    residual: float

    def as_dict(self) -> dict[str, float]:
        return {item: float(s) for item, s in zip(self.ids, self.scores)}


def pagerank(
    rn: RecommendationNetwork,
    damping: float = 0.85,
    tol: float = 1e-10,
    max_iter: int = 200,
) -> PageRankVector:
    """Power iteration on the teleporting random-surfer chain.

    Teleport is uniform over all nodes; the out-mass of dangling nodes is
    redistributed uniformly each iteration, so the returned scores always
    sum to 1. Iteration stops when the L1 step residual drops below `tol`
    (or after `max_iter` sweeps).
    """
    if not 0.0 < damping < 1.0:
        raise ValueError("damping must lie strictly between 0 and 1")
    n = rn.num_nodes
    src_idx, dst_idx = rn.edge_index_arrays()
    out_deg = rn.out_degree_array()
    data = 1.0 / out_deg[src_idx]
    transition = sparse.csr_matrix((data, (dst_idx, src_idx)), shape=(n, n))
    dangling = out_deg == 0

    x = np.full(n, 1.0 / n)
    residual = float("inf")
    iterations = 0
    for iterations in range(1, max_iter + 1):
        dangling_mass = float(x[dangling].sum())
        x_next = damping * (transition @ x + dangling_mass / n) + (1.0 - damping) / n
        residual = float(np.abs(x_next - x).sum())
        x = x_next
        if residual < tol:
            break
    return PageRankVector(
        ids=rn.ids,
        scores=x,
        damping=damping,
        iterations=iterations,
        residual=residual,
    )


def normalize_centrality(values: np.ndarray) -> np.ndarray:
    """Min-max normalize to [0, 1]; an all-equal vector maps to all zeros."""
    v = np.asarray(values, dtype=np.float64)
    if v.size == 0:
        raise ValueError("need at least one value")
    lo = v.min()
    hi = v.max()
    if hi == lo:
        return np.zeros_like(v)
    return (v - lo) / (hi - lo)


class BinningScheme(Enum):
    GENRE = "genre"
    INDEGREE = "indegree"
    PAGERANK = "pagerank"


#: Popularity bin labels, least to most central.
POPULARITY_LABELS = ("bottom", "middle", "top")

# Normalized-centrality intervals: [0, 0.2] -> bottom, (0.2, 0.4] -> middle,
# above 0.4 -> top. Boundary values belong to the lower bin.
_BIN_EDGES = (0.2, 0.4)


@dataclass(frozen=True)
class Binning:
    """Assignment of every node to one bin (popularity) or a weighted set
    of bins (genre, weight 1/|genres| each)."""

    scheme: BinningScheme
    labels: tuple[str, ...]
    assignment: dict[str, tuple[tuple[int, float], ...]]

    def is_single(self) -> bool:
        """True when every node maps to exactly one bin with weight 1."""
        return all(
            len(pairs) == 1 and pairs[0][1] == 1.0
            for pairs in self.assignment.values()
        )


def assign_bins(
    rn: RecommendationNetwork,
    scheme: BinningScheme,
    centrality: np.ndarray | None = None,
) -> Binning:
    """Bin every node of the network.

    For INDEGREE / PAGERANK, `centrality` must be provided already
    normalized to [0, 1] (see :func:`normalize_centrality`); each node
    lands in exactly one of bottom/middle/top. For GENRE, the bin labels
    are the sorted union of genre labels and a node with g genres carries
    weight 1/g in each.
    """
    if scheme is BinningScheme.GENRE:
        labels = tuple(sorted({g for rec in rn.items() for g in rec.genres}))
        label_idx = {g: i for i, g in enumerate(labels)}
        assignment = {}
        for rec in rn.items():
            w = 1.0 / len(rec.genres)
            assignment[rec.id] = tuple(
                (label_idx[g], w) for g in sorted(rec.genres)
            )
        return Binning(scheme, labels, assignment)

    if centrality is None:
        raise MissingCentralityError(
            f"{scheme.value} binning needs a normalized centrality vector"
        )
    values = np.asarray(centrality, dtype=np.float64)
    if values.shape != (rn.num_nodes,):
        raise ValueError("centrality must have one value per node (rn.ids order)")
    assignment = {}
    for item_id, v in zip(rn.ids, values):
        if v <= _BIN_EDGES[0]:
            b = 0
        elif v <= _BIN_EDGES[1]:
            b = 1
        else:
            b = 2
        assignment[item_id] = ((b, 1.0),)
    return Binning(scheme, POPULARITY_LABELS, assignment)


@dataclass(frozen=True)
class ContingencyMatrix:
    """m x m matrix of edge-mass fractions between bins; sums to 1."""

    labels: tuple[str, ...]
    matrix: np.ndarray

    def __post_init__(self):
        m = len(self.labels)
        if self.matrix.shape != (m, m):
            raise ValueError("matrix shape must match the label count")
        total = float(self.matrix.sum())
        if abs(total - 1.0) > 1e-6:
            raise ValueError(f"entries must sum to 1, got {total}")

    @property
    def row_sums(self) -> np.ndarray:
        return self.matrix.sum(axis=1)

    @property
    def col_sums(self) -> np.ndarray:
        return self.matrix.sum(axis=0)


def contingency(rn: RecommendationNetwork, binning: Binning) -> ContingencyMatrix:
    """Tally every edge's bin-pair mass into an m x m fraction matrix.

    An edge (u, v) spreads mass w_u(g) * w_v(h) over the bin pairs of its
    endpoints' weighted assignments; the tally is divided by the edge
    count, so the matrix always sums to 1.
    """
    if rn.num_edges == 0:
        raise ValueError("contingency matrix needs at least one edge")
    m = len(binning.labels)
    src_idx, dst_idx = rn.edge_index_arrays()

    if binning.is_single():
        node_bin = np.fromiter(
            (binning.assignment[item][0][0] for item in rn.ids),
            dtype=np.int64,
            count=rn.num_nodes,
        )
        flat = np.bincount(node_bin[src_idx] * m + node_bin[dst_idx], minlength=m * m)
        matrix = flat.reshape(m, m).astype(np.float64) / rn.num_edges
        return ContingencyMatrix(binning.labels, matrix)

    pairs = [binning.assignment[item] for item in rn.ids]
    matrix = np.zeros((m, m))
    for s, d in zip(src_idx, dst_idx):
        for g, wu in pairs[s]:
            for h, wv in pairs[d]:
                matrix[g, h] += wu * wv
    matrix /= rn.num_edges
    return ContingencyMatrix(binning.labels, matrix)


def row_normalized(cm: ContingencyMatrix) -> np.ndarray:
    """Each row divided by its sum (outward-edge share per source bin);
    zero rows stay zero."""
    sums = cm.row_sums
    out = np.zeros_like(cm.matrix)
    nonzero = sums > 0
    out[nonzero] = cm.matrix[nonzero] / sums[nonzero, None]
    return out


def assortativity(cm: ContingencyMatrix) -> float:
    """Mixing coefficient r = (sum_i e_ii - sum_i a_i b_i) / (1 - sum_i a_i b_i).

    1 means all edge mass stays on the diagonal (perfectly assortative),
    0 matches the independence baseline e_ij = a_i * b_j, and negative
    values mean bins mostly link to other bins.

    Raises DegenerateBinningError when only one bin carries mass (the
    denominator vanishes and the coefficient is undefined).
    """
    a = cm.row_sums
    b = cm.col_sums
    ab = float(a @ b)
    denom = 1.0 - ab
    if abs(denom) < 1e-12:
        raise DegenerateBinningError(
            "all edge mass sits in a single bin; coefficient undefined"
        )
    diagonal = float(np.trace(cm.matrix))
    return (diagonal - ab) / denom
