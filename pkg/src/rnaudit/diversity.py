"""Genre-set similarity and static per-node diversity measures.

All four measures work on the network alone (no user-item interaction
data): intra-list diversity, long-tail novelty, average unexpectedness,
and source-list diversity. Network-level numbers are arithmetic means
over the nodes where each measure is defined.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import TYPE_CHECKING

import numpy as np

from .errors import EmptyGenreSetError

if TYPE_CHECKING:
    from .graph import RecommendationNetwork


def jaccard_similarity(gi: frozenset[str], gj: frozenset[str]) -> float:
    """|gi ∩ gj| / |gi ∪ gj|; 1 for equal sets, 0 for disjoint ones."""
    if not gi or not gj:
        raise EmptyGenreSetError("similarity needs non-empty genre sets")
    inter = len(gi & gj)
    if inter == 0:
        return 0.0
    return inter / len(gi | gj)


def jaccard_distance(gi: frozenset[str], gj: frozenset[str]) -> float:
    """1 − Jaccard similarity; how different two items' genre sets are."""
    return 1.0 - jaccard_similarity(gi, gj)


def long_tail_novelty(rn: RecommendationNetwork, node: str) -> float:
    """Self-information of being recommended at all: -log2((indeg+1)/(|V|+1)).

    In-degree counts how often an item shows up in other items' lists, so
    rarely recommended items score high. The +1 smoothing keeps the value
    finite for items nobody recommends.
    """
    indeg = rn.in_degree(node)
    return -math.log2((indeg + 1) / (rn.num_nodes + 1))


def source_list_diversity(rn: RecommendationNetwork, node: str) -> float | None:
    """Mean genre distance from `node` to its recommended items.

    None for dangling nodes (no recommendation list to score).
    """
    gi = rn.genres(node)
    edges = rn.out_edges(node)
    if not edges:
        return None
    return sum(jaccard_distance(gi, rn.genres(e.dst)) for e in edges) / len(edges)


def intra_list_diversity(rn: RecommendationNetwork, node: str) -> float | None:
    """Mean pairwise genre distance among `node`'s recommended items.

    None when the list has fewer than two items (no pairs to compare).
    """
    neighbors = [rn.genres(e.dst) for e in rn.out_edges(node)]
    if len(neighbors) < 2:
        return None
    total = 0.0
    count = 0
    for gj, gk in combinations(neighbors, 2):
        total += jaccard_distance(gj, gk)
        count += 1
    return total / count


def avg_unexpectedness(rn: RecommendationNetwork, node: str) -> float | None:
    """Mean over recommended items j of novelty(j) x distance(node, j).

    A recommendation is unexpected when it is both unpopular and unlike
    the page it appears on. None for dangling nodes.
    """
    gi = rn.genres(node)
    edges = rn.out_edges(node)
    if not edges:
        return None
    total = 0.0
    for e in edges:
        total += long_tail_novelty(rn, e.dst) * jaccard_distance(gi, rn.genres(e.dst))
    return total / len(edges)


@dataclass(frozen=True)
class DiversityReport:
    """Per-node vectors (aligned to rn.ids, NaN = undefined) plus their means."""

    ids: tuple[str, ...]
    intra_list: np.ndarray
    novelty: np.ndarray
    unexpectedness: np.ndarray
    source_list: np.ndarray

    def mean(self, measure: str) -> float | None:
        """Mean over nodes where `measure` is defined; None if nowhere."""
        values = getattr(self, measure)
        defined = values[~np.isnan(values)]
        if defined.size == 0:
            return None
        return float(defined.mean())

    def means(self) -> dict[str, float | None]:
        return {
            name: self.mean(name)
            for name in ("intra_list", "novelty", "unexpectedness", "source_list")
        }


def diversity_report(rn: RecommendationNetwork) -> DiversityReport:
    """Compute all four measures for every node.

    Nodes where a measure is undefined (out-degree 0, or < 2 for the
    intra-list measure) carry NaN and are excluded from the means rather
    than imputed, so networks with many dangling nodes are not dragged
    toward zero.
    """
    n = rn.num_nodes
    indeg = rn.in_degree_array().astype(np.float64)
    novelty = -np.log2((indeg + 1.0) / (n + 1.0))

    intra = np.full(n, np.nan)
    unexp = np.full(n, np.nan)
    source = np.full(n, np.nan)
    for i, item_id in enumerate(rn.ids):
        gi = rn.genres(item_id)
        edges = rn.out_edges(item_id)
        if not edges:
            continue
        dists = [jaccard_distance(gi, rn.genres(e.dst)) for e in edges]
        source[i] = sum(dists) / len(dists)
        unexp[i] = sum(
            d * novelty[rn.index[e.dst]] for d, e in zip(dists, edges)
        ) / len(edges)
        if len(edges) >= 2:
            neighbor_genres = [rn.genres(e.dst) for e in edges]
            total = 0.0
            count = 0
            for gj, gk in combinations(neighbor_genres, 2):
                total += jaccard_distance(gj, gk)
                count += 1
            intra[i] = total / count
    return DiversityReport(
        ids=rn.ids,
        intra_list=intra,
        novelty=novelty,
        unexpectedness=unexp,
        source_list=source,
    )
