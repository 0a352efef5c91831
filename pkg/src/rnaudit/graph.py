"""Directed recommendation network with ranked, optionally weighted edges.

Nodes are catalog items carrying genre metadata; a directed edge i -> j
records that item j appears (at a given rank) in the recommendation list
shown on item i's page. Networks are immutable once built, so any number
of readers may share one instance.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator

import numpy as np

from .errors import (
    DuplicateItemIdError,
    DuplicateRankError,
    SelfLoopError,
    UnknownEndpointError,
    UnknownItemError,
)


@dataclass(frozen=True)
class ItemRecord:
    """One catalog item: opaque id, display title, and its genre labels."""

    id: str
    title: str
    genres: frozenset[str]

    def __post_init__(self):
        if not self.id:
            raise ValueError("item id must be a non-empty string")
        if not isinstance(self.genres, frozenset):
            object.__setattr__(self, "genres", frozenset(self.genres))
        if not self.genres:
            raise ValueError(f"item {self.id!r} has an empty genre set")


@dataclass(frozen=True)
class RecEdge:
    """A recommendation slot: src's page shows dst at position `rank` (1 = top)."""

    src: str
    dst: str
    rank: int
    weight: float | None = None

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError(f"edge {self.src}->{self.dst} has rank {self.rank} < 1")


class EdgeWeighting(Enum):
    """How edge weights are populated by :func:`materialize_weights`."""

    UNWEIGHTED = "unweighted"  # every edge gets weight 1.0
    SIMILARITY = "similarity"  # genre-set Jaccard distance between endpoints
    RANK = "rank"              # reciprocal rank, 1/rank


@dataclass(frozen=True)
class DegreeStats:
    """Headline network statistics (nodes, edges, degree, reciprocity)."""

    nodes: int
    edges: int
    avg_out_degree: float
    reciprocating_edges: int
    reciprocating_pct: float


class RecommendationNetwork:
    """Immutable directed graph over item records.

    Do not call the constructor directly; use :func:`build_network`, which
    validates and normalizes the input. Out-adjacency lists are kept in
    ascending rank order; an in-adjacency index and integer-indexed views
    (for numeric code) are built eagerly.
    """

    def __init__(
        self,
        records: dict[str, ItemRecord],
        out_adj: dict[str, list[RecEdge]],
        weighting: EdgeWeighting | None = None,
    ):
        self._records = records
        self._out = out_adj
        self.weighting = weighting

        self.ids: tuple[str, ...] = tuple(sorted(records))
        self.index: dict[str, int] = {item: i for i, item in enumerate(self.ids)}

        self._in: dict[str, list[RecEdge]] = {i: [] for i in self.ids}
        num_edges = 0
        for item in self.ids:
            for e in self._out[item]:
                self._in[e.dst].append(e)
                num_edges += 1
        self.num_edges = num_edges
        self.num_nodes = len(self.ids)

        # Integer-indexed views shared by the walker and matrix code.
        idx = self.index
        self._out_idx: list[list[int]] = [
            [idx[e.dst] for e in self._out[item]] for item in self.ids
        ]
        src_idx = np.empty(num_edges, dtype=np.int64)
        dst_idx = np.empty(num_edges, dtype=np.int64)
        pos = 0
        for i, item in enumerate(self.ids):
            for e in self._out[item]:
                src_idx[pos] = i
                dst_idx[pos] = idx[e.dst]
                pos += 1
        self._src_idx = src_idx
        self._dst_idx = dst_idx

    # -- node access ----------------------------------------------------

    def __contains__(self, item_id: str) -> bool:
        return item_id in self._records

    def item(self, item_id: str) -> ItemRecord:
        try:
            return self._records[item_id]
        except KeyError:
            raise UnknownItemError(f"unknown item id {item_id!r}") from None

    def items(self) -> Iterator[ItemRecord]:
        for item_id in self.ids:
            yield self._records[item_id]

    def genres(self, item_id: str) -> frozenset[str]:
        return self.item(item_id).genres

    # -- edge access ----------------------------------------------------

    def out_edges(self, item_id: str) -> list[RecEdge]:
        self.item(item_id)
        return list(self._out[item_id])

    def in_edges(self, item_id: str) -> list[RecEdge]:
        self.item(item_id)
        return list(self._in[item_id])

    def out_degree(self, item_id: str) -> int:
        self.item(item_id)
        return len(self._out[item_id])

    def in_degree(self, item_id: str) -> int:
        self.item(item_id)
        return len(self._in[item_id])

    def edges(self) -> Iterator[RecEdge]:
        """All edges, ordered by source id then rank (deterministic)."""
        for item_id in self.ids:
            yield from self._out[item_id]

    # -- integer-indexed views -------------------------------------------

    @property
    def out_neighbor_indices(self) -> list[list[int]]:
        """Per node index, the out-neighbor indices in ascending rank order."""
        return self._out_idx

    def edge_index_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """(src, dst) node-index arrays, one entry per edge, edges() order."""
        return self._src_idx, self._dst_idx

    def in_degree_array(self) -> np.ndarray:
        counts = np.bincount(self._dst_idx, minlength=self.num_nodes)
        return counts.astype(np.int64)

    def out_degree_array(self) -> np.ndarray:
        counts = np.bincount(self._src_idx, minlength=self.num_nodes)
        return counts.astype(np.int64)


def build_network(
    items: Iterable[ItemRecord], edges: Iterable[RecEdge]
) -> RecommendationNetwork:
    """Validate and assemble a recommendation network.

    Duplicate (src, dst) pairs collapse to their lowest rank (an item shows
    up once per recommendation list, and the best slot is the one the
    deterministic surfer would see). Input order never matters: identical
    item/edge multisets yield identical networks.

    Raises:
        DuplicateItemIdError: two records share an id.
        UnknownEndpointError: an edge references an absent item.
        SelfLoopError: an edge with src == dst.
        DuplicateRankError: one source lists two distinct items at one rank.
    """
    records: dict[str, ItemRecord] = {}
    for rec in items:
        if rec.id in records:
            raise DuplicateItemIdError(f"duplicate item id {rec.id!r}")
        records[rec.id] = rec
    if not records:
        raise ValueError("a network needs at least one item")

    best: dict[tuple[str, str], RecEdge] = {}
    for e in edges:
        if e.src not in records:
            raise UnknownEndpointError(f"edge source {e.src!r} is not a known item")
        if e.dst not in records:
            raise UnknownEndpointError(f"edge target {e.dst!r} is not a known item")
        if e.src == e.dst:
            raise SelfLoopError(f"self-loop on {e.src!r}")
        key = (e.src, e.dst)
        kept = best.get(key)
        if kept is None or e.rank < kept.rank:
            best[key] = e

    out_adj: dict[str, list[RecEdge]] = {item_id: [] for item_id in records}
    for e in best.values():
        out_adj[e.src].append(e)
    for item_id, adj in out_adj.items():
        adj.sort(key=lambda e: (e.rank, e.dst))
        for a, b in zip(adj, adj[1:]):
            if a.rank == b.rank:
                raise DuplicateRankError(
                    f"source {item_id!r} has two edges at rank {a.rank}"
                )
    return RecommendationNetwork(records, out_adj)


def degree_stats(rn: RecommendationNetwork) -> DegreeStats:
    """Node/edge counts, average out-degree, and reciprocating edges.

    An edge i->j reciprocates when j->i also exists; the count includes
    both directions of each mutual pair, so it is always even.
    """
    pairs = {(e.src, e.dst) for e in rn.edges()}
    reciprocal = sum(1 for (u, v) in pairs if (v, u) in pairs)
    edges = rn.num_edges
    return DegreeStats(
        nodes=rn.num_nodes,
        edges=edges,
        avg_out_degree=edges / rn.num_nodes,
        reciprocating_edges=reciprocal,
        reciprocating_pct=100.0 * reciprocal / edges if edges else 0.0,
    )


def ranked_out_neighbors(
    rn: RecommendationNetwork, node: str
) -> list[tuple[str, int]]:
    """The recommendation list on `node`'s page as (item, rank), best first."""
    return [(e.dst, e.rank) for e in rn.out_edges(node)]


def materialize_weights(
    rn: RecommendationNetwork, scheme: EdgeWeighting
) -> RecommendationNetwork:
    """Return a copy of the network with edge weights populated.

    UNWEIGHTED sets every weight to 1.0, RANK uses reciprocal rank, and
    SIMILARITY uses the genre-set Jaccard distance between the endpoints
    (so a weight of 0 means genre-identical items).
    """
    from .diversity import jaccard_distance

    records = rn._records
    out_adj: dict[str, list[RecEdge]] = {}
    for item_id in rn.ids:
        new_edges = []
        for e in rn._out[item_id]:
            if scheme is EdgeWeighting.UNWEIGHTED:
                w = 1.0
            elif scheme is EdgeWeighting.RANK:
                w = 1.0 / e.rank
            else:
                w = jaccard_distance(records[e.src].genres, records[e.dst].genres)
            new_edges.append(RecEdge(e.src, e.dst, e.rank, w))
        out_adj[item_id] = new_edges
    return RecommendationNetwork(records, out_adj, weighting=scheme)
