"""Seeded synthetic recommendation networks with controllable homophily.

Each node gets one genre (optionally a second) and a fixed number of
ranked recommendation slots. A slot targets, with probability p_same, a
node sharing a genre with the source, and otherwise a node sharing none,
so p_same is exactly the expected same-genre edge fraction and the
contingency diagonal is analytically predictable. Setting
popularity_skew > 0 biases target choice toward already-recommended
nodes (weight 1 + skew * current in-degree), producing heavy-tailed
in-degree. Generation is single-threaded and fully determined by the
seed.
"""

from __future__ import annotations

import csv
import json
import random
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from .errors import InfeasibleConfigError
from .graph import ItemRecord, RecEdge

# Rejection-sampling budget per slot before falling back to a wider pool.
_MAX_TRIES = 64


@dataclass(frozen=True)
class SynthConfig:
    """Generator knobs. Genre labels are normalized like ingest does
    (trimmed, case-folded) so written datasets round-trip exactly."""

    num_nodes: int
    genre_labels: tuple[str, ...]
    genre_probs: tuple[float, ...] | None = None
    multi_genre_prob: float = 0.0
    out_degree: int = 4
    p_same: float = 0.5
    popularity_skew: float = 0.0
    seed: int = 0

    def __post_init__(self):
        labels = tuple(g.strip().casefold() for g in self.genre_labels)
        if not labels or any(not g for g in labels):
            raise ValueError("genre labels must be non-empty strings")
        if len(set(labels)) != len(labels):
            raise ValueError("genre labels must be unique after case folding")
        object.__setattr__(self, "genre_labels", labels)
        if self.genre_probs is None:
            uniform = tuple(1.0 / len(labels) for _ in labels)
            object.__setattr__(self, "genre_probs", uniform)
        else:
            probs = tuple(float(p) for p in self.genre_probs)
            if len(probs) != len(labels):
                raise ValueError("need one probability per genre label")
            if any(p < 0.0 for p in probs):
                raise ValueError("genre probabilities must be non-negative")
            if abs(sum(probs) - 1.0) > 1e-9:
                raise ValueError("genre probabilities must sum to 1")
            object.__setattr__(self, "genre_probs", probs)
        if self.num_nodes < 1:
            raise ValueError("num_nodes must be positive")
        if self.out_degree < 1:
            raise ValueError("out_degree must be positive")
        if not 0.0 <= self.multi_genre_prob <= 1.0:
            raise ValueError("multi_genre_prob must lie in [0, 1]")
        if not 0.0 <= self.p_same <= 1.0:
            raise ValueError("p_same must lie in [0, 1]")
        if self.popularity_skew < 0.0:
            raise ValueError("popularity_skew must be >= 0")


@dataclass(frozen=True)
class GenerationStats:
    """What happened during generation: slots that had to fall back to the
    global pool, and the resulting in-degree maximum."""

    fallback_count: int
    max_in_degree: int


def generate(cfg: SynthConfig) -> tuple[list[ItemRecord], list[RecEdge], GenerationStats]:
    """Generate (items, edges, stats) for the given config.

    Every node receives exactly `out_degree` ranked slots with no
    self-loops or duplicate targets. When a slot's intended pool
    (same-genre or genre-disjoint) has no eligible candidate left, the
    slot falls back to the global pool and the fallback is counted.

    Raises InfeasibleConfigError when out_degree >= num_nodes (not enough
    distinct targets).
    """
    n = cfg.num_nodes
    k = cfg.out_degree
    if k >= n:
        raise InfeasibleConfigError(
            f"out_degree {k} needs at least {k + 1} nodes, got {n}"
        )
    rng = random.Random(cfg.seed)
    labels = cfg.genre_labels
    probs = cfg.genre_probs
    num_labels = len(labels)
    label_range = list(range(num_labels))

    width = max(1, len(str(n - 1)))
    ids = [f"n{i:0{width}d}" for i in range(n)]

    # Genre assignment: primary by genre_probs, optional second genre from
    # the remaining labels with renormalized probabilities.
    node_genres: list[tuple[int, ...]] = []
    for _ in range(n):
        g1 = rng.choices(label_range, weights=probs)[0] if num_labels > 1 else 0
        chosen = {g1}
        if (
            num_labels > 1
            and cfg.multi_genre_prob > 0.0
            and rng.random() < cfg.multi_genre_prob
        ):
            rest = [j for j in label_range if j != g1]
            rest_w = [probs[j] for j in rest]
            if sum(rest_w) > 0.0:
                chosen.add(rng.choices(rest, weights=rest_w)[0])
        node_genres.append(tuple(sorted(chosen)))
    genre_sets = [frozenset(gs) for gs in node_genres]

    genre_nodes: list[list[int]] = [[] for _ in range(num_labels)]
    for i, gs in enumerate(node_genres):
        for g in gs:
            genre_nodes[g].append(i)

    # Feasibility of the two slot intents, by genre combination: a
    # same-genre candidate exists iff some pool of the combo has >= 2
    # members; a disjoint candidate exists iff some other combo avoids
    # every genre of this one.
    combo_counts = Counter(node_genres)
    has_same: dict[tuple[int, ...], bool] = {}
    has_disjoint: dict[tuple[int, ...], bool] = {}
    for combo in combo_counts:
        combo_set = frozenset(combo)
        has_same[combo] = any(len(genre_nodes[g]) >= 2 for g in combo)
        has_disjoint[combo] = any(
            combo_set.isdisjoint(other) for other in combo_counts
        )

    skew = cfg.popularity_skew
    use_skew = skew > 0.0
    edge_targets_global: list[int] = []
    edge_targets_genre: list[list[int]] = [[] for _ in range(num_labels)]
    indeg = [0] * n

    def draw_global() -> int:
        # With skew, a node's weight is 1 + skew * indeg: mix a uniform
        # node draw with a draw from the in-edge target list.
        if use_skew and edge_targets_global:
            total = n + skew * len(edge_targets_global)
            if rng.random() * total >= n:
                return edge_targets_global[rng.randrange(len(edge_targets_global))]
        return rng.randrange(n)

    def draw_from_pool(g: int) -> int:
        base = genre_nodes[g]
        if use_skew:
            extra = edge_targets_genre[g]
            if extra:
                total = len(base) + skew * len(extra)
                if rng.random() * total >= len(base):
                    return extra[rng.randrange(len(extra))]
        return base[rng.randrange(len(base))]

    def draw_same_once(u: int) -> int | None:
        src = node_genres[u]
        if len(src) == 1:
            return draw_from_pool(src[0])
        # Mixture over the source's genre pools, then a rejection step so
        # nodes sharing several genres with u are not over-sampled.
        weights = [
            len(genre_nodes[g])
            + (skew * len(edge_targets_genre[g]) if use_skew else 0.0)
            for g in src
        ]
        total = sum(weights)
        r = rng.random() * total
        acc = 0.0
        chosen = src[-1]
        for g, w in zip(src, weights):
            acc += w
            if r < acc:
                chosen = g
                break
        t = draw_from_pool(chosen)
        shared = len(genre_sets[t] & genre_sets[u])
        if shared > 1 and rng.random() * shared >= 1.0:
            return None
        return t

    def draw_disjoint_once(u: int) -> int | None:
        t = draw_global()
        return t if genre_sets[t].isdisjoint(genre_sets[u]) else None

    def pick_target(u: int, want_same: bool, excluded: set[int]) -> tuple[int, bool]:
        intent_feasible = (
            has_same[node_genres[u]] if want_same else has_disjoint[node_genres[u]]
        )
        if intent_feasible:
            draw = draw_same_once if want_same else draw_disjoint_once
            for _ in range(_MAX_TRIES):
                t = draw(u)
                if t is not None and t not in excluded:
                    return t, False
        for _ in range(_MAX_TRIES):
            t = draw_global()
            if t not in excluded:
                return t, True
        eligible = [t for t in range(n) if t not in excluded]
        return eligible[rng.randrange(len(eligible))], True

    p_same = cfg.p_same
    edges: list[RecEdge] = []
    fallback_count = 0
    for u in range(n):
        excluded = {u}
        for rank in range(1, k + 1):
            if p_same >= 1.0:
                want_same = True
            elif p_same <= 0.0:
                want_same = False
            else:
                want_same = rng.random() < p_same
            t, fell_back = pick_target(u, want_same, excluded)
            if fell_back:
                fallback_count += 1
            edges.append(RecEdge(ids[u], ids[t], rank))
            excluded.add(t)
            indeg[t] += 1
            if use_skew:
                edge_targets_global.append(t)
                for g in node_genres[t]:
                    edge_targets_genre[g].append(t)

    items = [
        ItemRecord(
            ids[i],
            f"Synthetic item {i}",
            frozenset(labels[g] for g in node_genres[i]),
        )
        for i in range(n)
    ]
    stats = GenerationStats(
        fallback_count=fallback_count,
        max_in_degree=max(indeg) if n else 0,
    )
    return items, edges, stats


def write_dataset(
    items: list[ItemRecord],
    edges: list[RecEdge],
    nodes_path: str | Path,
    edges_path: str | Path,
) -> None:
    """Write items and edges in the ingest dump format (JSONL + CSV).

    Output is byte-stable: LF line endings, sorted genre arrays, edges in
    input order, so identical inputs always produce identical files.
    """
    with open(nodes_path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in items:
            fh.write(
                json.dumps(
                    {"id": rec.id, "title": rec.title, "genres": sorted(rec.genres)},
                    ensure_ascii=False,
                )
            )
            fh.write("\n")
    with open(edges_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["src", "dst", "rank"])
        for e in edges:
            writer.writerow([e.src, e.dst, e.rank])
