"""Simulated users browsing the network: seeded walks with teleportation.

A surfer starts on an item page and repeatedly either follows one of the
page's recommendations or teleports to a uniformly random item, with
per-step teleport probability t_p (t_p = 0 always follows, t_p = 1 never
does). The deterministic "top-one" surfer always clicks the rank-1 slot.
What a surfer saw is summarized as an observed distribution over bins
(typically genres), whose entropy measures the diversity of the exposure.

Every walk owns an RNG stream derived from (master seed, start id, policy
index), so sweeps are bit-reproducible and independent of execution order
or thread count.
"""

from __future__ import annotations

import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable, Sequence

import numpy as np

from .errors import UnitMismatchError
from .seeding import derive_seed
from .structure import Binning

if TYPE_CHECKING:
    from .graph import RecommendationNetwork

FOLLOW = "follow"
TELEPORT = "teleport"
DANGLING = "dangling"


@dataclass(frozen=True)
class SurferPolicy:
    """How a simulated user picks the next item.

    `teleport_prob` is the per-step chance of jumping to a uniformly
    random item instead of following a recommendation. `top_one` marks
    the deterministic surfer who always clicks the top-ranked slot; that
    surfer never teleports and never consumes randomness.
    """

    teleport_prob: float = 0.0
    top_one: bool = False

    def __post_init__(self):
        if not 0.0 <= self.teleport_prob <= 1.0:
            raise ValueError("teleport probability must lie in [0, 1]")
        if self.top_one and self.teleport_prob != 0.0:
            raise ValueError("the top-one surfer never teleports")

    @classmethod
    def stochastic(cls, teleport_prob: float) -> "SurferPolicy":
        return cls(teleport_prob=teleport_prob)

    @classmethod
    def top_ranked(cls) -> "SurferPolicy":
        return cls(top_one=True)

    @property
    def label(self) -> str:
        """Plot/table label: '0.0*' for the top-one surfer, else t_p."""
        return "0.0*" if self.top_one else str(float(self.teleport_prob))


@dataclass(frozen=True)
class WalkConfig:
    start: str
    policy: SurferPolicy
    steps: int
    seed: int = 0

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("a walk needs at least one step")


@dataclass(frozen=True)
class WalkTrace:
    """Visited items (length steps+1, start included) and per-step kinds."""

    visits: tuple[str, ...]
    step_kinds: tuple[str, ...]


# One step of a walk:
#   top-one surfer: go to the rank-1 neighbor; on a dangling node stay put
#     (recorded as a dangling step) so the trace never depends on the seed.
#   stochastic surfer: with probability t_p teleport to a uniform random
#     node (no draw happens when t_p == 0); otherwise follow a uniformly
#     chosen out-neighbor, or, on a dangling node, fall back to a uniform
#     jump recorded as a dangling step.
# _run_walk is the single implementation of this contract.
def _run_walk(
    out_idx: list[list[int]],
    n: int,
    start: int,
    tp: float,
    top_one: bool,
    steps: int,
    rng: random.Random,
    record: bool,
):
    counts: dict[int, int] = {start: 1}
    get = counts.get
    visits = [start] if record else None
    kinds = [] if record else None
    cur = start

    if top_one:
        for _ in range(steps):
            nbrs = out_idx[cur]
            if nbrs:
                cur = nbrs[0]
                kind = FOLLOW
            else:
                kind = DANGLING
            counts[cur] = get(cur, 0) + 1
            if record:
                visits.append(cur)
                kinds.append(kind)
        return counts, visits, kinds

    rand = rng.random
    rrange = rng.randrange
    for _ in range(steps):
        if tp > 0.0 and rand() < tp:
            cur = rrange(n)
            kind = TELEPORT
        else:
            nbrs = out_idx[cur]
            if nbrs:
                cur = nbrs[rrange(len(nbrs))]
                kind = FOLLOW
            else:
                cur = rrange(n)
                kind = DANGLING
        counts[cur] = get(cur, 0) + 1
        if record:
            visits.append(cur)
            kinds.append(kind)
    return counts, visits, kinds


def simulate_walk(rn: RecommendationNetwork, cfg: WalkConfig) -> WalkTrace:
    """Run one walk and return its full trace. Deterministic given cfg."""
    rn.item(cfg.start)
    start = rn.index[cfg.start]
    rng = random.Random(cfg.seed)
    _, visits, kinds = _run_walk(
        rn.out_neighbor_indices,
        rn.num_nodes,
        start,
        cfg.policy.teleport_prob,
        cfg.policy.top_one,
        cfg.steps,
        rng,
        record=True,
    )
    ids = rn.ids
    return WalkTrace(
        visits=tuple(ids[i] for i in visits),
        step_kinds=tuple(kinds),
    )


@dataclass(frozen=True)
class ObservedDistribution:
    """Share of a walk's visits falling in each bin, revisits counted."""

    labels: tuple[str, ...]
    masses: np.ndarray

    def __post_init__(self):
        if len(self.masses) != len(self.labels):
            raise ValueError("one mass per label required")
        if np.any(self.masses < 0):
            raise ValueError("masses must be non-negative")
        total = float(self.masses.sum())
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"masses must sum to 1, got {total}")


def observed_distribution(trace: WalkTrace, binning: Binning) -> ObservedDistribution:
    """Distribution over bins of everything the surfer saw.

    Every visit (start and revisits included) contributes the visited
    node's weighted bin assignment, then the tally is normalized by the
    number of visits.
    """
    masses = np.zeros(len(binning.labels))
    for item in trace.visits:
        for b, w in binning.assignment[item]:
            masses[b] += w
    masses /= len(trace.visits)
    return ObservedDistribution(binning.labels, masses)


def entropy(dist: ObservedDistribution) -> float:
    """Base-2 Shannon entropy of the observed distribution, in bits."""
    return _entropy_of(dist.masses, 1.0)


def _entropy_of(masses, total: float) -> float:
    h = 0.0
    for x in masses:
        if x > 0.0:
            p = x / total
            h -= p * math.log2(p)
    return h


def kl_divergence(
    p: ObservedDistribution, q: ObservedDistribution, eps: float = 1e-12
) -> float:
    """Base-2 KL divergence D(p || q) with q floored at eps.

    The floor keeps the value finite when q has zero mass where p does
    not; with matching distributions the result is 0.
    """
    if p.labels != q.labels:
        raise UnitMismatchError("distributions are over different label sets")
    total = 0.0
    for pi, qi in zip(p.masses, q.masses):
        if pi > 0.0:
            total += pi * math.log2(pi / max(qi, eps))
    return total


@dataclass(frozen=True)
class SweepPoint:
    policy: SurferPolicy
    steps: int
    mean_entropy: float
    stddev: float
    num_walks: int


def _map_indexed(fn: Callable[[int], float], count: int, threads: int) -> np.ndarray:
    """Evaluate fn(0..count-1), optionally on a thread pool, in index order."""
    if threads <= 1 or count < 2:
        return np.fromiter((fn(i) for i in range(count)), dtype=np.float64, count=count)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        chunk = max(1, count // (threads * 8))
        return np.fromiter(
            pool.map(fn, range(count), chunksize=chunk), dtype=np.float64, count=count
        )


def _walk_entropy(
    rn: RecommendationNetwork,
    pairs: list[tuple[tuple[int, float], ...]],
    m: int,
    start: int,
    policy: SurferPolicy,
    steps: int,
    walk_seed: int,
) -> float:
    rng = random.Random(walk_seed)
    counts, _, _ = _run_walk(
        rn.out_neighbor_indices,
        rn.num_nodes,
        start,
        policy.teleport_prob,
        policy.top_one,
        steps,
        rng,
        record=False,
    )
    masses = [0.0] * m
    for v, c in counts.items():
        for b, w in pairs[v]:
            masses[b] += w * c
    return _entropy_of(masses, steps + 1.0)


def entropy_sweep(
    rn: RecommendationNetwork,
    binning: Binning,
    policies: Sequence[SurferPolicy],
    steps: int,
    seed: int = 0,
    threads: int = 1,
) -> list[SweepPoint]:
    """Mean observed-distribution entropy per policy, one walk per node.

    Starting a walk from every node makes the averages independent of any
    particular start point. Per-walk seeds derive from (seed, start id,
    policy index), so results do not depend on `threads`.
    """
    if not policies:
        raise ValueError("at least one policy required")
    pairs = [binning.assignment[item] for item in rn.ids]
    m = len(binning.labels)
    points = []
    for pol_idx, policy in enumerate(policies):
        def one(i: int, _policy=policy, _pol_idx=pol_idx) -> float:
            walk_seed = derive_seed(seed, rn.ids[i], _pol_idx)
            return _walk_entropy(rn, pairs, m, i, _policy, steps, walk_seed)

        entropies = _map_indexed(one, rn.num_nodes, threads)
        points.append(
            SweepPoint(
                policy=policy,
                steps=steps,
                mean_entropy=float(entropies.mean()),
                stddev=float(entropies.std()),
                num_walks=rn.num_nodes,
            )
        )
    return points


def walk_length_sweep(
    rn: RecommendationNetwork,
    binning: Binning,
    teleport_prob: float,
    lengths: Sequence[int],
    seed: int = 0,
    threads: int = 1,
) -> list[SweepPoint]:
    """Mean entropy for a fixed policy at several walk lengths.

    Seeds do not depend on the length, so longer walks share their prefix
    with shorter ones; length comparisons are paired rather than noisy.
    """
    if not lengths:
        raise ValueError("at least one walk length required")
    policy = SurferPolicy.stochastic(teleport_prob)
    pairs = [binning.assignment[item] for item in rn.ids]
    m = len(binning.labels)
    points = []
    for steps in lengths:
        def one(i: int, _steps=steps) -> float:
            walk_seed = derive_seed(seed, rn.ids[i], 0)
            return _walk_entropy(rn, pairs, m, i, policy, _steps, walk_seed)

        entropies = _map_indexed(one, rn.num_nodes, threads)
        points.append(
            SweepPoint(
                policy=policy,
                steps=steps,
                mean_entropy=float(entropies.mean()),
                stddev=float(entropies.std()),
                num_walks=rn.num_nodes,
            )
        )
    return points
