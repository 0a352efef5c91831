"""Information-segregation audit: evenness and concentration of group exposure.

The catalog's genres span an information space; every item is a source
mapped (fractionally, when multi-genre) onto those genre units. A user
group is a cohort of walkers sharing a start item and teleport
probability. The group's exposure vector accumulates the genre mass of
everything its members saw; evenness (1 - Gini) measures how uniformly
that exposure spreads over the units, and concentration measures how much
of the catalog the exposed units cover.
"""

from __future__ import annotations

import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .errors import UnitMismatchError, ZeroExposureError
from .seeding import derive_seed
from .walker import SurferPolicy, _run_walk

if TYPE_CHECKING:
    from .graph import RecommendationNetwork


@dataclass(frozen=True)
class InformationUniverse:
    """Per-genre source counts for the whole catalog (fractional for
    multi-genre items); n_total is the number of items."""

    labels: tuple[str, ...]
    counts: np.ndarray
    n_total: float


def build_universe(rn: RecommendationNetwork) -> InformationUniverse:
    """Map every item onto the genre units, 1/|genres| mass in each."""
    labels = tuple(sorted({g for rec in rn.items() for g in rec.genres}))
    label_idx = {g: i for i, g in enumerate(labels)}
    counts = np.zeros(len(labels))
    for rec in rn.items():
        w = 1.0 / len(rec.genres)
        for g in rec.genres:
            counts[label_idx[g]] += w
    return InformationUniverse(labels, counts, float(rn.num_nodes))


@dataclass(frozen=True)
class ExposureVector:
    """Per-unit exposure mass a_i accumulated by one user group."""

    labels: tuple[str, ...]
    masses: np.ndarray

    @property
    def total(self) -> float:
        return float(self.masses.sum())


@dataclass(frozen=True)
class GroupSpec:
    """A user group: shared start item, policy, member count, walk length."""

    start: str
    policy: SurferPolicy
    members: int
    steps: int

    def __post_init__(self):
        if self.members < 1:
            raise ValueError("a group needs at least one member")
        if self.steps < 1:
            raise ValueError("walks need at least one step")


def group_exposure(
    rn: RecommendationNetwork,
    group: GroupSpec,
    universe: InformationUniverse,
    seed: int = 0,
) -> ExposureVector:
    """Average exposure vector over the group's members.

    Each member runs an independent walk (seed derived per member);
    every visit, revisits included, adds the visited item's fractional
    genre mass. Averaging over members removes per-walk noise while
    keeping the exposure scale of a single member (total = steps + 1).
    """
    rn.item(group.start)
    label_idx = {g: i for i, g in enumerate(universe.labels)}
    pairs = [
        tuple((label_idx[g], 1.0 / len(rec.genres)) for g in sorted(rec.genres))
        for rec in rn.items()
    ]
    start = rn.index[group.start]
    out_idx = rn.out_neighbor_indices
    n = rn.num_nodes

    masses = np.zeros(len(universe.labels))
    for member in range(group.members):
        rng = random.Random(derive_seed(seed, group.start, member))
        counts, _, _ = _run_walk(
            out_idx,
            n,
            start,
            group.policy.teleport_prob,
            group.policy.top_one,
            group.steps,
            rng,
            record=False,
        )
        for v, c in counts.items():
            for b, w in pairs[v]:
                masses[b] += w * c
    masses /= group.members
    return ExposureVector(universe.labels, masses)


def evenness(exposure: ExposureVector) -> float:
    """Information evenness: 1 - Gini of the per-unit exposure.

    1 when all m units got equal exposure; 1/m when everything landed in
    a single unit. Scale-invariant in the exposure vector.
    """
    a = exposure.masses
    total = exposure.total
    if total <= 0:
        raise ZeroExposureError("exposure vector has no mass")
    m = len(a)
    pairwise = float(np.abs(a[:, None] - a[None, :]).sum())
    return 1.0 - pairwise / (2.0 * m * total)


def concentration(exposure: ExposureVector, universe: InformationUniverse) -> float:
    """Half the inner product of exposure shares with universe shares.

    Higher values mean the group's exposure falls on units that hold a
    large share of the catalog; low values mean the group is boxed into a
    small corner of the information space.
    """
    if exposure.labels != universe.labels:
        raise UnitMismatchError("exposure and universe use different unit labels")
    total = exposure.total
    if total <= 0:
        raise ZeroExposureError("exposure vector has no mass")
    shares = exposure.masses / total
    catalog_shares = universe.counts / universe.n_total
    return 0.5 * float(shares @ catalog_shares)


@dataclass(frozen=True)
class GroupResult:
    start: str
    teleport_prob: float
    evenness: float
    concentration: float


@dataclass(frozen=True)
class TpSummary:
    teleport_prob: float
    mean_evenness: float
    mean_concentration: float
    num_groups: int


@dataclass(frozen=True)
class SegregationReport:
    groups: tuple[GroupResult, ...]
    per_tp: tuple[TpSummary, ...]


def select_top_indegree(rn: RecommendationNetwork, k: int) -> list[str]:
    """The k most-recommended items (a stand-in for an all-time-top list)."""
    if not 1 <= k <= rn.num_nodes:
        raise ValueError(f"k must be in 1..{rn.num_nodes}")
    indeg = rn.in_degree_array()
    order = sorted(range(rn.num_nodes), key=lambda i: (-indeg[i], rn.ids[i]))
    return [rn.ids[i] for i in order[:k]]


def run_segregation_experiment(
    rn: RecommendationNetwork,
    starts: Sequence[str],
    tps: Sequence[float],
    members: int = 10,
    steps: int = 400,
    seed: int = 0,
    threads: int = 1,
) -> SegregationReport:
    """Simulate one user group per (start, t_p) pair and score each.

    The default audit protocol is 10 popular starts x 11 teleport
    probabilities x 10 members at 400 steps (110 groups); the report
    carries every group plus per-t_p averages over the starts. Results
    are deterministic given the seed, whatever `threads` is.
    """
    if not starts:
        raise ValueError("at least one start item required")
    if not tps:
        raise ValueError("at least one teleport probability required")
    for s in starts:
        rn.item(s)
    universe = build_universe(rn)

    specs = []
    for tp_idx, tp in enumerate(tps):
        for start in starts:
            specs.append((tp_idx, tp, start))

    def one(spec: tuple[int, float, str]) -> GroupResult:
        tp_idx, tp, start = spec
        group = GroupSpec(start, SurferPolicy.stochastic(tp), members, steps)
        exposure = group_exposure(rn, group, universe, derive_seed(seed, tp_idx))
        return GroupResult(start, tp, evenness(exposure), concentration(exposure, universe))

    if threads <= 1 or len(specs) < 2:
        groups = [one(spec) for spec in specs]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            groups = list(pool.map(one, specs))

    per_tp = []
    for tp_idx, tp in enumerate(tps):
        chunk = groups[tp_idx * len(starts) : (tp_idx + 1) * len(starts)]
        per_tp.append(
            TpSummary(
                teleport_prob=tp,
                mean_evenness=sum(g.evenness for g in chunk) / len(chunk),
                mean_concentration=sum(g.concentration for g in chunk) / len(chunk),
                num_groups=len(chunk),
            )
        )
    return SegregationReport(groups=tuple(groups), per_tp=tuple(per_tp))
