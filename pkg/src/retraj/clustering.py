"""
Agglomerative clustering of release trajectories over a precomputed
distance matrix, plus extraction of recurrent patterns from the
resulting groups.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import DssSequence, RetrajError, StateSymbol, render_state
from .seqstats import ModalTrajectory, modal_trajectory
from .distance import DistanceMatrix

LINKAGES = ("ward", "single", "complete", "average")


class InvalidK(RetrajError):
    def __init__(self, k: int, n: int) -> None:
        super().__init__(f"k={k} outside valid range 1..{n}")
        self.k = k
        self.n = n


@dataclass(frozen=True)
class ClusterAssignment:
    """A flat k-cluster partition of the releases.

    Labels run 1..k, ordered by each cluster's smallest member id; the
    medoid is the member with minimal summed distance to the rest of
    its cluster.
    """

    labels: dict[str, int]
    sizes: dict[int, int]
    medoids: dict[int, str]
    k: int
    linkage: str

    def members(self, label: int) -> tuple[str, ...]:
        return tuple(sorted(rid for rid, lab in self.labels.items() if lab == label))


def hierarchical_cluster(dm: DistanceMatrix, k: int, linkage: str = "ward") -> ClusterAssignment:
    """Agglomerate with the Lance-Williams update until k clusters
    remain.

    Ward operates on squared dissimilarities; single, complete, and
    average operate on the raw ones. Merge ties are broken by the
    smallest (lexicographically ordered) pair of cluster-minimum
    member ids, so the result is a deterministic function of the
    matrix and k.
    """
    if linkage not in LINKAGES:
        raise ValueError(f"unknown linkage {linkage!r}; expected one of {LINKAGES}")
    n = len(dm.release_ids)
    if not 1 <= k <= n:
        raise InvalidK(k, n)

    work = dm.distances.astype(np.float64) ** 2 if linkage == "ward" else dm.distances.astype(np.float64)
    work = work.copy()
    members: list[list[int] | None] = [[i] for i in range(n)]
    min_ids: list[str | None] = list(dm.release_ids)
    active = list(range(n))

    while len(active) > k:
        best_pair: tuple[int, int] | None = None
        best_val = np.inf
        best_key: tuple[str, str] | None = None
        for ai in range(len(active)):
            i = active[ai]
            row = work[i]
            for aj in range(ai + 1, len(active)):
                j = active[aj]
                val = row[j]
                key = tuple(sorted((min_ids[i], min_ids[j])))
                if val < best_val or (val == best_val and key < best_key):
                    best_val = val
                    best_pair = (i, j)
                    best_key = key
        i, j = best_pair
        ni, nj = len(members[i]), len(members[j])
        for m in active:
            if m in (i, j):
                continue
            nm = len(members[m])
            if linkage == "ward":
                new = (
                    (ni + nm) * work[i, m] + (nj + nm) * work[j, m] - nm * work[i, j]
                ) / (ni + nj + nm)
            elif linkage == "single":
                new = min(work[i, m], work[j, m])
            elif linkage == "complete":
                new = max(work[i, m], work[j, m])
            else:
                new = (ni * work[i, m] + nj * work[j, m]) / (ni + nj)
            work[i, m] = new
            work[m, i] = new
        members[i] = members[i] + members[j]
        min_ids[i] = min(min_ids[i], min_ids[j])
        members[j] = None
        min_ids[j] = None
        active.remove(j)

    groups = sorted((members[i] for i in active), key=lambda g: min(dm.release_ids[x] for x in g))
    labels: dict[str, int] = {}
    sizes: dict[int, int] = {}
    medoids: dict[int, str] = {}
    for label, group in enumerate(groups, start=1):
        for idx in group:
            labels[dm.release_ids[idx]] = label
        sizes[label] = len(group)
        medoids[label] = _medoid(dm, group)
    return ClusterAssignment(labels=labels, sizes=sizes, medoids=medoids, k=k, linkage=linkage)


def _medoid(dm: DistanceMatrix, group: list[int]) -> str:
    """Member minimizing summed distance to the rest of the group,
    on the original (unsquared) distances; ties go to the smallest id."""
    best_id: str | None = None
    best_total = np.inf
    for idx in group:
        total = float(sum(dm.distances[idx, other] for other in group))
        rid = dm.release_ids[idx]
        if total < best_total or (total == best_total and rid < best_id):
            best_total = total
            best_id = rid
    return best_id


# ---------------------------------------------------------------------
# Pattern extraction
# ---------------------------------------------------------------------

@dataclass(frozen=True)
class PatternReport:
    """One recurrent trajectory family: a cluster at or above the size
    threshold, described by its members' DSS shapes."""

    label: int
    size: int
    member_ids: tuple[str, ...]
    medoid_id: str
    medoid_dss: tuple[str, ...]
    modal_dss: ModalTrajectory
    length_distribution: dict[int, int]
    first_state_distribution: dict[str, int]
    last_state_distribution: dict[str, int]


def extract_patterns(
    assignment: ClusterAssignment,
    seqs: dict[str, DssSequence],
    min_size: int = 5,
) -> list[PatternReport]:
    """Clusters of size >= min_size, largest first (ties by label).

    The size threshold is a reporting heuristic layered on top of the
    clustering, not part of it; reports say so explicitly.
    """
    if min_size < 1:
        raise ValueError("min_size must be positive")
    reports: list[PatternReport] = []
    for label in sorted(assignment.sizes, key=lambda lab: (-assignment.sizes[lab], lab)):
        size = assignment.sizes[label]
        if size < min_size:
            continue
        member_ids = assignment.members(label)
        member_seqs = [seqs[rid] for rid in member_ids]
        lengths: dict[int, int] = {}
        firsts: dict[str, int] = {}
        lasts: dict[str, int] = {}
        for seq in member_seqs:
            lengths[len(seq)] = lengths.get(len(seq), 0) + 1
            first = render_state(seq.states[0])
            last = render_state(seq.states[-1])
            firsts[first] = firsts.get(first, 0) + 1
            lasts[last] = lasts.get(last, 0) + 1
        medoid_id = assignment.medoids[label]
        reports.append(
            PatternReport(
                label=label,
                size=size,
                member_ids=member_ids,
                medoid_id=medoid_id,
                medoid_dss=seqs[medoid_id].rendered(),
                modal_dss=modal_trajectory([list(seq.states) for seq in member_seqs]),
                length_distribution=lengths,
                first_state_distribution=firsts,
                last_state_distribution=lasts,
            )
        )
    return reports


PATTERN_SELECTION_NOTE = (
    "patterns are clusters whose size is at least min_size; the size "
    "threshold is a reporting heuristic applied after clustering, not "
    "a property of the clustering itself"
)
