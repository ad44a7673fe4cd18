"""Agglomerative clustering: recovery, nesting, determinism, medoids,
and pattern extraction. Single linkage is cross-checked against a
union-find oracle."""

from __future__ import annotations

import random

import numpy as np
import pytest

from retraj.clustering import (
    LINKAGES,
    InvalidK,
    extract_patterns,
    hierarchical_cluster,
)
from retraj.distance import DistanceMatrix
from retraj.model import DssSequence, parse_state


def _dm(ids, mat):
    return DistanceMatrix(release_ids=tuple(ids), distances=np.asarray(mat, dtype=float))


def _random_dm(rng, n, low=0.5, high=9.5):
    ids = tuple(f"r{i:02d}" for i in range(n))
    mat = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            d = rng.uniform(low, high)
            mat[i, j] = d
            mat[j, i] = d
    return _dm(ids, mat)


def _two_blobs():
    # Two tight groups far apart; any sensible linkage splits them at k=2.
    ids = ("a1", "a2", "a3", "b1", "b2", "b3")
    rng = random.Random(404)
    mat = np.zeros((6, 6))
    for i in range(6):
        for j in range(i + 1, 6):
            same = (i < 3) == (j < 3)
            d = rng.uniform(0.1, 0.4) if same else rng.uniform(10.0, 12.0)
            mat[i, j] = d
            mat[j, i] = d
    return _dm(ids, mat)


def _partition(assignment):
    groups = {}
    for rid, label in assignment.labels.items():
        groups.setdefault(label, set()).add(rid)
    return {frozenset(g) for g in groups.values()}


def _single_linkage_oracle(dm, k):
    """Kruskal-style union-find: add edges shortest first until k
    components remain."""
    n = len(dm.release_ids)
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    edges = sorted(
        (dm.distances[i, j], i, j) for i in range(n) for j in range(i + 1, n)
    )
    components = n
    for _, i, j in edges:
        if components == k:
            break
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
            components -= 1
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), set()).add(dm.release_ids[i])
    return {frozenset(g) for g in groups.values()}


def test_two_blobs_recovered_by_every_linkage():
    dm = _two_blobs()
    for linkage in LINKAGES:
        got = hierarchical_cluster(dm, k=2, linkage=linkage)
        assert _partition(got) == {frozenset({"a1", "a2", "a3"}), frozenset({"b1", "b2", "b3"})}
        assert got.k == 2
        assert got.linkage == linkage


def test_labels_ordered_by_smallest_member_id():
    dm = _two_blobs()
    got = hierarchical_cluster(dm, k=2)
    assert got.labels["a1"] == 1
    assert got.labels["b1"] == 2
    assert got.sizes == {1: 3, 2: 3}
    assert got.members(1) == ("a1", "a2", "a3")


def test_k_equals_n_gives_singletons():
    dm = _random_dm(random.Random(7), 6)
    got = hierarchical_cluster(dm, k=6)
    assert got.sizes == {lab: 1 for lab in range(1, 7)}
    # Singleton labels follow sorted release ids.
    for pos, rid in enumerate(sorted(dm.release_ids), start=1):
        assert got.labels[rid] == pos
        assert got.medoids[pos] == rid


def test_k_one_single_cluster():
    dm = _random_dm(random.Random(8), 5)
    got = hierarchical_cluster(dm, k=1)
    assert set(got.labels.values()) == {1}
    assert got.sizes == {1: 5}


def test_invalid_k_rejected():
    dm = _random_dm(random.Random(9), 4)
    with pytest.raises(InvalidK):
        hierarchical_cluster(dm, k=0)
    with pytest.raises(InvalidK):
        hierarchical_cluster(dm, k=5)
    with pytest.raises(ValueError):
        hierarchical_cluster(dm, k=2, linkage="median")


def test_partitions_nest_as_k_decreases():
    # Agglomeration follows one merge path, so the k-partition coarsens
    # the (k+1)-partition exactly.
    rng = random.Random(31)
    for linkage in LINKAGES:
        dm = _random_dm(rng, 9)
        previous = None
        for k in range(9, 0, -1):
            part = _partition(hierarchical_cluster(dm, k=k, linkage=linkage))
            if previous is not None:
                for finer in previous:
                    assert any(finer <= coarser for coarser in part)
                assert len(part) == len(previous) - 1
            previous = part


def test_labels_form_partition():
    rng = random.Random(55)
    dm = _random_dm(rng, 11)
    for k in (1, 3, 7, 11):
        got = hierarchical_cluster(dm, k=k)
        assert sorted(got.labels) == sorted(dm.release_ids)
        assert set(got.labels.values()) == set(range(1, k + 1))
        assert sum(got.sizes.values()) == 11
        for label, size in got.sizes.items():
            assert len(got.members(label)) == size


def test_repeat_runs_identical():
    dm = _random_dm(random.Random(100), 10)
    for linkage in LINKAGES:
        first = hierarchical_cluster(dm, k=3, linkage=linkage)
        second = hierarchical_cluster(dm, k=3, linkage=linkage)
        assert first == second


def test_single_linkage_matches_union_find_oracle():
    rng = random.Random(2024)
    for trial in range(15):
        n = rng.randint(4, 12)
        dm = _random_dm(rng, n)
        for k in (1, 2, n // 2 or 1, n):
            got = _partition(hierarchical_cluster(dm, k=k, linkage="single"))
            want = _single_linkage_oracle(dm, k)
            assert got == want, f"trial {trial} k={k}"


def test_first_merge_is_globally_closest_pair():
    rng = random.Random(321)
    for linkage in LINKAGES:
        dm = _random_dm(rng, 8)
        n = 8
        best = min(
            ((dm.distances[i, j], i, j) for i in range(n) for j in range(i + 1, n)),
        )
        _, bi, bj = best
        got = hierarchical_cluster(dm, k=n - 1, linkage=linkage)
        assert got.labels[dm.release_ids[bi]] == got.labels[dm.release_ids[bj]]


def test_tied_merges_prefer_smallest_id_pair():
    # Equilateral triangle: all three merges tie at distance 1; the
    # (a, b) pair sorts first.
    dm = _dm(("a", "b", "c"), [[0, 1, 1], [1, 0, 1], [1, 1, 0]])
    got = hierarchical_cluster(dm, k=2)
    assert got.labels == {"a": 1, "b": 1, "c": 2}


def test_medoid_minimizes_summed_distance():
    rng = random.Random(606)
    dm = _random_dm(rng, 10)
    got = hierarchical_cluster(dm, k=3)
    for label in got.sizes:
        members = got.members(label)
        totals = {
            rid: sum(dm.between(rid, other) for other in members) for rid in members
        }
        best = min(totals.values())
        expected = min(rid for rid, tot in totals.items() if tot == pytest.approx(best))
        assert got.medoids[label] == expected


def test_medoid_tie_breaks_to_smallest_id():
    # Symmetric square of points: both members of each pair tie.
    dm = _dm(
        ("p", "q", "r", "s"),
        [
            [0, 1, 5, 5],
            [1, 0, 5, 5],
            [5, 5, 0, 1],
            [5, 5, 1, 0],
        ],
    )
    got = hierarchical_cluster(dm, k=2)
    assert got.medoids[got.labels["p"]] == "p"
    assert got.medoids[got.labels["r"]] == "r"


def _seqs_for(ids, shapes):
    out = {}
    for rid, names in zip(ids, shapes):
        out[rid] = DssSequence(release_id=rid, states=tuple(parse_state(n) for n in names))
    return out


def test_extract_patterns_threshold_and_order():
    dm = _two_blobs()
    # k=3 splits one blob, leaving sizes 3, 2, and 1.
    got = hierarchical_cluster(dm, k=3)
    shapes = [["B", "I"], ["B", "I"], ["B", "Z"], ["F", "T"], ["F", "T"], ["F"]]
    seqs = _seqs_for(dm.release_ids, shapes)

    all_patterns = extract_patterns(got, seqs, min_size=1)
    assert [p.size for p in all_patterns] == sorted((p.size for p in all_patterns), reverse=True)
    assert sum(p.size for p in all_patterns) == 6

    sizes = sorted(got.sizes.values(), reverse=True)
    big = extract_patterns(got, seqs, min_size=3)
    assert [p.size for p in big] == [s for s in sizes if s >= 3]
    for report in big:
        assert report.member_ids == got.members(report.label)
        assert report.medoid_id in report.member_ids
        assert report.medoid_dss == seqs[report.medoid_id].rendered()
        assert sum(report.length_distribution.values()) == report.size
        assert sum(report.first_state_distribution.values()) == report.size
        assert sum(report.last_state_distribution.values()) == report.size


def test_extract_patterns_fields_hand_checked():
    dm = _two_blobs()
    got = hierarchical_cluster(dm, k=2)
    seqs = _seqs_for(
        dm.release_ids,
        [["B", "I"], ["B", "I"], ["B", "Z"], ["F", "T"], ["F", "T"], ["Z"]],
    )
    reports = extract_patterns(got, seqs, min_size=2)
    assert len(reports) == 2
    first = reports[0]
    assert first.label == 1
    assert first.size == 3
    assert first.first_state_distribution == {"B": 3}
    assert first.last_state_distribution == {"I": 2, "Z": 1}
    assert first.length_distribution == {2: 3}
    assert [p.state for p in first.modal_dss.positions] == [parse_state("B"), parse_state("I")]

    second = reports[1]
    assert second.last_state_distribution == {"T": 2, "Z": 1}
    assert second.length_distribution == {2: 2, 1: 1}


def test_extract_patterns_min_size_validation():
    dm = _two_blobs()
    got = hierarchical_cluster(dm, k=2)
    seqs = _seqs_for(dm.release_ids, [["B"]] * 6)
    with pytest.raises(ValueError):
        extract_patterns(got, seqs, min_size=0)
    assert extract_patterns(got, seqs, min_size=7) == []
