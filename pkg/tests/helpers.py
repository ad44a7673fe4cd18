"""
Independent oracles and random-input builders shared by the test suite.

The oracles deliberately use different algorithms from the library code
(exhaustive enumeration, pointwise sweeps, direct tallies) so agreement
is evidence of correctness rather than of shared bugs.
"""

from __future__ import annotations

import random
from datetime import datetime, timedelta, timezone
from itertools import combinations

import numpy as np

from retraj.model import (
    FULL_ALPHABET,
    IssueRecord,
    IssueType,
    ReleaseWindow,
    StateSymbol,
    Trajectory,
    X_STATE,
    Z_STATE,
)
from retraj.distance import SubstitutionCostMatrix

UTC = timezone.utc

LETTER_TYPE_NAMES = {
    "B": "Bug",
    "I": "Improvement",
    "F": "New Feature",
    "T": "Task",
    "X": "Documentation",
}


# ---------------------------------------------------------------------
# Optimal Matching oracle: exhaustive alignment enumeration
# ---------------------------------------------------------------------

def om_exhaustive(a, b, scm: SubstitutionCostMatrix) -> float:
    """Minimum edit cost by brute force.

    Every edit script corresponds to an order-preserving alignment of
    some k positions of a with k positions of b (matched pairs are
    substitutions, everything else indels), so enumerating all pairs of
    k-subsets covers all scripts. For lengths up to 5 that is at most
    sum_k C(5,k)^2 = 252 alignments.
    """
    best = scm.indel * (len(a) + len(b))
    for k in range(1, min(len(a), len(b)) + 1):
        for a_pos in combinations(range(len(a)), k):
            for b_pos in combinations(range(len(b)), k):
                cost = scm.indel * (len(a) + len(b) - 2 * k)
                for i, j in zip(a_pos, b_pos):
                    cost += scm.cost(a[i], b[j])
                best = min(best, cost)
    return best


def random_scm(rng: random.Random, symbols: tuple[StateSymbol, ...]) -> SubstitutionCostMatrix:
    """A random symmetric cost matrix with zero diagonal over the given
    symbols, costs in [0, 2], random indel in [0.2, 2]."""
    n = len(symbols)
    costs = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            c = rng.uniform(0.0, 2.0)
            costs[i, j] = c
            costs[j, i] = c
    return SubstitutionCostMatrix(
        alphabet=symbols, costs=costs, indel=rng.uniform(0.2, 2.0)
    )


# ---------------------------------------------------------------------
# Pointwise coverage oracle for interval merging
# ---------------------------------------------------------------------

def minute_grid(window: ReleaseWindow) -> np.ndarray:
    """Epoch seconds of every whole minute in [inception, ending)."""
    start = int(window.inception.timestamp())
    end = int(window.ending.timestamp())
    first = start + (-start % 60)
    return np.arange(first, end, 60, dtype=np.int64)


def pointwise_letter_coverage(
    issues: list[IssueRecord], window: ReleaseWindow, letter: str, grid: np.ndarray
) -> np.ndarray:
    """For each grid instant: is an issue of this letter open?

    Open means clipped-created <= t < clipped-resolved, the half-open
    reading under which a state's interval owns its start but not its
    end.
    """
    covered = np.zeros(len(grid), dtype=bool)
    inception = int(window.inception.timestamp())
    ending = int(window.ending.timestamp())
    for issue in issues:
        if issue.type.letter != letter or issue.resolved is None:
            continue
        start = max(int(issue.created.timestamp()), inception)
        end = min(int(issue.resolved.timestamp()), ending)
        if end > start:
            covered |= (grid >= start) & (grid < end)
    return covered


def pointwise_global_state(
    issues: list[IssueRecord], window: ReleaseWindow, grid: np.ndarray
) -> list[StateSymbol]:
    """Expected global state at each grid instant, computed directly
    from issue lifecycles: letter union, X only when no letter is open,
    Z when nothing is."""
    letter_cov = {
        letter: pointwise_letter_coverage(issues, window, letter, grid)
        for letter in ("B", "I", "F", "T", "X")
    }
    states: list[StateSymbol] = []
    for idx in range(len(grid)):
        letters = {l for l in ("B", "I", "F", "T") if letter_cov[l][idx]}
        if letters:
            states.append(StateSymbol.from_letters(letters))
        elif letter_cov["X"][idx]:
            states.append(X_STATE)
        else:
            states.append(Z_STATE)
    return states


def state_at(t: Trajectory, instant: datetime) -> StateSymbol:
    """The trajectory's state at an instant (segments own their start,
    not their end; the final segment owns its end)."""
    for seg in t.segments:
        if seg.start <= instant < seg.end:
            return seg.state
    if instant == t.segments[-1].end:
        return t.segments[-1].state
    raise ValueError(f"instant {instant} outside trajectory")


def random_issue_set(
    rng: random.Random, window: ReleaseWindow, max_issues: int = 50
) -> list[IssueRecord]:
    """Random issues of up to 4 recurrent types plus the pooled kind,
    minute-aligned so boundary cases land exactly on oracle grid
    points. Lifecycles may stick out of the window on either side."""
    letters = rng.sample(("B", "I", "F", "T"), rng.randint(1, 4))
    if rng.random() < 0.5:
        letters.append("X")
    issues: list[IssueRecord] = []
    total_minutes = int(window.duration.total_seconds()) // 60
    for i in range(rng.randint(0, max_issues)):
        letter = rng.choice(letters)
        a = rng.randint(-120, total_minutes + 120)
        b = rng.randint(-120, total_minutes + 120)
        if a > b:
            a, b = b, a
        # Touching and zero-length lifecycles are deliberately common.
        if rng.random() < 0.15:
            b = a
        issues.append(
            IssueRecord(
                id=f"RND-{i + 1}",
                type=IssueType.from_name(LETTER_TYPE_NAMES[letter]),
                created=window.inception + timedelta(minutes=a),
                resolved=window.inception + timedelta(minutes=b),
                resolution="Fixed",
                status="Closed",
            )
        )
    return issues


# ---------------------------------------------------------------------
# Layered-overlap fixture
# ---------------------------------------------------------------------

def layered_overlap_fixture() -> tuple[list[IssueRecord], ReleaseWindow, list[str]]:
    """A hand-built release exercising every state-layering rule.

    A bug open from before inception is joined by an improvement, then
    a feature; all but the feature resolve together; a documentation
    issue (pooled type) spans the middle and only surfaces between the
    feature and a task; a second bug/improvement pair closes out the
    window. Expected DSS: B, BI, BIF, F, X, T, B, BI, I.
    """
    def day(month: int, d: int) -> datetime:
        return datetime(2015, month, d, tzinfo=UTC)

    window = ReleaseWindow(release_id="fix-1.0", inception=day(1, 1), ending=day(4, 1))

    def issue(id, type_name, created, resolved):
        return IssueRecord(
            id=id,
            type=IssueType.from_name(type_name),
            created=created,
            resolved=resolved,
            resolution="Fixed",
            status="Closed",
        )

    issues = [
        issue("FIX-1", "Bug", datetime(2014, 12, 1, tzinfo=UTC), day(2, 1)),
        issue("FIX-2", "Improvement", day(1, 10), day(2, 1)),
        issue("FIX-3", "New Feature", day(1, 20), day(2, 10)),
        issue("FIX-4", "Documentation", day(2, 1), day(3, 1)),
        issue("FIX-5", "Task", day(2, 20), day(3, 1)),
        issue("FIX-6", "Bug", day(3, 1), day(3, 20)),
        issue("FIX-7", "Improvement", day(3, 10), day(4, 1)),
    ]
    expected_dss = ["B", "BI", "BIF", "F", "X", "T", "B", "BI", "I"]
    return issues, window, expected_dss


# ---------------------------------------------------------------------
# Clustering agreement oracle
# ---------------------------------------------------------------------

def rand_index(labels_a: dict[str, object], labels_b: dict[str, object]) -> float:
    """Fraction of item pairs on which two partitions agree (same
    cluster in both, or different in both)."""
    keys = sorted(labels_a)
    assert sorted(labels_b) == keys
    agree = 0
    total = 0
    for x, y in combinations(keys, 2):
        same_a = labels_a[x] == labels_a[y]
        same_b = labels_b[x] == labels_b[y]
        agree += same_a == same_b
        total += 1
    return agree / total if total else 1.0


# ---------------------------------------------------------------------
# Trajectory builders
# ---------------------------------------------------------------------

def make_window(days: int = 100, release_id: str = "w-1.0") -> ReleaseWindow:
    start = datetime(2015, 1, 1, tzinfo=UTC)
    return ReleaseWindow(release_id=release_id, inception=start, ending=start + timedelta(days=days))


def trajectory_from_shares(
    shares: list[tuple[StateSymbol, float]], release_id: str = "w-1.0"
) -> Trajectory:
    """Build an issues-flavor trajectory whose segments take the given
    fractions of a 100-day window (fractions must sum to 1)."""
    from retraj.model import Flavor, Segment

    window = make_window(100, release_id)
    total = window.duration.total_seconds()
    segments = []
    elapsed = 0.0
    cursor = window.inception
    for i, (state, share) in enumerate(shares):
        elapsed += share
        end = (
            window.ending
            if i == len(shares) - 1
            else window.inception + timedelta(seconds=round(total * elapsed))
        )
        segments.append(Segment(state=state, start=cursor, end=end))
        cursor = end
    return Trajectory(
        release_id=release_id, flavor=Flavor.ISSUES, segments=tuple(segments), window=window
    )


def random_distinct_state_trajectory(
    rng: random.Random, release_id: str = "w-1.0"
) -> Trajectory:
    """Random trajectory in which no state repeats, so each state's
    total duration sits in a single segment."""
    count = rng.randint(1, 10)
    states = rng.sample(FULL_ALPHABET, count)
    weights = [rng.uniform(0.2, 3.0) for _ in range(count)]
    total = sum(weights)
    return trajectory_from_shares(
        [(s, w / total) for s, w in zip(states, weights)], release_id
    )


def random_dss_states(rng: random.Random, max_len: int = 5) -> list[StateSymbol]:
    """Random adjacent-distinct state list, possibly empty."""
    length = rng.randint(0, max_len)
    out: list[StateSymbol] = []
    for _ in range(length):
        choices = [s for s in FULL_ALPHABET if not out or s != out[-1]]
        out.append(rng.choice(choices))
    return out
