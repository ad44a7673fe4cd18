"""
Commits-based release trajectories: each commit is annotated with the
type of the issue it references, runs of equal annotations merge into
segments, and duration is measured in commits rather than wall time.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ingest import CommitRecord
from .model import (
    Flavor,
    IssueRecord,
    ReleaseWindow,
    RetrajError,
    Segment,
    StateSymbol,
    Trajectory,
    X_STATE,
)
from .trajectory import sample_positions


class NoTaggedCommits(RetrajError):
    """Raised when a release window contains no commit that references
    a selected issue."""

    def __init__(self, release_id: str) -> None:
        super().__init__(f"release {release_id}: no commits reference a selected issue")
        self.release_id = release_id


@dataclass(frozen=True, slots=True)
class CommitAnnotation:
    """One kept commit and the state its referenced issue maps to."""

    commit_hash: str
    issue_id: str
    state: StateSymbol


def annotate_commits(
    commits: list[CommitRecord],
    issues: list[IssueRecord],
    window: ReleaseWindow,
) -> list[CommitAnnotation]:
    """Keep the window's commits that reference a selected issue, in
    timestamp order, annotated by issue type.

    A commit referencing several issues (a tangled commit) counts once,
    under the first issue id appearing in its message. Issues of a
    non-recurrent type annotate the commit with X; sub-tasks never
    reach this point because selection drops them.
    """
    by_id = {issue.id: issue for issue in issues}
    kept: list[CommitAnnotation] = []
    for commit in sorted(commits, key=lambda c: (c.timestamp, c.hash)):
        if not window.inception <= commit.timestamp <= window.ending:
            continue
        for issue_id in commit.tagged_issue_ids:
            issue = by_id.get(issue_id)
            if issue is None or issue.type.letter is None:
                continue
            letter = issue.type.letter
            state = X_STATE if letter == "X" else StateSymbol.from_letters((letter,))
            kept.append(CommitAnnotation(commit_hash=commit.hash, issue_id=issue_id, state=state))
            break
    return kept


def build_commit_trajectory(
    commits: list[CommitRecord],
    issues: list[IssueRecord],
    window: ReleaseWindow,
) -> Trajectory:
    """Merge runs of equally-annotated commits into segments indexed by
    commit position (0-based, end exclusive). Only atomic states occur:
    one commit references one issue, so no concurrency arises."""
    annotations = annotate_commits(commits, issues, window)
    if not annotations:
        raise NoTaggedCommits(window.release_id)
    segments: list[Segment] = []
    run_state = annotations[0].state
    run_start = 0
    for idx, note in enumerate(annotations[1:], start=1):
        if note.state != run_state:
            segments.append(Segment(state=run_state, start=run_start, end=idx))
            run_state, run_start = note.state, idx
    segments.append(Segment(state=run_state, start=run_start, end=len(annotations)))
    return Trajectory(
        release_id=window.release_id,
        flavor=Flavor.COMMITS,
        segments=tuple(segments),
        window=window,
    )


def normalize_commits(t: Trajectory, positions: int = 100) -> list[StateSymbol]:
    """Equal-length view of a commits-based trajectory, midpoint-sampled
    over commit indices."""
    if t.flavor is not Flavor.COMMITS:
        raise ValueError("normalize_commits expects a commits-based trajectory")
    return sample_positions(t, positions)


def tangled_commit_count(commits: list[CommitRecord]) -> int:
    """Commits referencing more than one issue."""
    return sum(1 for c in commits if len(c.tagged_issue_ids) > 1)
