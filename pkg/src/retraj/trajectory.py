"""
Issues-based release trajectory construction: per-type atomic states,
the global state sequence between transitions, duration normalization,
and the DSS (distinct-successive-state) reduction.
"""

from __future__ import annotations

import json
from bisect import bisect_right
from dataclasses import dataclass
from datetime import datetime

from .model import (
    DssSequence,
    Flavor,
    IssueRecord,
    ReleaseWindow,
    Segment,
    StateSymbol,
    Trajectory,
    X_STATE,
    Z_STATE,
    format_timestamp,
    parse_state,
    parse_timestamp,
)

# Letters that form their own atomic states; all non-recurrent types
# pool into the virtual letter X.
ATOMIC_LETTERS = ("B", "I", "F", "T", "X")


@dataclass(frozen=True, slots=True)
class AtomicState:
    """A maximal interval during which at least one issue of one type is
    open: overlapping issue lifecycles of that type, merged."""

    type_letter: str
    open_t: datetime
    close_t: datetime
    member_issue_ids: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.close_t <= self.open_t:
            raise ValueError(f"atomic state {self.type_letter}: empty interval at {self.open_t}")

    def covers(self, start: datetime, end: datetime) -> bool:
        return self.open_t <= start and self.close_t >= end


def build_atomic_states(
    issues: list[IssueRecord], window: ReleaseWindow
) -> dict[str, list[AtomicState]]:
    """Group each type's issues into atomic states by merging lifecycles
    that overlap (touching endpoints count as overlapping).

    Expects issues already selected for this window. Intervals are
    clipped to [inception, ending]; an issue created before inception
    contributes from inception. Zero-length merged groups are dropped
    (they cannot form a state with positive duration).
    """
    intervals: dict[str, list[tuple[datetime, datetime, str]]] = {
        letter: [] for letter in ATOMIC_LETTERS
    }
    for issue in issues:
        letter = issue.type.letter
        if letter is None or issue.resolved is None:
            continue
        start = max(issue.created, window.inception)
        end = min(issue.resolved, window.ending)
        if end < start:
            continue
        intervals[letter].append((start, end, issue.id))

    atomics: dict[str, list[AtomicState]] = {letter: [] for letter in ATOMIC_LETTERS}
    for letter, items in intervals.items():
        items.sort(key=lambda iv: (iv[0], iv[1], iv[2]))
        group_start: datetime | None = None
        group_end: datetime | None = None
        members: list[str] = []
        runs: list[tuple[datetime, datetime, list[str]]] = []
        for start, end, issue_id in items:
            if group_start is None:
                group_start, group_end, members = start, end, [issue_id]
            elif start <= group_end:
                group_end = max(group_end, end)
                members.append(issue_id)
            else:
                runs.append((group_start, group_end, members))
                group_start, group_end, members = start, end, [issue_id]
        if group_start is not None:
            runs.append((group_start, group_end, members))
        for start, end, ids in runs:
            if end > start:
                atomics[letter].append(
                    AtomicState(
                        type_letter=letter,
                        open_t=start,
                        close_t=end,
                        member_issue_ids=tuple(ids),
                    )
                )
    return atomics


def build_trajectory(
    atomics: dict[str, list[AtomicState]], window: ReleaseWindow, release_id: str | None = None
) -> Trajectory:
    """Merge atomic transitions into the global state sequence.

    Between two consecutive transition timestamps, the global state is
    the union of the letters whose atomic states cover the interval. X
    imposes the state only where no letter state is active; Z marks
    intervals where nothing is open at all.
    """
    if release_id is None:
        release_id = window.release_id
    timestamps = {window.inception, window.ending}
    for states in atomics.values():
        for atomic in states:
            timestamps.add(atomic.open_t)
            timestamps.add(atomic.close_t)
    cuts = sorted(t for t in timestamps if window.inception <= t <= window.ending)

    segments: list[Segment] = []
    for start, end in zip(cuts, cuts[1:]):
        state: StateSymbol = Z_STATE
        letters = {
            letter
            for letter in ("B", "I", "F", "T")
            for atomic in atomics.get(letter, ())
            if atomic.covers(start, end)
        }
        if letters:
            state = StateSymbol.from_letters(letters)
        elif any(a.covers(start, end) for a in atomics.get("X", ())):
            state = X_STATE
        if segments and segments[-1].state == state:
            segments[-1] = Segment(state=state, start=segments[-1].start, end=end)
        else:
            segments.append(Segment(state=state, start=start, end=end))
    return Trajectory(
        release_id=release_id, flavor=Flavor.ISSUES, segments=tuple(segments), window=window
    )


def issues_trajectory(
    issues: list[IssueRecord], window: ReleaseWindow
) -> Trajectory:
    """Convenience: atomic states plus global trajectory in one step."""
    return build_trajectory(build_atomic_states(issues, window), window)


# ---------------------------------------------------------------------
# Normalization and DSS
# ---------------------------------------------------------------------

def _segment_offsets(t: Trajectory) -> tuple[list[float], list[StateSymbol], float, float]:
    """Segment end offsets (numeric trajectory-time), their states, and
    the overall [origin, span]."""
    if t.flavor is Flavor.ISSUES:
        origin_dt = t.segments[0].start
        ends = [(seg.end - origin_dt).total_seconds() for seg in t.segments]
        span = (t.segments[-1].end - origin_dt).total_seconds()
    else:
        ends = [float(seg.end) for seg in t.segments]
        span = float(t.segments[-1].end)
    return ends, [seg.state for seg in t.segments], 0.0, span


def sample_positions(t: Trajectory, positions: int) -> list[StateSymbol]:
    """Midpoint sampling: position k holds the state active at offset
    (k + 0.5) / positions of the trajectory span."""
    if positions < 1:
        raise ValueError("positions must be positive")
    ends, states, origin, span = _segment_offsets(t)
    out: list[StateSymbol] = []
    for k in range(positions):
        sample = origin + (k + 0.5) / positions * span
        idx = min(bisect_right(ends, sample), len(states) - 1)
        out.append(states[idx])
    return out


def normalize(t: Trajectory, positions: int = 100) -> list[StateSymbol]:
    """Equal-length view of an issues-based trajectory so that state
    durations are proportional to the release duration."""
    if t.flavor is not Flavor.ISSUES:
        raise ValueError("normalize expects an issues-based trajectory")
    return sample_positions(t, positions)


def to_dss(t: Trajectory) -> DssSequence:
    """Drop durations: the state of each segment, in order."""
    return DssSequence(release_id=t.release_id, states=tuple(seg.state for seg in t.segments))


# ---------------------------------------------------------------------
# Trajectory (de)serialization
# ---------------------------------------------------------------------

def trajectory_to_json(t: Trajectory) -> str:
    def encode(value: datetime | int) -> str | int:
        return format_timestamp(value) if isinstance(value, datetime) else value

    doc = {
        "release_id": t.release_id,
        "flavor": t.flavor.value,
        "window": {
            "inception": format_timestamp(t.window.inception),
            "ending": format_timestamp(t.window.ending),
        },
        "segments": [
            {"state": str(seg.state), "start": encode(seg.start), "end": encode(seg.end)}
            for seg in t.segments
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def trajectory_from_json(text: str) -> Trajectory:
    doc = json.loads(text)
    flavor = Flavor(doc["flavor"])
    window = ReleaseWindow(
        release_id=doc["release_id"],
        inception=parse_timestamp(doc["window"]["inception"]),
        ending=parse_timestamp(doc["window"]["ending"]),
    )

    def decode(value: str | int) -> datetime | int:
        return parse_timestamp(value) if isinstance(value, str) else int(value)

    segments = tuple(
        Segment(state=parse_state(seg["state"]), start=decode(seg["start"]), end=decode(seg["end"]))
        for seg in doc["segments"]
    )
    return Trajectory(
        release_id=doc["release_id"], flavor=flavor, segments=segments, window=window
    )
