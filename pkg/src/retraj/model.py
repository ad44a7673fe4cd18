"""
Core domain model: issue records, release windows, the 17-symbol state
alphabet, and trajectory containers shared by every other module.

All values here are immutable after construction and safe to share
across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from enum import Enum
from typing import Iterable

# Canonical letter order for rendering and sorting. B before I before F
# before T, always ("BIF", never "FIB").
LETTER_ORDER = "BIFT"

_LETTER_RANK = {letter: i for i, letter in enumerate(LETTER_ORDER)}


class RetrajError(Exception):
    """Base class for all errors raised by this package."""


# ---------------------------------------------------------------------
# Issue types
# ---------------------------------------------------------------------

class IssueKind(Enum):
    BUG = "Bug"
    IMPROVEMENT = "Improvement"
    NEW_FEATURE = "New Feature"
    TASK = "Task"
    SUB_TASK = "Sub-task"
    OTHER = "Other"


# The four kinds that are modeled individually with their own letter.
RECURRENT_KINDS = frozenset(
    {IssueKind.BUG, IssueKind.IMPROVEMENT, IssueKind.NEW_FEATURE, IssueKind.TASK}
)

_KIND_LETTER = {
    IssueKind.BUG: "B",
    IssueKind.IMPROVEMENT: "I",
    IssueKind.NEW_FEATURE: "F",
    IssueKind.TASK: "T",
}

_NORMALIZED_KIND = {
    "bug": IssueKind.BUG,
    "improvement": IssueKind.IMPROVEMENT,
    "newfeature": IssueKind.NEW_FEATURE,
    "task": IssueKind.TASK,
    "subtask": IssueKind.SUB_TASK,
}


@dataclass(frozen=True, slots=True)
class IssueType:
    """A tracker issue type: one of the four recurrent kinds, Sub-task,
    or Other with the original tracker name preserved for reporting."""

    kind: IssueKind
    name: str

    @classmethod
    def from_name(cls, name: str) -> "IssueType":
        """Map a tracker type name to an IssueType.

        Matching is insensitive to case, spaces, hyphens, and
        underscores ("New Feature", "new-feature", "NewFeature" all
        map to the same kind). Unknown names become Other(name).
        """
        normalized = "".join(ch for ch in name.lower() if ch.isalnum())
        kind = _NORMALIZED_KIND.get(normalized, IssueKind.OTHER)
        return cls(kind=kind, name=name)

    @property
    def is_recurrent(self) -> bool:
        return self.kind in RECURRENT_KINDS

    @property
    def letter(self) -> str | None:
        """State letter for this type: B/I/F/T for recurrent kinds, the
        virtual letter X for pooled non-recurrent kinds, None for
        Sub-task (never mapped to a state)."""
        if self.kind in _KIND_LETTER:
            return _KIND_LETTER[self.kind]
        if self.kind is IssueKind.OTHER:
            return "X"
        return None


# ---------------------------------------------------------------------
# Timestamps
# ---------------------------------------------------------------------

def parse_timestamp(text: str) -> datetime:
    """Parse an RFC 3339 timestamp into an aware UTC datetime.

    Sub-second precision is truncated; seconds suffice for day/week
    scale trajectories. Naive timestamps are rejected.
    """
    raw = text.strip()
    if raw.endswith(("Z", "z")):
        raw = raw[:-1] + "+00:00"
    dt = datetime.fromisoformat(raw)
    if dt.tzinfo is None:
        raise ValueError(f"timestamp has no UTC offset: {text!r}")
    return dt.astimezone(timezone.utc).replace(microsecond=0)


def format_timestamp(dt: datetime) -> str:
    return dt.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


# ---------------------------------------------------------------------
# Issues and release windows
# ---------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class IssueRecord:
    """One tracked issue, as ingested from an issue export."""

    id: str
    type: IssueType
    created: datetime
    resolved: datetime | None
    resolution: str | None
    status: str
    parent_id: str | None = None

    def __post_init__(self) -> None:
        if self.resolved is not None and self.resolved < self.created:
            raise ValueError(
                f"issue {self.id}: resolved {self.resolved} precedes created {self.created}"
            )


@dataclass(frozen=True, slots=True)
class ReleaseWindow:
    """A release id plus the inception/ending timestamps delimiting
    its development iteration."""

    release_id: str
    inception: datetime
    ending: datetime

    def __post_init__(self) -> None:
        if self.ending <= self.inception:
            raise ValueError(
                f"release {self.release_id}: ending {self.ending} not after "
                f"inception {self.inception}"
            )

    @property
    def duration(self) -> timedelta:
        return self.ending - self.inception


# ---------------------------------------------------------------------
# State alphabet
# ---------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class StateSymbol:
    """One element of the state alphabet.

    Exactly one of: a non-empty canonical-ordered subset of B/I/F/T
    letters (15 possibilities), the pooled non-recurrent state X, or
    the clean state Z. 17 symbols in total.
    """

    letters: tuple[str, ...] = ()
    special: str | None = None

    def __post_init__(self) -> None:
        if self.special is not None:
            if self.special not in ("X", "Z"):
                raise ValueError(f"unknown special state {self.special!r}")
            if self.letters:
                raise ValueError("special states carry no letters")
        else:
            if not self.letters:
                raise ValueError("letter state needs at least one letter")
            expected = tuple(l for l in LETTER_ORDER if l in self.letters)
            if expected != self.letters or len(set(self.letters)) != len(self.letters):
                raise ValueError(f"letters not canonical: {self.letters!r}")
            for letter in self.letters:
                if letter not in _LETTER_RANK:
                    raise ValueError(f"unknown letter {letter!r}")

    @classmethod
    def from_letters(cls, letters: Iterable[str]) -> "StateSymbol":
        unique = set(letters)
        return cls(letters=tuple(l for l in LETTER_ORDER if l in unique))

    @property
    def complexity(self) -> int:
        """Number of issue types involved: |letters| for letter states,
        1 for X, 0 for Z."""
        if self.special == "Z":
            return 0
        if self.special == "X":
            return 1
        return len(self.letters)

    @property
    def is_letter_state(self) -> bool:
        return self.special is None

    def sort_key(self) -> tuple:
        """Canonical ordering: B < I < F < T < multi-letter states by
        rendered text < X < Z."""
        if self.special == "Z":
            return (3, "")
        if self.special == "X":
            return (2, "")
        if len(self.letters) == 1:
            return (0, _LETTER_RANK[self.letters[0]])
        return (1, render_state(self))

    def __str__(self) -> str:
        return render_state(self)


X_STATE = StateSymbol(special="X")
Z_STATE = StateSymbol(special="Z")


def state_union(a: StateSymbol, b: StateSymbol) -> StateSymbol:
    """Combine two concurrent states into the global state they form.

    Letter sets union; X is absorbed by any letter state; Z is the
    neutral element; X with Z gives X.
    """
    if a.special == "Z":
        return b
    if b.special == "Z":
        return a
    if a.special == "X":
        return b
    if b.special == "X":
        return a
    return StateSymbol.from_letters(set(a.letters) | set(b.letters))


def render_state(s: StateSymbol) -> str:
    """Canonical text for a state: letters in B,I,F,T order, or the
    special letter X / Z."""
    if s.special is not None:
        return s.special
    return "".join(s.letters)


def parse_state(text: str) -> StateSymbol:
    """Inverse of render_state; accepts letters in any order but
    rejects duplicates, unknown characters, and mixed specials."""
    if text == "X":
        return X_STATE
    if text == "Z":
        return Z_STATE
    if not text:
        raise ValueError("empty state text")
    seen: set[str] = set()
    for ch in text:
        if ch not in _LETTER_RANK:
            raise ValueError(f"unknown state letter {ch!r} in {text!r}")
        if ch in seen:
            raise ValueError(f"duplicate letter {ch!r} in {text!r}")
        seen.add(ch)
    return StateSymbol.from_letters(seen)


def _all_symbols() -> tuple[StateSymbol, ...]:
    from itertools import combinations

    symbols = []
    for size in (1, 2, 3, 4):
        for combo in combinations(LETTER_ORDER, size):
            symbols.append(StateSymbol(letters=combo))
    symbols.append(X_STATE)
    symbols.append(Z_STATE)
    return tuple(sorted(symbols, key=StateSymbol.sort_key))


#: The full 17-symbol alphabet in canonical order. Both X and Z are kept
#: in the alphabet; empirical matrices show which symbols actually occur.
FULL_ALPHABET: tuple[StateSymbol, ...] = _all_symbols()


# ---------------------------------------------------------------------
# Trajectories
# ---------------------------------------------------------------------

class Flavor(Enum):
    ISSUES = "issues"
    COMMITS = "commits"


@dataclass(frozen=True, slots=True)
class Segment:
    """One maximal run of a single state. Bounds are UTC timestamps for
    issues-based trajectories and commit indices (end exclusive) for
    commits-based ones."""

    state: StateSymbol
    start: datetime | int
    end: datetime | int

    def __post_init__(self) -> None:
        if self.end <= self.start:
            raise ValueError(f"segment {self.state}: end {self.end} not after start {self.start}")


@dataclass(frozen=True, slots=True)
class Trajectory:
    """The ordered, timed sequence of states of one release."""

    release_id: str
    flavor: Flavor
    segments: tuple[Segment, ...]
    window: ReleaseWindow

    def __post_init__(self) -> None:
        if not self.segments:
            raise ValueError(f"trajectory {self.release_id}: no segments")
        for prev, cur in zip(self.segments, self.segments[1:]):
            if prev.end != cur.start:
                raise ValueError(
                    f"trajectory {self.release_id}: gap between {prev.end} and {cur.start}"
                )
            if prev.state == cur.state:
                raise ValueError(
                    f"trajectory {self.release_id}: adjacent segments share state {prev.state}"
                )
        if self.flavor is Flavor.ISSUES:
            if self.segments[0].start != self.window.inception:
                raise ValueError(f"trajectory {self.release_id}: does not start at inception")
            if self.segments[-1].end != self.window.ending:
                raise ValueError(f"trajectory {self.release_id}: does not end at window ending")
        else:
            if self.segments[0].start != 0:
                raise ValueError(f"trajectory {self.release_id}: commit indices must start at 0")

    @property
    def duration(self) -> timedelta | int:
        """Window span for issues-based, kept-commit count for
        commits-based."""
        if self.flavor is Flavor.ISSUES:
            return self.window.duration
        return self.segments[-1].end

    @property
    def transition_count(self) -> int:
        return len(self.segments) - 1


@dataclass(frozen=True, slots=True)
class DssSequence:
    """Distinct-successive-state reduction of a trajectory: the state
    sequence with durations dropped; adjacent states always differ."""

    release_id: str
    states: tuple[StateSymbol, ...]

    def __post_init__(self) -> None:
        if not self.states:
            raise ValueError(f"DSS {self.release_id}: empty")
        for prev, cur in zip(self.states, self.states[1:]):
            if prev == cur:
                raise ValueError(f"DSS {self.release_id}: adjacent duplicate {prev}")

    def __len__(self) -> int:
        return len(self.states)

    def rendered(self) -> tuple[str, ...]:
        return tuple(render_state(s) for s in self.states)
