"""
Summary statistics over trajectory corpora: per-trajectory properties,
transition-rate matrices, modal-state trajectories, and DSS frequency
tables.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from datetime import timedelta

import numpy as np

from .model import (
    DssSequence,
    Flavor,
    RetrajError,
    StateSymbol,
    Trajectory,
    render_state,
)


class EmptyCorpus(RetrajError):
    """Raised when a statistic is requested over zero sequences."""


# ---------------------------------------------------------------------
# Per-trajectory summary
# ---------------------------------------------------------------------

@dataclass(frozen=True)
class TrajectorySummary:
    """Distinct states, transition count, and per-state total duration
    of one trajectory. Durations are timedeltas for issues-based
    trajectories and commit counts for commits-based ones."""

    release_id: str
    states: tuple[StateSymbol, ...]
    transition_count: int
    durations: dict[StateSymbol, timedelta | int]


def summarize(t: Trajectory) -> TrajectorySummary:
    zero: timedelta | int = timedelta(0) if t.flavor is Flavor.ISSUES else 0
    durations: dict[StateSymbol, timedelta | int] = {}
    for seg in t.segments:
        durations[seg.state] = durations.get(seg.state, zero) + (seg.end - seg.start)
    states = tuple(sorted(durations, key=StateSymbol.sort_key))
    return TrajectorySummary(
        release_id=t.release_id,
        states=states,
        transition_count=t.transition_count,
        durations=durations,
    )


# ---------------------------------------------------------------------
# Transition rates
# ---------------------------------------------------------------------

@dataclass(frozen=True)
class TransitionMatrix:
    """Row-stochastic switch probabilities between observed states.

    Rows whose state never has a successor are all-zero rather than
    uniform, so support is always recoverable from the counts."""

    alphabet: tuple[StateSymbol, ...]
    rates: np.ndarray
    support: np.ndarray

    def index_of(self, state: StateSymbol) -> int | None:
        try:
            return self.alphabet.index(state)
        except ValueError:
            return None

    def rate(self, source: StateSymbol, target: StateSymbol) -> float:
        i = self.index_of(source)
        j = self.index_of(target)
        if i is None or j is None:
            return 0.0
        return float(self.rates[i, j])


def transition_rates(seqs: list[DssSequence]) -> TransitionMatrix:
    """Estimate switch probabilities from adjacent-pair counts across
    the corpus. On DSS input the diagonal is structurally zero."""
    if not seqs:
        raise EmptyCorpus("transition rates need at least one sequence")
    observed: set[StateSymbol] = set()
    for seq in seqs:
        observed.update(seq.states)
    alphabet = tuple(sorted(observed, key=StateSymbol.sort_key))
    index = {state: i for i, state in enumerate(alphabet)}
    support = np.zeros((len(alphabet), len(alphabet)), dtype=np.int64)
    for seq in seqs:
        for src, dst in zip(seq.states, seq.states[1:]):
            support[index[src], index[dst]] += 1
    rates = np.zeros_like(support, dtype=np.float64)
    row_totals = support.sum(axis=1)
    nonzero = row_totals > 0
    rates[nonzero] = support[nonzero] / row_totals[nonzero, np.newaxis]
    return TransitionMatrix(alphabet=alphabet, rates=rates, support=support)


# ---------------------------------------------------------------------
# Modal trajectory
# ---------------------------------------------------------------------

@dataclass(frozen=True)
class ModalPosition:
    state: StateSymbol
    frequency: float
    support: int
    denominator: int


@dataclass(frozen=True)
class ModalTrajectory:
    positions: tuple[ModalPosition, ...]

    def states(self) -> tuple[StateSymbol, ...]:
        return tuple(p.state for p in self.positions)


def modal_trajectory(seqs: list[list[StateSymbol]]) -> ModalTrajectory:
    """Most frequent state at each position.

    Accepts equal-length (normalized) input or ragged (DSS) input; a
    position's denominator is the number of sequences long enough to
    reach it, so ragged corpora stay well-defined. Ties go to the
    canonically smallest state.
    """
    if not seqs:
        raise EmptyCorpus("modal trajectory needs at least one sequence")
    length = max(len(seq) for seq in seqs)
    positions: list[ModalPosition] = []
    for p in range(length):
        column = [seq[p] for seq in seqs if len(seq) > p]
        counts = Counter(column)
        best = min(counts, key=lambda s: (-counts[s], s.sort_key()))
        positions.append(
            ModalPosition(
                state=best,
                frequency=counts[best] / len(column),
                support=counts[best],
                denominator=len(column),
            )
        )
    return ModalTrajectory(positions=tuple(positions))


# ---------------------------------------------------------------------
# DSS frequency table
# ---------------------------------------------------------------------

@dataclass(frozen=True)
class DssFrequencyEntry:
    states: tuple[StateSymbol, ...]
    count: int
    cumulative_ratio: float


def dss_frequency(seqs: list[DssSequence]) -> list[DssFrequencyEntry]:
    """Exact-match grouping of DSS shapes, most frequent first, with
    cumulative ratio over the whole corpus. Equal counts are ordered by
    rendered text so the table is deterministic."""
    counts: Counter[tuple[StateSymbol, ...]] = Counter(seq.states for seq in seqs)
    total = len(seqs)
    ordered = sorted(
        counts.items(),
        key=lambda item: (-item[1], tuple(render_state(s) for s in item[0])),
    )
    entries: list[DssFrequencyEntry] = []
    running = 0
    for states, count in ordered:
        running += count
        entries.append(
            DssFrequencyEntry(states=states, count=count, cumulative_ratio=running / total)
        )
    return entries
