"""
Trajectory dissimilarity: substitution costs derived from transition
rates, Optimal Matching edit distance, and pairwise distance matrices.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .model import RetrajError, StateSymbol, render_state
from .seqstats import TransitionMatrix


class UnknownSymbol(RetrajError):
    """Raised when a sequence contains a state missing from the
    substitution cost matrix's alphabet."""

    def __init__(self, symbol: StateSymbol) -> None:
        super().__init__(f"state {symbol} is not in the cost matrix alphabet")
        self.symbol = symbol


@dataclass(frozen=True)
class SubstitutionCostMatrix:
    """Symmetric per-pair substitution costs plus the indel constant."""

    alphabet: tuple[StateSymbol, ...]
    costs: np.ndarray
    indel: float

    def __post_init__(self) -> None:
        n = len(self.alphabet)
        if self.costs.shape != (n, n):
            raise ValueError("cost matrix shape does not match alphabet")
        if self.indel < 0:
            raise ValueError("indel cost must be non-negative")

    def index_of(self, state: StateSymbol) -> int:
        try:
            return self.alphabet.index(state)
        except ValueError:
            raise UnknownSymbol(state) from None

    def cost(self, a: StateSymbol, b: StateSymbol) -> float:
        return float(self.costs[self.index_of(a), self.index_of(b)])


def scm_from_rates(
    tm: TransitionMatrix,
    indel: float = 1.0,
    alphabet: Iterable[StateSymbol] | None = None,
) -> SubstitutionCostMatrix:
    """Derive substitution costs from switch probabilities:
    cost(i, j) = 2 - rate(j -> i) - rate(i -> j), floored at 0.

    Rarely-observed switches therefore cost close to the maximum of 2.
    States in `alphabet` that the rate matrix never observed get cost 2
    against everything (and 0 against themselves).
    """
    symbols: set[StateSymbol] = set(tm.alphabet)
    if alphabet is not None:
        symbols.update(alphabet)
    ordered = tuple(sorted(symbols, key=StateSymbol.sort_key))
    n = len(ordered)
    costs = np.full((n, n), 2.0)
    tm_index = {state: i for i, state in enumerate(tm.alphabet)}
    for i, a in enumerate(ordered):
        for j, b in enumerate(ordered):
            ti = tm_index.get(a)
            tj = tm_index.get(b)
            if ti is not None and tj is not None:
                costs[i, j] = max(0.0, 2.0 - tm.rates[tj, ti] - tm.rates[ti, tj])
    np.fill_diagonal(costs, 0.0)
    return SubstitutionCostMatrix(alphabet=ordered, costs=costs, indel=indel)


def om_distance(
    a: Sequence[StateSymbol], b: Sequence[StateSymbol], scm: SubstitutionCostMatrix
) -> float:
    """Minimal total cost of insertions, deletions, and substitutions
    transforming sequence a into sequence b.

    Classic (|a|+1) x (|b|+1) edit-distance table, evaluated row by row.
    Within a row, cur[j] = min over l <= j of (m[l] + (j - l) * indel)
    where m holds the up/diagonal candidates, which a single cumulative
    minimum over (m - j*indel) computes exactly.
    """
    a_idx = np.array([scm.index_of(s) for s in a], dtype=np.intp)
    b_idx = np.array([scm.index_of(s) for s in b], dtype=np.intp)
    indel = scm.indel
    if len(a_idx) == 0:
        return float(len(b_idx) * indel)
    if len(b_idx) == 0:
        return float(len(a_idx) * indel)
    ramp = indel * np.arange(len(b_idx) + 1)
    prev = ramp.copy()
    m = np.empty(len(b_idx) + 1)
    for ai in a_idx:
        sub_row = scm.costs[ai]
        m[0] = prev[0] + indel
        np.minimum(prev[1:] + indel, prev[:-1] + sub_row[b_idx], out=m[1:])
        prev = np.minimum.accumulate(m - ramp) + ramp
    return float(prev[-1])


@dataclass(frozen=True)
class DistanceMatrix:
    """Pairwise trajectory distances: symmetric, zero diagonal."""

    release_ids: tuple[str, ...]
    distances: np.ndarray

    def index_of(self, release_id: str) -> int:
        return self.release_ids.index(release_id)

    def between(self, a: str, b: str) -> float:
        return float(self.distances[self.index_of(a), self.index_of(b)])


def distance_matrix(
    seqs: dict[str, Sequence[StateSymbol]], scm: SubstitutionCostMatrix
) -> DistanceMatrix:
    """Pairwise om_distance over a release-keyed corpus. Only the upper
    triangle is evaluated, then mirrored. Rows follow sorted release
    ids so output ordering never depends on dict insertion order."""
    ids = tuple(sorted(seqs))
    n = len(ids)
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            d = om_distance(seqs[ids[i]], seqs[ids[j]], scm)
            out[i, j] = d
            out[j, i] = d
    return DistanceMatrix(release_ids=ids, distances=out)


# ---------------------------------------------------------------------
# Emission
# ---------------------------------------------------------------------

def distance_matrix_to_csv(dm: DistanceMatrix) -> str:
    """Full symmetric matrix with release-id header row and column,
    6 decimal places."""
    lines = ["release_id," + ",".join(dm.release_ids)]
    for i, release_id in enumerate(dm.release_ids):
        cells = ",".join(f"{dm.distances[i, j]:.6f}" for j in range(len(dm.release_ids)))
        lines.append(f"{release_id},{cells}")
    return "\n".join(lines) + "\n"


def distance_matrix_to_json(dm: DistanceMatrix) -> str:
    doc = {
        "release_ids": list(dm.release_ids),
        "distances": [
            [round(float(v), 6) for v in row] for row in dm.distances
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def scm_to_json(scm: SubstitutionCostMatrix) -> str:
    doc = {
        "alphabet": [render_state(s) for s in scm.alphabet],
        "costs": [[round(float(v), 6) for v in row] for row in scm.costs],
        "indel": scm.indel,
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
