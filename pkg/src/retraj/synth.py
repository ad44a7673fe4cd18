"""
Deterministic synthetic corpus generator.

Plants six trajectory families (48 releases) plus 36 background
releases, realized as a JIRA-style issue export, a commit log with
release-boundary marker commits, and a release manifest. Family
membership is written alongside so recovery tests can score clustering
against the planted truth.
"""

from __future__ import annotations

import argparse
import json
import random
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from pathlib import Path

from .ingest import CommitRecord, manifest_to_json, ReleaseManifest, tag_commits
from .model import (
    FULL_ALPHABET,
    IssueRecord,
    IssueType,
    ReleaseWindow,
    StateSymbol,
    Z_STATE,
    format_timestamp,
    parse_state,
)

DEFAULT_SEED = 20848

_BASE = datetime(2015, 1, 1, tzinfo=timezone.utc)
_RELEASE_SPACING = timedelta(days=30)
_RELEASE_LENGTH = timedelta(days=25)

# Pooled (non-recurrent) type names cycled for X segments.
_POOLED_TYPES = ("Documentation", "Wish", "Test")

_UNTAGGED_MESSAGES = (
    "polish build scripts",
    "update changelog",
    "bump dependency versions",
    "tidy whitespace",
    "regenerate docs site",
)

# Family shapes: state text plus nominal boundary fractions between
# segments; generation jitters each interior boundary a little so
# members differ without leaving the family.
_FAMILIES: tuple[tuple[str, int, tuple[str, ...], tuple[float, ...]], ...] = (
    ("late_bug", 14, ("Z", "B"), (0.65,)),
    ("steady_improvement", 10, ("I",), ()),
    ("complex_start", 8, ("BIFT", "BI", "B"), (0.28, 0.65)),
    ("feature_then_task", 6, ("F", "FT", "T", "Z"), (0.25, 0.5, 0.8)),
    ("support_sandwich", 5, ("X", "B", "X"), (0.3, 0.65)),
    ("oscillating_fix", 5, ("B", "I", "B", "I"), (0.25, 0.5, 0.75)),
)

_BACKGROUND_COUNT = 36
_BOUNDARY_JITTER = 0.04

BACKGROUND = "background"


@dataclass(frozen=True)
class SynthCorpus:
    """Generated corpus plus the planted truth."""

    windows: tuple[ReleaseWindow, ...]
    issues: tuple[IssueRecord, ...]
    commits: tuple[CommitRecord, ...]
    family_of: dict[str, str]
    planted_dss: dict[str, tuple[str, ...]]

    def family_members(self) -> dict[str, tuple[str, ...]]:
        """Planted family name -> sorted member release ids, background
        releases excluded."""
        out: dict[str, list[str]] = {}
        for release_id, family in self.family_of.items():
            if family != BACKGROUND:
                out.setdefault(family, []).append(release_id)
        return {name: tuple(sorted(ids)) for name, ids in out.items()}

    def write(self, directory: Path) -> None:
        directory.mkdir(parents=True, exist_ok=True)
        with open(directory / "issues.jsonl", "w", encoding="utf-8") as fh:
            for issue in self.issues:
                fh.write(
                    json.dumps(
                        {
                            "id": issue.id,
                            "type": issue.type.name,
                            "created": format_timestamp(issue.created),
                            "resolved": None
                            if issue.resolved is None
                            else format_timestamp(issue.resolved),
                            "resolution": issue.resolution,
                            "status": issue.status,
                            "parent": issue.parent_id,
                        },
                        sort_keys=True,
                    )
                    + "\n"
                )
        with open(directory / "commits.jsonl", "w", encoding="utf-8") as fh:
            for commit in self.commits:
                fh.write(
                    json.dumps(
                        {
                            "hash": commit.hash,
                            "timestamp": format_timestamp(commit.timestamp),
                            "message": commit.message,
                        },
                        sort_keys=True,
                    )
                    + "\n"
                )
        manifest = ReleaseManifest.build(list(self.windows))
        (directory / "manifest.json").write_text(manifest_to_json(manifest), encoding="utf-8")
        truth = {
            "family_of": dict(sorted(self.family_of.items())),
            "planted_dss": {k: list(v) for k, v in sorted(self.planted_dss.items())},
        }
        (directory / "truth.json").write_text(
            json.dumps(truth, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )


def _segment_bounds(
    window: ReleaseWindow, fractions: list[float]
) -> list[tuple[datetime, datetime]]:
    """Cut the window at the given interior fractions, on whole-second
    boundaries."""
    total = int(window.duration.total_seconds())
    cuts = [0] + [int(f * total) for f in fractions] + [total]
    return [
        (window.inception + timedelta(seconds=a), window.inception + timedelta(seconds=b))
        for a, b in zip(cuts, cuts[1:])
    ]


def _letter_for_type(letter: str) -> str:
    return {"B": "Bug", "I": "Improvement", "F": "New Feature", "T": "Task"}[letter]


def _realize_issues(
    states: list[StateSymbol],
    bounds: list[tuple[datetime, datetime]],
    next_id: list[int],
    pooled_cycle: list[int],
) -> list[IssueRecord]:
    """Materialize a planted segment sequence as issues whose lifecycle
    merging reproduces it exactly.

    Each maximal run of segments containing a letter becomes one issue
    of that type spanning the run; each maximal X run becomes one issue
    of a pooled type. Z segments stay uncovered.
    """
    issues: list[IssueRecord] = []

    def covers(state: StateSymbol, letter: str) -> bool:
        if letter == "X":
            return state.special == "X"
        return state.special is None and letter in state.letters

    for letter in ("B", "I", "F", "T", "X"):
        run_start: datetime | None = None
        run_end: datetime | None = None
        for state, (seg_start, seg_end) in zip(states, bounds):
            if covers(state, letter):
                if run_start is None:
                    run_start = seg_start
                run_end = seg_end
            elif run_start is not None:
                issues.append(_make_issue(letter, run_start, run_end, next_id, pooled_cycle))
                run_start = None
        if run_start is not None:
            issues.append(_make_issue(letter, run_start, run_end, next_id, pooled_cycle))
    return issues


def _make_issue(
    letter: str,
    start: datetime,
    end: datetime,
    next_id: list[int],
    pooled_cycle: list[int],
) -> IssueRecord:
    if letter == "X":
        type_name = _POOLED_TYPES[pooled_cycle[0] % len(_POOLED_TYPES)]
        pooled_cycle[0] += 1
    else:
        type_name = _letter_for_type(letter)
    issue_id = f"SYN-{next_id[0]}"
    next_id[0] += 1
    return IssueRecord(
        id=issue_id,
        type=IssueType.from_name(type_name),
        created=start,
        resolved=end,
        resolution="Fixed",
        status="Closed",
        parent_id=None,
    )


def _background_shape(rng: random.Random) -> tuple[list[StateSymbol], list[float]]:
    """A random trajectory shape: 3..8 segments, adjacent states
    distinct, at least one non-Z segment."""
    while True:
        count = rng.randint(3, 8)
        states: list[StateSymbol] = []
        for _ in range(count):
            candidates = [s for s in FULL_ALPHABET if not states or s != states[-1]]
            states.append(rng.choice(candidates))
        if any(s != Z_STATE for s in states):
            break
    interior = sorted(rng.uniform(0.05, 0.95) for _ in range(count - 1))
    # Enforce a minimum share per segment so no segment collapses.
    for i in range(1, len(interior)):
        interior[i] = max(interior[i], interior[i - 1] + 0.02)
    return states, interior


def _release_commits(
    window: ReleaseWindow,
    release_issues: list[IssueRecord],
    rng: random.Random,
) -> list[tuple[datetime, str]]:
    """Marker commits at the window bounds plus interior work commits,
    roughly half referencing issue ids and a few referencing two."""
    entries: list[tuple[datetime, str]] = [
        (window.inception, "[maven-release-plugin] prepare for next development iteration")
    ]
    interior: list[tuple[datetime, str]] = []
    total_seconds = int(window.duration.total_seconds())
    for _ in range(rng.randint(20, 40)):
        offset = rng.randint(1, total_seconds - 1)
        when = window.inception + timedelta(seconds=offset)
        roll = rng.random()
        if release_issues and roll < 0.52:
            issue = rng.choice(release_issues)
            if len(release_issues) > 1 and roll < 0.05:
                other = rng.choice([i for i in release_issues if i.id != issue.id])
                message = f"{issue.id} {other.id}: cross-cutting change"
            else:
                message = f"{issue.id}: work on {issue.type.name.lower()}"
        else:
            message = rng.choice(_UNTAGGED_MESSAGES)
        interior.append((when, message))
    interior.sort(key=lambda pair: pair[0])
    entries.extend(interior)
    entries.append((window.ending, f"[maven-release-plugin] prepare release {window.release_id}"))
    return entries


def generate(seed: int = DEFAULT_SEED) -> SynthCorpus:
    """Build the full corpus: 84 releases, six planted families of
    sizes 14/10/8/6/5/5 (48 releases) and 36 background releases."""
    rng = random.Random(seed)

    assignments: list[str] = []
    for name, size, _, _ in _FAMILIES:
        assignments.extend([name] * size)
    assignments.extend([BACKGROUND] * _BACKGROUND_COUNT)
    rng.shuffle(assignments)

    shapes = {name: (list(states), list(fracs)) for name, _, states, fracs in _FAMILIES}

    windows: list[ReleaseWindow] = []
    issues: list[IssueRecord] = []
    commit_entries: list[tuple[datetime, str]] = []
    family_of: dict[str, str] = {}
    planted_dss: dict[str, tuple[str, ...]] = {}
    next_id = [1]
    pooled_cycle = [0]

    for i, family in enumerate(assignments):
        release_id = f"synthkit-{i // 10 + 1}.{i % 10}.0"
        inception = _BASE + i * _RELEASE_SPACING
        window = ReleaseWindow(
            release_id=release_id, inception=inception, ending=inception + _RELEASE_LENGTH
        )
        if family == BACKGROUND:
            states, fracs = _background_shape(rng)
        else:
            shape_states, shape_fracs = shapes[family]
            states = [parse_state(s) for s in shape_states]
            fracs = [
                min(0.95, max(0.05, f + rng.uniform(-_BOUNDARY_JITTER, _BOUNDARY_JITTER)))
                for f in shape_fracs
            ]
            fracs = sorted(fracs)
            for j in range(1, len(fracs)):
                fracs[j] = max(fracs[j], fracs[j - 1] + 0.02)
        bounds = _segment_bounds(window, fracs)
        release_issues = _realize_issues(states, bounds, next_id, pooled_cycle)
        issues.extend(release_issues)
        commit_entries.extend(_release_commits(window, release_issues, rng))
        windows.append(window)
        family_of[release_id] = family
        planted_dss[release_id] = tuple(str(s) for s in states)

    commit_entries.sort(key=lambda pair: pair[0])
    commits = tag_commits(
        [
            CommitRecord(
                hash="".join(rng.choice("0123456789abcdef") for _ in range(40)),
                timestamp=when,
                message=message,
                tagged_issue_ids=(),
            )
            for when, message in commit_entries
        ]
    )
    return SynthCorpus(
        windows=tuple(windows),
        issues=tuple(issues),
        commits=tuple(commits),
        family_of=family_of,
        planted_dss=planted_dss,
    )


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="python -m retraj.synth",
        description="Generate the synthetic release corpus (issue export, "
        "commit log, manifest, planted truth).",
    )
    parser.add_argument("--output-dir", required=True, type=Path)
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    args = parser.parse_args(argv)
    corpus = generate(seed=args.seed)
    corpus.write(args.output_dir)
    print(
        f"wrote {len(corpus.windows)} releases, {len(corpus.issues)} issues, "
        f"{len(corpus.commits)} commits to {args.output_dir}"
    )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
