"""
Parsers for issue exports, commit logs, and release manifests, plus the
selection rules that decide which issues belong to a release.

Input formats (all offline exports, never live tracker APIs):

- Issue export: JSON Lines, one issue per line with fields
  ``id``, ``type``, ``created``, ``resolved`` (nullable),
  ``resolution`` (nullable), ``status``, ``parent`` (nullable);
  timestamps RFC 3339 UTC.
- Commit log: JSON Lines with ``hash``, ``timestamp`` (RFC 3339 UTC),
  ``message``.
- Release manifest: one JSON document
  ``{"releases": [{"id": ..., "inception": ..., "ending": ...}]}``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, replace
from datetime import datetime
from typing import Iterable, Sequence

from .model import (
    IssueKind,
    IssueRecord,
    IssueType,
    ReleaseWindow,
    RetrajError,
    format_timestamp,
    parse_timestamp,
)


class IngestError(RetrajError):
    """Base class for ingestion failures."""


class MalformedLine(IngestError):
    def __init__(self, line_no: int, cause: str):
        self.line_no = line_no
        self.cause = cause
        super().__init__(f"line {line_no}: {cause}")


class MissingField(IngestError):
    def __init__(self, field: str, line_no: int):
        self.field = field
        self.line_no = line_no
        super().__init__(f"line {line_no}: missing field {field!r}")


class NoReleaseTagsFound(IngestError):
    """No release-preparation tags in the commit log; the caller must
    supply an explicit manifest instead."""


# ---------------------------------------------------------------------
# Commit records and release manifests
# ---------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class CommitRecord:
    hash: str
    timestamp: datetime
    message: str
    # Tracker keys found in the message, in order of appearance,
    # de-duplicated.
    tagged_issue_ids: tuple[str, ...] = ()


@dataclass(frozen=True, slots=True)
class ReleaseManifest:
    """Release windows sorted by inception. Overlapping windows are
    permitted (branch releases) but reported in ``warnings``."""

    releases: tuple[ReleaseWindow, ...]
    warnings: tuple[str, ...] = ()

    @classmethod
    def build(cls, windows: Sequence[ReleaseWindow]) -> "ReleaseManifest":
        ordered = tuple(sorted(windows, key=lambda w: (w.inception, w.release_id)))
        seen: set[str] = set()
        for w in ordered:
            if w.release_id in seen:
                raise IngestError(f"duplicate release id {w.release_id!r} in manifest")
            seen.add(w.release_id)
        warnings = []
        for prev, cur in zip(ordered, ordered[1:]):
            if cur.inception < prev.ending:
                warnings.append(
                    f"release windows overlap: {prev.release_id} ends {format_timestamp(prev.ending)}, "
                    f"{cur.release_id} starts {format_timestamp(cur.inception)}"
                )
        return cls(releases=ordered, warnings=tuple(warnings))


# ---------------------------------------------------------------------
# Issue export parsing
# ---------------------------------------------------------------------

_ISSUE_FIELDS = ("id", "type", "created", "resolved", "resolution", "status", "parent")


def parse_issues(stream: Iterable[str]) -> list[IssueRecord]:
    """Parse an issue export (JSON Lines) into IssueRecords.

    Aborts with MalformedLine/MissingField at the first offending line.
    Blank lines are skipped. Unknown type names map to Other(name).
    """
    records: list[IssueRecord] = []
    for line_no, line in enumerate(stream, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedLine(line_no, f"invalid JSON: {exc.msg}") from exc
        if not isinstance(obj, dict):
            raise MalformedLine(line_no, "issue record is not an object")
        for field in _ISSUE_FIELDS:
            if field not in obj:
                raise MissingField(field, line_no)
        try:
            issue_type = IssueType.from_name(str(obj["type"]))
            created = parse_timestamp(str(obj["created"]))
            resolved = None if obj["resolved"] is None else parse_timestamp(str(obj["resolved"]))
            parent = None if obj["parent"] is None else str(obj["parent"])
            resolution = None if obj["resolution"] is None else str(obj["resolution"])
            record = IssueRecord(
                id=str(obj["id"]),
                type=issue_type,
                created=created,
                resolved=resolved,
                resolution=resolution,
                status=str(obj["status"]),
                parent_id=parent,
            )
        except ValueError as exc:
            raise MalformedLine(line_no, str(exc)) from exc
        if record.parent_id is not None and record.type.kind is not IssueKind.SUB_TASK:
            raise MalformedLine(
                line_no, f"issue {record.id} has a parent but type {record.type.name!r}"
            )
        records.append(record)
    return records


def parse_commits(stream: Iterable[str]) -> list[CommitRecord]:
    """Parse a commit log (JSON Lines), tagging each commit with the
    tracker keys found in its message."""
    records: list[CommitRecord] = []
    for line_no, line in enumerate(stream, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedLine(line_no, f"invalid JSON: {exc.msg}") from exc
        if not isinstance(obj, dict):
            raise MalformedLine(line_no, "commit record is not an object")
        for field in ("hash", "timestamp", "message"):
            if field not in obj:
                raise MissingField(field, line_no)
        try:
            timestamp = parse_timestamp(str(obj["timestamp"]))
        except ValueError as exc:
            raise MalformedLine(line_no, str(exc)) from exc
        message = str(obj["message"])
        records.append(
            CommitRecord(
                hash=str(obj["hash"]),
                timestamp=timestamp,
                message=message,
                tagged_issue_ids=extract_issue_ids(message),
            )
        )
    return records


def parse_manifest(text: str) -> ReleaseManifest:
    """Parse an explicit release manifest JSON document."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise IngestError(f"invalid manifest JSON: {exc.msg}") from exc
    if not isinstance(obj, dict) or not isinstance(obj.get("releases"), list):
        raise IngestError("manifest must be an object with a 'releases' list")
    windows = []
    for i, entry in enumerate(obj["releases"]):
        if not isinstance(entry, dict):
            raise IngestError(f"manifest release #{i} is not an object")
        for field in ("id", "inception", "ending"):
            if field not in entry:
                raise IngestError(f"manifest release #{i}: missing field {field!r}")
        try:
            windows.append(
                ReleaseWindow(
                    release_id=str(entry["id"]),
                    inception=parse_timestamp(str(entry["inception"])),
                    ending=parse_timestamp(str(entry["ending"])),
                )
            )
        except ValueError as exc:
            raise IngestError(f"manifest release #{i}: {exc}") from exc
    return ReleaseManifest.build(windows)


def manifest_to_json(manifest: ReleaseManifest) -> str:
    doc = {
        "releases": [
            {
                "id": w.release_id,
                "inception": format_timestamp(w.inception),
                "ending": format_timestamp(w.ending),
            }
            for w in manifest.releases
        ]
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------
# Issue selection
# ---------------------------------------------------------------------

# Common tracker vocabularies differ; both sets are configurable.
DEFAULT_ACCEPT = frozenset({"fixed", "implemented", "done", "resolved", "complete"})
DEFAULT_REJECT = frozenset(
    {
        "invalid",
        "not a problem",
        "won't fix",
        "wontfix",
        "duplicate",
        "cannot reproduce",
        "incomplete",
        "not complete",
    }
)


@dataclass(frozen=True, slots=True)
class SelectionConfig:
    accept: frozenset[str] = DEFAULT_ACCEPT
    reject: frozenset[str] = DEFAULT_REJECT


def select_resolved_issues(
    issues: Sequence[IssueRecord],
    window: ReleaseWindow,
    config: SelectionConfig = SelectionConfig(),
) -> list[IssueRecord]:
    """Issues that concern the release: resolved inside the window, with
    an accepted resolution, and not sub-tasks."""
    selected = []
    for issue in issues:
        if issue.resolved is None:
            continue
        if not (window.inception <= issue.resolved <= window.ending):
            continue
        if issue.resolution is None:
            continue
        resolution = issue.resolution.strip().lower()
        if resolution not in config.accept or resolution in config.reject:
            continue
        if issue.type.kind is IssueKind.SUB_TASK:
            continue
        selected.append(issue)
    return selected


# ---------------------------------------------------------------------
# Release boundary detection and commit tagging
# ---------------------------------------------------------------------

_RELEASE_TAG_RE = re.compile(r"\[maven-release-plugin\]\s*prepare release\s+(\S+)")
_DEV_ITERATION_MARKER = "prepare for next development iteration"

_ISSUE_KEY_RE = re.compile(r"\b([A-Z][A-Z0-9]*-\d+)\b")


def extract_issue_ids(message: str) -> tuple[str, ...]:
    """Tracker keys in a commit message, in order of appearance,
    de-duplicated."""
    seen: set[str] = set()
    ordered: list[str] = []
    for match in _ISSUE_KEY_RE.finditer(message):
        key = match.group(1)
        if key not in seen:
            seen.add(key)
            ordered.append(key)
    return tuple(ordered)


def tag_commits(commits: Sequence[CommitRecord]) -> list[CommitRecord]:
    """Re-derive tagged_issue_ids from each commit message."""
    return [replace(c, tagged_issue_ids=extract_issue_ids(c.message)) for c in commits]


def detect_release_windows(commits: Sequence[CommitRecord]) -> ReleaseManifest:
    """Derive release windows from maven-release-plugin tags.

    Each "prepare release <ID>" commit ends a window. Its inception is
    the first "prepare for next development iteration" commit after the
    previous release (the iteration starts there), falling back to the
    previous release's ending, or to the first commit overall for the
    first release. Windows that would be empty are dropped; a re-tagged
    release id keeps its last occurrence.
    """
    for prev, cur in zip(commits, commits[1:]):
        if cur.timestamp < prev.timestamp:
            raise ValueError("commits must be sorted by timestamp ascending")

    iteration_start: datetime | None = None
    previous_ending: datetime | None = None
    by_id: dict[str, ReleaseWindow] = {}
    for commit in commits:
        release_match = _RELEASE_TAG_RE.search(commit.message)
        if release_match:
            release_id = release_match.group(1)
            if iteration_start is not None:
                inception = iteration_start
            elif previous_ending is not None:
                inception = previous_ending
            else:
                inception = commits[0].timestamp
            ending = commit.timestamp
            previous_ending = ending
            iteration_start = None
            if ending > inception:
                window = ReleaseWindow(release_id=release_id, inception=inception, ending=ending)
                by_id[release_id] = window
            continue
        if _DEV_ITERATION_MARKER in commit.message and iteration_start is None:
            iteration_start = commit.timestamp
    if not by_id:
        raise NoReleaseTagsFound("no '[maven-release-plugin] prepare release' commits found")
    return ReleaseManifest.build(list(by_id.values()))
