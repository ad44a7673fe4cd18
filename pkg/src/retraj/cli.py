"""
Command-line front end: detect release windows from a commit log, build
trajectories, analyze a trajectory corpus, and render figures.

All JSON/CSV artifacts are deterministic functions of the inputs and
configuration; run timestamps go only to run.log.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence

from . import commits as commits_mod
from . import trajectory as trajectory_mod
from .clustering import (
    PATTERN_SELECTION_NOTE,
    ClusterAssignment,
    extract_patterns,
    hierarchical_cluster,
)
from .config import FLAVORS, RunConfig, load_config
from .distance import (
    distance_matrix,
    distance_matrix_to_csv,
    distance_matrix_to_json,
    scm_from_rates,
    scm_to_json,
)
from .ingest import (
    SelectionConfig,
    detect_release_windows,
    manifest_to_json,
    parse_commits,
    parse_issues,
    parse_manifest,
    select_resolved_issues,
)
from .model import Flavor, RetrajError, StateSymbol, Trajectory, render_state
from .seqstats import (
    ModalTrajectory,
    TransitionMatrix,
    dss_frequency,
    modal_trajectory,
    summarize,
    transition_rates,
)
from .svg import modal_svg, sequence_index_svg, transition_heatmap_svg


class StageError(RetrajError):
    """An error wrapped with the pipeline stage it occurred in."""

    def __init__(self, stage: str, cause: Exception) -> None:
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.cause = cause


def _stage(stage: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except StageError:
        raise
    except (RetrajError, OSError, ValueError) as exc:
        raise StageError(stage, exc) from exc


def _log(output_dir: Path, message: str) -> None:
    output_dir.mkdir(parents=True, exist_ok=True)
    stamp = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
    with open(output_dir / "run.log", "a", encoding="utf-8") as fh:
        fh.write(f"{stamp} {message}\n")


def _warn(output_dir: Path | None, message: str) -> None:
    print(f"warning: {message}", file=sys.stderr)
    if output_dir is not None:
        _log(output_dir, f"warning: {message}")


def _safe_filename(release_id: str, taken: set[str]) -> str:
    safe = re.sub(r"[^A-Za-z0-9._-]", "_", release_id)
    if safe in taken:
        raise RetrajError(
            f"release ids {release_id!r} and another both map to filename {safe!r}"
        )
    taken.add(safe)
    return safe


def _read_lines(path: Path):
    with open(path, encoding="utf-8") as fh:
        yield from fh


# ---------------------------------------------------------------------
# detect-releases
# ---------------------------------------------------------------------

def cmd_detect_releases(args: argparse.Namespace, config: RunConfig) -> int:
    if config.commits is None:
        raise StageError("configuration", ValueError("detect-releases needs --commits"))
    commits = _stage(
        "parsing commit log", lambda: parse_commits(_read_lines(config.commits))
    )
    commits.sort(key=lambda c: c.timestamp)
    manifest = _stage("detecting release windows", detect_release_windows, commits)
    for warning in manifest.warnings:
        _warn(None, warning)
    text = manifest_to_json(manifest)
    if args.output is None:
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text, encoding="utf-8")
    return 0


# ---------------------------------------------------------------------
# build
# ---------------------------------------------------------------------

def cmd_build(args: argparse.Namespace, config: RunConfig) -> int:
    if config.issues is None:
        raise StageError("configuration", ValueError("build needs --issues"))
    if config.manifest is None:
        raise StageError("configuration", ValueError("build needs --manifest"))

    issues = _stage("parsing issue export", lambda: parse_issues(_read_lines(config.issues)))
    manifest = _stage(
        "parsing release manifest",
        lambda: parse_manifest(Path(config.manifest).read_text(encoding="utf-8")),
    )
    commits = None
    if config.commits is not None:
        commits = _stage("parsing commit log", lambda: parse_commits(_read_lines(config.commits)))
        commits.sort(key=lambda c: c.timestamp)

    for warning in manifest.warnings:
        _warn(config.output_dir, warning)
    if not issues:
        _warn(config.output_dir, "issue export is empty; all trajectories will be all-zen")

    selection = SelectionConfig(accept=config.accept, reject=config.reject)
    trajectories_dir = config.output_dir / "trajectories"
    trajectories_dir.mkdir(parents=True, exist_ok=True)

    taken: set[str] = set()
    rows = []
    for window in manifest.releases:
        safe = _safe_filename(window.release_id, taken)
        selected = select_resolved_issues(issues, window, selection)
        if not selected:
            _warn(config.output_dir, f"release {window.release_id}: no issues selected")
        issues_traj = _stage(
            f"building issues trajectory for {window.release_id}",
            trajectory_mod.issues_trajectory,
            selected,
            window,
        )
        (trajectories_dir / f"{safe}.issues.json").write_text(
            trajectory_mod.trajectory_to_json(issues_traj), encoding="utf-8"
        )

        row = {
            "release_id": window.release_id,
            "inception": window.inception.strftime("%Y-%m-%dT%H:%M:%SZ"),
            "ending": window.ending.strftime("%Y-%m-%dT%H:%M:%SZ"),
            "selected_issues": len(selected),
            "issue_states": len(issues_traj.segments),
        }
        if commits is not None:
            in_window = [
                c for c in commits if window.inception <= c.timestamp <= window.ending
            ]
            tagged = [c for c in in_window if c.tagged_issue_ids]
            row["commits"] = len(in_window)
            row["tagged_commits"] = len(tagged)
            row["tagged_ratio"] = (
                round(len(tagged) / len(in_window), 4) if in_window else 0.0
            )
            row["tangled_commits"] = commits_mod.tangled_commit_count(in_window)
            try:
                commit_traj = commits_mod.build_commit_trajectory(commits, selected, window)
            except commits_mod.NoTaggedCommits:
                _warn(
                    config.output_dir,
                    f"release {window.release_id}: no commits reference a selected issue; "
                    "skipping commits trajectory",
                )
            else:
                (trajectories_dir / f"{safe}.commits.json").write_text(
                    trajectory_mod.trajectory_to_json(commit_traj), encoding="utf-8"
                )
        rows.append(row)

    summary = {
        "releases": rows,
        "totals": {
            "releases": len(rows),
            "selected_issues": sum(r["selected_issues"] for r in rows),
        },
    }
    if commits is not None:
        summary["totals"]["commits"] = sum(r.get("commits", 0) for r in rows)
        summary["totals"]["tagged_commits"] = sum(r.get("tagged_commits", 0) for r in rows)
    (config.output_dir / "build_summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    _log(config.output_dir, f"build: wrote {len(rows)} releases to {trajectories_dir}")
    return 0


# ---------------------------------------------------------------------
# analyze / render
# ---------------------------------------------------------------------

def _load_trajectories(config: RunConfig) -> list[Trajectory]:
    trajectories_dir = config.output_dir / "trajectories"
    paths = sorted(trajectories_dir.glob(f"*.{config.flavor}.json"))
    if not paths:
        raise StageError(
            "loading trajectories",
            FileNotFoundError(
                f"no *.{config.flavor}.json files under {trajectories_dir}; run build first"
            ),
        )
    out = []
    for path in paths:
        out.append(
            _stage(
                f"loading trajectory {path.name}",
                lambda p=path: trajectory_mod.trajectory_from_json(
                    p.read_text(encoding="utf-8")
                ),
            )
        )
    out.sort(key=lambda t: t.release_id)
    return out


def _corpus_sequences(
    trajectories: list[Trajectory], config: RunConfig
) -> tuple[dict[str, list[StateSymbol]], dict[str, list[StateSymbol]]]:
    """Normalized and DSS sequence views of the corpus, keyed by
    release id."""
    normalized: dict[str, list[StateSymbol]] = {}
    dss: dict[str, list[StateSymbol]] = {}
    for t in trajectories:
        dss[t.release_id] = list(trajectory_mod.to_dss(t).states)
        normalized[t.release_id] = trajectory_mod.sample_positions(t, config.positions)
    return normalized, dss


def _tm_json(tm: TransitionMatrix) -> str:
    doc = {
        "alphabet": [render_state(s) for s in tm.alphabet],
        "rates": [[round(float(v), 9) for v in row] for row in tm.rates],
        "support": [[int(v) for v in row] for row in tm.support],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _modal_json(modal: ModalTrajectory, mode: str) -> str:
    doc = {
        "mode": mode,
        "positions": [
            {
                "position": i,
                "state": render_state(p.state),
                "frequency": round(p.frequency, 9),
                "support": p.support,
                "denominator": p.denominator,
            }
            for i, p in enumerate(modal.positions)
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _summaries_json(trajectories: list[Trajectory]) -> str:
    releases = []
    for t in trajectories:
        s = summarize(t)
        if t.flavor is Flavor.ISSUES:
            durations = {
                render_state(state): int(d.total_seconds()) for state, d in s.durations.items()
            }
            unit = "seconds"
        else:
            durations = {render_state(state): int(d) for state, d in s.durations.items()}
            unit = "commits"
        releases.append(
            {
                "release_id": s.release_id,
                "states": [render_state(state) for state in s.states],
                "transition_count": s.transition_count,
                "durations": dict(sorted(durations.items())),
                "duration_unit": unit,
            }
        )
    return json.dumps({"releases": releases}, indent=2, sort_keys=True) + "\n"


def _patterns_json(reports, min_size: int) -> str:
    patterns = []
    for report in reports:
        patterns.append(
            {
                "label": report.label,
                "size": report.size,
                "member_ids": list(report.member_ids),
                "medoid_id": report.medoid_id,
                "medoid_dss": list(report.medoid_dss),
                "modal_dss": [
                    {
                        "state": render_state(p.state),
                        "frequency": round(p.frequency, 9),
                        "support": p.support,
                        "denominator": p.denominator,
                    }
                    for p in report.modal_dss.positions
                ],
                "length_distribution": {
                    str(k): v for k, v in sorted(report.length_distribution.items())
                },
                "first_state_distribution": dict(sorted(report.first_state_distribution.items())),
                "last_state_distribution": dict(sorted(report.last_state_distribution.items())),
            }
        )
    doc = {"min_size": min_size, "note": PATTERN_SELECTION_NOTE, "patterns": patterns}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _clusters_csv(assignment: ClusterAssignment) -> str:
    lines = ["release_id,cluster"]
    for release_id in sorted(assignment.labels):
        lines.append(f"{release_id},{assignment.labels[release_id]}")
    return "\n".join(lines) + "\n"


def _dss_frequency_json(entries, total: int) -> str:
    doc = {
        "total_sequences": total,
        "entries": [
            {
                "dss": [render_state(s) for s in entry.states],
                "count": entry.count,
                "cumulative_ratio": round(entry.cumulative_ratio, 9),
            }
            for entry in entries
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def cmd_analyze(args: argparse.Namespace, config: RunConfig) -> int:
    trajectories = _load_trajectories(config)
    normalized, dss_map = _corpus_sequences(trajectories, config)
    dss_seqs = [trajectory_mod.to_dss(t) for t in trajectories]

    prefix = config.flavor
    out = config.output_dir

    tm = _stage("computing transition rates", transition_rates, dss_seqs)
    (out / f"{prefix}_transition_matrix.json").write_text(_tm_json(tm), encoding="utf-8")

    if config.modal_mode == "dss":
        modal_input = [list(seq.states) for seq in dss_seqs]
    else:
        modal_input = [normalized[t.release_id] for t in trajectories]
    modal = _stage("computing modal trajectory", modal_trajectory, modal_input)
    (out / f"{prefix}_modal.json").write_text(
        _modal_json(modal, config.modal_mode), encoding="utf-8"
    )

    freq = dss_frequency(dss_seqs)
    (out / f"{prefix}_dss_frequency.json").write_text(
        _dss_frequency_json(freq, len(dss_seqs)), encoding="utf-8"
    )

    (out / f"{prefix}_trajectory_summaries.json").write_text(
        _summaries_json(trajectories), encoding="utf-8"
    )

    om_input = normalized if config.om_mode == "normalized" else dss_map
    observed = {s for seq in om_input.values() for s in seq}
    scm = _stage("deriving substitution costs", scm_from_rates, tm, config.indel, observed)
    (out / f"{prefix}_substitution_costs.json").write_text(scm_to_json(scm), encoding="utf-8")

    dm = _stage("computing distance matrix", distance_matrix, om_input, scm)
    (out / f"{prefix}_distance_matrix.csv").write_text(
        distance_matrix_to_csv(dm), encoding="utf-8"
    )
    (out / f"{prefix}_distance_matrix.json").write_text(
        distance_matrix_to_json(dm), encoding="utf-8"
    )

    k = min(config.k, len(trajectories))
    if k < config.k:
        _warn(out, f"k reduced from {config.k} to {k}: only {len(trajectories)} trajectories")
    assignment = _stage("clustering", hierarchical_cluster, dm, k, config.linkage)
    (out / f"{prefix}_clusters.csv").write_text(_clusters_csv(assignment), encoding="utf-8")

    dss_by_id = {seq.release_id: seq for seq in dss_seqs}
    reports = extract_patterns(assignment, dss_by_id, config.min_size)
    (out / f"{prefix}_patterns.json").write_text(
        _patterns_json(reports, config.min_size), encoding="utf-8"
    )

    _render_svgs(config, trajectories, normalized, tm, modal)
    _log(out, f"analyze: {len(trajectories)} {prefix} trajectories, k={k}")
    return 0


def _render_svgs(
    config: RunConfig,
    trajectories: list[Trajectory],
    normalized: dict[str, list[StateSymbol]],
    tm: TransitionMatrix,
    modal: ModalTrajectory,
) -> None:
    prefix = config.flavor
    out = config.output_dir
    rows = [(t.release_id, normalized[t.release_id]) for t in trajectories]
    (out / f"{prefix}_sequence_index.svg").write_text(
        sequence_index_svg(rows, f"{prefix} trajectories, normalized length {config.positions}"),
        encoding="utf-8",
    )
    (out / f"{prefix}_transition_heatmap.svg").write_text(
        transition_heatmap_svg(tm, f"{prefix} transition rates"), encoding="utf-8"
    )
    (out / f"{prefix}_modal_plot.svg").write_text(
        modal_svg(modal, f"{prefix} modal trajectory ({config.modal_mode})"), encoding="utf-8"
    )


def cmd_render(args: argparse.Namespace, config: RunConfig) -> int:
    trajectories = _load_trajectories(config)
    normalized, _ = _corpus_sequences(trajectories, config)
    dss_seqs = [trajectory_mod.to_dss(t) for t in trajectories]
    tm = _stage("computing transition rates", transition_rates, dss_seqs)
    if config.modal_mode == "dss":
        modal_input = [list(seq.states) for seq in dss_seqs]
    else:
        modal_input = [normalized[t.release_id] for t in trajectories]
    modal = _stage("computing modal trajectory", modal_trajectory, modal_input)
    _render_svgs(config, trajectories, normalized, tm, modal)
    _log(config.output_dir, f"render: {len(trajectories)} {config.flavor} trajectories")
    return 0


# ---------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="retraj",
        description="Reconstruct, summarize, compare, and cluster software "
        "release trajectories from issue-tracker and commit-log exports.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", type=Path, default=None, help="TOML configuration file")
        p.add_argument("--output-dir", type=Path, default=None)

    p_detect = sub.add_parser(
        "detect-releases", help="derive a release manifest from release-plugin tags"
    )
    p_detect.add_argument("--commits", type=Path, required=True)
    p_detect.add_argument(
        "--output", type=Path, default=None, help="manifest path (default: stdout)"
    )
    p_detect.add_argument("--config", type=Path, default=None)
    p_detect.set_defaults(handler=cmd_detect_releases)

    p_build = sub.add_parser("build", help="build trajectory files from the raw exports")
    add_common(p_build)
    p_build.add_argument("--issues", type=Path, default=None)
    p_build.add_argument("--commits", type=Path, default=None)
    p_build.add_argument("--manifest", type=Path, default=None)
    p_build.add_argument("--accept", default=None, help="comma-separated accepted resolutions")
    p_build.add_argument("--reject", default=None, help="comma-separated rejected resolutions")
    p_build.set_defaults(handler=cmd_build)

    def add_analysis_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--flavor", choices=FLAVORS, default=None)
        p.add_argument("--positions", type=int, default=None)
        p.add_argument("--modal-mode", choices=("dss", "normalized"), default=None)

    p_analyze = sub.add_parser("analyze", help="statistics, distances, clusters, figures")
    add_common(p_analyze)
    add_analysis_flags(p_analyze)
    p_analyze.add_argument("--indel", type=float, default=None)
    p_analyze.add_argument("--k", type=int, default=None)
    p_analyze.add_argument("--min-size", type=int, default=None)
    p_analyze.add_argument("--om-mode", choices=("normalized", "dss"), default=None)
    p_analyze.add_argument(
        "--linkage", choices=("ward", "single", "complete", "average"), default=None
    )
    p_analyze.set_defaults(handler=cmd_analyze)

    p_render = sub.add_parser("render", help="re-render SVG figures from built trajectories")
    add_common(p_render)
    add_analysis_flags(p_render)
    p_render.set_defaults(handler=cmd_render)

    return parser


_OVERRIDE_FIELDS = (
    "issues",
    "commits",
    "manifest",
    "output_dir",
    "accept",
    "reject",
    "positions",
    "indel",
    "k",
    "min_size",
    "om_mode",
    "modal_mode",
    "linkage",
    "flavor",
)


def config_from_args(args: argparse.Namespace) -> RunConfig:
    overrides = {
        name: getattr(args, name) for name in _OVERRIDE_FIELDS if hasattr(args, name)
    }
    return load_config(config_file=getattr(args, "config", None), overrides=overrides)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = config_from_args(args)
        return args.handler(args, config)
    except StageError as exc:
        print(f"error in {exc.stage}: {exc.cause}", file=sys.stderr)
        return 1
    except RetrajError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
