"""
retraj: reconstruct, summarize, compare, and cluster software release
trajectories from issue-tracker and commit-log exports.
"""

from .model import (
    DssSequence,
    Flavor,
    FULL_ALPHABET,
    IssueKind,
    IssueRecord,
    IssueType,
    ReleaseWindow,
    RetrajError,
    Segment,
    StateSymbol,
    Trajectory,
    X_STATE,
    Z_STATE,
    parse_state,
    parse_timestamp,
    render_state,
    state_union,
)
from .ingest import (
    CommitRecord,
    DEFAULT_ACCEPT,
    DEFAULT_REJECT,
    IngestError,
    MalformedLine,
    MissingField,
    NoReleaseTagsFound,
    ReleaseManifest,
    SelectionConfig,
    detect_release_windows,
    extract_issue_ids,
    parse_commits,
    parse_issues,
    parse_manifest,
    select_resolved_issues,
)
from .trajectory import (
    AtomicState,
    build_atomic_states,
    build_trajectory,
    issues_trajectory,
    normalize,
    sample_positions,
    to_dss,
    trajectory_from_json,
    trajectory_to_json,
)
from .commits import (
    NoTaggedCommits,
    annotate_commits,
    build_commit_trajectory,
    normalize_commits,
    tangled_commit_count,
)
from .seqstats import (
    DssFrequencyEntry,
    EmptyCorpus,
    ModalTrajectory,
    TrajectorySummary,
    TransitionMatrix,
    dss_frequency,
    modal_trajectory,
    summarize,
    transition_rates,
)
from .distance import (
    DistanceMatrix,
    SubstitutionCostMatrix,
    UnknownSymbol,
    distance_matrix,
    om_distance,
    scm_from_rates,
)
from .clustering import (
    ClusterAssignment,
    InvalidK,
    PatternReport,
    extract_patterns,
    hierarchical_cluster,
)
from .config import ConfigError, RunConfig, load_config

__all__ = [
    "AtomicState",
    "ClusterAssignment",
    "CommitRecord",
    "ConfigError",
    "DEFAULT_ACCEPT",
    "DEFAULT_REJECT",
    "DistanceMatrix",
    "DssFrequencyEntry",
    "DssSequence",
    "EmptyCorpus",
    "Flavor",
    "FULL_ALPHABET",
    "IngestError",
    "InvalidK",
    "IssueKind",
    "IssueRecord",
    "IssueType",
    "MalformedLine",
    "MissingField",
    "ModalTrajectory",
    "NoReleaseTagsFound",
    "NoTaggedCommits",
    "PatternReport",
    "ReleaseManifest",
    "ReleaseWindow",
    "RetrajError",
    "RunConfig",
    "Segment",
    "SelectionConfig",
    "StateSymbol",
    "SubstitutionCostMatrix",
    "Trajectory",
    "TrajectorySummary",
    "TransitionMatrix",
    "UnknownSymbol",
    "X_STATE",
    "Z_STATE",
    "annotate_commits",
    "build_atomic_states",
    "build_commit_trajectory",
    "build_trajectory",
    "detect_release_windows",
    "distance_matrix",
    "dss_frequency",
    "extract_issue_ids",
    "extract_patterns",
    "hierarchical_cluster",
    "issues_trajectory",
    "load_config",
    "modal_trajectory",
    "normalize",
    "normalize_commits",
    "om_distance",
    "parse_commits",
    "parse_issues",
    "parse_manifest",
    "parse_state",
    "parse_timestamp",
    "render_state",
    "sample_positions",
    "scm_from_rates",
    "select_resolved_issues",
    "state_union",
    "summarize",
    "tangled_commit_count",
    "to_dss",
    "trajectory_from_json",
    "trajectory_to_json",
    "transition_rates",
]
