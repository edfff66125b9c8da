"""Permutation pattern matching through bounded-width rectangle decompositions.

The package decides whether a pattern occurs in a target permutation in
time linear in the target for every fixed pattern length, plus the
supporting machinery: merge-sequence decompositions of bounded width,
dense-grid extraction, exhaustive oracles for small inputs, and a
monotone-partition fast path with polynomial working memory.
"""

from .core import (
    Embedding,
    GridWitness,
    Interval,
    MergeSequence,
    MergeStep,
    ParseError,
    Permutation,
    Point,
    Rectangle,
    RectangleFamily,
    SizeCapError,
    ValidationError,
    apply_merge_sequence,
    canonical_grid,
    format_embedding,
    format_grid_witness,
    format_merge_sequence,
    format_permutation,
    grid_label,
    leaf_sets,
    merge_family,
    parse_embedding,
    parse_grid_witness,
    parse_merge_sequence,
    parse_permutation,
    pattern_equal,
    random_permutation,
    random_separable,
    reduce,
    restrict,
    substitute,
    validate_merge_sequence,
    verify_embedding,
    verify_grid,
)
from .decompose import (
    DecompositionResult,
    build_decomposition,
    build_decomposition_budget,
    canonical_grid_decomposition,
    first_violation,
    replay_view_counts,
    verify_wide,
    width_of_decomposition,
)
from .griddetect import (
    PointSet,
    f_bound,
    find_blocks,
    find_grid,
    find_grid_or_reduce,
    format_point_set,
    parse_point_set,
)
from .matcher import (
    SubproblemTable,
    VisibilityGraph,
    connected_sets,
    find_pattern,
    match_auto,
    visibility_update,
)
from .monotone import (
    MonotonePartition,
    PatternAssignment,
    format_monotone_partition,
    greedy_monotone_partition,
    monotone_decomposition,
    parse_monotone_partition,
    poly_space_match,
    sigma_pi_embedding,
    t_monotone_match,
    validate_monotone_partition,
)
from .oracle import (
    brute_force_grid,
    brute_force_match,
    check_tree_characterization,
    exact_width,
    find_close_pair,
    grid_search,
    is_separable,
)

__version__ = "0.1.0"

__all__ = [
    "DecompositionResult",
    "Embedding",
    "GridWitness",
    "Interval",
    "MergeSequence",
    "MergeStep",
    "MonotonePartition",
    "ParseError",
    "PatternAssignment",
    "Permutation",
    "Point",
    "PointSet",
    "Rectangle",
    "RectangleFamily",
    "SizeCapError",
    "SubproblemTable",
    "ValidationError",
    "VisibilityGraph",
    "apply_merge_sequence",
    "brute_force_grid",
    "brute_force_match",
    "build_decomposition",
    "build_decomposition_budget",
    "canonical_grid",
    "canonical_grid_decomposition",
    "check_tree_characterization",
    "connected_sets",
    "exact_width",
    "f_bound",
    "find_blocks",
    "find_close_pair",
    "find_grid",
    "find_grid_or_reduce",
    "find_pattern",
    "first_violation",
    "format_embedding",
    "format_grid_witness",
    "format_merge_sequence",
    "format_monotone_partition",
    "format_permutation",
    "format_point_set",
    "greedy_monotone_partition",
    "grid_label",
    "grid_search",
    "is_separable",
    "leaf_sets",
    "match_auto",
    "merge_family",
    "monotone_decomposition",
    "parse_embedding",
    "parse_grid_witness",
    "parse_merge_sequence",
    "parse_monotone_partition",
    "parse_permutation",
    "parse_point_set",
    "pattern_equal",
    "poly_space_match",
    "random_permutation",
    "random_separable",
    "reduce",
    "replay_view_counts",
    "restrict",
    "sigma_pi_embedding",
    "substitute",
    "t_monotone_match",
    "validate_merge_sequence",
    "validate_monotone_partition",
    "verify_embedding",
    "verify_grid",
    "verify_wide",
    "visibility_update",
    "width_of_decomposition",
    "__version__",
]
