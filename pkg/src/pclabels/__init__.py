"""Bounded-size pattern-count labels for categorical datasets."""
from .dataset import (
    MISSING,
    AttributeSchema,
    Dataset,
    FormatError,
    Pattern,
    ValidationError,
    bucketize,
    count_pattern,
    load_csv,
    patterns_over,
    restrict,
    value_counts,
)
from .label import (
    AttrSubset,
    EvaluationReport,
    Label,
    abs_error,
    build_label,
    deserialize,
    estimate,
    evaluate,
    label_size,
    q_error,
    serialize,
)
from .search import (
    SearchConfig,
    SearchStats,
    brute_force_optimal,
    gen,
    naive_search,
    remove_parents,
    top_down_search,
)

__version__ = "0.1.0"
