"""Feature-importance scores on coalition value tables, axiom audits,
and separable-set partitioning.

A value table assigns a number to every feature subset of an n-feature
problem, stored densely and indexed by bitmask. On top of that sit four
scoring rules, a family of consistency checks for them, and a partition
algorithm that splits the feature set into the finest blocks that add
up independently.
"""

__version__ = "0.1.0"

from .axioms import (
    AxiomReport,
    Witness,
    check_data_model_equivalence,
    check_elimination,
    check_empty_set,
    check_marginal_contribution,
    check_minimalism,
    check_monotonicity,
    check_null_feature,
    check_separable_importance,
    check_symmetry,
    check_triviality,
)
from .dataset_eval import (
    Dataset,
    OutcomeTable,
    ValueMetric,
    grid_to_dataset,
    model_value_table,
    new_dataset,
    null_feature_residual,
    r2_value_table,
    value_table_from_metric,
)
from .errors import (
    CapExceededError,
    DegenerateInputError,
    NotSeparableError,
    PartitionError,
    SepsetsError,
    TableError,
)
from .importance import (
    ALL_METHODS,
    ImportanceVector,
    LinearityReport,
    ScoreMethod,
    check_linearity,
    grouped_score_vector,
    restricted_score,
    restricted_vector,
    score,
    score_vector,
    shapley_weights,
)
from .sample_space import (
    SampleSpace,
    check_importance_consistency,
    check_value_consistency,
    duplicate_space,
    global_table,
    new_sample_space,
    space_from_dict,
    space_to_dict,
)
from .separability import (
    ClosureReport,
    Partition,
    SeparabilityReport,
    closure_check,
    enumerate_separable_sets,
    induced_meta_table,
    is_separable,
    maximal_partition,
    maximal_partition_oracle,
    partition_from_dict,
    partition_to_dict,
    validate_partition,
)
from .subset_algebra import (
    MAX_FEATURES,
    MobiusTable,
    Tolerance,
    ValueTable,
    eliminate,
    full_mask,
    indices_of,
    mask_of,
    mix,
    mobius_transform,
    new_value_table,
    table_from_dict,
    table_to_dict,
    tables_close,
    zeta_transform,
)

__all__ = [
    "__version__",
    "ALL_METHODS",
    "AxiomReport",
    "CapExceededError",
    "ClosureReport",
    "Dataset",
    "DegenerateInputError",
    "ImportanceVector",
    "LinearityReport",
    "MAX_FEATURES",
    "MobiusTable",
    "NotSeparableError",
    "OutcomeTable",
    "Partition",
    "PartitionError",
    "SampleSpace",
    "ScoreMethod",
    "SeparabilityReport",
    "SepsetsError",
    "TableError",
    "Tolerance",
    "ValueMetric",
    "ValueTable",
    "Witness",
    "check_data_model_equivalence",
    "check_elimination",
    "check_empty_set",
    "check_importance_consistency",
    "check_linearity",
    "check_marginal_contribution",
    "check_minimalism",
    "check_monotonicity",
    "check_null_feature",
    "check_separable_importance",
    "check_symmetry",
    "check_triviality",
    "check_value_consistency",
    "closure_check",
    "duplicate_space",
    "eliminate",
    "enumerate_separable_sets",
    "full_mask",
    "global_table",
    "grid_to_dataset",
    "grouped_score_vector",
    "indices_of",
    "induced_meta_table",
    "is_separable",
    "mask_of",
    "maximal_partition",
    "maximal_partition_oracle",
    "mix",
    "mobius_transform",
    "model_value_table",
    "new_dataset",
    "new_sample_space",
    "new_value_table",
    "null_feature_residual",
    "partition_from_dict",
    "partition_to_dict",
    "r2_value_table",
    "restricted_score",
    "restricted_vector",
    "score",
    "score_vector",
    "shapley_weights",
    "space_from_dict",
    "space_to_dict",
    "table_from_dict",
    "table_to_dict",
    "tables_close",
    "validate_partition",
    "value_table_from_metric",
    "zeta_transform",
]
