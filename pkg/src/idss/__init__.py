"""Integrating decision support engine.

Fits a DAG of dynamic linear regressions to multivariate yearly series,
checks the expert-panel structure, and scores candidate policies by Monte
Carlo expected utility under do-style interventions.
"""

from .catalog import (
    TimeSeriesTable,
    VariableDef,
    apply_transforms,
    invert_transforms,
    load_table,
    slice_window,
    write_table,
)
from .dlm import (
    FilterState,
    NodeModel,
    Posterior,
    SmoothedState,
    backward_smooth,
    ffbs_sample,
    ffbs_sample_many,
    filter_step,
    forward_filter,
    initial_posterior,
    variance_posterior,
)
from .network import (
    FittedNetwork,
    Intervention,
    NetworkSpec,
    Policy,
    ReplicateSet,
    coefficient_series,
    fit_network,
    node_stream,
    replicate_log_density,
    simulate_replicates,
    smooth_network,
    validate_network,
)
from .panels import (
    AdequacyReport,
    Panel,
    PartitionReport,
    SummaryBundle,
    check_adequacy,
    check_partition,
    donate_summaries,
)
from .policies import (
    DeltaRow,
    EvaluationReport,
    PolicyResult,
    builtin_policies,
    compare,
    evaluate_policies,
)
from .utility import (
    Attribute,
    UtilityParams,
    UtilityResult,
    attribute_samples,
    default_params,
    expected_utility,
    utility_eval,
)

__version__ = "0.1.0"
