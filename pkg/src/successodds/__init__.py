"""Relative effect, success odds and win ratio for two-sample comparisons with ties."""

from .effects import (
    CoarseningRule,
    EffectEstimates,
    Extended,
    PairCounts,
    State,
    binary_effects,
    coarsen,
    collapse_interval,
    count_pairs,
    count_pairs_fast,
    effects,
    effects_from_counts,
    effects_from_distributions,
    effects_from_samples,
    merge_categories,
    round_to_decimals,
)
from .inference import (
    ConfidenceInterval,
    DegenerateError,
    TestResult,
    brunner_munzel,
    ci_lambda_so,
    ci_lambda_wr_bootstrap,
    ci_theta_logit,
    estimate_theta_ranks,
)
from .kernels import BACKEND
from .multigroup import (
    PairwiseMatrix,
    StratifiedSummary,
    TournamentReport,
    detect_cycles,
    mixture_reference_effects,
    pairwise_effects,
    stratified_summary,
)
from .values import (
    CsvConfig,
    DataError,
    Dataset,
    DiscreteDistribution,
    NumericScale,
    OrderedValue,
    OrdinalScale,
    ParseError,
    Sample,
    ScaleError,
    parse_csv,
    parse_distribution_spec,
    parse_scale,
)

__version__ = "0.1.0"
