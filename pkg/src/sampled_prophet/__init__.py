"""Sample-based matroid prophet policies and contention resolution.

Library layout:

- matroid: independence oracles, combinators, greedy optimum
- values: value distributions lifted to strictly ordered pairs
- thresholds: exchange values and learned quantile thresholds
- ocrs: protected sets, chain decompositions, layered online greedy
- prophet: end-to-end trained policy and online execution
- harness: seeded reproducible experiments, reports, CSV/JSON output
"""

__version__ = "0.1.0"

from .matroid import (
    Contraction,
    DirectSum,
    GraphicMatroid,
    Matroid,
    MatroidError,
    PartitionMatroid,
    Restriction,
    UniformMatroid,
    in_polytope,
    matroid_from_json,
    matroid_from_spec,
    max_weight_basis,
    max_weight_basis_real,
    monotone_exchange_bijection,
    strong_exchange,
)
from .values import (
    INF_VALUE,
    ZERO_VALUE,
    BernoulliScaledDist,
    ConstantDist,
    DiscreteDist,
    DistributionError,
    ExponentialDist,
    Instance,
    TieBrokenValue,
    UniformDist,
    ValueDistribution,
    distribution_from_spec,
    sample_value,
    sample_vector,
)
from .thresholds import (
    ThresholdTable,
    bucket_count,
    compute_tau,
    default_sample_count,
    good_threshold_diagnostic,
    learn_thresholds,
    tau_vector,
)
from .ocrs import (
    ChainDecomposition,
    EmpiricalSpanOracle,
    ExactSpanOracle,
    LayeredGreedy,
    MonteCarloSpanOracle,
    OcrsParams,
    decompose_exact,
    decompose_sampled,
    default_params,
    run_layered_greedy,
    select_exact,
    select_protected,
    select_sampled,
    shrink,
)
from .prophet import ProphetPolicy, expected_opt, run_online, train
from .harness import (
    ConfigError,
    ExperimentConfig,
    Report,
    emit_report,
    estimate_competitive_ratio,
    estimate_selectability,
    gen_hard_instance,
    run_experiment,
    run_lower_bound_experiment,
    wilson_interval,
)
from .rng import substream
