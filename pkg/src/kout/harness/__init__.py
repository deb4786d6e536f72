from .experiments import (
    EXPERIMENTS,
    ExperimentConfig,
    SummaryStats,
    TrialRecord,
    build_host,
    counterexample_experiment,
    exact_no_matching_probability,
    records_csv,
    records_jsonl,
    run_experiment,
    run_trial,
    stated_lower_bound,
    summary_json,
    write_outputs,
)
from .seeding import mix64, trial_rng, trial_seed, trial_seeds
from .stats import TrendPoint, TrendReport, trend_report, wilson_interval
