"""Experiment harness: configuration, sweeps, outputs and the command line."""

from .checks import CheckResult, evaluate_checks
from .config import PRESET_M, WIDTH_LAWS, ConfigError, ExperimentConfig, load_config, parse_config
from .experiments import (
    ConvergenceRecord,
    DiscrepancyRecord,
    RunResult,
    fit_loglog_slope,
    is_concave,
    run_convergence,
    run_discrepancy,
    run_fig1,
    run_fig3,
    successive_slopes,
)
from .outputs import CSV_HEADER, LogLogPlot, emit_outputs, records_csv
