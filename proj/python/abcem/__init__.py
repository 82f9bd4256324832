"""Simulation lab for agent-based market models."""

from abcem._core import (  # noqa: F401
    FwParams,
    RngStream,
    Scheme,
    __version__,
    fw_frozen_n_simulate,
    fw_run,
    list_experiments,
    list_presets,
    lls_run,
    optimal_gamma,
    ou_stationary_moments,
    preset_config_json,
    run_experiment_json,
    switching_index,
    w1_empirical_vs_density,
    w1_sorted,
)
