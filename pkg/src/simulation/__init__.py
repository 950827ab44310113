from .flight import FlightCapacity, FlightResult, flight_id, replay_flight, run_flight
from .reporting import (
    aggregate_weekly,
    comparison_table,
    emit_plot_data,
    mean_weekly_gap,
    weekly_frame,
    weekly_gaps,
    write_manifest,
    write_run_outputs,
)
from .studies import (
    SeedSweep,
    StudyReport,
    build_observation_sets,
    default_threads,
    draw_streams,
    generate_history,
    run_baseline_study,
    run_policies,
    run_scenario_study,
    run_seed_sweep,
    train_estimators,
    value_cache,
)

__all__ = [
    "FlightCapacity",
    "FlightResult",
    "SeedSweep",
    "StudyReport",
    "aggregate_weekly",
    "build_observation_sets",
    "comparison_table",
    "default_threads",
    "draw_streams",
    "emit_plot_data",
    "flight_id",
    "generate_history",
    "mean_weekly_gap",
    "replay_flight",
    "run_baseline_study",
    "run_flight",
    "run_policies",
    "run_scenario_study",
    "run_seed_sweep",
    "train_estimators",
    "value_cache",
    "weekly_frame",
    "weekly_gaps",
    "write_manifest",
    "write_run_outputs",
]
