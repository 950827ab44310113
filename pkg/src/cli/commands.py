from pathlib import Path
from typing import Optional

import click
import pandas as pd
from colorama import Fore, Style

from ..config import Config
from ..config.experiment import ExperimentConfig, load_experiment_config
from ..datadriven import (
    ProrationMode,
    read_history_csv,
    read_observations_csv,
    train,
    write_history_csv,
    write_observations_csv,
)
from ..optimal import export_tables_csv
from ..simulation import (
    build_observation_sets,
    default_threads,
    emit_plot_data,
    generate_history,
    run_baseline_study,
    run_scenario_study,
    run_seed_sweep,
    value_cache,
    write_manifest,
    write_run_outputs,
)
from ..simulation.studies import feature_config, model_seed
from ..utils import info, success


def common_options(func):
    """--config, --out, --seed and --threads shared by the run commands."""
    func = click.option(
        "--threads",
        "-t",
        type=click.IntRange(min=1),
        default=None,
        help="Worker threads for flight simulation (default: number of cores; 1 is serial)",
    )(func)
    func = click.option(
        "--seed", "-s", type=click.IntRange(min=0), default=None, help="Override the config seed"
    )(func)
    func = click.option(
        "--out",
        "-o",
        type=click.Path(file_okay=False, path_type=Path),
        default=Path(Config.DEFAULT_RESULTS_DIR),
        show_default=True,
        help="Results directory",
    )(func)
    func = click.option(
        "--config",
        "-c",
        "config_path",
        type=click.Path(dir_okay=False, path_type=Path),
        required=True,
        help="Experiment config file (TOML, or JSON with a .json suffix)",
    )(func)
    return func


def _load(config_path: Path, seed: Optional[int]) -> ExperimentConfig:
    config = load_experiment_config(config_path, seed)
    info(f"Experiment {config.name}: seed {config.seed}, config hash {config.config_hash()}")
    return config


def _threads(threads: Optional[int]) -> int:
    return threads or default_threads()


def _print_comparison(path: Path) -> None:
    table = pd.read_csv(path)
    header = f"{'scenario':<22}{'total revenue':>16}{'weekly gap':>12}"
    click.echo(f"\n{Fore.YELLOW}{header}{Style.RESET_ALL}")
    for row in table.itertuples(index=False):
        gap = 100 * row.mean_weekly_gap
        click.echo(f"{row.scenario:<22}{row.total_revenue:>16.2f}{gap:>11.2f}%")


@click.command(name="simulate-train-data")
@common_options
@click.option(
    "--volume/--no-volume",
    default=False,
    help="Gate requests on remaining volume while simulating",
)
def simulate_train_data(
    config_path: Path, out: Path, seed: Optional[int], threads: Optional[int], volume: bool
) -> None:
    """Simulate the training flights under the optimal policy and write history.csv."""
    config = _load(config_path, seed)
    history = generate_history(config, _threads(threads), track_volume=volume)
    run_dir = out / config.name / "history"
    path = write_history_csv(history, run_dir / "history.csv")
    write_manifest(run_dir, config, "simulate-train-data")
    success(f"Wrote {len(history)} bookings to {path}")


@click.command(name="build-obs")
@common_options
@click.option(
    "--history",
    "history_path",
    type=click.Path(dir_okay=False, path_type=Path),
    required=True,
    help="Booking history CSV",
)
@click.option(
    "--dimension",
    type=click.Choice(["weight", "volume", "all"]),
    default="all",
    show_default=True,
)
@click.option(
    "--mode",
    type=click.Choice([m.value for m in ProrationMode] + ["all"]),
    default="all",
    show_default=True,
    help="Revenue proration applied before building observations",
)
def build_obs(
    config_path: Path,
    out: Path,
    seed: Optional[int],
    threads: Optional[int],
    history_path: Path,
    dimension: str,
    mode: str,
) -> None:
    """Turn a booking history into bucketed bid-price observations."""
    config = _load(config_path, seed)
    history = read_history_csv(history_path)
    dimensions = ["weight", "volume"] if dimension == "all" else [dimension]
    modes = list(ProrationMode) if mode == "all" else [ProrationMode(mode)]
    sets = build_observation_sets(config, history, [(d, m) for m in modes for d in dimensions])
    run_dir = out / config.name / "observations"
    for key, rows in sets.items():
        dim, prorate_mode = key.split("_", 1)
        path = write_observations_csv(rows, run_dir / f"{key}.csv", dim, prorate_mode)
        success(f"Wrote {len(rows)} observations to {path}")
    write_manifest(run_dir, config, "build-obs")


@click.command(name="train")
@common_options
@click.option(
    "--observations",
    "observations_path",
    type=click.Path(dir_okay=False, path_type=Path),
    required=True,
    help="Observations CSV written by build-obs",
)
def train_model(
    config_path: Path,
    out: Path,
    seed: Optional[int],
    threads: Optional[int],
    observations_path: Path,
) -> None:
    """Train a bid-price estimator on one observation set."""
    config = _load(config_path, seed)
    rows, dimension, mode = read_observations_csv(observations_path)
    model = train(
        rows,
        config.estimator,
        model_seed(config.seed, 0),
        features=feature_config(config, dimension),
        dimension=dimension,
    )
    run_dir = out / config.name / "models"
    path = model.save(run_dir / f"{dimension}_{mode}.toml")
    write_manifest(run_dir, config, "train", notes=[f"observations: {observations_path.name}"])
    success(f"Final training loss {model.metadata['final_loss']:.6g}; model written to {path}")


@click.command(name="eval-baseline")
@common_options
@click.option(
    "--replications",
    "-n",
    type=click.IntRange(min=1),
    default=1,
    show_default=True,
    help="Number of consecutive seeds; more than one runs a seed sweep",
)
def eval_baseline(
    config_path: Path,
    out: Path,
    seed: Optional[int],
    threads: Optional[int],
    replications: int,
) -> None:
    """Compare optimal and data-driven bid prices on a weight-only flight."""
    config = _load(config_path, seed)
    report = run_baseline_study(config, _threads(threads))
    run_dir = write_run_outputs(report, config, out, "eval-baseline")
    _print_comparison(run_dir / "comparison.csv")
    if replications > 1:
        seeds = [config.seed + i for i in range(replications)]
        known = {config.seed: report.mean_gap("data_driven")}
        sweep = run_seed_sweep(config, seeds, _threads(threads), known=known)
        pd.DataFrame({"seed": sweep.seeds, "mean_weekly_gap": sweep.mean_gaps}).to_csv(
            run_dir / "seed_sweep.csv", index=False
        )
        click.echo(
            f"{Fore.CYAN}Mean of mean weekly gaps over {replications} seeds: "
            f"{100 * sweep.mean_of_means:.3f}%{Style.RESET_ALL}"
        )
    success(f"Results written to {run_dir}")


@click.command(name="eval-scenarios")
@common_options
def eval_scenarios(
    config_path: Path, out: Path, seed: Optional[int], threads: Optional[int]
) -> None:
    """Run the weight/volume handling scenarios with common random numbers."""
    config = _load(config_path, seed)
    report = run_scenario_study(config, _threads(threads))
    run_dir = write_run_outputs(report, config, out, "eval-scenarios")
    _print_comparison(run_dir / "comparison.csv")
    success(f"Results written to {run_dir}")


@click.command(name="report")
@click.option(
    "--run",
    "run_dir",
    type=click.Path(file_okay=False, path_type=Path),
    required=True,
    help="Run directory written by eval-baseline or eval-scenarios",
)
def report(run_dir: Path) -> None:
    """Write plot-ready weekly CSV data for a finished run."""
    path = emit_plot_data(run_dir)
    comparison = run_dir / "comparison.csv"
    if comparison.is_file():
        _print_comparison(comparison)
    success(f"Plot data written to {path}")


@click.command(name="dp-dump")
@common_options
@click.option(
    "--departure",
    "-d",
    type=click.IntRange(min=0),
    default=0,
    show_default=True,
    help="Departure index to solve",
)
def dp_dump(
    config_path: Path,
    out: Path,
    seed: Optional[int],
    threads: Optional[int],
    departure: int,
) -> None:
    """Solve one flight's value function and write V and b* to CSV."""
    config = _load(config_path, seed)
    values, bids = value_cache(config).get(departure)
    run_dir = out / config.name / "dp"
    path = export_tables_csv(values, bids, run_dir / f"departure_{departure:04d}.csv")
    write_manifest(run_dir, config, "dp-dump", notes=[f"departure: {departure}"])
    click.echo(
        f"{Fore.CYAN}V(C, T) = {values(values.capacity_units, values.horizon_steps):.2f}"
        f"{Style.RESET_ALL}"
    )
    success(f"Value and bid tables written to {path}")
