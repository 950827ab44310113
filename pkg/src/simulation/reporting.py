"""
Aggregation and result files.

Layout of one run directory (``<out>/<experiment>/<study>/``):

    manifest.toml             config hash, seed, versions, policies
    comparison.csv            one row per policy
    history.csv               training bookings
    observations/*.csv        observation sets per dimension and proration
    models/*.toml             trained estimators
    <policy>/flights.csv      one row per flight
    <policy>/weekly.csv       weekly revenue and gap to the reference
    <policy>/summary.txt      human-readable summary
    plot_weekly.csv           tidy (week, scenario, revenue, gap), written by emit_plot_data
"""

import logging
from dataclasses import asdict
from datetime import datetime, timezone
from importlib import metadata
from pathlib import Path
from typing import Dict, List, Sequence

import numpy as np
import pandas as pd
import toml

from .. import __version__
from ..config import Config
from ..config.experiment import ExperimentConfig
from ..datadriven import write_history_csv, write_observations_csv
from ..errors import DataError
from ..utils.files import write_toml
from .flight import FlightResult

logger = logging.getLogger(__name__)

DAYS_PER_WEEK = 7
WEEKLY_COLUMNS = ["week", "scenario", "revenue", "gap"]


def aggregate_weekly(results: Sequence[FlightResult]) -> pd.Series:
    """Total revenue per flight week; week w holds departures 7w .. 7w + 6."""
    frame = pd.DataFrame(
        {
            "week": [r.departure_index // DAYS_PER_WEEK for r in results],
            "revenue": [r.revenue for r in results],
        }
    )
    return frame.groupby("week")["revenue"].sum().sort_index()


def weekly_gaps(reference: pd.Series, alternative: pd.Series) -> pd.Series:
    """(reference - alternative) / reference per week; weeks with no reference revenue give 0."""
    ref, alt = reference.align(alternative, fill_value=0.0)
    gap = (ref - alt) / ref.where(ref != 0.0)
    return gap.fillna(0.0)


def mean_weekly_gap(
    reference: Sequence[FlightResult], alternative: Sequence[FlightResult]
) -> float:
    return float(weekly_gaps(aggregate_weekly(reference), aggregate_weekly(alternative)).mean())


def weekly_frame(results: Dict[str, List[FlightResult]], reference: str) -> pd.DataFrame:
    """Tidy weekly revenue and gap for every policy, policies in insertion order."""
    ref = aggregate_weekly(results[reference])
    parts = []
    for name, rows in results.items():
        series = aggregate_weekly(rows)
        parts.append(
            pd.DataFrame(
                {
                    "week": series.index.astype(int),
                    "scenario": name,
                    "revenue": series.to_numpy(),
                    "gap": weekly_gaps(ref, series).reindex(series.index).to_numpy(),
                }
            )
        )
    return pd.concat(parts, ignore_index=True)[WEEKLY_COLUMNS]


def flights_frame(rows: Sequence[FlightResult]) -> pd.DataFrame:
    return pd.DataFrame([asdict(r) for r in rows])


def comparison_table(results: Dict[str, List[FlightResult]], reference: str) -> pd.DataFrame:
    """Per-policy totals, mean weekly revenue and gaps to the reference policy."""
    ref_total = sum(r.revenue for r in results[reference])
    rows = []
    for name, flights in results.items():
        weekly = aggregate_weekly(flights)
        total = sum(r.revenue for r in flights)
        rows.append(
            {
                "scenario": name,
                "total_revenue": total,
                "mean_weekly_revenue": float(weekly.mean()),
                "total_gap": (ref_total - total) / ref_total if ref_total else 0.0,
                "mean_weekly_gap": mean_weekly_gap(results[reference], flights),
                "weight_load_factor": float(np.mean([r.weight_load_factor for r in flights])),
                "volume_load_factor": float(np.mean([r.volume_load_factor for r in flights])),
            }
        )
    return pd.DataFrame(rows)


def package_versions() -> Dict[str, str]:
    versions = {"cargo-rm-lab": __version__}
    for name in ("numpy", "scipy", "pandas", "click", "toml"):
        try:
            versions[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            versions[name] = "unknown"
    return versions


def write_manifest(
    run_dir: Path,
    config: ExperimentConfig,
    command: str,
    policies: Sequence[str] = (),
    reference: str = "",
    notes: Sequence[str] = (),
) -> Path:
    """Record what produced a run directory; contains no timestamps."""
    document = {
        "run": {
            "command": command,
            "experiment": config.name,
            "seed": config.seed,
            "config_hash": config.config_hash(),
            "csv_schema_version": Config.CSV_SCHEMA_VERSION,
            "policies": list(policies),
            "reference": reference,
            "notes": list(notes),
        },
        "versions": package_versions(),
        "config": config.to_dict(),
    }
    return write_toml(document, Path(run_dir) / "manifest.toml")


def _summary_text(
    name: str,
    rows: Sequence[FlightResult],
    comparison: pd.DataFrame,
    config: ExperimentConfig,
    reference: str,
    notes: Sequence[str],
) -> str:
    row = comparison.set_index("scenario").loc[name]
    lines = [
        f"experiment: {config.name}",
        f"policy: {name}",
        f"seed: {config.seed}",
        f"config_hash: {config.config_hash()}",
        f"reference: {reference}",
        *(f"note: {note}" for note in notes),
        f"flights: {len(rows)}",
        f"total_revenue: {row['total_revenue']:.2f}",
        f"mean_weekly_revenue: {row['mean_weekly_revenue']:.2f}",
        f"mean_weekly_gap: {100 * row['mean_weekly_gap']:.3f}%",
        f"total_gap: {100 * row['total_gap']:.3f}%",
        f"weight_load_factor: {row['weight_load_factor']:.4f}",
        f"generated: {datetime.now(timezone.utc).isoformat(timespec='seconds')}",
    ]
    return "\n".join(lines) + "\n"


def write_run_outputs(report, config: ExperimentConfig, out_dir: Path, command: str) -> Path:
    """
    Write every artifact of a finished study.

    Args:
        report: StudyReport from a study run
        config: Experiment configuration
        out_dir: Results root
        command: CLI command recorded in the manifest

    Returns:
        Path: The run directory
    """
    run_dir = Path(out_dir) / config.name / report.kind
    run_dir.mkdir(parents=True, exist_ok=True)
    comparison = comparison_table(report.results, report.reference)
    weekly = weekly_frame(report.results, report.reference)
    for name, rows in report.results.items():
        policy_dir = run_dir / name
        policy_dir.mkdir(parents=True, exist_ok=True)
        flights_frame(rows).to_csv(policy_dir / "flights.csv", index=False)
        weekly[weekly["scenario"] == name].to_csv(policy_dir / "weekly.csv", index=False)
        (policy_dir / "summary.txt").write_text(
            _summary_text(name, rows, comparison, config, report.reference, report.notes)
        )
    comparison.to_csv(run_dir / "comparison.csv", index=False)
    if report.history:
        write_history_csv(report.history, run_dir / "history.csv")
    for key, observations in report.observations.items():
        dimension, mode = key.split("_", 1)
        path = run_dir / "observations" / f"{key}.csv"
        write_observations_csv(observations, path, dimension, mode)
    for key, model in report.models.items():
        model.save(run_dir / "models" / f"{key}.toml")
    write_manifest(
        run_dir, config, command, list(report.results), report.reference, report.notes
    )
    logger.info("Wrote %s results to %s", report.kind, run_dir)
    return run_dir


def emit_plot_data(run_dir: Path) -> Path:
    """
    Collect every policy's weekly.csv into one tidy plot_weekly.csv.

    Raises:
        DataError: If the run directory is incomplete
    """
    run_dir = Path(run_dir)
    manifest_path = run_dir / "manifest.toml"
    if not manifest_path.is_file():
        raise DataError(f"No manifest.toml in {run_dir}; is the run complete?")
    try:
        run = toml.load(manifest_path)["run"]
        policies = list(run["policies"])
    except (toml.TomlDecodeError, KeyError) as e:
        raise DataError(f"Unreadable manifest {manifest_path}: {e}") from e
    if not policies:
        raise DataError(f"{manifest_path} lists no policies")
    parts = []
    for name in policies:
        path = run_dir / name / "weekly.csv"
        if not path.is_file():
            raise DataError(f"Incomplete run: missing {path}")
        frame = pd.read_csv(path)
        missing = [c for c in WEEKLY_COLUMNS if c not in frame.columns]
        if missing:
            raise DataError(f"{path} is missing columns: {', '.join(missing)}")
        parts.append(frame[WEEKLY_COLUMNS])
    out = run_dir / "plot_weekly.csv"
    pd.concat(parts, ignore_index=True).to_csv(out, index=False)
    return out
