import click

from .. import __version__
from ..utils import setup_logging
from .commands import (
    build_obs,
    dp_dump,
    eval_baseline,
    eval_scenarios,
    report,
    simulate_train_data,
    train_model,
)


def create_cli() -> click.Group:
    """Create the main CLI group with all commands"""

    @click.group()
    @click.version_option(__version__)
    def cli():
        """Single-leg air cargo revenue management lab."""
        setup_logging()

    cli.add_command(simulate_train_data)
    cli.add_command(build_obs)
    cli.add_command(train_model)
    cli.add_command(eval_baseline)
    cli.add_command(eval_scenarios)
    cli.add_command(report)
    cli.add_command(dp_dump)

    return cli
