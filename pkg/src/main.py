import sys
from typing import Optional, Sequence

import click

from .cli.parser import create_cli
from .errors import DataError, InvariantViolation, ParameterError
from .utils import error

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INVARIANT = 3


def main(args: Optional[Sequence[str]] = None) -> int:
    """
    Run the command line and map failures to exit codes.

    Returns:
        int: 0 on success, 1 on usage errors, 2 on data or config errors,
        3 on internal invariant violations
    """
    cli = create_cli()
    try:
        result = cli.main(args=list(args) if args is not None else None, standalone_mode=False)
    except click.UsageError as e:
        e.show()
        return EXIT_USAGE
    except click.Abort:
        error("Aborted")
        return EXIT_USAGE
    except (DataError, ParameterError) as e:
        error(str(e))
        return EXIT_DATA
    except InvariantViolation as e:
        error(f"Internal invariant violated: {e}")
        return EXIT_INVARIANT
    # --help and --version exit through click with their own code
    return result if isinstance(result, int) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
