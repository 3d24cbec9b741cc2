import functools

import typer
from pydantic import ValidationError
from rich.console import Console

from src.infrastructure.config import logger
from src.infrastructure.config.experiment import offending_keys

EXIT_VALIDATION = 1
EXIT_IO = 2

console = Console(stderr=True)


def error_handler(func):
    """Map exceptions raised by a CLI command to exit codes.

    ValueError and schema violations exit with 1, OSError with 2 and
    anything unexpected with 1 after logging the traceback.
    """
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except typer.Exit:
            raise
        except ValidationError as e:
            keys = ", ".join(offending_keys(e))
            logger.error(f"Invalid configuration: {keys}")
            console.print(f"[red]✗ Invalid configuration keys:[/red] {keys}")
            raise typer.Exit(code=EXIT_VALIDATION)
        except ValueError as e:
            logger.error(f"ValueError: {str(e)}")
            console.print(f"[red]✗ Error:[/red] {str(e)}")
            raise typer.Exit(code=EXIT_VALIDATION)
        except OSError as e:
            logger.error(f"I/O error: {str(e)}")
            console.print(f"[red]✗ I/O error:[/red] {str(e)}")
            raise typer.Exit(code=EXIT_IO)
        except Exception as e:
            logger.error(f"Unhandled error: {str(e)}", exc_info=True)
            console.print(f"[red]✗ Unexpected error:[/red] {str(e)}")
            raise typer.Exit(code=EXIT_VALIDATION)
    return wrapper
