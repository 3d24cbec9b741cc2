import logging

from rich.console import Console
from rich.logging import RichHandler

from src.infrastructure.config.settings import settings


def setup_logging(level: str = settings.log_level) -> logging.Logger:
    """Configure the pipeline logger.

    Records go to stderr so command output on stdout stays parseable.
    """
    log = logging.getLogger(settings.app_name)
    log.setLevel(getattr(logging, level.upper(), logging.INFO))
    if not log.handlers:
        handler = RichHandler(console=Console(stderr=True), show_path=False, markup=False)
        handler.setFormatter(logging.Formatter("%(message)s", datefmt="[%X]"))
        log.addHandler(handler)
    log.propagate = False
    return log


logger = setup_logging()
