from .settings import settings
from .logging import logger

__all__ = ["settings", "logger"]
