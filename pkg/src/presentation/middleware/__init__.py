from .error_handler import EXIT_IO, EXIT_VALIDATION, error_handler

__all__ = ["error_handler", "EXIT_VALIDATION", "EXIT_IO"]
