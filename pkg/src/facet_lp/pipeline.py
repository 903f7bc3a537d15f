"""Pipeline class implements functionality that is common to all experiment pipelines."""
from logging import Logger
from typing import List


class Pipeline:
    """Pipeline template for different workflows."""

    def __init__(self, log: Logger) -> None:
        """Initialize parameters common to all pipelines.

        Args:
            log (Logger): logger object
        """
        self.log = log
        self.errors: List[str] = []

    def record_error(self, context: str, err: Exception) -> None:
        """Log a non-breaking error with its traceback and keep it for the final report.

        Args:
            context (str): where the error happened, e.g. the protocol cell
            err (Exception): the caught exception
        """
        message = f"{context} failed. Caught {type(err).__name__}: {err}"
        self.log.exception(message)
        self.errors.append(message)
