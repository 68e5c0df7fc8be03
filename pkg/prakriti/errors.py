"""
Prakriti Errors
===============

Exception hierarchy shared by every stage of the pipeline.

Each error can carry the pipeline stage it was raised in (``load``,
``impute``, ``select``, ``fit`` ...) so the command line can report
``error [stage]: message`` without guessing.

Author: [Your Name]
License: MIT
"""

from typing import Optional


class PrakritiError(Exception):
    """Base class for all package errors."""

    def __init__(self, message: str, stage: Optional[str] = None):
        super().__init__(message)
        self.message = message
        self.stage = stage

    def with_stage(self, stage: str) -> "PrakritiError":
        """Tag the error with a stage unless an inner stage already claimed it."""
        if self.stage is None:
            self.stage = stage
        return self

    def __str__(self) -> str:
        if self.stage:
            return f"[{self.stage}] {self.message}"
        return self.message


class ArgumentError(PrakritiError, ValueError):
    """Invalid argument value (out of range, wrong length, unknown id)."""


class IngestError(PrakritiError):
    """Malformed input file, e.g. a ragged CSV row."""


class SchemaError(PrakritiError):
    """Header or column structure does not match what was expected."""


class ImputationError(PrakritiError):
    """Missing values cannot be imputed."""


class StateError(PrakritiError):
    """Operation called on data in the wrong state (e.g. before imputation)."""


class InitializationError(PrakritiError):
    """Clustering cannot be initialised (too few distinct records)."""


class FitError(PrakritiError):
    """A model cannot be fitted on the given training data."""


class PruneError(PrakritiError):
    """Reduced-error pruning cannot run."""


class SelectionError(PrakritiError):
    """A result selection matched nothing."""


class ConfigError(PrakritiError):
    """Experiment configuration file is invalid."""


class ModelFormatError(PrakritiError):
    """Serialized model has an unknown version or layout."""
