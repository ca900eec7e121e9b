"""Exception taxonomy. The CLI maps these onto categorized exit codes."""


class AfdscError(Exception):
    """Base class for all package errors."""


class ConfigError(AfdscError):
    """Invalid configuration (bad field values, version mismatch, unknown keys)."""


class DataError(AfdscError):
    """Invalid input data."""


class CorpusFormatError(DataError):
    """A corpus/query line failed to parse; carries the 1-based line number."""

    def __init__(self, path, line_no, message):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = str(path)
        self.line_no = line_no


class CorpusValidationError(DataError):
    """A parsed record violated a document invariant."""


class TrainingDivergedError(AfdscError):
    """Loss became non-finite; carries step diagnostics."""

    def __init__(self, step, components):
        parts = ", ".join(f"{k}={v!r}" for k, v in components.items())
        super().__init__(f"non-finite loss at step {step}: {parts}")
        self.step = step
        self.components = components


class CheckpointError(AfdscError):
    """Checkpoint file unreadable or from an incompatible format version."""
