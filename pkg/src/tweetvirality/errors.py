"""Shared exception types."""


class ConfigError(ValueError):
    """Invalid configuration value, unknown feature/backbone name, etc."""


class CorpusValidationError(ValueError):
    """One or more corpus lines failed schema validation.

    Carries the full line-numbered error list in ``errors``.
    """

    def __init__(self, errors):
        self.errors = list(errors)
        lines = "; ".join(str(e) for e in self.errors[:5])
        more = f" (+{len(self.errors) - 5} more)" if len(self.errors) > 5 else ""
        super().__init__(f"{len(self.errors)} invalid record(s): {lines}{more}")


class CheckpointError(RuntimeError):
    """Checkpoint missing, corrupt, or inconsistent with the config."""


class DivergenceError(RuntimeError):
    """Training produced a non-finite loss."""
