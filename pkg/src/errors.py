"""
Exception hierarchy for shrinkage path analysis.
"""


class ShrinkageError(ValueError):
    """Base class for every data, model and estimation failure."""


class DataError(ShrinkageError):
    """Input table cannot be turned into a standardized model."""


class RankDeficiencyError(ShrinkageError):
    """The X-matrix does not have full column rank."""

    def __init__(self, deficient: int, smallest: float, largest: float):
        self.deficient = deficient
        super().__init__(
            f"X is rank deficient by {deficient} dimension(s): "
            f"smallest singular value {smallest:.3e} vs largest {largest:.3e}"
        )


class PathError(ShrinkageError):
    """Invalid shrinkage factors, m-extents or path kind."""


class EstimationError(ShrinkageError):
    """A risk or likelihood estimate is undefined for the given data."""


class InferenceError(ShrinkageError):
    """Invalid confidence-region or distribution request."""


class RenderError(ShrinkageError):
    """Unknown trace type or unusable plot request."""


class ExportError(ShrinkageError):
    """Trace files could not be written."""

    def __init__(self, path, reason):
        self.path = path
        super().__init__(f"Failed to write {path}: {reason}")


class ConvergenceError(ShrinkageError):
    """A Jacobi iteration hit its sweep limit."""
