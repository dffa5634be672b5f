"""Exception types shared across the package."""


class AdsQAError(Exception):
    """Base class for every error raised by this package."""


class SchemaError(AdsQAError):
    """A schema file or a record violates the domain schema."""


class IngestError(AdsQAError):
    """A data file cannot be parsed or fails structural validation."""


class RangeUnavailableError(AdsQAError):
    """No values exist for a numeric attribute, so its range is undefined."""


class TrieBuildError(AdsQAError):
    """A phrase was mapped to two different identifiers."""


class TrainingError(AdsQAError):
    """Classifier training input is unusable (e.g. an empty class)."""


class NotTrainedError(AdsQAError):
    """The classifier was asked to classify before any model was trained."""


class AnalysisError(AdsQAError):
    """Condition extraction failed (dangling comparator, dangling negation,
    or a value that fits no attribute)."""


class ContradictionError(AdsQAError):
    """Merged numeric constraints produce an empty interval."""

    def __init__(self, detail: str = ""):
        self.detail = detail
        super().__init__("search retrieved no results" + (f": {detail}" if detail else ""))


class NoConditionsError(AdsQAError):
    """No conditions could be extracted from the question."""
