"""Exception types shared across the toolkit.

Every domain failure raised by this package derives from ``IlkitError`` so
that callers (and the CLI) can distinguish expected input problems from bugs.
"""

from __future__ import annotations


class IlkitError(Exception):
    """Base class for all domain errors raised by ilkit."""

    code = "error"


class SmilesSyntaxError(IlkitError):
    """Malformed SMILES text. Carries the 0-based position of the offending token."""

    code = "smiles-syntax"

    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class ValenceError(IlkitError):
    """Atom bonding inconsistent with the valence rules for its element/charge."""

    code = "valence"


class AromaticityError(IlkitError):
    """Aromatic flags that cannot be reconciled with any perceived aromatic ring."""

    code = "aromaticity"


class DescriptorError(IlkitError):
    """A descriptor contribution table has no entry for an atom."""

    code = "descriptor"


class RecordError(IlkitError):
    """Invalid system record (bad role combination, units, duplicates, ...)."""

    code = "record"


class SchemaError(IlkitError):
    """Malformed data file: wrong header, row shape, or checksum."""

    code = "schema"


class SplitError(IlkitError):
    """Cross-validation split cannot be constructed as requested."""

    code = "split"


class MetricError(IlkitError):
    """Metric undefined for the given inputs (constant vectors, ties, ...)."""

    code = "metric"


class TrainingError(IlkitError):
    """Model fitting failed (singular system, divergence, bad config)."""

    code = "training"


class PredictionError(IlkitError):
    """Prediction request incompatible with the model."""

    code = "prediction"


class ExternalPredictorError(IlkitError):
    """Child-process predictor misbehaved (exit, malformed output, timeout)."""

    code = "external-predictor"


class SearchError(IlkitError):
    """Beam search / screening could not proceed."""

    code = "search"


class ConfigError(IlkitError):
    """Invalid run or model configuration."""

    code = "config"
