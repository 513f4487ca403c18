"""Exception hierarchy.

Three branches matter for the CLI exit codes: ``ConfigError`` (exit 2),
``DataError`` (exit 3) and ``NumericalError`` (exit 4).
"""


class MixedAEError(Exception):
    """Base class for all package errors."""


class ConfigError(MixedAEError):
    """Invalid configuration, flags, or construction parameters."""


class DataError(MixedAEError):
    """Invalid or degenerate data."""


class NumericalError(MixedAEError):
    """Numerical failure during computation."""


# -- tabular ------------------------------------------------------------

class MissingValue(DataError):
    """A cell is empty; imputation is out of scope."""


class UnknownCategory(DataError):
    """A cell value is not in the declared category list."""


class ShapeError(DataError):
    """Array or row dimensions do not line up."""


class SchemaMismatch(DataError):
    """Two datasets (or a dataset and an encoder) disagree on schema."""


class EmptyCategory(DataError):
    """A schema category has zero occurrences on the fitting split."""


class ConstantNumeric(DataError):
    """A numeric column is constant on the fitting split."""


class InvalidContext(ConfigError):
    """Unknown synthetic-data context name."""


class FractionOutOfRange(ConfigError):
    """Split fraction does not leave both splits non-empty."""


# -- nn / models --------------------------------------------------------

class DimensionError(ConfigError):
    """Bad network dimension list."""


class DegenerateWidth(ConfigError):
    """An autoencoder layer width collapses at or below the latent width."""


class NonFinite(NumericalError):
    """A loss or parameter became NaN/inf during training."""


# -- losses -------------------------------------------------------------

class DegenerateCategory(DataError):
    """Category count of 0 or n makes a balance weight singular."""


class NonBinaryTarget(DataError):
    """A categorical target entry is not exactly 0 or 1."""


class AlphaOutOfRange(ConfigError):
    """Blend coefficient outside [0, 1]."""


# -- metrics ------------------------------------------------------------

class SingleClassTruth(DataError):
    """Binary truth vector contains a single class."""


class LengthMismatch(DataError):
    """Paired vectors differ in length (or are too short)."""


class ZeroVariance(DataError):
    """A statistic is undefined because a variance term is zero."""


class DegenerateTable(DataError):
    """Contingency table has fewer than 2 observed levels on a side."""


class EmptyGroup(DataError):
    """Fewer than 2 non-empty groups for a grouped statistic."""


class SingleCluster(DataError):
    """Silhouette needs at least 2 clusters."""
