"""Exception hierarchy for the toolkit.

Every error carries a stable ``code`` (its class name) so the CLI can emit
machine-parsable failures.
"""


class LoadBenchError(Exception):
    """Base class for all toolkit errors."""

    @property
    def code(self) -> str:
        return type(self).__name__


# --- data layer ---------------------------------------------------------

class MissingStaticFeatures(LoadBenchError):
    """A building in the time-series file has no static-feature row."""


class MalformedSeries(LoadBenchError):
    """Non-uniform spacing, duplicate timestamps, or inconsistent lengths."""


class BadValue(LoadBenchError):
    """Non-finite, negative, or out-of-registry value in raw input."""


class InsufficientData(LoadBenchError):
    """Segment too short to produce at least one window."""


class DegenerateFeature(LoadBenchError):
    """A feature has zero standard deviation on the train split."""


class SchemaMismatch(LoadBenchError):
    """Data and fitted statistics (or checkpoint and windows) disagree."""


# --- curation ------------------------------------------------------------

class PoolTooSmall(LoadBenchError):
    """Candidate pool cannot satisfy the requested selection."""


class UndefinedCorrelation(LoadBenchError):
    """Pearson correlation undefined (zero variance across buildings)."""


class SelectionOverflow(LoadBenchError):
    """Requested more features than the report contains."""


# --- metrics -------------------------------------------------------------

class ShapeError(LoadBenchError):
    """Prediction and target shapes do not match."""


class EmptyEvaluation(LoadBenchError):
    """No (window, step) pairs to evaluate."""


# --- model zoo -----------------------------------------------------------

class UnknownArchitecture(LoadBenchError):
    """Architecture tag not in the registry."""


class BadHyperparameters(LoadBenchError):
    """Inconsistent or invalid hyperparameter combination."""


# --- trainer -------------------------------------------------------------

class DivergenceError(LoadBenchError):
    """Training loss became non-finite.

    Carries the last finite parameter snapshot and the truncated log so a
    run can be diagnosed post mortem.
    """

    def __init__(self, message, last_state=None, log=None):
        super().__init__(message)
        self.last_state = last_state
        self.log = log


class AllDiverged(LoadBenchError):
    """Every learning-rate candidate diverged."""


# --- cli -----------------------------------------------------------------

class ConfigError(LoadBenchError):
    """Invalid experiment configuration; message names the field path."""


class BadIndex(LoadBenchError):
    """Requested building or window index out of range."""


class AlignmentError(LoadBenchError):
    """External forecast file does not align with the test windows."""


class RunLocked(LoadBenchError):
    """Another process holds the run-directory lock."""
