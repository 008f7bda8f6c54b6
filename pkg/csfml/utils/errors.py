"""
Exception types raised across csfml.
The CLI maps each family to its own exit code (see csfml/cli.py).
"""


class CsfmlError(Exception):
    pass


# cohort
# ----------------------------------------
class CohortError(CsfmlError, ValueError):
    pass


class ParseError(CohortError):
    pass


class DuplicateIdError(CohortError):
    def __init__(self, patient_id, source=''):
        self.patient_id = patient_id
        where = ' in %s' % source if source else ''
        super().__init__("duplicate patient id '%s'%s" % (patient_id, where))


class StagingError(CohortError):
    pass


class TaskError(CohortError):
    pass


class SynthError(CsfmlError, ValueError):
    pass


# statistics
# ----------------------------------------
class StatsError(CsfmlError, ValueError):
    pass


# models
# ----------------------------------------
class ModelSpecError(CsfmlError, ValueError):
    pass


class UnknownModelError(ModelSpecError):
    pass


class ConvergenceError(CsfmlError, RuntimeError):
    def __init__(self, message, worst_violation=None):
        self.worst_violation = worst_violation
        super().__init__(message)

    def __reduce__(self):
        return type(self), (self.args[0], self.worst_violation)


class QueryError(CsfmlError, ValueError):
    pass


class EnsembleError(CsfmlError, ValueError):
    pass


# evaluation
# ----------------------------------------
class FoldError(CsfmlError, ValueError):
    pass


class CrossValidationError(CsfmlError, RuntimeError):
    def __init__(self, fold, cause):
        self.fold = fold
        self.cause = cause
        super().__init__("training failed in fold %i: %s" % (fold, cause))

    def __reduce__(self):
        return type(self), (self.fold, self.cause)


class MetricsError(CsfmlError, ValueError):
    pass


# cli
# ----------------------------------------
class ConfigError(CsfmlError, ValueError):
    pass
