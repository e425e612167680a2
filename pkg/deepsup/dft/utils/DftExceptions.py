##
# File:    DftExceptions.py
# Date:    02-Oct-2026
#
# Updates:
##
"""
Exception classes raised by the deep supervision fine-tuning toolkit.

Every failure the library reports derives from DftError so callers (and the
command-line front end) can catch a single base class.

"""
__docformat__ = "restructuredtext en"
__author__ = "DFT toy developers"
__license__ = "Apache 2.0"
__version__ = "V0.001"


class DftError(Exception):
    """Base class for all toolkit errors."""


class DimensionError(DftError):
    """Operand shapes are incompatible."""

    def __init__(self, opName, shapeA, shapeB=None, detail=None):
        self.opName = opName
        self.shapeA = tuple(shapeA) if shapeA is not None else None
        self.shapeB = tuple(shapeB) if shapeB is not None else None
        msg = "%s: incompatible shapes %s and %s" % (opName, self.shapeA, self.shapeB)
        if detail:
            msg += " (%s)" % detail
        super(DimensionError, self).__init__(msg)


class TokenIndexError(DftError, IndexError):
    """A token id lies outside the vocabulary."""


class ContractError(DftError):
    """A call violates a documented precondition."""


class SequenceLengthError(ContractError):
    """A token sequence exceeds the model context."""


class EmptySupervisionError(DftError):
    """A loss mask selects no position."""


class EmptyPoolError(DftError):
    """A pooling mask selects no row."""


class DegenerateVectorError(DftError):
    """A cosine operand has zero norm."""


class NonFiniteError(DftError):
    """A NaN or infinity reached a value or gradient."""


class TrainingDivergedError(NonFiniteError):
    """Training produced a non-finite loss; the last good state was kept."""

    def __init__(self, msg, step=None, lastGoodPath=None):
        super(TrainingDivergedError, self).__init__(msg)
        self.step = step
        self.lastGoodPath = lastGoodPath


class InsufficientStructureError(DftError):
    """An entropy curve shows fewer than two usable drops."""

    def __init__(self, msg, profile=None):
        super(InsufficientStructureError, self).__init__(msg)
        self.profile = profile


class CheckpointVersionError(DftError):
    """A checkpoint header is missing, corrupt or of an unsupported version."""


class DatasetParseError(DftError):
    """A dataset line could not be parsed."""

    def __init__(self, msg, lineNumber=None, path=None):
        if lineNumber is not None:
            msg = "line %d: %s" % (lineNumber, msg)
        if path is not None:
            msg = "%s: %s" % (path, msg)
        super(DatasetParseError, self).__init__(msg)
        self.lineNumber = lineNumber
        self.path = path


class ConfigError(DftError):
    """A configuration file or object is invalid."""


class VocabMismatchError(DftError):
    """Checkpoint and dataset disagree on the vocabulary."""


class EmptySplitError(DftError):
    """An evaluation split holds no example."""
