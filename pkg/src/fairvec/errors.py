"""Exception hierarchy.

Two broad categories matter to callers (and to the CLI exit codes):
``InputError`` for anything wrong with files, schemas, or arguments, and
``ComputationError`` for numerically degenerate or infeasible work on
otherwise valid inputs.
"""


class FairvecError(Exception):
    """Base class for all fairvec errors."""


class InputError(FairvecError):
    """Bad user input: missing files, malformed formats, schema violations."""


class FormatError(InputError):
    """An embedding file could not be parsed or written."""


class LexiconError(InputError):
    """A lexicon or sentiment word list violates its schema."""


class ComputationError(FairvecError):
    """A computation cannot proceed on the given (valid) inputs."""


class DegenerateInputError(ComputationError):
    """Inputs are too degenerate to produce a meaningful result."""


class ResolutionError(ComputationError):
    """Resolving a lexicon against a store left required sets empty."""


class EmptyNullSpaceError(ComputationError):
    """The stacked attribute matrix has no null space to translate into."""
