class ChainCoverError(Exception):
    """Base class for every error raised by this package."""


class ParseError(ChainCoverError, ValueError):
    pass


class CycleDetected(ChainCoverError, ValueError):
    pass


class ArgumentError(ChainCoverError, ValueError):
    pass


class SizeLimit(ChainCoverError, ValueError):
    pass


class StaleHandle(ChainCoverError, KeyError):
    pass


class SameHandle(ChainCoverError, ValueError):
    pass


class RankOutOfRange(ChainCoverError, IndexError):
    pass


class SizeOutOfRange(ChainCoverError, IndexError):
    pass


class MalformedFlow(ChainCoverError, ValueError):
    """A flow violates conservation or demands (an upstream bug)."""
