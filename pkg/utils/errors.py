"""
Exceptions raised across the toolkit.

Every error derives from HypergraphError so the CLI can catch one type.
"""


class HypergraphError(Exception):
    """Base class for all toolkit errors"""


class OutOfRange(HypergraphError):
    """A vertex index is negative or not below the vertex count"""


class Degenerate(HypergraphError):
    """A triple repeats a vertex"""


class SameVertex(HypergraphError):
    """A pair query was given the same vertex twice"""


class TooLarge(HypergraphError):
    """Input exceeds a configured size limit"""


class Overflow(HypergraphError):
    """A construction would exceed the vertex limit"""


class AlphaOutOfRange(HypergraphError):
    """Crossed-blowup parameter outside the open interval (0, 1/2)"""


class UnknownName(HypergraphError):
    """Catalog lookup for a name that does not exist"""


class BudgetExceeded(HypergraphError):
    """A search ran out of nodes before reaching a verdict"""


class ArityMismatch(HypergraphError):
    """A vertex map does not match the vertex counts of its problem"""


class WrongShape(HypergraphError):
    """A matrix has the wrong dimensions for the check"""


class LengthMismatch(HypergraphError):
    """A weight vector does not match the vertex count"""


class NegativeWeight(HypergraphError):
    """A weight vector has a negative entry"""


class EqualParameters(HypergraphError):
    """Two parameters that must differ are equal"""


class InvalidSpec(HypergraphError):
    """A construction or problem spec violates its invariants"""


class ParseError(HypergraphError, ValueError):
    """A .3g file violates the text format"""
