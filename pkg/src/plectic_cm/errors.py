"""Exception hierarchy.

Errors split into three families: malformed inputs (bad tables, bad
subgroups, bad configs), unsolvable linear-algebra problems, and model
defects (a model whose axiom flags promised something it cannot deliver).
"""

from __future__ import annotations


class PlecticError(Exception):
    """Base class for all errors raised by this package."""


# -- group construction ------------------------------------------------------

class NonAssociative(PlecticError):
    pass


class NoIdentity(PlecticError):
    pass


class NotInvertible(PlecticError):
    pass


class NotASubgroup(PlecticError):
    pass


class ContextMismatch(PlecticError):
    """Two objects built over different contexts were combined."""


# -- abelian linear algebra --------------------------------------------------

class NoSolution(PlecticError):
    """The requested element has no preimage."""


class NotSurjective(PlecticError):
    pass


class NotSplit(PlecticError):
    """The surjection admits no homomorphic section."""


class ConstraintInfeasible(PlecticError):
    """A section exists, but none satisfying the extra value constraints."""


class NotCommuting(PlecticError):
    pass


# -- CM contexts -------------------------------------------------------------

class BadIndex(PlecticError):
    pass


class BadConjugation(PlecticError):
    pass


class InternalError(PlecticError):
    """An invariant that construction should have guaranteed failed later."""


# -- reciprocity models ------------------------------------------------------

class DiagramNotCommuting(PlecticError):
    def __init__(self, square: str, detail: str = ""):
        self.square = square
        super().__init__(f"diagram square {square!r} does not commute" + (f": {detail}" if detail else ""))


class IncompatibleInclusion(PlecticError):
    pass


class NotCartesian(PlecticError):
    """Operation requires a Cartesian square that this model does not have."""


class NotInCMGroup(PlecticError):
    pass


class SignViolation(PlecticError):
    """Model defect: a norm class landed outside its predicted sign class."""


class DeltaOutsideModel(PlecticError):
    pass


class NotInPi0Group(PlecticError):
    pass


# -- configuration -----------------------------------------------------------

class ConfigError(PlecticError):
    pass
