"""Exception hierarchy shared by every module."""


class GroupError(Exception):
    """Base class for all library errors."""


class CapExceeded(GroupError):
    pass


class BudgetExceeded(GroupError):
    pass


class IncompatiblePayloads(GroupError):
    pass


class ElementNotInAmbient(GroupError):
    pass


class AmbientMismatch(GroupError):
    pass


class NotNormal(GroupError):
    pass


class DegreeMismatch(GroupError):
    pass


class NotTransitive(GroupError):
    pass


class ShapeMismatch(GroupError):
    pass


class BadFactorIndex(GroupError):
    pass


class HypothesisViolated(GroupError):
    pass


class SylowNotContained(GroupError):
    pass


class BadPrimePower(GroupError):
    pass


class StructureCheckFailed(GroupError):
    pass


class ParseError(GroupError):
    pass
