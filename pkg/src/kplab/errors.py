"""Exception types raised across the package."""


class KplabError(ValueError):
    """Base class for all input and precondition errors."""


class DimensionMismatch(KplabError):
    pass


class NonPositiveWeightSum(KplabError):
    pass


class EmptyConfiguration(KplabError):
    pass


class NotAContraction(KplabError):
    def __init__(self, i: int, j: int, ratio: float):
        super().__init__(f"pair ({i}, {j}) expands by a factor {ratio:.17g}")
        self.i = i
        self.j = j
        self.ratio = ratio


class InconsistentCollapse(KplabError):
    def __init__(self, i: int, j: int):
        super().__init__(f"source points {i} and {j} coincide but their targets differ")
        self.i = i
        self.j = j


class BudgetExceeded(KplabError):
    pass


class UnsupportedDimension(KplabError):
    pass


class NonPositiveAlpha(KplabError):
    pass


class NotInRelativeInterior(KplabError):
    pass


class Infeasible(RuntimeError):
    """Internal error: a monotone extension that must exist was not found."""


class BandwidthRequired(KplabError):
    pass


class OperatorNormExceeded(KplabError):
    pass


class MaxIterExceeded(RuntimeWarning):
    pass
