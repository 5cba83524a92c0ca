class RamseyError(Exception):
    """Base class for every domain error raised by the engine"""


class DimensionMismatchError(RamseyError, ValueError):
    pass


class PreconditionError(RamseyError, ValueError):
    pass


class AmbiguousLiftError(RamseyError):
    """Some axis displacement equals R/2, so two lifts are equally near"""

    def __init__(self, axis: int, displacement: float):
        super().__init__(f"ambiguous lift on axis {axis}: displacement {displacement!r} equals R/2")
        self.axis = axis
        self.displacement = displacement


class NotSeparatedError(RamseyError, ValueError):
    def __init__(self, i: int, j: int, distance: float, t: float):
        super().__init__(f"points {i} and {j} are at distance {distance!r} < {t!r}")
        self.pair = (i, j)
        self.distance = distance


class GridTooCoarseError(PreconditionError):
    pass


class CertificationError(RamseyError):
    pass


class UncertifiedSetError(RamseyError):
    pass


class StorageError(RamseyError):
    pass
