"""Exception types shared across the package."""


class NucleationError(Exception):
    """Base class for all package errors."""


class MixedParity(NucleationError):
    pass


class NotBoundaryPoint(NucleationError):
    pass


class DegenerateBoundary(NucleationError):
    def __init__(self, points, reason="degenerate boundary"):
        self.points = sorted(points)
        super().__init__(f"{reason}: {self.points[:12]}")


class EmptySet(NucleationError):
    pass


class DegeneratePolygon(NucleationError):
    pass


class VertexOffLattice(NucleationError):
    pass


class EmptyPrevious(NucleationError):
    pass


class WindowTooLarge(NucleationError):
    def __init__(self, size, cap):
        self.size, self.cap = size, cap
        super().__init__(f"window has {size} free cells, cap is {cap}")


class NumericalMargin(NucleationError):
    def __init__(self, cell, margin):
        self.cell, self.margin = cell, margin
        super().__init__(f"toggle margin {margin!r} at {cell} is within tolerance at a singular alpha")


class HypothesisViolated(NucleationError):
    def __init__(self, which):
        self.which = list(which)
        super().__init__("hypotheses violated: " + ", ".join(self.which))

    @property
    def reason(self):
        return self.which[0]


class SingularAlpha(NucleationError):
    def __init__(self, alpha, nearest):
        self.alpha, self.nearest = alpha, nearest
        super().__init__(f"alpha={alpha} is singular (nearest singular value {nearest})")


class SolverError(NucleationError):
    pass
