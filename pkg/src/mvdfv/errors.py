"""Exception hierarchy shared by all mvdfv modules."""


class MvdError(Exception):
    """Base class for every error raised by mvdfv."""


# geometry
class DegenerateTriangle(MvdError):
    pass


class TooFewVertices(MvdError):
    pass


class NegativeArea(MvdError):
    pass


class NonIntersecting(MvdError):
    pass


class NonOrthogonal(MvdError):
    def __init__(self, cosine):
        super().__init__(f"segments are not orthogonal: |cos| = {cosine:.3e}")
        self.cosine = cosine


# mesh input / generation
class MeshFormatError(MvdError):
    """Base for problems found while reading an MSH file."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class UnsupportedVersion(MeshFormatError):
    pass


class MalformedSection(MeshFormatError):
    pass


class NonPlanarNode(MeshFormatError):
    pass


class NoTriangles(MeshFormatError):
    pass


class AcutenessNotAchieved(MvdError):
    def __init__(self, report):
        super().__init__(f"mesh is not acute after smoothing: {report}")
        self.report = report


class InvalidMesh(MvdError):
    pass


# dual mesh
class NonAcuteMesh(MvdError):
    def __init__(self, report):
        super().__init__(f"mesh has obtuse or right triangles: {report}")
        self.report = report


class CircumcenterOutsideTriangle(MvdError):
    pass


class ZeroLengthDiagonal(MvdError):
    pass


# fields / operators / system
class MeshMismatch(MvdError):
    pass


class NonSpdTensor(MvdError):
    def __init__(self, cell, tensor=None):
        super().__init__(f"tensor at cell {cell} is not symmetric positive definite")
        self.cell = cell
        self.tensor = tensor


class NegativeReaction(MvdError):
    pass


class NotConverged(MvdError):
    def __init__(self, iterations, residual):
        super().__init__(
            f"CG did not converge in {iterations} iterations "
            f"(relative residual {residual:.3e})"
        )
        self.iterations = iterations
        self.residual = residual


class BreakdownNonSpd(MvdError):
    pass


# harness
class InsufficientLevels(MvdError):
    pass


class ConfigError(MvdError):
    pass
