"""Exception taxonomy shared by all modules."""


class SlspecError(Exception):
    """Base class for all library errors."""


class GridMismatchError(SlspecError, ValueError):
    """Operands live on grids of different size."""


class BracketError(SlspecError, ValueError):
    """Root finder was given an interval without a sign change."""


class UnsupportedOrderError(SlspecError, ValueError):
    """Angular order outside the supported range."""


class SingularArgumentError(SlspecError, ValueError):
    """Evaluation requested at a point where the function blows up."""


class PicardDivergenceError(SlspecError, RuntimeError):
    """Fixed-point iteration failed to converge (grid too coarse for ||q||)."""


class WronskianAccuracyError(SlspecError, RuntimeError):
    """Wronskian of a solution pair is not constant to the required spread."""


class NearDegenerateError(SlspecError, RuntimeError):
    """Wronskian too close to zero to normalize the singular solution."""


class MissedEigenvalueError(SlspecError, RuntimeError):
    """Sign-change census disagrees with the number of computed eigenvalues."""


class DegenerateEigenvalueError(SlspecError, RuntimeError):
    """phi'(1) vanished at an eigenvalue; the mode cannot be normalized."""
