"""Exception types shared across the package."""


class TacpressError(Exception):
    """Base class for all package errors."""


class NonpositiveThreshold(TacpressError):
    """Press threshold must be strictly positive."""


class JointLimitViolation(TacpressError):
    def __init__(self, joint_index: int, value: float, lo: float, hi: float):
        self.joint_index = joint_index
        super().__init__(
            f"joint {joint_index} at {value:.4f} rad outside [{lo:.4f}, {hi:.4f}]"
        )


class Unreachable(TacpressError):
    """Inverse kinematics could not reach the target within tolerance."""

    def __init__(self, finger: str, residual_mm: float):
        self.finger = finger
        self.residual_mm = residual_mm
        super().__init__(f"{finger}: residual {residual_mm:.4f} mm after max iterations")


class SingularStiffness(TacpressError):
    """Stiffness matrix is not invertible."""


class UnknownSize(TacpressError):
    """Syringe size label not in the geometry table."""


class IncompleteTrace(TacpressError):
    """Episode trace did not terminate; outcome is undefined."""


class ExpertStarvation(TacpressError):
    """Scripted expert could not produce enough successful episodes."""


class ShapeMismatch(TacpressError):
    """Array shape does not match the policy configuration."""


class NonFiniteLoss(TacpressError):
    """Training loss became NaN or infinite."""


class EmptyDataset(TacpressError):
    """No demonstration steps available for training."""


class DataError(TacpressError):
    """Malformed dataset, trace, or checkpoint file."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")
