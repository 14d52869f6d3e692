"""Exception hierarchy shared by every service.

Argument/configuration problems map to CLI exit code 2, solver failures to 3.
"""

from typing import Optional


class GravityModesError(Exception):
    """Base exception for the gravity-mode library"""

    exit_code: int = 3


class InvalidArgumentError(GravityModesError, ValueError):
    """Custom exception for parameter-domain and precondition violations"""

    exit_code = 2

    def __init__(self, message: str, field: Optional[str] = None):
        self.field = field
        if field and field not in message:
            message = f"{field}: {message}"
        super().__init__(message)


class InvalidProfileError(InvalidArgumentError):
    """Density profile is not positive and strictly decreasing below z_plus"""

    def __init__(self, message: str, z: float):
        self.z = z
        self.raw_message = message
        super().__init__(f"{message} (first offending grid point z={z!r})", field="lambda_series")

    def __reduce__(self):
        return type(self), (self.raw_message, self.z)


class OutOfSupportError(InvalidArgumentError):
    """Quantity requested at or above the vacuum height"""


class DomainError(InvalidArgumentError):
    """Coordinate outside the mapped interval"""


class SingularPointError(InvalidArgumentError):
    """Evaluation requested exactly at the singular endpoint"""


class AmplitudeError(InvalidArgumentError):
    """Wave amplitude outside the range where the surface maps are invertible"""


class ConfigError(InvalidArgumentError):
    """Malformed run configuration"""


class NumericalError(GravityModesError, RuntimeError):
    """Custom exception for solver failures"""

    exit_code = 3


class IntegrationError(NumericalError):
    """ODE integrator failed"""

    def __init__(self, message: str, location: Optional[float] = None):
        self.location = location
        self.raw_message = message
        if location is not None:
            message = f"{message} (at t={location!r})"
        super().__init__(message)

    def __reduce__(self):
        # rebuilt in the parent when raised inside a worker process
        return type(self), (self.raw_message, self.location)


class ResonanceError(NumericalError):
    """Vanishing denominator in the Frobenius recurrence"""


class UnsupportedSingularityError(NumericalError):
    """Complex indicial exponents (4K+1 <= 0)"""


class StepSizeError(NumericalError):
    """Seed offset too large for a certified series remainder"""

    def __init__(self, message: str, suggested: float):
        self.suggested = suggested
        self.raw_message = message
        super().__init__(f"{message}; suggested offset {suggested!r}")

    def __reduce__(self):
        return type(self), (self.raw_message, self.suggested)


class SearchWindowError(NumericalError):
    """No eigenvalue bracket below the search cap"""

    def __init__(self, message: str, cap: float):
        self.cap = cap
        self.raw_message = message
        super().__init__(f"{message} (cap={cap!r})")

    def __reduce__(self):
        return type(self), (self.raw_message, self.cap)


class ModeIdentificationError(NumericalError):
    """Zero count of a computed eigenfunction disagrees with its index"""

    def __init__(self, message: str, n: int, zero_count: int):
        self.n = n
        self.zero_count = zero_count
        super().__init__(message)

    def __reduce__(self):
        return type(self), (self.args[0], self.n, self.zero_count)


class ThresholdError(NumericalError):
    """Root solve of the Type-2 positivity threshold failed"""

    def __init__(self, message: str, x: float):
        self.x = x
        self.raw_message = message
        super().__init__(f"{message} (x={x!r})")

    def __reduce__(self):
        return type(self), (self.raw_message, self.x)
