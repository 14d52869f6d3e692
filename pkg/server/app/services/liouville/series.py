"""
Truncated power-series arithmetic on ascending coefficient arrays.

Every function returns exactly `n` coefficients (the series modulo x^n).
"""
import numpy as np
from numpy.polynomial import polynomial as npoly

from ...core.errors import InvalidArgumentError


def truncate(a, n: int) -> np.ndarray:
    out = np.zeros(n)
    a = np.atleast_1d(np.asarray(a, dtype=float))
    m = min(n, a.size)
    out[:m] = a[:m]
    return out


def mul(a, b, n: int) -> np.ndarray:
    return truncate(npoly.polymul(truncate(a, n), truncate(b, n)), n)


def power(a, p: float, n: int) -> np.ndarray:
    """a(x)^p for a(0) > 0 and real p (J.C.P. Miller recurrence)."""
    a = truncate(a, n)
    if a[0] <= 0.0:
        raise InvalidArgumentError("series power needs a positive constant term", field="a")
    f = np.zeros(n)
    f[0] = a[0] ** p
    for k in range(1, n):
        j = np.arange(1, k + 1)
        f[k] = np.dot(((p + 1.0) * j - k) * a[j], f[k - j]) / (k * a[0])
    return f


def reciprocal(a, n: int) -> np.ndarray:
    return power(a, -1.0, n)


def derivative(a, n: int) -> np.ndarray:
    return truncate(npoly.polyder(truncate(a, n + 1)), n)


def shift(a, k: int, n: int) -> np.ndarray:
    """x^k a(x)."""
    return truncate(np.concatenate((np.zeros(k), truncate(a, n))), n)


def compose(a, b, n: int) -> np.ndarray:
    """a(b(x)) for b(0) = 0, by Horner's scheme."""
    b = truncate(b, n)
    if b[0] != 0.0:
        raise InvalidArgumentError("inner series must vanish at the origin", field="b")
    a = truncate(a, n)
    out = np.zeros(n)
    for coef in a[::-1]:
        out = mul(out, b, n)
        out[0] += coef
    return out


def revert(a, n: int) -> np.ndarray:
    """Compositional inverse b with a(b(x)) = x, for a(0) = 0 and a'(0) != 0."""
    a = truncate(a, n)
    if a[0] != 0.0 or a[1] == 0.0:
        raise InvalidArgumentError("series reversion needs a(0) = 0 and a'(0) != 0", field="a")
    identity = truncate([0.0, 1.0], n)
    b = identity / a[1]
    # Each sweep fixes one more coefficient
    for _ in range(n):
        b = b + (identity - compose(a, b, n)) / a[1]
    return b
