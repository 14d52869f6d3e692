"""
Finite-volume oracle for

    -d/dz(rho dw/dz) + l^2 rho w = Lambda mu w,   w(0) = 0,

as a symmetric tridiagonal pencil (A, M).  Cells are ordered from the ground
upward.  Interior faces carry the flux rho_f (w_{i+1} - w_i)/d_f, the ground
face a Dirichlet ghost; the face at z_plus carries rho = 0 and no condition.
Eigenvalues come from bisection on the scaled matrix M^-1/2 A M^-1/2.
"""
import math
from dataclasses import dataclass
from typing import Callable, List, Sequence, Tuple

import numpy as np
from scipy import linalg

from ...core.errors import InvalidArgumentError, NumericalError
from ...core.logging import get_logger
from ...models.equilibrium import Equilibrium
from ..equilibrium.background import density, weight_mu

logger = get_logger("services.fd_oracle.discretization")

GRADINGS = ("sqrt", "uniform")
MIN_CELLS = 8


@dataclass(frozen=True)
class FDProblem:
    mesh: np.ndarray
    faces: np.ndarray
    diag: np.ndarray
    offdiag: np.ndarray
    weight: np.ndarray
    N: int
    grading: str = "sqrt"

    def scaled(self) -> Tuple[np.ndarray, np.ndarray]:
        """Diagonal and off-diagonal of M^-1/2 A M^-1/2."""
        root = np.sqrt(self.weight)
        return self.diag / self.weight, self.offdiag / (root[:-1] * root[1:])

    def dense(self) -> Tuple[np.ndarray, np.ndarray]:
        A = np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)
        return A, np.diag(self.weight)


def assemble_from_coefficients(faces: np.ndarray, rho: Callable, mu: Callable, l: float,
                               top_dirichlet: bool = False, grading: str = "sqrt") -> FDProblem:
    """Conservative assembly on ascending faces z_0 = 0 < ... < z_N.

    rho and mu are vectorized callables; the mass term uses l^2 rho at the
    cell centers.
    """
    faces = np.asarray(faces, dtype=float)
    if faces.ndim != 1 or faces.size < 3 or np.any(np.diff(faces) <= 0.0):
        raise InvalidArgumentError("faces must be strictly increasing with at least two cells", field="faces")

    centers = 0.5 * (faces[1:] + faces[:-1])
    widths = np.diff(faces)
    gaps = np.diff(centers)
    rho_faces = np.asarray(rho(faces), dtype=float)

    flux = rho_faces[1:-1] / gaps
    diag = l * l * np.asarray(rho(centers), dtype=float) * widths
    diag[:-1] += flux
    diag[1:] += flux
    diag[0] += rho_faces[0] / (centers[0] - faces[0])
    if top_dirichlet:
        diag[-1] += rho_faces[-1] / (faces[-1] - centers[-1])

    weight = np.asarray(mu(centers), dtype=float) * widths
    return FDProblem(mesh=centers, faces=faces, diag=diag, offdiag=-flux, weight=weight,
                     N=centers.size, grading=grading)


def _faces(eq: Equilibrium, N: int, grading: str) -> np.ndarray:
    if grading == "sqrt":
        t = np.linspace(math.sqrt(eq.z_plus), 0.0, N + 1)
        faces = eq.z_plus - t * t
    else:
        faces = np.linspace(0.0, eq.z_plus, N + 1)
    faces[0], faces[-1] = 0.0, eq.z_plus
    return faces


def assemble(eq: Equilibrium, l: float, N: int, grading: str = "sqrt") -> FDProblem:
    """Pencil on N cells, uniform in t = sqrt(z_plus - z) ("sqrt") or in z ("uniform")."""
    if N < MIN_CELLS:
        raise InvalidArgumentError(f"cell count must be at least {MIN_CELLS}, got {N!r}", field="N")
    if grading not in GRADINGS:
        raise InvalidArgumentError(f"grading must be one of {GRADINGS}, got {grading!r}", field="grading")
    if not (math.isfinite(l) and l > 0.0):
        raise InvalidArgumentError(f"l must be positive, got {l!r}", field="l")

    problem = assemble_from_coefficients(
        _faces(eq, N, grading), lambda z: density(eq, z), lambda z: weight_mu(eq, l, z), l, grading=grading,
    )
    logger.debug("Oracle pencil assembled", extra={"N": N, "grading": grading, "l": l, "nu": eq.nu})
    return problem


def sturm_count(problem: FDProblem, Lambda: float) -> int:
    """Number of eigenvalues below Lambda: negative LDL^T pivots of A - Lambda M."""
    a = (problem.diag - Lambda * problem.weight).tolist()
    b2 = (problem.offdiag * problem.offdiag).tolist()
    tiny = np.finfo(float).tiny
    count = 0
    d = a[0]
    for i in range(len(a)):
        if i:
            d = a[i] - b2[i - 1] / d
        if d == 0.0:
            d = -tiny
        if d < 0.0:
            count += 1
    return count


def eigenvalues_fd(problem: FDProblem, k: int) -> List[float]:
    """The k smallest values of Lambda = 1/lambda, ascending, bisection-certified.

    Raises:
        InvalidArgumentError: k outside 1..N-1
    """
    if not 1 <= k <= problem.N - 1:
        raise InvalidArgumentError(f"k must lie in 1..{problem.N - 1}, got {k!r}", field="k")
    d, e = problem.scaled()
    values = linalg.eigh_tridiagonal(d, e, eigvals_only=True, select="i", select_range=(0, k - 1),
                                     lapack_driver="stebz")
    values = sorted(float(v) for v in values)
    certify(problem, values)
    return values


def certify(problem: FDProblem, values: Sequence[float]) -> None:
    """Check that values[n-1] is eigenvalue n by Sturm counts just below and above it.

    Raises:
        NumericalError: a count disagrees with the index
    """
    d, e = problem.scaled()
    norm = float(np.max(np.abs(d)) + 2.0 * np.max(np.abs(e)))
    for n, value in enumerate(values, start=1):
        width = max(1e-12 * (1.0 + abs(value)), 64.0 * np.finfo(float).eps * norm)
        below, above = sturm_count(problem, value - width), sturm_count(problem, value + width)
        if below > n - 1 or above < n:
            raise NumericalError(
                f"oracle eigenvalue {n} = {value!r} not certified: {below} below and {above} above"
            )


def eigenvectors_fd(problem: FDProblem, k: int) -> Tuple[np.ndarray, np.ndarray]:
    """Smallest k eigenvalues and M-orthonormal eigenvectors (columns, cells ascending in z)."""
    if not 1 <= k <= problem.N - 1:
        raise InvalidArgumentError(f"k must lie in 1..{problem.N - 1}, got {k!r}", field="k")
    d, e = problem.scaled()
    values, vectors = linalg.eigh_tridiagonal(d, e, select="i", select_range=(0, k - 1), lapack_driver="stebz")
    vectors = vectors / np.sqrt(problem.weight)[:, None]
    # sign convention: positive in the top cell, where w(z_plus) = 1
    vectors = vectors * np.sign(vectors[-1])[None, :]
    return values, vectors


def richardson(values_N: Sequence[float], values_2N: Sequence[float], order: int = 2) -> Tuple[np.ndarray, np.ndarray]:
    """Two-level extrapolation and error estimates for an order-p scheme."""
    coarse = np.asarray(values_N, dtype=float)
    fine = np.asarray(values_2N, dtype=float)
    if coarse.shape != fine.shape:
        raise InvalidArgumentError(
            f"length mismatch: {coarse.size} coarse values against {fine.size} fine values", field="values_2N"
        )
    factor = 2.0 ** order
    return (factor * fine - coarse) / (factor - 1.0), np.abs(fine - coarse) / (factor - 1.0)


def convergence_order(eq: Equilibrium, l: float, N: int, grading: str = "sqrt", index: int = 1) -> float:
    """Observed order of eigenvalue `index` from meshes N, 2N, 4N."""
    v = [eigenvalues_fd(assemble(eq, l, m, grading), index)[-1] for m in (N, 2 * N, 4 * N)]
    return math.log2(abs(v[0] - v[1]) / abs(v[1] - v[2]))


def oracle_lambdas(eq: Equilibrium, l: float, N: int, k: int) -> Tuple[np.ndarray, np.ndarray]:
    """Richardson-extrapolated lambda_1..lambda_k from meshes N and 2N, with relative error estimates."""
    coarse = eigenvalues_fd(assemble(eq, l, N), k)
    fine = eigenvalues_fd(assemble(eq, l, 2 * N), k)
    Lambdas, errors = richardson(coarse, fine)
    logger.info("Oracle eigenvalues", extra={"N": N, "k": k, "l": l, "nu": eq.nu})
    return 1.0 / Lambdas, errors / Lambdas
