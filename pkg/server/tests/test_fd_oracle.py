import math

import numpy as np
import pytest
from scipy import linalg

from app.core.errors import InvalidArgumentError, NumericalError
from app.models.run_config import RunConfig
from app.services.fd_oracle.discretization import (
    assemble,
    assemble_from_coefficients,
    certify,
    convergence_order,
    eigenvalues_fd,
    eigenvectors_fd,
    oracle_lambdas,
    richardson,
    sturm_count,
)


def sign_changes(values: np.ndarray) -> int:
    signs = np.sign(values[values != 0.0])
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


@pytest.fixture(scope="module")
def problem(eq0):
    return assemble(eq0, 1.0, 400)


def test_small_pencil_is_symmetric_positive(eq0):
    p = assemble(eq0, 1.0, 8)
    A, M = p.dense()
    np.testing.assert_array_equal(A, A.T)
    off = np.abs(p.offdiag)
    rows = p.diag - np.concatenate((off, [0.0])) - np.concatenate(([0.0], off))
    assert np.all(rows > 0.0)
    assert np.all(np.diag(M) > 0.0)


def test_bisection_matches_dense_solver(eq0):
    p = assemble(eq0, 1.0, 8)
    A, M = p.dense()
    dense = linalg.eigh(A, M, eigvals_only=True)
    np.testing.assert_allclose(eigenvalues_fd(p, 7), dense[:7], rtol=1e-10)


def test_constant_coefficient_laplacian():
    N = 100
    faces = np.linspace(0.0, 1.0, N + 1)
    ones = lambda z: np.ones_like(z)
    p = assemble_from_coefficients(faces, ones, ones, 0.0, top_dirichlet=True, grading="uniform")
    values = np.asarray(eigenvalues_fd(p, 3))
    k = np.arange(1, 4)
    h = 1.0 / N
    np.testing.assert_allclose(values, (2.0 / h * np.sin(k * math.pi * h / 2.0)) ** 2, rtol=1e-9)
    np.testing.assert_allclose(values, (k * math.pi) ** 2, rtol=2e-3)


def test_smallest_value_positive(problem):
    assert eigenvalues_fd(problem, 1)[0] > 0.0


@pytest.mark.parametrize("k", [0, 400])
def test_too_many_values(problem, k):
    with pytest.raises(InvalidArgumentError):
        eigenvalues_fd(problem, k)


def test_assembly_preconditions(eq0):
    with pytest.raises(InvalidArgumentError):
        assemble(eq0, 1.0, 4)
    with pytest.raises(InvalidArgumentError):
        assemble(eq0, 1.0, 100, grading="log")
    with pytest.raises(InvalidArgumentError):
        assemble(eq0, -1.0, 100)


def test_graded_mesh_refines_the_vacuum(eq0):
    p = assemble(eq0, 1.0, 100)
    widths = np.diff(p.faces)
    assert widths[-1] < widths[0] / 50.0
    assert p.faces[0] == 0.0 and p.faces[-1] == 1.0


def test_sturm_inertia(problem):
    values = eigenvalues_fd(problem, 6)
    for n in range(1, 6):
        assert sturm_count(problem, 0.5 * (values[n - 1] + values[n])) == n
    assert sturm_count(problem, 0.5 * values[0]) == 0


def test_certificate_accepts_computed_values(problem):
    certify(problem, eigenvalues_fd(problem, 4))


@pytest.mark.parametrize("shift", [1.1, 0.9])
def test_certificate_rejects_misplaced_value(problem, shift):
    values = eigenvalues_fd(problem, 3)
    values[1] *= shift
    with pytest.raises(NumericalError, match="oracle eigenvalue 2"):
        certify(problem, values)


def test_eigenvectors(problem):
    values, vectors = eigenvectors_fd(problem, 6)
    np.testing.assert_allclose(values, eigenvalues_fd(problem, 6), rtol=1e-12)
    for n in range(6):
        assert sign_changes(vectors[:, n]) == n
        assert vectors[-1, n] > 0.0
    gram = vectors.T @ (problem.weight[:, None] * vectors)
    np.testing.assert_allclose(np.diag(gram), 1.0, rtol=1e-10)
    assert np.max(np.abs(gram - np.diag(np.diag(gram)))) <= 1e-10


def test_richardson_on_quadratic_model():
    N = np.array([100.0, 200.0])
    exact = np.array([2.0, -3.5])
    coarse = exact + 5.0 / N ** 2
    fine = exact + 5.0 / (2.0 * N) ** 2
    values, errors = richardson(coarse, fine)
    np.testing.assert_allclose(values, exact, rtol=1e-13)
    np.testing.assert_allclose(errors, np.abs(fine - coarse) / 3.0)


def test_richardson_length_mismatch():
    with pytest.raises(InvalidArgumentError):
        richardson([1.0, 2.0], [1.0])


def test_self_convergence(eq0):
    coarse = np.asarray(eigenvalues_fd(assemble(eq0, 1.0, 1000), 6))
    fine = np.asarray(eigenvalues_fd(assemble(eq0, 1.0, 2000), 6))
    _, errors = richardson(coarse, fine)
    assert np.all(errors / fine < 1e-4)


def test_graded_mesh_is_second_order(eq0):
    assert convergence_order(eq0, 1.0, 500, "sqrt") >= 1.8


@pytest.mark.slow
def test_agreement_with_shooting(eq0, spectrum0):
    lambdas, relative_errors = oracle_lambdas(eq0, 1.0, RunConfig().oracle_cells, 6)
    np.testing.assert_allclose(spectrum0.lambdas, lambdas, rtol=1e-6)
    assert np.all(relative_errors < 1e-6)
