"""Fixed-basis euclidean symplectic linear algebra.

Conventions
-----------
A 2-form ``omega`` is stored as the antisymmetric matrix
``Omega[i, j] = omega(e_i, e_j)`` and an inner product as the symmetric
positive definite matrix ``G``.  The almost-complex structure is defined by
``omega(X, Y) = g(JX, Y)``, which forces ``J = -G^{-1} Omega``.
"""
from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionError, IncompatibleStructure
from .settings import settings


def frob(a) -> float:
    return float(np.linalg.norm(np.asarray(a).ravel()))


def sym(a: np.ndarray) -> np.ndarray:
    """Symmetric part S(A) = (A + A^T)/2."""
    return 0.5 * (a + a.T)


def skew(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a - a.T)


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _check_square(a: np.ndarray, dim: int, name: str):
    if a.shape != (dim, dim):
        raise DimensionError(f"{name} has shape {a.shape}, expected {(dim, dim)}")


@dataclass(frozen=True, eq=False)
class CompatibleTriple:
    """An almost-hermitian structure (omega, g, J) on R^dim."""

    omega: np.ndarray
    metric: np.ndarray
    j: np.ndarray

    @property
    def dim(self) -> int:
        return self.omega.shape[0]

    def with_(self, omega=None, metric=None) -> "CompatibleTriple":
        return build_triple(
            self.omega if omega is None else omega,
            self.metric if metric is None else metric,
        )

    def pullback(self, h: np.ndarray) -> "CompatibleTriple":
        """h^*(omega, g) = (omega(h., h.), g(h., h.))."""
        return build_triple(h.T @ self.omega @ h, h.T @ self.metric @ h)


def build_triple(omega, metric, tol: float = None) -> CompatibleTriple:
    """Validate (omega, g) and return the triple with J = -G^{-1} Omega.

    Raises
    ------
    IncompatibleStructure
        If omega is not antisymmetric or degenerate, if g is not positive
        definite, or if J^2 != -I within ``tol``.
    """
    tol = settings.tol if tol is None else tol
    omega = np.array(omega, dtype=float)
    metric = np.array(metric, dtype=float)
    if omega.ndim != 2 or omega.shape[0] != omega.shape[1]:
        raise DimensionError(f"omega must be square, got shape {omega.shape}")
    n = omega.shape[0]
    _check_square(metric, n, "metric")
    if not (np.all(np.isfinite(omega)) and np.all(np.isfinite(metric))):
        raise IncompatibleStructure("non-finite entries")
    if n % 2:
        raise IncompatibleStructure(f"odd dimension {n}")
    if frob(omega + omega.T) > tol:
        raise IncompatibleStructure("omega is not antisymmetric")
    if frob(metric - metric.T) > tol:
        raise IncompatibleStructure("metric is not symmetric")
    omega = skew(omega)
    metric = sym(metric)
    try:
        np.linalg.cholesky(metric)
    except np.linalg.LinAlgError:
        raise IncompatibleStructure("metric is not positive definite") from None
    if np.linalg.matrix_rank(omega) < n:
        raise IncompatibleStructure("omega is degenerate")
    j = -np.linalg.solve(metric, omega)
    err = frob(j @ j + np.eye(n))
    if err > tol * max(1.0, frob(j) ** 2):
        raise IncompatibleStructure(f"incompatible: |J^2 + I| = {err:.3e}")
    return CompatibleTriple(_frozen(omega), _frozen(metric), _frozen(j))


def canonical_omega(dim: int) -> np.ndarray:
    """omega_0 = sum_i e^i ^ e^{n+i}."""
    if dim % 2:
        raise DimensionError("dimension must be even")
    n = dim // 2
    om = np.zeros((dim, dim))
    om[:n, n:] = np.eye(n)
    om[n:, :n] = -np.eye(n)
    return om


def canonical_triple(dim: int) -> CompatibleTriple:
    return build_triple(canonical_omega(dim), np.eye(dim))


def two_form(dim: int, pairs) -> np.ndarray:
    """Matrix of sum coeff * e^i ^ e^j for ``pairs`` of (coeff, i, j), 1-based."""
    om = np.zeros((dim, dim))
    for coeff, i, j in pairs:
        om[i - 1, j - 1] += coeff
        om[j - 1, i - 1] -= coeff
    return om


def g_transpose(a: np.ndarray, metric: np.ndarray) -> np.ndarray:
    """Adjoint relative to g: g(AX, Y) = g(X, A^t Y)."""
    return np.linalg.solve(metric, a.T @ metric)


def omega_transpose(a, triple: CompatibleTriple) -> np.ndarray:
    """Adjoint relative to omega, A^{t_omega} = -J A^{t_g} J."""
    a = np.asarray(a, dtype=float)
    _check_square(a, triple.dim, "matrix")
    j = triple.j
    return -j @ g_transpose(a, triple.metric) @ j


def _check_j(j):
    n = j.shape[0]
    if frob(j @ j + np.eye(n)) > settings.tol * max(1.0, frob(j) ** 2):
        raise IncompatibleStructure("J^2 != -I")


def j_split(a, j) -> tuple:
    """Split an operator into J-commuting and J-anticommuting parts.

    Returns ``(A^c, A^ac)`` with ``A^c = (A - JAJ)/2`` and
    ``A^ac = (A + JAJ)/2``.
    """
    a = np.asarray(a, dtype=float)
    j = np.asarray(j, dtype=float)
    _check_square(a, j.shape[0], "matrix")
    _check_j(j)
    jaj = j @ a @ j
    return 0.5 * (a - jaj), 0.5 * (a + jaj)


def j_split_form(p, j) -> tuple:
    """Split a bilinear form (as a matrix) into its (1,1) and (2,0)+(0,2) parts."""
    p = np.asarray(p, dtype=float)
    j = np.asarray(j, dtype=float)
    _check_square(p, j.shape[0], "form")
    _check_j(j)
    pjj = j.T @ p @ j
    return 0.5 * (p + pjj), 0.5 * (p - pjj)


def operator_of_form(p, triple: CompatibleTriple) -> np.ndarray:
    """The operator P with p(X, Y) = omega(PX, Y)."""
    return np.linalg.solve(triple.omega, np.asarray(p, dtype=float))


def form_of_operator(op, triple: CompatibleTriple) -> np.ndarray:
    """Matrix of the form omega(P., .)."""
    return op.T @ triple.omega


def sp_residual(a, j) -> float:
    """Residual of A^T J + J A, zero iff A lies in sp(omega) for g = I."""
    return frob(a.T @ j + j @ a)
