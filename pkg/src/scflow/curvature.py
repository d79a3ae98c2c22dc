"""Curvature of left-invariant almost-hermitian structures.

The Chern-Ricci form is evaluated through the trace formula

    p(X, Y) = -1/2 tr(J ad mu(X, Y)) + 1/2 tr(ad J mu(X, Y)),

so no connection is ever built.  The Ricci operator uses the standard
left-invariant formula Ric = M - B/2 - S(ad H) in a g-orthonormal basis.
"""
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .exceptions import DimensionError, ScflowError
from .lie import Bracket, delta, mean_curvature_vector
from .linalg import (
    CompatibleTriple,
    frob,
    j_split,
    j_split_form,
    omega_transpose,
    operator_of_form,
    sym,
)
from .settings import settings


@dataclass(frozen=True, eq=False)
class CurvatureReport:
    """Curvature data of (mu, omega, g).

    Attributes
    ----------
    p : ndarray
        Chern-Ricci form, ``p[i, j] = p(e_i, e_j)``.
    P : ndarray
        Chern-Ricci operator, ``p = omega(P., .)``.
    z : ndarray or None
        Least-squares solution of ``p(X, Y) = omega(Z, mu(X, Y))``; None when
        that system is inconsistent.
    ric, ric_ac : ndarray
        Ricci operator and its anti-J-invariant part.
    chern_scalar : float
        tr P.
    scalar : float
        R = tr Ric.
    """

    p: np.ndarray
    P: np.ndarray
    z: Optional[np.ndarray]
    ric: np.ndarray
    ric_ac: np.ndarray
    chern_scalar: float
    scalar: float


def _check_dims(mu: Bracket, triple: CompatibleTriple):
    if mu.dim != triple.dim:
        raise DimensionError(f"bracket dim {mu.dim} != structure dim {triple.dim}")


def chern_ricci_form(mu: Bracket, triple: CompatibleTriple) -> np.ndarray:
    _check_dims(mu, triple)
    j = triple.j
    ad = mu.ad_basis()
    tr_j_ad = np.einsum("ab,kba->k", j, ad)
    t = mean_curvature_vector(mu)
    # alpha(w) = -1/2 tr(J ad w) + 1/2 tr(ad Jw), linear in w
    alpha = -0.5 * tr_j_ad + 0.5 * j.T @ t
    p = mu.c @ alpha
    return 0.5 * (p - p.T)


def chern_ricci(mu: Bracket, triple: CompatibleTriple):
    """Return ``(p, P, Z)``; ``Z`` is None when the Z-system is inconsistent.

    When Z exists the identity P = ad Z + (ad Z)^{t_omega} is checked and a
    warning is issued if it fails.
    """
    p = chern_ricci_form(mu, triple)
    big_p = operator_of_form(p, triple)
    # p(X, Y) = Z^T Omega mu(X, Y): solve c_flat @ (Omega^T Z) = p_flat
    n = mu.dim
    lhs = mu.c.reshape(n * n, n) @ triple.omega.T
    z, *_ = np.linalg.lstsq(lhs, p.ravel(), rcond=None)
    scale = max(1.0, frob(p))
    if frob(lhs @ z - p.ravel()) > settings.tol * scale * 10:
        return p, big_p, None
    adz = mu.ad(z)
    err = frob(adz + omega_transpose(adz, triple) - big_p)
    if err > 1e-8 * max(1.0, frob(big_p)):
        warnings.warn(f"P != ad Z + (ad Z)^t_omega (residual {err:.2e})", RuntimeWarning)
    return p, big_p, z


def _ricci_orthonormal(c: np.ndarray) -> np.ndarray:
    m = -0.5 * np.einsum("xij,yij->xy", c, c) + 0.25 * np.einsum("ijx,ijy->xy", c, c)
    b = np.einsum("xjk,ykj->xy", c, c)
    h = np.einsum("ikk->i", c)
    ad_h = np.einsum("i,ijk->kj", h, c)
    return m - 0.5 * b - sym(ad_h)


def ricci_operator(mu: Bracket, metric=None) -> np.ndarray:
    """Ricci operator of the left-invariant metric ``metric`` (default I)."""
    if metric is None:
        return _ricci_orthonormal(mu.c)
    metric = np.asarray(metric, dtype=float)
    if np.allclose(metric, np.eye(mu.dim), rtol=0, atol=1e-15):
        return _ricci_orthonormal(mu.c)
    # h = L^T is an isometry (R^n, G) -> (R^n, I) when G = L L^T
    h = np.linalg.cholesky(metric).T
    ric = _ricci_orthonormal(mu.act(h).c)
    return np.linalg.solve(h, ric @ h)


def ricci(mu: Bracket, triple: CompatibleTriple):
    """Return ``(Ric, Ric^ac, R)``."""
    _check_dims(mu, triple)
    ric = ricci_operator(mu, triple.metric)
    asym = frob(triple.metric @ ric - (triple.metric @ ric).T)
    if asym > 1e-8 * max(1.0, frob(ric)):
        raise ScflowError(f"Ricci operator not g-self-adjoint (residual {asym:.2e})")
    _, ric_ac = j_split(ric, triple.j)
    return ric, ric_ac, float(np.trace(ric))


def curvature(mu: Bracket, triple: CompatibleTriple) -> CurvatureReport:
    p, big_p, z = chern_ricci(mu, triple)
    ric, ric_ac, scalar = ricci(mu, triple)
    return CurvatureReport(p, big_p, z, ric, ric_ac, float(np.trace(big_p)), scalar)


def scf_rhs(state: CompatibleTriple, mu: Bracket):
    """Velocity ``(omega_dot, metric_dot)`` of the direct flow at ``state``.

    omega_dot = -2 p and metric_dot = -2 p^c(., J.) - 2 ric^ac, both as
    matrices of bilinear forms.
    """
    p = chern_ricci_form(mu, state)
    ric, ric_ac, _ = ricci(mu, state)
    pc, _ = j_split_form(p, state.j)
    metric_dot = -2.0 * (pc @ state.j) - 2.0 * (ric_ac.T @ state.metric)
    return -2.0 * p, sym(metric_dot)


def bracket_velocity(mu: Bracket, triple: CompatibleTriple) -> Bracket:
    """Bracket flow velocity delta_mu(P + Ric^ac) at fixed (omega, g)."""
    p = chern_ricci_form(mu, triple)
    big_p = operator_of_form(p, triple)
    _, ric_ac, _ = ricci(mu, triple)
    return delta(mu, big_p + ric_ac)


def j_velocity(state: CompatibleTriple, mu: Bracket) -> np.ndarray:
    """J_dot induced by (omega_dot, metric_dot) through J = -G^{-1} Omega."""
    omega_dot, metric_dot = scf_rhs(state, mu)
    g_inv = np.linalg.inv(state.metric)
    return g_inv @ metric_dot @ g_inv @ state.omega - g_inv @ omega_dot
