"""Algebraic and strongly algebraic soliton certificates.

A structure is an algebraic soliton when P + Ric^ac = cI + D for a
derivation D; it is strongly algebraic when P = c1 I + D1 and
Ric^ac = c2 I + D2 separately.  Both fits are linear least squares over
span{I} + Der(mu).
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .curvature import chern_ricci, ricci
from .lie import Bracket, derivation_basis, derivation_residual, is_unimodular
from .linalg import CompatibleTriple, frob
from .settings import settings


def classify_constant(c: float, tol: float = None) -> str:
    tol = settings.fit_tol if tol is None else tol
    if abs(c) <= tol:
        return "steady"
    return "expanding" if c < 0 else "shrinking"


@dataclass(frozen=True, eq=False)
class SolitonCertificate:
    """Result of a soliton fit.

    For ``kind == "strong"`` the fields ``c1, d1, c2, d2`` hold the two
    separate fits and ``c = c1 + c2``, ``d = d1 + d2``.
    """

    kind: str
    c: float
    d: np.ndarray
    residual: float
    classification: str
    c1: Optional[float] = None
    d1: Optional[np.ndarray] = None
    c2: Optional[float] = None
    d2: Optional[np.ndarray] = None
    residual1: Optional[float] = None
    residual2: Optional[float] = None
    checks: dict = field(default_factory=dict)

    @property
    def certified(self) -> bool:
        return self.residual < settings.fit_tol

    def report(self) -> str:
        lines = [
            f"kind: {self.kind}",
            f"certified: {self.certified}",
            f"residual: {self.residual:.3e}",
            f"c: {self.c:.12g} ({self.classification})",
        ]
        if self.kind == "strong":
            lines += [
                f"c1: {self.c1:.12g}  (P residual {self.residual1:.3e})",
                f"D1: {_fmt(self.d1)}",
                f"c2: {self.c2:.12g}  (Ric^ac residual {self.residual2:.3e})",
                f"D2: {_fmt(self.d2)}",
            ]
        else:
            lines.append(f"D: {_fmt(self.d)}")
        for k, v in self.checks.items():
            lines.append(f"{k}: {v}")
        return "\n".join(lines)


def _fmt(m):
    m = np.where(np.abs(m) < 1e-13, 0.0, m)
    if np.allclose(m, np.diag(np.diag(m)), atol=1e-13):
        return "diag(" + ", ".join(f"{x:.10g}" for x in np.diag(m)) + ")"
    return np.array2string(m, precision=10, suppress_small=True).replace("\n", "")


def fit_identity_plus_derivation(q, der_basis):
    """Least-squares ``q ~ cI + D`` with D in the span of ``der_basis``.

    Returns ``(c, D, residual)``.
    """
    q = np.asarray(q, dtype=float)
    n = q.shape[0]
    cols = [np.eye(n).ravel()] + [d.ravel() for d in der_basis]
    m = np.array(cols).T
    coef, *_ = np.linalg.lstsq(m, q.ravel(), rcond=None)
    c = float(coef[0])
    d = (m[:, 1:] @ coef[1:]).reshape(n, n) if der_basis else np.zeros((n, n))
    residual = frob(q - c * np.eye(n) - d)
    return c, d, residual


def algebraic_fit(mu: Bracket, triple: CompatibleTriple) -> SolitonCertificate:
    """Fit P + Ric^ac = cI + D over c and D in Der(mu)."""
    _, big_p, _ = chern_ricci(mu, triple)
    _, ric_ac, _ = ricci(mu, triple)
    der = derivation_basis(mu)
    c, d, res = fit_identity_plus_derivation(big_p + ric_ac, der)
    checks = {"derivation_residual": derivation_residual(mu, d)}
    return SolitonCertificate("algebraic", c, d, res, classify_constant(c), checks=checks)


def strong_fit(mu: Bracket, triple: CompatibleTriple) -> SolitonCertificate:
    """Fit P = c1 I + D1 and Ric^ac = c2 I + D2 independently.

    For unimodular inputs whose Ric^ac fit certifies, the identity
    c2 R = tr((Ric^ac)^2) and the sign condition c2 <= 0 (with equality
    iff Ric^ac = 0) are evaluated and stored in ``checks``.
    """
    _, big_p, _ = chern_ricci(mu, triple)
    _, ric_ac, scalar = ricci(mu, triple)
    der = derivation_basis(mu)
    c1, d1, r1 = fit_identity_plus_derivation(big_p, der)
    c2, d2, r2 = fit_identity_plus_derivation(ric_ac, der)
    checks = {
        "derivation_residual": max(derivation_residual(mu, d1), derivation_residual(mu, d2)),
    }
    if is_unimodular(mu) and r2 < settings.fit_tol:
        trace_sq = float(np.trace(ric_ac @ ric_ac))
        checks["cuni_residual"] = abs(c2 * scalar - trace_sq)
        nonflat = frob(ricci(mu, triple)[0]) > settings.fit_tol
        if nonflat:
            zero_ac = frob(ric_ac) < settings.fit_tol
            zero_c2 = abs(c2) < settings.fit_tol
            checks["c2_sign_ok"] = bool(c2 <= settings.fit_tol and zero_ac == zero_c2)
    else:
        checks["cuni_residual"] = None
    c = c1 + c2
    return SolitonCertificate(
        "strong",
        c,
        d1 + d2,
        float(np.hypot(r1, r2)),
        classify_constant(c),
        c1=c1,
        d1=d1,
        c2=c2,
        d2=d2,
        residual1=r1,
        residual2=r2,
        checks=checks,
    )


def cuni_identity(mu: Bracket, triple: CompatibleTriple, c2: float, d2) -> dict:
    """Evaluate tr(Ric D2) = -c2 R + tr((Ric^ac)^2) for Ric^ac = c2 I + D2.

    The identity holds without unimodularity.  ``lemma_gap`` is
    c2 R - tr((Ric^ac)^2) = -tr(Ric D2), which vanishes for unimodular
    algebras but not in general.
    """
    ric, ric_ac, scalar = ricci(mu, triple)
    tr_ric_d = float(np.trace(ric @ d2))
    trace_sq = float(np.trace(ric_ac @ ric_ac))
    return {
        "tr_ric_d2": tr_ric_d,
        "identity_residual": abs(tr_ric_d + c2 * scalar - trace_sq),
        "lemma_gap": c2 * scalar - trace_sq,
    }
