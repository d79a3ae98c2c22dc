"""Left-symmetric algebras and their almost-Kahler doubles.

An LSA on R^n is stored through its left multiplications ``L(e_i)``, so
that ``e_i . e_j = L(e_i) e_j``.  The representation theta(X) = -L(X)^T
(transpose for the fixed inner product making e_i orthonormal) defines the
double g x_theta g on R^{2n} with bracket

    [(X, Y), (Z, W)] = ([X, Z], theta(X) W - theta(Z) Y),

J = [[0, I], [-I, 0]] and g = I.
"""
import re
from collections import namedtuple
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, least_squares

from .exceptions import DimensionError, InvalidDatum, NonConvergence
from .lie import Bracket
from .linalg import build_triple, commutator, frob, sym
from .settings import settings


@dataclass(frozen=True, eq=False)
class LSADatum:
    """Left multiplications ``l[i] = L(e_i)`` of an LSA, shape (n, n, n)."""

    l: np.ndarray

    def __init__(self, l, check=True):
        l = np.array(l, dtype=float)
        if l.ndim != 3 or not (l.shape[0] == l.shape[1] == l.shape[2]):
            raise DimensionError(f"expected n matrices of size n x n, got {l.shape}")
        if check:
            res = _lsa_residual(l)
            if res > 1e-9 * max(1.0, float(np.sum(l * l))):
                raise InvalidDatum(f"not left-symmetric: residual {res:.3e}")
        l.setflags(write=False)
        object.__setattr__(self, "l", l)

    @classmethod
    def from_theta(cls, theta, check=True):
        theta = np.asarray(theta, dtype=float)
        return cls(-theta.transpose(0, 2, 1), check=check)

    @property
    def n(self) -> int:
        return self.l.shape[0]

    @property
    def theta(self) -> np.ndarray:
        """Stack of theta(e_i) = -L(e_i)^T."""
        return -self.l.transpose(0, 2, 1)

    def product(self, x, y):
        return np.einsum("i,ikj,j->k", x, self.l, y)

    def mult_tensor(self) -> np.ndarray:
        """m[i, j, k]: coefficient of e_k in e_i . e_j."""
        return self.l.transpose(0, 2, 1)

    def lie_bracket(self) -> Bracket:
        m = self.mult_tensor()
        return Bracket(m - m.transpose(1, 0, 2), check=False)

    def right(self, z) -> np.ndarray:
        """Right multiplication R(Z) Y = Y . Z."""
        return np.einsum("jki,i->kj", self.l, z)

    def a_vectors(self):
        """(A, A*) with A = sum theta(e_i) e_i and A* = sum e_i . e_i."""
        th = self.theta
        a = np.einsum("iki->k", th)
        a_star = np.einsum("iki->k", self.l)
        return a, a_star


def _lsa_residual(l):
    # m[i, j, k] = coeff of e_k in e_i . e_j
    m = l.transpose(0, 2, 1)
    # X.(Y.Z): coefficient tensor over (x, y, z, out)
    left = np.einsum("yzk,xkl->xyzl", m, m)
    right = np.einsum("xyk,kzl->xyzl", m, m)
    assoc = left - right
    return frob(assoc - assoc.transpose(1, 0, 2, 3))


def lsa_residual(d: LSADatum) -> float:
    """Norm of the associator asymmetry (X,Y,Z) - (Y,X,Z) over the basis."""
    return _lsa_residual(d.l)


DoubleStructure = namedtuple("DoubleStructure", ["bracket", "triple"])


def double_j(n: int) -> np.ndarray:
    j = np.zeros((2 * n, 2 * n))
    j[:n, n:] = np.eye(n)
    j[n:, :n] = -np.eye(n)
    return j


def build_double(d: LSADatum) -> DoubleStructure:
    """The almost-Kahler Lie algebra (g x_theta g, omega, g)."""
    n = d.n
    c = np.zeros((2 * n, 2 * n, 2 * n))
    m = d.mult_tensor()
    c[:n, :n, :n] = m - m.transpose(1, 0, 2)
    th = d.theta
    # [(e_i, 0), (0, e_l)] = (0, theta(e_i) e_l)
    c[:n, n:, n:] = th.transpose(0, 2, 1)
    c[n:, :n, n:] = -th.transpose(2, 0, 1)
    j = double_j(n)
    return DoubleStructure(Bracket(c, check=False), build_triple(j.T, np.eye(2 * n)))


def _ad(bracket_c, x):
    return np.einsum("i,ijk->kj", x, bracket_c)


def chern_P_lsa(d: LSADatum) -> np.ndarray:
    """P = 1/2 ad(A* - A) + 1/2 theta(A* - A)^T on the first factor."""
    a, a_star = d.a_vectors()
    w = a_star - a
    lam = d.lie_bracket().c
    theta_w = np.einsum("i,ijk->jk", w, d.theta)
    return 0.5 * _ad(lam, w) + 0.5 * theta_w.T


def chern_P_full(d: LSADatum) -> np.ndarray:
    p = chern_P_lsa(d)
    n = d.n
    out = np.zeros((2 * n, 2 * n))
    out[:n, :n] = p
    out[n:, n:] = p.T
    return out


def z_vector(d: LSADatum) -> np.ndarray:
    a, a_star = d.a_vectors()
    return 0.5 * (a_star - a)


LSARicci = namedtuple("LSARicci", ["ric1", "ric2", "s", "scalar", "chern_scalar"])


def ricci_lsa(d: LSADatum) -> LSARicci:
    """Block Ricci operator diag(Ric1, Ric2), S = (Ric1 - Ric2)/2 and R."""
    lam = d.lie_bracket().c
    th = d.theta
    m = -0.5 * np.einsum("xij,yij->xy", lam, lam) + 0.25 * np.einsum("ijx,ijy->xy", lam, lam)
    b = np.einsum("xjk,ykj->xy", lam, lam)
    h_g = np.einsum("ikk->i", lam)
    h_theta = np.einsum("ikk->i", th)
    h = h_g + h_theta
    sth = 0.5 * (th + th.transpose(0, 2, 1))
    c_theta = np.einsum("xab,yba->xy", sth, sth)
    ric1 = m - 0.5 * b - c_theta - sym(_ad(lam, h))
    theta_h = np.einsum("i,ijk->jk", h, th)
    ric2 = 0.5 * np.einsum("iab,icb->ac", th, th) - 0.5 * np.einsum("iba,ibc->ac", th, th) - sym(theta_h)
    s = 0.5 * (ric1 - ric2)
    a, a_star = d.a_vectors()
    return LSARicci(ric1, ric2, s, float(np.trace(ric1) + np.trace(ric2)), float(a @ a_star - a @ a))


def ricci_full(d: LSADatum) -> np.ndarray:
    r = ricci_lsa(d)
    n = d.n
    out = np.zeros((2 * n, 2 * n))
    out[:n, :n] = r.ric1
    out[n:, n:] = r.ric2
    return out


def ricci_ac_full(d: LSADatum) -> np.ndarray:
    s = ricci_lsa(d).s
    n = d.n
    out = np.zeros((2 * n, 2 * n))
    out[:n, :n] = s
    out[n:, n:] = -s
    return out


def vary(d: LSADatum, phi) -> LSADatum:
    """L_phi(X) = phi L(phi^{-1} X) phi^{-1} for symmetric invertible phi."""
    phi = np.asarray(phi, dtype=float)
    if phi.shape != (d.n, d.n):
        raise DimensionError(f"phi must be {d.n} x {d.n}")
    if frob(phi - phi.T) > settings.tol * max(1.0, frob(phi)):
        raise InvalidDatum("phi must be symmetric")
    if abs(np.linalg.det(phi)) < 1e-14:
        raise InvalidDatum("phi must be invertible")
    inv = np.linalg.inv(phi)
    l = np.einsum("ji,jab->iab", inv, d.l)
    return LSADatum(np.einsum("ab,ibc,cd->iad", phi, l, inv), check=False)


def bracket_rhs_lsa(d: LSADatum) -> np.ndarray:
    """Velocity of L(e_i) induced by theta'(X) = theta((P+S)X) + [theta(X), P^T - S]."""
    p = chern_P_lsa(d)
    s = ricci_lsa(d).s
    th = d.theta
    q1 = p + s
    q2 = p.T - s
    dtheta = np.einsum("ji,jab->iab", q1, th) + np.einsum("iab,bc->iac", th, q2) - np.einsum("ab,ibc->iac", q2, th)
    return -dtheta.transpose(0, 2, 1)


def bracket_rhs_lsa_vector(y, n):
    d = LSADatum(np.asarray(y).reshape(n, n, n), check=False)
    return bracket_rhs_lsa(d).ravel()


# ---------------------------------------------------------------------------
# named structures


def _structure_constants(basis, inner):
    """Product tensor of an associative matrix algebra in ``basis``."""
    n = len(basis)
    gram = np.array([[inner(x, y) for y in basis] for x in basis])
    l = np.zeros((n, n, n))
    for i, x in enumerate(basis):
        for j, y in enumerate(basis):
            rhs = np.array([inner(b, x @ y) for b in basis])
            l[i][:, j] = np.linalg.solve(gram, rhs).real
    return l


def quaternion_lsa() -> LSADatum:
    """Quaternion product on u(2) with e1 = 1, e2 = i, e3 = j, e4 = k."""
    one = np.eye(2, dtype=complex)
    qi = np.array([[0, -1], [1, 0]], dtype=complex)
    qj = np.array([[1j, 0], [0, -1j]])
    qk = qi @ qj
    basis = [one, qi, qj, qk]
    return LSADatum(_structure_constants(basis, lambda x, y: 0.5 * np.trace(x.conj().T @ y).real))


def gl2_matrix_lsa() -> LSADatum:
    """Matrix product on gl2 in the basis I, [[0,-1],[1,0]], diag(1,-1), [[0,1],[1,0]]."""
    basis = [
        np.eye(2),
        np.array([[0.0, -1.0], [1.0, 0.0]]),
        np.diag([1.0, -1.0]),
        np.array([[0.0, 1.0], [1.0, 0.0]]),
    ]
    return LSADatum(_structure_constants(basis, lambda x, y: 0.5 * np.trace(x.T @ y)))


def gl2_brd_alpha_lsa(alpha: float) -> LSADatum:
    """One-parameter family L_alpha on gl2 (basis E12, E21, H, I)."""
    al = float(alpha)
    l1 = [[0, 0, -1, 1 + al], [0, 0, 0, 0], [0, (1 + al) / 2, 0, 0], [0, 0.5, 0, 0]]
    l2 = [[0, 0, 0, 0], [0, 0, 1, 1 - al], [-(1 - al) / 2, 0, 0, 0], [0.5, 0, 0, 0]]
    l3 = [[1, 0, 0, 0], [0, -1, 0, 0], [0, 0, al, 1 - al**2], [0, 0, 1, -al]]
    l4 = [[1 + al, 0, 0, 0], [0, 1 - al, 0, 0], [0, 0, 1 - al**2, -al * (1 - al**2)], [0, 0, -al, 1 + al**2]]
    return LSADatum([l1, l2, l3, l4])


def theta_ab(a: float, b: float):
    """theta_{a,b}(e_i) matrices of the u(2) family (a != 0)."""
    q = -b * b / a
    th = np.zeros((4, 4, 4))
    th[0] = a * np.eye(4)
    th[1] = [[0, a, 0, 0], [q, 0, 0, 0], [0, 0, 0, -b], [0, 0, b, 0]]
    th[2] = [[0, 0, a, 0], [0, 0, 0, b], [q, 0, 0, 0], [0, -b, 0, 0]]
    th[3] = [[0, 0, 0, a], [0, 0, -b, 0], [0, b, 0, 0], [q, 0, 0, 0]]
    return th


def theta_ab_lsa(a: float, b: float) -> LSADatum:
    return LSADatum.from_theta(theta_ab(a, b))


def theta_infinity() -> np.ndarray:
    th = np.zeros((4, 4, 4))
    for i in (1, 2, 3):
        th[i][i, 0] = -1.0
    return th


def theta_infinity_lsa() -> LSADatum:
    return LSADatum.from_theta(theta_infinity())


def theta_ab_coordinates(d: LSADatum):
    """Read (a, b) back from a member of the theta_{a,b} family."""
    th = d.theta
    return float(th[0][0, 0]), float(th[1][3, 2])


def theta_ab_family_residual(d: LSADatum) -> float:
    a, b = theta_ab_coordinates(d)
    if a == 0.0:
        return float("inf")
    return frob(d.theta - theta_ab(a, b))


def theta_ab_rhs(a, b):
    """Reduced bracket flow on the theta_{a,b} family."""
    da = -3.25 * a**3 + 1.5 * a * b**2 + 0.75 * b**4 / a
    db = -0.5 * a**2 * b + 3.0 * b**3 - 0.5 * b**5 / a**2
    return da, db


def theta_ab_invariants(a, b):
    """(tr P, R) of the double along the theta_{a,b} family."""
    return -20 * a * a + 12 * b * b, (-43 * a**4 + 18 * a * a * b * b - 3 * b**4) / (2 * a * a)


_NAMED = re.compile(r"^\s*([a-z0-9-]+)\s*(?:\(([^)]*)\))?\s*$")


def named_lsa(name: str) -> LSADatum:
    """Built-in LSAs: quaternion-u2, gl2-matrix, gl2-brd-alpha(x),
    theta-ab(a,b), theta-infinity."""
    m = _NAMED.match(name)
    if not m:
        raise KeyError(f"unknown LSA {name!r}")
    key, args = m.group(1), m.group(2)
    vals = [float(x) for x in args.split(",")] if args else []
    if key == "quaternion-u2" and not vals:
        return quaternion_lsa()
    if key == "gl2-matrix" and not vals:
        return gl2_matrix_lsa()
    if key == "gl2-brd-alpha" and len(vals) == 1:
        return gl2_brd_alpha_lsa(vals[0])
    if key == "theta-ab" and len(vals) == 2:
        return theta_ab_lsa(*vals)
    if key == "theta-infinity" and not vals:
        return theta_infinity_lsa()
    raise KeyError(f"unknown LSA {name!r}")


# ---------------------------------------------------------------------------
# diagonal soliton search


SearchResult = namedtuple("SearchResult", ["phi", "q", "r", "c", "residual", "datum"])


def parse_pattern(pattern, n):
    """Pattern string like "x111" or "xy11": letters vary, digits are fixed.

    Returns (list of free indices, base diagonal).
    """
    if isinstance(pattern, str):
        tokens = list(pattern.replace(",", "").replace(" ", ""))
    else:
        tokens = list(pattern)
    if len(tokens) != n:
        raise ValueError(f"pattern {pattern!r} must have {n} entries")
    free, base = [], np.ones(n)
    for i, tok in enumerate(tokens):
        if isinstance(tok, str) and tok.isalpha():
            free.append(i)
        else:
            base[i] = float(tok)
    if not free:
        raise ValueError("pattern has no free entry")
    return free, base


def _deviation(d: LSADatum):
    p = chern_P_lsa(d)
    s = ricci_lsa(d).s
    n = d.n
    dp = p - np.trace(p) / n * np.eye(n)
    ds = s - np.trace(s) / n * np.eye(n)
    return dp, ds, p, s


def soliton_search_diag(d: LSADatum, pattern, interval=(1e-3, 10.0), grid=400) -> SearchResult:
    """Find diagonal phi (per ``pattern``) with P = qI and S = rI.

    One free entry: a sign change of the dominant deviation entry is
    bracketed on a logarithmic grid and refined by Brent's method.  Several
    free entries: least squares from grid starts followed by Newton polish.
    """
    n = d.n
    free, base = parse_pattern(pattern, n)
    lo, hi = interval

    def phi_of(x):
        diag = base.copy()
        diag[free] = x
        return np.diag(diag)

    def resid(x):
        dp, ds, _, _ = _deviation(vary(d, phi_of(x)))
        return np.concatenate([dp.ravel(), ds.ravel()])

    if len(free) == 1:
        ts = np.geomspace(lo, hi, grid)
        vecs = np.array([resid([t]) for t in ts])
        if np.max(np.abs(vecs)) < settings.fit_tol:
            x = np.array([1.0])
        else:
            k = int(np.argmax(np.max(np.abs(vecs), axis=0)))
            vals = vecs[:, k]
            roots = []
            for i in range(grid - 1):
                if vals[i] == 0.0:
                    roots.append(ts[i])
                elif vals[i] * vals[i + 1] < 0:
                    roots.append(brentq(lambda t: resid([t])[k], ts[i], ts[i + 1], xtol=1e-15, rtol=1e-15, maxiter=200))
            roots = [r for r in roots if frob(resid([r])) < 1e-6]
            if not roots:
                raise NonConvergence(
                    f"no root on {interval}: component {k} ranges over [{vals.min():.3g}, {vals.max():.3g}]"
                )
            x = np.array([min(roots, key=lambda r: frob(resid([r])))])
    else:
        axes = [np.geomspace(lo, hi, 12) for _ in free]
        starts = np.array(np.meshgrid(*axes)).reshape(len(free), -1).T
        best = None
        for x0 in starts:
            sol = least_squares(resid, x0, bounds=(lo, hi), xtol=1e-15, ftol=1e-15, gtol=1e-15)
            if best is None or sol.cost < best.cost:
                best = sol
            if best.cost < 1e-24:
                break
        x = _newton_polish(resid, best.x)
        if frob(resid(x)) > 1e-6:
            raise NonConvergence(f"least squares stalled at residual {frob(resid(x)):.3e}")
    phi = phi_of(x)
    varied = vary(d, phi)
    dp, ds, p, s = _deviation(varied)
    q = float(np.trace(p) / n)
    r = float(np.trace(s) / n)
    return SearchResult(phi, q, r, q + r, frob(dp) + frob(ds), varied)


def _newton_polish(f, x, steps=30, h=1e-7):
    x = np.array(x, dtype=float)
    fx = f(x)
    for _ in range(steps):
        jac = np.empty((fx.size, x.size))
        for i in range(x.size):
            e = np.zeros_like(x)
            e[i] = h * max(1.0, abs(x[i]))
            jac[:, i] = (f(x + e) - f(x - e)) / (2 * e[i])
        dx = np.linalg.lstsq(jac, -fx, rcond=None)[0]
        xn = x + dx
        fn = f(xn)
        if frob(fn) >= frob(fx):
            break
        x, fx = xn, fn
    return x


def gl2_f(t):
    """-108 t^8 + 36 t^6 - 97 t^4 - 22 t^2 + 11."""
    return -108 * t**8 + 36 * t**6 - 97 * t**4 - 22 * t**2 + 11
