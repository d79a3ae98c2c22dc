"""Almost-abelian almost-Kahler Lie algebras.

Every such structure is encoded by ``A = ad e_{2n}|_n`` with

    A = [[a, v^T],
         [0, A1 ]],      a >= 0, v in R^{2n-2}, A1 in sp(omega_1),

acting on the abelian ideal n = <e_1, ..., e_{2n-1}>.  The structure is
omega = e^1 ^ e^{2n} + omega_1 with g = I, J e_1 = e_{2n} and
J_1 = [[0, -I], [I, 0]] on <e_2, ..., e_{2n-1}>.
"""
from collections import namedtuple
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm
from scipy.optimize import linear_sum_assignment

from .curvature import CurvatureReport
from .exceptions import DimensionError, InvalidDatum, NotInvariantFamily
from .lie import Bracket
from .linalg import build_triple, commutator, frob, j_split, sym
from .settings import settings


def j1_matrix(m: int) -> np.ndarray:
    """Complex structure [[0, -I], [I, 0]] on R^m, m even."""
    if m % 2:
        raise DimensionError(f"odd size {m}")
    k = m // 2
    j = np.zeros((m, m))
    j[:k, k:] = -np.eye(k)
    j[k:, :k] = np.eye(k)
    return j


def full_j(n: int) -> np.ndarray:
    dim = 2 * n
    j = np.zeros((dim, dim))
    j[dim - 1, 0] = 1.0
    j[0, dim - 1] = -1.0
    j[1 : dim - 1, 1 : dim - 1] = j1_matrix(dim - 2)
    return j


def sp_residual(a1, j1=None) -> float:
    """|A1^T J1 + J1 A1|; zero iff A1 lies in sp(omega_1)."""
    a1 = np.asarray(a1, dtype=float)
    j1 = j1_matrix(a1.shape[0]) if j1 is None else j1
    return frob(a1.T @ j1 + j1 @ a1)


def ac_part(m, j1):
    """Anti-J1-invariant part (m + J1 m J1)/2."""
    return 0.5 * (m + j1 @ m @ j1)


@dataclass(frozen=True, eq=False)
class AlmostAbelianDatum:
    """The triple (a, v, A1) describing mu_A in dimension 2n.

    Parameters
    ----------
    a : float
        Nonnegative diagonal entry of A.
    v : array_like, shape (2n-2,)
    a1 : array_like, shape (2n-2, 2n-2)
        Must lie in sp(omega_1).
    check : bool
        Validate the invariants (default True).
    """

    a: float
    v: np.ndarray
    a1: np.ndarray

    def __init__(self, a, v, a1, check=True):
        a1 = np.array(a1, dtype=float, ndmin=2)
        v = np.array(v, dtype=float).ravel()
        m = a1.shape[0]
        if a1.shape != (m, m) or v.shape != (m,) or m % 2:
            raise DimensionError(f"inconsistent shapes v {v.shape}, A1 {a1.shape}")
        if check:
            if not np.isfinite(a) or a < 0:
                raise InvalidDatum(f"a must be >= 0, got {a}")
            res = sp_residual(a1)
            if res > settings.tol * max(1.0, frob(a1)):
                raise InvalidDatum(f"A1 not in sp(omega_1): residual {res:.3e}")
        v.setflags(write=False)
        a1.setflags(write=False)
        object.__setattr__(self, "a", float(a))
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "a1", a1)

    @classmethod
    def from_params4(cls, a, b, c, d, e, f):
        """Dimension-4 datum A = [[a, b, c], [0, d, e], [0, f, -d]]."""
        return cls(a, [b, c], [[d, e], [f, -d]])

    @classmethod
    def from_matrix(cls, m, check=True):
        m = np.asarray(m, dtype=float)
        if frob(m[1:, 0]) > settings.tol:
            raise InvalidDatum("first column of A must be (a, 0, ..., 0)")
        return cls(m[0, 0], m[0, 1:], m[1:, 1:], check=check)

    @classmethod
    def from_vector(cls, y, n, check=False):
        m = 2 * n - 2
        y = np.asarray(y, dtype=float)
        return cls(y[0], y[1 : 1 + m], y[1 + m :].reshape(m, m), check=check)

    @property
    def n(self) -> int:
        return (self.a1.shape[0] + 2) // 2

    @property
    def dim(self) -> int:
        return 2 * self.n

    @property
    def matrix(self) -> np.ndarray:
        m = self.a1.shape[0]
        out = np.zeros((m + 1, m + 1))
        out[0, 0] = self.a
        out[0, 1:] = self.v
        out[1:, 1:] = self.a1
        return out

    def to_vector(self) -> np.ndarray:
        return np.concatenate([[self.a], self.v, self.a1.ravel()])

    def __repr__(self):
        return f"AlmostAbelianDatum(a={self.a!r}, v={self.v.tolist()!r}, a1={self.a1.tolist()!r})"


DatumVelocity = namedtuple("DatumVelocity", ["a", "v", "a1"])


def build_mu(d: AlmostAbelianDatum):
    """Return ``(mu_A, triple)`` on R^{2n} with g = I."""
    dim = d.dim
    c = np.zeros((dim, dim, dim))
    am = d.matrix
    # [e_{2n}, e_j] = sum_i A_ij e_i
    c[dim - 1, : dim - 1, : dim - 1] = am.T
    c[: dim - 1, dim - 1, : dim - 1] = -am.T
    j = full_j(d.n)
    return Bracket(c), build_triple(j.T, np.eye(dim))


def datum_from_bracket(mu: Bracket, check=False) -> AlmostAbelianDatum:
    """Read A = ad e_{2n}|_n off a bracket of the form mu_A."""
    dim = mu.dim
    rest = mu.c[: dim - 1, : dim - 1, :]
    if frob(rest) > 1e-8 * max(1.0, mu.norm()) or frob(mu.c[dim - 1, :, dim - 1]) > 1e-8 * max(1.0, mu.norm()):
        raise InvalidDatum("bracket is not of the form mu_A")
    return AlmostAbelianDatum.from_matrix(mu.c[dim - 1, : dim - 1, : dim - 1].T, check=check)


def closed_form_curvature(d: AlmostAbelianDatum) -> CurvatureReport:
    """Ric, Ric^ac and P assembled from the block formulas."""
    a, v, a1 = d.a, d.v, d.a1
    m = a1.shape[0]
    dim = m + 2
    j1 = j1_matrix(m)
    am = d.matrix
    s_a1 = sym(a1)
    tr_s1 = float(np.sum(s_a1 * s_a1))
    vv = np.outer(v, v)

    ric = np.zeros((dim, dim))
    ric[: dim - 1, : dim - 1] = 0.5 * commutator(am, am.T) - a * sym(am)
    ric[dim - 1, dim - 1] = -float(np.sum(sym(am) ** 2))

    r = 0.25 * a1 @ v - 0.5 * a * v
    top = 0.5 * (v @ v + tr_s1)
    ric_ac = np.zeros((dim, dim))
    ric_ac[0, 0] = top
    ric_ac[dim - 1, dim - 1] = -top
    ric_ac[0, 1 : dim - 1] = r
    ric_ac[1 : dim - 1, 0] = r
    ric_ac[1 : dim - 1, 1 : dim - 1] = 0.5 * commutator(a1, a1.T) - a * s_a1 - 0.5 * ac_part(vv, j1)
    # the last row/column is -J1 r; this is what makes J Ric^ac J = Ric^ac
    ric_ac[1 : dim - 1, dim - 1] = -j1 @ r
    ric_ac[dim - 1, 1 : dim - 1] = -j1 @ r

    w = 0.5 * a1.T @ v + a * v
    big_p = np.zeros((dim, dim))
    big_p[0, 0] = -a * a
    big_p[dim - 1, dim - 1] = -a * a
    big_p[0, 1 : dim - 1] = -w
    big_p[1 : dim - 1, dim - 1] = -j1 @ w

    omega = full_j(d.n).T
    p = big_p.T @ omega
    return CurvatureReport(
        p=p,
        P=big_p,
        z=None,
        ric=ric,
        ric_ac=ric_ac,
        chern_scalar=-2.0 * a * a,
        scalar=-a * a - float(np.sum(sym(am) ** 2)),
    )


def is_kahler(d: AlmostAbelianDatum, tol=None) -> bool:
    """Kahler iff v = 0 and A1 is skew."""
    tol = settings.tol if tol is None else tol
    return frob(d.v) < tol and frob(d.a1 + d.a1.T) < tol


# ---------------------------------------------------------------------------
# spectral tests


def is_nilpotent_matrix(m, tol=None) -> bool:
    tol = settings.semisimple_tol if tol is None else tol
    m = np.asarray(m, dtype=float)
    nrm = frob(m)
    if nrm == 0.0:
        return True
    x = m / nrm
    return frob(np.linalg.matrix_power(x, x.shape[0])) < tol


def semisimplicity_residual(m) -> float:
    """Reconstruction residual of the complex eigendecomposition.

    Returns ``inf`` when the eigenvector matrix is numerically singular
    (condition number above 1e8), which signals a nontrivial Jordan block.
    """
    m = np.asarray(m, dtype=float)
    w, vecs = np.linalg.eig(m)
    if np.linalg.cond(vecs) > 1e8:
        return float("inf")
    rec = vecs @ np.diag(w) @ np.linalg.inv(vecs)
    return float(np.linalg.norm(rec - m)) / max(1.0, frob(m))


def is_semisimple(m, tol=None) -> bool:
    tol = settings.semisimple_tol if tol is None else tol
    return semisimplicity_residual(m) < tol


def is_normal(m, tol=None) -> bool:
    tol = settings.tol if tol is None else tol
    m = np.asarray(m, dtype=float)
    return frob(commutator(m, m.T)) < tol * max(1.0, frob(m) ** 2)


def nilsol_ratio(a1) -> float:
    a1 = np.asarray(a1, dtype=float)
    return frob(commutator(a1, a1.T)) ** 2 / frob(a1) ** 2


def nilsol_residual(a1) -> float:
    """|[B,[B,B^T]] + (|[B,B^T]|^2/|B|^2) B| for B = A1/|A1|."""
    a1 = np.asarray(a1, dtype=float)
    nrm = frob(a1)
    if nrm == 0.0:
        return 0.0
    b = a1 / nrm
    cb = commutator(b, b.T)
    return frob(commutator(b, cb) + frob(cb) ** 2 * b)


Verdict = namedtuple("Verdict", ["kind", "residual", "detail"])


def soliton_classify(d: AlmostAbelianDatum) -> Verdict:
    """Classify mu_A as an algebraic soliton.

    Returns a Verdict whose ``kind`` is one of ``"AlgebraicSoliton(normal)"``,
    ``"AlgebraicSoliton(nilsol)"``, ``"AlgebraicSoliton(fitted)"``,
    ``"NotSoliton"`` or ``"GroupAdmitsNone"``.

    Notes
    -----
    When A is not nilpotent the soliton condition is "v = 0 and A1 normal";
    this covers a = 0 with v != 0 as well.  A non-nilpotent, non-semisimple
    A rules out solitons on the whole group.  For nilpotent A with v = 0 the
    nilsoliton equation decides; nilpotent A with v != 0 is not covered by a
    closed criterion and is decided by the numerical algebraic fit.
    """
    am = d.matrix
    if frob(am) == 0.0:
        return Verdict("AlgebraicSoliton(normal)", 0.0, "flat")
    if is_nilpotent_matrix(am):
        if frob(d.v) < settings.tol:
            res = nilsol_residual(d.a1)
            kind = "AlgebraicSoliton(nilsol)" if res < settings.fit_tol else "NotSoliton"
            return Verdict(kind, res, f"ratio {nilsol_ratio(d.a1):.12g}")
        from .solitons import algebraic_fit

        mu, triple = build_mu(d)
        cert = algebraic_fit(mu, triple)
        kind = "AlgebraicSoliton(fitted)" if cert.certified else "NotSoliton"
        return Verdict(kind, cert.residual, f"c {cert.c:.12g}")
    ss = semisimplicity_residual(am)
    if not ss < settings.semisimple_tol:
        return Verdict("GroupAdmitsNone", ss, "A neither nilpotent nor semisimple")
    res = frob(d.v) + frob(commutator(d.a1, d.a1.T))
    kind = "AlgebraicSoliton(normal)" if res < settings.tol * max(1.0, frob(am) ** 2) else "NotSoliton"
    return Verdict(kind, res, f"semisimplicity residual {ss:.2e}")


# ---------------------------------------------------------------------------
# bracket flow


def invariant_family(d: AlmostAbelianDatum, tol=None) -> str:
    """Name of an invariant family containing ``d``: "v=0", "invf1", "invf2".

    Raises NotInvariantFamily otherwise.
    """
    tol = settings.tol if tol is None else tol
    scale = max(1.0, frob(d.matrix))
    if frob(d.v) < tol * scale:
        return "v=0"
    if abs(d.a) < tol * scale and frob(d.a1 @ d.v) < tol * scale**2:
        if frob(d.a1.T @ d.v) < tol * scale**2:
            return "invf1"
        if frob(d.a1 @ d.a1) < tol * scale**2:
            return "invf2"
    r = 0.25 * d.a1 @ d.v - 0.5 * d.a * d.v
    hint = " (r != 0: this case reduces to h3 + R^{2n-3})" if frob(r) > tol * scale else ""
    raise NotInvariantFamily("datum lies in none of the invariant families" + hint)


def _rhs_arrays(a, v, a1):
    j1 = j1_matrix(a1.shape[0])
    s1 = sym(a1)
    tr_s1 = float(np.sum(s1 * s1))
    vv = float(v @ v)
    k = 2 * a * a + vv + tr_s1
    da = -0.5 * k * a
    dv = -(2 * a * a + 1.25 * vv + tr_s1) * v + 0.5 * a1 @ (a1.T @ v) + 0.5 * a1.T @ (a1.T @ v) - a * (a1.T @ v)
    c = commutator(a1, a1.T)
    da1 = -0.5 * k * a1 + 0.5 * commutator(a1, c) - 0.5 * a * c - 0.5 * commutator(a1, ac_part(np.outer(v, v), j1))
    return da, dv, da1


def bracket_rhs(d: AlmostAbelianDatum, check=True) -> DatumVelocity:
    """Velocity (a', v', A1') of the bracket flow on an invariant family."""
    if check:
        invariant_family(d)
    return DatumVelocity(*_rhs_arrays(d.a, d.v, d.a1))


def bracket_rhs_vector(y, n):
    """Flattened form of :func:`bracket_rhs` on state vectors."""
    m = 2 * n - 2
    a, v, a1 = y[0], y[1 : 1 + m], y[1 + m :].reshape(m, m)
    da, dv, da1 = _rhs_arrays(a, v, a1)
    return np.concatenate([[da], dv, da1.ravel()])


def bracket_rhs_v0(am):
    """A' = -1/2 (a^2 + tr S(A)^2) A + 1/2 [A,[A,A^T]] - (tr A / 2)[A,A^T]."""
    am = np.asarray(am, dtype=float)
    a = am[0, 0]
    s = sym(am)
    c = commutator(am, am.T)
    return -0.5 * (a * a + float(np.sum(s * s))) * am + 0.5 * commutator(am, c) - 0.5 * np.trace(am) * c


def monitors(d: AlmostAbelianDatum) -> dict:
    am = d.matrix
    s = sym(am)
    tr_s2 = float(np.sum(s * s))
    nrm = frob(am)
    return {
        "norm": nrm,
        "trP": -2.0 * d.a**2,
        "R": -d.a**2 - tr_s2,
        "trS2": tr_s2,
        "comm_ratio": frob(commutator(am, am.T)) ** 2 / nrm**4 if nrm > 0 else 0.0,
    }


# ---------------------------------------------------------------------------
# nilsolitons


def nilsoliton_representative(jordan_blocks) -> np.ndarray:
    """Block-diagonal nilpotent matrix with superdiagonals sqrt(i(k-i))."""
    blocks = list(jordan_blocks)
    if any(int(k) != k or k < 1 for k in blocks):
        raise ValueError(f"block sizes must be positive integers, got {blocks}")
    size = int(sum(blocks))
    out = np.zeros((size, size))
    start = 0
    for k in blocks:
        k = int(k)
        for i in range(1, k):
            out[start + i - 1, start + i] = np.sqrt(i * (k - i))
        start += k
    return out


def moment_functional(b) -> float:
    """F(B) = |[B,B^T]|^2 / |B|^4."""
    nrm = frob(b)
    return frob(commutator(b, b.T)) ** 2 / nrm**4


def _orbit_gradient(b):
    nrm2 = float(np.sum(b * b))
    c = commutator(b, b.T)
    grad = 4.0 * commutator(c, b) / nrm2**2 - 4.0 * float(np.sum(c * c)) * b / nrm2**3
    # derivative of F along B -> e^{tX} B e^{-tX} is <X, [grad, B^T]>
    return commutator(grad, b.T)


NilsolitonRefinement = namedtuple("NilsolitonRefinement", ["matrix", "value", "grad_norm", "iterations", "residual"])


def refine_nilsoliton(seed, gtol=1e-10, max_iter=5000, step=0.5) -> NilsolitonRefinement:
    """Minimize F over the conjugacy class of ``seed`` by gradient descent.

    Each step conjugates B by exp(-s G) where G is the orbit gradient,
    with normalized steps, Armijo backtracking and renormalization |B| = 1.
    If the gradient is still above ``gtol`` the result is polished by
    Levenberg-Marquardt on the residual along the orbit.
    """
    b = np.array(seed, dtype=float)
    b /= frob(b)
    f = moment_functional(b)
    s = step
    it = 0
    g = _orbit_gradient(b)
    gn = frob(g)
    while it < max_iter and gn >= gtol:
        direction = g / gn
        while True:
            e = expm(-s * direction)
            trial = e @ b @ np.linalg.inv(e)
            trial /= frob(trial)
            ft = moment_functional(trial)
            gt = _orbit_gradient(trial)
            if ft <= f - 1e-4 * s * gn or s < 1e-16:
                break
            # near the minimum F stalls at rounding level; fall back on |grad|
            if abs(ft - f) < 64 * np.finfo(float).eps * f and frob(gt) < gn:
                break
            s *= 0.5
        if ft > f + 64 * np.finfo(float).eps * f or frob(gt) >= gn and ft > f:
            break
        b, f = trial, ft
        g = gt
        gn = frob(g)
        s = min(4.0 * s, step)
        it += 1
    if gn >= gtol:
        b = _polish_nilsoliton(b)
        f = moment_functional(b)
        gn = frob(_orbit_gradient(b))
    return NilsolitonRefinement(b, f, gn, it, nilsol_residual(b))


def _polish_nilsoliton(b):
    """Levenberg-Marquardt on the nilsoliton residual along the orbit of b."""
    from scipy.optimize import least_squares

    m = b.shape[0]

    def conj(x):
        e = expm(x.reshape(m, m))
        t = e @ b @ np.linalg.inv(e)
        return t / frob(t)

    def resid(x):
        t = conj(x)
        ct = commutator(t, t.T)
        return (commutator(t, ct) + frob(ct) ** 2 * t).ravel()

    sol = least_squares(resid, np.zeros(m * m), method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15)
    out = conj(sol.x)
    return out if nilsol_residual(out) < nilsol_residual(b) else b


# ---------------------------------------------------------------------------
# spectra


def scaled_spectrum(m) -> np.ndarray:
    """Eigenvalues divided by the largest modulus, sorted (zeros if nilpotent)."""
    m = np.asarray(m, dtype=float)
    w = np.linalg.eigvals(m)
    top = np.max(np.abs(w)) if w.size else 0.0
    if top < settings.semisimple_tol * max(1.0, frob(m)) or is_nilpotent_matrix(m):
        return np.zeros(w.shape, dtype=complex)
    w = w / top
    order = np.lexsort((np.round(w.imag, 9), np.round(w.real, 9)))
    return w[order]


def spectrum_distance(s1, s2, allow_sign=True) -> float:
    """Matching distance between two eigenvalue multisets (optionally up to -1)."""
    s1 = np.asarray(s1, dtype=complex)
    s2 = np.asarray(s2, dtype=complex)
    if s1.shape != s2.shape:
        return float("inf")

    def match(x, y):
        cost = np.abs(x[:, None] - y[None, :])
        r, c = linear_sum_assignment(cost)
        return float(cost[r, c].max()) if len(r) else 0.0

    best = match(s1, s2)
    if allow_sign:
        best = min(best, match(s1, -s2))
    return best


# ---------------------------------------------------------------------------
# fixed examples


def lattice_family_datum(a, b) -> AlmostAbelianDatum:
    """n = 3, a = 0, v = 0 and A1 = [[0,0,b,0],[0,a,0,0],[0,0,0,0],[0,0,0,-a]]."""
    a1 = np.zeros((4, 4))
    a1[0, 2] = b
    a1[1, 1] = a
    a1[3, 3] = -a
    return AlmostAbelianDatum(0.0, np.zeros(4), a1)


def lattice_example_datum() -> AlmostAbelianDatum:
    """The six-dimensional example with log((3+sqrt 5)/2) on the diagonal."""
    return lattice_family_datum(np.log((3 + np.sqrt(5)) / 2), 1.0)


def lattice_reduced_rhs(t, y):
    a, b = y
    return np.array([-(a * a + 0.25 * b * b) * a, -(a * a + 1.25 * b * b) * b])


LATTICE_INTEGER_MATRIX = np.array([[1, 0, 1, 0], [0, 2, 0, 1], [0, 0, 1, 0], [0, 1, 0, 1]], dtype=float)


def lattice_certificate(d: AlmostAbelianDatum = None) -> float:
    """Spectral distance between exp(A1) and the printed integer matrix."""
    d = lattice_example_datum() if d is None else d
    s1 = np.linalg.eigvals(expm(d.a1))
    s2 = np.linalg.eigvals(LATTICE_INTEGER_MATRIX)
    return spectrum_distance(s1, s2, allow_sign=False)


def surface_soliton_matrices() -> dict:
    """The five dimension-4 unimodular soliton matrices A (a = 0)."""
    return {
        "R4": np.zeros((3, 3)),
        "rh3": np.array([[0, 0, 0], [0, 0, 1], [0, 0, 0]], dtype=float),
        "rr3,-1": np.array([[0, 0, 0], [0, 1, 0], [0, 0, -1]], dtype=float),
        "rr'3,0": np.array([[0, 0, 0], [0, 0, -1], [0, 1, 0]], dtype=float),
        "n4": np.array([[0, 1, 0], [0, 0, 1], [0, 0, 0]], dtype=float),
    }


def surface_class(d: AlmostAbelianDatum, tol=1e-9) -> str:
    """Isomorphism class of a unimodular dimension-4 datum."""
    if d.n != 2 or abs(d.a) > tol:
        raise InvalidDatum("expected a = 0 in dimension 4")
    b, c = d.v
    (dd, e), (f, _) = d.a1
    if frob(d.matrix) < tol:
        return "R4"
    det = dd * dd + e * f
    if det > tol:
        return "rr3,-1"
    if det < -tol:
        return "rr'3,0"
    if abs(dd * b + f * c) < tol and abs(e * b - dd * c) < tol:
        return "rh3"
    return "n4"


def unitary_class_distance(x, y) -> float:
    """min over U(1) rotations R and s = +-1 of |(Rv, sRA1R^T) - y|.

    ``x`` and ``y`` are dimension-4 A matrices with a = 0; this is the
    residual symmetry of the structure (omega, g) acting on A.
    """
    from scipy.optimize import minimize_scalar

    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)

    def act(theta, s):
        r = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
        out = np.zeros((3, 3))
        out[0, 0] = s * x[0, 0]
        out[0, 1:] = r @ x[0, 1:]
        out[1:, 1:] = s * r @ x[1:, 1:] @ r.T
        return out

    best = float("inf")
    grid = np.linspace(0, 2 * np.pi, 73)
    for s in (1.0, -1.0):
        vals = [frob(act(t, s) - y) for t in grid]
        k = int(np.argmin(vals))
        lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
        opt = minimize_scalar(lambda t: frob(act(t, s) - y), bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
        best = min(best, float(opt.fun), min(vals))
    return best


def j_anti_check(d: AlmostAbelianDatum) -> float:
    """|Ric^ac - j_split(Ric)| between the closed forms (self-consistency)."""
    rep = closed_form_curvature(d)
    _, ac = j_split(rep.ric, full_j(d.n))
    return frob(ac - rep.ric_ac)
