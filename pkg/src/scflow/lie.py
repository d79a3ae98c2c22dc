"""Lie bracket tensors and their structural residuals.

A bracket on R^n is stored as ``c[i, j, k]``, the coefficient of ``e_k`` in
``mu(e_i, e_j)``.  Indices are 0-based in code and 1-based in the
shorthand notation.
"""
import re
from fractions import Fraction

import numpy as np

from .exceptions import DimensionError, NotALieAlgebra, ShorthandSyntaxError
from .linalg import CompatibleTriple, frob
from .settings import settings


class Bracket:
    """Antisymmetric bilinear map R^n x R^n -> R^n (immutable)."""

    __slots__ = ("c",)

    def __init__(self, c, check=True):
        c = np.array(c, dtype=float)
        if c.ndim != 3 or not (c.shape[0] == c.shape[1] == c.shape[2]):
            raise DimensionError(f"bracket tensor must be n x n x n, got {c.shape}")
        if check and frob(c + c.transpose(1, 0, 2)) > settings.tol * max(1.0, frob(c)):
            raise ValueError("bracket tensor is not antisymmetric")
        c = 0.5 * (c - c.transpose(1, 0, 2))
        c.setflags(write=False)
        object.__setattr__(self, "c", c)

    def __setattr__(self, name, value):
        raise AttributeError("Bracket is immutable")

    @classmethod
    def zero(cls, dim):
        return cls(np.zeros((dim, dim, dim)))

    @classmethod
    def from_relations(cls, dim, relations):
        """Build from ``{(i, j): {k: coeff}}`` with 1-based indices, meaning
        [e_i, e_j] = sum coeff e_k."""
        c = np.zeros((dim, dim, dim))
        for (i, j), images in relations.items():
            for k, coeff in images.items():
                c[i - 1, j - 1, k - 1] += coeff
                c[j - 1, i - 1, k - 1] -= coeff
        return cls(c)

    @classmethod
    def from_vector(cls, y, dim):
        return cls(np.asarray(y).reshape(dim, dim, dim), check=False)

    @property
    def dim(self) -> int:
        return self.c.shape[0]

    def __call__(self, x, y):
        return np.einsum("i,j,ijk->k", x, y, self.c)

    def ad(self, x) -> np.ndarray:
        """Matrix of ad_x = mu(x, .)."""
        return np.einsum("i,ijk->kj", x, self.c)

    def ad_basis(self) -> np.ndarray:
        """Stack of ad(e_i) matrices, shape (n, n, n)."""
        return self.c.transpose(0, 2, 1)

    def norm(self) -> float:
        """|mu| with each unordered pair {i, j} counted once."""
        return float(np.sqrt(0.5 * np.sum(self.c**2)))

    def inner(self, other) -> float:
        """Full-sum inner product sum_{ijk} c_ij^k d_ij^k."""
        return float(np.sum(self.c * _coeffs(other)))

    def vector(self) -> np.ndarray:
        return self.c.ravel().copy()

    def act(self, h) -> "Bracket":
        """Change of basis action h.mu = h mu(h^{-1}., h^{-1}.)."""
        h = np.asarray(h, dtype=float)
        hinv = np.linalg.inv(h)
        return Bracket(np.einsum("li,mj,lmn,kn->ijk", hinv, hinv, self.c, h), check=False)

    def __add__(self, other):
        return Bracket(self.c + _coeffs(other), check=False)

    def __sub__(self, other):
        return Bracket(self.c - _coeffs(other), check=False)

    def __mul__(self, s):
        return Bracket(self.c * float(s), check=False)

    __rmul__ = __mul__

    def __neg__(self):
        return Bracket(-self.c, check=False)

    def __repr__(self):
        return f"Bracket({to_shorthand(self)!r})"


def _coeffs(mu):
    return mu.c if isinstance(mu, Bracket) else np.asarray(mu)


def jacobi_residual(mu: Bracket) -> float:
    """Frobenius norm of the Jacobiator evaluated on basis triples."""
    c = mu.c
    t = np.einsum("ijk,klm->ijlm", c, c)
    jac = t + np.einsum("jlim->ijlm", t) + np.einsum("lijm->ijlm", t)
    return frob(jac)


def delta(mu: Bracket, e) -> Bracket:
    """delta_mu(E) = mu(E., .) + mu(., E.) - E mu(., .)."""
    e = np.asarray(e, dtype=float)
    if e.shape != (mu.dim, mu.dim):
        raise DimensionError(f"matrix shape {e.shape} does not match dim {mu.dim}")
    c = mu.c
    out = (
        np.einsum("li,ljk->ijk", e, c)
        + np.einsum("lj,ilk->ijk", e, c)
        - np.einsum("kl,ijl->ijk", e, c)
    )
    return Bracket(out, check=False)


def derivation_residual(mu: Bracket, d) -> float:
    """Norm of delta_mu(D); zero iff D is a derivation."""
    return delta(mu, d).norm()


def derivation_operator(mu: Bracket) -> np.ndarray:
    """Matrix of the linear map D -> delta_mu(D), shape (n^3, n^2).

    Columns are indexed by the row-major flattening of D.
    """
    n = mu.dim
    cols = []
    for idx in range(n * n):
        e = np.zeros(n * n)
        e[idx] = 1.0
        cols.append(delta(mu, e.reshape(n, n)).c.ravel())
    return np.array(cols).T


def derivation_basis(mu: Bracket, rank_tol=None) -> list:
    """Orthonormal basis of Der(mu) (in the Frobenius inner product)."""
    rank_tol = settings.rank_tol if rank_tol is None else rank_tol
    n = mu.dim
    m = derivation_operator(mu)
    _, s, vt = np.linalg.svd(m)
    smax = s[0] if s.size and s[0] > 0 else 0.0
    rank = int(np.sum(s > rank_tol * smax)) if smax > 0 else 0
    return [vt[k].reshape(n, n) for k in range(rank, n * n)]


def closedness_residual(mu: Bracket, triple: CompatibleTriple) -> float:
    """Norm of d omega evaluated on basis triples."""
    if triple.dim != mu.dim:
        raise DimensionError("dimension mismatch")
    w = np.einsum("ijk,kl->ijl", mu.c, triple.omega)
    res = w + np.einsum("jli->ijl", w) + np.einsum("lij->ijl", w)
    return frob(res)


def _span(vectors, tol):
    if len(vectors) == 0:
        return np.zeros((0, 0))
    m = np.array(vectors)
    u, s, vt = np.linalg.svd(m, full_matrices=False)
    r = int(np.sum(s > tol))
    return vt[:r]


def lower_central_series(mu: Bracket, tol=None) -> list:
    """Orthonormal bases (rows) of g, [g, g], [g, [g, g]], ... until stable."""
    tol = settings.series_tol if tol is None else tol
    n = mu.dim
    current = np.eye(n)
    series = [current]
    for _ in range(n + 1):
        nxt = _span([mu(e, v) for e in np.eye(n) for v in current], tol)
        series.append(nxt)
        if nxt.shape[0] == current.shape[0] or nxt.shape[0] == 0:
            break
        current = nxt
    return series


def derived_series(mu: Bracket, tol=None) -> list:
    tol = settings.series_tol if tol is None else tol
    n = mu.dim
    current = np.eye(n)
    series = [current]
    for _ in range(n + 1):
        nxt = _span([mu(u, v) for u in current for v in current], tol)
        series.append(nxt)
        if nxt.shape[0] == current.shape[0] or nxt.shape[0] == 0:
            break
        current = nxt
    return series


def is_unimodular(mu: Bracket, tol=None) -> bool:
    tol = settings.series_tol if tol is None else tol
    return bool(np.all(np.abs(mean_curvature_vector(mu)) < tol))


def mean_curvature_vector(mu: Bracket) -> np.ndarray:
    """Coordinates of tr(ad e_i); equals H in an orthonormal basis."""
    return np.einsum("ikk->i", mu.c)


def structural_flags(mu: Bracket, tol=None):
    """Return ``(unimodular, nilpotent, solvable)``.

    Raises NotALieAlgebra when the Jacobi identity fails.
    """
    tol = settings.series_tol if tol is None else tol
    if jacobi_residual(mu) > max(tol, settings.tol * max(1.0, mu.norm() ** 2)):
        raise NotALieAlgebra(f"Jacobi residual {jacobi_residual(mu):.3e}")
    nilpotent = lower_central_series(mu, tol)[-1].shape[0] == 0
    solvable = derived_series(mu, tol)[-1].shape[0] == 0
    return is_unimodular(mu, tol), nilpotent, solvable


def nilradical_dim(mu: Bracket, tol=None, seed=0) -> int:
    """Dimension of the nilradical of a solvable Lie algebra.

    For solvable algebras the nilradical is the set of ad-nilpotent elements,
    i.e. the common kernel of all roots.  For a generic y the functionals
    x -> tr(ad x (ad y)^m), m = 0..n-1, cut out exactly that kernel.
    """
    tol = settings.series_tol if tol is None else tol
    n = mu.dim
    ad = mu.ad_basis()
    y = np.random.default_rng(seed).standard_normal(n)
    ady = np.einsum("i,ijk->jk", y, ad)
    ady = ady / max(1.0, np.max(np.abs(np.linalg.eigvals(ady))))
    rows = []
    power = np.eye(n)
    for _ in range(n):
        rows.append([np.trace(ad[i] @ power) for i in range(n)])
        power = power @ ady
    s = np.linalg.svd(np.array(rows), compute_uv=False)
    smax = s[0] if s.size and s[0] > 0 else 0.0
    rank = int(np.sum(s > tol * max(smax, 1.0))) if smax > 0 else 0
    return n - rank


# ---------------------------------------------------------------------------
# shorthand notation

_PAIR = re.compile(r"\d\d")


class _Scanner:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, ch):
        if self.peek() != ch:
            self.fail(f"expected {ch!r}")
        self.pos += 1

    def number(self):
        self.skip()
        m = re.compile(r"\d+(\.\d*)?([eE][+-]?\d+)?|\.\d+([eE][+-]?\d+)?").match(self.text, self.pos)
        if not m:
            self.fail("expected a number or index pair")
        self.pos = m.end()
        return m.group(0)

    def fail(self, msg):
        raise ShorthandSyntaxError(msg, self.text, min(self.pos, len(self.text)))


def _coefficient(literal, denominator=None):
    value = Fraction(literal) if "e" not in literal.lower() else float(literal)
    if denominator is not None:
        value = Fraction(value) / Fraction(denominator)
    return float(value)


def parse_shorthand(text: str, dim: int = None) -> Bracket:
    """Parse the tuple notation ``(s_1, ..., s_n)``.

    Slot ``k`` is a signed sum of terms ``[coeff *] ij`` meaning that
    ``[e_i, e_j]`` has coefficient ``coeff`` on ``e_k``.  Coefficients are
    decimal or rational ``p/q``; a leading ``-`` negates a term.
    """
    sc = _Scanner(text)
    sc.take("(")
    slots = []
    while True:
        slots.append(_parse_slot(sc))
        ch = sc.peek()
        if ch == ",":
            sc.pos += 1
            continue
        if ch == ")":
            sc.pos += 1
            break
        sc.fail("expected ',' or ')'")
    if sc.peek() != "":
        sc.fail("trailing characters")
    n = len(slots)
    if dim is not None and dim != n:
        raise DimensionError(f"shorthand has {n} slots, expected {dim}")
    c = np.zeros((n, n, n))
    for k, terms in enumerate(slots):
        for coeff, i, j, where in terms:
            if not (1 <= i <= n and 1 <= j <= n):
                sc.pos = where
                sc.fail(f"index pair {i}{j} out of range 1..{n}")
            if i == j:
                sc.pos = where
                sc.fail(f"degenerate pair {i}{j}")
            c[i - 1, j - 1, k] += coeff
            c[j - 1, i - 1, k] -= coeff
    return Bracket(c)


def _parse_slot(sc):
    terms = []
    sign = 1.0
    first = True
    while True:
        ch = sc.peek()
        if ch in "+-":
            sign = -1.0 if ch == "-" else 1.0
            sc.pos += 1
        elif not first:
            return terms
        start = sc.pos
        lit = sc.number()
        ch = sc.peek()
        if ch == "/":
            sc.pos += 1
            den = sc.number()
            coeff = _coefficient(lit, den)
            ch = sc.peek()
            if ch not in "*·":
                sc.fail("expected '*' after coefficient")
            sc.pos += 1
            where = sc.pos
            pair = sc.number()
        elif ch in ("*", "·"):
            sc.pos += 1
            coeff = _coefficient(lit)
            where = sc.pos
            pair = sc.number()
        else:
            coeff, pair, where = 1.0, lit, start
        if first and sign == 1.0 and pair == "0" and coeff == 1.0 and sc.peek() in ",)":
            return terms
        if not _PAIR.fullmatch(pair):
            sc.pos = where
            sc.fail(f"expected a two-digit index pair, got {pair!r}")
        terms.append((sign * coeff, int(pair[0]), int(pair[1]), where))
        first = False
        sign = 1.0


def format_coefficient(x: float) -> str:
    """Shortest exact text for a coefficient: rational p/q when exact."""
    f = Fraction(x).limit_denominator(1000)
    if float(f) == x:
        return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"
    return repr(float(x))


def to_shorthand(mu: Bracket) -> str:
    """Canonical serialization of a bracket in tuple notation.

    Pairs involving the last basis vector are written ``n i``; all other
    pairs are written ``i j`` with ``i < j``.  Terms in a slot are sorted by
    their written pair.
    """
    n = mu.dim
    slots = []
    for k in range(n):
        terms = []
        for i in range(n):
            for j in range(i + 1, n):
                coeff = mu.c[i, j, k]
                if coeff == 0.0:
                    continue
                if j == n - 1:
                    terms.append((f"{n}{i + 1}", -coeff))
                else:
                    terms.append((f"{i + 1}{j + 1}", coeff))
        terms.sort()
        text = ""
        for pair, coeff in terms:
            sign = "-" if coeff < 0 else "+"
            mag = abs(coeff)
            body = pair if mag == 1.0 else f"{format_coefficient(mag)}*{pair}"
            text += sign + body
        if not text:
            text = "0"
        elif text[0] == "+":
            text = text[1:]
        slots.append(text)
    return "(" + ",".join(slots) + ")"
