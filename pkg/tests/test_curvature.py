import numpy as np
from hypothesis import given

from scflow import almost_abelian as aa
from scflow import catalog, lsa
from scflow.curvature import chern_ricci, curvature, j_velocity, ricci, scf_rhs
from scflow.lie import Bracket, parse_shorthand
from scflow.linalg import build_triple, canonical_triple, j_split, omega_transpose, two_form

from conftest import random_almost_kahler, seeds


def koszul_ricci(c, g):
    """Ricci operator from the Levi-Civita connection (Koszul formula)."""
    n = c.shape[0]
    lam = np.einsum("ijl,lk->ijk", c, g)  # g([e_i, e_j], e_k)
    # g(nabla_{e_i} e_j, e_k)
    low = 0.5 * (lam - lam.transpose(2, 0, 1) + lam.transpose(1, 2, 0))
    ginv = np.linalg.inv(g)
    # nab[i] is the matrix of nabla_{e_i}: column j holds nabla_{e_i} e_j
    nab = np.einsum("ijl,lk->ikj", low, ginv)
    ric = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            # R(e_i, .) as a map, evaluated as Y -> R(e_i, Y) Z; ric(Y, Z) = sum_i e^i(R(e_i, Y) Z)
            curv = nab[i] @ nab[j] - nab[j] @ nab[i] - np.einsum("l,lab->ab", c[i, j], nab)
            ric[j] += curv[i]  # row i of R(e_i, e_j) gives e^i(R(e_i, e_j) e_z) over z
    return ginv @ ric


def test_abelian():
    mu = Bracket.zero(4)
    cr = curvature(mu, canonical_triple(4))
    assert np.all(cr.p == 0) and np.all(cr.P == 0) and np.all(cr.ric == 0) and cr.scalar == 0
    od, gd = scf_rhs(canonical_triple(4), mu)
    assert np.all(od == 0) and np.all(gd == 0)


def test_rh3_values():
    mu = parse_shorthand("(0,0,12,0)")
    triple = build_triple(two_form(4, [(1, 1, 4), (1, 2, 3)]), np.eye(4))
    cr = curvature(mu, triple)
    assert np.allclose(cr.P, 0)
    assert np.allclose(cr.ric, np.diag([-0.5, -0.5, 0.5, 0]))
    assert np.allclose(cr.ric_ac, np.diag([-0.25, -0.5, 0.5, 0.25]))
    od, gd = scf_rhs(triple, mu)
    assert np.allclose(od, 0)
    assert np.allclose(gd, -2 * np.diag([-0.25, -0.5, 0.5, 0.25]))


def test_surface_p_display():
    # (a,b,c,d,e,f) = (0,1,0,0,1,0): only -(eb-dc)/2 = -1/2 survives
    d = aa.AlmostAbelianDatum.from_params4(0, 1, 0, 0, 1, 0)
    mu, triple = aa.build_mu(d)
    big_p = chern_ricci(mu, triple)[1]
    expected = np.zeros((4, 4))
    expected[0, 2] = -0.5
    expected[1, 3] = 0.5
    assert np.allclose(big_p, expected)


def surface_ric_ac(b, c, d, e, f):
    m = np.zeros((4, 4))
    m[0, 0] = d * d + (b * b + c * c) / 2 + (e + f) ** 2 / 4
    m[3, 3] = -m[0, 0]
    m[0, 1] = m[1, 0] = m[2, 3] = (d * b + c * e) / 4
    m[3, 2] = -(d * b + c * e) / 4
    m[2, 3] = -(d * b + c * e) / 4
    m[0, 2] = m[2, 0] = m[1, 3] = m[3, 1] = (b * f - d * c) / 4
    m[1, 1] = (e * e - f * f) / 2 - (b * b - c * c) / 4
    m[2, 2] = -m[1, 1]
    m[1, 2] = m[2, 1] = d * (f - e) - b * c / 2
    return m


@given(seeds)
def test_surface_ric_ac_display(seed):
    b, c, d, e, f = np.random.default_rng(seed).normal(size=5)
    mu, triple = aa.build_mu(aa.AlmostAbelianDatum.from_params4(0, b, c, d, e, f))
    assert np.allclose(ricci(mu, triple)[1], surface_ric_ac(b, c, d, e, f), atol=1e-12)
    big_p = chern_ricci(mu, triple)[1]
    expected = np.zeros((4, 4))
    expected[0, 1] = expected[2, 3] = -(d * b + f * c) / 2
    expected[0, 2] = -(e * b - d * c) / 2
    expected[1, 3] = (e * b - d * c) / 2
    assert np.allclose(big_p, expected, atol=1e-12)


def test_u2_at_t1():
    d = lsa.quaternion_lsa()
    mu, triple = lsa.build_double(d)
    assert np.allclose(ricci(mu, triple)[0], np.diag([-4, 2, 2, 2, -4, -4, -4, -4]))


def test_r2r2_kahler_einstein_rhs():
    entry = catalog.get_entry("r2r2")
    st = entry.structure("omega0")
    mu, triple = entry.bracket_at(None, st), entry.triple_at(st)
    od, gd = scf_rhs(triple, mu)
    assert np.allclose(od, 2 * triple.omega)
    assert np.allclose(gd, 2 * triple.metric)


@given(seeds)
def test_ricci_matches_koszul_oracle(seed):
    mu, triple = random_almost_kahler(np.random.default_rng(seed))
    ric = ricci(mu, triple)[0]
    oracle = koszul_ricci(mu.c, triple.metric)
    assert np.allclose(ric, oracle, atol=1e-9 * max(1.0, np.abs(oracle).max()))


@given(seeds)
def test_operator_symmetries(seed):
    mu, triple = random_almost_kahler(np.random.default_rng(seed))
    cr = curvature(mu, triple)
    scale = max(1.0, np.abs(cr.P).max(), np.abs(cr.ric).max())
    assert np.linalg.norm(omega_transpose(cr.P, triple) - cr.P) < 1e-9 * scale
    gr = triple.metric @ cr.ric
    assert np.linalg.norm(gr - gr.T) < 1e-9 * scale
    assert np.linalg.norm(triple.j @ cr.ric_ac @ triple.j - cr.ric_ac) < 1e-9 * scale
    assert np.allclose(cr.ric_ac, j_split(cr.ric, triple.j)[1])
    # p(X, Y) = omega(P X, Y)
    assert np.allclose(cr.p, cr.P.T @ triple.omega, atol=1e-9 * scale)
    if cr.z is not None:
        adz = mu.ad(cr.z)
        assert np.linalg.norm(adz + omega_transpose(adz, triple) - cr.P) < 1e-8 * scale


@given(seeds)
def test_p_only_depends_on_j(seed):
    rng = np.random.default_rng(seed)
    mu, triple = random_almost_kahler(rng)
    p = chern_ricci(mu, triple)[0]
    s = rng.uniform(0.2, 5)
    assert np.allclose(chern_ricci(mu, build_triple(s * triple.omega, s * triple.metric))[0], p, atol=1e-9)


@given(seeds)
def test_j_evolution(seed):
    mu, triple = random_almost_kahler(np.random.default_rng(seed))
    jd = j_velocity(triple, mu)
    cr = curvature(mu, triple)
    j = triple.j
    p_ac = j_split(cr.P, j)[1]
    scale = max(1.0, np.abs(jd).max())
    assert np.linalg.norm(jd - (-2 * j @ p_ac - 2 * j @ cr.ric_ac)) < 1e-9 * scale
    assert np.linalg.norm(jd - (-2 * j @ p_ac + cr.ric @ j - j @ cr.ric)) < 1e-9 * scale


@given(seeds)
def test_kahler_case_is_kahler_ricci(seed):
    rng = np.random.default_rng(seed)
    x = rng.normal()
    d = aa.AlmostAbelianDatum(abs(rng.normal()), [0.0, 0.0, 0.0, 0.0],
                              np.block([[np.zeros((2, 2)), np.diag([x, -x]) @ np.zeros((2, 2)) + x * np.eye(2)],
                                        [-x * np.eye(2), np.zeros((2, 2))]]))
    mu, triple = aa.build_mu(d)
    cr = curvature(mu, triple)
    assert np.allclose(cr.ric_ac, 0, atol=1e-12)
    # p = ric(J., .) and g' = -2 ric
    assert np.allclose(cr.p, (cr.ric @ triple.j).T, atol=1e-12)
    od, gd = scf_rhs(triple, mu)
    assert np.allclose(od, -2 * cr.p)
    assert np.allclose(gd, -2 * cr.ric, atol=1e-12)
