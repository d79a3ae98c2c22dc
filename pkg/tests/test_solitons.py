import numpy as np
import pytest
from hypothesis import assume, given
from scipy.linalg import expm

from scflow import catalog, lsa
from scflow.integrate import FlowControls, bracket_flow_rhs, integrate
from scflow.lie import Bracket, derivation_residual
from scflow.linalg import canonical_triple
from scflow.solitons import algebraic_fit, classify_constant, cuni_identity, strong_fit

from conftest import random_almost_kahler, seeds


def member(name, sid=None, params=None):
    entry = catalog.get_entry(name)
    st = entry.structure(sid) if sid else entry.structures[0]
    return entry.bracket_at(params, st), entry.triple_at(st, params)


def test_rh3_algebraic():
    cert = algebraic_fit(*member("rh3"))
    assert cert.certified and cert.residual < 1e-12
    assert cert.c == pytest.approx(-1.25, abs=1e-12)
    assert cert.classification == "expanding"
    assert np.allclose(cert.d, np.diag([1, 0.75, 1.75, 1.5]), atol=1e-12)


def test_rh3_strong_and_trace_identity():
    mu, triple = member("rh3")
    cert = strong_fit(mu, triple)
    assert cert.certified
    assert cert.c1 == pytest.approx(0, abs=1e-12) and np.allclose(cert.d1, 0, atol=1e-12)
    assert cert.c2 == pytest.approx(-1.25, abs=1e-12)
    assert cert.checks["cuni_residual"] < 1e-12
    assert cert.checks["c2_sign_ok"]
    # (-5/4)(-1/2) = 5/8 = 1/16 + 1/4 + 1/4 + 1/16
    assert cert.c2 * -0.5 == pytest.approx(5 / 8)


def test_r2p_strong_skips_trace_identity():
    mu, triple = member("r2p")
    cert = strong_fit(mu, triple)
    assert cert.certified
    assert cert.c1 == pytest.approx(-2 / 3, abs=1e-10)
    assert cert.c2 == pytest.approx(4 / 9, abs=1e-10)
    assert cert.checks["cuni_residual"] is None
    # the non-unimodular identity still holds, the unimodular form does not
    out = cuni_identity(mu, triple, cert.c2, cert.d2)
    assert out["identity_residual"] < 1e-10
    assert abs(out["lemma_gap"]) > 1e-3


@pytest.mark.parametrize("sid", ["omega+", "omega-"])
def test_r40_not_a_soliton(sid):
    cert = algebraic_fit(*member("r4_0", sid))
    assert not cert.certified
    assert cert.residual > 1e-2


def test_flat_abelian_steady():
    cert = strong_fit(Bracket.zero(4), canonical_triple(4))
    assert cert.c1 == 0 and cert.c2 == 0
    assert np.allclose(cert.d1, 0) and np.allclose(cert.d2, 0)
    assert cert.classification == "steady"


def test_u2_shrinking():
    res = lsa.soliton_search_diag(lsa.quaternion_lsa(), "x111")
    cert = algebraic_fit(*lsa.build_double(res.datum))
    assert cert.certified
    assert cert.c == pytest.approx(92 / 55, abs=1e-9)
    assert cert.classification == "shrinking"


def test_classify_constant():
    assert classify_constant(-1) == "expanding"
    assert classify_constant(1e-12) == "steady"
    assert classify_constant(2) == "shrinking"


@given(seeds)
def test_strong_implies_algebraic(seed):
    mu, triple = random_almost_kahler(np.random.default_rng(seed))
    strong = strong_fit(mu, triple)
    alg = algebraic_fit(mu, triple)
    assert derivation_residual(mu, alg.d) < 1e-8 * max(1.0, np.abs(alg.d).max())
    if strong.certified:
        assert alg.certified
        assert alg.c == pytest.approx(strong.c1 + strong.c2, abs=1e-8)
        assert np.allclose(alg.d, strong.d1 + strong.d2, atol=1e-7)


@given(seeds)
def test_fit_invariant_under_unitary_conjugation(seed):
    rng = np.random.default_rng(seed)
    mu, triple = random_almost_kahler(rng, change_basis=False)
    assume(np.allclose(triple.metric, np.eye(mu.dim)))
    # g-orthogonal maps commuting with J preserve (omega, g)
    n = mu.dim
    x = rng.normal(size=(n, n))
    k = np.linalg.solve(triple.metric, x - x.T)
    k = 0.5 * (k - triple.j @ k @ triple.j)

    h = expm(k)
    assert np.allclose(h.T @ triple.metric @ h, triple.metric, atol=1e-10)
    moved = mu.act(h)
    moved_triple = triple.pullback(np.linalg.inv(h))
    assert np.allclose(moved_triple.omega, triple.omega, atol=1e-10)
    r0 = algebraic_fit(mu, triple).residual
    r1 = algebraic_fit(moved, triple).residual
    assert r1 == pytest.approx(r0, abs=1e-8 * max(1.0, r0))


@pytest.mark.parametrize("name", ["rh3", "rr3_-1", "r2p", "n4"])
def test_soliton_norm_scaling_law(name):
    mu, triple = member(name)
    cert = algebraic_fit(mu, triple)
    assert cert.certified
    c = cert.c
    t_end = 1.0 if c <= 0 else 0.4 / c
    traj = integrate(bracket_flow_rhs(triple), mu.c.ravel(),
                     FlowControls(t_span=(0, t_end), rel_tol=1e-11, abs_tol=1e-12))
    n0 = np.linalg.norm(mu.c)
    for s in traj.samples:
        expected = (-2 * c * s.t + 1) ** -0.5 * n0
        assert np.linalg.norm(s.state) == pytest.approx(expected, rel=1e-6)
