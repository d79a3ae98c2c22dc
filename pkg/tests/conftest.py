import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from scflow import almost_abelian as aa

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def sp2_matrix(d, e, f):
    return np.array([[d, e], [f, -d]])


def random_sp(rng, m):
    """Random element of sp(omega_1) for J1 = [[0,-I],[I,0]]."""
    k = m // 2
    x = rng.normal(size=(k, k))
    s1 = rng.normal(size=(k, k))
    s2 = rng.normal(size=(k, k))
    return np.block([[x, s1 + s1.T], [s2 + s2.T, -x.T]])


def random_datum(rng, n, v_zero=False, a=None):
    m = 2 * n - 2
    a = abs(rng.normal()) if a is None else a
    v = np.zeros(m) if v_zero else rng.normal(size=m)
    return aa.AlmostAbelianDatum(a, v, random_sp(rng, m))


seeds = st.integers(min_value=0, max_value=2**32 - 1)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_spd(rng, n, spread=0.3):
    x = rng.normal(size=(n, n))
    return np.eye(n) + spread * (x + x.T) / 2 + spread * np.eye(n) * 0.5


def random_lsa(rng):
    """A valid LSA from the built-in fixtures, varied by a random SPD phi."""
    from scflow import lsa

    pick = rng.integers(4)
    if pick == 0:
        base = lsa.quaternion_lsa()
    elif pick == 1:
        base = lsa.gl2_matrix_lsa()
    elif pick == 2:
        base = lsa.gl2_brd_alpha_lsa(rng.uniform(-2, 2))
    else:
        base = lsa.theta_ab_lsa(rng.uniform(0.3, 2), rng.uniform(-2, 2))
    phi = random_spd(rng, base.n)
    while np.min(np.linalg.eigvalsh(phi)) < 0.2:
        phi = random_spd(rng, base.n)
    return lsa.vary(base, phi)


def random_almost_kahler(rng, change_basis=True):
    """(mu, triple) drawn from the almost-abelian, LSA and catalog fixtures,
    optionally moved by a random change of basis h (then g != I)."""
    from scflow import catalog, lsa

    kind = rng.integers(3)
    if kind == 0:
        mu, triple = aa.build_mu(random_datum(rng, int(rng.integers(2, 4))))
    elif kind == 1:
        mu, triple = lsa.build_double(random_lsa(rng))
    else:
        entries = catalog.load_catalog()
        entry = entries[rng.integers(len(entries))]
        st = entry.structures[rng.integers(len(entry.structures))]
        if st.note and "not closed" in st.note:
            st = entry.structures[0]
        mu, triple = entry.bracket_at(None, st), entry.triple_at(st)
    if change_basis:
        n = mu.dim
        h = np.eye(n) + 0.3 * rng.normal(size=(n, n))
        while abs(np.linalg.det(h)) < 0.2:
            h = np.eye(n) + 0.3 * rng.normal(size=(n, n))
        hinv = np.linalg.inv(h)
        mu, triple = mu.act(h), triple.pullback(hinv)
    return mu, triple
