import warnings

import numpy as np
import pytest

from scflow import catalog
from scflow.lie import closedness_residual, jacobi_residual
from scflow.solitons import strong_fit


@pytest.fixture(scope="module")
def reports():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return catalog.verify_all(sweep=True)


def test_fourteen_families():
    assert len(catalog.families()) == 14
    assert len(catalog.load_catalog()) == 18


def test_open_and_none_cases():
    status = {(e.name, s.id): s.status for e in catalog.load_catalog() for s in e.structures}
    assert status[("r2r2", "omega_alpha")] == "unknown"
    assert status[("r4_0", "omega+")] == "proven-none"
    assert status[("r4_-1", "omega")] == "proven-none"
    assert {status[("h4", "omega+")], status[("h4", "omega-")]} == {"unknown"}


def test_rh3_listed_soliton():
    st = catalog.get_entry("rh3").structures[0]
    c1, d1, c2, d2 = catalog.expected_soliton(st, {})
    assert c1 == 0 and np.all(d1 == 0)
    assert c2 == -1.25 and np.allclose(d2, np.diag([1, 0.75, 1.75, 1.5]))


def test_flat_entry():
    st = catalog.get_entry("rr3p_0").structures[0]
    assert "flat" in st.flags


@pytest.mark.parametrize("name", ["rh3", "n4"])
def test_verify_passes(name):
    reps = catalog.verify_entry(name)
    assert all(r.passed for r in reps)
    if name == "rh3":
        assert reps[0].c2 == pytest.approx(-1.25)


def test_d4_lambda_half_is_kahler_einstein():
    (rep,) = catalog.verify_entry("d4_lambda", {"lam": 0.5})
    assert rep.passed and rep.flags.get("K-E", True)
    entry = catalog.get_entry("d4_lambda")
    assert "K-E" in catalog.active_flags(entry.structures[0], {"lam": 0.5})
    assert "K-E" not in catalog.active_flags(entry.structures[0], {"lam": 2.0})


def test_parameter_errors():
    entry = catalog.get_entry("d4_lambda")
    with pytest.raises(ValueError):
        entry.param_values({"lam": 0.1})
    with pytest.raises(KeyError):
        entry.param_values({"mu": 1.0})
    with pytest.raises(KeyError):
        catalog.get_entry("so3")


def test_all_brackets_and_forms(reports):
    for e in catalog.load_catalog():
        for p in e.sweep():
            for s in e.structures:
                mu = e.bracket_at(p, s)
                assert jacobi_residual(mu) < 1e-12
                if "not closed" not in s.note:
                    assert closedness_residual(mu, e.triple_at(s, p)) < 1e-12


def test_sweep_reports(reports):
    failed = [r for r in reports if not r.passed]
    # the only failing row is the non-closed form recorded in its note
    assert [(r.member, r.structure) for r in failed] == [("d4_1", "omega2")]
    for r in reports:
        if r.passed and r.status == "certified":
            assert r.fit_residual < 1e-9


def test_errata_applied():
    entry = catalog.get_entry("r4_-1_lambda")
    st = entry.structures[0]
    params = entry.param_values()
    assert st.erratum is not None
    c1, d1, c2, d2 = catalog.expected_soliton(st, params)
    cert = strong_fit(entry.bracket_at(params, st), entry.triple_at(st, params))
    assert cert.c2 == pytest.approx(c2, abs=1e-10) and np.allclose(cert.d2, d2, atol=1e-10)
    printed = catalog.expected_soliton(st, params, use_erratum=False)
    assert not np.allclose(printed[3], cert.d2, atol=1e-6) or printed[2] != pytest.approx(cert.c2)


def test_r2p_counterexample():
    out = catalog.r2p_counterexample()
    assert not out["unimodular"]
    assert out["c2"] == pytest.approx(4 / 9)
    assert abs(out["lemma_gap"]) > 1e-3 and out["identity_residual"] < 1e-10


def test_fraction_formatting():
    assert catalog.as_fraction(-1.25) == "-5/4"
    assert catalog.as_fraction(np.sqrt(2)).startswith("1.414")
