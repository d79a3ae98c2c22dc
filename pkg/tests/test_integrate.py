import csv

import numpy as np
import pytest
from hypothesis import given

from scflow import almost_abelian as aa
from scflow import catalog, lsa
from scflow.exceptions import NonConvergence
from scflow.integrate import (
    BLOWUP,
    CONVERGED,
    REACHED_END,
    FlowControls,
    Trajectory,
    TrajectorySample,
    bracket_flow_rhs,
    bracket_monitors,
    bracket_vs_direct,
    integrate,
    normalized_limit,
    normalized_rhs,
    write_csv,
)
from scflow.lie import Bracket
from scflow.linalg import canonical_triple

from conftest import random_datum, seeds


def test_cubic_decay_closed_form():
    traj = integrate(lambda y: -y**3, [1.0], FlowControls(t_span=(0, 10)))
    assert traj.terminal_event == REACHED_END
    assert traj.samples[-1].t == 10
    assert abs(traj.final[0] - 1 / np.sqrt(21)) < 1e-8
    for s in traj.samples:
        assert abs(s.state[0] - (1 + 2 * s.t) ** -0.5) < 1e-8


def test_cubic_growth_blowup_time():
    # a' = a^3 from 1 blows up at t = 1/2
    traj = integrate(lambda y: y**3, [1.0], FlowControls(t_span=(0, 5)))
    assert traj.terminal_event == BLOWUP
    assert traj.event_time == pytest.approx(0.5, rel=1e-6)


def test_backward_span():
    traj = integrate(lambda y: -y**3, [1.0], FlowControls(t_span=(0, -0.4)))
    assert traj.samples[-1].t == pytest.approx(-0.4)
    assert traj.final[0] == pytest.approx((1 - 0.8) ** -0.5, rel=1e-8)
    assert np.all(np.diff(traj.t) < 0)


def test_two_argument_rhs():
    traj = integrate(lambda t, y: np.array([np.cos(t)]), [0.0], FlowControls(t_span=(0, 2)))
    assert traj.final[0] == pytest.approx(np.sin(2), abs=1e-8)


@given(seeds)
def test_time_reversal(seed):
    rng = np.random.default_rng(seed)
    y0 = random_datum(rng, 2, v_zero=True).to_vector()
    y0 /= np.linalg.norm(y0)
    tol = 1e-10
    rhs = lambda y: aa.bracket_rhs_vector(y, 2)  # noqa: E731
    fwd = integrate(rhs, y0, FlowControls(t_span=(0, 0.5), rel_tol=tol, abs_tol=tol))
    back = integrate(rhs, fwd.final, FlowControls(t_span=(0.5, 0), rel_tol=tol, abs_tol=tol))
    assert back.samples[-1].t == 0
    assert np.linalg.norm(back.final - y0) < 10 * tol


def test_convergence_event():
    # |y| -> 1 along rays
    traj = integrate(lambda y: (1 - y @ y) * y, [0.3, 0.4], FlowControls(t_span=(0, 1e3)))
    assert traj.terminal_event == CONVERGED
    assert traj.event_time < 1e3
    assert np.allclose(traj.final, [0.6, 0.8], atol=1e-8)


def test_exact_fixed_point():
    traj = integrate(lambda y: np.zeros_like(y), [1.0], FlowControls(t_span=(0, 1)))
    assert traj.terminal_event == CONVERGED and traj.event_time == 0


def test_controls_validation():
    with pytest.raises(ValueError):
        FlowControls(rel_tol=0)
    with pytest.raises(ValueError):
        FlowControls(t_span=(1, 1))
    half = FlowControls().halved()
    assert half.rel_tol == 5e-10 and half.abs_tol == 5e-10


def test_theta_family_blows_up_forward():
    y0 = lsa.theta_ab_lsa(1, 2).l.ravel()
    traj = integrate(lambda y: lsa.bracket_rhs_lsa_vector(y, 4), y0, FlowControls(t_span=(0, 10)))
    assert traj.terminal_event == BLOWUP
    assert 0 < traj.event_time < 10


@pytest.mark.parametrize("name", ["rh3", "n4", "r2p", "d4_2"])
def test_bracket_flow_stays_in_variety(name):
    entry = catalog.get_entry(name)
    st = entry.structures[0]
    mu, triple = entry.bracket_at(None, st), entry.triple_at(st)
    traj = integrate(bracket_flow_rhs(triple), mu.c.ravel(), FlowControls(t_span=(0, 1)))
    mon = bracket_monitors(triple)
    for s in traj.samples:
        m = mon(s.state)
        assert m["jacobi_res"] < 1e-6 and m["closed_res"] < 1e-6


def test_soliton_start_normalized_constant():
    entry = catalog.get_entry("rh3")
    st = entry.structures[0]
    mu, triple = entry.bracket_at(None, st), entry.triple_at(st)
    x0 = mu.c.ravel()
    traj = integrate(bracket_flow_rhs(triple), x0, FlowControls(t_span=(0, 5)))
    u0 = x0 / np.linalg.norm(x0)
    for s in traj.samples:
        assert np.linalg.norm(s.state / np.linalg.norm(s.state) - u0) < 1e-7


def test_normalized_rhs_keeps_norm():
    rhs = normalized_rhs(lambda y: np.array([-y[0] ** 3, y[1]]))
    traj = integrate(rhs, [1.0, 1.0], FlowControls(t_span=(0, 3)))
    for s in traj.samples:
        assert np.linalg.norm(s.state) == pytest.approx(np.sqrt(2), rel=1e-7)


def test_normalized_limit_and_nonconvergence():
    traj = integrate(lambda y: np.array([0.0, -y[1]]), [1.0, 1.0],
                     FlowControls(t_span=(0, 300), rel_tol=1e-12, abs_tol=1e-14, stop_on_convergence=False))
    limit, fit = normalized_limit(traj, fit=lambda x: float(x[0]))
    assert np.allclose(limit, [1, 0], atol=1e-9) and fit == pytest.approx(1.0)
    osc = Trajectory([TrajectorySample(t, np.array([np.cos(t), np.sin(t)])) for t in np.linspace(0, 20, 200)], REACHED_END)
    with pytest.raises(NonConvergence):
        normalized_limit(osc)


def test_bracket_vs_direct_abelian():
    assert bracket_vs_direct(Bracket.zero(4), canonical_triple(4), horizon=1.0) < 1e-14


@pytest.mark.parametrize("variant", [1, 2])
def test_bracket_vs_direct_rh3(variant):
    entry = catalog.get_entry("rh3")
    st = entry.structures[0]
    mu, triple = entry.bracket_at(None, st), entry.triple_at(st)
    assert bracket_vs_direct(mu, triple, horizon=1.0, variant=variant) < 1e-6


def test_csv_format_and_determinism(tmp_path):
    def run(path):
        traj = integrate(lambda y: -y**3, [1.0, 0.5], FlowControls(t_span=(0, 1)))
        write_csv(traj, path, monitor=lambda x: {"trP": float(x[0]), "R": None}, labels=["a", "b"])
        return path.read_text()

    first = run(tmp_path / "a.csv")
    assert first == run(tmp_path / "b.csv")
    lines = first.splitlines()
    assert lines[-1].startswith("# terminal_event=ReachedEnd")
    rows = list(csv.reader(lines[:-1]))
    assert rows[0] == ["t", "a", "b", "norm", "trP", "R"]
    assert float(rows[1][0]) == 0.0 and rows[1][5] == ""
    t, a, b, nrm = map(float, rows[-1][:4])
    assert t == 1.0 and nrm == pytest.approx(np.hypot(a, b))
