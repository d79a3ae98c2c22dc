"""Adaptive Runge-Kutta-Fehlberg 4(5) integration with flow-specific events.

The integrator works on flat float arrays.  Events:

* ``Blowup``: the state norm exceeds ``blowup_norm`` (the crossing time is
  located on the cubic Hermite interpolant), or the step size collapses
  while the norm is still growing fast, which is how a finite-time
  singularity shows up once the float resolution of ``t`` is exhausted.
* ``ConvergedToFixedPoint``: ``|f(x)| < convergence_eps * |x|`` on 20
  consecutive accepted steps, or ``f(x0) = 0`` exactly.
* ``StepUnderflow``: the step drops below 1e-14 without meeting tolerance.
"""
import csv
import inspect
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional

import numpy as np

from .curvature import bracket_velocity, chern_ricci, ricci, scf_rhs
from .exceptions import NonConvergence, ScflowError
from .lie import Bracket, closedness_residual, jacobi_residual
from .linalg import build_triple, frob
from .settings import override

REACHED_END = "ReachedEnd"
BLOWUP = "Blowup"
CONVERGED = "ConvergedToFixedPoint"
UNDERFLOW = "StepUnderflow"

_MIN_STEP = 1e-14
# intermediate Runge-Kutta stages are only approximately compatible
_STAGE_TOL = 1e-2
_PERSIST = 20

# Fehlberg tableau
_C = np.array([0.0, 1 / 4, 3 / 8, 12 / 13, 1.0, 1 / 2])
_A = [
    [],
    [1 / 4],
    [3 / 32, 9 / 32],
    [1932 / 2197, -7200 / 2197, 7296 / 2197],
    [439 / 216, -8.0, 3680 / 513, -845 / 4104],
    [-8 / 27, 2.0, -3544 / 2565, 1859 / 4104, -11 / 40],
]
_B5 = np.array([16 / 135, 0.0, 6656 / 12825, 28561 / 56430, -9 / 50, 2 / 55])
_B4 = np.array([25 / 216, 0.0, 1408 / 2565, 2197 / 4104, -1 / 5, 0.0])


@dataclass
class FlowControls:
    """Integration controls.  ``t_span`` may be decreasing (backward flow)."""

    rel_tol: float = 1e-9
    abs_tol: float = 1e-9
    max_step: float = np.inf
    t_span: tuple = (0.0, 1.0)
    blowup_norm: float = 1e8
    convergence_eps: float = 1e-9
    first_step: Optional[float] = None
    max_steps: int = 1_000_000
    stop_on_convergence: bool = True

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.t_span[0] == self.t_span[1]:
            raise ValueError("empty time span")

    def halved(self) -> "FlowControls":
        return replace(self, rel_tol=self.rel_tol / 2, abs_tol=self.abs_tol / 2)


@dataclass(frozen=True)
class TrajectorySample:
    t: float
    state: np.ndarray


@dataclass
class Trajectory:
    samples: List[TrajectorySample]
    terminal_event: str
    event_time: Optional[float] = None
    n_steps: int = 0
    n_rejected: int = 0
    info: dict = field(default_factory=dict)

    @property
    def t(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])

    @property
    def states(self) -> np.ndarray:
        return np.array([s.state for s in self.samples])

    @property
    def final(self) -> np.ndarray:
        return self.samples[-1].state

    def at(self, t: float) -> np.ndarray:
        """Linear interpolation between stored samples."""
        ts = self.t
        order = np.argsort(ts)
        return np.array([np.interp(t, ts[order], col[order]) for col in self.states.T])


def _rkf_step(f, t, y, h, k1):
    k = [k1]
    for i in range(1, 6):
        yi = y + h * sum(a * kj for a, kj in zip(_A[i], k))
        k.append(f(t + _C[i] * h, yi))
    k = np.array(k)
    y5 = y + h * (_B5 @ k)
    y4 = y + h * (_B4 @ k)
    return y5, y5 - y4


def _hermite(t0, y0, f0, t1, y1, f1, t):
    h = t1 - t0
    s = (t - t0) / h
    h00 = 2 * s**3 - 3 * s**2 + 1
    h10 = s**3 - 2 * s**2 + s
    h01 = -2 * s**3 + 3 * s**2
    h11 = s**3 - s**2
    return h00 * y0 + h10 * h * f0 + h01 * y1 + h11 * h * f1


def integrate(rhs: Callable, state0, controls: FlowControls = None, sample_every: int = 1, norm: Callable = None) -> Trajectory:
    """Integrate ``x' = rhs(x)`` (or ``rhs(t, x)`` when it takes two args).

    Backward spans integrate ``x' = -rhs(x)`` in the reversed time
    variable; reported times are the true (decreasing) ones.  ``norm``
    replaces the euclidean norm of the flat state in the blow-up and
    convergence tests (useful for reduced coordinates).
    """
    size = norm or frob
    controls = controls or FlowControls()
    t0, t1 = map(float, controls.t_span)
    sign = 1.0 if t1 > t0 else -1.0
    length = abs(t1 - t0)
    try:
        params = inspect.signature(rhs).parameters.values()
        required = [q for q in params if q.kind in (q.POSITIONAL_ONLY, q.POSITIONAL_OR_KEYWORD) and q.default is q.empty]
        two_args = len(required) >= 2
    except (TypeError, ValueError):
        two_args = False

    def f(s, y):
        t = t0 + sign * s
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            v = rhs(t, y) if two_args else rhs(y)
        return sign * np.asarray(v, dtype=float)

    y = np.array(state0, dtype=float).ravel()
    s = 0.0
    fy = f(s, y)
    samples = [TrajectorySample(t0, y.copy())]
    rtol, atol = controls.rel_tol, controls.abs_tol
    if controls.first_step is not None:
        h = controls.first_step
    else:
        scale = atol + rtol * np.abs(y)
        d0, d1 = frob(y / scale), frob(fy / scale)
        h = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h = min(h, controls.max_step, length)
    err_prev = 1.0
    persist = 0
    n_steps = n_rej = 0
    norms = [size(y)]
    event, event_time = REACHED_END, None

    if controls.stop_on_convergence and not np.any(fy):
        # exact fixed point: nothing to integrate
        return Trajectory(samples, CONVERGED, t0, 0, 0)

    while s < length:
        if n_steps >= controls.max_steps:
            raise NonConvergence(f"max_steps={controls.max_steps} reached at t={t0 + sign * s}")
        h = min(h, length - s, controls.max_step)
        try:
            y_new, err_vec = _rkf_step(f, s, y, h, fy)
        except (ScflowError, np.linalg.LinAlgError):
            # a trial stage left the admissible set; retry with a smaller step
            if n_steps == 0 and s == 0.0 and h <= _MIN_STEP:
                raise
            y_new = np.full_like(y, np.nan)
            err_vec = y_new
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err = np.sqrt(np.mean((err_vec / scale) ** 2)) if y.size else 0.0
        if not np.all(np.isfinite(y_new)):
            err = np.inf
        if err <= 1.0:
            f_new = f(s + h, y_new)
            nrm = size(y_new)
            if nrm > controls.blowup_norm:
                lo, hi = 0.0, h
                for _ in range(200):
                    mid = 0.5 * (lo + hi)
                    if size(_hermite(0, y, fy, h, y_new, f_new, mid)) > controls.blowup_norm:
                        hi = mid
                    else:
                        lo = mid
                    if hi - lo <= 1e-6 * max(abs(s), 1e-300) or hi - lo < 1e-300:
                        break
                ts = s + hi
                samples.append(TrajectorySample(t0 + sign * ts, _hermite(0, y, fy, h, y_new, f_new, hi)))
                event, event_time = BLOWUP, float(t0 + sign * ts)
                n_steps += 1
                break
            s += h
            y, fy = y_new, f_new
            n_steps += 1
            norms.append(nrm)
            if n_steps % sample_every == 0 or s >= length:
                samples.append(TrajectorySample(t0 + sign * s, y.copy()))
            if frob(fy) < controls.convergence_eps * frob(y) or frob(y) == 0.0:
                persist += 1
                if persist >= _PERSIST and controls.stop_on_convergence:
                    if samples[-1].t != t0 + sign * s:
                        samples.append(TrajectorySample(t0 + sign * s, y.copy()))
                    event, event_time = CONVERGED, float(t0 + sign * s)
                    break
            else:
                persist = 0
            # PI step-size control
            fac = 0.9 * max(err, 1e-10) ** (-0.7 / 5) * err_prev ** (0.4 / 5)
            h *= min(5.0, max(0.2, fac))
            err_prev = max(err, 1e-4)
        else:
            n_rej += 1
            h *= max(0.1, 0.9 * err ** (-1 / 5)) if np.isfinite(err) else 0.1
        if h < _MIN_STEP * max(1.0, abs(s)):
            if samples[-1].t != t0 + sign * s:
                samples.append(TrajectorySample(t0 + sign * s, y.copy()))
            # t can no longer resolve the approach to a singularity
            growing = norms[-1] >= max(norms) and norms[-1] >= np.sqrt(controls.blowup_norm) * max(norms[0], 1.0)
            if growing:
                event, event_time = BLOWUP, float(t0 + sign * s)
            else:
                event, event_time = UNDERFLOW, float(t0 + sign * s)
            break
    return Trajectory(samples, event, event_time, n_steps, n_rej)


def normalized_rhs(rhs: Callable) -> Callable:
    """x' = f - <f, x>/|x|^2 x, which keeps |x| constant."""

    def g(x):
        v = np.asarray(rhs(x), dtype=float)
        return v - (v @ x) / (x @ x) * x

    return g


def normalized_limit(traj: Trajectory, normalization: Callable = None, fit: Callable = None, tol: float = 1e-9):
    """Limit of the normalized state and, optionally, a soliton fit of it.

    The normalized state must move less than ``tol`` between the sample at
    one tenth of the final time and the final sample; otherwise
    NonConvergence is raised.
    """
    norm = normalization or (lambda x: x / frob(x))
    ts = traj.t
    t_end = ts[-1]
    t_ref = ts[0] + (t_end - ts[0]) / 10.0
    i_ref = int(np.argmin(np.abs(ts - t_ref)))
    last = norm(traj.final)
    ref = norm(traj.samples[i_ref].state)
    moved = frob(np.asarray(last) - np.asarray(ref))
    if moved > tol:
        raise NonConvergence(f"normalized state still moving over the final decade ({moved:.3e} > {tol:.1e})")
    return last, (fit(last) if fit is not None else None)


# ---------------------------------------------------------------------------
# generic bracket flow and the direct flow


def bracket_flow_rhs(triple):
    """x = flattened structure constants; x' = delta_mu(P + Ric^ac)."""
    n = triple.dim

    def g(x):
        mu = Bracket(x.reshape(n, n, n), check=False)
        return bracket_velocity(mu, triple).c.ravel()

    return g


def direct_flow_rhs(mu: Bracket):
    """x = (Omega, G) flattened; the direct flow with fixed bracket."""
    n = mu.dim

    def g(x):
        om, gm = x[: n * n].reshape(n, n), x[n * n :].reshape(n, n)
        with override(tol=_STAGE_TOL):
            tr = build_triple(om, gm)
            od, gd = scf_rhs(tr, mu)
        return np.concatenate([od.ravel(), gd.ravel()])

    return g


def bracket_vs_direct(mu0: Bracket, triple0, horizon: float = 1.0, controls: FlowControls = None, variant: int = 1):
    """Compare the direct flow with the bracket flow through h(t).

    Integrates jointly (a) (omega(t), g(t)) with mu0 fixed, (b) mu(t) with
    (omega0, g0) fixed and (c) h(t) with h(0) = I, where
    variant 1: h' = -h (P + Ric^ac) of (mu0, omega(t), g(t)) and
    variant 2: h' = -(P + Ric^ac) of (mu(t), omega0, g0) times h.
    Returns the max over samples of
    |h.mu0 - mu(t)| + |(Omega, G)(t) - h^*(Omega0, G0)| + |scalar mismatch|.
    """
    n = mu0.dim
    nn = n * n
    controls = replace(controls or FlowControls(), t_span=(0.0, float(horizon)), stop_on_convergence=False)

    def split(x):
        om = x[:nn].reshape(n, n)
        gm = x[nn : 2 * nn].reshape(n, n)
        c = x[2 * nn : 2 * nn + n**3].reshape(n, n, n)
        h = x[2 * nn + n**3 :].reshape(n, n)
        return om, gm, c, h

    def rhs(x):
        om, gm, c, h = split(x)
        with override(tol=_STAGE_TOL):
            tr = build_triple(om, gm)
            od, gd = scf_rhs(tr, mu0)
            if variant == 1:
                _, big_p, _ = chern_ricci(mu0, tr)
                _, ric_ac, _ = ricci(mu0, tr)
                hd = -h @ (big_p + ric_ac)
        mu = Bracket(c, check=False)
        cd = bracket_velocity(mu, triple0).c
        if variant != 1:
            _, big_p, _ = chern_ricci(mu, triple0)
            _, ric_ac, _ = ricci(mu, triple0)
            hd = -(big_p + ric_ac) @ h
        return np.concatenate([od.ravel(), gd.ravel(), cd.ravel(), hd.ravel()])

    x0 = np.concatenate([triple0.omega.ravel(), triple0.metric.ravel(), mu0.c.ravel(), np.eye(n).ravel()])
    traj = integrate(rhs, x0, controls)
    worst = 0.0
    for smp in traj.samples:
        om, gm, c, h = split(smp.state)
        mu_t = Bracket(c, check=False)
        d1 = frob(mu0.act(h).c - c)
        d2 = frob(h.T @ triple0.omega @ h - om) + frob(h.T @ triple0.metric @ h - gm)
        with override(tol=_STAGE_TOL):
            tr = build_triple(om, gm)
            _, p_dir, _ = chern_ricci(mu0, tr)
            r_dir = ricci(mu0, tr)[2]
        _, p_br, _ = chern_ricci(mu_t, triple0)
        r_br = ricci(mu_t, triple0)[2]
        d3 = abs(np.trace(p_dir) - np.trace(p_br)) + abs(r_dir - r_br)
        worst = max(worst, d1 + d2 + d3)
    return worst


def bracket_monitors(triple):
    """Monitor columns for a generic bracket-flow state."""
    n = triple.dim

    def mon(x):
        mu = Bracket(x.reshape(n, n, n), check=False)
        _, big_p, _ = chern_ricci(mu, triple)
        _, _, scalar = ricci(mu, triple)
        return {
            "trP": float(np.trace(big_p)),
            "R": scalar,
            "jacobi_res": jacobi_residual(mu),
            "closed_res": closedness_residual(mu, triple),
        }

    return mon


def _fmt(x) -> str:
    if x is None:
        return ""
    return format(float(x), ".17g")


def write_csv(traj: Trajectory, path, monitor: Callable = None, labels=None):
    """Write t, state components, |state| and monitor columns.

    ``monitor(state)`` returns a dict; its keys become columns in order
    (e.g. trP, R, jacobi_res, closed_res, soliton_res).
    """
    states = traj.states
    dim = states.shape[1]
    labels = list(labels) if labels is not None else [f"x{i}" for i in range(dim)]
    rows = []
    keys = None
    for smp in traj.samples:
        extra = monitor(smp.state) if monitor is not None else {}
        if keys is None:
            keys = list(extra)
        rows.append([_fmt(smp.t)] + [_fmt(v) for v in smp.state] + [_fmt(frob(smp.state))] + [_fmt(extra.get(k)) for k in keys])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t"] + labels + ["norm"] + (keys or []))
        w.writerows(rows)
        fh.write(f"# terminal_event={traj.terminal_event} event_time={_fmt(traj.event_time)}\n")
