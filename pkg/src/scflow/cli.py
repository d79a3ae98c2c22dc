"""Command line front end.

Commands::

    scflow catalog verify [NAME] [--param k=v] [--no-sweep]
    scflow flow run --family F --input FILE [--backward] [--normalize]
    scflow soliton fit --input FILE
    scflow soliton search --lsa NAME --pattern P
    scflow reproduce EXAMPLE [--a0 A --b0 B]

Exit status is 0 on success, 2 when a verification fails and 1 on usage or
input errors.

Input files are JSON objects with a ``family`` field:

* ``almost-abelian``: ``n``, ``a``, ``v`` (length 2n-2) and ``a1``
  ((2n-2) x (2n-2), in sp) or a full ``matrix`` A.
* ``lsa``: ``L`` (n left multiplication matrices) or ``name`` of a built-in.
* ``generic``: ``dim``, ``bracket_shorthand`` (or ``bracket`` as an n x n x n
  tensor), ``omega`` (default canonical) and ``metric`` (default identity).
* ``catalog``: ``name``, ``structure`` and optional ``params``.
"""
import argparse
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import almost_abelian as aa
from . import catalog
from . import lsa
from .exceptions import NonConvergence, ScflowError
from .integrate import FlowControls, bracket_flow_rhs, bracket_monitors, integrate, normalized_limit, normalized_rhs, write_csv
from .lie import Bracket, parse_shorthand
from .linalg import build_triple, canonical_omega, frob
from .reproduce import reproduce
from .solitons import algebraic_fit, strong_fit

EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 1, 2
FAMILIES = ("almost-abelian", "lsa", "generic", "catalog")


class InputError(Exception):
    pass


@dataclass
class Job:
    """A parsed input: flat initial state, how to read it back, and the flow."""

    family: str
    state0: np.ndarray
    to_structure: object  # state -> (Bracket, CompatibleTriple)
    rhs: object
    labels: list


def _array(spec, name, ndim):
    try:
        a = np.array(spec, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(f"{name}: not a numeric array ({exc})")
    if a.ndim != ndim:
        raise InputError(f"{name}: expected a {ndim}-dimensional array, got shape {a.shape}")
    return a


def load_job(path) -> Job:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})")
    if not isinstance(data, dict) or data.get("family") not in FAMILIES:
        raise InputError(f"{path}: 'family' must be one of {', '.join(FAMILIES)}")
    return job_from_dict(data)


def job_from_dict(data: dict) -> Job:
    family = data["family"]
    if family == "almost-abelian":
        if "matrix" in data:
            d = aa.AlmostAbelianDatum.from_matrix(_array(data["matrix"], "matrix", 2))
        else:
            for key in ("a", "v", "a1"):
                if key not in data:
                    raise InputError(f"almost-abelian input needs '{key}' (or 'matrix')")
            d = aa.AlmostAbelianDatum(float(data["a"]), _array(data["v"], "v", 1), _array(data["a1"], "a1", 2))
        if "n" in data and int(data["n"]) != d.n:
            raise InputError(f"n = {data['n']} does not match the datum (n = {d.n})")
        n = d.n
        m = 2 * n - 2
        labels = ["a"] + [f"v{i}" for i in range(m)] + [f"A1_{i}{j}" for i in range(m) for j in range(m)]
        return Job(family, d.to_vector(), lambda y: aa.build_mu(aa.AlmostAbelianDatum.from_vector(y, n)),
                   lambda y: aa.bracket_rhs_vector(y, n), labels)
    if family == "lsa":
        if "name" in data:
            d = lsa.named_lsa(data["name"])
        elif "L" in data:
            d = lsa.LSADatum(_array(data["L"], "L", 3))
        else:
            raise InputError("lsa input needs 'L' or 'name'")
        n = d.n
        labels = [f"L{i}_{j}{k}" for i in range(n) for j in range(n) for k in range(n)]
        return Job(family, d.l.ravel(), lambda y: lsa.build_double(lsa.LSADatum(y.reshape(n, n, n), check=False)),
                   lambda y: lsa.bracket_rhs_lsa_vector(y, n), labels)
    if family == "generic":
        dim = data.get("dim", data.get("n"))
        if "bracket_shorthand" in data:
            mu = parse_shorthand(data["bracket_shorthand"], dim=int(dim) if dim else None)
        elif "bracket" in data:
            mu = Bracket(_array(data["bracket"], "bracket", 3))
        else:
            raise InputError("generic input needs 'bracket_shorthand' or 'bracket'")
        n = mu.dim
        om = _array(data["omega"], "omega", 2) if "omega" in data else canonical_omega(n)
        g = _array(data["metric"], "metric", 2) if "metric" in data else np.eye(n)
        triple = build_triple(om, g)
        labels = [f"c{i}{j}_{k}" for i in range(n) for j in range(n) for k in range(n)]
        return Job(family, mu.c.ravel(), lambda y: (Bracket(y.reshape(n, n, n), check=False), triple),
                   bracket_flow_rhs(triple), labels)
    # catalog
    entry = catalog.get_entry(data["name"])
    st = entry.structure(data["structure"]) if "structure" in data else entry.structures[0]
    params = data.get("params")
    mu = entry.bracket_at(params, st)
    triple = entry.triple_at(st, params)
    return job_from_dict({"family": "generic", "bracket": mu.c.tolist(), "omega": triple.omega.tolist(),
                          "metric": triple.metric.tolist()})


def _monitor(job: Job):
    def mon(y):
        mu, triple = job.to_structure(y)
        out = bracket_monitors(triple)(mu.c.ravel())
        try:
            out["soliton_res"] = algebraic_fit(mu, triple).residual
        except (ScflowError, np.linalg.LinAlgError):
            out["soliton_res"] = float("nan")
        return out

    return mon


# ---------------------------------------------------------------------------
# commands


def cmd_catalog_verify(args) -> int:
    params = {}
    for item in args.param or []:
        if "=" not in item:
            raise InputError(f"--param expects k=v, got {item!r}")
        k, v = item.split("=", 1)
        params[k.strip()] = float(v)
    if args.name:
        reports = catalog.verify_entry(args.name, params or None, sweep=not params and not args.no_sweep)
    else:
        reports = catalog.verify_all(sweep=not args.no_sweep)
    for r in reports:
        print(r.summary())
    failed = sum(not r.passed for r in reports)
    print(f"{len(reports) - failed}/{len(reports)} structure checks passed")
    return EXIT_OK if failed == 0 else EXIT_FAIL


def cmd_flow_run(args) -> int:
    job = load_job(args.input)
    t_end = -abs(args.t_end) if args.backward else abs(args.t_end)
    controls = FlowControls(rel_tol=args.rtol, abs_tol=args.atol, t_span=(0.0, t_end), blowup_norm=args.blowup_norm)
    state0 = job.state0
    rhs = job.rhs
    if args.normalize:
        if frob(state0) == 0.0:
            raise InputError("cannot normalize the zero bracket")
        state0 = state0 / frob(state0)
        rhs = normalized_rhs(rhs)
    traj = integrate(rhs, state0, controls, sample_every=args.sample_every)
    os.makedirs(args.output, exist_ok=True)
    path = args.csv or os.path.join(args.output, f"flow_{job.family}.csv")
    mon = _monitor(job)
    write_csv(traj, path, monitor=mon, labels=job.labels)
    last = mon(traj.final)
    print(f"family: {job.family}")
    print(f"terminal event: {traj.terminal_event}" + (f" at t = {traj.event_time:.12g}" if traj.event_time is not None else ""))
    print(f"final time: {traj.t[-1]:.12g}  steps: {traj.n_steps} (rejected {traj.n_rejected})")
    print(f"final |state|: {frob(traj.final):.6e}")
    for k, v in last.items():
        print(f"final {k}: {v:.6e}")
    code = EXIT_OK
    if args.normalize:
        try:
            normalized_limit(traj, tol=args.limit_tol)
            print(f"normalized limit reached; soliton fit residual {last['soliton_res']:.3e}")
        except NonConvergence as exc:
            print(f"normalized limit not reached: {exc}")
            code = EXIT_FAIL
    print(f"csv: {path}")
    return code


def cmd_soliton_fit(args) -> int:
    job = load_job(args.input)
    mu, triple = job.to_structure(job.state0)
    alg = algebraic_fit(mu, triple)
    strong = strong_fit(mu, triple)
    print("algebraic fit")
    print(alg.report())
    print("strong fit")
    print(strong.report())
    return EXIT_OK if alg.certified else EXIT_FAIL


def cmd_soliton_search(args) -> int:
    try:
        d = lsa.named_lsa(args.lsa)
    except KeyError as exc:
        raise InputError(str(exc))
    try:
        res = lsa.soliton_search_diag(d, args.pattern)
    except NonConvergence as exc:
        print(f"no diagonal soliton found: {exc}")
        return EXIT_FAIL
    np.set_printoptions(precision=12, suppress=True)
    print(f"LSA: {args.lsa}  pattern: {args.pattern}")
    print(f"phi diagonal: {np.diag(res.phi)}")
    print(f"P = q I with q = {res.q:.15g}")
    print(f"S = r I with r = {res.r:.15g}")
    print(f"c = q + r = {res.c:.15g} ({'shrinking' if res.c > 0 else 'expanding' if res.c < 0 else 'steady'})")
    print(f"Ric diagonal: {np.diag(lsa.ricci_full(res.datum))}")
    print(f"certificate residual: {res.residual:.3e}")
    return EXIT_OK


def cmd_reproduce(args) -> int:
    kw = {}
    if args.a0 is not None:
        kw["a0"] = args.a0
    if args.b0 is not None:
        kw["b0"] = args.b0
    os.makedirs(args.output, exist_ok=True)
    try:
        rep = reproduce(args.example, outdir=args.output, **kw)
    except KeyError as exc:
        raise InputError(str(exc.args[0]))
    print(rep.report())
    return EXIT_OK if rep.passed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="scflow", description="Symplectic curvature flow on Lie groups.")
    sub = p.add_subparsers(dest="command", required=True)

    cat = sub.add_parser("catalog", help="soliton catalog").add_subparsers(dest="action", required=True)
    v = cat.add_parser("verify", help="verify catalog entries")
    v.add_argument("name", nargs="?")
    v.add_argument("--param", action="append", help="parameter value k=v (repeatable)")
    v.add_argument("--no-sweep", action="store_true", help="only the default parameter values")
    v.set_defaults(func=cmd_catalog_verify)

    flow = sub.add_parser("flow", help="bracket flow").add_subparsers(dest="action", required=True)
    r = flow.add_parser("run", help="integrate the bracket flow from an input file")
    r.add_argument("--family", required=True, choices=FAMILIES)
    r.add_argument("--input", required=True)
    r.add_argument("--backward", action="store_true")
    r.add_argument("--normalize", action="store_true", help="flow of state/|state|")
    r.add_argument("--t-end", type=float, default=1.0)
    r.add_argument("--rtol", type=float, default=1e-9)
    r.add_argument("--atol", type=float, default=1e-9)
    r.add_argument("--blowup-norm", type=float, default=1e8)
    r.add_argument("--limit-tol", type=float, default=1e-6)
    r.add_argument("--sample-every", type=int, default=1)
    r.add_argument("--output", default=".")
    r.add_argument("--csv", help="CSV path (default OUTPUT/flow_FAMILY.csv)")
    r.set_defaults(func=cmd_flow_run)

    sol = sub.add_parser("soliton", help="soliton fitting and search").add_subparsers(dest="action", required=True)
    f = sol.add_parser("fit", help="algebraic and strong fits of an input structure")
    f.add_argument("--input", required=True)
    f.set_defaults(func=cmd_soliton_fit)
    s = sol.add_parser("search", help="diagonal soliton search on an LSA double")
    s.add_argument("--lsa", required=True)
    s.add_argument("--pattern", required=True)
    s.set_defaults(func=cmd_soliton_search)

    rp = sub.add_parser("reproduce", help="run a worked example")
    rp.add_argument("example")
    rp.add_argument("--a0", type=float)
    rp.add_argument("--b0", type=float)
    rp.add_argument("--output", default=".")
    rp.set_defaults(func=cmd_reproduce)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    if args.command == "flow" and getattr(args, "family", None) and os.path.exists(args.input):
        try:
            with open(args.input) as fh:
                declared = json.load(fh).get("family")
        except (OSError, ValueError, AttributeError):
            declared = None
        if declared is not None and declared != args.family:
            print(f"error: --family {args.family} but the input declares {declared}", file=sys.stderr)
            return EXIT_USAGE
    try:
        return args.func(args)
    except (InputError, ScflowError, KeyError, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
