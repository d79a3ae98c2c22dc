"""Dimension-4 symplectic Lie algebras and their soliton data.

The data file ``data/catalog.json`` lists 14 families; each member carries
a bracket in tuple shorthand (``{expr}`` placeholders are evaluated with the
member parameters), one or more 2-forms and, when known, the constants and
derivations with P = c1 I + D1 and Ric^ac = c2 I + D2 for g = I.  Where a
listed value fails to verify, an ``erratum`` block holds the recomputed one
and verification uses it; the listed value is kept and reported.

Structure status is one of ``certified``, ``unknown`` (no soliton known)
and ``proven-none`` (no algebraic soliton exists).
"""
import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Optional

import numpy as np

from .curvature import chern_ricci, ricci
from .lie import Bracket, closedness_residual, derivation_residual, is_unimodular, jacobi_residual, parse_shorthand
from .lie import format_coefficient
from .linalg import build_triple, frob, two_form
from .solitons import algebraic_fit, classify_constant, cuni_identity, strong_fit

VERIFY_TOL = 1e-9
_ENV = {"__builtins__": {}}
_PLACEHOLDER = re.compile(r"\{([^{}]+)\}")


def evaluate(expr, params: dict) -> float:
    """Evaluate a numeric catalog expression such as ``"-(1+lam**2)"``.

    Only arithmetic, ``sqrt`` and the member parameters are available.
    """
    if isinstance(expr, (int, float)):
        return float(expr)
    scope = dict(params)
    scope["sqrt"] = math.sqrt
    return float(eval(str(expr), _ENV, scope))


def _bool_expr(expr, params) -> bool:
    scope = dict(params)
    scope["sqrt"] = math.sqrt
    return bool(eval(str(expr), _ENV, scope))


def render_bracket(template: str, params: dict) -> str:
    """Substitute ``{expr}`` placeholders and tidy the resulting signs."""

    def sub(m):
        return format_coefficient(evaluate(m.group(1), params))

    text = _PLACEHOLDER.sub(sub, template)
    return text.replace("+-", "-").replace("--", "+")


def _matrix(spec, params) -> np.ndarray:
    if spec and isinstance(spec[0], list):
        return np.array([[evaluate(x, params) for x in row] for row in spec])
    return np.diag([evaluate(x, params) for x in spec])


def polar_metric(omega) -> np.ndarray:
    """G = (Omega^T Omega)^{1/2}, the metric making (omega, G) compatible
    with the J of the polar decomposition of Omega."""
    w, v = np.linalg.eigh(omega.T @ omega)
    return (v * np.sqrt(w)) @ v.T


@dataclass(frozen=True, eq=False)
class Structure:
    member: str
    id: str
    omega_spec: list
    status: str
    soliton: Optional[dict]
    erratum: Optional[dict]
    flags: list
    bracket_override: Optional[str] = None
    note: str = ""
    metric: str = "identity"


@dataclass(frozen=True, eq=False)
class CatalogEntry:
    name: str
    label: str
    family: str
    bracket: str
    params: dict
    structures: tuple

    def param_values(self, params=None) -> dict:
        vals = {k: float(v["default"]) for k, v in self.params.items()}
        if params:
            unknown = set(params) - set(vals)
            if unknown:
                raise KeyError(f"{self.name} has no parameter(s) {sorted(unknown)}")
            vals.update({k: float(v) for k, v in params.items()})
        for k, v in self.params.items():
            if "range" in v and not _bool_expr(v["range"], vals):
                raise ValueError(f"{self.name}: {k} = {vals[k]} outside {v['range']}")
        return vals

    def sweep(self):
        """Parameter dicts of the verification sweep (the default if none)."""
        if not self.params:
            return [{}]
        (k, v), = self.params.items()
        return [{k: float(x)} for x in v.get("sweep", [v["default"]])]

    def bracket_at(self, params=None, structure: Structure = None) -> Bracket:
        vals = self.param_values(params)
        template = structure.bracket_override if structure and structure.bracket_override else self.bracket
        return parse_shorthand(render_bracket(template, vals), dim=4)

    def triple_at(self, structure: Structure, params=None):
        vals = self.param_values(params)
        pairs = [(evaluate(c, vals), i, j) for c, i, j in structure.omega_spec]
        om = two_form(4, pairs)
        if structure.metric == "polar":
            return build_triple(om, polar_metric(om))
        return build_triple(om, np.eye(4))

    def structure(self, sid: str) -> Structure:
        for s in self.structures:
            if s.id == sid:
                return s
        raise KeyError(f"{self.name} has no structure {sid!r}")


def load_catalog() -> list:
    """All members (one per Lie algebra row) as CatalogEntry objects."""
    raw = json.loads(resources.files("scflow").joinpath("data/catalog.json").read_text())
    out = []
    for fam in raw["families"]:
        for m in fam["members"]:
            structs = tuple(
                Structure(
                    member=m["name"],
                    id=s["id"],
                    omega_spec=s["omega"],
                    status=s["status"],
                    soliton=s.get("soliton"),
                    erratum=s.get("erratum"),
                    flags=s.get("flags", []),
                    bracket_override=s.get("bracket"),
                    note=s.get("note", ""),
                    metric=s.get("metric", "identity"),
                )
                for s in m["structures"]
            )
            out.append(CatalogEntry(m["name"], m["label"], fam["family"], m["bracket"], m.get("params", {}), structs))
    return out


def families() -> list:
    return sorted({e.family for e in load_catalog()})


def get_entry(name: str) -> CatalogEntry:
    for e in load_catalog():
        if e.name == name:
            return e
    raise KeyError(f"unknown catalog entry {name!r}")


def expected_soliton(structure: Structure, params: dict, use_erratum=True):
    """(c1, D1, c2, D2) from the catalog, with errata applied by default."""
    data = dict(structure.soliton)
    if use_erratum and structure.erratum:
        data.update({k: v for k, v in structure.erratum.items() if k != "note"})
    return (
        evaluate(data["c1"], params),
        _matrix(data["d1"], params),
        evaluate(data["c2"], params),
        _matrix(data["d2"], params),
    )


def active_flags(structure: Structure, params: dict) -> set:
    out = set()
    for f in structure.flags:
        if isinstance(f, str):
            out.add(f)
        elif _bool_expr(f["when"], params):
            out.add(f["flag"])
    return out


@dataclass
class StructureReport:
    member: str
    structure: str
    params: dict
    status: str
    passed: bool
    jacobi: float
    closedness: float
    fit_residual: float
    c1: float
    c2: float
    classification: str
    mismatch_p: Optional[float] = None
    mismatch_ric_ac: Optional[float] = None
    derivation: Optional[float] = None
    listed_mismatch: Optional[float] = None
    flags: dict = field(default_factory=dict)
    cuni: Optional[float] = None
    messages: list = field(default_factory=list)

    def summary(self) -> str:
        p = ", ".join(f"{k}={v:g}" for k, v in self.params.items())
        head = f"{self.member}[{self.structure}]" + (f"({p})" if p else "")
        parts = [
            f"{head}: {'PASS' if self.passed else 'FAIL'} status={self.status}",
            f"strong fit residual {self.fit_residual:.2e}",
            f"c1={self.c1:.10g} c2={self.c2:.10g} ({self.classification})",
        ]
        if self.mismatch_p is not None:
            parts.append(f"|P - c1 I - D1|={self.mismatch_p:.2e} |Ric^ac - c2 I - D2|={self.mismatch_ric_ac:.2e}")
        if self.listed_mismatch:
            parts.append(f"listed-value mismatch {self.listed_mismatch:.3e} (erratum applied)")
        if self.cuni is not None:
            parts.append(f"c2 R - tr(Ric^ac)^2 = {self.cuni:.2e}")
        out = "; ".join(parts)
        for m in self.messages:
            out += f"\n    {m}"
        return out


def verify_structure(entry: CatalogEntry, structure: Structure, params=None) -> StructureReport:
    vals = entry.param_values(params)
    shown = {k: vals[k] for k in entry.params}
    mu = entry.bracket_at(vals, structure)
    triple = entry.triple_at(structure, vals)
    jac = jacobi_residual(mu)
    clo = closedness_residual(mu, triple)
    cert = strong_fit(mu, triple)
    msgs = []
    rep = StructureReport(
        entry.name, structure.id, shown, structure.status, True, jac, clo, cert.residual, cert.c1, cert.c2,
        cert.classification,
    )
    if jac > 1e-12:
        msgs.append(f"Jacobi residual {jac:.2e}")
    if clo > 1e-12:
        msgs.append(f"2-form not closed (residual {clo:.2e})")
    if structure.status != "certified":
        alg = algebraic_fit(mu, triple)
        msgs.append(f"no soliton expected; strong residual {cert.residual:.3e}, algebraic residual {alg.residual:.3e}")
        rep.passed = jac <= 1e-12 and clo <= 1e-12 and (structure.status == "unknown" or not alg.certified)
        rep.messages = msgs
        return rep
    _, big_p, _ = chern_ricci(mu, triple)
    ric, ric_ac, scalar = ricci(mu, triple)
    c1, d1, c2, d2 = expected_soliton(structure, vals)
    eye = np.eye(4)
    rep.mismatch_p = frob(big_p - c1 * eye - d1)
    rep.mismatch_ric_ac = frob(ric_ac - c2 * eye - d2)
    rep.derivation = max(derivation_residual(mu, d1), derivation_residual(mu, d2))
    if structure.erratum:
        l1, ld1, l2, ld2 = expected_soliton(structure, vals, use_erratum=False)
        rep.listed_mismatch = frob(big_p - l1 * eye - ld1) + frob(ric_ac - l2 * eye - ld2)
    ok = max(rep.mismatch_p, rep.mismatch_ric_ac, rep.derivation, cert.residual) < VERIFY_TOL
    if not ok:
        msgs.append(
            "P - c1 I - D1 =\n" + np.array2string(big_p - c1 * eye - d1, precision=6, suppress_small=True)
            + "\nRic^ac - c2 I - D2 =\n" + np.array2string(ric_ac - c2 * eye - d2, precision=6, suppress_small=True)
        )
    flags = active_flags(structure, vals)
    flat = frob(ric) < VERIFY_TOL
    kahler = frob(ric_ac) < VERIFY_TOL
    static = kahler and frob(big_p - np.trace(big_p) / 4 * eye) < VERIFY_TOL
    rep.flags = {"flat": flat, "K": kahler, "static": static}
    flag_ok = True
    if "flat" in flags and not (flat and abs(scalar) < VERIFY_TOL):
        flag_ok = False
        msgs.append("flagged flat but Ric != 0")
    if "flat" not in flags and flat:
        flag_ok = False
        msgs.append("flat but not flagged")
    if ("K" in flags or "K-E" in flags) and not kahler:
        flag_ok = False
        msgs.append("flagged Kahler but Ric^ac != 0")
    if static != ("K-E" in flags or "flat" in flags):
        flag_ok = False
        msgs.append(f"static structure (P = cI, Ric^ac = 0) is {static} but K-E flag is {'K-E' in flags}")
    c = c1 + c2
    cls_ok = flat or c < 0
    if not cls_ok:
        msgs.append(f"nonflat entry with c = {c:.6g} not expanding")
    rep.classification = "steady" if flat else classify_constant(c)
    rep.c1, rep.c2 = c1, c2
    if is_unimodular(mu):
        rep.cuni = abs(c2 * scalar - float(np.trace(ric_ac @ ric_ac)))
        if rep.cuni > VERIFY_TOL:
            msgs.append(f"unimodular trace identity fails by {rep.cuni:.2e}")
    rep.passed = bool(ok and flag_ok and cls_ok and jac <= 1e-12 and clo <= 1e-12 and (rep.cuni or 0.0) <= VERIFY_TOL)
    rep.messages = msgs
    return rep


def verify_entry(name: str, params=None, sweep: bool = False) -> list:
    """Verify every structure of a member; with ``sweep`` over its sweep values."""
    entry = get_entry(name)
    points = entry.sweep() if sweep else [params or {}]
    if sweep:
        defaults = entry.params[next(iter(entry.params))].get("defaults") if entry.params else None
        if defaults:
            key = next(iter(entry.params))
            points = points + [{key: float(x)} for x in defaults if float(x) not in [p[key] for p in points]]
    return [verify_structure(entry, s, p) for p in points for s in entry.structures]


def verify_all(sweep: bool = True) -> list:
    out = []
    for e in load_catalog():
        out.extend(verify_entry(e.name, sweep=sweep))
    return out


def r2p_counterexample() -> dict:
    """The non-unimodular r2' soliton where c2 R != tr((Ric^ac)^2)."""
    entry = get_entry("r2p")
    s = entry.structures[0]
    mu = entry.bracket_at()
    triple = entry.triple_at(s)
    cert = strong_fit(mu, triple)
    out = cuni_identity(mu, triple, cert.c2, cert.d2)
    out.update({"c2": cert.c2, "unimodular": is_unimodular(mu)})
    return out


def as_fraction(x: float, max_den: int = 1000) -> str:
    f = Fraction(x).limit_denominator(max_den)
    return str(f) if abs(float(f) - x) < 1e-12 else f"{x:.12g}"
