"""Pipelines behind the command-line subcommands.

Each ``cmd_*`` function returns a plain report object with ``to_json`` and a
``summary()`` list of human-readable lines; printing and exit codes live in
:mod:`nbody_galois.cli`.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import mpmath
import numpy as np

from . import __version__
from . import config as cfg
from . import exact, spectral, variational
from .errors import InconclusiveError, InputError, NBodyGaloisError
from .monodromy import abelianity_certificate, monodromy_generators
from .potentials3d import EXAMPLES, dim3_example

logger = logging.getLogger(__name__)

REGIMES = ("Generic", "ZeroC", "ZeroH", "MinusHalf")
HP_DIGITS = 40


def json_default(obj):
    """Fallback encoder for Fractions, complex numbers, numpy and mpmath scalars."""
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (complex, np.complexfloating, mpmath.mpc)):
        z = complex(obj)
        return [z.real, z.imag]
    if isinstance(obj, (np.floating, mpmath.mpf)):
        return float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if hasattr(obj, "to_json"):
        return obj.to_json()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _fmt(z, digits: int = 10) -> str:
    if isinstance(z, Fraction):
        return str(z)
    z = complex(z)
    if abs(z.imag) <= 1e-12 * max(1.0, abs(z)):
        return f"{z.real:.{digits}g}"
    return f"{z.real:.{digits}g}{z.imag:+.{digits}g}i"


def _provenance(**tolerances) -> dict:
    return {"tool": "nbody-galois", "version": __version__, "tolerances": tolerances}


# ---------------------------------------------------------------------------
# Verdicts for one decoupled eigenvalue
# ---------------------------------------------------------------------------


def verdicts_for(lam, k_bound: int) -> list:
    return [variational.allowed_lambda(r, lam, k_bound) for r in REGIMES]


def _lambda_key(lam) -> complex:
    z = complex(lam)
    return complex(round(z.real, 8) + 0.0, round(z.imag, 8) + 0.0)


# ---------------------------------------------------------------------------
# analyze
# ---------------------------------------------------------------------------


@dataclass
class AnalysisReport:
    input: dict
    configurations: list = field(default_factory=list)
    spectral: list = field(default_factory=list)
    verdicts: list = field(default_factory=list)
    monodromy: Optional[list] = None
    provenance: dict = field(default_factory=dict)
    conclusion: str = ""
    inconclusive: bool = False

    def to_json(self) -> dict:
        return {"input": self.input, "configurations": self.configurations,
                "spectral": self.spectral, "verdicts": self.verdicts,
                "monodromy": self.monodromy, "provenance": self.provenance,
                "conclusion": self.conclusion}

    def summary(self) -> list:
        lines = [f"masses: {', '.join(self.input['masses'])}"]
        for conf, spec in zip(self.configurations, self.spectral):
            if "error" in conf:
                lines.append(f"  {conf['label']}: {conf['error']}")
                continue
            dec = spec["decoupling"]
            tag = f"decoupled, lambda={_fmt(complex(*dec['lambda']))} ({dec['kind']})" if dec["decoupled"] else "no decoupling"
            lines.append(f"  {conf['label']}: mandatory={spec['mandatory']} {tag}")
        for v in self.verdicts:
            allowed = [r["regime"] for r in v["regimes"] if r["abelian_possible"]]
            excluded = [r["regime"] for r in v["regimes"] if not r["abelian_possible"]]
            lines.append(f"lambda={v['lambda_text']}: allowed on {allowed or 'none'}; excluded on {excluded or 'none'}")
        for m in self.monodromy or []:
            cert = "inconclusive" if m["certificate"] is None else m["certificate"]
            lines.append(f"monodromy C={m['C']} lambda={m['lambda']}: abelian certificate {cert}, "
                         f"consistent with table: {m['consistent']}")
        lines.append(self.conclusion)
        return lines


def _three_body_configurations(masses, exact_mode: bool):
    """(label, DarbouxPoint, kind, exact W or None) for every 3-body family."""
    out = []
    orders = [(0, 1, 2), (1, 2, 0), (2, 0, 1)]
    for order in orders:
        perm = tuple(masses[i] for i in order)
        for complex_order in (False, True):
            tag = "complex-order" if complex_order else "collinear"
            try:
                _, points = cfg.euler_collinear(perm, complex_order)
            except NBodyGaloisError as exc:
                out.append((f"{tag}{order}", exc, "aligned", None))
                continue
            for d in points:
                out.append((f"{tag}{order} rho={_fmt(d.meta['rho'], 8)}", d, "aligned", None))
    exact_w = None
    if exact_mode and all(isinstance(m, Fraction) for m in masses):
        exact_w = spectral.exact_lagrange_w(masses)
    out.append(("lagrange", cfg.lagrange_equilateral(masses), "triangle", exact_w))
    mp_masses = tuple(mpmath.mpf(m.numerator) / m.denominator if isinstance(m, Fraction) else mpmath.mpf(m)
                      for m in masses)
    with mpmath.workdps(HP_DIGITS):
        for name in ("r12", "r13", "r23"):
            for conj in (False, True):
                j = mpmath.exp((-2 if conj else 2) * mpmath.pi * 1j / 3)
                dist = {"r12": 1, "r13": 1, "r23": 1}
                dist[name] = j
                label = f"complex-triangle {name}={'conj(j)' if conj else 'j'}"
                try:
                    d = cfg.triangle_point(mp_masses, label=label, precision=HP_DIGITS, **dist)
                    out.append((label, d, "triangle", None))
                except NBodyGaloisError as exc:
                    out.append((label, exc, "triangle", None))
    return out


def _generic_configurations(masses):
    n = len(masses)
    if n == 2:
        q = cfg.center_config(masses, np.array([0, 1, 0, 0], dtype=complex))
        d = cfg.darboux_point(masses, q, label="pair")
        return [("pair", cfg.normalize_multiplier(d), "aligned", None)]
    if len(set(masses)) == 1:
        d = cfg.regular_ngon(n, masses[0])
        return [(f"{n}-gon", d, "polygon", None)]
    return [(f"n={n}", InputError("only equal masses have a configuration solver for n > 3"), "none", None)]


def _analyze_configuration(label, d, kind, exact_w, tol):
    w = spectral.build_w(d).entries
    rep = spectral.spectrum(exact_w if exact_w is not None else w, tol)
    dec = spectral.partial_decoupling(w, tol)
    entry = {"spectrum": rep.to_json(), "mandatory": spectral.mandatory_spectrum_check(w),
             "decoupling": dec.to_json()}
    if kind == "aligned":
        try:
            a = spectral.aligned_blocks(w)
            entry["reduced_det"] = json_default(complex(spectral.reduced_determinant(a)))
            entry["aligned_decoupling"] = spectral.aligned_decoupling(w)
        except NBodyGaloisError as exc:
            entry["aligned_error"] = str(exc)
    return entry, dec


def cmd_analyze(masses, tol: float = spectral.CLUSTER_TOL, k_bound: int = variational.DEFAULT_K_BOUND,
                exact_mode: bool = False, with_monodromy: bool = False,
                monodromy_C=3) -> AnalysisReport:
    """Configurations, spectra, decoupling and per-level verdicts for given masses."""
    masses = cfg.normalize_masses(masses)
    report = AnalysisReport(input={"masses": [str(m) if isinstance(m, Fraction) else repr(float(m)) for m in masses],
                                   "exact": exact_mode, "with_monodromy": with_monodromy},
                            provenance=_provenance(cluster=tol, mandatory=1e-9, k_bound=k_bound,
                                                   integer=variational.INTEGER_TOL))
    if len(masses) == 3:
        confs = _three_body_configurations(masses, exact_mode)
    else:
        confs = _generic_configurations(masses)
    decoupled = {}
    for label, d, kind, exact_w in confs:
        if isinstance(d, Exception):
            report.configurations.append({"label": label, "error": str(d)})
            report.spectral.append({})
            continue
        summary = d.to_json()
        summary["label"] = label
        try:
            entry, dec = _analyze_configuration(label, d, kind, exact_w, tol)
        except NBodyGaloisError as exc:
            report.configurations.append({"label": label, "error": str(exc)})
            report.spectral.append({})
            continue
        report.configurations.append(summary)
        report.spectral.append(entry)
        if dec.decoupled:
            for cand in dec.candidates:
                lam = complex(*cand["lambda"])
                decoupled.setdefault(_lambda_key(lam), (lam, []))[1].append(label)
    excluded_levels = set()
    for key, (lam, labels) in sorted(decoupled.items(), key=lambda kv: (kv[0].real, kv[0].imag)):
        lam_exact = _snap_lambda(lam)
        vs = verdicts_for(lam_exact, k_bound)
        report.verdicts.append({"lambda": json_default(complex(lam)), "lambda_text": _fmt(lam_exact),
                                "configurations": labels,
                                "regimes": [v.to_json() for v in vs]})
        excluded_levels.update(v.regime.name for v in vs if not v.abelian_possible)
    if with_monodromy and decoupled:
        report.monodromy = []
        for key, (lam, _) in decoupled.items():
            report.monodromy.append(_monodromy_check(monodromy_C, _snap_lambda(lam), report))
    if not decoupled:
        report.conclusion = "method inconclusive: no partial decoupling found at these masses"
        report.inconclusive = True
    elif not excluded_levels:
        report.conclusion = "method inconclusive at this configuration: every decoupled lambda is allowed on every level"
        report.inconclusive = True
    else:
        order = [r for r in REGIMES if r in excluded_levels]
        report.conclusion = "not meromorphically integrable on levels: " + ", ".join(order)
    return report


def _snap_lambda(lam):
    """Rational value when lam is within 1e-10 of a small-denominator fraction."""
    z = complex(lam)
    if abs(z.imag) > 1e-10:
        return z
    f = Fraction(z.real).limit_denominator(1000)
    if abs(float(f) - z.real) <= 1e-10:
        return f
    return z


def _monodromy_check(C, lam, report=None) -> dict:
    eq = variational.VariationalEquation.from_C(C, lam)
    rep = monodromy_generators(eq)
    out = {"C": json_default(C), "lambda": _fmt(lam), "report": rep.to_json()}
    try:
        out["certificate"] = abelianity_certificate(rep)
    except InconclusiveError as exc:
        out["certificate"] = None
        out["inconclusive"] = str(exc)
        if report is not None:
            report.inconclusive = True
    regime = variational.level_class(C, eq.H)
    table = variational.allowed_lambda(regime, lam)
    out["table_allows"] = table.abelian_possible
    out["consistent"] = not (out["certificate"] is False and table.abelian_possible)
    return out


# ---------------------------------------------------------------------------
# equal-masses
# ---------------------------------------------------------------------------


@dataclass
class EqualMassReport:
    rows: list
    provenance: dict

    def to_json(self) -> dict:
        return {"rows": self.rows, "provenance": self.provenance}

    def summary(self) -> list:
        lines = []
        for r in self.rows:
            res = "" if r["residual"] is None else f" residual={r['residual']:.2e}"
            lines.append(f"n={r['n']}: lambda={r['lambda']:.15f} in (0,2): {r['in_bounds']}{res} -> {r['verdict']}")
        return lines


def cmd_equal_masses(n_min: int = 3, n_max: int = 12, residual_up_to: int = 50,
                     k_bound: int = variational.DEFAULT_K_BOUND) -> EqualMassReport:
    if not 3 <= n_min <= n_max:
        raise InputError("need 3 <= n_min <= n_max")
    rows = []
    for n in range(n_min, n_max + 1):
        lam = spectral.equal_mass_lambda(n)
        margin = float(min(lam, 2 - lam))
        residual = spectral.verify_polygon_eigenvector(n) if n <= residual_up_to else None
        vs = verdicts_for(complex(lam), k_bound)
        excluded = [v.regime.name for v in vs if not v.abelian_possible]
        verdict = ("non-integrable on " + ", ".join(excluded)) if len(excluded) == len(REGIMES) else \
            "allowed on " + ", ".join(v.regime.name for v in vs if v.abelian_possible)
        rows.append({"n": n, "lambda": float(lam), "lambda_50": mpmath.nstr(lam, 50),
                     "margin": margin, "in_bounds": margin >= 1e-12, "residual": residual,
                     "verdicts": [v.to_json() for v in vs], "verdict": verdict})
    return EqualMassReport(rows, _provenance(bounds_margin=1e-12, k_bound=k_bound))


# ---------------------------------------------------------------------------
# search-3body
# ---------------------------------------------------------------------------


def decoupling_resultant():
    """Resultant of 2 rho^2 + 3 rho + 2 with the Euler quintic, in the masses."""
    quintic = cfg.euler_quintic()
    quad = exact.Poly([exact.MPoly.const(2), exact.MPoly.const(3), exact.MPoly.const(2)])
    return exact.resultant(quad, quintic)


def reference_resultant():
    m1, m2, m3 = exact.mass_symbols()
    return 7 * m2 ** 2 - 35 * m1 * m2 - 35 * m2 * m3 + 56 * m1 ** 2 + 63 * m1 * m3 + 56 * m3 ** 2


def lagrange_condition():
    m1, m2, m3 = exact.mass_symbols()
    return 3 * (m1 ** 2 + m2 ** 2 + m3 ** 2 - m1 * m2 - m1 * m3 - m2 * m3)


def _restricted_critical_point(poly):
    """Stationary point of poly(m1, m2, 1 - m1 - m2), solved exactly (poly quadratic)."""
    m1, m2, _ = exact.mass_symbols()
    sub = poly.substitute("m3", exact.MPoly.const(1) - m1 - m2)
    # coefficients of a m1^2 + b m1 m2 + c m2^2 + d m1 + e m2 + f
    def coef(i, j):
        return sub.coefficient({"m1": i, "m2": j})
    a, b, c, d, e = coef(2, 0), coef(1, 1), coef(0, 2), coef(1, 0), coef(0, 1)
    det = 4 * a * c - b * b
    if det == 0:
        return None
    x = (-2 * c * d + b * e) / det
    y = (-2 * a * e + b * d) / det
    return (x, y, 1 - x - y)


@dataclass
class SearchReport:
    data: dict

    def to_json(self) -> dict:
        return self.data

    def summary(self) -> list:
        d = self.data
        lines = [f"resultant: {d['resultant']}",
                 f"ratio to reference polynomial: {d['ratio_to_reference']}",
                 f"resultant at (1/7,5/7,1/7): {d['resultant_at_1_5_1']}",
                 f"resultant stationary point on the simplex: {d['resultant_critical_point']} value {d['resultant_critical_value']}",
                 f"grid step {d['grid_step']}: {d['grid_points']} points, resultant near-zeros {d['resultant_near_zeros']}",
                 f"Lagrange double-eigenvalue condition zero set on the grid: {d['lagrange_zeros']}"]
        for fam in d["families"]:
            lines.append(f"family {fam['name']}: masses {fam['masses']}")
        it = d["irrational_triple"]
        lines.append(f"irrational triple: lambda={it['lambda']} algebraic={it['algebraic_multiplicity']} "
                     f"geometric={it['geometric_multiplicity']} witness form {it['witness_form']} "
                     f"(conjugate agrees: {it['conjugate_agrees']})")
        return lines


def irrational_triple_analysis(conjugate: bool = False, tol: float = spectral.CLUSTER_TOL) -> dict:
    d = cfg.irrational_triple_point(conjugate, HP_DIGITS)
    w = spectral.build_w(d).entries
    rep = spectral.spectrum(w, tol)
    cluster = rep.find(0.5, 1e-8)
    dec = spectral.partial_decoupling(w, tol, spectral=rep)
    sign = spectral.j_eigen_sign(dec.witness_vector, 1e-7) if dec.decoupled else None
    return {"conjugate": conjugate,
            "lambda": _fmt(cluster.eigenvalue, 15) if cluster else None,
            "algebraic_multiplicity": cluster.algebraic_multiplicity if cluster else 0,
            "geometric_multiplicity": cluster.geometric_multiplicity if cluster else 0,
            "decoupled": dec.decoupled, "kind": dec.kind,
            "witness_form": {1: "(w, iw)", -1: "(w, -iw)"}.get(sign, "other"),
            "residuals": spectral.witness_residuals(w, dec.witness_vector, dec.lam) if dec.decoupled else None}


def cmd_search_decoupling_3body(grid_step: float = 0.05) -> SearchReport:
    if not 0 < grid_step <= 0.1:
        raise InputError("grid step must lie in (0, 0.1]")
    t0 = time.perf_counter()
    res = decoupling_resultant()
    ref = reference_resultant()
    ratio = res.ratio_to(ref)
    special = (Fraction(1, 7), Fraction(5, 7), Fraction(1, 7))
    lag = lagrange_condition()
    crit = _restricted_critical_point(res)
    n = int(round(1 / grid_step))
    near, lag_zero, count = [], [], 0
    values = {}
    for i in range(1, n):
        for j in range(1, n - i):
            m = (Fraction(i, n), Fraction(j, n), Fraction(n - i - j, n))
            count += 1
            values[(i, j)] = res.evaluate(m)
            if lag.evaluate(m) == 0:
                lag_zero.append([str(v) for v in m])
    scale = max(abs(v) for v in values.values()) if values else 1
    for (i, j), v in values.items():
        nbrs = [values.get(k) for k in ((i + 1, j), (i, j + 1), (i - 1, j + 1)) if k in values]
        sign_change = any(u is not None and (u > 0) != (v > 0) and u != 0 and v != 0 for u in nbrs)
        if v == 0 or sign_change or abs(v) <= 0.01 * scale:
            near.append({"masses": [f"{i}/{n}", f"{j}/{n}", f"{n - i - j}/{n}"], "value": str(v),
                         "sign_change": sign_change})
    with mpmath.workdps(30):
        triple = [mpmath.nstr(m, 30) for m in cfg.irrational_triple_masses(30)]
    it = irrational_triple_analysis(False)
    it_conj = irrational_triple_analysis(True)
    it["conjugate_agrees"] = (it["algebraic_multiplicity"], it["geometric_multiplicity"], it["kind"],
                              it["witness_form"]) == (it_conj["algebraic_multiplicity"],
                                                      it_conj["geometric_multiplicity"], it_conj["kind"],
                                                      it_conj["witness_form"])
    data = {
        "resultant": str(res), "reference": str(ref),
        "ratio_to_reference": None if ratio is None else str(ratio),
        "resultant_at_1_5_1": str(res.evaluate(special)),
        "resultant_at_equal": str(res.evaluate((Fraction(1, 3),) * 3)),
        "resultant_critical_point": None if crit is None else [str(v) for v in crit],
        "resultant_critical_value": None if crit is None else str(res.evaluate(crit)),
        "grid_step": grid_step, "grid_points": count,
        "resultant_near_zeros": near, "lagrange_condition": str(lag), "lagrange_zeros": lag_zero,
        "families": [
            {"name": "equal masses (Lagrange, invariant plane)", "masses": ["1/3", "1/3", "1/3"]},
            {"name": "aligned, complex root of 2rho^2+3rho+2", "masses": ["1/7", "5/7", "1/7"]},
            {"name": "complex triangle (1,1,j), Jordan block at 1/2", "masses": triple},
        ],
        "irrational_triple": it, "irrational_triple_conjugate": it_conj,
        "elapsed_s": time.perf_counter() - t0,
    }
    return SearchReport(data)


# ---------------------------------------------------------------------------
# table / monodromy / examples
# ---------------------------------------------------------------------------


TABLE_ROWS = [
    ("ZeroC", "C = 0", "(k-1)(k+2)/2, k >= 0"),
    ("MinusHalf", "C^2 H = -1/2", "-k^2, k >= 0"),
    ("ZeroH", "H = 0", "(k-1)(k+2)/2, k >= 0"),
    ("Generic", "other (C, H)", "{0, -1}"),
    ("BothZero", "(C, H) = (0, 0)", "every lambda (no obstruction from this method)"),
]


@dataclass
class TableReport:
    data: dict

    def to_json(self) -> dict:
        return self.data

    def summary(self) -> list:
        if "table" in self.data:
            return [f"{r['regime']:<10} {r['level']:<16} {r['allowed']}" for r in self.data["table"]]
        v = self.data["verdict"]
        line = f"regime {v['regime']}, lambda={self.data['lambda_text']}: "
        line += f"allowed (k={v['matched_k']})" if v["abelian_possible"] else "not allowed"
        out = [line]
        if self.data.get("obstruction") is not None:
            out.append(f"log obstruction at t=0 of the normal form: {self.data['obstruction']}")
        return out


def cmd_table(C=None, H=None, lam=None, k_bound: int = variational.DEFAULT_K_BOUND) -> TableReport:
    if lam is None:
        return TableReport({"table": [{"regime": r, "level": lv, "allowed": a} for r, lv, a in TABLE_ROWS]})
    if C is None or H is None:
        raise InputError("table needs C and H together with lambda")
    v = variational.verdict(C, H, lam, k_bound)
    data = {"verdict": v.to_json(), "lambda_text": _fmt(v.lam)}
    obstruction = None
    for sd in v.evidence.get("singularities", []):
        if sd["location"] in ("0", [0.0, 0.0]):
            obstruction = sd["log_obstruction"]
    if obstruction is not None:
        data["obstruction"] = obstruction
    return TableReport(data)


@dataclass
class MonodromyCommandReport:
    data: dict

    def to_json(self) -> dict:
        return self.data

    def summary(self) -> list:
        r = self.data["report"]
        lines = [f"C={self.data['C']} lambda={self.data['lambda']}",
                 f"max commutator deviation {r['max_commutator_deviation']:.3e}",
                 f"derived commutator deviation {r['derived_commutator_deviation']:.3e}",
                 f"product relation deviation {r['product_relation_deviation']:.3e}",
                 f"estimated integration error {r['estimated_error']:.3e}"]
        for k, v in r["local_exponent_match"].items():
            lines.append(f"  local exponent match at {k}: {v:.3e}")
        cert = self.data["certificate"]
        lines.append("abelianity certificate: " + ("inconclusive" if cert is None else str(cert)))
        lines.append(f"table allows lambda: {self.data['table_allows']} (consistent: {self.data['consistent']})")
        return lines


def cmd_monodromy(C, lam, tol: float = 1e-12) -> MonodromyCommandReport:
    eq = variational.VariationalEquation.from_C(C, lam)
    rep = monodromy_generators(eq, tol=tol)
    data = {"C": json_default(variational._scalar(C)) if not isinstance(C, str) else C,
            "lambda": _fmt(eq.lam), "report": rep.to_json()}
    try:
        data["certificate"] = abelianity_certificate(rep)
    except InconclusiveError as exc:
        data["certificate"] = None
        data["inconclusive"] = str(exc)
    table = variational.allowed_lambda(variational.level_class(variational._scalar(
        C if not isinstance(C, str) else 2 ** 0.5), eq.H), eq.lam)
    data["table_allows"] = table.abelian_possible
    data["consistent"] = not (data["certificate"] is False and table.abelian_possible)
    return MonodromyCommandReport(data)


@dataclass
class ExamplesReport:
    rows: list

    def to_json(self) -> dict:
        return {"examples": self.rows}

    def summary(self) -> list:
        lines = []
        for r in self.rows:
            lines.append(f"{r['name']}: lambda={r['lambda']} bracket residual {max(r['bracket_residuals']):.2e} "
                         f"on level {r['level']}; surviving levels: {', '.join(r['surviving']) or 'none'}")
            for note in r.get("notes", []):
                lines.append(f"  note ({note['source']}): {note['text']}")
        return lines


def cmd_examples(n_points: int = 100) -> ExamplesReport:
    rows = []
    for name in EXAMPLES:
        rep = dim3_example(name, n_points)
        lam = variational._scalar(rep.lam)
        regimes = REGIMES
        surviving = [v.regime.name for v in verdicts_for(lam, variational.DEFAULT_K_BOUND) if v.abelian_possible]
        row = rep.to_json()
        row["surviving"] = [r for r in regimes if r in surviving]
        if name == "V2" and "ZeroC" in row["surviving"]:
            row["surviving"].remove("ZeroC")
            row["notes"] = [{"source": "published-claim",
                             "text": "ZeroC excluded by the planar classification of the reduced potential; not recomputed"}]
        rows.append(row)
    return ExamplesReport(rows)
