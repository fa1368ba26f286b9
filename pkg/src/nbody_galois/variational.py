"""The scalar variational equation along a conic homographic orbit.

    t (-C^2 + 2 t + 2 H t^2) X'' + (C^2 - t) X' = lam X

is written ``P X'' + Q X' + R X = 0`` with ``R = -lam``.  Everything here
works over the rationals when C^2, H and lam are rational (``exact`` mode)
and over complex floats otherwise.  Only C^2 enters the equation, so it is
stored instead of C; ``C = sqrt(2)`` is exact through ``c2 = 2``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from numbers import Number
from typing import Optional

import mpmath
import numpy as np
import sympy

from . import exact
from .errors import InputError, NoObstructionDefinedError, NotSingularPointError
from .exact import Poly

INFINITY = math.inf
CONFLUENCE_TOL = 1e-12
INTEGER_TOL = 1e-9
DEFAULT_K_BOUND = 10 ** 6


# ---------------------------------------------------------------------------
# Scalars
# ---------------------------------------------------------------------------


def _scalar(x):
    """Fraction for exact input, complex otherwise."""
    if isinstance(x, (bool,)):
        raise InputError("boolean is not a number")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return exact.as_rational(x)
        except (ValueError, ZeroDivisionError, InputError):
            return complex(x)
    if isinstance(x, sympy.Basic):
        if x.is_Rational:
            return Fraction(int(x.p), int(x.q))
        return complex(x)
    if isinstance(x, (Number, mpmath.mpf, mpmath.mpc, np.number)):
        z = complex(x)
        if not (cmath.isfinite(z)):
            raise InputError("non-finite parameter")
        return z
    raise InputError(f"cannot interpret {x!r} as a number")


def _is_exact(*xs) -> bool:
    return all(isinstance(x, Fraction) for x in xs)


def _rational_sqrt(q: Fraction) -> Optional[Fraction]:
    if q < 0:
        return None
    a, b = q.numerator, q.denominator
    ra, rb = math.isqrt(a), math.isqrt(b)
    if ra * ra == a and rb * rb == b:
        return Fraction(ra, rb)
    return None


def _close(a, b, tol=CONFLUENCE_TOL) -> bool:
    if _is_exact(a, b):
        return a == b
    return abs(complex(a) - complex(b)) <= tol


def _is_zero(a, tol=CONFLUENCE_TOL) -> bool:
    return _close(a, Fraction(0), tol)


def _near_integer(x, tol=INTEGER_TOL) -> Optional[int]:
    """The integer x equals (exactly, or within tol in float mode), else None."""
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else None
    z = complex(x)
    k = round(z.real)
    if abs(z - k) <= tol:
        return int(k)
    return None


def _sqrt(x):
    """Exact square root when x is a rational square, principal complex root otherwise."""
    if isinstance(x, Fraction):
        r = _rational_sqrt(x)
        if r is not None:
            return r
        if x < 0:
            r = _rational_sqrt(-x)
            if r is not None:
                return complex(0, r)
    return cmath.sqrt(complex(x))


def _snap(c2):
    """Snap a float C^2 onto the confluent values 0, 1, 2."""
    if isinstance(c2, Fraction):
        return c2
    for crit in (0, 1, 2):
        if abs(cmath.sqrt(c2) - math.sqrt(crit)) <= CONFLUENCE_TOL or abs(c2 - crit) <= CONFLUENCE_TOL:
            return Fraction(crit)
    return c2


def _to_json_number(x):
    if isinstance(x, Fraction):
        return str(x)
    if x is None:
        return None
    if x == INFINITY:
        return "inf"
    z = complex(x)
    return [z.real, z.imag]


# ---------------------------------------------------------------------------
# The equation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VariationalEquation:
    c2: object
    H: object
    lam: object

    @classmethod
    def from_C(cls, C, lam, H=None) -> "VariationalEquation":
        """Build from C (normal form ``H = C^2/2 - 1`` unless H is given)."""
        if isinstance(C, str) and C.strip() in ("sqrt2", "sqrt(2)", "√2"):
            c2 = Fraction(2)
        elif isinstance(C, sympy.Basic):
            c2 = _scalar(sympy.nsimplify(C ** 2)) if (C ** 2).is_Rational else _scalar(C ** 2)
        else:
            c = _scalar(C)
            c2 = c * c
        if not isinstance(c2, Fraction):
            c2 = _snap(c2)
        if H is None:
            h = c2 / 2 - 1
        else:
            h = _scalar(H)
        return cls(c2, h, _scalar(lam))

    @classmethod
    def normal_form(cls, c2, lam) -> "VariationalEquation":
        c2 = _scalar(c2)
        return cls(c2, c2 / 2 - 1, _scalar(lam))

    @property
    def exact(self) -> bool:
        return _is_exact(self.c2, self.H, self.lam)

    def _coerce(self, x):
        return x if self.exact else complex(x)

    @property
    def P(self) -> Poly:
        z = self._coerce(Fraction(0))
        return Poly((z, -self._coerce(self.c2), self._coerce(Fraction(2)), 2 * self._coerce(self.H)))

    @property
    def Q(self) -> Poly:
        return Poly((self._coerce(self.c2), self._coerce(Fraction(-1))))

    @property
    def R(self) -> Poly:
        return Poly((-self._coerce(self.lam),))

    def apply(self, p: Poly) -> Poly:
        """The operator applied to a polynomial."""
        return self.P * p.derivative().derivative() + self.Q * p.derivative() + self.R * p

    def residual_at(self, x, t):
        """P x'' + Q x' - lam x at t for an mpmath-callable x."""
        t = mpmath.mpmathify(t)
        d0 = x(t)
        d1 = mpmath.diff(x, t, 1)
        d2 = mpmath.diff(x, t, 2)
        P, Q = self.P, self.Q
        pv = sum(_mp(c) * t ** k for k, c in enumerate(P.coeffs))
        qv = sum(_mp(c) * t ** k for k, c in enumerate(Q.coeffs))
        return pv * d2 + qv * d1 - _mp(self.lam) * d0

    def to_json(self) -> dict:
        return {"C2": _to_json_number(self.c2), "H": _to_json_number(self.H),
                "lambda": _to_json_number(self.lam)}


# ---------------------------------------------------------------------------
# Singularities
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SingularitySet:
    points: tuple
    confluence: Optional[str] = None

    @property
    def finite(self) -> tuple:
        return tuple(p for p in self.points if p != INFINITY)

    def to_json(self) -> dict:
        return {"points": [_to_json_number(p) for p in self.points], "confluence": self.confluence}


def _quadratic_roots(eq: VariationalEquation):
    """Roots of 2H t^2 + 2t - C^2 (the factor of P besides t)."""
    h, c2 = eq.H, eq.c2
    if _is_zero(h):
        return [c2 / 2] if eq.exact else [complex(c2) / 2]
    disc = 1 + 2 * h * c2
    s = _sqrt(disc) if eq.exact else cmath.sqrt(complex(disc))
    if isinstance(s, Fraction):
        roots = [(-1 + s) / (2 * h), (-1 - s) / (2 * h)]
    else:
        roots = [(-1 + s) / (2 * complex(h)), (-1 - s) / (2 * complex(h))]
    return roots


def _dedupe(points):
    out = []
    for p in points:
        if not any(_close(p, q, 1e-10) for q in out):
            out.append(p)
    return out


def _sort_key(p):
    z = complex(p)
    return (z.real, z.imag)


def singularities(C=None, H=None, eq: Optional[VariationalEquation] = None) -> SingularitySet:
    """Finite roots of P plus infinity, with the confluence (if any) named."""
    if eq is None:
        eq = VariationalEquation.from_C(C, 0, H)
    roots = [Fraction(0) if eq.exact else 0j] + _quadratic_roots(eq)
    pts = sorted(_dedupe(roots), key=_sort_key)
    confluence = None
    if len(pts) < 3 or _is_zero(eq.H):
        if _is_zero(eq.c2):
            confluence = "C=0: 0 is a double root of P"
        elif _is_zero(eq.H):
            confluence = "H=0: third singularity escapes to infinity"
        else:
            confluence = "third singularity merges with another"
        if eq.H == eq.c2 / 2 - 1 if eq.exact else abs(complex(eq.H) - complex(eq.c2) / 2 + 1) < 1e-12:
            if _close(eq.c2, Fraction(1)):
                confluence = "C=1: third singularity merges with 1"
            elif _close(eq.c2, Fraction(2)):
                confluence = "C=sqrt(2): third singularity escapes to infinity (parabolic case)"
    return SingularitySet(tuple(pts) + (INFINITY,), confluence)


# ---------------------------------------------------------------------------
# Local analysis
# ---------------------------------------------------------------------------


def _at_infinity(eq: VariationalEquation):
    """(P, Q, R) of the equation rewritten in s = 1/t."""
    P, Q, R = eq.P, eq.Q, eq.R
    dp, dq, dr = max(P.degree, 0), max(Q.degree, 0), max(R.degree, 0)
    m = max(dp - 2, dq - 1, dr, 0)

    def recip(poly: Poly, shift: int) -> Poly:
        # s^shift * poly(1/s), shift >= deg
        out = [0] * (shift + 1)
        for k, c in enumerate(poly.coeffs):
            out[shift - k] = c
        return Poly(out)

    # X_t = -s^2 X_s,  X_tt = s^4 X_ss + 2 s^3 X_s; multiply the equation by s^m.
    Ps = recip(P, m + 4) if P.coeffs else Poly()
    q1 = recip(P, m + 3) * 2 if P.coeffs else Poly()
    q2 = recip(Q, m + 2) if Q.coeffs else Poly()
    Qs = q1 - q2
    Rs = recip(R, m) if R.coeffs else Poly()
    return Ps, Qs, Rs


def _local_polys(eq: VariationalEquation, point):
    if point == INFINITY:
        return _at_infinity(eq)
    a = point if eq.exact else complex(point)
    return eq.P.taylor_shift(a), eq.Q.taylor_shift(a), eq.R.taylor_shift(a)


def _order(p: Poly, tol=1e-12) -> int:
    scale = max([abs(complex(c)) for c in p.coeffs] + [1.0])
    for k, c in enumerate(p.coeffs):
        if isinstance(c, Fraction):
            if c != 0:
                return k
        elif abs(c) > tol * scale:
            return k
    return 10 ** 9


@dataclass(frozen=True)
class LocalData:
    v: int
    P: Poly
    Q: Poly
    R: Poly
    p0: object
    q0: object
    regular: bool

    def indicial(self, rho):
        return rho * (rho - 1) + self.p0 * rho + self.q0


def local_data(eq: VariationalEquation, point) -> LocalData:
    P, Q, R = _local_polys(eq, point)
    v = _order(P)
    if v == 0:
        raise NotSingularPointError(f"{point} is an ordinary point")
    regular = _order(Q) >= v - 1 and _order(R) >= v - 2
    lead = P[v]
    p0 = Q[v - 1] / lead if v >= 1 else 0
    q0 = R[v - 2] / lead if v >= 2 else 0
    if not eq.exact:
        p0, q0 = complex(p0), complex(q0)
    return LocalData(v, P, Q, R, p0, q0, regular)


def indicial_exponents(eq: VariationalEquation, point) -> tuple:
    """Roots of rho(rho-1) + p0 rho + q0, sorted by real part.

    At infinity the exponent rho means X ~ s^rho = t^-rho.
    """
    ld = local_data(eq, point)
    if not ld.regular:
        raise NotSingularPointError(f"{point} is an irregular singularity")
    b = ld.p0 - 1
    disc = b * b - 4 * ld.q0
    s = _sqrt(disc) if isinstance(disc, Fraction) else cmath.sqrt(disc)
    if isinstance(s, Fraction):
        roots = [(-b - s) / 2, (-b + s) / 2]
    else:
        roots = [(-complex(b) - s) / 2, (-complex(b) + s) / 2]
    return tuple(sorted(roots, key=_sort_key))


def _frobenius(ld: LocalData, rho, n_terms: int, stop_at: Optional[int] = None):
    """Frobenius coefficients a_0..a_{n_terms-1} from exponent rho (a_0 = 1).

    Returns (coefficients, obstruction at ``stop_at``).  At the resonance the
    free coefficient is set to zero and the recursion continues.
    """
    v = ld.v
    P, Q, R = ld.P, ld.Q, ld.R
    lead = P[v]
    a = [Fraction(1) if isinstance(rho, Fraction) else 1 + 0j]
    obstruction = None
    for n in range(1, n_terms):
        acc = 0
        for k in range(n):
            r = rho + k
            acc = acc + a[k] * (r * (r - 1) * P[n + v - k] + r * Q[n + v - 1 - k] + R[n + v - 2 - k])
        f = ld.indicial(rho + n) * lead
        if n == stop_at:
            obstruction = acc
            a.append(0 * acc)
            continue
        if (isinstance(f, Fraction) and f == 0) or (not isinstance(f, Fraction) and abs(f) < 1e-300):
            raise NoObstructionDefinedError("unexpected resonance in the recurrence")
        a.append(-acc / f)
    return a, obstruction


def log_obstruction(eq: VariationalEquation, point, series_order: Optional[int] = None):
    """Coefficient whose vanishing means no logarithm at ``point``.

    Runs the Frobenius recurrence from the smaller exponent up to the
    resonance N (exponent difference).  Equal exponents always produce a
    logarithm; 1 is returned in that case.
    """
    lo, hi = indicial_exponents(eq, point)
    diff = hi - lo
    n_res = _near_integer(diff)
    if n_res is None or n_res < 0:
        raise NoObstructionDefinedError(f"exponent difference {diff} is not a nonnegative integer")
    if n_res == 0:
        return Fraction(1) if eq.exact else 1 + 0j
    if not eq.exact:
        lo = complex(lo)
    ld = local_data(eq, point)
    order = max(series_order or 0, n_res + 5)
    _, obs = _frobenius(ld, lo, order + 1, stop_at=n_res)
    return obs


def frobenius_series(eq: VariationalEquation, point, rho, n_terms: int = 20) -> list:
    """Coefficients of a Frobenius series at a finite point (no resonance allowed)."""
    return _frobenius(local_data(eq, point), rho, n_terms)[0]


@dataclass(frozen=True)
class SingularityData:
    location: object
    exponents: tuple
    log_obstruction: object
    regular: bool

    def to_json(self) -> dict:
        return {"location": _to_json_number(self.location),
                "exponents": [_to_json_number(e) for e in self.exponents],
                "log_obstruction": _to_json_number(self.log_obstruction),
                "regular": self.regular}


def singularity_data(eq: VariationalEquation) -> list:
    out = []
    for pt in singularities(eq=eq).points:
        ld = local_data(eq, pt)
        exps = indicial_exponents(eq, pt) if ld.regular else ()
        try:
            obs = log_obstruction(eq, pt) if ld.regular else None
        except NoObstructionDefinedError:
            obs = None
        out.append(SingularityData(pt, exps, obs, ld.regular))
    return out


def fuchs_sum(eq: VariationalEquation):
    """Sum of all exponents minus (#singularities - 2); zero for a Fuchsian equation."""
    pts = singularities(eq=eq).points
    total = 0
    for pt in pts:
        total = total + sum(indicial_exponents(eq, pt))
    return total - (len(pts) - 2)


# ---------------------------------------------------------------------------
# Level classes and verdicts
# ---------------------------------------------------------------------------

REGIMES = ("ZeroC", "ZeroH", "MinusHalf", "Generic", "BothZero")


@dataclass(frozen=True)
class LevelClass:
    name: str
    representative_C: object
    level: object

    def to_json(self) -> dict:
        return {"class": self.name, "representative_C": _to_json_number(self.representative_C),
                "level": _to_json_number(self.level)}


def level_class(C, H) -> LevelClass:
    """Class of the level C^2 H plus the C of the normal form on that level."""
    c, h = _scalar(C), _scalar(H)
    level = c * c * h
    if _is_zero(c) and _is_zero(h):
        return LevelClass("BothZero", Fraction(0), level)
    if _is_zero(c):
        return LevelClass("ZeroC", Fraction(0), level)
    if _is_zero(h):
        return LevelClass("ZeroH", complex(math.sqrt(2)), level)
    if _close(level, Fraction(-1, 2)):
        return LevelClass("MinusHalf", Fraction(1), level)
    # C^4/2 - C^2 = level  =>  C^2 = 1 + sqrt(1 + 2 level)
    root = _sqrt(1 + 2 * level)
    rep_c2 = 1 + root
    rep = _sqrt(rep_c2) if isinstance(rep_c2, Fraction) else cmath.sqrt(rep_c2)
    return LevelClass("Generic", rep, level)


@dataclass(frozen=True)
class Verdict:
    regime: LevelClass
    lam: object
    abelian_possible: bool
    matched_k: Optional[int] = None
    evidence: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"regime": self.regime.name, "lambda": _to_json_number(self.lam),
                "abelian_possible": self.abelian_possible, "matched_k": self.matched_k,
                "evidence": self.evidence}


def _match_k(lam, k_guess, family, k_bound):
    """Nearest nonnegative integer k to the inverted value, if family(k) equals lam."""
    if isinstance(lam, Fraction):
        k = _near_integer(k_guess) if isinstance(k_guess, Fraction) else None
        if k is None or not 0 <= k <= k_bound or family(k) != lam:
            return None
        return k
    z = complex(k_guess)
    k = int(round(z.real))
    if not 0 <= k <= k_bound:
        return None
    # compare in lambda: the square root in the inversion would amplify rounding
    if abs(complex(family(k)) - complex(lam)) <= INTEGER_TOL * max(1.0, abs(complex(lam))):
        return k
    return None


def _k_from_quadratic(lam, k_bound):
    """Nonnegative integer k with (k-1)(k+2)/2 = lam, or None."""
    disc = 9 + 8 * lam
    s = _sqrt(disc)
    if isinstance(lam, Fraction) and not isinstance(s, Fraction):
        return None
    return _match_k(lam, (s - 1) / 2, lambda k: Fraction((k - 1) * (k + 2), 2), k_bound)


def _k_from_square(lam, k_bound):
    """Nonnegative integer k with -k^2 = lam, or None."""
    s = _sqrt(-lam)
    if isinstance(lam, Fraction) and not isinstance(s, Fraction):
        return None
    return _match_k(lam, s, lambda k: Fraction(-k * k), k_bound)


def allowed_lambda(regime, lam, k_bound: int = DEFAULT_K_BOUND) -> Verdict:
    """Membership of lam in the set of values compatible with an abelian identity component."""
    if k_bound < 0:
        raise InputError("k_bound must be nonnegative")
    if isinstance(regime, str):
        if regime not in REGIMES:
            raise InputError(f"unknown regime {regime!r}")
        rep = {"ZeroC": Fraction(0), "ZeroH": complex(math.sqrt(2)), "MinusHalf": Fraction(1)}
        regime = LevelClass(regime, rep.get(regime), None)
    lam = _scalar(lam)
    name = regime.name
    if name == "BothZero":
        return Verdict(regime, lam, True, None, {"note": "no obstruction from this method"})
    if name in ("ZeroC", "ZeroH"):
        k = _k_from_quadratic(lam, k_bound)
        return Verdict(regime, lam, k is not None, k, {"family": "(k-1)(k+2)/2"})
    if name == "MinusHalf":
        k = _k_from_square(lam, k_bound)
        return Verdict(regime, lam, k is not None, k, {"family": "-k^2"})
    hit = _is_zero(lam, INTEGER_TOL) or _close(lam, Fraction(-1), INTEGER_TOL)
    return Verdict(regime, lam, hit, None, {"family": "{0, -1}"})


def verdict(C, H, lam, k_bound: int = DEFAULT_K_BOUND, with_evidence: bool = True) -> Verdict:
    """Classify the level of (C, H) and test lam; evidence from the normal form."""
    regime = level_class(C, H)
    v = allowed_lambda(regime, lam, k_bound)
    if not with_evidence or regime.name == "BothZero":
        return v
    ev = dict(v.evidence)
    try:
        eq = VariationalEquation.from_C(regime.representative_C if regime.name != "ZeroH" else "sqrt2", lam)
        data = singularity_data(eq)
        ev["singularities"] = [d.to_json() for d in data]
        if v.abelian_possible and regime.name == "Generic":
            sol = polynomial_solution_search(eq=eq)
            if sol is not None:
                ev["solution"] = sol.describe()
    except (NotSingularPointError, NoObstructionDefinedError) as exc:
        ev["evidence_error"] = str(exc)
    return Verdict(v.regime, v.lam, v.abelian_possible, v.matched_k, ev)


# ---------------------------------------------------------------------------
# Closed-form solutions for lam in {0, -1}
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExplicitSolution:
    c2: object
    lam: object
    basis: tuple          # sympy expressions in t
    residual: float
    sample_points: int

    def describe(self) -> list:
        return [str(b) for b in self.basis]

    def to_json(self) -> dict:
        return {"C2": _to_json_number(self.c2), "lambda": _to_json_number(self.lam),
                "basis": self.describe(), "residual": self.residual}


T = sympy.Symbol("t")


def _sympy_number(x):
    if isinstance(x, Fraction):
        return sympy.Rational(x.numerator, x.denominator)
    z = complex(x)
    return sympy.Float(z.real, 30) + sympy.I * sympy.Float(z.imag, 30) if z.imag else sympy.Float(z.real, 30)


def _closed_forms(c2, lam):
    t = T
    c2s = _sympy_number(c2)
    if _close(c2, Fraction(0)):
        if lam == -1:
            return [t, sympy.sqrt(t * (1 - t))]
        return [sympy.Integer(1), sympy.asin(sympy.sqrt(t)) - sympy.sqrt(t * (1 - t))]
    if _close(c2, Fraction(1)):
        if lam == -1:
            return [t - 1, (2 * t - 1) / (t - 1)]
        return [sympy.Integer(1), t + sympy.log(t - 1)]
    if _close(c2, Fraction(2)):
        if lam == -1:
            return [t - 2, sympy.sqrt(t - 1)]
        return [sympy.Integer(1), sympy.sqrt(t - 1) * (2 + t)]
    a = c2s - 2
    f = (t - 1) * (t * a + c2s)
    if lam == -1:
        return [t - c2s, sympy.sqrt(f)]
    return [sympy.Integer(1), sympy.sqrt(f) - sympy.log((a * t + 1) / sympy.sqrt(a) + sympy.sqrt(f)) / sympy.sqrt(a)]


def _sample_points(eq: VariationalEquation, n: int) -> list:
    """Points on a vertical-offset grid away from the finite singularities."""
    sing = [complex(p) for p in singularities(eq=eq).finite]
    pts = []
    k = 0
    while len(pts) < n:
        z = complex(-3 + 0.137 * k, 0.35 + 0.05 * (k % 7))
        if min(abs(z - s) for s in sing) > 0.2:
            pts.append(z)
        k += 1
    return pts


def substitution_residual(eq: VariationalEquation, expr, points) -> float:
    """max |P X'' + Q X' - lam X| / max(1, |X|) over the points (symbolic derivatives)."""
    t = T
    P = sum(_sympy_number(c) * t ** k for k, c in enumerate(eq.P.coeffs))
    Q = sum(_sympy_number(c) * t ** k for k, c in enumerate(eq.Q.coeffs))
    lam = _sympy_number(eq.lam)
    res = P * sympy.diff(expr, t, 2) + Q * sympy.diff(expr, t) - lam * expr
    f_res = sympy.lambdify(t, res, "mpmath")
    f_x = sympy.lambdify(t, expr, "mpmath")
    worst = 0.0
    with mpmath.workdps(30):
        for z in points:
            zz = mpmath.mpc(z.real, z.imag)
            worst = max(worst, float(abs(f_res(zz)) / max(1, abs(f_x(zz)))))
    return worst


def explicit_solution(C, lam, n_points: int = 50) -> ExplicitSolution:
    """Closed-form basis for lam in {0, -1} on the normal form, with its residual."""
    eq = VariationalEquation.from_C(C, lam)
    lam_v = eq.lam
    if not (_close(lam_v, Fraction(0), INTEGER_TOL) or _close(lam_v, Fraction(-1), INTEGER_TOL)):
        raise InputError("closed forms exist only for lambda in {0, -1}")
    lam_i = 0 if _close(lam_v, Fraction(0), INTEGER_TOL) else -1
    eq = VariationalEquation(eq.c2, eq.H, Fraction(lam_i))
    basis = _closed_forms(eq.c2, lam_i)
    pts = _sample_points(eq, n_points)
    residual = max(substitution_residual(eq, b, pts) for b in basis)
    return ExplicitSolution(eq.c2, Fraction(lam_i), tuple(basis), residual, n_points)


# ---------------------------------------------------------------------------
# Restricted polynomial-type solution search
# ---------------------------------------------------------------------------


def _mp(x):
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpmathify(complex(x))


@dataclass(frozen=True)
class PolynomialSolution:
    exponents: tuple      # (point, exponent) pairs
    p: Poly
    residual: float       # coefficients of the operator image (exactly 0 in exact mode)
    exact: bool
    pointwise_residual: float = 0.0

    def describe(self) -> str:
        factors = []
        for pt, e in self.exponents:
            base = "t" if _is_zero(pt) else f"(t - {pt})"
            factors.append(base if e == 1 else f"{base}^({e})")
        if self.p.degree > 0 or self.p.coeffs[0] != 1 or not factors:
            factors.append(f"({self.p.pretty('t')})")
        return "*".join(factors)

    def evaluate(self, t):
        t = mpmath.mpmathify(t)
        val = sum(_mp(c) * t ** k for k, c in enumerate(self.p.coeffs))
        for pt, e in self.exponents:
            val *= mpmath.power(t - _mp(pt), _mp(e))
        return val

    def to_json(self) -> dict:
        return {"exponents": [[_to_json_number(pt), _to_json_number(e)] for pt, e in self.exponents],
                "p": [_to_json_number(c) for c in self.p.coeffs],
                "residual": self.residual, "pointwise_residual": self.pointwise_residual,
                "exact": self.exact, "form": self.describe()}


def _reduced_operator(eq: VariationalEquation, points, exps):
    """Coefficients (A2, A1, A0) of the operator acting on p in X = prod (t-s)^e p."""
    one = Fraction(1) if eq.exact else 1 + 0j
    L = Poly((one,))
    for s in points:
        L = L * Poly((-s, one))
    Nu = Poly()
    for i, e in enumerate(exps):
        others = Poly((one,))
        for j, s2 in enumerate(points):
            if j != i:
                others = others * Poly((-s2, one))
        Nu = Nu + others * e
    P, Q = eq.P, eq.Q
    A2 = L * L * P
    A1 = P * Nu * L * 2 + Q * L * L
    A0 = P * (Nu.derivative() * L - Nu * L.derivative() + Nu * Nu) + Q * Nu * L - L * L * eq.lam
    return A2, A1, A0


def _solve_coefficients(eq, A2, A1, A0, deg):
    """Null space of p -> A2 p'' + A1 p' + A0 p on polynomials of degree <= deg."""
    cols = []
    for j in range(deg + 1):
        mono = Poly([0] * j + [Fraction(1) if eq.exact else 1 + 0j])
        img = A2 * mono.derivative().derivative() + A1 * mono.derivative() + A0 * mono
        cols.append(img)
    height = max([len(c.coeffs) for c in cols] + [1])
    rows = [[c[i] for c in cols] for i in range(height)]
    if eq.exact:
        basis = exact.nullspace(rows)
        return [Poly(v) for v in basis], True
    m = np.array([[complex(x) for x in r] for r in rows])
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    _, s, vh = np.linalg.svd(m)
    s_full = np.concatenate([s, np.zeros(vh.shape[0] - s.size)])
    null = vh[s_full <= 1e-10 * scale].conj()
    return [Poly(list(v)) for v in null], False


def polynomial_solution_search(C=None, lam=None, H=None, eq: Optional[VariationalEquation] = None):
    """Search X = prod (t - s_i)^e_i p(t) with e_i local exponents and p polynomial.

    The degree of p is forced by the exponent at infinity.  Returns the
    lowest-degree verified solution or None.
    """
    if eq is None:
        eq = VariationalEquation.from_C(C, lam, H)
    sing = singularities(eq=eq)
    finite = list(sing.finite)
    exp_sets = [tuple(_dedupe(indicial_exponents(eq, s))) for s in finite]
    inf_set = _dedupe(indicial_exponents(eq, INFINITY))
    candidates = []
    for combo in product(*exp_sets):
        for sigma in inf_set:
            deg = _near_integer(-sigma - sum(combo))
            if deg is None or deg < 0:
                continue
            candidates.append((deg, combo))
    candidates.sort(key=lambda c: (c[0], [_sort_key(e) for e in c[1]]))
    seen = set()
    for deg, combo in candidates:
        key = (deg, tuple(str(e) for e in combo))
        if key in seen:
            continue
        seen.add(key)
        active = [(s, e) for s, e in zip(finite, combo) if not _is_zero(e)]
        pts = [s for s, _ in active]
        exps = [e for _, e in active]
        A2, A1, A0 = _reduced_operator(eq, pts, exps)
        basis, is_exact = _solve_coefficients(eq, A2, A1, A0, deg)
        if not basis:
            continue
        p = basis[0]
        if is_exact:
            p = p * (1 / p.lead)
        else:
            p = p * (1 / p.coeffs[int(np.argmax([abs(c) for c in p.coeffs]))])
        image = A2 * p.derivative().derivative() + A1 * p.derivative() + A0 * p
        if is_exact:
            residual = 0.0 if image.is_zero() else float(max(abs(c) for c in image.coeffs))
        else:
            residual = max([abs(complex(c)) for c in image.coeffs] + [0.0])
        sol = PolynomialSolution(tuple(active), p, residual, is_exact)
        check = _pointwise_residual(eq, sol)
        if residual <= 1e-12 and check <= 1e-12:
            return PolynomialSolution(sol.exponents, p, residual, is_exact, check)
    return None


def _pointwise_residual(eq: VariationalEquation, sol: PolynomialSolution) -> float:
    """Independent check of a search result by numerical differentiation."""
    pts = _sample_points(eq, 8)
    worst = 0.0
    with mpmath.workdps(40):
        for z in pts:
            t = mpmath.mpc(z.real, z.imag)
            r = eq.residual_at(sol.evaluate, t)
            worst = max(worst, float(abs(r) / max(1, abs(sol.evaluate(t)))))
    return worst


# ---------------------------------------------------------------------------
# Hypergeometric truncation in the confluent regimes
# ---------------------------------------------------------------------------


def _nonpositive_integer(x) -> bool:
    k = _near_integer(x)
    return k is not None and k <= 0


def hypergeometric_parameters(C, lam) -> list:
    """Upper-parameter brackets of the confluent-regime series, every branch."""
    eq = VariationalEquation.from_C(C, lam)
    c2, lam = eq.c2, eq.lam
    out = []
    if _close(c2, Fraction(2)):
        disc = 9 + 8 * lam
        s = _sqrt(disc) if isinstance(disc, Fraction) else cmath.sqrt(disc)
        for sign in (1, -1):
            k = (sign * s - 1) / 2
            out.append((1 - k / 2, k / 2 + Fraction(3, 2)))
            out.append((2 + k / 2, Fraction(3, 2) - k / 2))
        return out
    if _close(c2, Fraction(1)):
        if isinstance(lam, Fraction) and lam <= 0 and _rational_sqrt(-lam) is not None:
            z = -_rational_sqrt(-lam)          # i*sqrt(lam) with sqrt(lam) = i*sqrt(-lam)
        else:
            z = 1j * cmath.sqrt(complex(lam))
        for sign in (1, -1):
            out.append((2 - sign * z, 1 - sign * z))
        return out
    raise InputError("hypergeometric truncation applies only to C = 1 or C = sqrt(2)")


def hypergeometric_truncation(C, lam) -> bool:
    """True iff some bracket holds a non-positive integer (on either root branch)."""
    return any(_nonpositive_integer(x) for bracket in hypergeometric_parameters(C, lam) for x in bracket)
