"""Numerical monodromy of the variational equation.

Fundamental matrices are transported along piecewise paths (segments and
circular arcs) in the complex t-plane by integrating the first-order system

    Y' = [[0, 1], [lam/P, -Q/P]] Y

with an adaptive 8th-order Runge-Kutta scheme in complex arithmetic.  The
basis at the base point is the identity, so a transport matrix maps initial
data (X, X') at the base point to the continued data.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .errors import ClearanceError, InconclusiveError, InputError
from .variational import (INFINITY, VariationalEquation, indicial_exponents,
                          singularities)

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-12
RTOL_FLOOR = 2.5e-14
ABELIAN_THRESHOLD = 1e-6


# ---------------------------------------------------------------------------
# Paths
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Segment:
    start: complex
    end: complex

    def point(self, s: float) -> complex:
        return self.start + (self.end - self.start) * s

    def velocity(self, s: float) -> complex:
        return self.end - self.start

    def samples(self, k: int = 2) -> list:
        return [self.point(x) for x in np.linspace(0, 1, k)]

    def distance_to(self, z: complex) -> float:
        d = self.end - self.start
        if d == 0:
            return abs(z - self.start)
        u = ((z - self.start) * d.conjugate()).real / abs(d) ** 2
        u = min(1.0, max(0.0, u))
        return abs(z - self.point(u))


@dataclass(frozen=True)
class Arc:
    center: complex
    radius: float
    theta0: float
    theta1: float

    def point(self, s: float) -> complex:
        th = self.theta0 + (self.theta1 - self.theta0) * s
        return self.center + self.radius * cmath.exp(1j * th)

    def velocity(self, s: float) -> complex:
        th = self.theta0 + (self.theta1 - self.theta0) * s
        return 1j * self.radius * (self.theta1 - self.theta0) * cmath.exp(1j * th)

    @property
    def start(self) -> complex:
        return self.point(0.0)

    @property
    def end(self) -> complex:
        return self.point(1.0)

    def samples(self, k: int = 9) -> list:
        return [self.point(x) for x in np.linspace(0, 1, k)]

    def distance_to(self, z: complex) -> float:
        # dense sampling is plenty for clearance bookkeeping
        return min(abs(z - self.point(x)) for x in np.linspace(0, 1, 721))


@dataclass(frozen=True)
class LoopPath:
    base_point: complex
    pieces: tuple
    encircled: tuple = ()
    clearance: float = 0.0

    @property
    def waypoints(self) -> list:
        pts = [self.base_point]
        for p in self.pieces:
            pts.extend(p.samples()[1:])
        return pts

    @property
    def closed(self) -> bool:
        return abs(self.pieces[-1].end - self.base_point) < 1e-12 if self.pieces else True

    def reversed(self) -> "LoopPath":
        rev = []
        for p in reversed(self.pieces):
            if isinstance(p, Segment):
                rev.append(Segment(p.end, p.start))
            else:
                rev.append(Arc(p.center, p.radius, p.theta1, p.theta0))
        return LoopPath(self.base_point, tuple(rev), self.encircled, self.clearance)

    def then(self, other: "LoopPath") -> "LoopPath":
        """This loop followed by ``other`` (same base point)."""
        return LoopPath(self.base_point, self.pieces + other.pieces,
                        self.encircled + other.encircled, min(self.clearance, other.clearance))

    def to_json(self) -> dict:
        def enc(z):
            return "inf" if z == INFINITY else [complex(z).real, complex(z).imag]
        return {"base_point": enc(self.base_point),
                "waypoints": [enc(z) for z in self.waypoints],
                "encircled": [enc(z) for z in self.encircled],
                "clearance": self.clearance}

    @classmethod
    def from_waypoints(cls, points: Sequence, encircled: Sequence = ()) -> "LoopPath":
        """Closed polyline through the given points (first point is the base)."""
        pts = [complex(*p) if isinstance(p, (list, tuple)) else complex(p) for p in points]
        if len(pts) < 2:
            raise InputError("a path needs at least two waypoints")
        if abs(pts[0] - pts[-1]) > 1e-12:
            pts.append(pts[0])
        pieces = tuple(Segment(a, b) for a, b in zip(pts[:-1], pts[1:]))
        return cls(pts[0], pieces, tuple(encircled))


def path_clearance(path: LoopPath, points: Sequence) -> float:
    pts = [complex(p) for p in points if p != INFINITY]
    if not pts:
        return math.inf
    return min(piece.distance_to(z) for piece in path.pieces for z in pts)


def _finite_points(eq: VariationalEquation) -> list:
    pts = [complex(p) for p in singularities(eq=eq).finite]
    return sorted(pts, key=lambda z: (z.real, z.imag))


def default_base_point(eq: VariationalEquation) -> complex:
    """Point of (0, 1) on the real axis farthest from every singularity."""
    pts = _finite_points(eq)
    grid = np.linspace(0.05, 0.95, 181)
    best = max(grid, key=lambda x: min(abs(x - z) for z in pts))
    return complex(best)


def loop_around(eq: VariationalEquation, target: complex, base: complex,
                height: Optional[float] = None) -> LoopPath:
    """Counterclockwise loop around one singularity through the upper half-plane.

    Route: up from the base, across at a fixed height, down to the circle of
    radius half the distance to the nearest other singularity, once around,
    and back the same way.
    """
    pts = _finite_points(eq)
    target = complex(target)
    others = [z for z in pts if abs(z - target) > 1e-12]
    r = 0.5 * min([abs(z - target) for z in others] + [1.0])
    if height is None:
        height = _travel_height(pts, base)
    top = target + 1j * r
    go = [Segment(base, base + 1j * height),
          Segment(base + 1j * height, target.real + 1j * height),
          Segment(target.real + 1j * height, top)]
    go = [s for s in go if abs(s.end - s.start) > 0]
    circle = Arc(target, r, math.pi / 2, math.pi / 2 + 2 * math.pi)
    back = [Segment(s.end, s.start) for s in reversed(go)]
    path = LoopPath(base, tuple(go + [circle] + back), (target,))
    clear = path_clearance(path, pts)
    return LoopPath(base, path.pieces, (target,), clear)


def _travel_height(pts, base) -> float:
    gaps = [abs(a - b) for i, a in enumerate(pts) for b in pts[i + 1:]]
    return 0.5 * min(gaps + [abs(base - z) * 2 for z in pts] + [1.0])


def loop_around_all(eq: VariationalEquation, base: complex, height: Optional[float] = None) -> LoopPath:
    """Counterclockwise loop enclosing every finite singularity."""
    pts = _finite_points(eq)
    center = sum(pts) / len(pts)
    radius = max(abs(z - center) for z in pts) + 1.0
    if height is None:
        height = _travel_height(pts, base)
    top = center + 1j * radius
    go = [Segment(base, base + 1j * height), Segment(base + 1j * height, top)]
    circle = Arc(center, radius, math.pi / 2, math.pi / 2 + 2 * math.pi)
    back = [Segment(s.end, s.start) for s in reversed(go)]
    path = LoopPath(base, tuple(go + [circle] + back), tuple(pts))
    return LoopPath(base, path.pieces, tuple(pts), path_clearance(path, pts))


def contractible_loop(eq: VariationalEquation, base: complex) -> LoopPath:
    """Small circle next to the base point, enclosing nothing."""
    pts = _finite_points(eq)
    r = 0.25 * min(abs(base - z) for z in pts)
    center = base + 1j * r
    path = LoopPath(base, (Arc(center, r, -math.pi / 2, 1.5 * math.pi),), ())
    return LoopPath(base, path.pieces, (), path_clearance(path, pts))


# ---------------------------------------------------------------------------
# Continuation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FundamentalMatrix:
    entries: np.ndarray
    path: LoopPath
    estimated_error: float
    abel_deviation: float = 0.0

    def to_json(self) -> dict:
        return {"entries": [[[complex(v).real, complex(v).imag] for v in row] for row in self.entries],
                "estimated_error": self.estimated_error, "abel_deviation": self.abel_deviation,
                "path": self.path.to_json()}


def _coeff_funcs(eq: VariationalEquation):
    pc = [complex(c) for c in eq.P.coeffs]
    qc = [complex(c) for c in eq.Q.coeffs]
    lam = complex(eq.lam)

    def horner(cs, z):
        acc = 0j
        for c in reversed(cs):
            acc = acc * z + c
        return acc

    def a_matrix(z):
        p = horner(pc, z)
        return lam / p, -horner(qc, z) / p

    return a_matrix


def _integrate(eq: VariationalEquation, path: LoopPath, rtol: float) -> tuple:
    a_matrix = _coeff_funcs(eq)
    y = np.array([1, 0, 0, 1, 0], dtype=complex)   # Y row-major, then the Abel integral
    for piece in path.pieces:
        def rhs(s, state, piece=piece):
            z = piece.point(s)
            dz = piece.velocity(s)
            a21, a22 = a_matrix(z)
            y11, y12, y21, y22 = state[:4]
            return np.array([y21 * dz, y22 * dz,
                             (a21 * y11 + a22 * y21) * dz, (a21 * y12 + a22 * y22) * dz,
                             a22 * dz])
        sol = solve_ivp(rhs, (0.0, 1.0), y, method="DOP853", rtol=rtol, atol=rtol * 1e-3)
        if sol.status != 0:
            raise ClearanceError(f"integration failed along the path: {sol.message}")
        y = sol.y[:, -1]
    m = y[:4].reshape(2, 2)
    return m, y[4]


def continue_solution(eq: VariationalEquation, path: LoopPath, tol: float = DEFAULT_TOL,
                      min_clearance: float = 1e-3) -> FundamentalMatrix:
    """Transport the identity basis along ``path``; error from a tighter rerun."""
    if tol <= 0:
        raise InputError("tol must be positive")
    clear = path_clearance(path, _finite_points(eq))
    if clear < min_clearance:
        raise ClearanceError(f"path passes within {clear:.3g} of a singularity")
    rtol = max(tol, RTOL_FLOOR)
    m1, w = _integrate(eq, path, rtol)
    m2, _ = _integrate(eq, path, max(rtol / 30, RTOL_FLOOR))
    err = float(np.linalg.norm(m1 - m2, 2))
    if err == 0.0 and rtol == RTOL_FLOOR:
        err = float(np.finfo(float).eps * np.linalg.norm(m1, 2))
    abel = abs(np.linalg.det(m2) - cmath.exp(w)) / max(1.0, np.linalg.norm(m2, 2) ** 2)
    return FundamentalMatrix(m2, path, err, float(abel))


# ---------------------------------------------------------------------------
# Generators and diagnostics
# ---------------------------------------------------------------------------


def group_commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b @ np.linalg.inv(a) @ np.linalg.inv(b)


def commutator_deviation(a: np.ndarray, b: np.ndarray) -> float:
    """|ab - ba| / (|a| |b|) in the operator norm.

    Equal to |a b a^-1 b^-1 - 1| to first order for generators near the
    identity, but insensitive to the conditioning of the base-point basis
    (a unipotent generator can have entries of size 1e5).
    """
    na, nb = np.linalg.norm(a, 2), np.linalg.norm(b, 2)
    return float(np.linalg.norm(a @ b - b @ a, 2) / (na * nb))


def _pairwise_max(mats) -> float:
    out = 0.0
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            out = max(out, commutator_deviation(mats[i], mats[j]))
    return out


def derived_generators(mats) -> list:
    """Commutators of the generators and their conjugates by generators and inverses."""
    comms = [group_commutator(mats[i], mats[j]) for i in range(len(mats)) for j in range(i + 1, len(mats))]
    conj = []
    for c in comms:
        for g in mats:
            gi = np.linalg.inv(g)
            conj.append(g @ c @ gi)
            conj.append(gi @ c @ g)
    return comms + conj


def local_exponent_deviation(matrix: np.ndarray, exponents) -> float:
    """Distance between the eigenvalues and exp(2 pi i rho) for the exponents."""
    ev = np.linalg.eigvals(matrix)
    target = [cmath.exp(2j * math.pi * complex(r)) for r in exponents]
    d1 = max(abs(ev[0] - target[0]), abs(ev[1] - target[1]))
    d2 = max(abs(ev[0] - target[1]), abs(ev[1] - target[0]))
    return float(min(d1, d2))


def has_jordan_block(matrix: np.ndarray, tol: float = 1e-6) -> bool:
    """Repeated eigenvalue with a one-dimensional eigenspace."""
    ev = np.linalg.eigvals(matrix)
    if abs(ev[0] - ev[1]) > math.sqrt(tol):
        return False
    mu = ev.mean()
    return float(np.linalg.norm(matrix - mu * np.eye(2), 2)) > tol


@dataclass(frozen=True)
class MonodromyReport:
    equation: VariationalEquation
    base_point: complex
    points: tuple
    generators: tuple
    big_loop: FundamentalMatrix
    max_commutator_deviation: float
    derived_commutator_deviation: float
    product_relation_deviation: float
    local_exponent_match: dict
    estimated_error: float
    abel_deviation: float
    tolerances: dict = field(default_factory=dict)

    @property
    def matrices(self) -> list:
        return [g.entries for g in self.generators]

    def to_json(self) -> dict:
        return {"equation": self.equation.to_json(),
                "base_point": [self.base_point.real, self.base_point.imag],
                "singularities": [[p.real, p.imag] for p in self.points],
                "generators": [g.to_json() for g in self.generators],
                "loop_around_all": self.big_loop.to_json(),
                "max_commutator_deviation": self.max_commutator_deviation,
                "derived_commutator_deviation": self.derived_commutator_deviation,
                "product_relation_deviation": self.product_relation_deviation,
                "local_exponent_match": {f"{complex(k).real:g}{complex(k).imag:+g}j": v
                                         for k, v in self.local_exponent_match.items()},
                "estimated_error": self.estimated_error,
                "abel_deviation": self.abel_deviation,
                "tolerances": self.tolerances}


def monodromy_generators(eq: VariationalEquation, base_point: Optional[complex] = None,
                         tol: float = DEFAULT_TOL) -> MonodromyReport:
    """One counterclockwise loop per finite singularity, ordered by real part."""
    pts = _finite_points(eq)
    base = complex(base_point) if base_point is not None else default_base_point(eq)
    if min(abs(base - z) for z in pts) < 1e-6:
        raise InputError("base point must be an ordinary point")
    exact_points = list(singularities(eq=eq).finite)
    gens = []
    match = {}
    for z in pts:
        fm = continue_solution(eq, loop_around(eq, z, base), tol)
        gens.append(fm)
        src = next(p for p in exact_points if abs(complex(p) - z) < 1e-12)
        match[z] = local_exponent_deviation(fm.entries, indicial_exponents(eq, src))
    big = continue_solution(eq, loop_around_all(eq, base), tol)
    prod = np.eye(2, dtype=complex)
    for g in gens:
        prod = g.entries @ prod
    mats = [g.entries for g in gens]
    derived = derived_generators(mats)
    return MonodromyReport(
        equation=eq, base_point=base, points=tuple(pts), generators=tuple(gens), big_loop=big,
        max_commutator_deviation=_pairwise_max(mats),
        derived_commutator_deviation=_pairwise_max(derived),
        product_relation_deviation=float(np.linalg.norm(big.entries - prod, 2)),
        local_exponent_match=match,
        estimated_error=max([g.estimated_error for g in gens] + [big.estimated_error]),
        abel_deviation=max([g.abel_deviation for g in gens] + [big.abel_deviation]),
        tolerances={"rtol": tol, "abelian_threshold": ABELIAN_THRESHOLD})


def _is_root_of_unity(z: complex, max_order: int = 24, tol: float = 1e-6) -> bool:
    if abs(abs(z) - 1) > tol:
        return False
    theta = cmath.phase(z) / (2 * math.pi)
    frac = Fraction(theta).limit_denominator(max_order)
    return abs(theta - float(frac)) <= tol


def _classify(value: float, threshold: float, what: str) -> bool:
    """True below threshold, False above 100*threshold, inconclusive in between."""
    if value < threshold:
        return True
    if value <= 100 * threshold:
        raise InconclusiveError(f"{what} {value:.3g} lies in the gap [{threshold:g}, {100 * threshold:g}]")
    return False


def abelianity_certificate(report: MonodromyReport, threshold: float = ABELIAN_THRESHOLD) -> bool:
    """Numerical proxy for 'the identity component of the monodromy closure is abelian'.

    Abelian generators pass directly.  Otherwise the derived subgroup must be
    abelian, and if it contains a nontrivial unipotent element every generator
    must have eigenvalue ratio a root of unity (a Borel subgroup with a
    non-finite torus part is solvable but not abelian).
    """
    if report.estimated_error > threshold / 10:
        raise InconclusiveError(f"integration error {report.estimated_error:.3g} exceeds threshold/10")
    if _classify(report.max_commutator_deviation, threshold, "commutator deviation"):
        return True
    if not _classify(report.derived_commutator_deviation, threshold, "derived commutator deviation"):
        return False
    derived = derived_generators(report.matrices)
    unipotent = False
    for c in derived:
        ev = np.linalg.eigvals(c)
        if max(abs(ev - 1)) < math.sqrt(threshold) and np.linalg.norm(c - np.eye(2), 2) > 100 * threshold * np.linalg.norm(c, 2):
            unipotent = True
            break
    if not unipotent:
        return True
    for g in report.matrices:
        ev = np.linalg.eigvals(g)
        if not _is_root_of_unity(ev[0] / ev[1]):
            return False
    return True
