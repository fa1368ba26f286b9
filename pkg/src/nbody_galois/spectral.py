"""The W matrix, its spectrum, and the partial-decoupling tests.

W is the mass-scaled Hessian ``(1/m_i) d^2V/dq_i dq_j`` at a Darboux point of
multiplier -1.  A partial decoupling is a common eigenvector of W and
``J^-1 W J`` with the same eigenvalue, J being the quarter-turn rotation.

Three matrix flavours are accepted throughout: numpy complex arrays, numpy
object arrays of mpmath numbers (high precision), and nested lists of
Fractions (exact; eigenvalues then come from the characteristic polynomial).
"""

from __future__ import annotations

import functools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import mpmath
import numpy as np

from . import exact
from .config import DarbouxPoint, mass_scaled_hessian, regular_ngon
from .errors import InputError, NotAlignedError

logger = logging.getLogger(__name__)

CLUSTER_TOL = 1e-8
HP_DPS = 40


def _hp(func):
    """Run with at least HP_DPS digits so mpmath inputs keep their precision."""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        with mpmath.workdps(max(mpmath.mp.dps, HP_DPS)):
            return func(*args, **kwargs)
    return wrapper


# ---------------------------------------------------------------------------
# Matrix flavour helpers
# ---------------------------------------------------------------------------


def _is_exact(a) -> bool:
    return isinstance(a, list) and a and isinstance(a[0][0], (Fraction, int))


def _is_mp(a) -> bool:
    return isinstance(a, np.ndarray) and a.dtype == object


def _to_mp_matrix(a) -> mpmath.matrix:
    return mpmath.matrix([[mpmath.mpc(v) for v in row] for row in a])


def _from_mp_matrix(m: mpmath.matrix) -> np.ndarray:
    return np.array([[m[i, j] for j in range(m.cols)] for i in range(m.rows)], dtype=object)


def _as_numeric(a) -> np.ndarray:
    if _is_exact(a):
        return np.array([[complex(v) for v in row] for row in a])
    return a


def symplectic_j(n: int, like=None) -> np.ndarray:
    """J = [[0, -I], [I, 0]], the rotation by a quarter turn on (x, y) blocks."""
    j = np.zeros((2 * n, 2 * n), dtype=complex)
    j[:n, n:] = -np.eye(n)
    j[n:, :n] = np.eye(n)
    if like is not None and _is_mp(like):
        return j.astype(object) * mpmath.mpf(1)
    return j


def rotation_matrix(theta: float, n: int) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    r = np.zeros((2 * n, 2 * n))
    r[:n, :n] = c * np.eye(n)
    r[:n, n:] = -s * np.eye(n)
    r[n:, :n] = s * np.eye(n)
    r[n:, n:] = c * np.eye(n)
    return r


def conjugated_by_j(w):
    """J^-1 W J computed by block permutation (exact for every flavour)."""
    if _is_exact(w):
        n = len(w) // 2
        a = [row[:n] for row in w[:n]]
        b = [row[n:] for row in w[:n]]
        c = [row[:n] for row in w[n:]]
        d = [row[n:] for row in w[n:]]
        top = [d[i] + [-v for v in c[i]] for i in range(n)]
        bottom = [[-v for v in b[i]] + a[i] for i in range(n)]
        return top + bottom
    n = w.shape[0] // 2
    a, b, c, d = w[:n, :n], w[:n, n:], w[n:, :n], w[n:, n:]
    return np.block([[d, -c], [-b, a]])


# ---------------------------------------------------------------------------
# Building W
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WMatrix:
    entries: object
    masses: tuple
    source: Optional[DarbouxPoint] = None

    @property
    def n(self) -> int:
        return len(self.masses)

    def to_json(self) -> list:
        a = _as_numeric(self.entries)
        return [[[complex(v).real, complex(v).imag] for v in row] for row in a]


@_hp
def build_w(d: DarbouxPoint, multiplier_tol: float = 1e-9) -> WMatrix:
    """W at a normalized Darboux point (mpmath precision if the point is)."""
    if abs(complex(d.multiplier) + 1) > multiplier_tol:
        raise InputError("build_w needs a Darboux point with multiplier -1")
    w = mass_scaled_hessian(d.masses, d.config, d.branch)
    return WMatrix(w, d.masses, d)


def exact_w(masses, xs, ys, distances, y_factor=1):
    """Exact rational matrix similar to W for a real Darboux point.

    Body i sits at ``(xs[i], sqrt(y_factor) * ys[i])`` with rational xs, ys
    and rational signed mutual distances ``distances[i][j]``.  The returned
    matrix is ``D^-1 W D`` with ``D = diag(I, sqrt(y_factor) I)``; it has the
    same characteristic polynomial and eigenspace dimensions as W.  The
    configuration is rescaled implicitly so that the multiplier is -1.
    """
    m = [exact.as_rational(v) for v in masses]
    xs = [exact.as_rational(v) for v in xs]
    ys = [exact.as_rational(v) for v in ys]
    f = exact.as_rational(y_factor)
    n = len(m)
    r = [[exact.as_rational(distances[i][j]) if i != j else None for j in range(n)]
         for i in range(n)]
    for i in range(n):
        for j in range(n):
            if i != j and (xs[i] - xs[j]) ** 2 + f * (ys[i] - ys[j]) ** 2 != r[i][j] ** 2:
                raise InputError("distances do not match the coordinates")
    total = sum(m)
    xc = sum(mi * x for mi, x in zip(m, xs)) / total
    yc = sum(mi * y for mi, y in zip(m, ys)) / total
    alpha = None
    for i in range(n):
        ax = sum(m[j] * (xs[j] - xs[i]) / r[i][j] ** 3 for j in range(n) if j != i)
        ay = sum(m[j] * (ys[j] - ys[i]) / r[i][j] ** 3 for j in range(n) if j != i)
        for acc, off in ((ax, xs[i] - xc), (ay, ys[i] - yc)):
            if off != 0:
                cand = acc / off
                if alpha is not None and cand != alpha:
                    raise InputError("configuration is not a Darboux point")
                alpha = cand
            elif acc != 0:
                raise InputError("configuration is not a Darboux point")
    if not alpha:
        raise InputError("degenerate Darboux point")
    size = 2 * n
    w = [[Fraction(0)] * size for _ in range(size)]
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            dx, dy, rr = xs[i] - xs[j], ys[i] - ys[j], r[i][j]
            k = m[j] / rr ** 5
            kxx = k * (3 * dx * dx - rr ** 2)
            kyy = k * (3 * f * dy * dy - rr ** 2)
            kxy_top = k * 3 * f * dx * dy   # x-row, y-column, times sqrt(f)
            kxy_bottom = k * 3 * dx * dy    # y-row, x-column, over sqrt(f)
            for blk_r, blk_c, val in ((0, 0, kxx), (0, n, kxy_top), (n, 0, kxy_bottom), (n, n, kyy)):
                w[blk_r + i][blk_c + i] += val
                w[blk_r + i][blk_c + j] -= val
    scale = -1 / alpha
    return [[v * scale for v in row] for row in w]


def exact_lagrange_w(masses):
    """Rational matrix similar to W for the equilateral triangle (side 2)."""
    two = [[0, 2, 2], [2, 0, 2], [2, 2, 0]]
    return exact_w(masses, [-1, 1, 0], [0, 0, 1], two, y_factor=3)


def exact_collinear_w(masses, rho):
    """Exact W for bodies at (-1, 0, rho) with rational rho > 0."""
    rho = exact.as_rational(rho)
    if rho <= 0:
        raise InputError("exact collinear W needs a positive rational rho")
    dist = [[0, 1, 1 + rho], [1, 0, rho], [1 + rho, rho, 0]]
    return exact_w(masses, [-1, 0, rho], [0, 0, 0], dist)


# ---------------------------------------------------------------------------
# Spectrum
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Cluster:
    eigenvalue: complex
    algebraic_multiplicity: int
    geometric_multiplicity: int
    exact_value: Optional[Fraction] = None

    def to_json(self) -> dict:
        v = complex(self.eigenvalue)
        return {"eigenvalue": [v.real, v.imag],
                "exact": None if self.exact_value is None else str(self.exact_value),
                "algebraic_multiplicity": self.algebraic_multiplicity,
                "geometric_multiplicity": self.geometric_multiplicity}


@dataclass(frozen=True)
class SpectralReport:
    clusters: tuple
    cluster_tolerance: float
    exact: bool = False
    warning: bool = False
    charpoly: Optional[exact.Poly] = None

    @property
    def eigenvalues(self) -> list:
        out = []
        for c in self.clusters:
            out.extend([complex(c.eigenvalue)] * c.algebraic_multiplicity)
        return out

    def find(self, value, tol: float = 1e-9) -> Optional[Cluster]:
        for c in self.clusters:
            if abs(complex(c.eigenvalue) - complex(value)) <= tol:
                return c
        return None

    def contains_multiset(self, values, tol: float = 1e-9) -> bool:
        pool = self.eigenvalues
        for v in values:
            hit = next((k for k, e in enumerate(pool) if abs(e - complex(v)) <= tol), None)
            if hit is None:
                return False
            pool.pop(hit)
        return True

    def to_json(self) -> dict:
        return {"clusters": [c.to_json() for c in self.clusters],
                "cluster_tolerance": self.cluster_tolerance,
                "exact": self.exact, "warning": self.warning,
                "charpoly": None if self.charpoly is None else exact.format_poly(self.charpoly)}


def _cluster(values, tol):
    values = sorted(values, key=lambda z: (complex(z).real, complex(z).imag))
    groups: list = []
    for v in values:
        for g in groups:
            if min(abs(complex(v) - complex(u)) for u in g) <= tol:
                g.append(v)
                break
        else:
            groups.append([v])
    # merge groups that became close through chaining
    merged = True
    while merged:
        merged = False
        for a in range(len(groups)):
            for b in range(a + 1, len(groups)):
                if min(abs(complex(u) - complex(v)) for u in groups[a] for v in groups[b]) <= tol:
                    groups[a].extend(groups.pop(b))
                    merged = True
                    break
            if merged:
                break
    return groups


def _numeric_rank(a, threshold) -> int:
    if _is_mp(a):
        sv = mpmath.svd_c(_to_mp_matrix(a), compute_uv=False)
        return sum(1 for k in range(sv.rows) if abs(sv[k]) > threshold)
    sv = np.linalg.svd(np.asarray(a, dtype=complex), compute_uv=False)
    return int(np.sum(sv > threshold))


def _eigvals(w):
    if _is_mp(w):
        ev = mpmath.eig(_to_mp_matrix(w), left=False, right=False)
        return list(ev)
    return list(np.linalg.eigvals(np.asarray(w, dtype=complex)))


def _spectral_radius(values) -> float:
    return max([abs(complex(v)) for v in values] + [1.0])


@_hp
def spectrum(w, tolerance: float = CLUSTER_TOL) -> SpectralReport:
    """Eigenvalue clusters with algebraic and geometric multiplicities.

    Exact rational input goes through the characteristic polynomial and its
    square-free decomposition, so multiplicities never depend on rounding.
    """
    if isinstance(w, WMatrix):
        w = w.entries
    if _is_exact(w):
        return _exact_spectrum(w, tolerance)
    size = w.shape[0]
    values = _eigvals(w)
    scale = _spectral_radius(values)
    groups = _cluster(values, tolerance * scale)
    warning = False
    for a in range(len(groups)):
        for b in range(a + 1, len(groups)):
            gap = min(abs(complex(u) - complex(v)) for u in groups[a] for v in groups[b])
            if gap <= 100 * tolerance * scale:
                warning = True
    clusters = []
    eye = np.eye(size) if not _is_mp(w) else np.eye(size).astype(object) * mpmath.mpf(1)
    for g in groups:
        lam = sum(g) / len(g)
        geo = size - _numeric_rank(w - lam * eye, tolerance * scale)
        clusters.append(Cluster(lam, len(g), max(1, min(geo, len(g)))))
    return SpectralReport(tuple(clusters), tolerance, exact=False, warning=warning)


def _exact_spectrum(w, tolerance) -> SpectralReport:
    size = len(w)
    chi = exact.charpoly(w)
    clusters = []
    for factor, mult in exact.square_free_decomposition(chi):
        rational = exact.rational_roots(factor)
        for r in rational:
            shifted = [[w[i][j] - (r if i == j else 0) for j in range(size)] for i in range(size)]
            geo = size - exact.rank(shifted)
            clusters.append(Cluster(complex(r), mult, geo, exact_value=r))
        rest = factor
        for r in rational:
            rest = rest // exact.Poly((-r, Fraction(1)))
        if rest.degree > 0:
            desc = [complex(c) for c in reversed(rest.coeffs)]
            num = np.array([[complex(v) for v in row] for row in w])
            for root in np.roots(desc):
                geo = size - _numeric_rank(num - root * np.eye(size), tolerance * _spectral_radius([root]))
                clusters.append(Cluster(complex(root), mult, max(1, min(geo, mult))))
    clusters.sort(key=lambda c: (c.eigenvalue.real, c.eigenvalue.imag))
    return SpectralReport(tuple(clusters), tolerance, exact=True, charpoly=chi)


@_hp
def mandatory_spectrum_check(w, tol: float = 1e-9) -> bool:
    """True iff {2, -1, 0, 0} is contained (with multiplicity) in the spectrum."""
    if isinstance(w, WMatrix):
        w = w.entries
    if _is_exact(w):
        rep = _exact_spectrum(w, tol)
    else:
        rep = SpectralReport(tuple(Cluster(v, 1, 1) for v in _eigvals(w)), tol)
    return rep.contains_multiset([2, -1, 0, 0], tol)


# ---------------------------------------------------------------------------
# Partial decoupling
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DecouplingReport:
    decoupled: bool
    witness_vector: Optional[np.ndarray] = None
    lam: Optional[complex] = None
    kind: Optional[str] = None
    dimension: int = 0
    candidates: tuple = field(default_factory=tuple)

    def to_json(self) -> dict:
        v = None
        if self.witness_vector is not None:
            v = [[complex(z).real, complex(z).imag] for z in self.witness_vector]
        lam = None if self.lam is None else [complex(self.lam).real, complex(self.lam).imag]
        return {"decoupled": self.decoupled, "lambda": lam, "kind": self.kind,
                "dimension": self.dimension, "witness_vector": v,
                "candidates": [dict(c) for c in self.candidates]}


def _null_space(a, threshold):
    if _is_mp(a):
        u, s, vh = mpmath.svd_c(_to_mp_matrix(a))
        cols = vh.rows
        sv = [abs(s[k]) for k in range(s.rows)] + [0] * (cols - s.rows)
        basis = [[mpmath.conj(vh[k, i]) for i in range(cols)] for k in range(cols) if sv[k] <= threshold]
        return np.array(basis, dtype=object).T if basis else np.zeros((cols, 0), dtype=object)
    a = np.asarray(a, dtype=complex)
    _, s, vh = np.linalg.svd(a)
    sv = np.concatenate([s, np.zeros(a.shape[1] - s.size)])
    return vh[sv <= threshold].conj().T


def _orth_complement_of(basis, trivial, threshold):
    """Columns of ``basis`` with the span of ``trivial`` projected out."""
    if trivial.shape[1] == 0 or basis.shape[1] == 0:
        return basis
    if _is_mp(basis):
        t = _to_mp_matrix(trivial)
        q, _ = mpmath.qr(t)
        q = _from_mp_matrix(q)[:, :trivial.shape[1]]
        proj = basis - q.dot(np.conj(q).T.dot(basis))
        u, s, _ = mpmath.svd_c(_to_mp_matrix(proj))
        keep = [k for k in range(s.rows) if abs(s[k]) > threshold]
        u = _from_mp_matrix(u)
        return u[:, keep]
    q, _ = np.linalg.qr(trivial)
    proj = basis - q @ (q.conj().T @ basis)
    u, s, _ = np.linalg.svd(proj, full_matrices=False)
    return u[:, s > threshold]


def translation_vectors(n: int, like=None) -> np.ndarray:
    t = np.zeros((2 * n, 2), dtype=complex)
    t[:n, 0] = 1
    t[n:, 1] = 1
    if like is not None and _is_mp(like):
        return t.astype(object) * mpmath.mpf(1)
    return t


def j_eigen_sign(v, tol: float = 1e-7) -> Optional[int]:
    """+1 if v = (w, i w), -1 if v = (w, -i w), None otherwise (after normalizing)."""
    v = np.array([complex(z) for z in v])
    n = v.size // 2
    v = v / np.linalg.norm(v)
    w = v[:n]
    for sign in (1, -1):
        if np.linalg.norm(v[n:] - sign * 1j * w) <= tol:
            return sign
    return None


@_hp
def partial_decoupling(w, tolerance: float = CLUSTER_TOL, include_trivial: bool = False,
                       spectral: Optional[SpectralReport] = None) -> DecouplingReport:
    """Search common eigenvectors of W and J^-1 W J with a common eigenvalue.

    Cluster by cluster, the kernel of the stacked system [W - l; K - l] is
    computed; the translations are projected out unless ``include_trivial``.
    Kernels are J-invariant: dimension >= 2 is an invariant plane, dimension 1
    is a single vector of the form (w, +/- i w).
    """
    if isinstance(w, WMatrix):
        w = w.entries
    if _is_exact(w):
        w = np.array([[complex(v) for v in row] for row in w])
    size = w.shape[0]
    n = size // 2
    k = conjugated_by_j(w)
    rep = spectral or spectrum(w, tolerance)
    scale = _spectral_radius(rep.eigenvalues)
    threshold = tolerance * scale
    eye = np.eye(size) if not _is_mp(w) else np.eye(size).astype(object) * mpmath.mpf(1)
    trivial_all = translation_vectors(n, w)
    candidates = []
    best = None
    for c in rep.clusters:
        lam = c.eigenvalue
        stacked = np.vstack([w - lam * eye, k - lam * eye])
        basis = _null_space(stacked, threshold)
        if basis.shape[1] == 0:
            continue
        if not include_trivial and abs(complex(lam)) <= threshold:
            basis = _orth_complement_of(basis, trivial_all, threshold)
        dim = basis.shape[1]
        if dim == 0:
            continue
        if dim >= 2:
            kind = "invariant-plane"
            witness = basis[:, 0] + (basis[:, 1] if dim > 1 else 0) * 0.5
            if j_eigen_sign(witness) is not None:
                witness = basis[:, 0] + basis[:, 1] * 0.3
        else:
            kind = "rank-one"
            witness = basis[:, 0]
        candidates.append({"lambda": [complex(lam).real, complex(lam).imag],
                           "dimension": dim, "kind": kind})
        if best is None:
            best = (lam, witness, kind, dim)
    if best is None:
        return DecouplingReport(False, candidates=tuple(candidates))
    lam, witness, kind, dim = best
    return DecouplingReport(True, witness, lam, kind, dim, tuple(candidates))


def witness_residuals(w, v, lam) -> tuple:
    """(|W v - l v|, |J^-1 W J v - l v|) relative to |v|."""
    if isinstance(w, WMatrix):
        w = w.entries
    a = np.asarray(_as_numeric(w), dtype=complex) if not _is_mp(w) else np.array(w, dtype=complex)
    v = np.array([complex(z) for z in v])
    k = conjugated_by_j(a)
    lam = complex(lam)
    nv = np.linalg.norm(v)
    return (float(np.linalg.norm(a @ v - lam * v) / nv), float(np.linalg.norm(k @ v - lam * v) / nv))


# ---------------------------------------------------------------------------
# Aligned configurations
# ---------------------------------------------------------------------------


def aligned_blocks(w, tol: float = 1e-9):
    """Return A when W = diag(A, -A/2); raise NotAlignedError otherwise."""
    if isinstance(w, WMatrix):
        w = w.entries
    if _is_exact(w):
        n = len(w) // 2
        a = [row[:n] for row in w[:n]]
        ok = all(w[i][n + j] == 0 and w[n + i][j] == 0 and w[n + i][n + j] == -a[i][j] / 2
                 for i in range(n) for j in range(n))
        if not ok:
            raise NotAlignedError("W is not of the form diag(A, -A/2)")
        return a
    a_all = np.asarray(w, dtype=complex)
    n = a_all.shape[0] // 2
    a = a_all[:n, :n]
    scale = max(1.0, float(np.max(np.abs(a_all))))
    off = max(np.max(np.abs(a_all[:n, n:])), np.max(np.abs(a_all[n:, :n])))
    diag = np.max(np.abs(a_all[n:, n:] + a / 2))
    if off > tol * scale or diag > tol * scale:
        raise NotAlignedError("W is not of the form diag(A, -A/2)")
    return a


def reduced_determinant(a):
    """Product of the eigenvalues of A other than the translation 0 and homothety 2.

    det(A) itself always vanishes because of the translation direction, so the
    decoupling test is on this reduced determinant: with
    charpoly(A) = t (t - 2) q(t), it returns (-1)^(n-2) q(0).
    """
    if isinstance(a, list):
        chi = exact.charpoly(a)
        q, r = chi.divmod(exact.Poly((Fraction(0), Fraction(-2), Fraction(1))))
        if not r.is_zero():
            raise NotAlignedError("A lacks the eigenvalues 0 and 2")
        return (-1) ** q.degree * q(Fraction(0))
    ev = list(np.linalg.eigvals(np.asarray(a, dtype=complex)))
    for target in (0.0, 2.0):
        k = int(np.argmin([abs(e - target) for e in ev]))
        ev.pop(k)
    return complex(np.prod(ev)) if ev else 1.0


def aligned_decoupling(w, tol: float = 1e-9) -> bool:
    """For aligned configurations: decoupled iff the reduced det(A) vanishes."""
    a = aligned_blocks(w, tol)
    det = reduced_determinant(a)
    if isinstance(det, Fraction):
        return det == 0
    return abs(det) <= tol


# ---------------------------------------------------------------------------
# Equal masses: the regular polygon eigenvalue
# ---------------------------------------------------------------------------


def equal_mass_lambda(n: int, dps: int = 50):
    """Eigenvalue on the rotation-stable plane of the regular n-gon (mpmath)."""
    if not isinstance(n, (int, np.integer)) or n < 3:
        raise InputError("equal_mass_lambda needs an integer n >= 3")
    with mpmath.workdps(dps):
        h = mpmath.pi / n
        # csc(pi j/n) is symmetric under j -> n - j; the middle term is 1 for even n
        half = mpmath.fsum(1 / mpmath.sinpi(mpmath.mpf(j) / n) for j in range(1, (n + 1) // 2))
        inv_sum = 2 * half + (1 if n % 2 == 0 else 0)
        lam = 2 - (2 * mpmath.sin(h) / (1 - mpmath.cos(h))) / inv_sum
        return +lam


def polygon_plane_vector(n: int) -> np.ndarray:
    k = np.arange(n)
    return np.concatenate([np.cos(4 * np.pi * k / n), np.sin(4 * np.pi * k / n)]).astype(complex)


def verify_polygon_eigenvector(n: int) -> float:
    """max(|W v - l v|, |J^-1 W J v - l v|) / |v| for the regular n-gon."""
    if n < 3:
        raise InputError("need n >= 3")
    d = regular_ngon(n)
    w = build_w(d).entries
    v = polygon_plane_vector(n)
    lam = complex(equal_mass_lambda(n))
    return max(witness_residuals(w, v, lam))


def cot_half_identity_gap(n: int, dps: int = 50):
    """|sin(pi/n)/(1 - cos(pi/n)) - sum_j sin(pi j/n)| in high precision."""
    with mpmath.workdps(dps):
        h = mpmath.pi / n
        lhs = mpmath.sin(h) / (1 - mpmath.cos(h))
        rhs = mpmath.fsum(mpmath.sin(mpmath.pi * j / n) for j in range(1, n))
        return abs(lhs - rhs)
