"""Planar n-body potential, accelerations and Darboux points.

Coordinates are stored as one vector of length 2n, all x coordinates first,
then all y coordinates.  Configurations may be complex; the mutual distance
is then ``branch_ij * sqrt(dx^2 + dy^2)`` with the principal square root and a
per-pair sign ``branch_ij`` (``None`` means all +1).

The equations of motion are ``m_i q''_i = dV/dq_i`` with
``V = sum_{i<j} m_i m_j / r_ij``, so real central configurations have negative
multipliers.  Arrays of mpmath numbers (dtype object) are accepted anywhere a
complex vector is, and the computation then runs at mpmath precision.
"""

from __future__ import annotations

import cmath
import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional, Sequence

import mpmath
import numpy as np
from scipy.integrate import solve_ivp

from .errors import (ConvergenceError, DegenerateDarbouxError, InputError,
                     SingularConfigurationError, TrajectorySingularError)
from .exact import MPoly, Poly, as_rational, mass_symbols

logger = logging.getLogger(__name__)

DARBOUX_TOL = 1e-12
SPURIOUS_ROOT_TOL = 1e-8


# ---------------------------------------------------------------------------
# Input handling
# ---------------------------------------------------------------------------


def validate_masses(masses) -> tuple:
    masses = tuple(masses)
    if len(masses) < 2:
        raise InputError("need at least two masses")
    for m in masses:
        try:
            positive = m > 0
        except TypeError as exc:
            raise InputError(f"mass {m!r} is not a real number") from exc
        if not positive:
            raise InputError(f"masses must be positive, got {m!r}")
    return masses


def normalize_masses(masses) -> tuple:
    """Rescale masses to sum 1, exactly when they are rational."""
    masses = validate_masses(masses)
    try:
        exact = tuple(as_rational(m) for m in masses)
    except InputError:
        total = sum(masses)
        return tuple(m / total for m in masses)
    total = sum(exact)
    return tuple(m / total for m in exact)


def _is_mp(arr) -> bool:
    return isinstance(arr, np.ndarray) and arr.dtype == object


def as_config(q, n: Optional[int] = None) -> np.ndarray:
    """Coerce a coordinate vector to a complex (or mpmath object) array."""
    if isinstance(q, np.ndarray) and q.dtype == object:
        arr = np.array([mpmath.mpc(v) for v in q], dtype=object)
    elif any(isinstance(v, (mpmath.mpf, mpmath.mpc)) for v in q):
        arr = np.array([mpmath.mpc(v) for v in q], dtype=object)
    else:
        arr = np.asarray(q, dtype=complex).copy()
    if arr.ndim != 1 or arr.size % 2:
        raise InputError("configuration must be a flat vector of length 2n")
    if n is not None and arr.size != 2 * n:
        raise InputError(f"configuration has {arr.size // 2} bodies, expected {n}")
    return arr


def _mass_array(masses, mp: bool) -> np.ndarray:
    if mp:
        return np.array([_to_mpf(m) for m in masses], dtype=object)
    return np.array([float(m) for m in masses], dtype=float)


def _to_mpf(m):
    if isinstance(m, (mpmath.mpf, float)):
        return mpmath.mpf(m)
    r = as_rational(m)
    return mpmath.mpf(r.numerator) / r.denominator


def _principal_sqrt(arr):
    if _is_mp(arr):
        return np.vectorize(mpmath.sqrt, otypes=[object])(arr)
    return np.sqrt(arr.astype(complex))


def _pair_geometry(q, branch=None):
    """dx, dy, squared distances and signed distances (diagonal set to 1)."""
    n = q.size // 2
    x, y = q[:n], q[n:]
    dx = x[:, None] - x[None, :]
    dy = y[:, None] - y[None, :]
    d2 = dx * dx + dy * dy
    off = ~np.eye(n, dtype=bool)
    mags = np.abs(d2.astype(complex)) if _is_mp(q) else np.abs(d2)
    if np.any(mags[off] == 0):
        raise SingularConfigurationError("two bodies have zero mutual distance")
    d2 = d2.copy()
    one = mpmath.mpc(1) if _is_mp(q) else 1.0
    d2[~off] = one
    r = _principal_sqrt(d2)
    if branch is not None:
        signs = np.asarray(branch)
        if signs.shape != (n, n):
            raise InputError("branch must be an n x n sign matrix")
        r = r * signs
        logger.debug("distance branch signs %s", signs.tolist())
    else:
        logger.debug("distance branch: principal")
    return dx, dy, d2, r, off


# ---------------------------------------------------------------------------
# Potential, gradient, Hessian
# ---------------------------------------------------------------------------


def potential_value(masses, q, branch=None):
    """V = sum_{i<j} m_i m_j / r_ij."""
    masses = validate_masses(masses)
    q = as_config(q, len(masses))
    m = _mass_array(masses, _is_mp(q))
    _, _, _, r, off = _pair_geometry(q, branch)
    pair = np.outer(m, m) / r
    return np.sum(np.where(np.triu(off), pair, 0))


def potential_gradient(masses, q, branch=None) -> np.ndarray:
    masses = validate_masses(masses)
    q = as_config(q, len(masses))
    m = _mass_array(masses, _is_mp(q))
    dx, dy, _, r, off = _pair_geometry(q, branch)
    k = np.where(off, np.outer(m, m) / r ** 3, 0)
    gx = -np.sum(k * dx, axis=1)
    gy = -np.sum(k * dy, axis=1)
    return np.concatenate([gx, gy])


def mass_scaled_acceleration(masses, q, branch=None) -> np.ndarray:
    """a_i = (1/m_i) dV/dq_i, same layout as q."""
    masses = validate_masses(masses)
    q = as_config(q, len(masses))
    m = _mass_array(masses, _is_mp(q))
    return potential_gradient(masses, q, branch) / np.concatenate([m, m])


def potential_hessian(masses, q, branch=None) -> np.ndarray:
    """Second derivatives of V, a 2n x 2n symmetric matrix."""
    masses = validate_masses(masses)
    q = as_config(q, len(masses))
    n = len(masses)
    m = _mass_array(masses, _is_mp(q))
    dx, dy, d2, r, off = _pair_geometry(q, branch)
    scale = np.where(off, np.outer(m, m) / r ** 5, 0)
    kxx = scale * (3 * dx * dx - d2)
    kxy = scale * (3 * dx * dy)
    kyy = scale * (3 * dy * dy - d2)

    def block(k):
        return np.diag(np.sum(k, axis=1)) - k

    h = np.empty((2 * n, 2 * n), dtype=q.dtype)
    h[:n, :n] = block(kxx)
    h[:n, n:] = block(kxy)
    h[n:, :n] = block(kxy)
    h[n:, n:] = block(kyy)
    return h


def mass_scaled_hessian(masses, q, branch=None) -> np.ndarray:
    """(1/m_i) d^2V/dq_i dq_j, the Jacobian of the mass-scaled acceleration."""
    masses = validate_masses(masses)
    q = as_config(q, len(masses))
    m = _mass_array(masses, _is_mp(q))
    mm = np.concatenate([m, m])
    return potential_hessian(masses, q, branch) / mm[:, None]


def config_norm2(masses, q, weighted: bool = True):
    """The bilinear "norm" sum q_i^2, mass-weighted by default."""
    q = as_config(q, len(masses))
    w = np.concatenate([_mass_array(masses, _is_mp(q))] * 2) if weighted else 1
    return np.sum(w * q * q)


# ---------------------------------------------------------------------------
# Darboux points
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DarbouxPoint:
    """A configuration with acceleration ``a(config) = multiplier * config``."""

    masses: tuple
    config: np.ndarray
    multiplier: complex
    residual: float
    branch: Optional[np.ndarray] = None
    label: str = ""
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def n(self) -> int:
        return len(self.masses)

    def to_json(self) -> dict:
        def enc(v):
            v = complex(v)
            return v.real if v.imag == 0 else [v.real, v.imag]
        n = self.n
        return {
            "n": n,
            "label": self.label,
            "masses": [str(m) if isinstance(m, Fraction) else float(m) for m in self.masses],
            "x": [enc(v) for v in self.config[:n]],
            "y": [enc(v) for v in self.config[n:]],
            "multiplier": enc(self.multiplier),
            "residual": float(self.residual),
            "branch": None if self.branch is None else np.asarray(self.branch).tolist(),
        }


def center_config(masses, q) -> np.ndarray:
    q = as_config(q, len(masses))
    n = len(masses)
    m = _mass_array(masses, _is_mp(q))
    total = np.sum(m)
    cx = np.sum(m * q[:n]) / total
    cy = np.sum(m * q[n:]) / total
    out = q.copy()
    out[:n] = q[:n] - cx
    out[n:] = q[n:] - cy
    return out


def estimate_multiplier(masses, q, branch=None):
    """Least-squares multiplier <a, q>_M / <q, q>_M with the bilinear product."""
    q = as_config(q, len(masses))
    a = mass_scaled_acceleration(masses, q, branch)
    w = np.concatenate([_mass_array(masses, _is_mp(q))] * 2)
    denom = np.sum(w * q * q)
    if abs(complex(denom)) == 0:
        denom = np.sum(w * np.conj(q) * q)
        return np.sum(w * np.conj(q) * a) / denom
    return np.sum(w * q * a) / denom


def darboux_point(masses, q, branch=None, label: str = "", meta=None) -> DarbouxPoint:
    """Wrap a configuration, measuring its multiplier and Darboux residual."""
    masses = validate_masses(masses)
    q = as_config(q, len(masses))
    alpha = estimate_multiplier(masses, q, branch)
    a = mass_scaled_acceleration(masses, q, branch)
    residual = max(abs(complex(v)) for v in (a - alpha * q))
    return DarbouxPoint(masses, q, alpha, float(residual),
                        None if branch is None else np.asarray(branch), label, meta or {})


def signed_branch(q, targets) -> np.ndarray:
    """Per-pair signs making the signed distance equal the target distances.

    ``targets`` is an n x n array (only the off-diagonal part is read) of the
    intended mutual distances, known up to rounding.
    """
    q = as_config(q)
    _, _, _, r, off = _pair_geometry(q)
    targets = np.asarray(targets)
    signs = np.ones(r.shape, dtype=int)
    for i, j in zip(*np.nonzero(off)):
        ratio = complex(targets[i, j]) / complex(r[i, j])
        signs[i, j] = 1 if ratio.real > 0 else -1
        if abs(abs(ratio) - 1) > 1e-6 or abs(ratio.imag) > 1e-6:
            raise InputError("target distance is not +/- the principal distance")
    return signs


def scale_config(d: DarbouxPoint, s) -> DarbouxPoint:
    """Configuration s*c, keeping each signed distance analytic (r -> s r)."""
    q = d.config * s
    if d.branch is None and complex(s).imag == 0 and complex(s).real > 0:
        branch = None
    else:
        _, _, _, r_old, _ = _pair_geometry(d.config, d.branch)
        branch = signed_branch(q, r_old * s)
        if np.all(branch == 1):
            branch = None
    return darboux_point(d.masses, q, branch, d.label, d.meta)


def normalize_multiplier(d: DarbouxPoint) -> DarbouxPoint:
    """Rescale so the multiplier is -1 (multiplier(s c) = s^-3 multiplier(c))."""
    alpha = d.multiplier
    if abs(complex(alpha)) == 0:
        raise DegenerateDarbouxError("multiplier is zero")
    if _is_mp(d.config):
        s = mpmath.cbrt(-mpmath.mpc(alpha))
    else:
        s = complex(-alpha) ** (1 / 3)
    out = scale_config(d, s)
    if _is_mp(out.config):
        a = mass_scaled_acceleration(out.masses, out.config, out.branch)
        residual = max(abs(complex(v)) for v in (a + out.config))
    else:
        a = mass_scaled_acceleration(out.masses, out.config, out.branch)
        residual = float(np.max(np.abs(a + out.config)))
    return replace(out, multiplier=-1.0 + 0j if not _is_mp(out.config) else mpmath.mpc(-1),
                   residual=residual, meta={**d.meta, "scale": complex(s)})


# ---------------------------------------------------------------------------
# Families of central configurations
# ---------------------------------------------------------------------------


def euler_quintic(masses=None, complex_order: bool = False) -> Poly:
    """Euler quintic in rho for bodies at (-1, 0, rho).

    Without masses the coefficients are MPoly in m1, m2, m3.  With
    ``complex_order`` the quintic of the signed-distance variant
    ``m1 m2/(q1-q2) - m1 m3/(q1-q3) + m2 m3/(q2-q3)`` is returned.
    """
    m1, m2, m3 = mass_symbols()
    if complex_order:
        coeffs = [m2 + m3, 3 * m3 + 2 * m2, -2 * m1 + 3 * m3 + m2,
                  -3 * m1 + 2 * m3 - m2, -3 * m1 - 2 * m2, -m1 - m2]
    else:
        coeffs = [m2 + m3, 3 * m3 + 2 * m2, 3 * m3 + m2,
                  -3 * m1 - m2, -3 * m1 - 2 * m2, -m1 - m2]
    if masses is None:
        return Poly(coeffs)
    masses = validate_masses(masses)
    if len(masses) != 3:
        raise InputError("the Euler quintic needs three masses")
    try:
        values = [as_rational(m) for m in masses]
    except InputError:
        values = list(masses)
    return Poly(c.evaluate(values) for c in coeffs)


def _collinear_targets(x, complex_order: bool):
    # signed distances continuing the real ordering x1 < x2 < x3
    r = np.zeros((3, 3), dtype=complex)
    r12, r13, r23 = x[1] - x[0], x[2] - x[0], x[2] - x[1]
    if complex_order:
        r12, r23 = -r12, -r23
    r[0, 1] = r[1, 0] = r12
    r[0, 2] = r[2, 0] = r13
    r[1, 2] = r[2, 1] = r23
    return r


def collinear_point(masses, rho, complex_order: bool = False, label: str = "") -> DarbouxPoint:
    """Normalized Darboux point for bodies at (-1, 0, rho) on the x axis."""
    masses = validate_masses(masses)
    mp = isinstance(rho, (mpmath.mpf, mpmath.mpc))
    x = [mpmath.mpc(-1), mpmath.mpc(0), mpmath.mpc(rho)] if mp else [-1.0 + 0j, 0j, complex(rho)]
    zero = mpmath.mpc(0) if mp else 0j
    q = as_config(x + [zero] * 3)
    q = center_config(masses, q)
    targets = _collinear_targets(np.array([complex(v) for v in x]), complex_order)
    branch = signed_branch(q, targets)
    if np.all(branch == 1):
        branch = None
    meta = {"rho": complex(rho), "complex_order": complex_order}
    d = darboux_point(masses, q, branch, label or "collinear", meta)
    return normalize_multiplier(d)


def _polish_root(poly_c, rho, steps: int = 4):
    dpoly = np.polyder(poly_c)
    for _ in range(steps):
        f = np.polyval(poly_c, rho)
        df = np.polyval(dpoly, rho)
        if df == 0:
            break
        rho = rho - f / df
    return rho


def euler_collinear(masses, complex_order: bool = False):
    """Euler quintic and one normalized Darboux point per admissible root.

    Roots whose configuration fails the central-configuration equations are
    dropped.
    """
    masses = validate_masses(masses)
    quintic = euler_quintic(masses, complex_order)
    desc = [complex(c) for c in reversed(quintic.coeffs)]
    points = []
    for k, rho in enumerate(sorted(np.roots(desc), key=lambda z: (round(z.real, 12), z.imag))):
        rho = _polish_root(desc, rho)
        if abs(rho) < 1e-9 or abs(rho + 1) < 1e-9:
            continue
        if abs(rho.imag) < 1e-12:
            rho = complex(rho.real, 0.0)
        kind = "complex-order" if complex_order else "collinear"
        d = collinear_point(masses, rho, complex_order, f"{kind}[{k}]")
        # clearing denominators can add roots that are not central (rho = exp(2 pi i/3))
        if d.residual > SPURIOUS_ROOT_TOL:
            logger.debug("dropping spurious quintic root %s (residual %.2e)", rho, d.residual)
            continue
        points.append(d)
    return quintic, points


def _as_target_matrix(r12, r13, r23):
    r = np.zeros((3, 3), dtype=complex)
    r[0, 1] = r[1, 0] = r12
    r[0, 2] = r[2, 0] = r13
    r[1, 2] = r[2, 1] = r23
    return r


def triangle_point(masses, r12=1, r13=1, r23=1, label: str = "", precision=None) -> DarbouxPoint:
    """Three bodies with prescribed (possibly complex) mutual distances.

    Central when r12^3 = r13^3 = r23^3; the real equilateral triangle and the
    complex Lagrange configurations are the cases of interest.
    """
    masses = validate_masses(masses)
    if len(masses) != 3:
        raise InputError("triangle_point needs three masses")
    if precision:
        with mpmath.workdps(precision):
            r12, r13, r23 = (mpmath.mpc(v) for v in (r12, r13, r23))
            xq = (r13 ** 2 - r23 ** 2 + r12 ** 2) / (2 * r12)
            yq = mpmath.sqrt(r13 ** 2 - xq ** 2)
            zero = mpmath.mpc(0)
            q = as_config([zero, r12, xq, zero, zero, yq])
    else:
        r12, r13, r23 = complex(r12), complex(r13), complex(r23)
        xq = (r13 ** 2 - r23 ** 2 + r12 ** 2) / (2 * r12)
        yq = cmath.sqrt(r13 ** 2 - xq ** 2)
        q = as_config([0, r12, xq, 0, 0, yq])
    q = center_config(masses, q)
    branch = signed_branch(q, _as_target_matrix(complex(r12), complex(r13), complex(r23)))
    if np.all(branch == 1):
        branch = None
    meta = {"distances": [complex(r12), complex(r13), complex(r23)]}
    d = darboux_point(masses, q, branch, label or "triangle", meta)
    return normalize_multiplier(d)


def lagrange_equilateral(masses) -> DarbouxPoint:
    return triangle_point(masses, 1, 1, 1, label="lagrange")


def irrational_triple_masses(precision: int = 40) -> tuple:
    """Normalized masses whose complex triangle (1, 1, j) has a Jordan block at 1/2."""
    with mpmath.workdps(precision):
        s21 = mpmath.sqrt(21)
        t = mpmath.sqrt(126 + 42 * s21)
        return (mpmath.mpf(1) / 4 + (s21 + t) / 84,
                mpmath.mpf(1) / 2 - s21 / 42,
                mpmath.mpf(1) / 4 + (s21 - t) / 84)


def irrational_triple_point(conjugate: bool = False, precision: int = 40) -> DarbouxPoint:
    """Complex triangle with r12 = r23 = 1 and r13 = j (or conj(j)).

    Both mirror images realize the same distances; the one returned is the
    orientation whose decoupled eigenvector reads (w, i w).
    """
    masses = irrational_triple_masses(precision)
    with mpmath.workdps(precision):
        j = mpmath.exp((-2 if conjugate else 2) * mpmath.pi * 1j / 3)
        d = triangle_point(masses, 1, j, 1, label="irrational-triple", precision=precision)
        if not conjugate:
            q = d.config.copy()
            q[3:] = -q[3:]
            d = replace(darboux_point(d.masses, q, d.branch, d.label, d.meta), multiplier=d.multiplier)
    return d


def regular_ngon(n: int, mass=1) -> DarbouxPoint:
    """Equal masses at the vertices of a regular n-gon, multiplier -1."""
    if n < 2:
        raise InputError("a regular polygon needs n >= 2")
    k = np.arange(n)
    q = np.concatenate([np.cos(2 * np.pi * k / n), np.sin(2 * np.pi * k / n)]).astype(complex)
    d = darboux_point((mass,) * n, q, label=f"{n}-gon")
    return normalize_multiplier(d)


# ---------------------------------------------------------------------------
# Newton refinement
# ---------------------------------------------------------------------------


def newton_refine(masses, guess, branch=None, tol: float = DARBOUX_TOL,
                  max_iter: int = 50) -> DarbouxPoint:
    """Solve a(c) + c = 0 from a nearby guess.

    The rotation symmetry is removed by freezing one coordinate of the body
    farthest from the centroid.  The guess is pre-scaled to multiplier -1.
    """
    masses = validate_masses(masses)
    n = len(masses)
    c = center_config(masses, np.asarray(guess, dtype=complex))
    alpha = estimate_multiplier(masses, c, branch)
    if abs(alpha) > 0 and abs(alpha + 1) > 1e-14:
        c = c * complex(-alpha) ** (1 / 3)
    iterations = 0
    for iterations in range(max_iter + 1):
        f = mass_scaled_acceleration(masses, c, branch) + c
        if np.max(np.abs(f)) <= tol:
            break
        if iterations == max_iter:
            raise ConvergenceError(f"no convergence after {max_iter} Newton steps "
                                   f"(residual {np.max(np.abs(f)):.3e})")
        jac = mass_scaled_hessian(masses, c, branch) + np.eye(2 * n)
        radii = np.abs(c[:n]) ** 2 + np.abs(c[n:]) ** 2
        far = int(np.argmax(radii))
        # rotation moves (x, y) along (-y, x): freeze the coordinate it moves least
        frozen = far if abs(c[n + far]) < abs(c[far]) else n + far
        keep = [k for k in range(2 * n) if k != frozen]
        sub = jac[:, keep]
        sv = np.linalg.svd(sub, compute_uv=False)
        if sv[-1] <= 1e-12 * sv[0]:
            raise ConvergenceError("singular Jacobian under gauge fixing")
        step = np.linalg.lstsq(sub, -f, rcond=None)[0]
        c = c.copy()
        c[keep] += step
    d = darboux_point(masses, c, branch, "newton", {"iterations": iterations})
    return d


# ---------------------------------------------------------------------------
# Conic orbits and the radial energy relation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConicOrbitParams:
    """Kepler conic phi = p / (1 + e cos theta) for multiplier -1."""

    C: complex
    H: complex

    @property
    def semi_latus(self) -> complex:
        return self.C ** 2

    @property
    def eccentricity(self) -> complex:
        return cmath.sqrt(1 + 2 * self.H * self.C ** 2)


def radial_energy(C, phi, phidot):
    return 0.5 * phidot ** 2 + C ** 2 / (2 * phi ** 2) - 1 / phi


def integrate_radial(C: float, H: float, phi0: float, t_end: float,
                     n_samples: int = 200, rtol: float = 1e-12, outward: bool = True):
    """Integrate phi'' = C^2/phi^3 - 1/phi^2 starting on the level (C, H)."""
    kinetic = 2 * (H - C ** 2 / (2 * phi0 ** 2) + 1 / phi0)
    if kinetic < -1e-14:
        raise InputError("initial radius is not reachable on this (C, H) level")
    v0 = np.sqrt(max(kinetic, 0.0)) * (1 if outward else -1)

    def rhs(_, y):
        return [y[1], C ** 2 / y[0] ** 3 - 1 / y[0] ** 2]

    def collision(_, y):
        return y[0] - 1e-9
    collision.terminal = True

    ts = np.linspace(0, t_end, n_samples)
    sol = solve_ivp(rhs, (0, t_end), [phi0, v0], method="DOP853", t_eval=ts,
                    rtol=rtol, atol=rtol * 1e-3, events=collision)
    if sol.status == 1:
        raise TrajectorySingularError("radial trajectory reached phi = 0")
    return sol.t, sol.y[0], sol.y[1]


def conic_energy_residual(C, H, phi, phidot) -> float:
    """max |phi'^2/2 + C^2/(2 phi^2) - 1/phi - H| over a sampled trajectory."""
    phi = np.asarray(phi)
    if np.any(np.abs(phi) == 0):
        raise TrajectorySingularError("sample contains phi = 0")
    return float(np.max(np.abs(radial_energy(C, phi, np.asarray(phidot)) - H)))


# ---------------------------------------------------------------------------
# Hamiltonian, angular momentum and the level scaling
# ---------------------------------------------------------------------------


def hamiltonian(masses, q, p, branch=None):
    """Kinetic energy sum |p_i|^2 / (2 m_i) minus V."""
    masses = validate_masses(masses)
    q = as_config(q, len(masses))
    p = np.asarray(p)
    m = np.concatenate([_mass_array(masses, False)] * 2)
    return np.sum(p * p / (2 * m)) - potential_value(masses, q, branch)


def angular_momentum(q, p):
    q = np.asarray(q)
    p = np.asarray(p)
    n = q.size // 2
    return np.sum(q[:n] * p[n:] - q[n:] * p[:n])


def scale_phase_point(q, p, alpha):
    """(p, q) -> (alpha p, alpha^-2 q); H scales by alpha^2 and C by 1/alpha."""
    return np.asarray(q) / alpha ** 2, np.asarray(p) * alpha


__all__ = [
    "ConicOrbitParams", "DarbouxPoint", "MPoly", "angular_momentum", "as_config",
    "center_config", "collinear_point", "config_norm2", "conic_energy_residual",
    "darboux_point", "estimate_multiplier", "euler_collinear", "euler_quintic",
    "hamiltonian", "integrate_radial", "irrational_triple_masses",
    "irrational_triple_point", "lagrange_equilateral", "mass_scaled_acceleration",
    "mass_scaled_hessian", "newton_refine", "normalize_masses", "normalize_multiplier",
    "potential_gradient", "potential_hessian", "potential_value", "regular_ngon",
    "scale_config", "scale_phase_point", "signed_branch", "triangle_point", "validate_masses",
]
