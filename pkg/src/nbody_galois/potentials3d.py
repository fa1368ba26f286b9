"""Rotation-invariant potentials in three dimensions with extra first integrals.

These examples use ``H = |p|^2 / 2 + V``, the convention in which the
integrals below were found.  The rest of the package uses ``q'' = grad V``;
the normalized eigenvalue Hess V / (-multiplier) is the same for V and -V.

I1 is a first integral only on the level C = 0 of the vertical angular
momentum and I2 only on the energy level H = 0, so brackets are sampled on
those levels.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import sympy

from .errors import InputError

x, y, z, px, py, pz = sympy.symbols("x y z p_x p_y p_z")
Q_VARS = (x, y, z)
P_VARS = (px, py, pz)

_rho = sympy.sqrt(x ** 2 + y ** 2)


def _examples() -> dict:
    a, b = sympy.Integer(3), sympy.Integer(2)
    d = x ** 2 + y ** 2 - z ** 2
    radial = x * px + y * py
    # name -> (potential, integrals, level on which the integrals hold)
    return {
        "V1": (_rho / d, [radial * pz / _rho - z / d], "C=0"),
        "V2": ((x ** 2 + y ** 2 + z ** 2) / _rho ** 3,
               [d ** 2 * pz ** 2 - 4 * z * d * pz * radial + 4 * z ** 2 * radial ** 2], "H=0"),
        "FamilyA": (a / sympy.sqrt(x ** 2 + y ** 2 + z ** 2), [pz * x - px * z], "all"),
        "FamilyB": (b / _rho, [pz], "all"),
    }


EXAMPLES = tuple(_examples())


@dataclass(frozen=True)
class Dim3Report:
    name: str
    potential: str
    darboux: tuple
    multiplier: object
    hessian_eigenvalues: tuple
    lam: object
    integrals: tuple
    level: str
    bracket_residuals: tuple
    symbolic_zero: tuple
    meta: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "potential": self.potential,
                "darboux": [str(v) for v in self.darboux], "multiplier": str(self.multiplier),
                "hessian_eigenvalues": [str(v) for v in self.hessian_eigenvalues],
                "lambda": str(self.lam), "integrals": list(self.integrals), "level": self.level,
                "bracket_residuals": list(self.bracket_residuals),
                "symbolic_zero": list(self.symbolic_zero)}


def hamiltonian(v):
    return sum(p ** 2 for p in P_VARS) / 2 + v


def poisson_bracket(f, g):
    return sum(sympy.diff(f, q) * sympy.diff(g, p) - sympy.diff(f, p) * sympy.diff(g, q)
               for q, p in zip(Q_VARS, P_VARS))


def _reject_near_pole(q) -> bool:
    r2 = q[0] ** 2 + q[1] ** 2
    return r2 < 0.05 or abs(r2 - q[2] ** 2) < 0.05


def sample_phase_points(rng, count: int, level: str, v) -> np.ndarray:
    """Random (q, p) away from the poles, projected on the requested level.

    ``C=0``: the horizontal momentum is radial.  ``H=0``: p is a random
    direction rescaled (complex if needed) so that |p|^2 / 2 = -V.
    """
    fv = sympy.lambdify(Q_VARS, v, "numpy")
    pts = []
    while len(pts) < count:
        q = rng.uniform(-2, 2, 3)
        if _reject_near_pole(q):
            continue
        u = rng.uniform(-2, 2, 3)
        if level == "C=0":
            p = np.array([q[0] * u[0], q[1] * u[0], u[1]], dtype=complex)
        elif level == "H=0":
            p = u * np.sqrt(complex(-2 * fv(*q) / np.dot(u, u)))
        else:
            p = u.astype(complex)
        pts.append(np.concatenate([q.astype(complex), p]))
    return np.array(pts)


def dim3_example(which: str, n_points: int = 100, seed: int = 20240601,
                 symbolic: bool = False) -> Dim3Report:
    """Darboux point (1,0,0), normal eigenvalue and {H, I} residuals."""
    table = _examples()
    if which not in table:
        raise InputError(f"unknown example {which!r}; choose from {', '.join(table)}")
    v, integrals, level = table[which]
    point = {x: 1, y: 0, z: 0}
    grad = [sympy.simplify(sympy.diff(v, q).subs(point)) for q in Q_VARS]
    alpha = grad[0]
    if grad[1] != 0 or grad[2] != 0 or alpha == 0:
        raise InputError("(1,0,0) is not a nondegenerate Darboux point")
    hess = sympy.Matrix(3, 3, lambda i, j: sympy.simplify(sympy.diff(v, Q_VARS[i], Q_VARS[j]).subs(point)))
    normalized = hess / (-alpha)
    eigs = tuple(sorted(normalized.eigenvals(multiple=True), key=lambda e: float(sympy.re(e))))
    lam = sympy.simplify(normalized[2, 2])
    h = hamiltonian(v)
    rng = np.random.default_rng(seed)
    pts = sample_phase_points(rng, n_points, level, v)
    residuals, zeros = [], []
    for integral in integrals:
        bracket = poisson_bracket(h, integral)
        f = sympy.lambdify(Q_VARS + P_VARS, bracket, "numpy")
        vals = np.abs([f(*pt) for pt in pts])
        residuals.append(float(np.max(vals)))
        zeros.append(bool(sympy.simplify(bracket) == 0) if symbolic else None)
    return Dim3Report(which, str(v), (1, 0, 0), alpha, eigs, lam,
                      tuple(str(i) for i in integrals), level, tuple(residuals), tuple(zeros),
                      {"seed": seed, "n_points": n_points, "hamiltonian": "|p|^2/2 + V"})
