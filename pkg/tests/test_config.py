from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nbody_galois import config as cfg
from nbody_galois.exact import Poly, gcd
from nbody_galois.errors import ConvergenceError, InputError, SingularConfigurationError

mass_triples = st.tuples(*[st.floats(min_value=0.05, max_value=1.0)] * 3)


def _fd_gradient(masses, q, h=1e-6):
    g = np.zeros(q.size, dtype=complex)
    for k in range(q.size):
        e = np.zeros(q.size)
        e[k] = h
        g[k] = (cfg.potential_value(masses, q + e) - cfg.potential_value(masses, q - e)) / (2 * h)
    return g


def test_validate_masses_rejects_bad_input():
    with pytest.raises(InputError):
        cfg.validate_masses([1])
    with pytest.raises(InputError):
        cfg.validate_masses([1, -2, 3])
    with pytest.raises(InputError):
        cfg.validate_masses([1, 1j, 3])


def test_normalize_masses_exact_and_float():
    assert cfg.normalize_masses([1, 5, 1]) == (Fraction(1, 7), Fraction(5, 7), Fraction(1, 7))
    m = cfg.normalize_masses([0.2, 0.3, 0.5])
    assert sum(m) == 1


def test_gradient_matches_central_difference():
    rng = np.random.default_rng(1)
    masses = (0.3, 0.5, 0.2)
    q = rng.normal(size=6)
    assert np.allclose(cfg.potential_gradient(masses, q), _fd_gradient(masses, q), atol=1e-7)


def test_hessian_matches_gradient_difference():
    rng = np.random.default_rng(2)
    masses = (0.3, 0.5, 0.2, 0.7)
    q = rng.normal(size=8)
    hess = cfg.potential_hessian(masses, q)
    h = 1e-6
    for k in range(8):
        e = np.zeros(8)
        e[k] = h
        col = (cfg.potential_gradient(masses, q + e) - cfg.potential_gradient(masses, q - e)) / (2 * h)
        assert np.allclose(hess[:, k], col, atol=1e-6)


def test_collision_is_singular():
    with pytest.raises(SingularConfigurationError):
        cfg.potential_value((1, 1), np.array([0, 0, 0, 0.0]))


@settings(max_examples=25, deadline=None)
@given(mass_triples)
def test_lagrange_is_central_with_multiplier_minus_one(masses):
    d = cfg.lagrange_equilateral(masses)
    assert abs(complex(d.multiplier) + 1) < 1e-12
    acc = cfg.mass_scaled_acceleration(d.masses, d.config)
    assert np.max(np.abs(acc + d.config)) < 1e-10


def _bisect_real_root(masses):
    """Independent real root of the Euler quintic on (0, 10) by bisection."""
    m1, m2, m3 = masses
    def f(r):
        return ((m2 + m3) + (3 * m3 + 2 * m2) * r + (3 * m3 + m2) * r ** 2
                - (3 * m1 + m2) * r ** 3 - (3 * m1 + 2 * m2) * r ** 4 - (m1 + m2) * r ** 5)
    lo, hi = mpmath.mpf("1e-9"), mpmath.mpf(10)
    for _ in range(200):
        mid = (lo + hi) / 2
        if (f(lo) > 0) == (f(mid) > 0):
            lo = mid
        else:
            hi = mid
    return lo


def test_euler_real_root_against_bisection():
    masses = (Fraction(1, 7), Fraction(5, 7), Fraction(1, 7))
    _, pts = cfg.euler_collinear(masses)
    real = [d.meta["rho"].real for d in pts if abs(d.meta["rho"].imag) < 1e-12 and d.meta["rho"].real > 0]
    assert len(real) == 1
    assert abs(real[0] - float(_bisect_real_root(masses))) < 1e-12
    assert real[0] == pytest.approx(1.0)     # symmetric masses give the midpoint


def test_euler_quintic_contains_decoupling_quadratic_at_special_masses():
    masses = (Fraction(1, 7), Fraction(5, 7), Fraction(1, 7))
    quintic = cfg.euler_quintic(masses)
    g = gcd(quintic, Poly.from_rationals([2, 3, 2]))
    assert g.degree == 2


@settings(max_examples=20, deadline=None)
@given(mass_triples, st.booleans())
def test_collinear_points_are_central(masses, complex_order):
    _, pts = cfg.euler_collinear(masses, complex_order)
    assert pts
    for d in pts:
        assert d.residual < 1e-8
        assert abs(complex(d.multiplier) + 1) < 1e-9


def test_spurious_root_dropped_for_equal_masses():
    _, pts = cfg.euler_collinear((1, 1, 1), complex_order=True)
    rhos = [d.meta["rho"] for d in pts]
    assert all(abs(r - complex(-0.5, 0.8660254037844386)) > 1e-6 for r in rhos)


def test_regular_ngon_multiplier():
    for n in range(2, 9):
        d = cfg.regular_ngon(n)
        assert abs(complex(d.multiplier) + 1) < 1e-12
        assert d.residual < 1e-12


def test_newton_refine_recovers_perturbed_lagrange():
    d = cfg.lagrange_equilateral((0.2, 0.3, 0.5))
    rng = np.random.default_rng(3)
    guess = d.config + 1e-3 * rng.normal(size=6)
    r = cfg.newton_refine(d.masses, guess)
    assert r.residual < 1e-10
    assert abs(complex(r.multiplier) + 1) < 1e-10


def test_newton_refine_reports_failure():
    with pytest.raises((ConvergenceError, SingularConfigurationError)):
        cfg.newton_refine((1, 2, 3), np.array([0, 1, 3, 0, 0.5, 0.1]), max_iter=1)


def test_irrational_triple_masses_sum_to_one():
    with mpmath.workdps(40):
        m = cfg.irrational_triple_masses(40)
        assert abs(sum(m) - 1) < mpmath.mpf(10) ** -38
        assert all(v > 0 for v in m)


def test_conic_orbit_energy_conserved():
    t, phi, phidot = cfg.integrate_radial(1.0, -0.3, 1.0, 5.0)
    assert cfg.conic_energy_residual(1.0, -0.3, phi, phidot) < 1e-10
    with pytest.raises(InputError):
        cfg.integrate_radial(1.2, -0.3, 1.0, 5.0)


@settings(max_examples=30, deadline=None)
@given(st.floats(min_value=0.2, max_value=5), st.integers(min_value=0, max_value=10_000))
def test_level_scaling(alpha, seed):
    rng = np.random.default_rng(seed)
    masses = (0.2, 0.3, 0.5)
    q, p = rng.normal(size=6), rng.normal(size=6)
    q2, p2 = cfg.scale_phase_point(q, p, alpha)
    h, h2 = cfg.hamiltonian(masses, q, p), cfg.hamiltonian(masses, q2, p2)
    c, c2 = cfg.angular_momentum(q, p), cfg.angular_momentum(q2, p2)
    assert abs(h2 - alpha ** 2 * h) <= 1e-10 * max(1, abs(alpha ** 2 * h))
    # C^2 H is the scale-invariant level label
    assert abs(c2 ** 2 * h2 - c ** 2 * h) <= 1e-9 * max(1, abs(c ** 2 * h))
