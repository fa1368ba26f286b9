import cmath
import math
from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest

from nbody_galois import monodromy as mono
from nbody_galois.errors import ClearanceError, InconclusiveError, InputError
from nbody_galois.variational import VariationalEquation


@pytest.fixture(scope="module")
def eq_minus_one():
    return VariationalEquation.from_C(3, -1)


@pytest.fixture(scope="module")
def report_half():
    return mono.monodromy_generators(VariationalEquation.from_C(3, Fraction(1, 2)))


@pytest.fixture(scope="module")
def report_minus_one(eq_minus_one):
    return mono.monodromy_generators(eq_minus_one)


def test_contractible_loop_is_identity(eq_minus_one):
    base = mono.default_base_point(eq_minus_one)
    fm = mono.continue_solution(eq_minus_one, mono.contractible_loop(eq_minus_one, base))
    assert np.allclose(fm.entries, np.eye(2), atol=1e-10)


def test_loop_composition(eq_minus_one):
    base = mono.default_base_point(eq_minus_one)
    a = mono.loop_around(eq_minus_one, 0, base)
    b = mono.loop_around(eq_minus_one, 1, base)
    ma = mono.continue_solution(eq_minus_one, a).entries
    mb = mono.continue_solution(eq_minus_one, b).entries
    mab = mono.continue_solution(eq_minus_one, a.then(b)).entries
    # continuing along a then b composes as M_b M_a on column solutions
    assert np.allclose(mab, mb @ ma, atol=1e-9)


def test_reversed_loop_gives_inverse(eq_minus_one):
    base = mono.default_base_point(eq_minus_one)
    loop = mono.loop_around(eq_minus_one, 1, base)
    m = mono.continue_solution(eq_minus_one, loop).entries
    minv = mono.continue_solution(eq_minus_one, loop.reversed()).entries
    assert np.allclose(m @ minv, np.eye(2), atol=1e-9)


def test_homotopy_invariance(eq_minus_one):
    # two different heights over the same singularity give the same matrix
    base = mono.default_base_point(eq_minus_one)
    m1 = mono.continue_solution(eq_minus_one, mono.loop_around(eq_minus_one, 1, base, height=0.1)).entries
    m2 = mono.continue_solution(eq_minus_one, mono.loop_around(eq_minus_one, 1, base, height=0.4)).entries
    assert np.allclose(m1, m2, atol=1e-9)


def test_abel_identity(report_half):
    assert report_half.abel_deviation < 1e-9
    for g in report_half.generators:
        # det M = exp(2 pi i (sum of local exponents)) around each point
        assert abs(abs(np.linalg.det(g.entries)) - 1) < 1e-8


def test_local_exponents_match(report_half):
    bound = 10 * math.sqrt(report_half.estimated_error)
    for z, g in zip(report_half.points, report_half.generators):
        # a Jordan block makes the eigenvalues sensitive at the square root of the error
        limit = bound if mono.has_jordan_block(g.entries) else 1e-8
        assert report_half.local_exponent_match[z] < limit
    assert mono.has_jordan_block(report_half.generators[1].entries)     # t = 0, obstruction -1/12
    at_one = [g for z, g in zip(report_half.points, report_half.generators) if abs(z - 1) < 1e-12][0]
    ev = sorted(np.linalg.eigvals(at_one.entries), key=lambda z: z.real)
    assert abs(ev[0] + 1) < 1e-8 and abs(ev[1] - 1) < 1e-8


def test_product_relation(report_half, report_minus_one):
    assert report_half.product_relation_deviation < 1e-8
    assert report_minus_one.product_relation_deviation < 1e-8


def test_certificates(report_half, report_minus_one):
    assert report_minus_one.max_commutator_deviation <= 1e-8
    assert mono.abelianity_certificate(report_minus_one) is True
    assert report_half.max_commutator_deviation >= 0.1
    assert mono.abelianity_certificate(report_half) is False


def test_certificate_gap_is_inconclusive(report_minus_one):
    gap = replace(report_minus_one, max_commutator_deviation=5e-6)
    with pytest.raises(InconclusiveError):
        mono.abelianity_certificate(gap, threshold=1e-6)
    noisy = replace(report_minus_one, estimated_error=1e-3)
    with pytest.raises(InconclusiveError):
        mono.abelianity_certificate(noisy)


def test_clearance_error(eq_minus_one):
    path = mono.LoopPath.from_waypoints([0.5, 1.0 + 1e-5j, 1.5j])
    with pytest.raises(ClearanceError):
        mono.continue_solution(eq_minus_one, path)


def test_bad_base_point(eq_minus_one):
    with pytest.raises(InputError):
        mono.monodromy_generators(eq_minus_one, base_point=1.0)


def test_commutator_deviation_properties():
    a = np.array([[1, 1], [0, 1]], dtype=complex)
    b = np.array([[1, 0], [1, 1]], dtype=complex)
    assert mono.commutator_deviation(a, a) == 0
    assert mono.commutator_deviation(a, b) > 0.1
    assert mono.has_jordan_block(a)
    assert not mono.has_jordan_block(np.diag([1, -1]).astype(complex))


def test_local_exponent_deviation():
    m = np.diag([cmath.exp(2j * math.pi / 3), 1])
    assert mono.local_exponent_deviation(m, [Fraction(1, 3), 0]) < 1e-14


def test_generators_commute_for_rational_lambda_zero():
    rep = mono.monodromy_generators(VariationalEquation.from_C(3, 0))
    assert mono.abelianity_certificate(rep)


def test_report_json(report_half):
    js = report_half.to_json()
    assert set(js) >= {"generators", "max_commutator_deviation", "product_relation_deviation", "tolerances"}
