import numpy as np
import pytest
import sympy

from nbody_galois.errors import InputError
from nbody_galois.potentials3d import (EXAMPLES, P_VARS, Q_VARS, _examples, dim3_example,
                                       hamiltonian, poisson_bracket)


@pytest.mark.parametrize("name,lam", [("V1", 2), ("V2", 2), ("FamilyA", -1), ("FamilyB", 0)])
def test_normal_eigenvalue(name, lam):
    rep = dim3_example(name, n_points=20)
    assert sympy.simplify(rep.lam - lam) == 0


@pytest.mark.parametrize("name", EXAMPLES)
def test_brackets_vanish_on_level(name):
    rep = dim3_example(name, n_points=100)
    assert max(rep.bracket_residuals) <= 1e-9


def test_family_brackets_vanish_symbolically():
    for name in ("FamilyA", "FamilyB"):
        assert all(dim3_example(name, n_points=5, symbolic=True).symbolic_zero)


def test_v1_integral_fails_off_level():
    # off C = 0 the V1 integral is not conserved
    v, (i1,), _ = _examples()["V1"]
    bracket = sympy.lambdify(Q_VARS + P_VARS, poisson_bracket(hamiltonian(v), i1), "numpy")
    rng = np.random.default_rng(0)
    vals = [abs(bracket(*rng.uniform(0.5, 1.5, 3), *rng.uniform(-1, 1, 3))) for _ in range(20)]
    assert max(vals) > 1e-3


def test_bracket_antisymmetry():
    x, y, z = Q_VARS
    f = x * P_VARS[1] - y * P_VARS[0]
    g = hamiltonian(1 / sympy.sqrt(x ** 2 + y ** 2 + z ** 2))
    assert sympy.simplify(poisson_bracket(f, g) + poisson_bracket(g, f)) == 0
    assert sympy.simplify(poisson_bracket(f, g)) == 0


def test_unknown_example():
    with pytest.raises(InputError):
        dim3_example("V9")
