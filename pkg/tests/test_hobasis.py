import math

import numpy as np
import pytest
from numpy.polynomial.hermite import hermgauss
from scipy.integrate import trapezoid

from impurity1d.errors import ConfigurationError, DomainError
from impurity1d.hobasis import (
    InteractionTensor,
    SPBasis,
    build_interaction_tensor,
    hermite_functions,
    ho_wavefunction,
)

import oracles


def test_ground_mode_at_origin():
    basis = SPBasis("A", 4)
    assert ho_wavefunction(0, 0.0, basis) == pytest.approx(math.pi**-0.25, abs=1e-15)
    assert ho_wavefunction(1, 0.0, basis) == 0.0


def test_impurity_scaling_at_origin():
    basis = SPBasis("B", 4, mass_ratio=4.0)
    assert ho_wavefunction(0, 0.0, basis) == pytest.approx(4**0.25 * math.pi**-0.25, rel=1e-14)
    assert ho_wavefunction(1, 0.0, basis) == 0.0
    y = np.linspace(-8, 8, 20001)
    assert trapezoid(ho_wavefunction(0, y, basis) ** 2, y) == pytest.approx(1.0, abs=1e-10)


def test_recurrence_matches_factorial_formula():
    x = np.linspace(-6, 6, 97)
    phi = hermite_functions(25, x)
    for n in range(25):
        np.testing.assert_allclose(phi[n], oracles.hermite_function_direct(n, x), atol=1e-12)


def test_high_order_is_finite_and_normalized():
    basis = SPBasis("A", 220)
    t, w = hermgauss(300)
    phi = basis.values(t)
    gram = (phi * (w * np.exp(t * t))) @ phi.T
    assert np.all(np.isfinite(phi))
    np.testing.assert_allclose(np.diag(gram), 1.0, atol=1e-10)


@pytest.mark.parametrize("species,m", [("A", 1.0), ("B", 1.0), ("B", 3.7), ("B", 0.4)])
def test_orthonormality_on_own_quadrature(species, m):
    basis = SPBasis(species, 30, mass_ratio=m)
    phi = basis.values(basis.quad_nodes)
    gram = (phi * basis.quad_weights) @ phi.T
    np.testing.assert_allclose(gram, np.eye(30), atol=1e-12)


def test_mode_index_out_of_range():
    basis = SPBasis("A", 3)
    with pytest.raises(DomainError):
        ho_wavefunction(3, 0.0, basis)
    with pytest.raises(DomainError):
        ho_wavefunction(-1, 0.0, basis)


def test_invalid_basis_parameters():
    with pytest.raises((DomainError, ConfigurationError)):
        SPBasis("B", 3, mass_ratio=0.0)
    with pytest.raises((DomainError, ConfigurationError)):
        SPBasis("A", 0)


def test_equal_mass_ground_element():
    t = build_interaction_tensor(SPBasis("A", 3), SPBasis("B", 3))
    assert t[0, 0, 0, 0] == pytest.approx(1.0 / math.sqrt(2.0 * math.pi), abs=1e-14)
    assert t[1, 0, 0, 0] == 0.0


def test_mass_imbalanced_ground_element_closed_form():
    # int pi^-1/2 e^{-z^2} 2 pi^-1/2 e^{-4 z^2} dz = 2 / sqrt(5 pi)
    t = build_interaction_tensor(SPBasis("A", 2), SPBasis("B", 2, 4.0))
    assert t[0, 0, 0, 0] == pytest.approx(2.0 / math.sqrt(5.0 * math.pi), rel=1e-13)


@pytest.mark.parametrize("m_ba", [1.0, 4.0, 0.6])
def test_tensor_matches_trapezoid_oracle(m_ba):
    n = 10
    t = build_interaction_tensor(SPBasis("A", n), SPBasis("B", n, m_ba)).dense()
    rng = np.random.default_rng(7)
    picks = [tuple(rng.integers(0, n, 4)) for _ in range(25)] + [(9, 9, 9, 9), (0, 9, 9, 0)]
    for idx in picks:
        assert t[idx] == pytest.approx(oracles.tensor_element_trapezoid(*idx, m_ba=m_ba), abs=1e-9)


def test_tensor_symmetry_and_parity():
    t = build_interaction_tensor(SPBasis("A", 7), SPBasis("B", 6, 2.3)).dense()
    assert np.array_equal(t, t.transpose(2, 1, 0, 3))
    assert np.array_equal(t, t.transpose(0, 3, 2, 1))
    assert np.array_equal(t, t.transpose(2, 3, 0, 1))
    idx = np.indices(t.shape).sum(axis=0)
    assert np.all(t[idx % 2 == 1] == 0.0)


def test_quadrature_too_small():
    with pytest.raises(ConfigurationError):
        InteractionTensor(SPBasis("A", 6), SPBasis("B", 6), n_quad=8)


def test_completeness_sum_rule_improves():
    # sum_m V[m,0,0,0] phi_m(z0) is the truncated expansion of phi_0^A |phi_0^B|^2 at z0
    z0 = 0.3
    errs = []
    for n in (4, 8, 16, 32):
        ba, bb = SPBasis("A", n), SPBasis("B", 1, 2.0)
        t = InteractionTensor(ba, bb)
        phi = ba.values(np.array([z0]))[:, 0]
        approx = sum(t[m, 0, 0, 0] * phi[m] for m in range(n))
        exact = phi[0] * bb.values(np.array([z0]))[0, 0] ** 2
        errs.append(abs(approx - exact))
    assert all(b < a for a, b in zip(errs, errs[1:]))
