import numpy as np
import pytest
import scipy.sparse as sp

from impurity1d.ed import EDProblem
from impurity1d.eigensolver import dense_spectrum, lowest_eigenpairs, solve_blocks
from impurity1d.errors import DomainError, IterationError, ResourceError
from impurity1d.hobasis import SPBasis, build_interaction_tensor

import oracles


def _random_sparse(n, density, seed):
    rng = np.random.default_rng(seed)
    a = sp.random(n, n, density=density, random_state=rng, data_rvs=rng.standard_normal)
    return (a + a.T + sp.diags(rng.uniform(0, 5, n))).tocsr()


def test_dense_trivial_examples():
    np.testing.assert_allclose(dense_spectrum(np.diag([3.0, 1.0, 2.0])).eigenvalues, [1, 2, 3])
    a, b = 0.7, -0.3
    np.testing.assert_allclose(dense_spectrum(np.array([[a, b], [b, a]])).eigenvalues, [a - abs(b), a + abs(b)])


def test_dense_guard():
    with pytest.raises(ResourceError):
        dense_spectrum(sp.identity(2001, format="csr"))


@pytest.mark.parametrize("n,k,seed", [(120, 4, 0), (350, 3, 1), (500, 6, 2)])
def test_lanczos_matches_dense(n, k, seed):
    h = _random_sparse(n, 0.05, seed)
    res = lowest_eigenpairs(h, k=k, tol=1e-10, seed=seed)
    ref = dense_spectrum(h)
    np.testing.assert_allclose(res.eigenvalues, ref.eigenvalues[:k], atol=1e-10)
    assert np.all(np.diff(res.eigenvalues) >= 0)
    assert np.all(res.residuals < 1e-10)
    gram = res.eigenvectors.T @ res.eigenvectors
    np.testing.assert_allclose(gram, np.eye(k), atol=1e-10)


def test_deterministic_for_seed():
    h = _random_sparse(300, 0.05, 5)
    a = lowest_eigenpairs(h, k=3, seed=11)
    b = lowest_eigenpairs(h, k=3, seed=11)
    assert np.array_equal(a.eigenvalues, b.eigenvalues)
    assert np.array_equal(a.eigenvectors, b.eigenvectors)


def test_iteration_budget():
    h = _random_sparse(400, 0.05, 3)
    with pytest.raises(IterationError) as info:
        lowest_eigenpairs(h, k=4, tol=1e-14, max_iter=45)
    assert info.value.residuals is not None


def test_bad_k():
    with pytest.raises(DomainError):
        lowest_eigenpairs(np.eye(5), k=0)
    with pytest.raises(DomainError):
        lowest_eigenpairs(np.eye(5), k=6)


def test_sparse_dense_agree_on_physical_hamiltonian():
    prob = EDProblem.with_excess(2, 12, 1.8, block="even")
    h = prob.hamiltonian(6.0)
    assert h.dim <= 2000
    res = lowest_eigenpairs(h, k=4, tol=1e-10)
    np.testing.assert_allclose(res.eigenvalues, dense_spectrum(h).eigenvalues[:4], atol=1e-9)


@pytest.mark.parametrize("n_a", [2, 3])
def test_non_interacting_levels(n_a):
    sol = EDProblem.with_excess(n_a, 3, 1.0, block=None).solve(0.0, k=2, tol=1e-12)
    assert sol.energies[0] == pytest.approx((n_a + 1) / 2, abs=1e-10)
    assert sol.energies[1] / (n_a + 1) == pytest.approx((n_a / 2 + 1.5) / (n_a + 1), abs=1e-10)


def test_two_body_oracle_small_coupling():
    # variational at every rung, and the extrapolated ladder lands on the oracle
    from impurity1d.ed import converge

    ref = oracles.two_body_relative_energy(0.5) + 0.5
    rep = converge(1, 0.5, 1.0, [40, 50, 60])
    assert min(rep.energies) >= ref
    assert rep.extrapolated == pytest.approx(ref, abs=1e-3)


def test_solve_blocks_returns_both_sectors():
    t = build_interaction_tensor(SPBasis("A", 9), SPBasis("B", 9))
    out = solve_blocks(2, t, 5.0, e_cut=9.5, k=2)
    assert set(out) == {"even", "odd"}
    for block, (space, res) in out.items():
        assert res.meta["block"] == block
        assert len(res) == 2


def test_gap_shrinks_with_coupling():
    gaps = []
    for g in (1.0, 5.0, 10.0, 20.0):
        e = [EDProblem.with_excess(2, 40, 1.0, block=b).solve(g, k=1).ground_energy
             for b in ("even", "odd")]
        gaps.append(abs(e[1] - e[0]))
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
