"""Lowest eigenpairs of symmetric Hamiltonians.

:func:`lowest_eigenpairs` is a thick-restart Lanczos iteration with full
reorthogonalization and a seeded start vector. :func:`dense_spectrum` is
the dense oracle for small problems.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp

from .errors import DomainError, IterationError, ResourceError

DENSE_LIMIT = 2000


@dataclass
class SpectrumResult:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns
    residuals: np.ndarray
    meta: dict = field(default_factory=dict)
    n_matvec: int = 0

    def __len__(self):
        return int(self.eigenvalues.size)

    @property
    def ground_energy(self):
        return float(self.eigenvalues[0])

    @property
    def ground_state(self):
        return self.eigenvectors[:, 0]


def _operator(h):
    """Return ``(matvec, dim, meta)`` for a Hamiltonian-like object."""
    if hasattr(h, "matrix") and hasattr(h, "h0"):
        m = h.matrix
        return m.dot, m.shape[0], dict(h.meta)
    if sp.issparse(h) or isinstance(h, np.ndarray):
        return h.dot, h.shape[0], {}
    raise DomainError(f"cannot diagonalize object of type {type(h).__name__}")


def _as_dense(h):
    if hasattr(h, "matrix") and hasattr(h, "h0"):
        return h.matrix.toarray(), dict(h.meta)
    if sp.issparse(h):
        return h.toarray(), {}
    return np.asarray(h, dtype=float), {}


def lowest_eigenpairs(h, k=4, tol=1e-8, max_iter=5000, seed=0, ncv=None):
    """``k`` smallest eigenpairs of a symmetric operator.

    Parameters
    ----------
    h : SparseHamiltonian, sparse matrix or ndarray
    k : int
        Number of eigenpairs.
    tol : float
        Required residual norm ``||H v - E v||`` per pair.
    max_iter : int
        Budget of operator applications.
    seed : int
        Seed of the random start vector; results are deterministic for a
        fixed seed.
    ncv : int, optional
        Krylov basis size before restart; default ``max(2k + 20, 40)``.

    Raises
    ------
    IterationError
        When ``max_iter`` applications do not converge all ``k`` pairs;
        ``exc.residuals`` has the best residuals reached.
    """
    mv, n, meta = _operator(h)
    if k < 1:
        raise DomainError("k must be >= 1")
    if k > n:
        raise DomainError(f"k={k} exceeds the dimension {n}")
    if n <= max(2 * k + 2, 24):
        # a Krylov space this size is the whole space
        res = dense_spectrum(h)
        return SpectrumResult(
            res.eigenvalues[:k], res.eigenvectors[:, :k], res.residuals[:k], meta, 0
        )
    m = min(n, ncv or max(2 * k + 20, 40))
    keep = min(m - 2, k + max(k, 8))
    rng = np.random.default_rng(seed)
    Q = np.empty((n, m))
    HQ = np.empty((n, m))
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    j = 0
    n_mv = 0
    best = None
    while True:
        while j < m:
            Q[:, j] = v
            w = mv(v)
            n_mv += 1
            HQ[:, j] = w
            j += 1
            # two passes of classical Gram-Schmidt keep Q orthonormal to rounding
            w = w - Q[:, :j] @ (Q[:, :j].T @ w)
            w -= Q[:, :j] @ (Q[:, :j].T @ w)
            beta = np.linalg.norm(w)
            if beta < 1e-12 * max(1.0, abs(Q[:, j - 1] @ HQ[:, j - 1])):
                # invariant subspace; continue with a fresh random direction
                w = rng.standard_normal(n)
                w -= Q[:, :j] @ (Q[:, :j].T @ w)
                w -= Q[:, :j] @ (Q[:, :j].T @ w)
                beta = np.linalg.norm(w)
            v = w / beta
            if j >= n:
                break
        T = Q[:, :j].T @ HQ[:, :j]
        T = 0.5 * (T + T.T)
        theta, Y = la.eigh(T)
        X = Q[:, :j] @ Y[:, :k]
        R = HQ[:, :j] @ Y[:, :k] - X * theta[:k]
        resid = np.linalg.norm(R, axis=0)
        best = resid if best is None else np.minimum(best, resid)
        if np.all(resid < tol) or j >= n:
            # fix sign: largest component positive, for reproducible vectors
            idx = np.argmax(np.abs(X), axis=0)
            X = X * np.sign(X[idx, np.arange(k)])
            return SpectrumResult(theta[:k].copy(), X, resid, meta, n_mv)
        if n_mv >= max_iter:
            raise IterationError(
                f"Lanczos did not converge in {n_mv} applications (max residual {resid.max():.2e})",
                residuals=best,
            )
        # thick restart: keep the leading Ritz vectors plus the current residual direction
        Q[:, :keep] = Q[:, :j] @ Y[:, :keep]
        HQ[:, :keep] = HQ[:, :j] @ Y[:, :keep]
        j = keep
        v = v - Q[:, :j] @ (Q[:, :j].T @ v)
        v /= np.linalg.norm(v)


def dense_spectrum(h, limit=DENSE_LIMIT):
    """Full spectrum by dense symmetric diagonalization."""
    a, meta = _as_dense(h)
    n = a.shape[0]
    if n > limit:
        raise ResourceError(f"dense diagonalization limited to dimension {limit}, got {n}")
    a = 0.5 * (a + a.T)
    w, v = la.eigh(a)
    resid = np.linalg.norm(a @ v - v * w, axis=0)
    return SpectrumResult(w, v, resid, meta, 0)


def solve_blocks(n_a, tensor, g, e_cut=None, n_max_a=None, n_max_b=None, k=2, blocks=("even", "odd"),
                 tol=1e-8, seed=0):
    """Lowest ``k`` levels in each parity block; returns ``{block: (space, SpectrumResult)}``."""
    from .fockspace import assemble_hamiltonian, enumerate_space

    out = {}
    for b in blocks:
        space = enumerate_space(n_a, n_max_a, n_max_b, e_cut, b)
        h = assemble_hamiltonian(space, tensor, g)
        kk = min(k, space.dim)
        res = lowest_eigenpairs(h, k=kk, tol=tol, seed=seed)
        res.meta.update(block=b)
        out[b] = (space, res)
    return out
