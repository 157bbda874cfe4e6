"""Harmonic-oscillator single-particle states and contact-interaction integrals.

Lengths are in units of the boson oscillator length and energies in units
of the trap quantum. The impurity (species ``"B"``) has mass ratio ``m_BA``
and the same trap frequency, so its modes are the boson modes squeezed by
``sqrt(m_BA)``::

    phi_B[n](y) = m_BA**0.25 * phi_A[n](sqrt(m_BA) * y)
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal

from .errors import ConfigurationError, DomainError

PI_QUARTER = np.pi ** -0.25


def hermite_functions(n_max, x):
    """Normalized Hermite functions ``phi_0 .. phi_{n_max-1}`` at ``x``.

    Uses the three-term recurrence on the normalized functions, which stays
    finite for mode indices in the hundreds where ``H_n / sqrt(2^n n!)``
    would overflow.

    Returns an array of shape ``(n_max,) + x.shape``.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max,) + x.shape)
    out[0] = PI_QUARTER * np.exp(-0.5 * x * x)
    if n_max > 1:
        out[1] = np.sqrt(2.0) * x * out[0]
    for n in range(1, n_max - 1):
        out[n + 1] = np.sqrt(2.0 / (n + 1)) * x * out[n] - np.sqrt(n / (n + 1)) * out[n - 1]
    return out


def gauss_hermite_plain(n):
    """Nodes and weights of the ``n``-point Gauss-Hermite rule for plain ``dz``.

    The rule integrates ``e^{-z^2} P(z)`` exactly for degree ``< 2n``; the
    weights returned already include the factor ``e^{z^2}``, so they apply
    to functions that carry their own Gaussian. Nodes come from the Jacobi
    matrix and the weights from the Christoffel sum
    ``1 / sum_k phi_k(z)^2``, both of which stay finite for rules with
    hundreds of nodes where the textbook weights underflow.
    """
    if n < 1:
        raise ConfigurationError("need at least one quadrature node")
    if n == 1:
        return np.zeros(1), np.array([np.sqrt(np.pi)])
    z = eigvalsh_tridiagonal(np.zeros(n), np.sqrt(np.arange(1, n) / 2.0))
    z = 0.5 * (z - z[::-1])
    w = 1.0 / np.sum(hermite_functions(n, z) ** 2, axis=0)
    return z, w


@dataclass(frozen=True)
class SPBasis:
    """Oscillator basis for one species.

    Parameters
    ----------
    species : {"A", "B"}
        ``"A"`` for the bosons, ``"B"`` for the impurity.
    n_max : int
        Number of single-particle modes kept.
    mass_ratio : float
        ``m_BA``; forced to 1 for species A.
    """

    species: str
    n_max: int
    mass_ratio: float = 1.0
    quad_nodes: np.ndarray = field(init=False, repr=False, compare=False)
    quad_weights: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.species not in ("A", "B"):
            raise ConfigurationError(f"species must be 'A' or 'B', got {self.species!r}")
        if self.n_max < 1:
            raise ConfigurationError("n_max must be >= 1")
        if not self.mass_ratio > 0:
            raise ConfigurationError("mass_ratio must be positive")
        if self.species == "A" and self.mass_ratio != 1.0:
            raise ConfigurationError("species A always has mass_ratio 1")
        # exact for any product of two modes (orthonormality checks)
        u, w = gauss_hermite_plain(2 * self.n_max + 1)
        s = np.sqrt(self.mass_ratio)
        object.__setattr__(self, "quad_nodes", u / s)
        object.__setattr__(self, "quad_weights", w / s)

    @property
    def scale(self):
        """Inverse oscillator length, ``sqrt(m_BA)``."""
        return np.sqrt(self.mass_ratio)

    def values(self, x, n_max=None):
        """All mode functions at ``x``; shape ``(n_max,) + x.shape``."""
        n = self.n_max if n_max is None else n_max
        s = self.scale
        return np.sqrt(s) * hermite_functions(n, s * np.asarray(x, dtype=float))

    def energy(self, n):
        return n + 0.5


def ho_wavefunction(n, x, basis):
    """Single mode ``phi_n(x)`` of ``basis``."""
    if not 0 <= n < basis.n_max:
        raise DomainError(f"mode index {n} outside [0, {basis.n_max})")
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError("x must be finite")
    return basis.values(x, n_max=n + 1)[n]


class InteractionTensor:
    """Overlap integrals ``V[m, n, p, q] = int phiA_m phiB_n phiA_p phiB_q dz``.

    The tensor is held in factorized form on a Gauss-Hermite grid that is
    exact for the polynomial degree involved, so that a block
    ``V[p, :, q, :]`` costs one small matrix product. Index as
    ``tensor[m, n, p, q]`` for single elements or call :meth:`block`.
    """

    def __init__(self, basis_a, basis_b, n_quad=None):
        if basis_a.species != "A" or basis_b.species != "B":
            raise ConfigurationError("expected (species A basis, species B basis)")
        needed = basis_a.n_max + basis_b.n_max - 1
        if n_quad is None:
            n_quad = needed + 1
        if n_quad < needed:
            raise ConfigurationError(
                f"quadrature with {n_quad} nodes cannot integrate the cutoff exactly (need {needed})"
            )
        self.basis_a = basis_a
        self.basis_b = basis_b
        self.n_quad = n_quad
        m = basis_b.mass_ratio
        u, w = gauss_hermite_plain(n_quad)
        s = np.sqrt(1.0 + m)
        # rescaling z = u / s matches the combined Gaussian e^{-(1+m) z^2}
        z = u / s
        weights = w / s
        self.nodes = z
        self.weights = weights
        self._a = basis_a.values(z)
        self._b = basis_b.values(z)
        self._cache = {}

    @property
    def n_max_a(self):
        return self.basis_a.n_max

    @property
    def n_max_b(self):
        return self.basis_b.n_max

    @property
    def shape(self):
        na, nb = self.n_max_a, self.n_max_b
        return (na, nb, na, nb)

    def block(self, p, q, cache=False):
        """Matrix ``V[p, :, q, :]`` over impurity modes (rows n, columns q_B).

        Symmetric in its two indices and in ``(p, q)`` exactly, since the
        node product ``a_p * a_q`` commutes.
        """
        key = (p, q) if p <= q else (q, p)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        wa = self.weights * (self._a[key[0]] * self._a[key[1]])
        blk = (self._b * wa) @ self._b.T
        blk = 0.5 * (blk + blk.T)
        # parity selection: odd total index sum vanishes identically
        nb = self.n_max_b
        par = (np.add.outer(np.arange(nb), np.arange(nb)) + p + q) % 2 == 1
        blk[par] = 0.0
        if cache:
            self._cache[key] = blk
        return blk

    def __getitem__(self, idx):
        m, n, p, q = idx
        if (m + n + p + q) % 2:
            return 0.0
        return float(self.block(m, p)[n, q])

    def dense(self):
        """Materialize the full four-index array (small cutoffs only)."""
        na, nb = self.n_max_a, self.n_max_b
        out = np.empty((na, nb, na, nb))
        for p in range(na):
            for q in range(p, na):
                blk = self.block(p, q)
                out[p, :, q, :] = blk
                out[q, :, p, :] = blk
        return out


def build_interaction_tensor(basis_a, basis_b, n_quad=None):
    """Contact-interaction integrals between boson and impurity modes."""
    return InteractionTensor(basis_a, basis_b, n_quad=n_quad)
