"""Infinite-coupling reference state.

At ``1/g = 0`` the wave function must vanish whenever a boson meets the
impurity. The reference ansatz is

    Psi ~ exp(-(x_1^2 + ... + x_N^2 + y^2)/2) * |x_1 - y| ... |x_N - y|,

the member of the degenerate family that is even under boson-impurity
exchange. Because it is a product over bosons at fixed ``y``, both density
matrices reduce to one-dimensional integrals of the kernel

    K(y, y') = int exp(-x^2) |x - y| |x - y'| dx,

which is available in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.hermite import hermgauss
from numpy.polynomial.legendre import leggauss
from scipy.special import erf

from .errors import ConfigurationError, DomainError
from .observables import GridRendering, entanglement_entropy

SQRT_PI = math.sqrt(math.pi)
MAX_BOSONS = 4


def overlap_kernel(y1, y2):
    """``K(y1, y2) = int exp(-x^2) |x - y1| |x - y2| dx`` (broadcasting)."""
    y1, y2 = np.broadcast_arrays(np.asarray(y1, float), np.asarray(y2, float))
    lo = np.minimum(y1, y2)
    hi = np.maximum(y1, y2)
    elo, ehi = np.exp(-lo * lo), np.exp(-hi * hi)
    i0 = 0.5 * SQRT_PI * (erf(hi) - erf(lo))
    i1 = 0.5 * (elo - ehi)
    i2 = 0.5 * (lo * elo - hi * ehi) + 0.5 * i0
    # on [lo, hi] the product of moduli flips sign relative to (x-lo)(x-hi)
    between = i2 - (lo + hi) * i1 + lo * hi * i0
    return SQRT_PI * (0.5 + lo * hi) - 2.0 * between


def _second_moment(y):
    """``int exp(-x^2) (x - y)^2 dx``."""
    return SQRT_PI * (0.5 + np.asarray(y, float) ** 2)


@dataclass
class AnsatzState:
    """Normalized infinite-coupling ansatz for ``n_a`` bosons.

    ``L`` and ``n_quad`` set the Gauss-Legendre rule on ``[-L, L]`` used for
    natural-orbital occupations.
    """

    n_a: int
    L: float = 6.0
    n_quad: int = 60

    def __post_init__(self):
        if self.n_a < 1:
            raise ConfigurationError("N_A must be >= 1")
        u, w = hermgauss(self.n_a + 2)
        # int exp(-y^2) G(y)^N dy is polynomial times Gaussian: exact here
        self.norm = 1.0 / float(np.dot(w, _second_moment(u) ** self.n_a))

    def amplitude(self, xs, y):
        return ansatz_amplitude(self, xs, y)

    def rho_b(self, y1, y2):
        y1, y2 = np.broadcast_arrays(np.asarray(y1, float), np.asarray(y2, float))
        return self.norm * np.exp(-0.5 * (y1**2 + y2**2)) * overlap_kernel(y1, y2) ** self.n_a

    def rho_a(self, x1, x2, n_sub=48, y_max=8.0):
        """``N_A int dy exp(-y^2) |x1-y||x2-y| G(y)^(N_A-1)`` times the Gaussians.

        The integrand has kinks at ``y = x1`` and ``y = x2``; Gauss-Legendre is
        applied on each smooth piece.
        """
        x1, x2 = np.broadcast_arrays(np.asarray(x1, float), np.asarray(x2, float))
        lo = np.minimum(x1, x2)[..., None]
        hi = np.maximum(x1, x2)[..., None]
        t, w = leggauss(n_sub)
        total = np.zeros(x1.shape)
        for a, b in ((-y_max, lo), (lo, hi), (hi, y_max)):
            a = np.broadcast_to(a, lo.shape)
            b = np.broadcast_to(b, lo.shape)
            half = 0.5 * (b - a)
            yy = 0.5 * (b + a) + half * t
            f = (
                np.exp(-yy * yy)
                * np.abs(x1[..., None] - yy)
                * np.abs(x2[..., None] - yy)
                * _second_moment(yy) ** (self.n_a - 1)
            )
            total += np.sum(f * w, axis=-1) * half[..., 0]
        return self.n_a * self.norm * np.exp(-0.5 * (x1**2 + x2**2)) * total


def ansatz_amplitude(state, xs, y):
    """Normalized ansatz amplitude at boson positions ``xs`` and impurity ``y``."""
    xs = np.asarray(xs, dtype=float)
    if xs.shape[-1] != state.n_a:
        raise DomainError(f"expected {state.n_a} boson positions")
    y = np.asarray(y, dtype=float)
    gauss = np.exp(-0.5 * (np.sum(xs * xs, axis=-1) + y * y))
    return math.sqrt(state.norm) * gauss * np.prod(np.abs(xs - y[..., None]), axis=-1)


@dataclass
class AnsatzObdm:
    species: str
    rendering: GridRendering
    occupations: np.ndarray
    entropy: float

    @property
    def lambda0(self):
        return float(self.occupations[0])

    @property
    def lambda1(self):
        return float(self.occupations[1])


def _kernel(state, species, a, b):
    return state.rho_b(a, b) if species == "B" else state.rho_a(a, b)


def natural_occupations(state, species, n_quad=None):
    """Occupations from the Nystrom discretization of the density kernel.

    Normalized to sum to one (the boson kernel is divided by ``N_A``).
    """
    n = n_quad or state.n_quad
    t, w = leggauss(n)
    nodes = state.L * t
    weights = state.L * w
    k = _kernel(state, species, nodes[:, None], nodes[None, :])
    sw = np.sqrt(weights)
    m = sw[:, None] * k * sw[None, :]
    lam = np.linalg.eigvalsh(0.5 * (m + m.T))[::-1]
    trace = state.n_a if species == "A" else 1.0
    return np.clip(lam / trace, 0.0, 1.0)


def ansatz_obdm(state, species, grid=None, n_quad=None):
    """Density matrix of ``species`` on ``grid`` plus occupations and entropy.

    ``grid`` defaults to 201 uniform points on ``[-5, 5]``. The entropy is
    computed from the occupations for either species, but only the impurity
    value is the boson-impurity entanglement.
    """
    if species not in ("A", "B"):
        raise DomainError("species must be 'A' or 'B'")
    if state.n_a > MAX_BOSONS:
        raise ConfigurationError(f"ansatz reference limited to N_A <= {MAX_BOSONS}")
    grid = np.linspace(-5.0, 5.0, 201) if grid is None else np.asarray(grid, dtype=float)
    values = _kernel(state, species, grid[:, None], grid[None, :])
    values = 0.5 * (values + values.T)
    trace = float(state.n_a) if species == "A" else 1.0
    rendering = GridRendering(species, grid, values, np.diag(values).copy(), trace)
    occ = natural_occupations(state, species, n_quad)
    return AnsatzObdm(species, rendering, occ, entanglement_entropy(occ))
