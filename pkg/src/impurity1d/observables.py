"""One-body density matrices, natural orbitals, entropy and density profiles."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid

from .errors import DomainError, NotFoundError

NORM_TOL = 1e-8
ENTROPY_CLAMP = 1e-14


@dataclass
class ObdmResult:
    """One-body density matrix of one species in the oscillator-mode basis.

    ``occupations`` are normalized to sum to one (divided by ``trace_raw``);
    ``natural_orbitals`` holds the matching eigenvectors as columns.
    """

    species: str
    mode_matrix: np.ndarray
    occupations: np.ndarray
    natural_orbitals: np.ndarray
    trace_raw: float

    @classmethod
    def from_matrix(cls, species, rho):
        rho = 0.5 * (rho + rho.T)
        trace = float(np.trace(rho))
        w, u = np.linalg.eigh(rho)
        order = np.argsort(w)[::-1]
        w, u = w[order], u[:, order]
        occ = np.clip(w / trace, 0.0, 1.0)
        return cls(species, rho, occ, u, trace)

    @property
    def lambda0(self):
        return float(self.occupations[0])

    @property
    def lambda1(self):
        return float(self.occupations[1]) if self.occupations.size > 1 else 0.0

    @property
    def purity(self):
        return float(np.sum(self.occupations**2))


@dataclass
class GridRendering:
    species: str
    grid: np.ndarray
    values: np.ndarray
    profile: np.ndarray
    trace_raw: float = 1.0
    units: str = "trap"

    def integral(self):
        return float(trapezoid(self.profile, self.grid))

    def rows(self):
        """``(x, x', value)`` triples in row-major order."""
        n = self.grid.size
        xi = np.repeat(self.grid, n)
        xj = np.tile(self.grid, n)
        return zip(xi, xj, self.values.ravel())


def _check_vector(space, v):
    v = np.asarray(v, dtype=float)
    if v.shape != (space.dim,):
        raise DomainError(f"vector length {v.shape} does not match dimension {space.dim}")
    nrm = np.linalg.norm(v)
    if abs(nrm - 1.0) > NORM_TOL:
        raise DomainError(f"state vector not normalized (norm {nrm:.3e})")
    return v


def obdm_B(space, v):
    """Impurity density matrix ``rho_mn = sum_S C[S, m] C[S, n]``."""
    c = space.coefficient_matrix(_check_vector(space, v))
    return ObdmResult.from_matrix("B", c.T @ c)


def obdm_A(space, v):
    """Boson density matrix ``rho_pq = <v| a_p^dagger a_q |v>`` (trace ``N_A``)."""
    c = space.coefficient_matrix(_check_vector(space, v))
    rho = np.zeros((space.n_max_a, space.n_max_a))
    for (p, q), (src, dst, amp) in space.one_body_moves.items():
        rho[p, q] += np.dot(amp, np.einsum("ij,ij->i", c[dst], c[src]))
    return ObdmResult.from_matrix("A", rho)


def entanglement_entropy(obdm):
    """Von Neumann entropy in bits of the normalized occupations."""
    lam = np.asarray(obdm.occupations if hasattr(obdm, "occupations") else obdm, dtype=float)
    lam = lam[lam > ENTROPY_CLAMP]
    return float(max(0.0, -np.sum(lam * np.log2(lam))))


def render_grid(obdm, basis, L=5.0, n_points=201, own_length=None):
    """Evaluate ``rho(x, x') = sum_mn rho_mn phi_m(x) phi_n(x')`` on a uniform grid.

    For the impurity the grid is by default in its own oscillator length
    ``1/sqrt(m_BA)``, so that ``L`` means the same number of widths for
    every mass ratio; values are then densities per unit of that length.
    """
    if n_points < 2:
        raise DomainError("n_points must be >= 2")
    if own_length is None:
        own_length = basis.species == "B"
    u = np.linspace(-L, L, n_points)
    n = obdm.mode_matrix.shape[0]
    if own_length:
        x = u / basis.scale
        phi = basis.values(x, n_max=n) / np.sqrt(basis.scale)
    else:
        phi = basis.values(u, n_max=n)
    values = phi.T @ obdm.mode_matrix @ phi
    values = 0.5 * (values + values.T)
    return GridRendering(
        obdm.species, u, values, np.diag(values).copy(), obdm.trace_raw, "own" if own_length else "trap"
    )


def local_maxima(profile, rel_height=1e-6):
    """Indices of strict interior local maxima above ``rel_height * max``."""
    p = np.asarray(profile)
    floor = rel_height * p.max()
    idx = np.nonzero((p[1:-1] > p[:-2]) & (p[1:-1] >= p[2:]) & (p[1:-1] > floor))[0] + 1
    return idx


def threshold_mass_scan(results, refine=True):
    """Mass ratio at which the impurity's largest occupation is smallest.

    Parameters
    ----------
    results : sequence of (m_BA, lambda0_B)
        At least three points with ascending ``m_BA``.
    refine : bool
        Replace the grid argmin with the vertex of the parabola through
        the three bracketing points.

    Raises
    ------
    NotFoundError
        If the minimum sits at either end of the scan.
    """
    pts = np.asarray(results, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 3:
        raise DomainError("need at least three (m_BA, lambda0) points")
    m, lam = pts[:, 0], pts[:, 1]
    if np.any(np.diff(m) <= 0):
        raise DomainError("m_BA must be strictly ascending")
    i = int(np.argmin(lam))
    if i == 0 or i == m.size - 1:
        raise NotFoundError("lambda0_B has no interior minimum on this scan")
    if not refine:
        return float(m[i])
    x, y = m[i - 1 : i + 2], lam[i - 1 : i + 2]
    a, b, _ = np.polyfit(x, y, 2)
    if a <= 0:
        return float(m[i])
    return float(np.clip(-b / (2 * a), x[0], x[2]))
