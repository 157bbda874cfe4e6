"""Adiabatic (polaron) treatment for many bosons and one impurity.

The impurity coordinate ``y`` is treated as slow. For each ``y`` every boson
occupies the lowest state ``f(x|y)`` of the trap plus a contact barrier at
``x = y`` with energy ``eps(y)``. Keeping only the diagonal second-derivative
coupling, the impurity obeys

    -1/(2 m) phi'' + [m y^2/2 + N_A eps(y) + (N_A/2m) <(df/dy)^2>] phi = E phi

and ``E`` bounds the exact ground energy from above, since it is the energy
of the product trial state ``phi(y) prod_i f(x_i|y)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eig_banded, eigh_tridiagonal

from .errors import ConfigurationError, ContinuityError, ConvergenceError, DomainError


@dataclass(frozen=True)
class XGrid:
    """Uniform interior grid on ``(-L, L)`` with Dirichlet ends."""

    L: float = 8.0
    dx: float = 1.0 / 400.0

    @property
    def n(self):
        return int(round(2 * self.L / self.dx)) - 1

    @property
    def x(self):
        return -self.L + self.dx * np.arange(1, self.n + 1)

    def coarse(self):
        return XGrid(self.L, 2 * self.dx)


@dataclass
class DeltaBoundarySolution:
    """Lowest boson orbital next to an impurity fixed at ``y``."""

    y: float
    g: float
    eps: float
    f: np.ndarray
    grid: XGrid

    @property
    def x(self):
        return self.grid.x

    def norm(self):
        return float(np.sum(self.f**2) * self.grid.dx)

    def jump(self):
        """Derivative jump ``f'(y+) - f'(y-)`` and ``f(y)`` from one-sided stencils."""
        x, f, dx = self.grid.x, self.f, self.grid.dx
        j = int(np.argmin(np.abs(x - self.y)))
        right = (-3 * f[j] + 4 * f[j + 1] - f[j + 2]) / (2 * dx)
        left = (3 * f[j] - 4 * f[j - 1] + f[j - 2]) / (2 * dx)
        return right - left, f[j]


def _lowest(y, g, grid):
    x = grid.x
    dx = grid.dx
    diag = 1.0 / dx**2 + 0.5 * x * x
    off = np.full(x.size - 1, -0.5 / dx**2)
    s = (y - x[0]) / dx
    if math.isinf(g):
        # Dirichlet node: cut it out of the chain so f vanishes there exactly
        j = int(round(s))
        if j > 0:
            off[j - 1] = 0.0
        if j < off.size:
            off[j] = 0.0
    elif g != 0:
        # contact weight shared linearly between the two bracketing nodes
        j = int(np.floor(s))
        t = s - j
        if j >= 0:
            diag[j] += g * (1.0 - t) / dx
        if t > 0 and j + 1 < x.size:
            diag[j + 1] += g * t / dx
    w, v = eigh_tridiagonal(diag, off, select="i", select_range=(0, 0))
    f = _fix_sign(v[:, 0] / math.sqrt(dx), x, y)
    return float(w[0]), f


def _fix_sign(f, x, y):
    """Make ``f`` positive three oscillator lengths left of the impurity.

    Falls back to the largest component left of ``y`` (the hard-core orbital
    changes sign at ``y``) and finally to the total mass when the reference
    point leaves the grid.
    """
    scale = np.abs(f).max()
    j = int(np.argmin(np.abs(x - (y - 3.0))))
    if x[0] <= y - 3.0 and abs(f[j]) > 1e-8 * scale:
        ref = f[j]
    else:
        left = f[x < y]
        ref = left[np.argmax(np.abs(left))] if left.size and np.abs(left).max() > 1e-8 * scale else f.sum()
    return -f if ref < 0 else f


def solve_delta_sp(y, g, grid=None, extrapolate=True):
    """Lowest eigenpair of ``h0 + g delta(x - y)`` by finite differences.

    ``g = math.inf`` selects the hard-core branch (node at ``y``). With
    ``extrapolate`` the eigenvalue is Richardson-corrected with a grid of
    twice the spacing, removing the leading ``dx**2`` error.
    """
    grid = grid or XGrid()
    if not -grid.L + 2 * grid.dx < y < grid.L - 2 * grid.dx:
        raise DomainError(f"impurity position {y} outside the grid")
    if g < 0:
        raise DomainError("g must be non-negative")
    eps, f = _lowest(y, g, grid)
    if extrapolate:
        eps2, _ = _lowest(y, g, grid.coarse())
        eps = (4.0 * eps - eps2) / 3.0
    return DeltaBoundarySolution(float(y), float(g), eps, f, grid)


def _aligned_pair(y, g, grid, h):
    """Orbitals at ``y -+ h``, each sign-aligned to the orbital at ``y``."""
    f0 = _lowest(y, g, grid)[1]
    lo = _lowest(y - h, g, grid)[1]
    hi = _lowest(y + h, g, grid)[1]
    if np.dot(lo, f0) < 0:
        lo = -lo
    if np.dot(hi, f0) < 0:
        hi = -hi
    return lo, hi, float(np.dot(lo, hi) * grid.dx)


def q11(y, g, grid=None, h_y=0.0125, n_a=1, min_overlap=0.5, max_halvings=4):
    """Diagonal adiabatic correction ``-(N_A/2) int (df/dy)^2 dx``.

    The derivative is a central difference in ``y`` between orbitals whose
    signs are aligned with ``f(x|y)``. When the aligned orbitals at
    ``y +- h_y`` overlap less than ``min_overlap`` the step is halved (near
    the trap centre a strong barrier makes the orbital jump sides quickly);
    if that does not help, :class:`ContinuityError` is raised.
    """
    grid = grid or XGrid()
    if not (-grid.L < y - h_y and y + h_y < grid.L):
        raise DomainError("y +- h_y must lie inside the grid")
    if g == 0:
        return 0.0
    h = h_y
    overlap = float("nan")
    for _ in range(max_halvings + 1):
        if math.isinf(g) and h < grid.dx:
            # the hard-core node only moves in whole grid steps
            break
        lo, hi, overlap = _aligned_pair(y, g, grid, h)
        if overlap >= min_overlap:
            df = (hi - lo) / (2.0 * h)
            return -0.5 * n_a * float(np.sum(df * df) * grid.dx)
        h *= 0.5
    raise ContinuityError(f"orbitals at y={y} do not connect continuously (overlap {overlap:.3f})")


def p11(y, g, grid=None, h_y=0.0125):
    """First-order diagonal coupling ``int f df/dy dx``.

    ``f`` is taken at the midpoint of the difference stencil, i.e. the
    average of the two aligned orbitals, which keeps the estimate second
    order in ``h_y`` and consistent with the normalization of ``f``.
    """
    grid = grid or XGrid()
    if g == 0:
        return 0.0
    lo, hi, _ = _aligned_pair(y, g, grid, h_y)
    mid = 0.5 * (lo + hi)
    return float(np.dot(mid, (hi - lo) / (2.0 * h_y)) * grid.dx)


@dataclass
class AdiabaticPotential:
    """Tabulated adiabatic potential and the impurity's ground solution.

    ``w`` is the full effective potential
    ``m y^2/2 + N_A eps(y) - Q11(y)/m`` (``q11`` already carries ``N_A``).
    """

    n_a: int
    g: float
    m_ba: float
    y: np.ndarray
    eps: np.ndarray
    q11: np.ndarray
    w: np.ndarray
    phi: np.ndarray
    energy: float
    coarse_energy: float = float("nan")
    meta: dict = field(default_factory=dict)

    @property
    def dy(self):
        return float(self.y[1] - self.y[0])

    @property
    def density(self):
        return self.phi**2

    def rows(self):
        """CSV rows ``(y, eps, q11, W, phi)``."""
        return list(zip(self.y, self.eps, self.q11, self.w, self.phi))


def tabulate(g, y_grid, grid=None, h_y=None):
    """``eps(y)`` and per-boson ``Q11(y)`` on ``y_grid``."""
    grid = grid or XGrid()
    y_grid = np.asarray(y_grid, dtype=float)
    if h_y is None:
        h_y = 0.5 * (y_grid[1] - y_grid[0])
    eps = np.array([solve_delta_sp(y, g, grid).eps for y in y_grid])
    q = np.array([q11(y, g, grid, h_y=h_y, n_a=1) for y in y_grid])
    return eps, q


def _lowest_fd4(potential, mass, dy):
    """Lowest eigenpair of ``-1/(2 mass) d2 + V`` with a five-point Laplacian."""
    n = potential.size
    c = 1.0 / (2.0 * mass * 12.0 * dy * dy)
    # upper banded storage: rows are superdiagonals 2, 1, 0
    ab = np.zeros((3, n))
    ab[2] = 30.0 * c + potential
    ab[1, 1:] = -16.0 * c
    ab[0, 2:] = 1.0 * c
    w, v = eig_banded(ab, lower=False, select="i", select_range=(0, 0))
    phi = v[:, 0] / math.sqrt(dy)
    if phi.sum() < 0:
        phi = -phi
    return float(w[0]), phi


def solve_effective(n_a, g, m_ba, y_grid=None, grid=None, tables=None, tol=1e-3, check=True):
    """Solve the single-channel impurity equation.

    Parameters
    ----------
    y_grid : array, optional
        Uniform impurity grid; default 481 points on ``[-6, 6]``.
    tables : (eps, q11_per_boson), optional
        Precomputed output of :func:`tabulate` on ``y_grid``; these depend
        on ``g`` only, so a mass-ratio sweep can reuse them.
    tol : float
        Allowed energy shift when the y-grid spacing is doubled.
    """
    if n_a < 1 or m_ba <= 0 or g < 0 or math.isinf(g):
        raise ConfigurationError("need N_A >= 1, m_BA > 0 and finite g >= 0")
    y = np.linspace(-6.0, 6.0, 481) if y_grid is None else np.asarray(y_grid, dtype=float)
    if tables is None:
        tables = tabulate(g, y, grid)
    eps, q1 = tables
    q = n_a * np.asarray(q1)
    w = 0.5 * m_ba * y * y + n_a * np.asarray(eps) - q / m_ba
    dy = float(y[1] - y[0])
    energy, phi = _lowest_fd4(w, m_ba, dy)
    coarse = float("nan")
    if check:
        coarse, _ = _lowest_fd4(w[::2], m_ba, 2 * dy)
        if abs(coarse - energy) > tol:
            raise ConvergenceError(
                f"y-grid not converged: E={energy:.6f} vs coarse {coarse:.6f}"
            )
    return AdiabaticPotential(
        n_a, float(g), float(m_ba), y, np.asarray(eps), q, w, phi, energy, coarse,
        meta={"dy": dy, "n_y": int(y.size)},
    )


@dataclass
class ValidityReport:
    valid: bool
    barrier: float
    central_weight: float
    message: str


def validity_check(n_a, g, m_ba, potential=None, barrier_limit=1.0, weight_limit=0.1):
    """Flag configurations where the central ``-Q11/m`` wall matters.

    The single-channel equation overestimates the energy when the impurity
    sits on the wall that forms at ``y = 0`` for strong coupling. The report
    is invalid when the wall exceeds ``barrier_limit`` (trap quanta) while
    more than ``weight_limit`` of the impurity density lies in ``|y| < 0.5``.
    """
    pot = potential or solve_effective(n_a, g, m_ba, check=False)
    centre = int(np.argmin(np.abs(pot.y)))
    barrier = float(-pot.q11[centre] / pot.m_ba)
    inner = np.abs(pot.y) < 0.5
    weight = float(np.sum(pot.density[inner]) * pot.dy)
    bad = barrier > barrier_limit and weight > weight_limit
    if bad:
        msg = (
            f"impurity weight {weight:.2f} near the centre sees a wall of height "
            f"{barrier:.2f}; adiabatic energy is unreliable"
        )
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
    else:
        msg = "valid"
    return ValidityReport(not bad, barrier, weight, msg)
