"""Exact-diagonalization driver: basis, interaction and solves for one setup.

An :class:`EDProblem` fixes ``(N_A, m_BA, truncation, parity block)`` and
assembles the interaction once; every coupling ``g`` is then a cheap
rescaling of the same sparse matrix.
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .eigensolver import lowest_eigenpairs
from .errors import ConfigurationError
from .fockspace import assemble_hamiltonian, enumerate_space, load_hamiltonian, save_hamiltonian
from .hobasis import SPBasis, build_interaction_tensor
from .observables import entanglement_entropy, obdm_A, obdm_B, render_grid


def e_cut_for(n_a, excess):
    """Absolute energy cutoff ``excess`` quanta above the non-interacting ground state."""
    return 0.5 * (n_a + 1) + excess


@dataclass
class EDProblem:
    n_a: int
    m_ba: float = 1.0
    e_cut: float | None = None
    n_max_a: int | None = None
    n_max_b: int | None = None
    block: str | int | None = "even"
    cache_dir: str | None = None

    @classmethod
    def with_excess(cls, n_a, excess, m_ba=1.0, block="even", cache_dir=None):
        return cls(n_a, m_ba, e_cut_for(n_a, excess), block=block, cache_dir=cache_dir)

    def cache_key(self):
        sp = self.space
        text = f"{self.n_a}|{float(self.m_ba)!r}|{self.e_cut!r}|{sp.n_max_a}|{sp.n_max_b}|{self.block}"
        return hashlib.sha256(text.encode()).hexdigest()[:20]

    @cached_property
    def space(self):
        return enumerate_space(self.n_a, self.n_max_a, self.n_max_b, self.e_cut, self.block)

    @cached_property
    def basis_a(self):
        return SPBasis("A", self.space.n_max_a)

    @cached_property
    def basis_b(self):
        return SPBasis("B", self.space.n_max_b, self.m_ba)

    @cached_property
    def _unit(self):
        path = None
        if self.cache_dir:
            path = os.path.join(self.cache_dir, f"ham_{self.cache_key()}.i1dh")
            if os.path.exists(path):
                h = load_hamiltonian(path)
                if h.dim == self.space.dim:
                    return h
        tensor = build_interaction_tensor(self.basis_a, self.basis_b)
        h = assemble_hamiltonian(self.space, tensor, 1.0, self.m_ba)
        if path:
            os.makedirs(self.cache_dir, exist_ok=True)
            save_hamiltonian(h, path)
        return h

    def hamiltonian(self, g):
        if g < 0:
            raise ConfigurationError("g must be non-negative")
        return self._unit.with_coupling(g)

    def solve(self, g, k=1, tol=1e-8, seed=0):
        k = min(k, self.space.dim)
        res = lowest_eigenpairs(self.hamiltonian(g), k=k, tol=tol, seed=seed)
        return PointSolution(self, float(g), res)


@dataclass
class PointSolution:
    problem: EDProblem
    g: float
    spectrum: object
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def energies(self):
        return self.spectrum.eigenvalues

    @property
    def ground_energy(self):
        return float(self.spectrum.eigenvalues[0])

    def obdm(self, species, level=0):
        key = (species, level)
        if key not in self._cache:
            v = self.spectrum.eigenvectors[:, level]
            v = v / np.linalg.norm(v)
            fn = obdm_B if species == "B" else obdm_A
            self._cache[key] = fn(self.problem.space, v)
        return self._cache[key]

    def entropy(self, level=0):
        return entanglement_entropy(self.obdm("B", level))

    def rendering(self, species, L=5.0, n_points=201, level=0):
        basis = self.problem.basis_b if species == "B" else self.problem.basis_a
        return render_grid(self.obdm(species, level), basis, L=L, n_points=n_points)

    def summary(self):
        a, b = self.obdm("A"), self.obdm("B")
        return {
            "S_bits": entanglement_entropy(b),
            "lambda0_B": b.lambda0,
            "lambda1_B": b.lambda1,
            "lambda0_A": a.lambda0,
            "lambda1_A": a.lambda1,
        }


def richardson(cutoffs, values, n_points=2):
    """Extrapolate ``values(K)`` to ``K -> inf`` as a polynomial in ``1/sqrt(K)``.

    Uses the last ``n_points`` entries; ``n_points=2`` is the classic
    two-point Richardson step ``(E2 x1 - E1 x2) / (x1 - x2)``.
    """
    k = np.asarray(cutoffs, dtype=float)
    e = np.asarray(values, dtype=float)
    if k.size != e.size or k.size < 2:
        raise ConfigurationError("need at least two (cutoff, value) pairs")
    n = min(n_points, k.size)
    x = 1.0 / np.sqrt(k[-n:])
    coef = np.polyfit(x, e[-n:], n - 1)
    return float(np.polyval(coef, 0.0))


@dataclass
class LadderReport:
    n_a: int
    g: float
    m_ba: float
    block: object
    excess: list
    energies: list
    shifts: list
    extrapolated: float | None
    monotone: bool
    status: str
    last: PointSolution | None = None

    @property
    def final_energy(self):
        return self.energies[-1]

    def as_dict(self):
        return {
            "N_A": self.n_a,
            "g": self.g,
            "m_BA": self.m_ba,
            "block": self.block,
            "E_excess": list(self.excess),
            "energies": list(self.energies),
            "shifts": list(self.shifts),
            "extrapolated": self.extrapolated,
            "monotone": self.monotone,
            "status": self.status,
        }


def converge(n_a, g, m_ba, excess_ladder, block="even", extrapolate=True, n_points=None, tol=1e-9,
             seed=0, problems=None, cache_dir=None):
    """Solve one point on an ascending cutoff ladder.

    ``excess_ladder`` lists energy cutoffs as quanta above the
    non-interacting ground state. Nested truncations make the ground energy
    non-increasing along the ladder; a violation beyond solver precision is
    reported as ``status="warn"``.
    """
    ladder = [int(k) for k in excess_ladder]
    if len(ladder) < 2 or any(b <= a for a, b in zip(ladder, ladder[1:])):
        raise ConfigurationError("need at least two strictly ascending cutoff rungs")
    energies = []
    last = None
    for i, k in enumerate(ladder):
        prob = problems[i] if problems else EDProblem.with_excess(n_a, k, m_ba, block, cache_dir)
        last = prob.solve(g, k=1, tol=tol, seed=seed)
        energies.append(last.ground_energy)
    shifts = [a - b for a, b in zip(energies, energies[1:])]
    monotone = all(s >= -1e-8 for s in shifts)
    extra = None
    if extrapolate:
        extra = richardson(ladder, energies, n_points or len(ladder))
    return LadderReport(n_a, float(g), float(m_ba), block, ladder, energies, shifts, extra,
                        monotone, "ok" if monotone else "warn", last)
