"""Truncated many-body basis and sparse Hamiltonian assembly.

States are products of a symmetric occupation vector for the ``N_A`` bosons
and a single impurity mode. Truncation combines per-species mode cutoffs
with an optional cap ``E_cut`` on the non-interacting energy

    E0 = sum_n occ[n] * (n + 1/2) + (mode_b + 1/2).

Internally the boson part is handled as a table of "configurations" and
every state is a (configuration, impurity mode) pair, so one-body boson
moves ``a_p^dagger a_q`` are computed once per configuration and reused
across impurity modes.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from .errors import ConfigurationError, DomainError, EmptySpaceError, ResourceError

_EPS = 1e-9

DEFAULT_MAX_NNZ = 150_000_000


def parse_parity(block):
    """Normalize a parity selector to ``None``, ``+1`` or ``-1``."""
    if block is None:
        return None
    if isinstance(block, str):
        key = block.strip().lower()
        table = {"even": 1, "odd": -1, "+": 1, "-": -1, "none": None, "all": None}
        if key not in table:
            raise ConfigurationError(f"unknown parity block {block!r}")
        return table[key]
    if block in (1, -1):
        return int(block)
    raise ConfigurationError(f"unknown parity block {block!r}")


@dataclass(frozen=True)
class FockState:
    occ_a: tuple
    mode_b: int

    @property
    def n_a(self):
        return sum(self.occ_a)

    @property
    def excitation(self):
        return sum(n * k for n, k in enumerate(self.occ_a)) + self.mode_b

    @property
    def parity(self):
        return -1 if self.excitation % 2 else 1

    @property
    def energy(self):
        return self.excitation + 0.5 * (self.n_a + 1)


def _multisets(n_a, n_modes, budget):
    """Non-decreasing mode tuples of length ``n_a`` with mode sum <= budget."""
    out = []

    def rec(prefix, start, remaining, left):
        if left == 0:
            out.append(tuple(prefix))
            return
        # smallest possible sum of the remaining picks is left*start
        for m in range(start, n_modes):
            if m * left > remaining:
                break
            prefix.append(m)
            rec(prefix, m, remaining - m, left - 1)
            prefix.pop()

    rec([], 0, budget, n_a)
    return out


class FockSpace:
    """Ordered, truncated basis of (boson occupations, impurity mode) states.

    Parameters
    ----------
    n_a : int
        Number of bosons.
    n_max_a, n_max_b : int or None
        Mode cutoffs per species. ``None`` means "limited only by E_cut".
    e_cut : float or None
        Cap on the non-interacting energy in units of the trap quantum.
    block : {None, "even", "odd", 1, -1}
        Keep only one total-parity sector.
    """

    def __init__(self, n_a, n_max_a=None, n_max_b=None, e_cut=None, block=None):
        if n_a < 1:
            raise ConfigurationError("N_A must be >= 1")
        vacuum = 0.5 * (n_a + 1)
        if e_cut is None:
            if n_max_a is None or n_max_b is None:
                raise ConfigurationError("give both mode cutoffs or an energy cutoff")
            budget = None
        else:
            if e_cut < vacuum - _EPS:
                raise EmptySpaceError(f"E_cut={e_cut} lies below the vacuum energy {vacuum}")
            budget = int(np.floor(e_cut - vacuum + _EPS))
            n_max_a = budget + 1 if n_max_a is None else min(n_max_a, budget + 1)
            n_max_b = budget + 1 if n_max_b is None else min(n_max_b, budget + 1)
        if n_max_a < 1 or n_max_b < 1:
            raise ConfigurationError("cutoffs must be >= 1")
        self.n_a = int(n_a)
        self.n_max_a = int(n_max_a)
        self.n_max_b = int(n_max_b)
        self.e_cut = e_cut
        self.budget = budget
        self.block = parse_parity(block)

        big = n_a * (n_max_a - 1) if budget is None else budget
        tuples = _multisets(n_a, n_max_a, big)
        conf_exc = np.array([sum(t) for t in tuples], dtype=np.int64)
        occ = np.zeros((len(tuples), n_max_a), dtype=np.int64)
        for i, t in enumerate(tuples):
            for m in t:
                occ[i, m] += 1
        self.config_occ = occ
        self.config_exc = conf_exc
        self._config_index = {t: i for i, t in enumerate(tuples)}

        mb = np.arange(n_max_b)
        tot = conf_exc[:, None] + mb[None, :]
        allowed = np.ones(tot.shape, dtype=bool)
        if budget is not None:
            allowed &= tot <= budget
        if self.block is not None:
            allowed &= (tot % 2) == (0 if self.block == 1 else 1)
        ci, bi = np.nonzero(allowed)
        if ci.size == 0:
            raise EmptySpaceError("truncation leaves no states")
        # order: impurity mode first, then occupations compared from the top mode down
        conf_rank = np.lexsort(occ.T)
        rank_of = np.empty_like(conf_rank)
        rank_of[conf_rank] = np.arange(len(conf_rank))
        order = np.lexsort((rank_of[ci], bi))
        self.state_config = ci[order].astype(np.int64)
        self.state_mode_b = bi[order].astype(np.int64)
        table = np.full(tot.shape, -1, dtype=np.int64)
        table[self.state_config, self.state_mode_b] = np.arange(self.dim)
        self.index_table = table

    @property
    def dim(self):
        return int(self.state_config.size)

    def __len__(self):
        return self.dim

    @property
    def n_configs(self):
        return int(self.config_exc.size)

    @property
    def vacuum_energy(self):
        return 0.5 * (self.n_a + 1)

    @cached_property
    def energies(self):
        """Non-interacting energy of every state."""
        return (self.config_exc[self.state_config] + self.state_mode_b + self.vacuum_energy).astype(float)

    @cached_property
    def parities(self):
        exc = self.config_exc[self.state_config] + self.state_mode_b
        return np.where(exc % 2 == 0, 1, -1)

    def state(self, i):
        c = self.state_config[i]
        return FockState(tuple(int(k) for k in self.config_occ[c]), int(self.state_mode_b[i]))

    @property
    def states(self):
        return [self.state(i) for i in range(self.dim)]

    def index(self, state):
        """Ordinal of ``state``; ``KeyError`` if it is not in the space."""
        occ = tuple(state.occ_a) + (0,) * max(0, self.n_max_a - len(state.occ_a))
        if len(occ) > self.n_max_a and any(occ[self.n_max_a:]):
            raise KeyError(state)
        modes = tuple(m for m, k in enumerate(occ[: self.n_max_a]) for _ in range(k))
        c = self._config_index.get(modes)
        if c is None or not 0 <= state.mode_b < self.n_max_b:
            raise KeyError(state)
        i = self.index_table[c, state.mode_b]
        if i < 0:
            raise KeyError(state)
        return int(i)

    def coefficient_matrix(self, v):
        """Reshape a state vector to ``C[config, mode_b]`` (zeros where truncated)."""
        v = np.asarray(v, dtype=float)
        if v.shape != (self.dim,):
            raise DomainError(f"vector length {v.shape} does not match dimension {self.dim}")
        out = np.zeros(self.index_table.shape)
        out[self.state_config, self.state_mode_b] = v
        return out

    @cached_property
    def one_body_moves(self):
        """Boson moves ``a_p^dagger a_q`` between configurations.

        Returns a dict ``(p, q) -> (src, dst, amp)`` of aligned arrays with
        ``a_p^dagger a_q |src> = amp |dst>``. Diagonal moves (``p == q``)
        carry ``amp = occ[q]``. Targets outside the configuration table are
        dropped.
        """
        moves = {}
        limit = np.inf if self.budget is None else self.budget
        for c in range(self.n_configs):
            occ = self.config_occ[c]
            exc = self.config_exc[c]
            for q in np.nonzero(occ)[0]:
                q = int(q)
                for p in range(self.n_max_a):
                    if exc - q + p > limit:
                        break
                    if p == q:
                        d, amp = c, float(occ[q])
                    else:
                        new = occ.copy()
                        new[q] -= 1
                        new[p] += 1
                        key = tuple(m for m in range(self.n_max_a) for _ in range(new[m]))
                        d = self._config_index.get(key)
                        if d is None:
                            continue
                        amp = float(np.sqrt(occ[q] * (occ[p] + 1)))
                    moves.setdefault((p, q), ([], [], []))
                    lst = moves[(p, q)]
                    lst[0].append(c)
                    lst[1].append(d)
                    lst[2].append(amp)
        return {
            k: (np.array(s, dtype=np.int64), np.array(d, dtype=np.int64), np.array(a))
            for k, (s, d, a) in sorted(moves.items())
        }

    def parity_order(self):
        """Permutation sorting states into (even, odd) blocks, stable within each."""
        return np.argsort(-self.parities, kind="stable")

    def describe(self):
        return {
            "N_A": self.n_a,
            "n_max_A": self.n_max_a,
            "n_max_B": self.n_max_b,
            "E_cut": self.e_cut,
            "block": self.block,
            "dim": self.dim,
        }


def enumerate_space(n_a, n_max_a=None, n_max_b=None, e_cut=None, parity_block=None):
    """Build the truncated basis; see :class:`FockSpace`."""
    return FockSpace(n_a, n_max_a=n_max_a, n_max_b=n_max_b, e_cut=e_cut, block=parity_block)


@dataclass
class SparseHamiltonian:
    """``H = H0 + g * V`` in a :class:`FockSpace`.

    ``h0`` is the (diagonal) non-interacting part and ``v`` the contact
    interaction at unit coupling, both in units of the trap quantum.
    """

    h0: np.ndarray
    v: sp.csr_matrix
    g: float
    m_ba: float
    meta: dict = field(default_factory=dict)

    @property
    def dim(self):
        return int(self.h0.size)

    @property
    def nnz(self):
        return int(self.v.nnz)

    @cached_property
    def matrix(self):
        h = self.v * self.g if self.g != 0 else sp.csr_matrix(self.v.shape)
        return (h + sp.diags(self.h0)).tocsr()

    def with_coupling(self, g):
        """Same basis and interaction, different coupling; no reassembly."""
        return SparseHamiltonian(self.h0, self.v, float(g), self.m_ba, dict(self.meta, g=float(g)))

    def toarray(self):
        return self.matrix.toarray()

    def save(self, path):
        save_hamiltonian(self, path)


def _estimate_nnz(space):
    """Upper bound on stored interaction elements."""
    per_config = (space.index_table >= 0).sum(axis=1)
    return int(sum(np.dot(per_config[src], per_config[dst]) for src, dst, _ in space.one_body_moves.values()))


def assemble_hamiltonian(space, tensor, g, m_ba=None, max_nnz=DEFAULT_MAX_NNZ):
    """Assemble the sparse Hamiltonian of the boson-impurity mixture.

    The impurity's kinetic plus trap term is ``(mode_b + 1/2)`` for every
    mass ratio: the ``1/m_BA`` kinetic and ``m_BA`` trap factors combine to
    unit frequency. ``m_ba`` therefore only enters through ``tensor``.

    Raises
    ------
    ConfigurationError
        If the tensor cutoffs are smaller than the space cutoffs.
    ResourceError
        If the (upper-bound) number of stored elements exceeds ``max_nnz``.
    """
    if tensor.n_max_a < space.n_max_a or tensor.n_max_b < space.n_max_b:
        raise ConfigurationError("interaction tensor cutoffs smaller than the Fock space cutoffs")
    if m_ba is None:
        m_ba = tensor.basis_b.mass_ratio
    elif abs(m_ba - tensor.basis_b.mass_ratio) > 1e-12:
        raise ConfigurationError("m_ba does not match the tensor's impurity basis")
    if max_nnz is not None and _estimate_nnz(space) > max_nnz:
        raise ResourceError(f"Hamiltonian would exceed {max_nnz} stored elements")

    nb = space.n_max_b
    table = space.index_table
    rows, cols, vals = [], [], []
    for (p, q), (src, dst, amp) in space.one_body_moves.items():
        blk = tensor.block(p, q)[:nb, :nb]
        bi, bj = np.nonzero(blk)
        if bi.size == 0:
            continue
        r = table[dst][:, bi]
        c = table[src][:, bj]
        ok = (r >= 0) & (c >= 0)
        if not ok.any():
            continue
        val = amp[:, None] * blk[bi, bj][None, :]
        rows.append(r[ok])
        cols.append(c[ok])
        vals.append(val[ok])
    n = space.dim
    if rows:
        v = sp.coo_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
        ).tocsr()
        v.sum_duplicates()
        # (i, j) and (j, i) accumulate their terms in different orders
        v = ((v + v.T) * 0.5).tocsr()
        v.sort_indices()
    else:
        v = sp.csr_matrix((n, n))
    meta = dict(space.describe(), g=float(g), m_BA=float(m_ba))
    return SparseHamiltonian(space.energies.copy(), v, float(g), float(m_ba), meta)


def matvec(h, v):
    """``H @ v`` for a :class:`SparseHamiltonian`."""
    v = np.asarray(v, dtype=float)
    if v.shape != (h.dim,):
        raise DomainError(f"vector length {v.shape} does not match dimension {h.dim}")
    return h.matrix @ v


_MAGIC = b"I1DHAM"
_VERSION = 1


def save_hamiltonian(h, path):
    """Binary cache: header, JSON metadata, then little-endian arrays."""
    v = h.v.tocsr()
    meta = json.dumps(dict(h.meta, g=h.g, m_BA=h.m_ba), sort_keys=True).encode()
    with open(path, "wb") as f:
        f.write(_MAGIC)
        f.write(struct.pack("<IQQQ", _VERSION, h.dim, v.nnz, len(meta)))
        f.write(meta)
        f.write(np.asarray(h.h0, dtype="<f8").tobytes())
        f.write(np.asarray(v.indptr, dtype="<i8").tobytes())
        f.write(np.asarray(v.indices, dtype="<i8").tobytes())
        f.write(np.asarray(v.data, dtype="<f8").tobytes())


def load_hamiltonian(path):
    with open(path, "rb") as f:
        if f.read(len(_MAGIC)) != _MAGIC:
            raise ConfigurationError(f"{path} is not a Hamiltonian cache file")
        version, dim, nnz, mlen = struct.unpack("<IQQQ", f.read(struct.calcsize("<IQQQ")))
        if version != _VERSION:
            raise ConfigurationError(f"unsupported cache version {version}")
        meta = json.loads(f.read(mlen))
        h0 = np.frombuffer(f.read(8 * dim), dtype="<f8").copy()
        indptr = np.frombuffer(f.read(8 * (dim + 1)), dtype="<i8")
        indices = np.frombuffer(f.read(8 * nnz), dtype="<i8")
        data = np.frombuffer(f.read(8 * nnz), dtype="<f8")
    v = sp.csr_matrix((data, indices, indptr), shape=(dim, dim))
    return SparseHamiltonian(h0, v, float(meta["g"]), float(meta["m_BA"]), meta)
