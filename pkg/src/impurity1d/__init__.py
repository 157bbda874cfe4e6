"""Exact diagonalization, strong-coupling reference and adiabatic treatment of
bosons interacting with a single impurity in a one-dimensional harmonic trap."""

from .ed import EDProblem, LadderReport, PointSolution, converge, e_cut_for, richardson
from .eigensolver import SpectrumResult, dense_spectrum, lowest_eigenpairs
from .errors import (
    ConfigurationError,
    ContinuityError,
    ConvergenceError,
    DomainError,
    EmptySpaceError,
    Impurity1DError,
    IterationError,
    NotFoundError,
    ResourceError,
)
from .fockspace import (
    FockSpace,
    FockState,
    SparseHamiltonian,
    assemble_hamiltonian,
    enumerate_space,
    load_hamiltonian,
    matvec,
    save_hamiltonian,
)
from .hobasis import InteractionTensor, SPBasis, build_interaction_tensor, ho_wavefunction
from .observables import (
    GridRendering,
    ObdmResult,
    entanglement_entropy,
    local_maxima,
    obdm_A,
    obdm_B,
    render_grid,
    threshold_mass_scan,
)
from .polaron import (
    AdiabaticPotential,
    XGrid,
    p11,
    q11,
    solve_delta_sp,
    solve_effective,
    tabulate,
    validity_check,
)
from .strong_ansatz import AnsatzState, ansatz_amplitude, ansatz_obdm, natural_occupations
from .sweep import RunConfig, RunManifest, __version__, load_config
