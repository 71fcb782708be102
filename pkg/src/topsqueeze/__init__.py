"""Squeezed and entangled light in topological and trivial waveguide lattices.

Gaussian states are tracked through their correlation matrices
``N = <a^dag a>`` and ``M = <a a>``, which evolve linearly under the
lattice propagator. See the submodules for lattices, states, propagation,
entanglement/Wigner tools, teleportation and disorder ensembles.
"""

__version__ = "0.1.0"

from .exceptions import *  # noqa: F401,F403
from .lattice import (  # noqa: F401
    DisorderConfig,
    DisorderKind,
    EdgeMode,
    Hamiltonian,
    LatticeKind,
    LatticeSpec,
    analytic_edge_mode,
    apply_disorder,
    build_hamiltonian,
    diagonalize,
    edge_mode,
    rotating_frame,
)
from .gaussian import (  # noqa: F401
    GaussianState,
    SqueezeParam,
    inject_collective,
    inject_single_mode,
    inject_two_mode,
    max_squeezing_db,
    max_two_mode_squeezing_db,
    photon_number,
    quad_cov,
    squeezing_db,
    two_mode_squeezing_db,
    vacuum,
    variance,
)
from .evolve import Evolution, Propagator, ZGrid, evolve, evolve_two_lattices, propagator  # noqa: F401
from .quantum_info import (  # noqa: F401
    EntanglementResult,
    PhaseGrid,
    WignerField,
    entanglement,
    ensemble_average_wigner,
    wigner_fock1,
    wigner_gaussian,
)
from .teleport import (  # noqa: F401
    TeleportKernel,
    TeleportReport,
    TeleportResource,
    brute_force_output,
    extract_resource,
    kernel_from_resource,
    teleport_average,
)
from .ensemble import EnsemblePlan, EnsembleStats, quadrature_phase_statistics, run_ensemble  # noqa: F401
