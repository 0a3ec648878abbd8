"""Quadratic approximate degradability of spin and qudit depolarizing channels.

Submodules: ``matcore`` (dense linear algebra), ``spin`` (SU(2) generators),
``channels`` (Kraus channels and Choi matrices), ``sdp`` (interior-point
solver), ``diamond`` (diamond norm), ``degrade`` (degrading maps and eta
sweeps), ``capacity`` (entropies and capacity bounds), ``cli``.
"""
from .capacity import CapacityPoint, binary_entropy, capacity_curve, coherent_info, delta_correction, ic_mls_pi, vn_entropy
from .channels import (
    GpcParams,
    KrausChannel,
    LinearMapChoi,
    MlsParams,
    apply,
    choi,
    complementary,
    compose,
    gpc_channel,
    identity_channel,
    landau_streater,
    mls_channel,
    weyl_operators,
)
from .degrade import GPC, MLS, DegradeSpec, ScalingRecord, SlopeFit, degrading_map, eta, fit_slope, optimal_a, scaling_sweep
from .diamond import diamond_norm
from .matcore import herm_eig, partial_trace, trace_norm
from .sdp import SdpProblem, SdpSolution, SdpStatus, SolverError, solve
from .spin import SpinSystem, make_spin, singlet_state

__version__ = "0.1.0"
