"""Pulse design and simulation for a charged particle in a flux-threaded
ring of three tunnel-coupled traps.

Subpackages:
  model3l     three-level ring model and norm-preserving time evolution
  pulsedesign invariant-based pulse construction (transport, superposition)
  mapping     bridge between the three-level couplings and trap/barrier shapes
  continuum   1D split-step simulation on the periodic ring
  harness     named scenarios, scans and CSV emission
"""

from .model3l import (
    K1, K2, K3,
    PhaseConfig, PulseSchedule, ThreeLevelState, Trajectory,
    dark_state, evolve, fidelity, gauge_transform, hamiltonian,
)
from .pulsedesign import (
    AuxiliaryAngles,
    counterdiabatic_omega31, invariant_matrix, invariant_residual,
    lr_invert, pulse_area, sap_gaussian_pulses, sap_only_scheme,
    superposition_scheme, superposition_target, transport_angles,
    transport_scheme, superposition_angles,
)

__version__ = "0.1.0"
