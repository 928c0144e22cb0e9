"""Three-level model of a charged particle in a ring of three tunnel-coupled traps.

The basis states are the localised ground states of the traps.  A magnetic
flux threading the ring attaches a phase factor to each tunnelling amplitude;
only the total phase around the ring is gauge invariant.  Everything is in
natural units hbar = m = l = 1, so times are in units of tau = m*l^2/hbar and
couplings in 1/tau.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DegenerateInputError

# Spin-1 generators adapted to the ring geometry: K1 couples traps 1-2,
# K2 couples 2-3, K3 couples 3-1 with an imaginary amplitude.  They satisfy
# [K_j, K_k] = i eps_{jkl} K_l.
K1 = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 0]], dtype=complex)
K2 = np.array([[0, 0, 0], [0, 0, 1], [0, 1, 0]], dtype=complex)
K3 = np.array([[0, 0, -1j], [0, 0, 0], [1j, 0, 0]], dtype=complex)

NORM_TOL = 1e-10


@dataclass(frozen=True)
class PhaseConfig:
    """Tunnelling phases picked up on each ring segment (radians).

    The total around the ring equals the dimensionless magnetic flux and is
    the only gauge-invariant combination; individual segment phases can be
    moved around by local phase changes of the basis states.
    """

    phi12: float = 0.0
    phi23: float = 0.0
    phi31: float = 0.0

    def __post_init__(self):
        for name in ("phi12", "phi23", "phi31"):
            v = getattr(self, name)
            if not np.isfinite(v):
                raise ConfigError(f"{name} must be a finite real, got {v}")

    def total(self) -> float:
        """Total phase around the ring (stored unwrapped)."""
        return self.phi12 + self.phi23 + self.phi31

    @classmethod
    def from_total(cls, phi_total: float, gauge: str = "link31") -> "PhaseConfig":
        """Build a configuration with a given total phase.

        gauge="link31" puts the whole phase on the 3-1 segment (the form in
        which the coupling between traps 3 and 1 is the only complex one);
        gauge="uniform" spreads it equally, as a constant vector potential
        along the ring does.
        """
        if gauge == "link31":
            return cls(0.0, 0.0, phi_total)
        if gauge == "uniform":
            return cls(phi_total / 3.0, phi_total / 3.0, phi_total / 3.0)
        raise ConfigError(f"unknown gauge {gauge!r}")


@dataclass(frozen=True)
class ThreeLevelState:
    """Normalised complex amplitude vector over the three localised states."""

    vector: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vector, dtype=complex)
        if v.shape != (3,):
            raise ConfigError(f"state must have 3 amplitudes, got shape {v.shape}")
        if abs(np.vdot(v, v).real - 1.0) > NORM_TOL:
            raise ConfigError("state vector is not normalised")
        object.__setattr__(self, "vector", v)

    @classmethod
    def basis(cls, j: int) -> "ThreeLevelState":
        """Localised state of trap j (1-based), with amplitude +1."""
        if j not in (1, 2, 3):
            raise ConfigError(f"trap index must be 1, 2 or 3, got {j}")
        v = np.zeros(3, dtype=complex)
        v[j - 1] = 1.0
        return cls(v)

    @classmethod
    def from_amplitudes(cls, c1, c2, c3, normalize: bool = False) -> "ThreeLevelState":
        v = np.array([c1, c2, c3], dtype=complex)
        if normalize:
            v = v / np.sqrt(np.vdot(v, v).real)
        return cls(v)

    @property
    def populations(self) -> np.ndarray:
        return np.abs(self.vector) ** 2


def hamiltonian(omega12: float, omega23: float, omega31: float,
                phases: PhaseConfig) -> np.ndarray:
    """3x3 Hamiltonian of the flux-threaded ring (zero diagonal, Hermitian).

    Off-diagonal element (j,k) is -(1/2) * Omega_jk * exp(+/- i phi_jk); the
    couplings themselves are real, all complexity lives in the phases.
    """
    for name, v in (("omega12", omega12), ("omega23", omega23), ("omega31", omega31)):
        if not np.isfinite(v):
            raise ConfigError(f"{name} must be finite, got {v}")
    h12 = -0.5 * omega12 * np.exp(1j * phases.phi12)
    h23 = -0.5 * omega23 * np.exp(1j * phases.phi23)
    h13 = -0.5 * omega31 * np.exp(-1j * phases.phi31)
    return np.array([
        [0.0, h12, h13],
        [np.conj(h12), 0.0, h23],
        [np.conj(h13), np.conj(h23), 0.0],
    ], dtype=complex)


def gauge_transform(phases: PhaseConfig):
    """Diagonal unitary that moves all segment phases onto the 3-1 link.

    Returns (U, transform) where transform(H) = U^dag H U.  Applied to the
    ring Hamiltonian it leaves the 1-2 and 2-3 couplings real and puts
    exp(-i*Phi_total) on the (1,3) element.
    """
    u = np.diag([
        1.0,
        np.exp(-1j * phases.phi12),
        np.exp(-1j * (phases.phi12 + phases.phi23)),
    ]).astype(complex)

    def transform(h: np.ndarray) -> np.ndarray:
        return u.conj().T @ h @ u

    return u, transform


def dark_state(omega12: float, omega23: float) -> ThreeLevelState:
    """Zero-energy eigenstate cos(theta)|1> - sin(theta)|3>, tan(theta)=O12/O23.

    Undefined when both couplings vanish.
    """
    if omega12 == 0.0 and omega23 == 0.0:
        raise DegenerateInputError("dark state undefined for omega12 = omega23 = 0")
    theta = np.arctan2(omega12, omega23)
    return ThreeLevelState.from_amplitudes(np.cos(theta), 0.0, -np.sin(theta))


def fidelity(psi: ThreeLevelState, target: ThreeLevelState) -> float:
    """|<target|psi>|^2 (global-phase invariant)."""
    return float(abs(np.vdot(target.vector, psi.vector)) ** 2)


@dataclass
class PulseSchedule:
    """Time-sampled tunnelling amplitudes on a uniform grid over [0, T].

    All samples are real; the phase configuration carries the flux.  meta
    holds provenance entries (scheme name, design parameters) that are echoed
    into the CSV header.
    """

    t: np.ndarray
    omega12: np.ndarray
    omega23: np.ndarray
    omega31: np.ndarray
    phases: PhaseConfig = field(default_factory=PhaseConfig)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        for name in ("omega12", "omega23", "omega31"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != self.t.shape:
                raise ConfigError(f"{name} and t must have the same shape")
            if not np.all(np.isfinite(arr)):
                raise ConfigError(f"{name} contains non-finite samples")
            setattr(self, name, arr)
        if self.t.ndim != 1 or self.t.size < 2:
            raise ConfigError("time grid needs at least two samples")
        dt = np.diff(self.t)
        if np.any(dt <= 0):
            raise ConfigError("time grid must be strictly increasing")
        if not np.allclose(dt, dt[0], rtol=1e-9, atol=1e-12 * self.duration):
            raise ConfigError("time grid must be uniform")

    @property
    def duration(self) -> float:
        return float(self.t[-1] - self.t[0])

    def couplings_at(self, tq: np.ndarray):
        """Linear interpolation of the three couplings at query times."""
        tq = np.asarray(tq, dtype=float)
        return (np.interp(tq, self.t, self.omega12),
                np.interp(tq, self.t, self.omega23),
                np.interp(tq, self.t, self.omega31))

    def write_csv(self, path) -> None:
        with open(path, "w", newline="\n") as fh:
            fh.write(self.to_csv())

    def to_csv(self) -> str:
        buf = io.StringIO()
        header = dict(self.meta)
        header.setdefault("T", self.duration)
        header.setdefault("Phi", self.phases.total())
        for key, val in header.items():
            buf.write(f"# {key} = {val}\n")
        buf.write("t,omega12,omega23,omega31\n")
        for i in range(self.t.size):
            buf.write("%.12e,%.12e,%.12e,%.12e\n"
                      % (self.t[i], self.omega12[i], self.omega23[i], self.omega31[i]))
        return buf.getvalue()


@dataclass
class Trajectory:
    """Recorded time evolution: populations, norm and optional fidelity."""

    t: np.ndarray
    states: np.ndarray           # (M, 3) complex amplitudes
    populations: np.ndarray      # (M, 3)
    norm: np.ndarray             # (M,)
    fid: np.ndarray | None = None

    @property
    def final_state(self) -> ThreeLevelState:
        v = self.states[-1]
        return ThreeLevelState(v / np.sqrt(np.vdot(v, v).real))

    def max_population(self, j: int) -> float:
        return float(self.populations[:, j - 1].max())

    def write_csv(self, path, meta: dict | None = None) -> None:
        with open(path, "w", newline="\n") as fh:
            for key, val in (meta or {}).items():
                fh.write(f"# {key} = {val}\n")
            cols = "t,P1,P2,P3" + (",F" if self.fid is not None else "") + ",norm\n"
            fh.write(cols)
            for i in range(self.t.size):
                row = [self.t[i]] + list(self.populations[i])
                if self.fid is not None:
                    row.append(self.fid[i])
                row.append(self.norm[i])
                fh.write(",".join("%.12e" % v for v in row) + "\n")


def _step_unitaries(h_stack: np.ndarray, dt: float) -> np.ndarray:
    """exp(-i H dt) for a stack of Hermitian matrices, exactly unitary."""
    w, v = np.linalg.eigh(h_stack)
    phase = np.exp(-1j * dt * w)
    return np.einsum("sij,sj,skj->sik", v, phase, v.conj())


def evolve(schedule: PulseSchedule, psi0: ThreeLevelState, dt: float | None = None,
           target: ThreeLevelState | None = None, record_every: int = 1) -> Trajectory:
    """Propagate psi0 under the schedule with midpoint-sampled step unitaries.

    Each step applies exp(-i H(t_mid) dt) computed by exact diagonalisation,
    so the evolution is unitary to machine precision; pulses are linearly
    interpolated onto the step grid.  dt defaults to T/10^4.
    """
    T = schedule.duration
    if dt is None:
        dt = T / 10_000
    if dt <= 0:
        raise ConfigError(f"dt must be positive, got {dt}")
    if dt > T:
        raise ConfigError(f"dt = {dt} exceeds schedule duration T = {T}")
    n_steps = int(round(T / dt))
    dt = T / n_steps
    t0 = schedule.t[0]

    t_mid = t0 + (np.arange(n_steps) + 0.5) * dt
    w12, w23, w31 = schedule.couplings_at(t_mid)
    ph = schedule.phases
    e12 = np.exp(1j * ph.phi12)
    e23 = np.exp(1j * ph.phi23)
    e13 = np.exp(-1j * ph.phi31)
    h = np.zeros((n_steps, 3, 3), dtype=complex)
    h[:, 0, 1] = -0.5 * w12 * e12
    h[:, 1, 0] = np.conj(h[:, 0, 1])
    h[:, 1, 2] = -0.5 * w23 * e23
    h[:, 2, 1] = np.conj(h[:, 1, 2])
    h[:, 0, 2] = -0.5 * w31 * e13
    h[:, 2, 0] = np.conj(h[:, 0, 2])
    unitaries = _step_unitaries(h, dt)

    n_rec = n_steps // record_every + 1
    times = np.empty(n_rec)
    states = np.empty((n_rec, 3), dtype=complex)
    psi = psi0.vector.copy()
    times[0] = t0
    states[0] = psi
    idx = 1
    for i in range(n_steps):
        psi = unitaries[i] @ psi
        if (i + 1) % record_every == 0:
            times[idx] = t0 + (i + 1) * dt
            states[idx] = psi
            idx += 1
    times = times[:idx]
    states = states[:idx]

    populations = np.abs(states) ** 2
    norm = populations.sum(axis=1)
    fid = None
    if target is not None:
        fid = np.abs(states @ target.vector.conj()) ** 2
    return Trajectory(times, states, populations, norm, fid)
