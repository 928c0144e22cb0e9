"""Pulse construction for the three-trap ring: counterintuitive Gaussian pairs,
the counter-diabatic third coupling, and invariant-based inverse engineering.

The inverse engineering works in the flux = pi/2 frame where the ring
Hamiltonian is H = -(1/2)(O12 K1 + O23 K2 + O31 K3).  A Hermitian invariant
I(t) = -sin(b)sin(a) K1 - sin(b)cos(a) K2 + cos(b) K3 is parametrised by two
auxiliary angles a(t), b(t); choosing their trajectories (plus O31) and
inverting the consistency conditions

    da/dt = (O12 sin a + O23 cos a) / (2 tan b) + O31 / 2
    db/dt = (O23 sin a - O12 cos a) / 2

yields the two remaining couplings.  The zero-eigenvalue eigenstate of I then
solves the Schroedinger equation exactly, which is what makes the schemes
fast without being adiabatic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConfigError, SingularPulseError
from .model3l import K1, K2, K3, PhaseConfig, PulseSchedule, ThreeLevelState

GAUSS_WIDTH = 100.0          # exponent scale of the transport Gaussians
_CENTER_12 = 0.5             # peak position of O12 in units of t/T
_CENTER_23 = 1.0 / 3.0       # peak position of O23 (earlier: counterintuitive order)
_SLOPE = 2.0 * GAUSS_WIDTH * (_CENTER_12 - _CENTER_23)   # d/ds log(O12/O23) = 100/3
_CROSSING = 5.0 / 12.0       # where O12 = O23

OMEGA_CAP_DEFAULT = 1e3      # abort threshold for inverse-engineered pulses
_COSB_TOL = 1e-6


@dataclass(frozen=True)
class AuxiliaryAngles:
    """Auxiliary angle trajectories a(t), b(t) with first derivatives.

    All four entries are callables accepting scalar or array times on [0, T].
    """

    alpha: Callable
    beta: Callable
    alpha_dot: Callable
    beta_dot: Callable
    duration: float

    def sample(self, t: np.ndarray):
        t = np.asarray(t, dtype=float)
        return (np.asarray(self.alpha(t), dtype=float),
                np.asarray(self.beta(t), dtype=float),
                np.asarray(self.alpha_dot(t), dtype=float),
                np.asarray(self.beta_dot(t), dtype=float))

    def derivative_consistency(self, n: int = 2001) -> float:
        """Max relative mismatch between stored derivatives and differenced values."""
        t = np.linspace(0.0, self.duration, n)
        a, b, ad, bd = self.sample(t)
        h = t[1] - t[0]
        err = 0.0
        for vals, dots in ((a, ad), (b, bd)):
            num = np.gradient(vals, h, edge_order=2)
            scale = max(np.abs(dots).max(), 1e-300)
            # interior centred differences carry O(h^2) error; compare there
            err = max(err, float(np.abs(num[1:-1] - dots[1:-1]).max() / scale))
        return err

    @classmethod
    def from_samples(cls, t, alpha, beta) -> "AuxiliaryAngles":
        """Build interpolating angles from dense samples (derivatives by differencing)."""
        t = np.asarray(t, dtype=float)
        alpha = np.asarray(alpha, dtype=float)
        beta = np.asarray(beta, dtype=float)
        h = t[1] - t[0]
        a_dot = np.gradient(alpha, h, edge_order=2)
        b_dot = np.gradient(beta, h, edge_order=2)
        return cls(
            alpha=lambda tq: np.interp(tq, t, alpha),
            beta=lambda tq: np.interp(tq, t, beta),
            alpha_dot=lambda tq: np.interp(tq, t, a_dot),
            beta_dot=lambda tq: np.interp(tq, t, b_dot),
            duration=float(t[-1] - t[0]),
        )


def sap_gaussian_pulses(T: float, omega0: float, n: int):
    """Counterintuitive Gaussian pair sampled on a uniform grid.

    O12 peaks at t = T/2, O23 at t = T/3, both with amplitude omega0 and
    exponent -100 (t/T - center)^2.
    """
    if T <= 0:
        raise ConfigError(f"T must be positive, got {T}")
    if omega0 <= 0:
        raise ConfigError(f"omega0 must be positive, got {omega0}")
    t = np.linspace(0.0, T, n)
    s = t / T
    w12 = omega0 * np.exp(-GAUSS_WIDTH * (s - _CENTER_12) ** 2)
    w23 = omega0 * np.exp(-GAUSS_WIDTH * (s - _CENTER_23) ** 2)
    return t, w12, w23


def counterdiabatic_omega31(omega12: np.ndarray, omega23: np.ndarray,
                            t: np.ndarray) -> np.ndarray:
    """Coupling that cancels non-adiabatic transitions of the Gaussian pair.

    O31 = 2 (O23 dO12 - O12 dO23) / (O12^2 + O23^2), derivatives by centred
    differences (second-order one-sided at the endpoints).
    """
    w12 = np.asarray(omega12, dtype=float)
    w23 = np.asarray(omega23, dtype=float)
    t = np.asarray(t, dtype=float)
    denom = w12 ** 2 + w23 ** 2
    if np.any(denom == 0.0):
        i = int(np.argmin(denom))
        raise SingularPulseError(
            f"both pulses vanish at t = {t[i]:g}; mixing angle undefined", time=t[i])
    h = t[1] - t[0]
    d12 = np.gradient(w12, h, edge_order=2)
    d23 = np.gradient(w23, h, edge_order=2)
    return 2.0 * (w23 * d12 - w12 * d23) / denom


def transport_angles(T: float, omega0: float = 0.25) -> AuxiliaryAngles:
    """Angles of the transport scheme: b = -pi/2, a = mixing angle of the Gaussians."""

    def alpha(t):
        s = np.asarray(t, dtype=float) / T
        return np.arctan(np.exp(_SLOPE * (s - _CROSSING)))

    def alpha_dot(t):
        s = np.asarray(t, dtype=float) / T
        return _SLOPE / (2.0 * T * np.cosh(_SLOPE * (s - _CROSSING)))

    def beta(t):
        return np.full_like(np.asarray(t, dtype=float), -np.pi / 2.0)

    def beta_dot(t):
        return np.zeros_like(np.asarray(t, dtype=float))

    return AuxiliaryAngles(alpha, beta, alpha_dot, beta_dot, T)


def transport_scheme(T: float, omega0: float = 0.25, n: int = 4001) -> PulseSchedule:
    """Fast transport |1> -> -|3>: Gaussian pair plus the counter-diabatic coupling.

    The b = -pi/2 invariant branch keeps the middle trap empty for all times;
    O31 = 2 da/dt is evaluated in closed form and integrates to pi.  The
    schedule carries total flux pi/2 on the 3-1 link.
    """
    t, w12, w23 = sap_gaussian_pulses(T, omega0, n)
    ang = transport_angles(T, omega0)
    w31 = 2.0 * ang.alpha_dot(t)
    return PulseSchedule(
        t, w12, w23, w31,
        phases=PhaseConfig.from_total(np.pi / 2.0, "link31"),
        meta={"scheme": "transport", "T": T, "Phi": np.pi / 2.0, "omega0": omega0},
    )


def sap_only_scheme(T: float, omega0: float = 0.25, n: int = 4001) -> PulseSchedule:
    """Gaussian pair alone (no third coupling): the slow adiabatic baseline."""
    t, w12, w23 = sap_gaussian_pulses(T, omega0, n)
    return PulseSchedule(
        t, w12, w23, np.zeros_like(t),
        phases=PhaseConfig.from_total(np.pi / 2.0, "link31"),
        meta={"scheme": "sap-only", "T": T, "Phi": np.pi / 2.0, "omega0": omega0},
    )


# --- superposition scheme -------------------------------------------------
#
# Boundary values: a: 0 -> pi/4, b: -pi/2 -> -arctan(sqrt 2); the invariant
# eigenstate then runs from |1> to (|1> - i|2> - |3>)/sqrt(3).  a is the cubic
# smoothstep, b a quartic with zero endpoint slopes, and O31 a cubic in s=t/T
#
#     O31 = (s/T) (3 pi + c2 s - (3 pi + c2) s^2)
#
# whose slope at s=0 matches 2 d2a/dt2 so that (2 da/dt - O31)/cos(b) stays
# finite where b passes through -pi/2.  The free coefficient c2 is chosen once
# (see _closure_c2) as the smallest value keeping all three couplings
# nonnegative: barrier-controlled tunnelling cannot realise negative
# amplitudes, so this is what makes the scheme mappable onto the ring.

BETA_FINAL = -np.arctan(np.sqrt(2.0))
_DBETA = np.pi / 2.0 + BETA_FINAL      # total rise of b, about 0.6155


def _alpha_poly(s):
    return (np.pi / 4.0) * (3.0 * s ** 2 - 2.0 * s ** 3)


def _alpha_poly_dot(s):
    return (np.pi / 4.0) * (6.0 * s - 6.0 * s ** 2)


def _beta_poly(s):
    return -np.pi / 2.0 + _DBETA * (6.0 * s ** 2 - 8.0 * s ** 3 + 3.0 * s ** 4)


def _beta_poly_dot(s):
    return _DBETA * 12.0 * s * (1.0 - s) ** 2


def _omega31_poly(s, c2):
    return s * (3.0 * np.pi + c2 * s - (3.0 * np.pi + c2) * s ** 2)


def _superposition_pulses(s, T, c2):
    """Closed-form couplings of the superposition ansatz on samples s = t/T."""
    a = _alpha_poly(s)
    b = _beta_poly(s)
    ad = _alpha_poly_dot(s) / T
    bd = _beta_poly_dot(s) / T
    w31 = _omega31_poly(s, c2) / T
    # (2 da/dt - O31) = -(3 pi + c2) s^2 (1-s) / T exactly for this ansatz
    d = -(3.0 * np.pi + c2) * s ** 2 * (1.0 - s) / T
    cosb = np.cos(b)
    with np.errstate(invalid="ignore", divide="ignore"):
        f = d / cosb
    # removable 0/0 at s = 0 where b = -pi/2: series limit of d / sin(delta)
    limit0 = -(3.0 * np.pi + c2) / (6.0 * _DBETA * T)
    f = np.where(s < 1e-9, limit0, f)
    sinb = np.sin(b)
    w12 = f * sinb * np.sin(a) - 2.0 * bd * np.cos(a)
    w23 = f * sinb * np.cos(a) + 2.0 * bd * np.sin(a)
    return w12, w23, w31, a, b, ad, bd


def _closure_c2(n: int = 4001) -> float:
    """Smallest O31 cubic coefficient keeping all couplings nonnegative.

    The pulse minimum is monotone in c2 (both couplings gain a term
    proportional to 3 pi + c2), so bisection on a fixed grid is exact enough;
    a small margin keeps the minimum strictly positive.
    """
    s = np.linspace(0.0, 1.0, n)

    def worst(c2):
        w12, w23, w31, *_ = _superposition_pulses(s, 1.0, c2)
        return min(w12.min(), w23.min(), w31.min())

    lo, hi = -np.pi, 400.0
    if worst(hi) < 0.0:
        raise SingularPulseError("no nonnegative closure found for the ansatz")
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if worst(mid) >= 0.0:
            hi = mid
        else:
            lo = mid
    return hi + 2.0


_C2_CACHE: dict[int, float] = {}


def superposition_angles(T: float, c2: float | None = None) -> AuxiliaryAngles:
    def alpha(t):
        return _alpha_poly(np.asarray(t, dtype=float) / T)

    def alpha_dot(t):
        return _alpha_poly_dot(np.asarray(t, dtype=float) / T) / T

    def beta(t):
        return _beta_poly(np.asarray(t, dtype=float) / T)

    def beta_dot(t):
        return _beta_poly_dot(np.asarray(t, dtype=float) / T) / T

    return AuxiliaryAngles(alpha, beta, alpha_dot, beta_dot, T)


def superposition_target() -> ThreeLevelState:
    """Equal-weight superposition (|1> - i|2> - |3>)/sqrt(3)."""
    return ThreeLevelState.from_amplitudes(1.0, -1.0j, -1.0, normalize=True)


def superposition_scheme(T: float, n: int = 4001, c2: float | None = None) -> PulseSchedule:
    """Equal three-trap superposition from |1> in total time T.

    Returns the three couplings of the inverse-engineered ansatz; the target
    state is superposition_target().  All couplings are nonnegative so the
    schedule can be realised by barrier control.
    """
    if T <= 0:
        raise ConfigError(f"T must be positive, got {T}")
    if c2 is None:
        if n not in _C2_CACHE:
            _C2_CACHE[n] = _closure_c2(n)
        c2 = _C2_CACHE[n]
    t = np.linspace(0.0, T, n)
    w12, w23, w31, *_ = _superposition_pulses(t / T, T, c2)
    return PulseSchedule(
        t, w12, w23, w31,
        phases=PhaseConfig.from_total(np.pi / 2.0, "link31"),
        meta={"scheme": "superposition", "T": T, "Phi": np.pi / 2.0, "c2": c2},
    )


# --- generic inversion and diagnostics ------------------------------------

def lr_invert(angles: AuxiliaryAngles, omega31, n: int = 4001,
              omega_cap: float = OMEGA_CAP_DEFAULT, envelope: float = 1.0):
    """Couplings (O12, O23) that make the invariant of `angles` exact.

        O12 = 2 da sin(a) tan(b) - 2 db cos(a) - O31 sin(a) tan(b)
        O23 = 2 da cos(a) tan(b) + 2 db sin(a) - O31 cos(a) tan(b)

    The tan(b)-products are evaluated through (2 da - O31)/cos(b), with
    interpolation across isolated points where b crosses -pi/2 (the products
    there are finite limits for an admissible ansatz).  When b = -pi/2 on the
    whole grid only the ratio O12/O23 = tan(a) is determined; `envelope` then
    sets sqrt(O12^2 + O23^2) and consistency requires O31 = 2 da/dt.

    Returns (t, O12, O23).  Raises SingularPulseError when any resulting
    coupling exceeds omega_cap.
    """
    T = angles.duration
    t = np.linspace(0.0, T, n)
    a, b, ad, bd = angles.sample(t)
    if callable(omega31):
        w31 = np.asarray(omega31(t), dtype=float)
    else:
        w31 = np.asarray(omega31, dtype=float)
        if w31.shape != t.shape:
            raise ConfigError("sampled omega31 must match the inversion grid")
    d = 2.0 * ad - w31
    cosb = np.cos(b)
    sinb = np.sin(b)
    singular = np.abs(cosb) < _COSB_TOL
    if singular.all():
        scale = max(np.abs(w31).max(), np.abs(ad).max() * 2.0, 1e-300)
        if np.abs(d).max() > 1e-8 * scale:
            i = int(np.argmax(np.abs(d)))
            raise SingularPulseError(
                f"b = -pi/2 branch requires O31 = 2 da/dt; mismatch at t = {t[i]:g}",
                time=t[i])
        w12 = -envelope * sinb * np.sin(a)
        w23 = -envelope * sinb * np.cos(a)
        return t, w12, w23
    f = np.empty_like(d)
    good = ~singular
    f[good] = d[good] / cosb[good]
    if singular.any():
        f[singular] = np.interp(t[singular], t[good], f[good])
    w12 = f * sinb * np.sin(a) - 2.0 * bd * np.cos(a)
    w23 = f * sinb * np.cos(a) + 2.0 * bd * np.sin(a)
    for name, w in (("omega12", w12), ("omega23", w23), ("omega31", w31)):
        if np.abs(w).max() > omega_cap:
            i = int(np.argmax(np.abs(w)))
            raise SingularPulseError(
                f"{name} exceeds cap {omega_cap:g} at t = {t[i]:g} "
                f"(|{name}| = {abs(w[i]):.3g})", time=t[i])
    return t, w12, w23


def auxiliary_residuals(angles: AuxiliaryAngles, schedule: PulseSchedule):
    """Max absolute residuals of the two auxiliary-angle consistency relations.

    Written with cot(b) so the b = -pi/2 branch is regular.
    """
    t = schedule.t
    a, b, ad, bd = angles.sample(t)
    w12, w23, w31 = schedule.omega12, schedule.omega23, schedule.omega31
    cotb = np.cos(b) / np.sin(b)
    res_a = ad - 0.5 * (w12 * np.sin(a) + w23 * np.cos(a)) * cotb - 0.5 * w31
    res_b = bd - 0.5 * (w23 * np.sin(a) - w12 * np.cos(a))
    return float(np.abs(res_a).max()), float(np.abs(res_b).max())


def pulse_area(omega: np.ndarray, t: np.ndarray) -> float:
    """Trapezoidal time integral of a sampled coupling (radians)."""
    return float(np.trapezoid(np.asarray(omega, dtype=float), np.asarray(t, dtype=float)))


def invariant_matrix(alpha: float, beta: float) -> np.ndarray:
    """Invariant I = -sin(b)sin(a) K1 - sin(b)cos(a) K2 + cos(b) K3."""
    return (-np.sin(beta) * np.sin(alpha) * K1
            - np.sin(beta) * np.cos(alpha) * K2
            + np.cos(beta) * K3)


def invariant_residual(schedule: PulseSchedule, angles: AuxiliaryAngles) -> float:
    """max_t || dI/dt + i [H, I] ||_F over the schedule grid.

    H is taken in the flux = pi/2 frame, H = -(1/2)(O12 K1 + O23 K2 + O31 K3),
    which is the frame the invariant parametrisation lives in; dI/dt uses the
    stored angle derivatives.
    """
    t = schedule.t
    a, b, ad, bd = angles.sample(t)
    sina, cosa = np.sin(a), np.cos(a)
    sinb, cosb = np.sin(b), np.cos(b)

    n = t.size
    I = (-(sinb * sina)[:, None, None] * K1
         - (sinb * cosa)[:, None, None] * K2
         + cosb[:, None, None] * K3)
    dI = ((-bd * cosb * sina - ad * sinb * cosa)[:, None, None] * K1
          + (-bd * cosb * cosa + ad * sinb * sina)[:, None, None] * K2
          + (-bd * sinb)[:, None, None] * K3)
    H = (-0.5) * (schedule.omega12[:, None, None] * K1
                  + schedule.omega23[:, None, None] * K2
                  + schedule.omega31[:, None, None] * K3)
    R = dI + 1j * (H @ I - I @ H)
    norms = np.sqrt((np.abs(R) ** 2).sum(axis=(1, 2)))
    assert norms.shape == (n,)
    return float(norms.max())
