"""Classical electron motion outside the solenoid during a slow current ramp.

The exterior magnetic field vanishes identically (imposed analytically and
spot-checked by curl stencils), so the only force is electric, induced by
the changing current. Two force models are available:

  * "induction" (default): F = q E with E = -dA/dt at fixed position
    (the Maxwell induction field). The canonical momentum m v + q A then
    drifts by the convective term q (v . grad) A along the path, a real
    physical effect whose magnitude is surfaced in the trajectory record.
  * "total_derivative": F = -q (dA/dt along the trajectory), i.e. the
    induction force plus -q (v . grad) A. Under this law the canonical
    momentum is an exact constant of the motion, which makes it the right
    setting for integrator convergence measurements.

The integrator is velocity-Verlet; for the velocity-dependent total-
derivative force the velocity update is closed by fixed-point iteration,
preserving second-order accuracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circulation import loop_integral
from .constants import H_PLANCK, MU_0
from .geometry import ParametricLoop
from .modes import curl_cylindrical, solenoid_a_field, solenoid_longitudinal_analytic
from .sources import SolenoidSpec


class DynamicsError(ValueError):
    """Invalid particle state, schedule, or integration request."""


@dataclass(frozen=True)
class ParticleState:
    """Classical point charge: time (s), position (m), velocity (m/s)."""

    t: float
    position: tuple[float, float, float]
    velocity: tuple[float, float, float]
    mass: float
    charge: float

    def __post_init__(self):
        if self.mass <= 0.0:
            raise DynamicsError(f"mass must be > 0, got {self.mass}")
        for c in (self.t, *self.position, *self.velocity, self.charge):
            if not math.isfinite(c):
                raise DynamicsError("non-finite particle state component")


@dataclass(frozen=True)
class RampSchedule:
    """Current schedule I(t): 0 at t = 0, I_final from t_ramp onward.

    shape "smoothstep" uses 3 tau^2 - 2 tau^3 so dI/dt vanishes at both
    ends; "linear" ramps at constant rate. dI/dt is available analytically.
    """

    i_final: float
    t_ramp: float
    shape: str = "smoothstep"

    def __post_init__(self):
        if self.t_ramp <= 0.0:
            raise DynamicsError(f"t_ramp must be > 0, got {self.t_ramp}")
        if self.shape not in ("smoothstep", "linear"):
            raise DynamicsError(f"unknown ramp shape {self.shape!r}")

    def current(self, t: float) -> float:
        tau = min(max(t / self.t_ramp, 0.0), 1.0)
        if self.shape == "linear":
            return self.i_final * tau
        return self.i_final * tau * tau * (3.0 - 2.0 * tau)

    def didt(self, t: float) -> float:
        if t < 0.0 or t > self.t_ramp:
            return 0.0
        tau = t / self.t_ramp
        if self.shape == "linear":
            return self.i_final / self.t_ramp
        return self.i_final * 6.0 * tau * (1.0 - tau) / self.t_ramp


def lorentz_force(state: ParticleState, e_field, b_field) -> np.ndarray:
    """q (E + v x B) in newtons."""
    e = np.asarray(e_field, dtype=float)
    b = np.asarray(b_field, dtype=float)
    v = np.asarray(state.velocity, dtype=float)
    return state.charge * (e + np.cross(v, b))


def induced_e_field(spec: SolenoidSpec, ramp: RampSchedule, x, t: float) -> np.ndarray:
    """E = -dA/dt at fixed position: the unit-current potential scaled by -dI/dt.

    Purely azimuthal; zero once the ramp has finished.
    """
    unit = solenoid_longitudinal_analytic(spec.with_current(1.0), x)
    return -ramp.didt(t) * unit


@dataclass(frozen=True)
class TrajectoryRecord:
    """Sampled trajectory with canonical-momentum conservation diagnostics.

    ``drift`` is |p(t) - p(0)| / |p(0)| per sample (absolute if p(0) = 0).
    ``convective_mag`` and ``dadt_mag`` compare the path term (v . grad) A
    against the explicit time derivative of the potential, sample by
    sample; their ratio tells how good the conservation law can be under
    the induction force model. ``max_curl_check`` is the largest exterior
    curl component seen by the stencil spot checks (should be ~0).
    """

    times: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray
    canonical_momenta: np.ndarray
    drift: np.ndarray
    convective_mag: np.ndarray
    dadt_mag: np.ndarray
    mass: float
    charge: float
    force_model: str
    breach: bool
    max_curl_check: float

    def max_drift(self) -> float:
        return float(np.max(self.drift)) if self.drift.size else 0.0

    def csv_rows(self):
        """Rows t, x, y, z, vx, vy, vz, px, py, pz, drift."""
        for i in range(self.times.size):
            yield (self.times[i], *self.positions[i], *self.velocities[i],
                   *self.canonical_momenta[i], self.drift[i])


def _canonical_momentum(x: np.ndarray, v: np.ndarray, mass: float, charge: float,
                        k: float) -> np.ndarray:
    """m v + q A with the exterior potential A = k (-y, x, 0) / rho^2."""
    rho2 = x[0] * x[0] + x[1] * x[1]
    ax = -k * x[1] / rho2
    ay = k * x[0] / rho2
    return np.array([mass * v[0] + charge * ax,
                     mass * v[1] + charge * ay,
                     mass * v[2]])


def integrate_trajectory(initial: ParticleState, spec: SolenoidSpec,
                         ramp: RampSchedule, dt: float, t_end: float,
                         record_every: int = 1,
                         force_model: str = "induction",
                         curl_check_every: int | None = None) -> TrajectoryRecord:
    """Advance an exterior particle through the current ramp.

    Velocity-Verlet with per-step exterior checks; entering rho <= a
    aborts with the partial record and the breach flag set. Positions are
    assumed in the solenoid's own frame with the axis along z (the default
    spec orientation).
    """
    if dt <= 0.0 or t_end <= initial.t:
        raise DynamicsError("need dt > 0 and t_end > initial.t")
    if not spec.is_infinite:
        raise DynamicsError("trajectory integration assumes the infinite solenoid")
    if force_model not in ("induction", "total_derivative"):
        raise DynamicsError(f"unknown force model {force_model!r}")

    a_coil = spec.a
    c0 = 0.5 * MU_0 * spec.n * spec.a ** 2   # k(t) = c0 * I(t)
    qm = initial.charge / initial.mass
    q = initial.charge
    m = initial.mass

    x = np.array(initial.position, dtype=float)
    v = np.array(initial.velocity, dtype=float)
    t = initial.t
    if math.hypot(x[0], x[1]) <= a_coil:
        raise DynamicsError("initial position must lie outside the solenoid")

    n_steps = int(round((t_end - initial.t) / dt))
    if curl_check_every is None:
        curl_check_every = max(1, n_steps // 32)

    def accel(xp: np.ndarray, vp: np.ndarray, tp: float) -> np.ndarray:
        rho2 = xp[0] * xp[0] + xp[1] * xp[1]
        kdot = c0 * ramp.didt(tp)
        # E = -dA/dt|_x = kdot (y, -x, 0)/rho^2
        ax = qm * kdot * xp[1] / rho2
        ay = -qm * kdot * xp[0] / rho2
        az = 0.0
        if force_model == "total_derivative":
            k = c0 * ramp.current(tp)
            g = k / (rho2 * rho2)
            two_xy = 2.0 * xp[0] * xp[1]
            y2mx2 = xp[1] * xp[1] - xp[0] * xp[0]
            conv_x = g * (two_xy * vp[0] + y2mx2 * vp[1])
            conv_y = g * (y2mx2 * vp[0] - two_xy * vp[1])
            ax -= qm * conv_x
            ay -= qm * conv_y
        return np.array([ax, ay, az])

    k0 = c0 * ramp.current(t)
    p0 = _canonical_momentum(x, v, m, q, k0)
    p0_norm = float(np.linalg.norm(p0))

    times = [t]
    positions = [x.copy()]
    velocities = [v.copy()]
    momenta = [p0]
    drift = [0.0]
    conv_mags = [_convective_mag(x, v, k0)]
    dadt_mags = [abs(c0 * ramp.didt(t)) / math.hypot(x[0], x[1])]
    max_curl = 0.0
    breach = False

    a_vec = accel(x, v, t)
    for step in range(1, n_steps + 1):
        x = x + v * dt + 0.5 * a_vec * dt * dt
        t_next = initial.t + step * dt
        rho = math.hypot(x[0], x[1])
        if rho <= a_coil:
            breach = True
            break
        if force_model == "induction":
            a_new = accel(x, v, t_next)  # force is velocity-independent
            v = v + 0.5 * dt * (a_vec + a_new)
        else:
            # The convective force is linear in v, so the trapezoidal
            # velocity update closes exactly with a 2x2 solve (z decouples).
            rho2 = x[0] * x[0] + x[1] * x[1]
            kdot = c0 * ramp.didt(t_next)
            e_x = qm * kdot * x[1] / rho2
            e_y = -qm * kdot * x[0] / rho2
            k = c0 * ramp.current(t_next)
            g = qm * k / (rho2 * rho2)
            b11 = 0.5 * dt * g * 2.0 * x[0] * x[1]
            b12 = 0.5 * dt * g * (x[1] * x[1] - x[0] * x[0])
            rhs_x = v[0] + 0.5 * dt * (a_vec[0] + e_x)
            rhs_y = v[1] + 0.5 * dt * (a_vec[1] + e_y)
            det = (1.0 + b11) * (1.0 - b11) - b12 * b12
            v = np.array([((1.0 - b11) * rhs_x - b12 * rhs_y) / det,
                          ((1.0 + b11) * rhs_y - b12 * rhs_x) / det,
                          v[2]])
            a_new = accel(x, v, t_next)
        a_vec = a_new
        t = t_next

        if step % record_every == 0 or step == n_steps:
            k = c0 * ramp.current(t)
            p = _canonical_momentum(x, v, m, q, k)
            times.append(t)
            positions.append(x.copy())
            velocities.append(v.copy())
            momenta.append(p)
            dp = float(np.linalg.norm(p - p0))
            drift.append(dp / p0_norm if p0_norm > 0.0 else dp)
            conv_mags.append(_convective_mag(x, v, k))
            dadt_mags.append(abs(c0 * ramp.didt(t)) / rho)
        if curl_check_every and step % curl_check_every == 0 and rho > 1.001 * a_coil:
            inst = spec.with_current(ramp.current(t))
            curl = curl_cylindrical(solenoid_a_field(inst), x)
            max_curl = max(max_curl, float(np.max(np.abs(curl))))

    return TrajectoryRecord(times=np.array(times),
                            positions=np.array(positions),
                            velocities=np.array(velocities),
                            canonical_momenta=np.array(momenta),
                            drift=np.array(drift),
                            convective_mag=np.array(conv_mags),
                            dadt_mag=np.array(dadt_mags),
                            mass=m, charge=q, force_model=force_model,
                            breach=breach, max_curl_check=max_curl)


def _convective_mag(x: np.ndarray, v: np.ndarray, k: float) -> float:
    """|(v . grad) A| for the exterior potential A = k (-y, x, 0)/rho^2."""
    rho2 = x[0] * x[0] + x[1] * x[1]
    g = k / (rho2 * rho2)
    two_xy = 2.0 * x[0] * x[1]
    y2mx2 = x[1] * x[1] - x[0] * x[0]
    cx = g * (two_xy * v[0] + y2mx2 * v[1])
    cy = g * (y2mx2 * v[0] - two_xy * v[1])
    return math.hypot(cx, cy)


@dataclass(frozen=True)
class AngularImpulseResult:
    """Loop integral of the potential momentum q A, with the Planck ratio.

    ``h_ratio`` divides by Planck's constant; it is a diagnostic number
    (the semiclassical quantization reading), nothing is imposed on it.
    """

    value: float            # J*s
    h_ratio: float
    circulation: float      # T*m^2
    error_estimate: float   # T*m^2

    def to_json_dict(self) -> dict:
        return {"angular_impulse_Js": self.value, "h_ratio": self.h_ratio,
                "circulation_Tm2": self.circulation,
                "error_estimate_Tm2": self.error_estimate}


def angular_impulse(loop: ParametricLoop, spec: SolenoidSpec,
                    charge: float) -> AngularImpulseResult:
    """charge times the loop circulation of the analytic exterior potential."""
    res = loop_integral(solenoid_a_field(spec), loop)
    value = charge * res.value
    return AngularImpulseResult(value=value, h_ratio=value / H_PLANCK,
                                circulation=res.value,
                                error_estimate=abs(charge) * res.error_estimate)
