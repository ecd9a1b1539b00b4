"""Point-mass aircraft with an autopilot command abstraction.

The agent never touches stick-level controls.  It issues setpoints
(heading, altitude, throttle); a two-layer loop turns those into a banked
coordinated turn and a rate-limited climb, and the point mass integrates
thrust, drag, and gravity along the flight path.

Integration order inside `step_aircraft` is fixed and part of the engine's
determinism contract:

    1. bank   <- rate-limited toward the commanded bank
    2. climb  <- first-order lag toward the commanded climb rate
    3. psi    <- coordinated-turn rate from the new bank, old speed
    4. v      <- thrust/drag/gravity from the old speed and altitude
    5. x,y,z  <- advanced with the new (v, psi, climb)
    6. ground check

All state is float64 scalars; no randomness anywhere in this module.
"""

import math
from dataclasses import dataclass

from . import atmosphere
from .config import AircraftConfig
from .geom import wrap_pi, wrap_two_pi

G = atmosphere.G0


@dataclass(slots=True)
class AircraftState:
    """Aircraft rigid state in NED coordinates.

    `d` is the down coordinate (negative altitude); `climb` is positive up.
    """
    n: float
    e: float
    d: float
    v: float          # true airspeed, m/s
    psi: float        # heading, rad in [0, 2*pi)
    climb: float      # m/s, positive up
    bank: float       # rad, positive = right wing down
    throttle: float   # [0, 1]
    alive: bool = True
    missiles: int = 0    # unexpended weapons

    @property
    def altitude(self) -> float:
        return -self.d

    @property
    def position(self):
        return (self.n, self.e, self.d)

    @property
    def velocity(self):
        """Inertial velocity 3-vector; |velocity| == v by construction."""
        vh = math.sqrt(max(self.v * self.v - self.climb * self.climb, 0.0))
        return (vh * math.cos(self.psi), vh * math.sin(self.psi), -self.climb)

    def mach(self) -> float:
        return atmosphere.mach(self.v, self.altitude)


@dataclass(slots=True)
class AutopilotSetpoints:
    heading: float    # rad
    altitude: float   # m
    throttle: float   # [0, 1]


@dataclass(slots=True)
class InnerLoopCommand:
    bank_cmd: float    # rad
    climb_cmd: float   # m/s
    throttle: float


def autopilot(state: AircraftState, sp: AutopilotSetpoints,
              acf: AircraftConfig) -> InnerLoopCommand:
    """Map setpoints to bank/climb/throttle commands.

    Proportional in both channels.  The climb command saturates at
    acf.climb_max, i.e. altitude errors beyond climb_max / kp_alt
    (1500 m with the default gains) all demand the same maximum-rate
    climb or descent.  Below acf.v_floor + 20 m/s the bank authority is
    faded out and climbs are inhibited so a slow aircraft recovers
    instead of deepening the energy deficit.
    """
    err_psi = wrap_pi(sp.heading - state.psi)
    max_bank = math.radians(acf.max_bank_deg)
    bank_cmd = min(max(acf.kp_heading * err_psi, -max_bank), max_bank)

    err_alt = sp.altitude - state.altitude
    climb_cmd = min(max(acf.kp_alt * err_alt, -acf.climb_max), acf.climb_max)

    margin = (state.v - acf.v_floor) / 20.0
    if margin < 1.0:
        bank_cmd *= min(max(margin, 0.0), 1.0)
        if state.v < acf.v_floor:
            climb_cmd = min(climb_cmd, 0.0)

    throttle = min(max(sp.throttle, 0.0), 1.0)
    return InnerLoopCommand(bank_cmd, climb_cmd, throttle)


def thrust_available(throttle: float, alt: float, acf: AircraftConfig) -> float:
    """Installed thrust [N]: density lapse times a cubic throttle map."""
    lapse = (atmosphere.density(alt) / atmosphere.RHO0) ** acf.thrust_lapse_exp
    return acf.thrust_max * lapse * throttle ** 3


def step_aircraft(state: AircraftState, cmd: InnerLoopCommand,
                  acf: AircraftConfig, dt: float) -> AircraftState:
    """Advance one physics tick; pure, returns a new state."""
    # 1. bank, slew-limited
    rate = math.radians(acf.bank_rate_limit_deg)
    db = cmd.bank_cmd - state.bank
    db = min(max(db, -rate * dt), rate * dt)
    bank = state.bank + db

    # 2. climb rate, first-order lag with vertical-accel clamp
    cdot = (cmd.climb_cmd - state.climb) / acf.climb_tau
    cdot = min(max(cdot, -acf.accel_z_max), acf.accel_z_max)
    climb = state.climb + cdot * dt
    cmax = 0.8 * state.v     # keep the flight path physical at low speed
    climb = min(max(climb, -cmax), cmax)

    # 3. coordinated turn
    psi = wrap_two_pi(state.psi + G * math.tan(bank) / state.v * dt)

    # 4. airspeed from thrust - drag - gravity along path
    alt = state.altitude
    rho = atmosphere.density(alt)
    q = 0.5 * rho * state.v * state.v
    qs = q * acf.wing_area
    # Coordinated turn wants L = m g / cos(bank); cap at CL_max.  When the
    # cap binds, the achievable bank shrinks accordingly and the turn slows.
    cl_need = acf.mass * G / (qs * math.cos(bank)) if qs > 0.0 else acf.cl_max
    cl = min(cl_need, acf.cl_max)
    if cl_need > acf.cl_max:
        cos_eff = min(1.0, acf.mass * G / (qs * acf.cl_max)) if qs > 0.0 else 1.0
        psi = wrap_two_pi(state.psi
                          + G * math.tan(math.copysign(math.acos(cos_eff), bank))
                          / state.v * dt)
    drag = qs * (acf.cd0 + acf.induced_k * cl * cl)
    thrust = thrust_available(cmd.throttle, alt, acf)
    sin_gamma = climb / state.v if state.v > 0.0 else 0.0
    vdot = (thrust - drag) / acf.mass - G * sin_gamma
    v = max(state.v + vdot * dt, 1.0)

    # 5. advance position with the updated velocity
    vh = math.sqrt(max(v * v - climb * climb, 0.0))
    n = state.n + vh * math.cos(psi) * dt
    e = state.e + vh * math.sin(psi) * dt
    d = state.d - climb * dt

    alive = state.alive and d < 0.0
    return AircraftState(n=n, e=e, d=d, v=v, psi=psi, climb=climb,
                         bank=bank, throttle=cmd.throttle, alive=alive,
                         missiles=state.missiles)
