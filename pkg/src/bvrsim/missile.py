"""Long-range air-to-air missile: boost, climb/cruise, PN endgame.

Point mass with constant mass, axial boost thrust, quadratic drag against
standard-atmosphere density, and full gravity.  Guidance by phase:

    boost   - axial thrust; velocity steered toward the target bearing at
              the configured climb angle (or level once above cruise alt)
    climb   - no thrust; hold cruise altitude, heading to the target
    guided  - true proportional navigation, lateral accel clamped at 40 g

Phases advance one-way (boost -> climb -> guided -> terminated).  Guidance
(`guided`) engages once past boost when the missile is within the cruise
altitude band or closer than the activation range — the range override
keeps short shots from lofting past the target.

Tick order in `step_missile` is fixed (determinism contract): phase
update, guidance, force integration, position advance, closest-approach
update, clocks, opening-range bookkeeping, ground/speed-floor expiry.
"""

import math
from dataclasses import dataclass
from typing import Optional

from . import atmosphere
from .airframe import AircraftState
from .config import MissileConfig
from .geom import norm3

G = atmosphere.G0

# Phase labels (one-way progression).
BOOST = "boost"
CLIMB = "climb"
GUIDED = "guided"
TERMINATED = "terminated"

# Outcome labels.
ACTIVE = "active"
HIT = "hit"
EXPIRED = "expired"

# Steering authority outside the PN endgame; generous but below the
# terminal 40 g limit so boost/climb shaping stays gentle.
_STEER_G = 25.0
# Proportional gain [rad per m of altitude error] shaping the climb-phase
# flight-path angle toward cruise altitude.
_GAMMA_GAIN = 0.0005


@dataclass(slots=True)
class MissileState:
    mid: str              # unit identifier, e.g. "R0"
    target_id: str        # "blue" or "red"
    n: float
    e: float
    d: float              # down, m (altitude = -d)
    vn: float
    ve: float
    vd: float
    phase: str = BOOST
    outcome: str = ACTIVE
    launch_n: float = 0.0
    launch_e: float = 0.0
    launch_d: float = 0.0
    nu: float = 0.0       # launch speed, m/s
    tau: float = 0.0      # time since launch, s
    burn: float = 0.0     # boost time remaining, s
    md: float = math.inf  # min distance to target so far, m
    last_range: float = math.inf
    opening_time: float = 0.0  # consecutive seconds of opening range

    @property
    def position(self):
        return (self.n, self.e, self.d)

    @property
    def velocity(self):
        return (self.vn, self.ve, self.vd)

    @property
    def speed(self) -> float:
        return math.sqrt(self.vn ** 2 + self.ve ** 2 + self.vd ** 2)

    @property
    def altitude(self) -> float:
        return -self.d

    @property
    def launch_position(self):
        return (self.launch_n, self.launch_e, self.launch_d)

    @property
    def launch_altitude(self) -> float:
        return -self.launch_d

    @property
    def active(self) -> bool:
        return self.outcome == ACTIVE

    def mach(self) -> float:
        return atmosphere.mach(self.speed, self.altitude)


def launch_missile(shooter: AircraftState, target_id: str, params: MissileConfig,
                   target: AircraftState, mid: str = "M0") -> MissileState:
    """Create a missile off the shooter's rail, aligned at the target.

    Decrements the shooter's weapon count in place.  Initial speed is the
    shooter's airspeed; initial direction is the level bearing toward the
    target's current position.
    """
    if not shooter.alive:
        raise ValueError("shooter not alive")
    if shooter.missiles < 1:
        raise ValueError("out of weapons")
    shooter.missiles -= 1

    dn = target.n - shooter.n
    de = target.e - shooter.e
    rng = math.hypot(dn, de)
    if rng > 0.0:
        un, ue = dn / rng, de / rng
    else:
        un, ue = math.cos(shooter.psi), math.sin(shooter.psi)
    v0 = shooter.v
    return MissileState(
        mid=mid, target_id=target_id,
        n=shooter.n, e=shooter.e, d=shooter.d,
        vn=v0 * un, ve=v0 * ue, vd=0.0,
        phase=BOOST, outcome=ACTIVE,
        launch_n=shooter.n, launch_e=shooter.e, launch_d=shooter.d,
        nu=v0, tau=0.0, burn=params.boost_time,
        md=_range_to(shooter.n, shooter.e, shooter.d, target),
        last_range=_range_to(shooter.n, shooter.e, shooter.d, target),
    )


def _range_to(n: float, e: float, d: float, target: AircraftState) -> float:
    return math.sqrt((target.n - n) ** 2 + (target.e - e) ** 2 + (target.d - d) ** 2)


def pn_lateral_accel(missile: MissileState, target: AircraftState,
                     n_gain: float, accel_limit_g: float = 40.0):
    """True proportional navigation acceleration command [m/s^2].

    Uses the vector form: LOS rate Omega = (r x v_rel) / (r . r), command
    a = N * Omega x v_m.  The result is perpendicular to the missile
    velocity by construction and clamped to accel_limit_g.
    """
    rn = target.n - missile.n
    re = target.e - missile.e
    rd = target.d - missile.d
    rr = rn * rn + re * re + rd * rd
    if rr == 0.0:
        raise ValueError("target coincident with missile")
    tvn, tve, tvd = target.velocity
    wn = tvn - missile.vn
    we = tve - missile.ve
    wd = tvd - missile.vd
    # Omega = (r x v_rel) / (r . r)
    on = (re * wd - rd * we) / rr
    oe = (rd * wn - rn * wd) / rr
    od = (rn * we - re * wn) / rr
    # a = N * Omega x v_m
    an = n_gain * (oe * missile.vd - od * missile.ve)
    ae = n_gain * (od * missile.vn - on * missile.vd)
    ad = n_gain * (on * missile.ve - oe * missile.vn)
    mag = math.sqrt(an * an + ae * ae + ad * ad)
    limit = accel_limit_g * G
    if mag > limit:
        scale = limit / mag
        an, ae, ad = an * scale, ae * scale, ad * scale
    return (an, ae, ad)


def _steer_toward(vn: float, ve: float, vd: float, un: float, ue: float, ud: float,
                  max_angle: float):
    """Rotate velocity toward the unit direction by at most max_angle [rad]."""
    speed = math.sqrt(vn * vn + ve * ve + vd * vd)
    if speed == 0.0:
        return vn, ve, vd
    cn, ce, cd = vn / speed, ve / speed, vd / speed
    dot = min(max(cn * un + ce * ue + cd * ud, -1.0), 1.0)
    angle = math.acos(dot)
    if angle < 1e-12:
        return vn, ve, vd
    frac = min(1.0, max_angle / angle)
    # slerp between current and desired unit vectors
    s = math.sin(angle)
    w0 = math.sin((1.0 - frac) * angle) / s
    w1 = math.sin(frac * angle) / s
    nn = w0 * cn + w1 * un
    ne = w0 * ce + w1 * ue
    nd = w0 * cd + w1 * ud
    nrm = math.sqrt(nn * nn + ne * ne + nd * nd)
    return speed * nn / nrm, speed * ne / nrm, speed * nd / nrm


def _desired_direction(missile: MissileState, target: AircraftState,
                       params: MissileConfig):
    """Unit direction for boost/climb shaping: at the target, lofted."""
    dn = target.n - missile.n
    de = target.e - missile.e
    hr = math.hypot(dn, de)
    if hr > 0.0:
        un, ue = dn / hr, de / hr
    else:
        sp = math.hypot(missile.vn, missile.ve)
        un, ue = (missile.vn / sp, missile.ve / sp) if sp > 0.0 else (1.0, 0.0)
    gamma_max = math.radians(params.climb_angle_deg)
    if missile.phase == BOOST:
        gamma = gamma_max if missile.altitude < params.cruise_alt else 0.0
    else:
        gamma = min(max(_GAMMA_GAIN * (params.cruise_alt - missile.altitude),
                        -gamma_max), gamma_max)
    cg, sg = math.cos(gamma), math.sin(gamma)
    return un * cg, ue * cg, -sg


def step_missile(missile: MissileState, target: AircraftState, dt: float,
                 params: MissileConfig) -> MissileState:
    """Advance one physics tick; pure, returns a new state.

    The closest-approach update is segment-based: it takes the minimum
    distance over the tick assuming both endpoints move linearly, so a
    50 Hz step does not miss a sub-tick flyby.
    """
    if not missile.active:
        return missile

    rng0 = _range_to(missile.n, missile.e, missile.d, target)

    # Phase transitions (one-way).
    phase = missile.phase
    if phase == BOOST and missile.burn <= 0.0:
        phase = CLIMB
    if phase == CLIMB and (
            abs(missile.altitude - params.cruise_alt) <= params.activation_alt_band
            or rng0 < params.activation_range):
        phase = GUIDED

    vn, ve, vd = missile.vn, missile.ve, missile.vd
    speed = math.sqrt(vn * vn + ve * ve + vd * vd)
    rho = atmosphere.density(min(max(missile.altitude, -100.0), 31000.0))
    drag_acc = 0.5 * rho * speed * params.cda / params.mass  # per unit velocity

    if phase == GUIDED:
        an, ae, ad = pn_lateral_accel(missile, target, params.nav_gain,
                                      params.accel_limit_g)
        # The autopilot trims the cross-axis gravity component
        # (gravity-compensated PN); only the along-path part of gravity
        # remains, so dives still buy speed and climbs still cost it.
        g_along = G * vd / speed if speed > 0.0 else 0.0
        vn1 = vn + (an - drag_acc * vn + g_along * vn / speed) * dt
        ve1 = ve + (ae - drag_acc * ve + g_along * ve / speed) * dt
        vd1 = vd + (ad - drag_acc * vd + g_along * vd / speed) * dt
    else:
        un, ue, ud = _desired_direction(missile, target, params)
        max_turn = _STEER_G * G / speed * dt if speed > 0.0 else 0.0
        vn, ve, vd = _steer_toward(vn, ve, vd, un, ue, ud, max_turn)
        thrust = params.boost_accel if phase == BOOST else 0.0
        sp = math.sqrt(vn * vn + ve * ve + vd * vd)
        axn, axe, axd = (vn / sp, ve / sp, vd / sp) if sp > 0.0 else (0.0, 0.0, 0.0)
        vn1 = vn + (thrust * axn - drag_acc * vn) * dt
        ve1 = ve + (thrust * axe - drag_acc * ve) * dt
        vd1 = vd + (thrust * axd - drag_acc * vd + G) * dt

    n1 = missile.n + vn1 * dt
    e1 = missile.e + ve1 * dt
    d1 = missile.d + vd1 * dt

    # Closest approach over the tick: relative segment between the missile
    # path and the target's linear motion.
    tvn, tve, tvd = target.velocity
    r0n = target.n - missile.n
    r0e = target.e - missile.e
    r0d = target.d - missile.d
    drn = (tvn - vn1) * dt
    dre = (tve - ve1) * dt
    drd = (tvd - vd1) * dt
    dr2 = drn * drn + dre * dre + drd * drd
    if dr2 > 0.0:
        s = -(r0n * drn + r0e * dre + r0d * drd) / dr2
        s = min(max(s, 0.0), 1.0)
    else:
        s = 0.0
    cn = r0n + s * drn
    ce = r0e + s * dre
    cd = r0d + s * drd
    seg_min = math.sqrt(cn * cn + ce * ce + cd * cd)
    md = min(missile.md, seg_min)

    rng1 = norm3((r0n + drn, r0e + dre, r0d + drd))
    opening = missile.opening_time + dt if rng1 > missile.last_range else 0.0

    tau = missile.tau + dt
    burn = max(missile.burn - dt, 0.0) if phase == BOOST else missile.burn

    outcome = ACTIVE
    if d1 >= 0.0:
        outcome = EXPIRED          # ground impact
    elif phase != BOOST and math.sqrt(vn1 ** 2 + ve1 ** 2 + vd1 ** 2) < params.v_min:
        outcome = EXPIRED          # too slow to ever close
    if outcome != ACTIVE:
        phase = TERMINATED

    return MissileState(
        mid=missile.mid, target_id=missile.target_id,
        n=n1, e=e1, d=d1, vn=vn1, ve=ve1, vd=vd1,
        phase=phase, outcome=outcome,
        launch_n=missile.launch_n, launch_e=missile.launch_e,
        launch_d=missile.launch_d,
        nu=missile.nu, tau=tau, burn=burn, md=md,
        last_range=rng1, opening_time=opening,
    )


def check_terminal(missile: MissileState, target: AircraftState,
                   params: MissileConfig) -> Optional[str]:
    """Resolve hit/expiry; returns the new outcome or None if still active.

    Hit: the closest approach so far is inside the kill radius (checked
    every tick, so this fires on the tick the crossing happens).  Expired:
    boost complete, slower than the target, and the range has opened for
    give_up_time consecutive seconds.  Mutates the missile's outcome/md.
    """
    if not missile.active:
        return missile.outcome
    if missile.md < params.r_hit:
        missile.outcome = HIT
        missile.phase = TERMINATED
        missile.md = 0.0
        return HIT
    if (missile.burn <= 0.0 and missile.speed < target.v
            and missile.opening_time >= params.give_up_time):
        missile.outcome = EXPIRED
        missile.phase = TERMINATED
        return EXPIRED
    return None
