"""Standard atmosphere (ISA), sea level to 32 km.

Piecewise-linear temperature layers with the barometric pressure formula;
all quantities SI.  Altitude is geometric height above sea level in m.
"""

import math

G0 = 9.80665        # m/s^2
R_AIR = 287.05287   # J/(kg K)
GAMMA = 1.4

RHO0 = 1.225        # kg/m^3 at sea level
T0 = 288.15         # K
P0 = 101325.0       # Pa

# Layer base altitude [m], base temperature [K], lapse rate [K/m].
# Base pressures are derived once at import so layers stay consistent.
_LAYERS = [
    (0.0, 288.15, -0.0065),
    (11000.0, 216.65, 0.0),
    (20000.0, 216.65, 0.001),
]
_ALT_MIN = -2000.0
_ALT_MAX = 32000.0


def _base_pressures() -> list:
    ps = [P0]
    for i in range(1, len(_LAYERS)):
        hb, tb, lapse = _LAYERS[i - 1]
        h_top = _LAYERS[i][0]
        ps.append(_pressure_in_layer(h_top, hb, tb, lapse, ps[-1]))
    return ps


def _pressure_in_layer(h: float, hb: float, tb: float, lapse: float, pb: float) -> float:
    if lapse == 0.0:
        return pb * math.exp(-G0 * (h - hb) / (R_AIR * tb))
    return pb * (1.0 + lapse * (h - hb) / tb) ** (-G0 / (R_AIR * lapse))


_BASE_P = _base_pressures()


def _layer_index(alt: float) -> int:
    if not _ALT_MIN <= alt <= _ALT_MAX:
        raise ValueError(f"altitude {alt:.1f} m outside supported range "
                         f"[{_ALT_MIN:.0f}, {_ALT_MAX:.0f}]")
    idx = 0
    for i, (hb, _, _) in enumerate(_LAYERS):
        if alt >= hb:
            idx = i
    return idx


def temperature(alt: float) -> float:
    """Static air temperature [K]."""
    i = _layer_index(alt)
    hb, tb, lapse = _LAYERS[i]
    return tb + lapse * (alt - hb)


def pressure(alt: float) -> float:
    """Static pressure [Pa]."""
    i = _layer_index(alt)
    hb, tb, lapse = _LAYERS[i]
    return _pressure_in_layer(alt, hb, tb, lapse, _BASE_P[i])


def density(alt: float) -> float:
    """Air density [kg/m^3]."""
    return pressure(alt) / (R_AIR * temperature(alt))


def speed_of_sound(alt: float) -> float:
    """Local speed of sound [m/s]."""
    return math.sqrt(GAMMA * R_AIR * temperature(alt))


def mach(speed: float, alt: float) -> float:
    """Mach number for true airspeed [m/s] at altitude [m]."""
    return speed / speed_of_sound(alt)
