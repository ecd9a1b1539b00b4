"""Angle and vector helpers shared across the simulation.

Frame: NED (north, east, down), SI units.  Headings are compass angles in
radians: 0 = north, increasing clockwise (toward east).
"""

import math

TWO_PI = 2.0 * math.pi


def wrap_pi(angle: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    a = math.fmod(angle, TWO_PI)
    if a > math.pi:
        a -= TWO_PI
    elif a <= -math.pi:
        a += TWO_PI
    return a


def wrap_two_pi(angle: float) -> float:
    """Wrap an angle to [0, 2*pi)."""
    a = math.fmod(angle, TWO_PI)
    if a < 0.0:
        a += TWO_PI
    return a


def bearing_to(from_n: float, from_e: float, to_n: float, to_e: float) -> float:
    """Compass bearing [rad, [0, 2pi)) of the target seen from the origin point."""
    return wrap_two_pi(math.atan2(to_e - from_e, to_n - from_n))


def ground_range(from_n: float, from_e: float, to_n: float, to_e: float) -> float:
    """Horizontal (map) distance in m."""
    return math.hypot(to_n - from_n, to_e - from_e)


def distance3(a, b) -> float:
    """Euclidean distance between two 3-vectors."""
    return math.sqrt((a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2 + (a[2] - b[2]) ** 2)


def norm3(a) -> float:
    return math.sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2])
