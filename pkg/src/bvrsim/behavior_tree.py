"""Minimal behavior trees and the built-in red-team policy.

Node kinds: Sequence, Fallback (control) and Condition, Action (leaves).
Ticks are memoryless — no Running-state resumption, no Parallel node —
because every action here is an instantaneous setpoint write.  Leaves are
callback names resolved against a registry at construction time, and a
tree can be written as a small text expression, e.g.::

    fallback(
      sequence(threat_detected, evade_threat),
      approach_opponent)

Control nodes must have at least one child; leaves none.  Malformed trees
fail at construction, never at tick.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

from .airframe import AircraftState, AutopilotSetpoints
from .config import RedPolicyConfig
from .geom import bearing_to, wrap_pi

SUCCESS = "success"
FAILURE = "failure"
RUNNING = "running"

SEQUENCE = "sequence"
FALLBACK = "fallback"
CONDITION = "condition"
ACTION = "action"


class BtNode:
    """Immutable tree node; shareable read-only across worlds."""

    __slots__ = ("kind", "children", "name", "fn")

    def __init__(self, kind: str, children: Optional[List["BtNode"]] = None,
                 name: str = "", fn: Optional[Callable] = None):
        if kind in (SEQUENCE, FALLBACK):
            if not children:
                raise ValueError(f"{kind} node needs at least one child")
            if fn is not None:
                raise ValueError("control nodes take no callback")
        elif kind in (CONDITION, ACTION):
            if children:
                raise ValueError("leaf nodes take no children")
            if fn is None:
                raise ValueError(f"leaf {name!r} has no callback")
        else:
            raise ValueError(f"unknown node kind {kind!r}")
        self.kind = kind
        self.children = tuple(children or ())
        self.name = name
        self.fn = fn


def tick(node: BtNode, bb) -> str:
    """Evaluate the tree against a blackboard; pure in (tree, bb)."""
    if node.kind == SEQUENCE:
        for child in node.children:
            status = tick(child, bb)
            if status != SUCCESS:
                return status
        return SUCCESS
    if node.kind == FALLBACK:
        for child in node.children:
            status = tick(child, bb)
            if status != FAILURE:
                return status
        return FAILURE
    if node.kind == CONDITION:
        return SUCCESS if node.fn(bb) else FAILURE
    # action: may return a status; a bare return means Success
    result = node.fn(bb)
    return SUCCESS if result is None else result


# ---------------------------------------------------------------------------
# Text format

def parse_tree(text: str, registry: Dict[str, Tuple[str, Callable]]) -> BtNode:
    """Build a tree from `kind(child, ...)` / leaf-name expressions.

    The registry maps leaf names to (kind, callback) with kind
    "condition" or "action".  Unknown names and syntax errors raise
    ValueError at parse time.
    """
    tokens = _tokenize(text)
    pos = 0

    def parse_node():
        nonlocal pos
        if pos >= len(tokens):
            raise ValueError("unexpected end of tree expression")
        tok = tokens[pos]
        if tok in ("(", ")", ","):
            raise ValueError(f"unexpected {tok!r}")
        pos += 1
        if pos < len(tokens) and tokens[pos] == "(":
            if tok not in (SEQUENCE, FALLBACK):
                raise ValueError(f"unknown control kind {tok!r}")
            pos += 1  # consume "("
            children = [parse_node()]
            while pos < len(tokens) and tokens[pos] == ",":
                pos += 1
                children.append(parse_node())
            if pos >= len(tokens) or tokens[pos] != ")":
                raise ValueError("missing ')'")
            pos += 1
            return BtNode(tok, children=children)
        if tok not in registry:
            raise ValueError(f"unknown leaf {tok!r}")
        kind, fn = registry[tok]
        return BtNode(kind, name=tok, fn=fn)

    root = parse_node()
    if pos != len(tokens):
        raise ValueError(f"trailing tokens: {tokens[pos:]}")
    return root


def _tokenize(text: str) -> List[str]:
    out: List[str] = []
    word = ""
    for ch in text:
        if ch.isalnum() or ch == "_":
            word += ch
            continue
        if word:
            out.append(word)
            word = ""
        if ch in "(),":
            out.append(ch)
        elif not ch.isspace():
            raise ValueError(f"bad character {ch!r} in tree expression")
    if word:
        out.append(word)
    return out


# ---------------------------------------------------------------------------
# Red-team policy

@dataclass
class Blackboard:
    """Red's world view.

    Deliberately excludes opponent missile kinematics: incoming weapons
    are visible only as (launch time, launch position) events, mirroring
    a launch-warning picture rather than a missile track.
    """
    own: AircraftState
    opponent_position: Tuple[float, float, float]
    opponent_velocity: Tuple[float, float, float]
    incoming_launches: Tuple[Tuple[float, Tuple[float, float, float]], ...]
    time_now: float
    missiles_remaining: int
    own_missile_active: bool
    cfg: RedPolicyConfig
    launch_envelope: float
    align_gate_deg: float
    # outputs (written by action leaves)
    setpoints: Optional[AutopilotSetpoints] = None
    launch: bool = False
    action_log: List[str] = field(default_factory=list)


def _latest_threat(bb: Blackboard):
    best = None
    for t, pos in bb.incoming_launches:
        if bb.time_now - t <= bb.cfg.threat_window and (best is None or t >= best[0]):
            best = (t, pos)
    return best


def _opponent_bearing(bb: Blackboard) -> float:
    op = bb.opponent_position
    return bearing_to(bb.own.n, bb.own.e, op[0], op[1])


def _opponent_range(bb: Blackboard) -> float:
    op = bb.opponent_position
    return math.hypot(op[0] - bb.own.n, op[1] - bb.own.e)


def _threat_detected(bb: Blackboard) -> bool:
    return _latest_threat(bb) is not None


def _evade_threat(bb: Blackboard):
    # Dive away from the launch point: denser air drains the shot's energy.
    _, pos = _latest_threat(bb)
    away = bearing_to(bb.own.n, bb.own.e, pos[0], pos[1]) + math.pi
    bb.setpoints = AutopilotSetpoints(heading=away % (2.0 * math.pi),
                                      altitude=bb.cfg.evade_alt, throttle=1.0)
    bb.action_log.append("evade_threat")


def _own_missile_active(bb: Blackboard) -> bool:
    return bb.own_missile_active


def _support_missile(bb: Blackboard):
    # Crank: keep the target roughly on the beam while the shot flies.
    brg = _opponent_bearing(bb)
    side = 1.0 if wrap_pi(bb.own.psi - brg) >= 0.0 else -1.0
    hdg = (brg + side * math.radians(bb.cfg.crank_angle_deg)) % (2.0 * math.pi)
    bb.setpoints = AutopilotSetpoints(heading=hdg, altitude=bb.cfg.approach_alt,
                                      throttle=1.0)
    bb.action_log.append("support_missile")


def _can_engage(bb: Blackboard) -> bool:
    return bb.missiles_remaining > 0 and _opponent_range(bb) <= bb.launch_envelope


def _engage_target(bb: Blackboard):
    brg = _opponent_bearing(bb)
    err = wrap_pi(brg - bb.own.psi)
    bb.setpoints = AutopilotSetpoints(heading=brg, altitude=bb.cfg.approach_alt,
                                      throttle=1.0)
    if abs(err) < math.radians(bb.align_gate_deg):
        bb.launch = True
    bb.action_log.append("engage_target")


def _approach_opponent(bb: Blackboard):
    bb.setpoints = AutopilotSetpoints(heading=_opponent_bearing(bb),
                                      altitude=bb.cfg.approach_alt, throttle=1.0)
    bb.action_log.append("approach_opponent")


RED_CALLBACKS: Dict[str, Tuple[str, Callable]] = {
    "threat_detected": (CONDITION, _threat_detected),
    "evade_threat": (ACTION, _evade_threat),
    "own_missile_active": (CONDITION, _own_missile_active),
    "support_missile": (ACTION, _support_missile),
    "can_engage": (CONDITION, _can_engage),
    "engage_target": (ACTION, _engage_target),
    "approach_opponent": (ACTION, _approach_opponent),
}

# Survival on the left, offense on the right, pursuit as the default.
RED_TREE_TEXT = """
fallback(
  sequence(threat_detected, evade_threat),
  fallback(
    sequence(own_missile_active, support_missile),
    sequence(can_engage, engage_target)),
  approach_opponent)
"""

_RED_TREE: Optional[BtNode] = None


def red_tree() -> BtNode:
    global _RED_TREE
    if _RED_TREE is None:
        _RED_TREE = parse_tree(RED_TREE_TEXT, RED_CALLBACKS)
    return _RED_TREE


def red_policy_tick(bb: Blackboard, tree: Optional[BtNode] = None
                    ) -> Tuple[AutopilotSetpoints, bool]:
    """Tick the red policy; returns (setpoints, launch flag)."""
    bb.setpoints = None
    bb.launch = False
    bb.action_log = []
    tick(tree if tree is not None else red_tree(), bb)
    if bb.setpoints is None:
        raise RuntimeError("red policy produced no command")
    return bb.setpoints, bb.launch
