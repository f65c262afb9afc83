"""
fieldcover - coverage path planning for agricultural fields with obstacles.

Closed-form lengths of the three headland turn maneuvers and the
minimum-length turn selector.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum

from fieldcover.core.errors import TurnDomainError
from fieldcover.core.tracks import MachineSpec

logger = logging.getLogger(__name__)

# Relative slack on the d = 2 r_min boundary shared by Omega and Pi.
_BOUNDARY_SLACK = 1e-12


class TurnKind(str, Enum):
    """Headland maneuver used to reach the next track."""

    OMEGA = "omega"
    PI = "pi"
    TEE = "tee"


class TeeFormula(str, Enum):
    """
    Variant of the reversing-turn length.

    ``paper`` evaluates arccos((d + 2) / (4 r_min)) exactly as published;
    ``normalized`` uses (d + 2 r_min) / (4 r_min), which is dimensionally
    consistent and scale covariant.
    """

    PAPER = "paper"
    NORMALIZED = "normalized"


@dataclass(frozen=True)
class TurnCost:
    length: float
    kind: TurnKind


def _check_radius(r_min: float) -> None:
    if not (r_min > 0 and math.isfinite(r_min)):
        raise TurnDomainError(f"r_min must be positive, got {r_min}")


def omega_length(d: float, r_min: float) -> float:
    """
    Loop turn: r_min (3 pi - 4 asin((2 r_min + d) / (4 r_min))).

    Raises:
        TurnDomainError: Unless 0 < d <= 2 r_min
    """
    _check_radius(r_min)
    if not 0 < d <= 2 * r_min * (1 + _BOUNDARY_SLACK):
        raise TurnDomainError(f"omega turn needs 0 < d <= 2*r_min, got d={d}, r_min={r_min}")
    arg = min(1.0, (2 * r_min + d) / (4 * r_min))
    return r_min * (3 * math.pi - 4 * math.asin(arg))


def pi_length(d: float, r_min: float) -> float:
    """
    Rounded-corner turn: d + (pi - 2) r_min.

    Raises:
        TurnDomainError: If d < 2 r_min
    """
    _check_radius(r_min)
    if d < 2 * r_min * (1 - _BOUNDARY_SLACK):
        raise TurnDomainError(f"pi turn needs d >= 2*r_min, got d={d}, r_min={r_min}")
    return d + (math.pi - 2) * r_min


def tee_length(d: float, r_min: float, formula: TeeFormula = TeeFormula.PAPER) -> float:
    """
    Reversing turn: r_min (2 pi + acos(x)) with x = (d + 2) / (4 r_min),
    or x = (d + 2 r_min) / (4 r_min) for the normalized variant.

    Raises:
        TurnDomainError: If x falls outside [-1, 1]
    """
    _check_radius(r_min)
    offset = 2.0 if TeeFormula(formula) is TeeFormula.PAPER else 2.0 * r_min
    arg = (d + offset) / (4 * r_min)
    if not -1.0 <= arg <= 1.0:
        raise TurnDomainError(f"tee turn arccos argument {arg:.6g} outside [-1, 1]")
    return r_min * (2 * math.pi + math.acos(arg))


def min_turn(
    d: float, spec: MachineSpec, tee_formula: TeeFormula = TeeFormula.PAPER
) -> TurnCost:
    """
    Shortest feasible maneuver between tracks whose centers are d apart.

    Pi wins whenever d >= 2 r_min; otherwise the shorter of Omega and
    (when the machine reverses) Tee, ties going to Omega.

    Raises:
        TurnDomainError: If no maneuver is feasible
    """
    r_min = spec.r_min
    if not d > 0:
        raise TurnDomainError(f"turn distance must be positive, got {d}")
    if d >= 2 * r_min * (1 - _BOUNDARY_SLACK):
        return TurnCost(pi_length(d, r_min), TurnKind.PI)

    best = TurnCost(omega_length(d, r_min), TurnKind.OMEGA)
    if spec.reverse_capable:
        try:
            tee = tee_length(d, r_min, tee_formula)
        except TurnDomainError:
            logger.debug("tee turn infeasible for d=%s, r_min=%s", d, r_min)
        else:
            if tee < best.length:
                best = TurnCost(tee, TurnKind.TEE)
    return best
