"""Closed-form ingredients of the cubic elastodynamics model.

The system is

    v_t - sigma(w)_x = 0,    w_t - v_x = 0,

with stress ``sigma(w) = w**3 + m*w`` and linear kinetic functions
``phi_flat(w) = -beta*w`` for both families.  Every function here accepts
Python floats or numpy arrays.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

RH_TOL = 1e-9


@dataclass(frozen=True)
class ModelParams:
    """Stress coefficient ``m`` and kinetic slope ``beta``."""

    m: float
    beta: float

    def __post_init__(self):
        if not np.isfinite(self.m) or self.m <= 0.0:
            raise ValueError(f"stress coefficient m must be > 0, got {self.m}")
        if not 0.5 <= self.beta <= 1.0:
            raise ValueError(f"kinetic slope beta must lie in [1/2, 1], got {self.beta}")


class State(NamedTuple):
    v: float
    w: float


class ShockClass(enum.Enum):
    LIU_CLASSICAL = "LiuClassical"
    NONCLASSICAL = "Nonclassical"
    NOT_ENTROPY_SATISFYING = "NotEntropySatisfying"


def stress(params: ModelParams, w):
    return w * w * w + params.m * w


def stress_derivative(params: ModelParams, w):
    return 3.0 * w * w + params.m


def sound_speed(params: ModelParams, w):
    return np.sqrt(stress_derivative(params, w))


def stress_antiderivative(params: ModelParams, w):
    """Integral of sigma from 0 to ``w``."""
    return 0.25 * w**4 + 0.5 * params.m * w * w


def shock_speed(params: ModelParams, wL, wR):
    """Positive speed magnitude of a shock joining strains ``wL`` and ``wR``.

    For the cubic stress the chord slope is ``wL**2 + wL*wR + wR**2 + m``,
    which equals ``sigma'(w)`` when the strains coincide, so no special case
    is needed at ``wL == wR``.
    """
    return np.sqrt((wL * wL + wR * wR) + wL * wR + params.m)


def hugoniot_forward_v(params: ModelParams, wR, vL, wL):
    """Velocity on the right of a 1-shock leaving ``(vL, wL)`` towards ``wR``."""
    return vL + shock_speed(params, wL, wR) * (wR - wL)


def hugoniot_backward_v(params: ModelParams, wL, vR, wR):
    """Velocity on the left of a 2-shock arriving at ``(vR, wR)`` from ``wL``."""
    return vR - shock_speed(params, wL, wR) * (wL - wR)


# Threshold and kinetic functions.  Their closed forms are specific to the
# cubic stress law.

def phi_natural(w):
    return -0.5 * w


def phi_natural_inverse(w):
    return -2.0 * w


def phi_flat_inf(w):
    return -w


def phi_sharp(w, w_other):
    return -w - w_other


def phi_flat(params: ModelParams, w):
    return -params.beta * w


def phi_flat_inverse(params: ModelParams, w):
    return -w / params.beta


def entropy(params: ModelParams, v, w):
    return 0.5 * v * v + stress_antiderivative(params, w)


def entropy_flux(params: ModelParams, v, w):
    return -v * stress(params, w)


def rh_residual(params: ModelParams, left: State, right: State, family: int) -> float:
    """Largest Rankine-Hugoniot residual of a ``family`` shock, scaled by the jump."""
    sign = -1.0 if family == 1 else 1.0
    speed = sign * shock_speed(params, left.w, right.w)
    r_v = speed * (left.v - right.v) - (stress(params, right.w) - stress(params, left.w))
    r_w = speed * (left.w - right.w) - (right.v - left.v)
    scale = max(1.0, abs(left.v - right.v), abs(left.w - right.w),
                abs(stress(params, left.w) - stress(params, right.w)))
    return max(abs(r_v), abs(r_w)) / scale


def entropy_dissipation(params: ModelParams, left: State, right: State, family: int,
                        rh_tol: float = RH_TOL) -> float:
    """Entropy production across the shock ``left -> right`` of the given family.

    Non-positive values mean the shock satisfies the entropy inequality.
    Raises ``ValueError`` if the two states are not linked by a shock of the
    requested family.
    """
    if family not in (1, 2):
        raise ValueError(f"family must be 1 or 2, got {family}")
    if rh_residual(params, left, right, family) > rh_tol:
        raise ValueError("not a shock: Rankine-Hugoniot relations are violated")
    sign = -1.0 if family == 1 else 1.0
    speed = sign * shock_speed(params, left.w, right.w)
    dU = entropy(params, left.v, left.w) - entropy(params, right.v, right.w)
    dW = entropy_flux(params, left.v, left.w) - entropy_flux(params, right.v, right.w)
    return float(speed * dU - dW)


def classify_shock(params: ModelParams, wL: float, wR: float, family: int = 1) -> ShockClass:
    """Admissibility of a shock between strains ``wL`` and ``wR``.

    For 2-shocks the roles of the two strains are exchanged, so the
    classification is always made from the state the wave is measured from.
    """
    if wL == wR:
        raise ValueError("a shock needs distinct strains")
    base, other = (wL, wR) if family == 1 else (wR, wL)
    prod = base * other
    if base * base <= prod:
        return ShockClass.LIU_CLASSICAL
    if prod <= phi_natural_inverse(base) * base:
        return ShockClass.LIU_CLASSICAL
    if prod <= phi_flat_inf(base) * base:
        return ShockClass.NONCLASSICAL
    return ShockClass.NOT_ENTROPY_SATISFYING
