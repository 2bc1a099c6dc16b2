"""Exact Riemann solver for cubic elastodynamics under a linear kinetic relation.

The heavy lifting lives in numba kernels (prefixed ``_``) so the same code
drives the Python API, the reconstruction scheme and the reference schemes.
A wave pattern is always described from a *base* strain outward:

* family 1: base is the left state, the pattern runs left to right;
* family 2: base is the right state, the pattern runs right to left.

With this convention the case tree (classical shock / rarefaction /
rarefaction + nonclassical shock / classical + nonclassical shock / single
transonic classical shock) is identical for both families and depends only
on the strains and ``beta``.  The velocity along the wave curve is
``v_base + inc`` for family 1 and ``v_base - inc`` for family 2.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .model import ModelParams, State

NONE = 0
CLASSICAL = 1
NONCLASSICAL = 2
RAREFACTION = 3

W_MAX = 1e6
W_TOL = 1e-13
V_TOL = 1e-12
# Relative tolerance under which a kinetic partner strain is identified with
# the base strain (drops spurious round-off sized classical shocks).
SNAP_TOL = 1e-12

_SQRT3 = math.sqrt(3.0)

# Column layout of the fan arrays produced by ``_fan``.
F_FAMILY, F_KIND, F_LV, F_LW, F_RV, F_RW, F_SLO, F_SHI = range(8)
MAX_WAVES = 4


class RiemannError(ValueError):
    pass


@njit(cache=True)
def _c(m, w):
    return math.sqrt(3.0 * w * w + m)


@njit(cache=True)
def _s(m, a, b):
    return math.sqrt((a * a + b * b) + a * b + m)


@njit(cache=True)
def _c_integral(m, z):
    # closed-form antiderivative of sqrt(3 z^2 + m), vanishing at z = 0
    return 0.5 * z * math.sqrt(3.0 * z * z + m) + m / (2.0 * _SQRT3) * math.asinh(
        _SQRT3 * z / math.sqrt(m))


@njit(cache=True)
def _pattern(beta, a, b):
    """Case tree of the wave joining base strain ``a`` to strain ``b``.

    Returns ``(kind_first, w_mid, kind_second)``; ``kind_second`` is NONE for a
    single wave (then ``w_mid == b``) and ``kind_first`` is NONE for no wave.
    """
    if a == b:
        return NONE, b, NONE
    ab = a * b
    if a == 0.0 or ab > a * a:
        return CLASSICAL, b, NONE
    if ab >= 0.0:
        return RAREFACTION, b, NONE
    wdag = -beta * b
    if abs(wdag - a) <= SNAP_TOL * max(1.0, abs(a)):
        return NONCLASSICAL, b, NONE
    if a * wdag < a * a:
        return RAREFACTION, wdag, NONCLASSICAL
    # transonic range: composite only if the classical part is strictly faster
    if a * a + a * wdag > wdag * b + b * b:
        return CLASSICAL, wdag, NONCLASSICAL
    return CLASSICAL, b, NONE


@njit(cache=True)
def _seg_inc(m, kind, a, b):
    if kind == RAREFACTION:
        return _c_integral(m, b) - _c_integral(m, a)
    return _s(m, a, b) * (b - a)


@njit(cache=True)
def _curve_inc(m, beta, a, b):
    k1, wm, k2 = _pattern(beta, a, b)
    if k1 == NONE:
        return 0.0
    d = _seg_inc(m, k1, a, wm)
    if k2 != NONE:
        d += _seg_inc(m, k2, wm, b)
    return d


@njit(cache=True)
def _mismatch(m, beta, vl, wl, vr, wr, w):
    return (vl + _curve_inc(m, beta, wl, w)) - (vr - _curve_inc(m, beta, wr, w))


@njit(cache=True)
def _intermediate(m, beta, vl, wl, vr, wr):
    """Middle state ``(ok, v*, w*)`` of the Riemann problem.

    The mismatch between the forward 1-curve and the backward 2-curve is
    strictly increasing in ``w``.  Starting from the acoustic linearisation,
    the root is bracketed by doubling steps and refined by a safeguarded
    regula falsi (Illinois) iteration with periodic bisection.
    """
    cl = _c(m, wl)
    cr = _c(m, wr)
    slope = cl + cr
    x0 = (vr - vl + cl * wl + cr * wr) / slope
    if not abs(x0) <= W_MAX:
        return False, 0.0, 0.0
    f0 = _mismatch(m, beta, vl, wl, vr, wr, x0)
    if not math.isfinite(f0):
        return False, 0.0, 0.0
    if f0 == 0.0:
        lo = hi = x0
    else:
        step = -f0 / slope
        x1 = x0 + step
        f1 = _mismatch(m, beta, vl, wl, vr, wr, x1)
        while (f1 > 0.0) == (f0 > 0.0) and f1 != 0.0:
            x0 = x1
            f0 = f1
            step *= 2.0
            x1 = x0 + step
            if abs(x1) > W_MAX:
                return False, 0.0, 0.0
            f1 = _mismatch(m, beta, vl, wl, vr, wr, x1)
        if x0 < x1:
            lo, flo, hi, fhi = x0, f0, x1, f1
        else:
            lo, flo, hi, fhi = x1, f1, x0, f0
        if flo == 0.0:
            hi = lo
        elif fhi == 0.0:
            lo = hi
        side = 0
        for it in range(400):
            if hi - lo <= W_TOL * max(1.0, abs(lo), abs(hi)):
                break
            if it % 4 == 3 or flo == fhi:
                x = 0.5 * (lo + hi)
            else:
                x = (lo * fhi - hi * flo) / (fhi - flo)
                if not (lo < x < hi):
                    x = 0.5 * (lo + hi)
            fx = _mismatch(m, beta, vl, wl, vr, wr, x)
            if fx == 0.0:
                lo = x
                hi = x
                break
            if fx < 0.0:
                lo = x
                flo = fx
                if side == -1:
                    fhi *= 0.5
                side = -1
            else:
                hi = x
                fhi = fx
                if side == 1:
                    flo *= 0.5
                side = 1
    ws = 0.5 * (lo + hi)
    # snap onto a data state when a single family already connects them
    vscale = V_TOL * max(1.0, abs(vl), abs(vr))
    near = 1e3 * W_TOL
    # with equal strains a snapped star would leave the velocity jump without a wave
    if wl == wr:
        near = -1.0
    if abs(ws - wr) <= near * max(1.0, abs(wr)):
        if abs(_mismatch(m, beta, vl, wl, vr, wr, wr)) <= vscale:
            return True, vr, wr
    if abs(ws - wl) <= near * max(1.0, abs(wl)):
        if abs(_mismatch(m, beta, vl, wl, vr, wr, wl)) <= vscale:
            return True, vl, wl
    vs = vl + _curve_inc(m, beta, wl, ws)
    return True, vs, ws


@njit(cache=True)
def _put(out, n, m, family, kind, lv, lw, rv, rw):
    out[n, F_FAMILY] = family
    out[n, F_KIND] = kind
    out[n, F_LV] = lv
    out[n, F_LW] = lw
    out[n, F_RV] = rv
    out[n, F_RW] = rw
    sign = -1.0 if family == 1 else 1.0
    if kind == RAREFACTION:
        if family == 1:
            out[n, F_SLO] = -_c(m, lw)
            out[n, F_SHI] = -_c(m, rw)
        else:
            out[n, F_SLO] = _c(m, lw)
            out[n, F_SHI] = _c(m, rw)
    else:
        sp = sign * _s(m, lw, rw)
        out[n, F_SLO] = sp
        out[n, F_SHI] = sp
    return n + 1


@njit(cache=True)
def _fan_into(out, m, beta, vl, wl, vr, wr):
    """Fill ``out`` (shape (4, 8)) with the ordered waves; returns the count or -1."""
    if vl == vr and wl == wr:
        return 0
    ok, vs, ws = _intermediate(m, beta, vl, wl, vr, wr)
    if not ok:
        return -1
    n = 0
    k1, wm, k2 = _pattern(beta, wl, ws)
    if k1 != NONE:
        if k2 != NONE:
            vm = vl + _seg_inc(m, k1, wl, wm)
            n = _put(out, n, m, 1, k1, vl, wl, vm, wm)
            n = _put(out, n, m, 1, k2, vm, wm, vs, ws)
        else:
            n = _put(out, n, m, 1, k1, vl, wl, vs, ws)
    k1, wm, k2 = _pattern(beta, wr, ws)
    if k1 != NONE:
        if k2 != NONE:
            vm = vr - _seg_inc(m, k1, wr, wm)
            n = _put(out, n, m, 2, k2, vs, ws, vm, wm)
            n = _put(out, n, m, 2, k1, vm, wm, vr, wr)
        else:
            n = _put(out, n, m, 2, k1, vs, ws, vr, wr)
    return n


@njit(cache=True)
def _fan(m, beta, vl, wl, vr, wr):
    out = np.zeros((MAX_WAVES, 8))
    n = _fan_into(out, m, beta, vl, wl, vr, wr)
    return n, out


@njit(cache=True)
def _sample_fan_array(m, n, fan, vl, wl, vr, wr, xi):
    """State at ray ``xi`` of a fan array; right limit on a discontinuity."""
    for k in range(n):
        if xi < fan[k, F_SLO]:
            return fan[k, F_LV], fan[k, F_LW]
        if fan[k, F_KIND] == RAREFACTION and xi < fan[k, F_SHI]:
            lw = fan[k, F_LW]
            sgn = 1.0 if lw + fan[k, F_RW] > 0.0 else -1.0
            ww = sgn * math.sqrt(max((xi * xi - m) / 3.0, 0.0))
            dv = _c_integral(m, ww) - _c_integral(m, lw)
            if fan[k, F_FAMILY] == 1:
                return fan[k, F_LV] + dv, ww
            return fan[k, F_LV] - dv, ww
    return vr, wr


@njit(cache=True)
def _max_speed(n, fan):
    s = 0.0
    for k in range(n):
        s = max(s, abs(fan[k, F_SLO]), abs(fan[k, F_SHI]))
    return s


# ---------------------------------------------------------------------------
# Python API


class WaveKind(enum.Enum):
    CLASSICAL_SHOCK = "ClassicalShock"
    NONCLASSICAL_SHOCK = "NonclassicalShock"
    RAREFACTION = "Rarefaction"


_KIND_FROM_CODE = {
    CLASSICAL: WaveKind.CLASSICAL_SHOCK,
    NONCLASSICAL: WaveKind.NONCLASSICAL_SHOCK,
    RAREFACTION: WaveKind.RAREFACTION,
}
_CODE_FROM_KIND = {v: k for k, v in _KIND_FROM_CODE.items()}


@dataclass(frozen=True)
class ElementaryWave:
    family: int
    kind: WaveKind
    left: State
    right: State
    speed_lo: float
    speed_hi: float

    @property
    def is_shock(self) -> bool:
        return self.kind is not WaveKind.RAREFACTION

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "kind": self.kind.value,
            "left": list(self.left),
            "right": list(self.right),
            "speed_lo": self.speed_lo,
            "speed_hi": self.speed_hi,
        }


@dataclass(frozen=True)
class WaveFan:
    left_data: State
    right_data: State
    waves: tuple[ElementaryWave, ...]

    @property
    def star(self) -> State:
        """Middle state between the 1-waves and the 2-waves."""
        for wave in self.waves:
            if wave.family == 2:
                return wave.left
        return self.waves[-1].right if self.waves else self.left_data

    def family(self, k: int) -> tuple[ElementaryWave, ...]:
        return tuple(wave for wave in self.waves if wave.family == k)

    def pattern(self) -> list[tuple[int, str]]:
        return [(wave.family, wave.kind.value) for wave in self.waves]

    def to_dict(self) -> dict:
        return {
            "left": list(self.left_data),
            "right": list(self.right_data),
            "star": list(self.star),
            "waves": [wave.to_dict() for wave in self.waves],
        }

    def as_array(self) -> np.ndarray:
        out = np.zeros((MAX_WAVES, 8))
        for k, wave in enumerate(self.waves):
            out[k] = (wave.family, _CODE_FROM_KIND[wave.kind], wave.left.v, wave.left.w,
                      wave.right.v, wave.right.w, wave.speed_lo, wave.speed_hi)
        return out


def forward_1_curve_v(params: ModelParams, left: State, wM: float) -> float:
    """Velocity reached from ``left`` through a 1-wave ending at strain ``wM``."""
    return float(left[0] + _curve_inc(params.m, params.beta, float(left[1]), float(wM)))


def backward_2_curve_v(params: ModelParams, right: State, wM: float) -> float:
    """Velocity of the state joined to ``right`` by a 2-wave starting at strain ``wM``."""
    return float(right[0] - _curve_inc(params.m, params.beta, float(right[1]), float(wM)))


def wave_pattern(params: ModelParams, w_base: float, w_target: float) -> list[tuple[WaveKind, float, float]]:
    """Elementary pieces ``(kind, w_from, w_to)`` from the base strain outward."""
    k1, wm, k2 = _pattern(params.beta, float(w_base), float(w_target))
    out = []
    if k1 != NONE:
        out.append((_KIND_FROM_CODE[k1], float(w_base), float(wm)))
    if k2 != NONE:
        out.append((_KIND_FROM_CODE[k2], float(wm), float(w_target)))
    return out


def intermediate_state(params: ModelParams, left: State, right: State) -> State:
    ok, vs, ws = _intermediate(params.m, params.beta, float(left[0]), float(left[1]),
                               float(right[0]), float(right[1]))
    if not ok:
        raise RiemannError(f"no intersection of wave curves for {left} / {right}")
    return State(float(vs), float(ws))


def solve_riemann(params: ModelParams, left: State, right: State) -> WaveFan:
    left = State(float(left[0]), float(left[1]))
    right = State(float(right[0]), float(right[1]))
    n, arr = _fan(params.m, params.beta, left.v, left.w, right.v, right.w)
    if n < 0:
        raise RiemannError(f"no intersection of wave curves for {left} / {right}")
    waves = tuple(
        ElementaryWave(
            family=int(row[F_FAMILY]),
            kind=_KIND_FROM_CODE[int(row[F_KIND])],
            left=State(float(row[F_LV]), float(row[F_LW])),
            right=State(float(row[F_RV]), float(row[F_RW])),
            speed_lo=float(row[F_SLO]),
            speed_hi=float(row[F_SHI]),
        )
        for row in arr[:n]
    )
    return WaveFan(left, right, waves)


def rarefaction_state(params: ModelParams, wave: ElementaryWave, xi: float) -> State:
    """State inside a rarefaction at ray ``xi`` (Riemann invariant along the fan)."""
    lw = wave.left.w
    sgn = 1.0 if lw + wave.right.w > 0.0 else -1.0
    w = sgn * math.sqrt(max((xi * xi - params.m) / 3.0, 0.0))
    dv = _c_integral(params.m, w) - _c_integral(params.m, lw)
    v = wave.left.v + dv if wave.family == 1 else wave.left.v - dv
    return State(v, w)


def sample_fan(params: ModelParams, fan: WaveFan, xi: float) -> State:
    for wave in fan.waves:
        if xi < wave.speed_lo:
            return wave.left
        if wave.kind is WaveKind.RAREFACTION and xi < wave.speed_hi:
            return rarefaction_state(params, wave, xi)
    return fan.right_data


def sample_riemann(params: ModelParams, left: State, right: State, xi: float) -> State:
    """Solution of the Riemann problem ``left | right`` at ray ``xi``."""
    return sample_fan(params, solve_riemann(params, left, right), xi)
