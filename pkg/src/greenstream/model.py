"""Closed-form QoE, utility, energy and CO2 math.

All functions are pure and accept scalars or numpy arrays; bitrates are in
kbps, power in W, one session lasts one time unit so session energy is
numerically equal to power. CO2 uses a carbon intensity in gCO2 per kWh.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ModelConstants",
    "mos",
    "utility",
    "delta_utility",
    "session_energy",
    "energy_reduction",
    "bitrate_from_energy",
    "co2",
    "delta_u_of_delta_e",
]


@dataclass(frozen=True)
class ModelConstants:
    """Global model constants shared by every user of a population."""

    x_min: float = 300.0     # kbps, lowest bitrate with a defined score
    x_max: float = 5000.0    # kbps, satisfaction ceiling for a non-green user
    p0: float = 10.0         # W, static baseline power
    alpha: float = 0.2       # W per kbps, dynamic power slope
    eta: float = 0.388       # gCO2 per kWh, carbon intensity of the mix
    mos_lo: float = 1.0
    mos_hi: float = 5.0

    def validate(self) -> None:
        if not (0 < self.x_min < self.x_max):
            raise ValueError(f"need 0 < x_min < x_max, got {self.x_min}, {self.x_max}")
        if self.p0 < 0:
            raise ValueError("p0 must be >= 0")
        if self.alpha <= 0:
            raise ValueError("alpha must be > 0")
        if self.eta <= 0:
            raise ValueError("eta must be > 0")


def _check_mos_domain(x, gamma, consts: ModelConstants) -> None:
    if consts.x_min <= 0:
        raise ValueError("x_min must be positive for the log score")
    if np.any(np.asarray(x) <= 0):
        raise ValueError("bitrate must be positive")
    if np.any(np.asarray(gamma) < 1):
        raise ValueError("greenness factor must be >= 1")
    x_cap = consts.x_max / np.asarray(gamma, dtype=float)
    if np.any(x_cap <= consts.x_min):
        raise ValueError(
            "greenness factor too large for the configured bitrate range "
            f"(satisfaction ceiling {np.min(x_cap):.3f} <= x_min {consts.x_min})"
        )


def mos(x, gamma, consts: ModelConstants = ModelConstants(), clamp: bool = True):
    """Greenness-adjusted opinion score of streaming at bitrate x.

    The score runs log-linearly from mos_lo at x_min to mos_hi at the user's
    satisfaction ceiling x_max/gamma and, with clamp=True, is held inside
    [mos_lo, mos_hi] outside that range.
    """
    _check_mos_domain(x, gamma, consts)
    x = np.asarray(x, dtype=float)
    x_cap = consts.x_max / np.asarray(gamma, dtype=float)
    span = consts.mos_hi - consts.mos_lo
    f = consts.mos_lo + span * np.log(x / consts.x_min) / np.log(x_cap / consts.x_min)
    if clamp:
        f = np.clip(f, consts.mos_lo, consts.mos_hi)
    return f if f.ndim else float(f)


def utility(x, gamma, consts: ModelConstants = ModelConstants(), clamp: bool = True):
    """Normalized score, mos/mos_hi; lies in [0.2, 1] after clamping."""
    out = np.asarray(mos(x, gamma, consts, clamp=clamp)) / consts.mos_hi
    return out if out.ndim else float(out)


def delta_utility(x_h, x_l, gamma, consts: ModelConstants = ModelConstants()):
    """Utility lost by moving from the high bitrate x_h down to x_l (>= 0)."""
    if np.any(np.asarray(x_l) >= np.asarray(x_h)):
        raise ValueError("need x_l < x_h")
    out = np.asarray(utility(x_h, gamma, consts)) - np.asarray(utility(x_l, gamma, consts))
    return out if out.ndim else float(out)


def session_energy(x, consts: ModelConstants = ModelConstants()):
    """Energy of a unit-time session at bitrate x: p0 + alpha*x (W)."""
    if np.any(np.asarray(x) < 0):
        raise ValueError("bitrate must be >= 0")
    out = consts.p0 + consts.alpha * np.asarray(x, dtype=float)
    return out if out.ndim else float(out)


def energy_reduction(x_h, x, consts: ModelConstants = ModelConstants()):
    """Energy saved by streaming at x instead of x_h; the static term cancels."""
    if np.any(np.asarray(x) > np.asarray(x_h)):
        raise ValueError("need x <= x_h")
    out = consts.alpha * (np.asarray(x_h, dtype=float) - np.asarray(x, dtype=float))
    return out if out.ndim else float(out)


def bitrate_from_energy(e, consts: ModelConstants = ModelConstants()):
    """Exact inverse of session_energy: the bitrate that consumes e watts."""
    if np.any(np.asarray(e) < consts.p0):
        raise ValueError("energy below the static baseline has no bitrate")
    out = (np.asarray(e, dtype=float) - consts.p0) / consts.alpha
    return out if out.ndim else float(out)


def co2(e, consts: ModelConstants = ModelConstants()):
    """Grams of CO2 for an energy amount in W·h (converted to kWh)."""
    if np.any(np.asarray(e) < 0):
        raise ValueError("energy must be >= 0")
    out = consts.eta * np.asarray(e, dtype=float) / 1000.0
    return out if out.ndim else float(out)


def delta_u_of_delta_e(delta_e, x_h, gamma, consts: ModelConstants = ModelConstants()):
    """Utility loss implied by an energy reduction of delta_e from x_h.

    Maps the reduction back to the target bitrate through the inverse of the
    linear power model and evaluates the utility gap; non-decreasing in
    delta_e on its domain 0 <= delta_e <= alpha*x_h.
    """
    delta_e = np.asarray(delta_e, dtype=float)
    if np.any(delta_e < 0) or np.any(delta_e > consts.alpha * np.asarray(x_h)):
        raise ValueError("need 0 <= delta_e <= alpha * x_h")
    x_target = np.asarray(x_h, dtype=float) - delta_e / consts.alpha
    out = np.asarray(utility(x_h, gamma, consts)) - np.asarray(utility(x_target, gamma, consts))
    return out if out.ndim else float(out)
