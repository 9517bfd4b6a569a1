#  Copyright (c) 2025.  ftfgates
#     _____  __    _____
#    / __/ |/ /__ / __/__ ____ _/ /____ ___
#   / _//    / -_) _// _ `/ _ `/ __/ -_|_-<
#  /_/ /_/|_/\__/_/  \_, /\_,_/\__/\__/___/
#                   /___/
#  MIT License
#

"""Physical conventions shared by every module.

Energies are stored as H/h in GHz, times in ns and external fluxes in radians
(phi_ext = 2*pi*Phi/Phi0). One GHz during one ns accumulates one full cycle.
"""

from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy import constants

TWO_PI = 2.0 * np.pi

# e^2 / (2 h * 1 fF) expressed in GHz * fF
EFF_CHARGE_GHZ_FF = constants.e ** 2 / (2.0 * constants.h * 1e-15) / 1e9

# h / k_B in K per GHz
H_OVER_KB_K_PER_GHZ = constants.h * 1e9 / constants.k


class FluxUnit(str, Enum):
    """Unit tag carried by every user supplied flux value."""

    RADIANS = "radians"
    FLUX_QUANTA = "flux-quanta"


def convert_flux(value: float, unit: FluxUnit | str) -> float:
    """
    Convert an external flux to radians.

    :param value: flux value expressed in `unit`.
    :param unit: ``radians`` (returned unchanged) or ``flux-quanta`` (multiplied by 2*pi).
    :return: flux in radians.
    """
    unit = FluxUnit(unit)
    if unit is FluxUnit.FLUX_QUANTA:
        return TWO_PI * value
    return value


def radians_to_flux_quanta(value: float) -> float:
    return value / TWO_PI


class FluxValue(BaseModel):
    """A flux value with its explicit unit tag."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    value: float
    unit: FluxUnit

    @property
    def radians(self) -> float:
        return convert_flux(self.value, self.unit)


def accumulated_phase(frequency_ghz: float, duration_ns: float) -> float:
    """Phase in radians accumulated at `frequency_ghz` during `duration_ns`."""
    return TWO_PI * frequency_ghz * duration_ns


def rate_from_t1(t1_us: float | None) -> float:
    """Relaxation rate in 1/ns; an unset or infinite T1 gives a zero rate."""
    if t1_us is None or not np.isfinite(t1_us):
        return 0.0
    if t1_us <= 0:
        raise ValueError(f"T1 must be positive, got {t1_us} us")
    return 1.0 / (1000.0 * t1_us)
