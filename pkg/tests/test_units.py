#  Copyright (c) 2025.  ftfgates
#     _____  __    _____
#    / __/ |/ /__ / __/__ ____ _/ /____ ___
#   / _//    / -_) _// _ `/ _ `/ __/ -_|_-<
#  /_/ /_/|_/\__/_/  \_, /\_,_/\__/\__/___/
#                   /___/
#  MIT License
#

"""Tests for the unit conventions."""

import unittest

import numpy as np
from pydantic import ValidationError

from ftfgates.core.units import (EFF_CHARGE_GHZ_FF, H_OVER_KB_K_PER_GHZ, TWO_PI, FluxUnit, FluxValue,
                                 accumulated_phase, convert_flux, radians_to_flux_quanta, rate_from_t1)


class TestFluxUnits(unittest.TestCase):
    def test_flux_quanta_to_radians(self):
        self.assertAlmostEqual(convert_flux(0.5, FluxUnit.FLUX_QUANTA), np.pi)
        self.assertAlmostEqual(convert_flux(0.21, "flux-quanta"), 0.21 * TWO_PI)

    def test_radians_unchanged(self):
        self.assertEqual(convert_flux(1.25, "radians"), 1.25)

    def test_back_conversion(self):
        self.assertAlmostEqual(radians_to_flux_quanta(convert_flux(0.362, "flux-quanta")), 0.362)

    def test_unknown_unit_rejected(self):
        with self.assertRaises(ValueError):
            convert_flux(0.5, "phi0")

    def test_flux_value_requires_unit(self):
        with self.assertRaises(ValidationError):
            FluxValue.model_validate({"value": 0.5})
        self.assertAlmostEqual(FluxValue(value=0.25, unit="flux-quanta").radians, np.pi / 2)


class TestTimeAndRates(unittest.TestCase):
    def test_one_ghz_one_ns_is_one_cycle(self):
        self.assertAlmostEqual(accumulated_phase(1.0, 1.0), TWO_PI)

    def test_rate_from_t1(self):
        self.assertAlmostEqual(rate_from_t1(20.0), 1.0 / 20000.0)
        self.assertEqual(rate_from_t1(None), 0.0)
        self.assertEqual(rate_from_t1(float("inf")), 0.0)
        with self.assertRaises(ValueError):
            rate_from_t1(0.0)

    def test_constants(self):
        # e^2/(2h) for 1 fF is about 19.37 GHz; h/k_B is 47.99 mK per GHz
        self.assertAlmostEqual(EFF_CHARGE_GHZ_FF, 19.3702, places=3)
        self.assertAlmostEqual(H_OVER_KB_K_PER_GHZ, 0.0479924, places=6)


if __name__ == '__main__':
    unittest.main()
