#  Copyright (c) 2025.  ftfgates
#     _____  __    _____
#    / __/ |/ /__ / __/__ ____ _/ /____ ___
#   / _//    / -_) _// _ `/ _ `/ __/ -_|_-<
#  /_/ /_/|_/\__/_/  \_, /\_,_/\__/\__/___/
#                   /___/
#  MIT License
#


"""Tests for the second to fourth order ZZ expansion."""

import unittest

from ftfgates.circuits.composite import CouplingGraph, assemble, static_zz
from ftfgates.circuits.perturbation import (DegeneracyError, ScalingMode, order_scaling_check, perturbative_zz,
                                            truncation_convergence)
from ftfgates.core.errors import ToolkitError
from .oracles import DISPERSIVE_CIRCUIT, ladder_spectrum


def toy_modes(a: float, coupler: float, b: float):
    return tuple(ladder_spectrum([0.0, e]) for e in (a, coupler, b))


def dispersive_modes():
    f1, f2 = DISPERSIVE_CIRCUIT.fluxonium_spectra()
    return f1, DISPERSIVE_CIRCUIT.coupler_spectrum(), f2


class TestTwoLevelToy(unittest.TestCase):
    def setUp(self):
        self.modes = toy_modes(5.0, 10.0, 4.0)
        self.couplings = CouplingGraph(J_12=0.1)

    def test_pairwise_exchange_has_no_zz(self):
        result = perturbative_zz(self.modes, self.couplings)
        self.assertAlmostEqual(result.zeta2, 0.0, places=14)
        self.assertAlmostEqual(result.zeta3, 0.0, places=14)
        self.assertAlmostEqual(result.zeta4, 0.0, places=14)
        exact = static_zz(assemble(self.modes, self.couplings))
        self.assertAlmostEqual(result.total, exact.zeta, places=12)

    def test_state_corrections(self):
        corrections = perturbative_zz(self.modes, self.couplings).corrections["10"]
        # |100> pushed up by |001>, one GHz below it
        self.assertAlmostEqual(corrections[2], 0.01, places=14)
        self.assertAlmostEqual(corrections[3], 0.0, places=14)
        self.assertAlmostEqual(corrections[4], -1e-4, places=14)

    def test_degenerate_intermediate_state(self):
        with self.assertRaises(DegeneracyError) as ctx:
            perturbative_zz(toy_modes(4.0, 10.0, 4.0), self.couplings)
        self.assertIsInstance(ctx.exception, ToolkitError)
        self.assertEqual(ctx.exception.module, "zz_perturbation")

    def test_truncation_beyond_mode_size(self):
        report = truncation_convergence(self.modes, self.couplings, intermediate_levels=2)
        self.assertEqual(report.doubled, 4)
        self.assertEqual(report.change, 0.0)


class TestDispersiveCircuit(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.modes = dispersive_modes()
        cls.couplings = DISPERSIVE_CIRCUIT.couplings

    def test_joint_scaling(self):
        report = order_scaling_check(self.modes, self.couplings, mode=ScalingMode.JOINT)
        self.assertEqual(report.expected, {2: 2, 3: 3, 4: 4})
        self.assertTrue(report.satisfied(1e-6), report.exponents)

    def test_coupler_scaling(self):
        report = order_scaling_check(self.modes, self.couplings, mode="coupler")
        self.assertIsNone(report.expected[4])
        self.assertAlmostEqual(report.exponents[2], 0.0, places=6)
        self.assertAlmostEqual(report.exponents[3], 2.0, places=6)
        self.assertTrue(report.satisfied(1e-6))

    def test_agrees_with_exact_at_weak_coupling(self):
        weak = self.couplings.scaled(direct=0.3, coupler=0.3)
        result = perturbative_zz(self.modes, weak, intermediate_levels=6)
        exact = static_zz(assemble(self.modes, weak))
        self.assertTrue(exact.valid)
        scale = abs(result.zeta2) + abs(result.zeta3) + abs(result.zeta4)
        self.assertLess(abs(result.total - exact.zeta), 0.05 * scale + 1e-9)

    def test_convergence_report(self):
        report = truncation_convergence(self.modes, self.couplings, intermediate_levels=3)
        self.assertEqual((report.levels, report.doubled), (3, 6))
        self.assertAlmostEqual(report.change, abs(report.total_doubled - report.total), places=15)
