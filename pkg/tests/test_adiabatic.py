#  Copyright (c) 2025.  ftfgates
#     _____  __    _____
#    / __/ |/ /__ / __/__ ____ _/ /____ ___
#   / _//    / -_) _// _ `/ _ `/ __/ -_|_-<
#  /_/ /_/|_/\__/_/  \_, /\_,_/\__/\__/___/
#                   /___/
#  MIT License
#


"""Tests for the adiabatic CZ design: beta solve, flat scan and leakage oscillations."""

import unittest

import numpy as np

from ftfgates.dynamics.evolution import flux_workspace
from ftfgates.dynamics.pulses import PulseKind, PulseShape
from ftfgates.gates.adiabatic import (conditional_phase, flat_duration_grid, flat_duration_scan, leakage_gaps,
                                      optimize_flat_duration, oscillation_frequencies, solve_beta, zz_curve)
from ftfgates.gates.metrics import GateError, UnreachablePhaseError
from .oracles import DISPERSIVE_CIRCUIT
from .test_pulses import synthetic_table

FLUXES = np.linspace(0.0, 1.0, 61)
CONSTANT_D = synthetic_table(lambda p: np.full_like(p, 2.0))


def linear_zz(slope: float):
    return zz_curve(FLUXES, slope * FLUXES)


class TestZZCurve(unittest.TestCase):
    def test_conditional_phase_of_constant_pulse(self):
        times = np.linspace(0.0, 10.0, 101)
        pulse = PulseShape(kind=PulseKind.FLUX, times=times, values=np.full(101, 0.5), dt=0.1)
        self.assertAlmostEqual(conditional_phase(linear_zz(0.05), pulse), np.pi / 2, places=9)

    def test_flagged_region(self):
        valid = FLUXES < 0.49
        curve = zz_curve(FLUXES, 0.05 * FLUXES, valid)
        with self.assertRaises(GateError):
            curve.check_range(0.0, 0.6)
        curve.check_range(0.0, 0.4)
        self.assertAlmostEqual(curve.admissible_limit(0.0, 1.0), FLUXES[valid][-1], places=12)
        self.assertEqual(curve.admissible_limit(0.3, -1.0), 0.0)

    def test_outside_grid(self):
        with self.assertRaises(GateError):
            linear_zz(0.05).check_range(-0.1, 0.5)

    def test_needs_resolved_points(self):
        with self.assertRaises(GateError):
            zz_curve([0.0, 1.0], [0.0, 0.1], [True, False])


class TestSolveBeta(unittest.TestCase):
    def test_linear_zz_closed_form(self):
        # constant D = 2 makes the edge linear; the flux excursion phi_e solves 2 pi a phi_e (T_edge + T_flat) = pi
        design = solve_beta(CONSTANT_D, linear_zz(0.05), 10.0, 5.0)
        self.assertAlmostEqual(design.phi_flat, 2.0 / 3.0, delta=1e-4)
        self.assertAlmostEqual(design.beta, 2.0 / 15.0, delta=1e-4)
        self.assertAlmostEqual(design.phase, np.pi, delta=1e-3)
        self.assertAlmostEqual(design.edge_duration, 10.0, places=4)
        self.assertAlmostEqual(design.total_duration, 25.0, places=4)
        np.testing.assert_allclose(design.unfiltered.values, design.unfiltered.values[::-1], atol=1e-12)

    def test_stronger_zz_needs_smaller_beta(self):
        weak = solve_beta(CONSTANT_D, linear_zz(0.05), 10.0, 5.0)
        strong = solve_beta(CONSTANT_D, linear_zz(0.1), 10.0, 5.0)
        self.assertLess(strong.beta, weak.beta)
        self.assertAlmostEqual(strong.beta / weak.beta, 0.5, delta=1e-3)

    def test_unreachable_target(self):
        with self.assertRaises(UnreachablePhaseError) as ctx:
            solve_beta(CONSTANT_D, linear_zz(0.01), 10.0, 5.0)
        self.assertLess(ctx.exception.context["max_phase"], np.pi)

    def test_idle_zz_exceeds_target(self):
        with self.assertRaises(UnreachablePhaseError):
            solve_beta(CONSTANT_D, zz_curve(FLUXES, np.full(61, 1.0)), 10.0, 5.0)

    def test_invalid_durations(self):
        with self.assertRaises(GateError):
            solve_beta(CONSTANT_D, linear_zz(0.05), 0.0, 5.0)
        with self.assertRaises(GateError):
            solve_beta(CONSTANT_D, linear_zz(0.05), 10.0, -1.0)

    def test_flat_grid(self):
        grid = flat_duration_grid(15.0, 25.0, 0.25)
        self.assertEqual(len(grid), 41)
        self.assertEqual(grid[-1], 25.0)
        with self.assertRaises(GateError):
            flat_duration_grid(25.0, 15.0)


class TestFlatScan(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.workspace = flux_workspace(DISPERSIVE_CIRCUIT.system(), levels=20)

    def test_scan_order_and_optimum(self):
        optimum = optimize_flat_duration(self.workspace, CONSTANT_D, linear_zz(0.05), [10.0], [5.0, 10.0])
        self.assertEqual([p.flat_duration for p in optimum.scan], [5.0, 10.0])
        self.assertTrue(all(p.ok for p in optimum.scan))
        best = min(p.leakage_error for p in optimum.scan)
        self.assertEqual(optimum.result.leakage_error, best)
        self.assertGreaterEqual(best, 0.0)
        flats, traces = optimum.traces(10.0)
        self.assertEqual(list(flats), [5.0, 10.0])
        self.assertEqual(set(traces), {"00", "01", "10", "11"})

    def test_infeasible_candidates_reported(self):
        outcomes = flat_duration_scan(self.workspace, CONSTANT_D, linear_zz(0.01), [10.0], [5.0])
        point, metrics, design = outcomes[0]
        self.assertFalse(point.ok)
        self.assertIsNone(metrics)
        self.assertIn("not reachable", point.message)
        with self.assertRaises(GateError):
            optimize_flat_duration(self.workspace, CONSTANT_D, linear_zz(0.01), [10.0], [5.0])

    def test_leakage_gaps(self):
        gaps = leakage_gaps(DISPERSIVE_CIRCUIT.system(), "11")
        self.assertEqual(len(gaps), 3)
        couplings = [c for _, c in gaps]
        self.assertEqual(couplings, sorted(couplings, reverse=True))
        self.assertTrue(all(gap > 0 for gap, _ in gaps))


class TestOscillations(unittest.TestCase):
    def test_two_tones(self):
        flats = np.arange(0.0, 60.0, 0.25)
        trace = np.cos(2 * np.pi * 0.3 * flats) + 0.5 * np.cos(2 * np.pi * 1.1 * flats)
        found = oscillation_frequencies(flats, trace)
        self.assertAlmostEqual(found[0], 0.3, delta=0.01)
        self.assertAlmostEqual(found[1], 1.1, delta=0.01)

    def test_grid_checks(self):
        with self.assertRaises(GateError):
            oscillation_frequencies(np.arange(5.0), np.zeros(5))
        with self.assertRaises(GateError):
            oscillation_frequencies(np.r_[np.arange(10.0), 10.5], np.zeros(11))
