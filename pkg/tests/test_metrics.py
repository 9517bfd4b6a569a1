#  Copyright (c) 2025.  ftfgates
#     _____  __    _____
#    / __/ |/ /__ / __/__ ____ _/ /____ ___
#   / _//    / -_) _// _ `/ _ `/ __/ -_|_-<
#  /_/ /_/|_/\__/_/  \_, /\_,_/\__/\__/___/
#                   /___/
#  MIT License
#


"""Tests for the 36-state average fidelity and the error decomposition."""

import unittest

import numpy as np

from ftfgates.circuits.composite import COMPUTATIONAL_LABELS, QUBIT_STATES, CouplingGraph
from ftfgates.dynamics.evolution import PropagationResult, drive_workspace, operator_basis
from ftfgates.gates.metrics import (PRODUCT_STATES, GateError, average_fidelity, channel_from_block,
                                    computational_block, computational_channel, gate_metrics, ideal_phases,
                                    wrap_phase)
from .oracles import two_level_system

CZ = np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex)


def direct_fidelity(block, phi1, phi2, delta):
    """Mean of |<psi| D^dag M |psi>| over the product states, D the ideal diagonal."""
    n = np.diag(ideal_phases(phi1, phi2, delta)).conj() @ block
    return float(np.mean([abs(psi.conj() @ n @ psi) for psi in PRODUCT_STATES]))


class TestFidelity(unittest.TestCase):
    def test_product_states(self):
        self.assertEqual(PRODUCT_STATES.shape, (36, 4))
        np.testing.assert_allclose(np.linalg.norm(PRODUCT_STATES, axis=1), 1.0)

    def test_matches_direct_overlaps(self):
        rng = np.random.default_rng(7)
        block = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        block /= np.linalg.norm(block, 2)
        for phases in ((0.0, 0.0, 0.0), (0.4, -1.1, 0.2)):
            with self.subTest(phases=phases):
                self.assertAlmostEqual(average_fidelity(channel_from_block(block), *phases),
                                       direct_fidelity(block, *phases), places=12)

    def test_ideal_gate(self):
        result = gate_metrics(CZ)
        self.assertAlmostEqual(result.average_fidelity, 1.0, places=12)
        self.assertAlmostEqual(result.raw_error, 0.0, places=12)
        self.assertAlmostEqual(result.delta_theta, 0.0, places=12)
        self.assertTrue(all(abs(value) < 1e-12 for value in result.leakage.values()))

    def test_global_and_local_phases(self):
        a, b = 0.3, -0.7
        block = np.exp(0.9j) * np.diag(np.exp(1j * np.array([0.0, b, a, np.pi + a + b])))
        result = gate_metrics(block)
        self.assertAlmostEqual(result.raw_error, 0.0, places=12)
        self.assertAlmostEqual(result.phase_error, 0.0, places=12)
        self.assertAlmostEqual(result.phases["10"], a, places=12)
        self.assertAlmostEqual(result.phases["01"], b, places=12)

    def test_fixed_phases_raise_raw_error(self):
        block = np.diag(np.exp(1j * np.array([0.0, 0.1, 0.1, np.pi + 0.2])))
        result = gate_metrics(block, fixed_phases=(0.0, 0.0))
        self.assertAlmostEqual(result.raw_error, 1.0 - direct_fidelity(block, 0.0, 0.0, 0.0), places=12)
        self.assertLess(result.phase_error, 1e-8)

    def test_conditional_phase_error(self):
        block = np.diag(np.exp(1j * np.array([0.0, 0.0, 0.0, np.pi + 0.1])))
        result = gate_metrics(block)
        self.assertAlmostEqual(result.delta_theta, 0.1, places=12)
        self.assertGreater(result.phase_error, 1e-4)
        self.assertLess(result.leakage_error, 1e-6)
        self.assertAlmostEqual(result.optimized_delta, 0.1, delta=0.01)
        self.assertGreaterEqual(result.raw_error, result.phase_error)

    def test_leakage(self):
        block = CZ.copy()
        block[3, 3] = -np.sqrt(0.99)
        result = gate_metrics(block)
        self.assertAlmostEqual(result.leakage["11"], 0.01, places=12)
        self.assertAlmostEqual(result.leakage["00"], 0.0, places=12)
        self.assertGreater(result.leakage_error, 0.0)
        self.assertAlmostEqual(result.leakage_error, 1.0 - direct_fidelity(block, 0.0, 0.0, 0.0), places=6)

    def test_root_fidelity_convention(self):
        loss = 1e-3
        block = CZ.copy()
        block[0, 0] = np.sqrt(1.0 - loss)
        result = gate_metrics(block)
        # |00> carries a quarter of the population on average over the product states
        self.assertAlmostEqual(result.raw_error, 0.25 * (1.0 - np.sqrt(1.0 - loss)), places=10)
        self.assertAlmostEqual(result.raw_error, 1.2503e-4, delta=1e-7)

    def test_mixed_output_uses_square_root(self):
        flipped = CZ @ np.diag([1.0, 1.0, -1.0, -1.0]).astype(complex)
        channel = 0.9 * channel_from_block(CZ) + 0.1 * channel_from_block(flipped)
        psi = PRODUCT_STATES
        rho = np.einsum("cdab,sa,sb->scd", channel, psi, psi.conj())
        target = psi * ideal_phases(0.0, 0.0, 0.0)[np.newaxis, :]
        overlaps = np.real(np.einsum("sc,scd,sd->s", target.conj(), rho, target))
        self.assertAlmostEqual(average_fidelity(channel, 0.0, 0.0, 0.0), float(np.mean(np.sqrt(overlaps))), places=12)

    def test_large_single_qubit_offsets(self):
        a, b = -2.0, 2.5
        block = np.diag(np.exp(1j * np.array([0.0, b, a, np.pi + a + b])))
        result = gate_metrics(block, fixed_phases=(0.0, 0.0))
        self.assertGreater(result.raw_error, 0.1)
        self.assertLess(result.phase_error, 1e-6)
        self.assertAlmostEqual(wrap_phase(result.single_qubit_phases[0] - a), 0.0, delta=0.01)
        self.assertAlmostEqual(wrap_phase(result.single_qubit_phases[1] - b), 0.0, delta=0.01)

    def test_malformed_input(self):
        with self.assertRaises(GateError):
            gate_metrics(np.eye(3))
        with self.assertRaises(GateError):
            gate_metrics(-channel_from_block(np.eye(4)), check_physical=True)


class TestChannels(unittest.TestCase):
    def setUp(self):
        self.workspace = drive_workspace(two_level_system(5.0, 6.0, 4.0, CouplingGraph()), levels=8)

    def test_identity_channel(self):
        labels = [COMPUTATIONAL_LABELS[key] for key in QUBIT_STATES]
        densities = operator_basis(self.workspace, labels)
        np.testing.assert_allclose(computational_channel(densities, self.workspace), channel_from_block(np.eye(4)))

    def test_channel_needs_sixteen_outputs(self):
        with self.assertRaises(GateError):
            computational_channel([np.eye(8)] * 4, self.workspace)

    def test_block_from_states(self):
        states = np.stack([self.workspace.ket(COMPUTATIONAL_LABELS[key]) for key in QUBIT_STATES], axis=1)
        block = computational_block(PropagationResult(states=states, duration=1.0), self.workspace)
        np.testing.assert_allclose(block, np.eye(4))
        with self.assertRaises(GateError):
            computational_block(PropagationResult(states=states[:, :3], duration=1.0), self.workspace)


class TestPhases(unittest.TestCase):
    def test_wrap(self):
        self.assertEqual(wrap_phase(-np.pi), np.pi)
        self.assertAlmostEqual(wrap_phase(1.5 * np.pi), -0.5 * np.pi, places=12)
        self.assertAlmostEqual(wrap_phase(0.25), 0.25, places=15)
