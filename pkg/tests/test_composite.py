#  Copyright (c) 2025.  ftfgates
#     _____  __    _____
#    / __/ |/ /__ / __/__ ____ _/ /____ ___
#   / _//    / -_) _// _ `/ _ `/ __/ -_|_-<
#  /_/ /_/|_/\__/_/  \_, /\_,_/\__/\__/___/
#                   /___/
#  MIT License
#

"""Tests for the composite Hamiltonian, labeling, ZZ and delocalization."""

import unittest

import numpy as np

from ftfgates.circuits.composite import (COMPUTATIONAL_LABELS, CompositeError, CouplingGraph, Manifold, Truncation,
                                         assemble, delocalization, dressed_shift_table, flux_sweep,
                                         hamiltonian_flux_derivative, label_states, static_zz, zz_map)
from .oracles import ADIABATIC_CIRCUIT, DISPERSIVE_CIRCUIT, central_difference, ladder_spectrum, two_level_system


class TestUncoupled(unittest.TestCase):
    def setUp(self):
        self.circuit = DISPERSIVE_CIRCUIT.with_couplings(CouplingGraph())
        self.system = self.circuit.system()

    def test_dressed_energies_are_bare_sums(self):
        f1, c, f2 = self.system.modes
        for label in [(0, 0, 0), (1, 0, 1), (2, 1, 0), (0, 3, 5)]:
            expected = f1.energies[label[0]] + c.energies[label[1]] + f2.energies[label[2]]
            self.assertAlmostEqual(self.system.energy(label), expected, places=9)

    def test_labels_resolved(self):
        self.assertFalse(self.system.flagged.any())
        np.testing.assert_allclose(self.system.max_overlaps, 1.0, atol=1e-12)

    def test_no_zz_no_delocalization(self):
        self.assertAlmostEqual(static_zz(self.system).zeta, 0.0, places=10)
        self.assertEqual(delocalization(self.system).epsilon, 0.0)

    def test_bare_index_round_trip(self):
        for index in (0, 7, self.system.dimension - 1):
            self.assertEqual(self.system.bare_index(self.system.bare_label(index)), index)
        with self.assertRaises(CompositeError):
            self.system.bare_index((6, 0, 0))

    def test_shift_tables(self):
        ground = dressed_shift_table(self.system)
        excited = dressed_shift_table(self.system, Manifold.COUPLER_EXCITED)
        self.assertAlmostEqual(ground.zeta(), 0.0, places=10)
        coupler_f01 = self.system.modes[1].transition(0, 1)
        for value in excited.chi.values():
            self.assertAlmostEqual(value, coupler_f01, places=9)


class TestTwoLevelOracle(unittest.TestCase):
    def test_direct_exchange(self):
        # |100> and |001> split by 1 GHz and exchanged through J_12
        system = two_level_system(5.0, 10.0, 4.0, CouplingGraph(J_12=0.1))
        mixing = 0.5 * (1 - 1 / np.sqrt(1 + 4 * 0.1 ** 2))
        self.assertAlmostEqual(delocalization(system).epsilon, mixing, places=10)
        self.assertAlmostEqual(system.energy((1, 0, 0)), 4.5 + np.sqrt(0.25 + 0.01), places=10)
        # sigma_x x sigma_x keeps 00+11 and 01+10 in separate blocks with equal traces
        self.assertAlmostEqual(static_zz(system).zeta, 0.0, places=10)

    def test_hamiltonian_hermitian_and_complete(self):
        system = two_level_system(5.0, 3.0, 4.0, CouplingGraph(J_12=0.1, J_1c=0.2, J_2c=0.3))
        np.testing.assert_allclose(system.hamiltonian, system.hamiltonian.conj().T)
        np.testing.assert_allclose(system.bare_weight_sums(), 1.0, atol=1e-12)

    def test_mode_shape_checked(self):
        bad = ladder_spectrum([0.0, 1.0]).model_copy(update={"n_elements": np.zeros((3, 3))})
        with self.assertRaises(CompositeError):
            assemble((bad, ladder_spectrum([0.0, 2.0]), ladder_spectrum([0.0, 3.0])), CouplingGraph())


class TestLabeling(unittest.TestCase):
    def test_hybridized_states_flagged(self):
        # a three-way superposition has no bare state above one half
        vectors = np.eye(8, dtype=complex)
        vectors[:, 1] = 0
        vectors[[1, 2, 4], 1] = np.sqrt([0.4, 0.3, 0.3])
        labels, overlaps, flagged = label_states(vectors, (2, 2, 2))
        self.assertTrue(flagged[1])
        self.assertAlmostEqual(overlaps[1], 0.4)
        self.assertEqual(labels[1], (0, 0, 1))
        # untouched columns keep their labels
        self.assertFalse(flagged[0])
        self.assertEqual(labels[0], (0, 0, 0))

    def test_threshold_is_one_half(self):
        for weight, flagged_expected in ((0.49, True), (0.51, False)):
            vectors = np.eye(8, dtype=complex)
            vectors[:, 5] = 0
            vectors[[5, 6, 7], 5] = np.sqrt([weight, 0.5 * (1 - weight), 0.5 * (1 - weight)])
            with self.subTest(weight=weight):
                labels, overlaps, flagged = label_states(vectors, (2, 2, 2))
                self.assertAlmostEqual(overlaps[5], weight, places=12)
                self.assertEqual(bool(flagged[5]), flagged_expected)
                self.assertEqual(labels[5], (1, 0, 1))

    def test_duplicate_labels_flagged(self):
        vectors = np.eye(8, dtype=complex)
        vectors[:, 3] = 0
        vectors[[2, 3], 3] = np.sqrt([0.9, 0.1])
        labels, _, flagged = label_states(vectors, (2, 2, 2))
        self.assertEqual(labels[2], labels[3])
        self.assertTrue(flagged[2] and flagged[3])

    def test_flagged_state_lookup(self):
        system = two_level_system(5.0, 10.0, 4.0, CouplingGraph(J_12=0.1))
        k = system.labels.index((1, 0, 0))
        flagged = system.flagged.copy()
        flagged[k] = True
        hybrid = system.model_copy(update={"flagged": flagged})
        self.assertIsNone(hybrid.index((1, 0, 0)))
        self.assertEqual(hybrid.index((1, 0, 0), allow_flagged=True), k)
        self.assertFalse(static_zz(hybrid).valid)
        self.assertFalse(delocalization(hybrid).valid)
        self.assertTrue(np.isfinite(static_zz(hybrid).zeta))


class TestCircuits(unittest.TestCase):
    def test_idle_computational_states_resolved(self):
        system = ADIABATIC_CIRCUIT.system()
        report = static_zz(system)
        self.assertTrue(report.valid)
        for label in COMPUTATIONAL_LABELS.values():
            self.assertGreater(system.max_overlaps[system.index(label)], 0.5)

    def test_flux_derivative_matches_finite_difference(self):
        system = ADIABATIC_CIRCUIT.system(0.7)
        derivative = hamiltonian_flux_derivative(system)
        numeric = central_difference(system.hamiltonian_at, 0.7)
        np.testing.assert_allclose(derivative, numeric, atol=1e-6)

    def test_hamiltonian_at_own_bias(self):
        system = ADIABATIC_CIRCUIT.system(0.4)
        np.testing.assert_allclose(system.hamiltonian_at(0.4), system.hamiltonian)

    def test_flux_sweep_order(self):
        fluxes = [0.0, 0.5, 1.0]
        systems = flux_sweep(DISPERSIVE_CIRCUIT, fluxes)
        self.assertEqual([s.coupler.phi_ext for s in systems], fluxes)
        reference = DISPERSIVE_CIRCUIT.system(0.5)
        np.testing.assert_allclose(systems[1].energies, reference.energies, atol=1e-10)

    def test_zz_map_grid_order(self):
        points = zz_map(DISPERSIVE_CIRCUIT, [0.01, 0.02], [0.0, 0.3, 0.6], ratio=0.5)
        self.assertEqual(len(points), 6)
        self.assertEqual([p.J_c for p in points[:3]], [0.01] * 3)
        self.assertEqual([p.phi for p in points[3:]], [0.0, 0.3, 0.6])
        single = DISPERSIVE_CIRCUIT.with_couplings(CouplingGraph(J_12=0.005, J_1c=0.02, J_2c=0.01))
        self.assertAlmostEqual(points[4].zeta, static_zz(single.system(0.3)).zeta, places=12)

    def test_truncation_strict(self):
        with self.assertRaises(ValueError):
            Truncation(osc_levels=10)
        with self.assertRaises(ValueError):
            Truncation.model_validate({"levels": 3})


if __name__ == '__main__':
    unittest.main()
