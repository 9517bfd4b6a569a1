#  Copyright (c) 2025.  ftfgates
#     _____  __    _____
#    / __/ |/ /__ / __/__ ____ _/ /____ ___
#   / _//    / -_) _// _ `/ _ `/ __/ -_|_-<
#  /_/ /_/|_/\__/_/  \_, /\_,_/\__/\__/___/
#                   /___/
#  MIT License
#


"""Tests for the capacitance network compiler."""

import unittest

import numpy as np

from ftfgates.capnet.network import (Capacitances, CapnetError, Gauge, Topology, asymptotic_report, build_network,
                                     compile_table, extract_params, network_from_edges, published_table,
                                     table_columns)
from ftfgates.core.units import EFF_CHARGE_GHZ_FF

ROW_1 = Capacitances(C_T=70, C_f1=6, C_f2=6, C_c=6)

# E_C in GHz, J in MHz
ROW_1_EXPECTED = {
    "E_C1": 1.9470, "E_C2": 1.6452, "E_Ctc": 0.2504,
    "J_12": -99.209, "J_1c": -400.715, "J_2c": 496.045,
    "J_13": -0.9597, "J_1c2": -3.8783, "J_cc": 19.3913, "J_c1c3": 0.1972,
}


# E_C in GHz, J in MHz, as printed; column order of table_columns()
CHAIN_PUBLISHED = {
    1: (1.942, 1.641, 0.250, -98.94, -399.6, 494.7, -0.957, -3.868, 19.34, 0.197),
    2: (1.945, 1.651, 0.337, -133.0, -539.0, 665.0, -1.734, -7.032, 35.16, 0.491),
    3: (1.859, 1.363, 0.239, -214.5, -547.1, 750.8, -4.222, -10.78, 37.74, 0.799),
    4: (1.598, 1.402, 0.246, -79.70, -374.2, 419.8, -0.490, -2.30, 12.11, 0.079),
    5: (1.617, 1.402, 0.249, -70.42, -332.3, 422.5, -0.776, -3.665, 21.99, 0.255),
    6: (1.951, 1.668, 0.269, -133.8, -215.8, -263.2, -1.763, -2.845, -5.595, -0.068),
    7: (1.943, 1.645, 0.269, -60.89, -215.5, -265.5, -0.363, -1.285, -5.603, -0.032),
    8: (1.940, 1.632, 0.269, -19.15, -215.3, -266.8, -0.036, -0.402, -5.607, -0.010),
    9: (1.876, 1.425, 0.266, -277.1, -306.2, -406.5, -7.129, -7.896, -11.58, -0.268),
    10: (1.863, 1.375, 0.266, -130.9, -305.2, -413.6, -1.577, -3.679, -11.63, -0.134),
    11: (1.854, 1.344, 0.266, -42.07, -304.5, -417.9, -0.162, -1.173, -11.65, -0.044),
    12: (1.515, 1.180, 0.264, -37.21, -307.6, -368.0, -0.102, -0.839, -8.302, -0.022),
    13: (1.519, 1.191, 0.305, -55.90, -356.3, -424.9, -0.230, -1.464, -11.13, -0.045),
}
LATTICE_PUBLISHED = {
    1: (1.329, 1.641, 0.247, -98.91, -399.8, 489.6, 11.11, 42.67, 0.113, 0.434),
    2: (1.345, 1.652, 0.333, -133.0, -539.5, 655.9, 20.75, 78.56, 0.290, 1.096),
}


def assert_close(test, actual, expected, rel=0.01, abs_tol=5e-4):
    test.assertLessEqual(abs(actual - expected), rel * abs(expected) + abs_tol, f"{actual} != {expected}")


class TestChainGrounded(unittest.TestCase):
    def setUp(self):
        self.params = extract_params(build_network(Topology.CHAIN_GROUNDED, ROW_1))

    def test_published_row(self):
        names = [name for name, _ in table_columns(Topology.CHAIN_GROUNDED)]
        for name, value in zip(names, self.params.table_row()):
            with self.subTest(column=name):
                assert_close(self, value, ROW_1_EXPECTED[name])

    def test_sum_modes_dropped(self):
        self.assertNotIn("q1+", self.params.modes)
        self.assertIn("q1", self.params.modes)
        with self.assertRaises(CapnetError):
            self.params.charging_energy("q1+")

    def test_coupling_symmetric(self):
        self.assertEqual(self.params.coupling("q1", "c1"), self.params.coupling("c1", "q1"))

    def test_positive_coupler_gauge(self):
        flipped = extract_params(build_network(Topology.CHAIN_GROUNDED, ROW_1, gauge=Gauge.POSITIVE_COUPLER))
        self.assertGreater(flipped.coupling("q1", "c1"), 0)
        self.assertGreater(flipped.coupling("q2", "c1"), 0)
        self.assertAlmostEqual(abs(flipped.coupling("q1", "q2")), abs(self.params.coupling("q1", "q2")), places=12)
        self.assertAlmostEqual(flipped.charging_energy("q1"), self.params.charging_energy("q1"), places=12)

    def test_compile_table(self):
        rows = compile_table(Topology.CHAIN_GROUNDED)
        self.assertEqual([k for k, _ in rows], [1, 2, 3, 4, 5])
        np.testing.assert_allclose(rows[0][1].table_row(), self.params.table_row())

    def test_parallel_compile_matches_serial(self):
        serial = compile_table(Topology.CHAIN_GROUNDED, jobs=1)
        parallel = compile_table(Topology.CHAIN_GROUNDED, jobs=2)
        for (k, a), (l, b) in zip(serial, parallel):
            self.assertEqual(k, l)
            np.testing.assert_allclose(a.table_row(), b.table_row())

    def test_smaller_coupler_capacitance_couples_harder(self):
        capacitances = published_table("chain-grounded")[1].capacitances
        row_2 = extract_params(build_network(Topology.CHAIN_GROUNDED, capacitances))
        self.assertGreater(abs(row_2.coupling("q1", "c1")), abs(self.params.coupling("q1", "c1")))
        self.assertGreater(row_2.charging_energy("c1"), self.params.charging_energy("c1"))


class TestPublishedTables(unittest.TestCase):
    # 5e-4 absolute covers the three printed decimals of the smallest couplings (J_c1c3 of rows 7, 8, 12)
    def check_rows(self, topology, published, rows):
        for identifier, params in rows:
            if identifier not in published:
                continue
            names = [name for name, _ in table_columns(topology)]
            for name, value, expected in zip(names, params.table_row(), published[identifier]):
                with self.subTest(row=identifier, column=name):
                    assert_close(self, value, expected)

    def test_chain_grounded_rows(self):
        rows = compile_table(Topology.CHAIN_GROUNDED)
        self.assertEqual(len(rows), 5)
        self.check_rows(Topology.CHAIN_GROUNDED, CHAIN_PUBLISHED, rows)

    def test_chain_differential_rows(self):
        rows = compile_table(Topology.CHAIN_DIFFERENTIAL)
        self.assertEqual(len(rows), 8)
        self.check_rows(Topology.CHAIN_DIFFERENTIAL, CHAIN_PUBLISHED, rows)

    def test_lattice_rows(self):
        rows = compile_table(Topology.LATTICE_GROUNDED)
        self.assertEqual([k for k, _ in rows][:2], [1, 2])
        self.check_rows(Topology.LATTICE_GROUNDED, LATTICE_PUBLISHED, rows)

    def test_differential_signs_survive_gauge(self):
        # J_12 J_1c J_2c does not depend on the sign of the qubit modes
        for identifier, params in compile_table(Topology.CHAIN_DIFFERENTIAL, gauge=Gauge.POSITIVE_COUPLER):
            with self.subTest(row=identifier):
                self.assertGreater(params.coupling("q1", "c1"), 0)
                self.assertLess(params.coupling("q1", "q2"), 0)

    def test_transformed_inverse_matches_dense_inverse(self):
        for topology in (Topology.CHAIN_GROUNDED, Topology.CHAIN_DIFFERENTIAL, Topology.LATTICE_GROUNDED):
            row = published_table(topology)[0].capacitances
            network = build_network(topology, row)
            expected = network.transform @ np.linalg.inv(network.capacitance) @ network.transform.T
            with self.subTest(topology=topology.value):
                np.testing.assert_allclose(network.transformed_inverse, expected, rtol=1e-10, atol=1e-14)


class TestAsymptotics(unittest.TestCase):
    def test_chain_suppression_ratios(self):
        report = asymptotic_report(build_network(Topology.CHAIN_GROUNDED, ROW_1))
        next_coupler = report.entry("q1,c2/q1,c1")
        self.assertAlmostEqual(abs(next_coupler.exact), 0.00968, delta=0.0002)
        self.assertAlmostEqual(next_coupler.scaling, 6.0 / 560.0, places=12)
        next_qubit = report.entry("q1,q3/q1,c2")
        self.assertAlmostEqual(abs(next_qubit.exact), 0.2475, delta=0.003)
        self.assertEqual(next_qubit.scaling, 0.2)

    def test_closed_form_of_diagonal(self):
        report = asymptotic_report(build_network(Topology.CHAIN_GROUNDED, ROW_1))
        for name in ("q1,q1", "q2,q2"):
            with self.subTest(element=name):
                self.assertLess(report.entry(name).closed_deviation, 0.05)

    def test_lattice_coupler_ratio(self):
        report = asymptotic_report(build_network(Topology.LATTICE_GROUNDED, ROW_1))
        ratio = report.entry("c3,c6/c3,c8")
        self.assertAlmostEqual(ratio.exact, 3.84, delta=0.05)
        self.assertEqual(ratio.scaling, 4.0)

    def test_differential_reports_ratios_only(self):
        caps = published_table(Topology.CHAIN_DIFFERENTIAL)[0].capacitances
        report = asymptotic_report(build_network(Topology.CHAIN_DIFFERENTIAL, caps))
        self.assertTrue(all(entry.closed_form is None for entry in report.entries))
        self.assertLess(abs(report.entry("q1,c2/q1,c1").exact), 1.0)

    def test_unknown_entry(self):
        report = asymptotic_report(build_network(Topology.CHAIN_GROUNDED, ROW_1))
        with self.assertRaises(CapnetError):
            report.entry("q9,q9")


class TestNetworks(unittest.TestCase):
    def test_differential_table(self):
        rows = compile_table(Topology.CHAIN_DIFFERENTIAL)
        self.assertEqual([k for k, _ in rows], list(range(6, 14)))
        for _, params in rows:
            self.assertTrue(all(params.charging_energy(m) > 0 for m in ("q1", "q2", "c1")))

    def test_lattice_modes(self):
        params = extract_params(build_network(Topology.LATTICE_GROUNDED, ROW_1))
        self.assertEqual(params.modes, ["q1", "c3", "q2", "c6", "c7", "c8", "c9"])
        self.assertEqual(len(params.table_row()), len(table_columns(Topology.LATTICE_GROUNDED)))

    def test_uncoupled_network_is_diagonal(self):
        params = extract_params(build_network(Topology.CHAIN_GROUNDED, ROW_1.model_copy(update={"C_c": 0.0})))
        self.assertLess(max(abs(value) for value in params.couplings.values()), 1e-12)

    def test_missing_capacitance(self):
        with self.assertRaises(CapnetError) as ctx:
            build_network(Topology.CHAIN_DIFFERENTIAL, ROW_1)
        self.assertEqual(ctx.exception.context["missing"], ["C_t1", "C_t2"])

    def test_non_positive_capacitance(self):
        with self.assertRaises(CapnetError):
            build_network(Topology.CHAIN_GROUNDED, {"C_T": 0.0, "C_f1": 6, "C_f2": 6, "C_c": 6})

    def test_unsupported_topology(self):
        with self.assertRaises(CapnetError):
            build_network("ring", ROW_1)
        with self.assertRaises(CapnetError):
            build_network(Topology.CUSTOM, ROW_1)

    def test_floating_island_is_singular(self):
        network = network_from_edges(["a", "b", "g"], [(0, 1, 5.0), (2, None, 10.0)])
        with self.assertRaises(CapnetError) as ctx:
            extract_params(network)
        self.assertIn(ctx.exception.context["null_space_mode"], ("a", "b"))

    def test_custom_pair_names(self):
        network = network_from_edges(["a", "b"], [(0, None, 5.0), (1, None, 5.0), (0, 1, 2.0)], pairs=[(0, 1)])
        params = extract_params(network)
        self.assertEqual(params.modes, ["a-b"])
        # difference mode of two 5 fF pads shunted by 2 fF: C~ = (5 + 2*2)/2 = 4.5 fF
        self.assertAlmostEqual(params.charging_energy("a-b"), EFF_CHARGE_GHZ_FF / 4.5, places=9)
