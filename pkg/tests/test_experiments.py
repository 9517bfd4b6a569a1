#  Copyright (c) 2025.  ftfgates
#     _____  __    _____
#    / __/ |/ /__ / __/__ ____ _/ /____ ___
#   / _//    / -_) _// _ `/ _ `/ __/ -_|_-<
#  /_/ /_/|_/\__/_/  \_, /\_,_/\__/\__/___/
#                   /___/
#  MIT License
#


"""Tests for experiment files, run manifests and the command line."""

import json
import tempfile
import unittest
from pathlib import Path
from unittest.mock import patch

import numpy as np

from ftfgates.__main__ import main
from ftfgates.core.errors import ToolkitError
from ftfgates.core.output import read_csv
from ftfgates.experiments.main import report_error, resolve_output
from ftfgates.experiments.manifest import MANIFEST_NAME, OutputFile, RunManifest
from ftfgates.experiments.pipelines import run_experiment, zero_crossings
from ftfgates.experiments.schema import (ExperimentKind, InputFileError, SchemaError, load_experiment, locate_key,
                                         parse_experiment)

from .oracles import slow

CONFIGS = Path(__file__).parent.parent / "configs"

CIRCUIT = """
[circuit.fluxonium1]
E_C = 1.5
E_J = 4.1
E_L = 0.18
phi_ext = { value = 0.0, unit = "flux-quanta" }

[circuit.fluxonium2]
E_C = 1.5
E_J = 3.8
E_L = 0.14
phi_ext = { value = 0.0, unit = "radians" }

[circuit.coupler]
E_C = 0.18
E_J = 18.0
phi_ext = { value = 0.0, unit = "flux-quanta" }

[circuit.couplings]
J_12 = -0.1
J_1c = 0.6
J_2c = 0.6
"""

SPECTRUM = """[experiment]
name = "toy-spectrum"
kind = "spectrum"
""" + CIRCUIT + """
[truncation]
fluxonium_levels = 3
coupler_levels = 3

[sweep]
flux = { start = 0.0, stop = 0.2, points = 3, unit = "flux-quanta" }
"""

CAPNET = """[experiment]
name = "toy-capnet"
kind = "capnet"

[capnet]
topology = "chain-grounded"

[[capnet.network]]
C_T = 70.0
C_f1 = 6.0
C_f2 = 6.0
C_c = 6.0

[[capnet.network]]
C_T = 70.0
C_f1 = 8.0
C_f2 = 8.0
C_c = 8.0
"""


def write_file(directory: str, name: str, text: str) -> Path:
    path = Path(directory) / name
    path.write_text(text, encoding="utf-8")
    return path


class TestSchema(unittest.TestCase):
    def test_valid_experiment(self):
        experiment = parse_experiment(SPECTRUM)
        self.assertEqual(experiment.experiment.kind, ExperimentKind.SPECTRUM)
        circuit = experiment.build_circuit()
        self.assertEqual(circuit.truncation.fluxonium_levels, 3)
        np.testing.assert_allclose(experiment.sweep.flux.radians(), [0.0, 0.2 * np.pi, 0.4 * np.pi])

    def test_flux_units_are_converted(self):
        text = SPECTRUM.replace('E_L = 0.18\nphi_ext = { value = 0.0, unit = "flux-quanta" }',
                                'E_L = 0.18\nphi_ext = { value = 0.5, unit = "flux-quanta" }')
        circuit = parse_experiment(text).build_circuit()
        self.assertAlmostEqual(circuit.fluxonium1.phi_ext, np.pi)

    def test_missing_unit_names_the_key(self):
        text = SPECTRUM.replace('phi_ext = { value = 0.0, unit = "radians" }', 'phi_ext = { value = 0.0 }')
        with self.assertRaises(SchemaError) as ctx:
            parse_experiment(text, "toy.toml")
        err = ctx.exception
        self.assertEqual(err.context["key"], "circuit.fluxonium2.phi_ext.unit")
        line = text.splitlines().index("phi_ext = { value = 0.0 }") + 1
        self.assertEqual(err.context["line"], line)
        self.assertEqual(err.context["column"], 1)
        self.assertIn("toy.toml", str(err))
        self.assertEqual(err.module, "cli")

    def test_zero_inductance_is_rejected(self):
        text = SPECTRUM.replace("E_L = 0.18", "E_L = 0.0")
        with self.assertRaises(SchemaError) as ctx:
            parse_experiment(text)
        self.assertEqual(ctx.exception.context["key"], "circuit.fluxonium1.E_L")

    def test_unknown_key_is_rejected(self):
        text = SPECTRUM.replace("coupler_levels = 3", "coupler_levels = 3\ncoupler_level = 3")
        with self.assertRaises(SchemaError) as ctx:
            parse_experiment(text)
        self.assertEqual(ctx.exception.context["key"], "truncation.coupler_level")

    def test_invalid_toml(self):
        with self.assertRaises(SchemaError) as ctx:
            parse_experiment("[experiment]\nname = \n")
        self.assertEqual(ctx.exception.context["line"], 2)
        self.assertIn("invalid TOML", str(ctx.exception))

    def test_kind_needs_its_sections(self):
        text = '[experiment]\nname = "x"\nkind = "adiabatic-cz"\n' + CIRCUIT
        with self.assertRaises(SchemaError) as ctx:
            parse_experiment(text)
        self.assertIn("[adiabatic]", str(ctx.exception))

    def test_capnet_needs_networks_or_table(self):
        with self.assertRaises(SchemaError):
            parse_experiment('[experiment]\nname = "x"\nkind = "capnet"\n\n[capnet]\ntopology = "lattice-grounded"\n')
        experiment = parse_experiment(CAPNET)
        self.assertEqual(len(experiment.capnet.network), 2)

    def test_locate_key(self):
        text = "[a]\nx = 1\n\n[a.b]\n  y = 2\n"
        self.assertEqual(locate_key(text, ("a", "b", "y")), (5, 3))
        self.assertEqual(locate_key(text, ("a", "b", "z")), (4, 1))
        self.assertEqual(locate_key(text, ("a", 0, "x")), (2, 1))
        self.assertEqual(locate_key(text, ("missing",)), (1, 1))
        self.assertEqual(locate_key(text, ()), (1, 1))

    def test_missing_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            with self.assertRaises(InputFileError) as ctx:
                load_experiment(Path(tmp) / "absent.toml")
        self.assertIsInstance(ctx.exception, OSError)
        self.assertEqual(ctx.exception.module, "cli")

    def test_shipped_configs_validate(self):
        for path in sorted(CONFIGS.glob("*.toml")):
            if path.name.startswith("capnet_row"):
                continue
            with self.subTest(config=path.name):
                load_experiment(path)


class TestRunHelpers(unittest.TestCase):
    def test_resolve_output_precedence(self):
        experiment = parse_experiment(SPECTRUM)
        self.assertEqual(resolve_output(experiment, None, None, "results", 7), (Path("results/toy-spectrum"), 7))
        self.assertEqual(resolve_output(experiment, "here", 3, "results", 7), (Path("here"), 3))
        configured = parse_experiment(SPECTRUM + '\n[output]\ndirectory = "there"\nseed = 11\n')
        self.assertEqual(resolve_output(configured, None, None, "results", 7), (Path("there"), 11))
        self.assertEqual(resolve_output(configured, "here", None, "results", 7), (Path("here"), 11))

    def test_zero_crossings(self):
        fluxes = [0.0, 1.0, 2.0, 3.0, 4.0]
        roots = zero_crossings(fluxes, [-1.0, 1.0, 3.0, -1.0, -2.0], [True] * 5)
        np.testing.assert_allclose(roots, [0.5, 2.75])

    def test_zero_crossings_skip_unresolved_points(self):
        fluxes = [0.0, 1.0, 2.0]
        self.assertEqual(zero_crossings(fluxes, [-1.0, 5.0, 1.0], [True, False, True]), [1.0])
        self.assertEqual(zero_crossings(fluxes, [0.0, 1.0, 2.0], [True, True, True]), [0.0])

    def test_manifest_round_trip(self):
        manifest = RunManifest(experiment="toy", kind="spectrum", config_hash="0123456789abcdef", seed=1,
                               outputs=[OutputFile(name="spectrum.csv", rows=3)], results={"f01": 0.2},
                               wall_clock=1.5)
        with tempfile.TemporaryDirectory() as tmp:
            path = manifest.write(Path(tmp) / "run")
            self.assertEqual(path.name, MANIFEST_NAME)
            self.assertEqual(RunManifest.read(path.parent), manifest)

    def test_report_error_exit_codes(self):
        with patch("ftfgates.experiments.main.stderr_console"):
            self.assertEqual(report_error(InputFileError("missing")), 3)
            self.assertEqual(report_error(SchemaError("bad key")), 2)
            self.assertEqual(report_error(ToolkitError("failed")), 1)


class TestRunExperiment(unittest.TestCase):
    def test_capnet_run(self):
        experiment = parse_experiment(CAPNET)
        with tempfile.TemporaryDirectory() as tmp:
            manifest = run_experiment(experiment, tmp, seed=5)
            table = read_csv(Path(tmp) / "capnet.csv")
            stored = json.loads((Path(tmp) / MANIFEST_NAME).read_text(encoding="utf-8"))
        self.assertEqual(table.shape[0], 2)
        np.testing.assert_array_equal(table[:, 0], [1, 2])
        self.assertEqual(manifest.outputs, [OutputFile(name="capnet.csv", rows=2)])
        self.assertEqual(manifest.results["rows"], 2)
        self.assertEqual(len(manifest.results["asymptotics"]), 2)
        self.assertEqual(stored["config_hash"], manifest.config_hash)
        self.assertEqual(stored["seed"], 5)

    def test_config_hash_depends_on_seed(self):
        experiment = parse_experiment(CAPNET)
        with tempfile.TemporaryDirectory() as tmp:
            first = run_experiment(experiment, Path(tmp) / "a", seed=1)
            again = run_experiment(experiment, Path(tmp) / "b", seed=1)
            other = run_experiment(experiment, Path(tmp) / "c", seed=2)
            first_csv = (Path(tmp) / "a" / "capnet.csv").read_text(encoding="utf-8")
            again_csv = (Path(tmp) / "b" / "capnet.csv").read_text(encoding="utf-8")
        self.assertEqual(first.config_hash, again.config_hash)
        self.assertNotEqual(first.config_hash, other.config_hash)
        self.assertEqual(first_csv, again_csv)

    def test_spectrum_run(self):
        experiment = parse_experiment(SPECTRUM)
        with tempfile.TemporaryDirectory() as tmp:
            manifest = run_experiment(experiment, tmp, seed=1)
            modes = read_csv(Path(tmp) / "modes.csv")
            spectrum = read_csv(Path(tmp) / "spectrum.csv")
        self.assertEqual([o.name for o in manifest.outputs], ["modes.csv", "spectrum.csv"])
        self.assertEqual(spectrum.shape, (3 * 20, 8))
        self.assertEqual(len(np.unique(spectrum[:, 0])), 3)
        self.assertEqual(set(np.unique(modes[:, 0])), {0.0, 1.0, 2.0})
        self.assertGreater(manifest.results["f01"]["coupler"], 0.0)
        ground = spectrum[spectrum[:, 1] == 0]
        np.testing.assert_array_equal(ground[:, 3:6], np.zeros((3, 3)))


class TestCommandLine(unittest.TestCase):
    def test_validate(self):
        with tempfile.TemporaryDirectory() as tmp:
            good = write_file(tmp, "good.toml", SPECTRUM)
            bad = write_file(tmp, "bad.toml", SPECTRUM.replace('unit = "radians"', 'unit = "degrees"'))
            with patch("ftfgates.experiments.main.console") as console, \
                    patch("ftfgates.experiments.main.stderr_console") as stderr:
                self.assertEqual(main(["ftfgates", "validate", str(good)]), 0)
                console.print.assert_called_with("ok")
                self.assertEqual(main(["ftfgates", "validate", str(bad)]), 2)
                self.assertEqual(main(["ftfgates", "validate", str(Path(tmp) / "absent.toml")]), 3)
                self.assertEqual(stderr.print.call_count, 2)

    def test_run_writes_into_out(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = write_file(tmp, "capnet.toml", CAPNET)
            out = Path(tmp) / "out"
            with patch("ftfgates.experiments.main.console"):
                code = main(["ftfgates", "--out", str(out), "--seed", "9", "run", str(path)])
            self.assertEqual(code, 0)
            self.assertTrue((out / "capnet.csv").exists())
            self.assertEqual(RunManifest.read(out).seed, 9)

    def test_capnet_table(self):
        with tempfile.TemporaryDirectory() as tmp:
            with patch("ftfgates.capnet.main.console"):
                code = main(["ftfgates", "--out", tmp, "capnet", "--table", "chain-grounded"])
            self.assertEqual(code, 0)
            table = read_csv(Path(tmp) / "capnet.csv")
        self.assertGreaterEqual(table.shape[0], 2)
        np.testing.assert_array_equal(table[:, 0], np.arange(1, table.shape[0] + 1))

    def test_capnet_needs_input(self):
        with patch("ftfgates.experiments.main.stderr_console"):
            self.assertEqual(main(["ftfgates", "capnet"]), 2)

    def test_capnet_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = write_file(tmp, "row.toml", 'topology = "chain-grounded"\n\n[network]\n'
                                               'C_T = 70.0\nC_f1 = 6.0\nC_f2 = 6.0\nC_c = 6.0\n')
            with patch("ftfgates.capnet.main.console"):
                code = main(["ftfgates", "--out", tmp, "capnet", str(path)])
            self.assertEqual(code, 0)
            self.assertEqual(read_csv(Path(tmp) / "capnet.csv").shape[0], 1)

    def test_version(self):
        with patch("builtins.print") as printed:
            self.assertEqual(main(["ftfgates", "--version"]), 0)
        self.assertIn("version", printed.call_args[0][0])


@slow
class TestShippedExperiments(unittest.TestCase):
    def run_config(self, name: str, tmp: str) -> RunManifest:
        return run_experiment(load_experiment(CONFIGS / name), tmp, seed=20250101, jobs=2)

    def test_spectrum(self):
        with tempfile.TemporaryDirectory() as tmp:
            self.run_config("spectrum.toml", tmp)
            spectrum = read_csv(Path(tmp) / "spectrum.csv")
        self.assertEqual(len(np.unique(spectrum[:, 0])), 91)

    def test_perturbative_orders_track_exact(self):
        with tempfile.TemporaryDirectory() as tmp:
            self.run_config("perturbative_zz.toml", tmp)
            table = read_csv(Path(tmp) / "perturbative_zz.csv")
        resolved = table[table[:, 6] == 1]
        self.assertGreater(len(resolved), 0)
        deviation = np.max(np.abs(resolved[:, 4] - resolved[:, 5]))
        self.assertLess(deviation, 0.2 * np.max(np.abs(resolved[:, 5])) + 1e-5)

    def test_adiabatic_gate(self):
        with tempfile.TemporaryDirectory() as tmp:
            manifest = self.run_config("adiabatic_cz.toml", tmp)
            names = {output.name for output in manifest.outputs}
        self.assertTrue({"dtable.csv", "zz_curve.csv", "flat_scan.csv"} <= names)
        self.assertAlmostEqual(manifest.results["design"]["phase_rad"], np.pi, places=3)
        self.assertLess(manifest.results["gate"]["leakage_error"], 5e-3)


if __name__ == "__main__":
    unittest.main()
