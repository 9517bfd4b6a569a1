#  Copyright (c) 2025.  ftfgates
#     _____  __    _____
#    / __/ |/ /__ / __/__ ____ _/ /____ ___
#   / _//    / -_) _// _ `/ _ `/ __/ -_|_-<
#  /_/ /_/|_/\__/_/  \_, /\_,_/\__/\__/___/
#                   /___/
#  MIT License
#

import argparse
from pathlib import Path
from typing import List, Optional, Tuple

from rich.table import Table

from .network import ExtractedParams, Topology, table_columns
from ..core.config import get_config
from ..core.errors import ToolkitError
from ..core.logs import console
from ..core.output import config_hash, write_csv
from ..experiments.main import report_error
from ..experiments.pipelines import capnet_columns, capnet_rows
from ..experiments.schema import CapnetSection, SchemaError, parse_toml, read_text
from ..service import svc_class
from ..version import __software__

PUBLISHED = [t.value for t in Topology if t is not Topology.CUSTOM]


def load_section(args: argparse.Namespace) -> Tuple[CapnetSection, str]:
    """Capacitance section from the file argument or from ``--table``, with a name for the output."""
    if args.table is not None:
        return CapnetSection(topology=args.table, table=True), args.table
    if args.network is None:
        raise SchemaError("give a capacitance file or --table")
    path = Path(args.network)
    return parse_toml(read_text(path), CapnetSection, path.name), path.stem


def params_table(topology: Topology, rows: List[Tuple[int, ExtractedParams]]) -> Table:
    table = Table(title=f"{topology.value}: E_C in GHz, J in MHz")
    table.add_column("id", justify="right")
    for name, _ in table_columns(topology):
        table.add_column(name, justify="right")
    for k, params in rows:
        table.add_row(str(k), *(f"{value:.4f}" for value in params.table_row()))
    return table


class capnet_services(svc_class):
    default_config = {}

    params_link = {}

    @staticmethod
    def subparser() -> Tuple[str, str, str]:
        return ("capnet", "Charging energies and couplings of a capacitance network",
                """
                The file holds top level topology/gauge keys and one [network] table or several
                [[network]] tables of capacitances in fF (C_f1, C_f2, C_c, C_T or C_t1/C_t2).

                example: ftfgates capnet --table chain-grounded
                """)

    @staticmethod
    def params(parser: argparse.ArgumentParser) -> None:
        parser.add_argument("network", nargs="?", help="Capacitance file (TOML)")
        parser.add_argument("--table", choices=PUBLISHED, help="Regenerate a published parameter table")

    @staticmethod
    def test_name(name: str) -> bool:
        return name == __software__ + "-capnet"

    @staticmethod
    def cmd_name(name: Optional[str]) -> bool:
        return name == "capnet"

    def run(self) -> int:
        config = get_config()
        args = config.args
        try:
            section, name = load_section(args)
            rows = capnet_rows(section, int(config["application.jobs"]))
            out = getattr(args, "out", None)
            if isinstance(out, list):
                out = out[0]
            directory = Path(out) if out else Path(config["application.output"]) / name
            header = {"experiment": name, "config_hash": config_hash(section.model_dump(mode="json"))}
            path = directory / "capnet.csv"
            write_csv(path, capnet_columns(section.topology), [[k, *p.table_row()] for k, p in rows], header,
                      int_columns=["id"])
        except ToolkitError as err:
            return report_error(err)
        console.print(params_table(section.topology, rows))
        console.print(f"written {path}")
        return 0
