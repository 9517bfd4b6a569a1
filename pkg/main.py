#!/usr/bin/env python3
"""ftfgates - fluxonium-transmon-fluxonium CZ gate design from the command line."""

import sys

from ftfgates.__main__ import main as cli_main


def main():
    """Run the CLI application."""
    return cli_main()


if __name__ == "__main__":
    sys.exit(main())
