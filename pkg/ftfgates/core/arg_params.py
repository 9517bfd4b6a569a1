#  Copyright (c) 2025.  ftfgates
#     _____  __    _____
#    / __/ |/ /__ / __/__ ____ _/ /____ ___
#   / _//    / -_) _// _ `/ _ `/ __/ -_|_-<
#  /_/ /_/|_/\__/_/  \_, /\_,_/\__/\__/___/
#                   /___/
#  MIT License
#

import argparse
import textwrap
from typing import Callable, Dict, List, Optional, Sequence


class arg_parser:
    def __init__(self, program: str, version: str, description: str,
                 basic_options: Callable[[argparse.ArgumentParser], None],
                 instances_desc: Optional[Dict[str, str]] = None, instances: Optional[List] = None,
                 generic: bool = True) -> None:
        """
        Command-line parser assembled from the registered services.

        Each service contributes one sub-command: ``subparser()`` gives its name, help text and
        optional epilog, ``params(parser)`` adds its arguments.

        :param program: program name printed with the version.
        :param version: program version.
        :param description: top level help text.
        :param basic_options: adds the options shared by every sub-command.
        :param instances_desc: title/description/help/dest of the sub-command group.
        :param instances: registered services.
        :param generic: expose every service as a sub-command; otherwise the single service
            given in `instances` owns the top level parser.
        """
        self.version = version
        self.program = program
        self.parser = argparse.ArgumentParser(prog=program, description=description)
        basic_options(self.parser)

        desc = {'title': 'commands', 'description': 'Select a command', 'help': 'get help with --help', 'dest': 'mode'}
        desc.update(instances_desc or {})
        if not instances:
            return
        if not generic:
            instances[0].params(self.parser)
            return
        subparsers = self.parser.add_subparsers(title=desc['title'], description=desc['description'],
                                                help=desc['help'], dest=desc['dest'])
        for instance in instances:
            name = instance.subparser()
            if name is None:
                continue
            if len(name) > 2 and name[2] is not None:
                sub = subparsers.add_parser(name[0], help=name[1], formatter_class=argparse.RawDescriptionHelpFormatter,
                                            epilog=textwrap.dedent(name[2]))
            else:
                sub = subparsers.add_parser(name[0], help=name[1])
            instance.params(sub)

    def parse_args(self, args: Sequence[str]) -> argparse.Namespace:
        """Parse `args`, whose first element is the program path."""
        return self.parser.parse_args(list(args[1:]))

    def print_help(self) -> None:
        self.parser.print_help()

    def print_version(self) -> None:
        print(self.program + " version : " + self.version)
