#  Copyright (c) 2025.  ftfgates
#     _____  __    _____
#    / __/ |/ /__ / __/__ ____ _/ /____ ___
#   / _//    / -_) _// _ `/ _ `/ __/ -_|_-<
#  /_/ /_/|_/\__/_/  \_, /\_,_/\__/\__/___/
#                   /___/
#  MIT License
#
import argparse
import sys
from os.path import basename
from typing import List, Optional

from .capnet.main import capnet_services
from .core.arg_params import arg_parser
from .core.config import create_config
from .core.logs import setup_logging
from .experiments.main import run_services, validate_services
from .service import svc_store
from .version import __description__, __software__, __version__

__SOFTWARE__ = __software__.upper()

# default configuration attribute stored in configuration file
# internal items are not stored but are used internally
default_config = {
    'application': {
        'verbose': False,
        'jobs': 1,
        'output': 'results',
        'seed': 20250101,
        'precision': 12,
    },
    'internal': {
        'development': False,
        'debug': False,
    },
}

# each long name option has to be defined into basic_options
params_link = {  # configuration attribute  [ long name option, Environment attribute , .env attribute]
    'internal.debug': ['debug_do_not_use', __SOFTWARE__ + '_DEBUG', 'DEBUG'],
    'internal.development': ['development_do_not_use', __SOFTWARE__ + '_DEVEL', 'DEVELOPMENT'],
    'application.verbose': ['verbose', __SOFTWARE__ + '_VERBOSE', 'VERBOSE'],
    'application.jobs': ['jobs[0]', __SOFTWARE__ + '_JOBS', 'JOBS'],
    'application.output': ['out[0]', __SOFTWARE__ + '_OUTPUT', 'OUTPUT'],
    'application.seed': ['seed[0]', __SOFTWARE__ + '_SEED', 'SEED'],
    'application.precision': [None, __SOFTWARE__ + '_PRECISION', 'PRECISION'],
}


def basic_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('-v', '--version', help='Print version and exit', action='store_true')
    parser.add_argument('-C', '--conf', help='Name of configuration file to read', nargs=1)
    parser.add_argument('-w', '--write', help='write local config to file ./ftfgates.toml', action='store_true')
    parser.add_argument('-W', '--write-conf', help='Name of configuration file to write', nargs=1)
    parser.add_argument('-V', '--verbose', help='Log progress messages', action='store_true')

    parser.add_argument('--jobs', help='parallel workers for sweeps', nargs=1, type=int)
    parser.add_argument('--out', help='output directory of the run', nargs=1)
    parser.add_argument('--seed', help='random seed of Monte-Carlo averages', nargs=1, type=int)

    parser.add_argument('--debug_do_not_use', help=argparse.SUPPRESS, action='store_true')
    parser.add_argument('--development_do_not_use', help=argparse.SUPPRESS, action='store_true')


def main(argv: Optional[List[str]] = None) -> int:
    """
    Entry point of the command line.

    Builds the service store, selects a single service when the program is installed under
    its name (``ftfgates-capnet`` ...), parses the arguments, layers the settings and runs
    the requested command.

    :param argv: command line, program path first; defaults to ``sys.argv``.
    :return: exit code of the command.
    """
    params = sys.argv if argv is None else argv
    apps_store = svc_store([run_services(), validate_services(), capnet_services()])
    app_name = basename(params[0])

    selected_app = apps_store.selected_app(app_name)
    params_link_app = apps_store.update_params_link(params_link)
    default_config_app = apps_store.update_default_config(default_config)

    if selected_app is None:
        services_list = apps_store.svcs
        generic = True
    else:
        services_list = [selected_app]
        generic = False

    parser = arg_parser(
        __software__,
        __version__,
        __description__,
        basic_options,
        {
            'title': 'Commands',
            'description': 'Select a command',
            'help': 'get help with --help',
            'dest': 'mode'
        },
        services_list,
        generic
    )

    args = parser.parse_args(params)
    if not generic:
        entry = selected_app.subparser()
        args.mode = entry[0] if entry else None

    config = create_config(args.conf, args, params_link_app, default_config_app, args.development_do_not_use)
    setup_logging(bool(config['application.verbose']), bool(config['internal.debug']))

    if args.version:
        parser.print_version()
        return 0

    if args.write:
        config.writeto("./ftfgates.toml", False)
        print("Configuration file is written to ./ftfgates.toml. Exiting.")
        return 0
    if args.write_conf is not None:
        config.writeto(args.write_conf[0], False)
        print("Configuration file is written to %s. Exiting." % args.write_conf[0])
        return 0

    run_app = apps_store.service_for(args.mode)
    if run_app is None:
        print(f"Error: Unknown command '{args.mode}'", file=sys.stderr)
        parser.print_help()
        return 1

    return run_app.run()


if __name__ == "__main__":
    sys.exit(main())
