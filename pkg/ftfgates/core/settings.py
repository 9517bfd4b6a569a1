#  Copyright (c) 2025.  ftfgates
#     _____  __    _____
#    / __/ |/ /__ / __/__ ____ _/ /____ ___
#   / _//    / -_) _// _ `/ _ `/ __/ -_|_-<
#  /_/ /_/|_/\__/_/  \_, /\_,_/\__/\__/___/
#                   /___/
#  MIT License
#

import json
import os
import re
from copy import deepcopy
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional

import dotenv

from .config_file import config_file
from ..version import __software__

settings = None


class EnumSettings(Enum):
    Debug = 0
    System = 2
    User = 3


class AppDirectories:
    def __init__(self, env: EnumSettings, base: Optional[Path] = None) -> None:
        """
        Locations of the settings files.

        :param env: execution environment; ``Debug`` reads settings next to the source tree.
        :param base: root replacing the home directory (tests).
        """
        home = Path(base) if base is not None else Path.home()
        self.SYSCONF_DIR = Path("/etc") / __software__
        self.PROJECT_DIR = Path(__file__).resolve().parents[2]
        if env == EnumSettings.Debug:
            self.CONF_DIR = self.PROJECT_DIR / "dev" / "conf"
        else:
            xdg = os.environ.get("XDG_CONFIG_HOME")
            root = Path(xdg) if xdg and base is None else home / ".config"
            self.CONF_DIR = root / __software__

    def json(self, **kwargs: Any) -> str:
        return json.dumps({key: str(value) for key, value in vars(self).items()}, **kwargs)


class AppSettings:
    def __init__(self, type: EnumSettings, conf_file: Optional[str | Path], args: Any, default_config: Dict[str, Any],
                 params_link: Dict[str, List[Optional[str]]], directories: Optional[AppDirectories] = None) -> None:
        """
        Application settings merged from every source.

        Precedence, lowest first: defaults, environment variables, ``.env`` entries (development
        only), the system TOML file, the user TOML file (or `conf_file`), command-line options.

        :param type: execution environment.
        :param conf_file: explicit settings file replacing the system and user files.
        :param args: parsed command line.
        :param default_config: nested defaults, also the settings schema.
        :param params_link: ``{'section.key': [cli option, ENV NAME, .env NAME]}``.
        :param directories: settings locations, derived from `type` when omitted.
        """
        self.default_config = default_config
        self.params_link = params_link
        self.path = directories if directories is not None else AppDirectories(type)
        self.args = args

        dotenv_values: Dict[str, str] = {}
        if type == EnumSettings.Debug:
            dotenv_values = {key: value for key, value in dotenv.dotenv_values(self.path.PROJECT_DIR / ".env").items()
                             if value is not None}

        if conf_file is not None:
            self.etc_conf = config_file(default_config, conf_file)
            self.local_conf = None
        else:
            self.etc_conf = config_file(default_config, self.path.SYSCONF_DIR / "config.toml")
            self.local_conf = config_file(default_config, self.path.CONF_DIR / "config.toml")
        self.env_list = os.environ.copy()
        self.dotenv_list = dotenv_values

        self.config_calc()
        source = self.local_conf if self.local_conf is not None else self.etc_conf
        self.config.confDir = source.confDir
        self.config.confFile = source.confFile

    def __getitem__(self, key: str) -> Any:
        return self.config.get(*key.split('.'))

    def __setitem__(self, key: str, value: Any) -> Any:
        return self.config.set_modify(value, *key.split('.'))

    def __delitem__(self, key: str) -> bool:
        return self.config.delete(*key.split('.'))

    def __contains__(self, key: str) -> bool:
        return self.config.has(*key.split('.'))

    def json(self, indent: int = 4, internal: bool = False) -> str:
        conf = deepcopy(self.config)
        if not internal:
            conf = conf.filter_internal()
        return json.dumps(conf.config, indent=indent)

    def _link(self, options: List[str], position: int) -> Optional[str]:
        link = self.params_link.get('.'.join(options))
        if link is None or link[position] is None:
            return None
        return link[position]

    def config_calc(self) -> None:
        """Merge every settings source into `self.config`."""
        params = config_file(self.default_config)

        def get_environ(options: List[str]) -> Optional[str]:
            name = self._link(options, 1)
            return self.env_list.get(name.upper()) if name is not None else None

        params.override(get_environ, True)

        def get_dotenv(options: List[str]) -> Optional[str]:
            name = self._link(options, 2)
            return self.dotenv_list.get(name.upper()) if name is not None else None

        params.override(get_dotenv, True)
        params.override(self.etc_conf.get_config, True)
        if self.local_conf is not None:
            params.override(self.local_conf.get_config, True)

        def get_option(options: List[str]) -> Any:
            option = self._link(options, 0)
            if option is None:
                return None
            match = re.fullmatch(r"([^\[\]]+)(?:\[([0-9]+)\])?", option)
            if match is None or not hasattr(self.args, match.group(1)):
                return None
            arg = getattr(self.args, match.group(1))
            if match.group(2) is None:
                # store_true flags left unset do not override lower layers
                return arg if arg is not False else None
            if isinstance(arg, list):
                return arg[int(match.group(2))]
            return None

        params.override(get_option, True)
        self.config = params

    def writeto(self, filename: str | Path, with_internal: bool = False) -> None:
        data = self.config if with_internal else self.config.filter_internal()
        data.writeto(filename)

    def write(self, with_internal: bool = False) -> None:
        data = self.config if with_internal else self.config.filter_internal()
        data.write()

    def set(self) -> None:
        global settings
        settings = self
