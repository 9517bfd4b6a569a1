#  Copyright (c) 2025.  ftfgates
#     _____  __    _____
#    / __/ |/ /__ / __/__ ____ _/ /____ ___
#   / _//    / -_) _// _ `/ _ `/ __/ -_|_-<
#  /_/ /_/|_/\__/_/  \_, /\_,_/\__/\__/___/
#                   /___/
#  MIT License
#

import argparse
import os
from pathlib import Path
from typing import Any, Dict, List, Optional

from .settings import AppDirectories, AppSettings, EnumSettings

_config: Optional[AppSettings] = None


def has_system() -> bool:
    """True when running with system privileges (uid below 1000 on POSIX)."""
    if not hasattr(os, "geteuid"):
        return False
    return os.geteuid() < 1000


def create_config(conf_file: Optional[str | Path | List[str]], args: argparse.Namespace,
                  params_link: Dict[str, List[Optional[str]]], default_config: Dict[str, Any], devel: bool = False,
                  directories: Optional[AppDirectories] = None) -> AppSettings:
    """
    Build the application settings and register them as the current configuration.

    :param conf_file: explicit settings file (``-C``) or None.
    :param args: parsed command line.
    :param params_link: settings keys linked to options, environment and ``.env`` names.
    :param default_config: merged defaults of the application and its services.
    :param devel: development mode (reads ``.env`` and the in-tree settings directory).
    :param directories: settings locations override.
    :return: the AppSettings instance.
    """
    if devel:
        env = EnumSettings.Debug
    elif has_system():
        env = EnumSettings.System
    else:
        env = EnumSettings.User
    if isinstance(conf_file, list):
        conf_file = conf_file[0]

    global _config
    _config = AppSettings(env, conf_file, args, default_config, params_link, directories)
    return _config


def get_config() -> AppSettings:
    if _config is None:
        raise RuntimeError("settings are read by create_config first")
    return _config
