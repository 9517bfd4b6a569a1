#  Copyright (c) 2025.  ftfgates
#     _____  __    _____
#    / __/ |/ /__ / __/__ ____ _/ /____ ___
#   / _//    / -_) _// _ `/ _ `/ __/ -_|_-<
#  /_/ /_/|_/\__/_/  \_, /\_,_/\__/\__/___/
#                   /___/
#  MIT License
#

import argparse
from typing import Any, Dict, List, Optional, Sequence, Tuple


class svc_class:
    """A sub-command plugin: its parser, its settings defaults and its run entry point."""

    params_link: Dict[str, List[Optional[str]]] = {}

    default_config: Dict[str, Any] = {}

    @staticmethod
    def subparser() -> Optional[Tuple[str, str, str]]:
        return None

    @staticmethod
    def test_name(name: str) -> bool:
        return False

    @staticmethod
    def cmd_name(name: Optional[str]) -> bool:
        return False

    @staticmethod
    def params(parser: argparse.ArgumentParser) -> None:
        pass

    def run(self) -> int:
        return 0

    def update_params_link(self, params_link: Dict[str, List[Optional[str]]]) -> Dict[str, List[Optional[str]]]:
        updt_link = params_link.copy()
        updt_link.update(self.params_link)
        return updt_link

    @staticmethod
    def _merge(dict1: Dict[str, Any], dict2: Dict[str, Any]) -> Dict[str, Any]:
        """Recursive merge of two nested dictionaries, `dict2` wins on conflicts."""
        result = dict1.copy()
        for key, value in dict2.items():
            if key in result and isinstance(result[key], dict) and isinstance(value, dict):
                result[key] = svc_class._merge(result[key], value)
            else:
                result[key] = value
        return result

    def update_default_config(self, default_config: Dict[str, Any]) -> Dict[str, Any]:
        return self._merge(default_config, self.default_config)


class svc_store:
    def __init__(self, svc_list: Optional[Sequence[svc_class]] = None) -> None:
        self.svcs = list(svc_list) if svc_list is not None else []

    def add_svc(self, svc: svc_class) -> None:
        self.svcs.append(svc)

    def selected_app(self, app_name: str) -> Optional[svc_class]:
        # a program installed as e.g. "ftfgates-capnet" runs that service directly
        selected_svc = None
        for app in self.svcs:
            if app.test_name(app_name):
                selected_svc = app
        return selected_svc

    def service_for(self, mode: Optional[str]) -> Optional[svc_class]:
        for service in self.svcs:
            if service.cmd_name(mode):
                return service
        return None

    def update_params_link(self, params_link: Dict[str, List[Optional[str]]]) -> Dict[str, List[Optional[str]]]:
        for svc in self.svcs:
            params_link = svc.update_params_link(params_link)
        return params_link

    def update_default_config(self, default_config: Dict[str, Any]) -> Dict[str, Any]:
        for svc in self.svcs:
            default_config = svc.update_default_config(default_config)
        return default_config
