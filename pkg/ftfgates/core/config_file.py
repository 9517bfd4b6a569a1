#  Copyright (c) 2025.  ftfgates
#     _____  __    _____
#    / __/ |/ /__ / __/__ ____ _/ /____ ___
#   / _//    / -_) _// _ `/ _ `/ __/ -_|_-<
#  /_/ /_/|_/\__/_/  \_, /\_,_/\__/\__/___/
#                   /___/
#  MIT License
#

import json
from copy import deepcopy
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
import tomli_w

from .errors import ToolkitError
from .type_conv import to_type

ItemGetter = Callable[[List[str]], Any]


class ConfigException(ToolkitError):
    """A settings key is not declared by the defaults."""

    def __init__(self, sections: Optional[str | List[str]] = None, message: str = "Exception in configuration") -> None:
        self.sections = sections
        if sections is not None:
            text = "->".join(sections) if isinstance(sections, list) else str(sections)
            message = text + " is not defined in configuration"
        super().__init__(message, {"key": sections} if sections is not None else None)


class config_file:

    def __init__(self, default_config: Dict[str, Any], file_name: Optional[str | Path] = None) -> None:
        """
        Settings read from one TOML file and normalised against the defaults.

        The structure of `default_config` is the schema: sections and keys absent from it are
        dropped silently, values are converted to the type of their default. The ``internal``
        section is only honoured when the caller asks for it and is never written back.

        :param default_config: nested dictionary of default values.
        :param file_name: TOML file to read; a missing file gives an empty configuration.
        """
        self.default_config = default_config
        self.config: Dict[str, Any] = {}
        self.confFile = Path(file_name) if file_name is not None else None
        self.confDir = self.confFile.parent if self.confFile is not None else None

        readconfig: Dict[str, Any] = {}
        self.new = True
        if self.confFile is not None and self.confFile.is_file():
            with open(self.confFile, "rb") as f:
                readconfig = tomllib.load(f)
            self.new = False

        def get_elem(path: List[str]) -> Any:
            node: Any = readconfig
            for elem in path:
                if not isinstance(node, dict) or elem not in node:
                    return None
                node = node[elem]
            return node

        self.override(get_elem, with_internal=True)

    @staticmethod
    def level_treat(old_config: Optional[Dict[str, Any]], ref_config: Dict[str, Any], item_getter: ItemGetter,
                    options: List[str], with_internal: bool) -> Dict[str, Any]:
        """
        Rebuild one level of the configuration.

        Every key of `ref_config` is looked up with `item_getter`; a returned value replaces the
        previous one (converted to the default's type), ``None`` keeps the previous value.

        :param old_config: current values at this level.
        :param ref_config: defaults at this level.
        :param item_getter: returns the overriding value for a key path or ``None``.
        :param options: key path of this level.
        :param with_internal: also treat the ``internal`` section.
        :return: the new values at this level.
        """
        new_config: Dict[str, Any] = {}
        for section, settings in ref_config.items():
            if section == "internal" and not with_internal:
                if old_config is not None and section in old_config:
                    new_config[section] = old_config[section]
                continue
            previous = old_config.get(section) if old_config is not None else None
            if isinstance(settings, dict):
                results = config_file.level_treat(previous, settings, item_getter, options + [section], with_internal)
                if results:
                    new_config[section] = results
                continue
            value = item_getter(options + [section])
            if value is None:
                if previous is not None:
                    new_config[section] = previous
            else:
                try:
                    new_config[section] = to_type(settings, value)
                except (TypeError, ValueError) as exc:
                    raise ConfigException(message=f"{'.'.join(options + [section])}: {exc}") from exc
        return new_config

    def override(self, item_getter: ItemGetter, with_internal: bool = False) -> None:
        self.config = config_file.level_treat(self.config, self.default_config, item_getter, [], with_internal)

    def _walk(self, tree: Dict[str, Any], args: Sequence[str]) -> Any:
        ref: Any = self.default_config
        node: Any = tree
        treated = []
        for elem in args:
            treated.append(elem)
            if not isinstance(ref, dict) or elem not in ref:
                raise ConfigException(treated)
            ref = ref[elem]
            if node is not None:
                node = node.get(elem) if isinstance(node, dict) else None
        return node

    def get_default(self, *args: str) -> Any:
        return deepcopy(self._walk(self.default_config, args))

    def get_config(self, *args: str) -> Any:
        """Value stored for the key path, ``None`` when only the default exists."""
        if len(args) == 1 and isinstance(args[0], list):
            args = tuple(args[0])
        return self._walk(self.config, args)

    def get(self, *args: str) -> Any:
        ret = self.get_config(*args)
        if ret is None:
            return self.get_default(*args)
        return ret

    def set_modify(self, value: Any, *args: str) -> Any:
        default = self._walk(self.default_config, args)
        node = self.config
        for elem in args[:-1]:
            node = node.setdefault(elem, {})
        node[args[-1]] = to_type(default, value) if not isinstance(default, dict) else value
        return node[args[-1]]

    def has(self, *args: str) -> bool:
        return self._walk(self.config, args) is not None

    def delete(self, *args: str) -> bool:
        self._walk(self.default_config, args)
        node = self.config
        for elem in args[:-1]:
            node = node.get(elem)
            if not isinstance(node, dict):
                return False
        return node.pop(args[-1], None) is not None

    def filter_internal(self) -> "config_file":
        """Copy of this configuration without the ``internal`` sections."""

        def filter_internal_recur(value: Dict[str, Any]) -> Dict[str, Any]:
            new_config = {}
            for section, item in value.items():
                if section == "internal":
                    continue
                if isinstance(item, dict):
                    results = filter_internal_recur(item)
                    if results:
                        new_config[section] = results
                else:
                    new_config[section] = item
            return new_config

        newconf = config_file(self.default_config)
        newconf.confDir = self.confDir
        newconf.confFile = self.confFile
        newconf.config = filter_internal_recur(self.config)
        return newconf

    def write(self) -> None:
        if self.confFile is None:
            return
        self.confFile.parent.mkdir(parents=True, exist_ok=True)
        self.writeto(self.confFile)

    def writeto(self, filename: str | Path) -> None:
        with open(filename, "wb") as conf_fd:
            tomli_w.dump(self.config, conf_fd)

    def json(self, **kwargs: Any) -> str:
        return json.dumps(self.config, **kwargs)
