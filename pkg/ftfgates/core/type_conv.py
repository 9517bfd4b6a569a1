#  Copyright (c) 2025.  ftfgates
#     _____  __    _____
#    / __/ |/ /__ / __/__ ____ _/ /____ ___
#   / _//    / -_) _// _ `/ _ `/ __/ -_|_-<
#  /_/ /_/|_/\__/_/  \_, /\_,_/\__/\__/___/
#                   /___/
#  MIT License
#

from typing import Any

TRUE_WORDS = ("on", "active", "yes", "y", "true", "t", "1")
FALSE_WORDS = ("off", "inactive", "no", "n", "false", "f", "0", "")


def to_type(ref_var: Any, value: Any) -> Any:
    """
    Convert `value` to the type of the reference (default) value `ref_var`.

    Settings arrive as strings from the environment and ``.env`` files, as TOML scalars from
    configuration files and as argparse values from the command line; the defaults dictionary
    fixes the type they are coerced to.

        >>> to_type(True, "yes")
        True
        >>> to_type(1, "4")
        4
        >>> to_type(0.5, 2)
        2.0

    :param ref_var: default value giving the target type.
    :param value: value to convert.
    :raises ValueError: the value cannot represent the reference type.
    :return: the converted value.
    """
    if value is None:
        return None
    if isinstance(ref_var, bool):
        if isinstance(value, bool):
            return value
        if isinstance(value, (int, float)):
            return value != 0
        text = str(value).strip().lower()
        if text in TRUE_WORDS:
            return True
        if text in FALSE_WORDS:
            return False
        raise ValueError(f"'{value}' is not a boolean")
    if isinstance(ref_var, int):
        if isinstance(value, float) and not value.is_integer():
            raise ValueError(f"'{value}' is not an integer")
        return int(value)
    if isinstance(ref_var, float):
        return float(value)
    if isinstance(ref_var, str):
        return str(value)
    if isinstance(ref_var, list):
        if isinstance(value, str):
            value = [item.strip() for item in value.split(",") if item.strip()]
        if len(ref_var) == 0:
            return list(value)
        return [to_type(ref_var[0], elem) for elem in value]
    return value
