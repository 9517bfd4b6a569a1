#  Copyright (c) 2025.  ftfgates
#     _____  __    _____
#    / __/ |/ /__ / __/__ ____ _/ /____ ___
#   / _//    / -_) _// _ `/ _ `/ __/ -_|_-<
#  /_/ /_/|_/\__/_/  \_, /\_,_/\__/\__/___/
#                   /___/
#  MIT License
#

from pathlib import Path
from typing import Any, Dict, List

from pydantic import BaseModel, Field

from ..version import __software__, __version__

MANIFEST_NAME = "manifest.json"


class OutputFile(BaseModel):
    name: str
    rows: int


class RunManifest(BaseModel):
    """What a run produced; wall-clock time lives here and never in the CSV files."""

    tool: str = __software__
    version: str = __version__
    experiment: str
    kind: str
    config_hash: str
    seed: int
    outputs: List[OutputFile] = Field(default_factory=list)
    results: Dict[str, Any] = Field(default_factory=dict)
    wall_clock: float = 0.0

    def write(self, directory: Path | str) -> Path:
        path = Path(directory) / MANIFEST_NAME
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.model_dump_json(indent=2), encoding="utf-8")
        return path

    @classmethod
    def read(cls, directory: Path | str) -> "RunManifest":
        return cls.model_validate_json((Path(directory) / MANIFEST_NAME).read_text(encoding="utf-8"))
