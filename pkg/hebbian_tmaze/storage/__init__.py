from __future__ import annotations

import csv
import hashlib
import json
import logging
import sys
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from pydantic import ValidationError
from pydantic_core import to_jsonable_python

from hebbian_tmaze.constants import CSV_FLOAT_FORMAT, MISSING_VALUE
from hebbian_tmaze.models import MazeSpec, SimulationSettings
from hebbian_tmaze.network import Genotype

LOGGER = logging.getLogger(__name__)

SIMULATION_SECTION = "simulation"


class StorageError(RuntimeError):
    """Raised when a genome, world, log or checkpoint file is missing or malformed."""


def content_hash(path: str | Path) -> str:
    """Git-style blob hash of a file's bytes."""

    data = Path(path).read_bytes()
    return hashlib.sha1(b"blob %d\0" % len(data) + data).hexdigest()


def format_value(value: object) -> str:
    if value is None:
        return MISSING_VALUE
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return CSV_FLOAT_FORMAT.format(value)
    return str(value)


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence[object]]) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    with target.open("w", encoding="utf-8", newline="") as file_handle:
        writer = csv.writer(file_handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(value) for value in row])
    return target


def read_csv(path: str | Path) -> tuple[list[str], list[list[str]]]:
    source = Path(path)
    if not source.exists():
        raise StorageError(f"CSV file not found: {source}")
    with source.open("r", encoding="utf-8", newline="") as file_handle:
        rows = list(csv.reader(file_handle))
    if not rows:
        raise StorageError(f"CSV file is empty: {source}")
    return rows[0], rows[1:]


def read_csv_floats(path: str | Path) -> dict[str, list[float]]:
    """Read a numeric CSV into columns; ``NA`` becomes ``nan``."""

    header, rows = read_csv(path)
    columns: dict[str, list[float]] = {name: [] for name in header}
    for line_number, row in enumerate(rows, start=2):
        if len(row) != len(header):
            raise StorageError(f"{path}:{line_number} has {len(row)} fields, expected {len(header)}.")
        for name, raw in zip(header, row):
            try:
                columns[name].append(float("nan") if raw == MISSING_VALUE else float(raw))
            except ValueError as exc:
                raise StorageError(f"{path}:{line_number} column {name!r} is not numeric: {raw!r}") from exc
    return columns


def write_json(path: str | Path, payload: Mapping[str, Any] | Sequence[Any]) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    serialized = json.dumps(payload, default=to_jsonable_python, ensure_ascii=False, sort_keys=True, indent=2)
    target.write_text(serialized + "\n", encoding="utf-8")
    return target


def _load_mapping(path: Path) -> dict[str, Any]:
    if not path.exists():
        raise StorageError(f"File not found: {path}")
    try:
        if path.suffix.lower() == ".toml":
            with path.open("rb") as file_handle:
                data: Any = tomllib.load(file_handle)
        else:
            with path.open("r", encoding="utf-8") as file_handle:
                data = json.load(file_handle)
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as exc:
        raise StorageError(f"Cannot parse {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise StorageError(f"{path} must contain an object at the top level.")
    return data


def read_genome_file(path: str | Path) -> Genotype:
    source = Path(path)
    data = _load_mapping(source)
    try:
        return Genotype.model_validate(data)
    except ValidationError as exc:
        raise StorageError(f"Invalid genome file {source}: {exc}") from exc


def write_genome_file(path: str | Path, genotype: Genotype) -> Path:
    target = write_json(path, genotype.to_payload())
    LOGGER.info("Wrote genome to %s", target)
    return target


def read_world_file(path: str | Path) -> tuple[MazeSpec, SimulationSettings]:
    """Load a maze plus optional ``simulation`` overrides from JSON or TOML."""

    source = Path(path)
    data = _load_mapping(source)
    simulation = data.pop(SIMULATION_SECTION, {})
    try:
        return MazeSpec.model_validate(data), SimulationSettings.model_validate(simulation)
    except ValidationError as exc:
        raise StorageError(f"Invalid world file {source}: {exc}") from exc


def write_world_file(path: str | Path, maze: MazeSpec, settings: SimulationSettings | None = None) -> Path:
    payload = maze.model_dump(mode="json")
    if settings is not None:
        payload[SIMULATION_SECTION] = settings.model_dump(mode="json")
    return write_json(path, payload)


def write_checkpoint(path: str | Path, payload: Mapping[str, Any]) -> Path:
    target = Path(path)
    temporary = target.with_suffix(target.suffix + ".tmp")
    write_json(temporary, payload)
    temporary.replace(target)
    LOGGER.info("Checkpoint written to %s", target)
    return target


def read_checkpoint(path: str | Path) -> dict[str, Any]:
    data = _load_mapping(Path(path))
    missing = {"next_generation", "population", "fitness", "rng_state", "record"} - data.keys()
    if missing:
        raise StorageError(f"Checkpoint {path} is missing keys: {sorted(missing)}")
    return data


__all__ = [
    "StorageError",
    "content_hash",
    "format_value",
    "read_checkpoint",
    "read_csv",
    "read_csv_floats",
    "read_genome_file",
    "read_world_file",
    "write_checkpoint",
    "write_csv",
    "write_genome_file",
    "write_json",
    "write_world_file",
]
