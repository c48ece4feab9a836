"""Ingestion of delimited city-level data and the bundled province summary.

Microdata schema: header ``province,city,value`` (comma default, tab
accepted), UTF-8, decimal-point numerals.  Province fixture schema:
``province,ati_eur,population,n_cities`` with ATI in absolute EUR.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from .errors import EmptyInputError, IntegrityError, ParseError, SchemaError

__all__ = [
    "CityRecord",
    "GroupedDataset",
    "ProvinceSummaryRow",
    "parse_city_csv",
    "write_grouped_csv",
    "load_province_summary",
    "load_bundled_province_summary",
    "bundled_fixture_path",
    "EXPECTED_PROVINCE_ROWS",
]

EXPECTED_PROVINCE_ROWS = 110

_ROLES = ("province", "city", "value")


@dataclass(frozen=True)
class CityRecord:
    province_code: str
    city_name: str
    value: float

    def __post_init__(self):
        if not self.province_code:
            raise ValueError("province_code must be nonempty")
        if self.value < 0.0:
            raise ValueError(f"value must be nonnegative, got {self.value}")


@dataclass(frozen=True)
class GroupedDataset:
    """Province-keyed value lists, in file order within each group."""

    groups: dict[str, tuple[float, ...]]
    value_label: str

    @property
    def n_groups(self) -> int:
        return len(self.groups)

    @property
    def n_rows(self) -> int:
        return sum(len(v) for v in self.groups.values())


@dataclass(frozen=True)
class ProvinceSummaryRow:
    province_code: str
    ati_total: float
    n_inhab: int
    n_cities: int

    def __post_init__(self):
        if self.n_cities < 1:
            raise ValueError(f"n_cities must be >= 1, got {self.n_cities}")
        if self.n_inhab < 1:
            raise ValueError(f"n_inhab must be >= 1, got {self.n_inhab}")


def _detect_delimiter(header_line: str) -> str:
    if "," in header_line:
        return ","
    if "\t" in header_line:
        return "\t"
    return ","


def _read_rows(path) -> tuple[list[str], list[list[str]], str]:
    text = Path(path).read_text(encoding="utf-8")
    if not text.strip():
        raise EmptyInputError(f"{path}: file is empty")
    first_line = text.splitlines()[0]
    delim = _detect_delimiter(first_line)
    reader = csv.reader(text.splitlines(), delimiter=delim)
    rows = [row for row in reader if row and any(cell.strip() for cell in row)]
    header = [h.strip() for h in rows[0]]
    return header, rows[1:], delim


def parse_city_csv(path, column_map: Mapping[str, str] | None = None) -> GroupedDataset:
    """Group city-level values by province code.

    ``column_map`` maps file column names to the roles ``province``,
    ``city`` and ``value``; by default the roles double as column names.
    The ``city`` role is informative only and may be left unmapped, in
    which case city names are synthesized from the line number.
    """
    header, body, _ = _read_rows(path)
    if column_map is None:
        column_map = {role: role for role in _ROLES}
    role_to_name = {}
    for name, role in column_map.items():
        if role not in _ROLES:
            raise SchemaError(f"unknown column role {role!r} for column {name!r}")
        role_to_name[role] = name
    for role in ("province", "value"):
        if role not in role_to_name:
            raise SchemaError(f"column_map does not assign a column to role {role!r}")
    indices = {}
    for role, name in role_to_name.items():
        if name not in header:
            raise SchemaError(f"missing column {name!r} (role {role!r}) in header {header}")
        indices[role] = header.index(name)
    if not body:
        raise EmptyInputError(f"{path}: no data rows")

    groups: dict[str, list[float]] = {}
    needed = max(indices.values())
    city_idx = indices.get("city")
    for lineno, row in enumerate(body, start=2):
        if len(row) <= needed:
            raise ParseError(f"{path}: line {lineno}: expected {needed + 1} columns, got {len(row)}")
        province = row[indices["province"]].strip()
        raw = row[indices["value"]].strip()
        try:
            value = float(raw)
        except ValueError as exc:
            raise ParseError(f"{path}: line {lineno}: non-numeric value {raw!r}") from exc
        city = row[city_idx].strip() if city_idx is not None else f"row{lineno}"
        try:
            record = CityRecord(province, city, value)
        except ValueError as exc:
            raise ParseError(f"{path}: line {lineno}: {exc}") from exc
        groups.setdefault(record.province_code, []).append(record.value)
    return GroupedDataset(
        groups={k: tuple(v) for k, v in groups.items()},
        value_label=role_to_name["value"],
    )


def write_grouped_csv(dataset: GroupedDataset, path) -> None:
    """Serialize a grouped dataset back to the microdata schema.

    City names are synthesized (they are not retained in the dataset);
    parsing the output reproduces the dataset field by field.
    """
    lines = [f"province,city,{dataset.value_label}"]
    for key, values in dataset.groups.items():
        for i, v in enumerate(values, start=1):
            lines.append(f"{key},{key}_{i},{v!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_province_summary(path, strict: bool = False) -> list[ProvinceSummaryRow]:
    """Load a province summary file; ``strict`` enforces the 110-row count."""
    header, body, _ = _read_rows(path)
    expected = ["province", "ati_eur", "population", "n_cities"]
    for col in expected:
        if col not in header:
            raise SchemaError(f"missing column {col!r} in header {header}")
    idx = {col: header.index(col) for col in expected}
    rows = []
    for lineno, row in enumerate(body, start=2):
        try:
            rows.append(
                ProvinceSummaryRow(
                    province_code=row[idx["province"]].strip(),
                    ati_total=float(row[idx["ati_eur"]]),
                    n_inhab=int(row[idx["population"]]),
                    n_cities=int(row[idx["n_cities"]]),
                )
            )
        except (ValueError, IndexError) as exc:
            raise ParseError(f"{path}: line {lineno}: {exc}") from exc
    if strict and len(rows) != EXPECTED_PROVINCE_ROWS:
        raise IntegrityError(
            f"{path}: expected {EXPECTED_PROVINCE_ROWS} province rows, got {len(rows)}"
        )
    return rows


def bundled_fixture_path() -> Path:
    return Path(__file__).parent / "data" / "province_summary.csv"


def load_bundled_province_summary(strict: bool = True) -> list[ProvinceSummaryRow]:
    return load_province_summary(bundled_fixture_path(), strict=strict)
