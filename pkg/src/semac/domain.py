"""Domain definitions: fields, semantic value types, units.

A domain definition is a JSON document declaring the enum value types, the
fields with their kinds and compatible units, and (optionally) the asset
files (grammar, templates, lexicons, logs) that make up a completable
domain.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Optional

from .ir import FieldDescriptor


class DomainConfigError(Exception):
    pass


@dataclass
class DomainDefinition:
    id: str
    fields: dict[str, FieldDescriptor]
    value_types: dict[str, frozenset[str]]
    keyword_field: Optional[str] = None
    asset_paths: dict = dc_field(default_factory=dict)
    base_dir: Optional[Path] = None

    def __post_init__(self):
        self._value_owner: dict[str, Optional[str]] = {}
        for f in self.fields.values():
            if f.value_kind == "enum":
                for v in f.enum_domain:
                    if v in self._value_owner:
                        self._value_owner[v] = None  # ambiguous
                    else:
                        self._value_owner[v] = f.id
        self._value_type_of: dict[str, str] = {}
        for t, vals in self.value_types.items():
            for v in vals:
                self._value_type_of[v] = t

    def field(self, field_id: str) -> FieldDescriptor:
        try:
            return self.fields[field_id]
        except KeyError:
            raise DomainConfigError(f"unknown field: {field_id}") from None

    def has_field(self, field_id: str) -> bool:
        return field_id in self.fields

    def values_of_type(self, type_id: str) -> frozenset[str]:
        try:
            return self.value_types[type_id]
        except KeyError:
            raise DomainConfigError(f"unknown semantic type: {type_id}") from None

    def type_of_value(self, value_id: str) -> Optional[str]:
        return self._value_type_of.get(value_id)

    def field_of_value(self, value_id: str) -> Optional[str]:
        """The unique enum field owning ``value_id``; None when absent or shared."""
        return self._value_owner.get(value_id)

    def path(self, key: str):
        p = self.asset_paths.get(key)
        if p is None:
            return None
        return (self.base_dir / p) if self.base_dir else Path(p)


def load_domain_definition(path) -> DomainDefinition:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise DomainConfigError(f"{path}: invalid JSON: {e}") from e
    value_types = {t: frozenset(vals) for t, vals in doc.get("value_types", {}).items()}
    fields: dict[str, FieldDescriptor] = {}
    for spec in doc.get("fields", []):
        fid = spec["id"]
        kind = spec["kind"]
        if fid in fields:
            raise DomainConfigError(f"{path}: duplicate field id {fid}")
        enum_domain: frozenset[str] = frozenset()
        vtype = spec.get("value_type")
        if kind == "enum":
            if vtype is None or vtype not in value_types:
                raise DomainConfigError(f"{path}: enum field {fid} needs a declared value_type")
            enum_domain = value_types[vtype]
        try:
            fields[fid] = FieldDescriptor(
                id=fid,
                value_kind=kind,
                compatible_units=frozenset(spec.get("units", [])),
                enum_domain=enum_domain,
                value_type=vtype,
            )
        except ValueError as e:
            raise DomainConfigError(f"{path}: {e}") from None
    asset_keys = ("grammar", "templates", "lexicons", "log", "phrases")
    assets = {k: doc[k] for k in asset_keys if k in doc}
    return DomainDefinition(
        id=doc["id"],
        fields=fields,
        value_types=value_types,
        keyword_field=doc.get("keyword_field"),
        asset_paths=assets,
        base_dir=path.parent,
    )
