"""Compile an ER schema to portable SQL DDL.

Mapping rules:

* every entity type becomes a table keyed by its identifier attribute;
* an association with exactly one ``max = 1`` role becomes a foreign-key
  column on that role's table, named after the opposite role, ``NOT NULL``
  when the role's minimum is 1 (both roles ``max = 1``: role1 hosts it);
* any other association becomes a junction table with a composite key.

Identifiers that hit :data:`RESERVED_WORDS` get a trailing underscore.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from .er import AttrKind, ERSchema, SchemaError, validate_schema

RESERVED_WORDS = frozenset(
    """
    add all alter and any as asc between by case cast check collate column commit constraint create cross
    current current_date current_time current_timestamp default delete desc distinct drop else end escape
    except exists foreign from full grant group having in index inner insert intersect into is join key
    left like limit natural not null of offset on or order outer primary references revoke right rollback
    select set table then to transaction union unique update user using values view when where with
    """.split()
)


@dataclass(frozen=True)
class ColumnDef:
    name: str
    sql_type: str = "TEXT"
    nullable: bool = True
    check_enum: Optional[tuple[str, ...]] = None
    references: Optional[tuple[str, str]] = None  # (table, column)


@dataclass
class TableDef:
    name: str
    columns: list[ColumnDef] = field(default_factory=list)
    primary_key: list[str] = field(default_factory=list)
    source: str = ""  # entity type or association this table realizes


@dataclass
class RelationalMapping:
    tables: list[TableDef] = field(default_factory=list)

    def table(self, name: str) -> TableDef:
        return next(t for t in self.tables if t.name == name)


def snake_case(name: str) -> str:
    s = re.sub(r"([A-Z]+)([A-Z][a-z])", r"\1_\2", name)
    s = re.sub(r"([a-z0-9])([A-Z])", r"\1_\2", s)
    s = re.sub(r"[^A-Za-z0-9]+", "_", s).strip("_").lower()
    if not re.fullmatch(r"[a-z_][a-z0-9_]*", s):
        raise SchemaError(f"cannot derive an SQL identifier from {name!r}")
    return s + "_" if s in RESERVED_WORDS else s


def map_schema(schema: ERSchema) -> RelationalMapping:
    errors = validate_schema(schema)
    if errors:
        raise SchemaError("; ".join(errors))

    entity_tables: dict[str, TableDef] = {}
    pk_of: dict[str, str] = {}
    fks: dict[str, list[ColumnDef]] = {}
    for et in schema.entity_types:
        ident = et.identifier
        pk = snake_case(ident.name)
        pk_of[et.name] = pk
        attrs = [
            ColumnDef(
                snake_case(a.name),
                nullable=a.kind is AttrKind.OPTIONAL,
                check_enum=tuple(sorted(a.domain)) if a.domain is not None else None,
            )
            for a in et.attributes
            if a.kind is not AttrKind.IDENTIFIER
        ]
        table = TableDef(snake_case(et.name), [ColumnDef(pk, nullable=False)], [pk], et.name)
        table.columns += sorted(attrs, key=lambda c: c.name)
        entity_tables[et.name] = table
        fks[et.name] = []

    junctions: list[TableDef] = []
    for assoc in schema.associations:
        single = [i for i, r in enumerate(assoc.roles) if r.cardinality.max == 1]
        if single:
            host = assoc.roles[single[0]]
            other = assoc.roles[1 - single[0]]
            fks[host.entity_type].append(
                ColumnDef(
                    snake_case(other.name),
                    nullable=host.cardinality.min < 1,
                    references=(entity_tables[other.entity_type].name, pk_of[other.entity_type]),
                )
            )
        else:
            cols = [
                ColumnDef(
                    snake_case(r.name),
                    nullable=False,
                    references=(entity_tables[r.entity_type].name, pk_of[r.entity_type]),
                )
                for r in assoc.roles
            ]
            junctions.append(TableDef(snake_case(assoc.name), cols, [c.name for c in cols], assoc.name))

    for type_name, cols in fks.items():
        entity_tables[type_name].columns += sorted(cols, key=lambda c: c.name)

    mapping = RelationalMapping(
        sorted(entity_tables.values(), key=lambda t: t.name) + sorted(junctions, key=lambda t: t.name)
    )
    names = [t.name for t in mapping.tables]
    if len(set(names)) != len(names):
        raise SchemaError(f"table names collide after snake_case: {names}")
    for t in mapping.tables:
        cols = [c.name for c in t.columns]
        if len(set(cols)) != len(cols):
            raise SchemaError(f"table {t.name!r}: column names collide: {cols}")
    return mapping


def _sql_string(value: str) -> str:
    return "'" + value.replace("'", "''") + "'"


def _column_sql(col: ColumnDef, sole_pk: bool) -> str:
    parts = [col.name, col.sql_type]
    if sole_pk:
        parts.append("PRIMARY KEY")
    if not col.nullable:
        parts.append("NOT NULL")
    if col.check_enum is not None:
        parts.append(f"CHECK ({col.name} IN ({', '.join(_sql_string(v) for v in col.check_enum)}))")
    if col.references is not None:
        parts.append(f"REFERENCES {col.references[0]}({col.references[1]})")
    return " ".join(parts)


def emit_ddl(mapping: RelationalMapping) -> str:
    statements = []
    for t in mapping.tables:
        sole = len(t.primary_key) == 1
        lines = [_column_sql(c, sole and c.name == t.primary_key[0]) for c in t.columns]
        if not sole:
            lines.append(f"PRIMARY KEY ({', '.join(t.primary_key)})")
        body = ",\n".join(f"  {line}" for line in lines)
        statements.append(f"CREATE TABLE {t.name} (\n{body}\n);\n")
    return "".join(statements)
