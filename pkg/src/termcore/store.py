"""Canonical JSON store file ("TermStore") for ER instances.

Equal instances serialize to identical bytes: keys sorted, two-space indent,
entities sorted by id, links sorted by (assoc, from, to), trailing newline.
"""

from __future__ import annotations

import json
from collections import Counter

from .er import ERError, ERInstance, ERSchema, EntityInstance, Link, Violation, nfc


class StoreError(ERError):
    """The store text is not a readable TermStore for the expected schema."""

    kind = "store"


class DuplicateIdInStore(StoreError):
    def __init__(self, violations: list[Violation]):
        self.violations = violations
        super().__init__("; ".join(v.message for v in violations))


def dumps(instance: ERInstance) -> str:
    entities: dict[str, list] = {}
    for ent in sorted(instance.entities.values(), key=lambda e: e.key):
        entities.setdefault(ent.type_name, []).append({"id": ent.id, "attrs": dict(ent.attrs)})
    doc = {
        "schemaName": instance.schema.name,
        "schemaVersion": instance.schema.version,
        "entities": entities,
        "links": [{"assoc": l.association, "from": l.id1, "to": l.id2} for l in sorted(instance.links)],
    }
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def parse(text: str, schema: ERSchema) -> tuple[ERInstance, list[Violation]]:
    """Load a store without eager validation.

    Returns the instance together with duplicate-id violations, which the
    keyed instance itself cannot hold. Structural problems (bad JSON, unknown
    schema, type or association names) raise :class:`StoreError`.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StoreError(f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise StoreError("top level must be an object")
    missing = {"schemaName", "schemaVersion", "entities", "links"} - doc.keys()
    if missing:
        raise StoreError(f"missing top-level field(s): {', '.join(sorted(missing))}")
    if (doc["schemaName"], doc["schemaVersion"]) != (schema.name, schema.version):
        raise StoreError(
            f"store is for schema {doc['schemaName']!r} v{doc['schemaVersion']}, expected {schema.name!r} v{schema.version}"
        )
    if not isinstance(doc["entities"], dict) or not isinstance(doc["links"], list):
        raise StoreError("'entities' must be an object and 'links' a list")

    inst = ERInstance(schema)
    seen: Counter = Counter()
    for type_name, rows in doc["entities"].items():
        try:
            schema.entity_type(type_name)
        except ERError as exc:
            raise StoreError(str(exc)) from None
        if not isinstance(rows, list):
            raise StoreError(f"entities[{type_name!r}] must be a list")
        for row in rows:
            if not isinstance(row, dict) or not isinstance(row.get("id"), str):
                raise StoreError(f"malformed {type_name} entry: {row!r}")
            attrs = row.get("attrs", {})
            if not isinstance(attrs, dict) or not all(isinstance(v, str) for v in attrs.values()):
                raise StoreError(f"{type_name} {row['id']!r}: attrs must map names to strings")
            ent = EntityInstance(type_name, row["id"], {k: nfc(v) for k, v in sorted(attrs.items())})
            seen[ent.key] += 1
            if seen[ent.key] == 1:
                inst._put_entity(ent)

    for row in doc["links"]:
        if not isinstance(row, dict) or not all(isinstance(row.get(k), str) for k in ("assoc", "from", "to")):
            raise StoreError(f"malformed link entry: {row!r}")
        try:
            inst.schema.association(row["assoc"])
        except ERError as exc:
            raise StoreError(str(exc)) from None
        inst._put_link(Link(row["assoc"], row["from"], row["to"]))

    dups = [
        Violation("duplicate-id", t, i, observed=n, bound=1, message=f"id {i!r} appears {n} times among {t}")
        for (t, i), n in sorted(seen.items())
        if n > 1
    ]
    return inst, dups


def loads(text: str, schema: ERSchema) -> ERInstance:
    inst, dups = parse(text, schema)
    if dups:
        raise DuplicateIdInStore(dups)
    return inst


def read(path, schema: ERSchema) -> ERInstance:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read(), schema)


def write(path, instance: ERInstance) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(instance))
