"""Unified terminology data model: ER engine, terminology schema, and TBX / N-Triples / DDL exporters."""

from .er import (
    MANY,
    AssociationDef,
    AttrKind,
    AttributeDef,
    Cardinality,
    ERError,
    ERInstance,
    ERSchema,
    EntityTypeDef,
    Link,
    RoleDef,
    Violation,
    ViolationReport,
    check_cardinalities,
    new_instance,
    validate_schema,
)
from .terminology import (
    Approach,
    add_characteristic,
    add_characteristic_to_concept,
    add_concept,
    add_generic,
    add_term,
    denote,
    formal_definition,
    group_characteristic,
    homographs,
    new_termbase,
    set_superordinate,
    terminology_schema,
    validate_termbase,
    view,
)

__all__ = [
    "MANY",
    "Approach",
    "AssociationDef",
    "AttrKind",
    "AttributeDef",
    "Cardinality",
    "ERError",
    "ERInstance",
    "ERSchema",
    "EntityTypeDef",
    "Link",
    "RoleDef",
    "Violation",
    "ViolationReport",
    "add_characteristic",
    "add_characteristic_to_concept",
    "add_concept",
    "add_generic",
    "add_term",
    "check_cardinalities",
    "denote",
    "formal_definition",
    "group_characteristic",
    "homographs",
    "new_instance",
    "new_termbase",
    "set_superordinate",
    "terminology_schema",
    "validate_schema",
    "validate_termbase",
    "view",
]
