"""The unified terminology schema, its builders, extra invariants and approach views."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Optional

from .er import (
    MANY,
    AssociationDef,
    AttrKind,
    AttributeDef,
    Cardinality,
    DanglingReferenceError,
    ERError,
    ERInstance,
    ERSchema,
    EntityTypeDef,
    RoleDef,
    Violation,
    ViolationReport,
    check_cardinalities,
    nfc,
)

SCHEMA_NAME = "unified-terminology"
SCHEMA_VERSION = "1"

VARIETIES = ("type", "essential", "non-essential", "delimiting")
LANGUAGE_PATTERN = r"[A-Za-z0-9-]+"

# (association, role1 name, role1 type, role1 card, role2 name, role2 type, role2 card)
_ASSOCIATIONS = [
    ("Denoted", "denoting-concept", "Concept", (1, MANY), "denoted-term", "Term", (1, 1)),
    ("Hierarchical", "superordinate", "Concept", (0, MANY), "subordinate", "Concept", (0, 1)),
    ("Generic", "generic-source", "Concept", (0, MANY), "generic-target", "Concept", (0, MANY)),
    ("Delineated", "delineated-concept", "Concept", (0, MANY), "delineating-characteristic", "Characteristic", (0, MANY)),
    ("Group", "grouping-type", "Characteristic", (0, MANY), "grouped-member", "Characteristic", (0, MANY)),
    ("OccursIn", "occurring-term", "Term", (0, MANY), "source-text", "TextSource", (0, MANY)),
    ("PartOfCollection", "member-text", "TextSource", (1, 1), "holding-collection", "Collection", (0, MANY)),
    ("ConnectedTo", "relation-source", "Concept", (0, MANY), "relation-target", "Concept", (0, MANY)),
    ("ConsistsOf", "relation-source", "Concept", (0, MANY), "relation-target", "Concept", (0, MANY)),
    ("IsA", "relation-source", "Concept", (0, MANY), "relation-target", "Concept", (0, MANY)),
    ("Evokes", "evoking-term", "Term", (0, MANY), "evoked-frame", "Frame", (0, MANY)),
    ("HasElement", "owning-frame", "Frame", (0, MANY), "element", "FrameElement", (1, 1)),
    ("FilledBy", "slot", "FrameElement", (0, MANY), "filler-term", "Term", (0, MANY)),
]


def _ident(name: str = "id") -> AttributeDef:
    return AttributeDef(name, AttrKind.IDENTIFIER)


@lru_cache(maxsize=None)
def terminology_schema() -> ERSchema:
    req, opt = AttrKind.REQUIRED, AttrKind.OPTIONAL
    entity_types = (
        EntityTypeDef("Concept", (_ident(),)),
        EntityTypeDef(
            "Term",
            (
                _ident(),
                AttributeDef("designation", req),
                AttributeDef("language", req, pattern=LANGUAGE_PATTERN),
                AttributeDef("definition", opt),
            ),
        ),
        EntityTypeDef("Characteristic", (_ident("name"), AttributeDef("variety", req, domain=VARIETIES))),
        EntityTypeDef("TextSource", (_ident(), AttributeDef("title", opt))),
        EntityTypeDef("Collection", (_ident(), AttributeDef("name", opt))),
        EntityTypeDef("Frame", (_ident(), AttributeDef("name", req))),
        EntityTypeDef("FrameElement", (_ident(), AttributeDef("name", req))),
    )
    associations = tuple(
        AssociationDef(name, RoleDef(r1, t1, Cardinality(*c1)), RoleDef(r2, t2, Cardinality(*c2)))
        for name, r1, t1, c1, r2, t2, c2 in _ASSOCIATIONS
    )
    return ERSchema(SCHEMA_NAME, SCHEMA_VERSION, entity_types, associations)


def new_termbase() -> ERInstance:
    return ERInstance(terminology_schema())


class WrongSchemaError(ERError):
    kind = "wrong-schema"


class TermAlreadyAssignedError(ERError):
    kind = "term-already-assigned"


class AlreadyHasSuperordinateError(ERError):
    kind = "already-has-superordinate"


class CycleError(ERError):
    kind = "cycle-detected"


class SelfLinkError(ERError):
    kind = "self-link"


class NotATypeCharacteristicError(ERError):
    kind = "not-a-type-characteristic"


def _require_termbase(instance: ERInstance) -> None:
    if instance.schema != terminology_schema():
        raise WrongSchemaError(f"instance uses schema {instance.schema.name!r}, not {SCHEMA_NAME!r}")


# -- builders ---------------------------------------------------------------


def add_concept(instance: ERInstance, concept_id: str) -> None:
    instance.add_entity("Concept", concept_id)


def add_term(
    instance: ERInstance, term_id: str, designation: str, language: str, definition: Optional[str] = None
) -> None:
    attrs = {"designation": designation, "language": language}
    if definition is not None:
        attrs["definition"] = definition
    instance.add_entity("Term", term_id, attrs)


def add_characteristic(instance: ERInstance, name: str, variety: str) -> None:
    instance.add_entity("Characteristic", name, {"variety": variety})


def _require(instance: ERInstance, type_name: str, ent_id: str) -> None:
    if not instance.has(type_name, ent_id):
        raise DanglingReferenceError(f"no {type_name} with id {ent_id!r}")


def concept_of(instance: ERInstance, term_id: str) -> Optional[str]:
    for link in instance.links:
        if link.association == "Denoted" and link.id2 == term_id:
            return link.id1
    return None


def superordinate_of(instance: ERInstance, concept_id: str) -> Optional[str]:
    for link in instance.links:
        if link.association == "Hierarchical" and link.id2 == concept_id:
            return link.id1
    return None


def denote(instance: ERInstance, concept_id: str, term_id: str) -> None:
    """Bind a term to its concept; a term may be bound only once."""
    _require(instance, "Concept", concept_id)
    _require(instance, "Term", term_id)
    current = concept_of(instance, term_id)
    if current is not None and current != concept_id:
        raise TermAlreadyAssignedError(f"term {term_id!r} already denotes concept {current!r}")
    instance.add_link("Denoted", concept_id, term_id)


def set_superordinate(instance: ERInstance, child_id: str, parent_id: str) -> None:
    _require(instance, "Concept", child_id)
    _require(instance, "Concept", parent_id)
    if child_id == parent_id:
        raise SelfLinkError(f"concept {child_id!r} cannot be its own superordinate")
    current = superordinate_of(instance, child_id)
    if current is not None:
        raise AlreadyHasSuperordinateError(f"concept {child_id!r} already has superordinate {current!r}")
    node: Optional[str] = parent_id
    while node is not None:
        if node == child_id:
            raise CycleError(f"making {parent_id!r} the superordinate of {child_id!r} would close a cycle")
        node = superordinate_of(instance, node)
    instance.add_link("Hierarchical", parent_id, child_id)


def add_generic(instance: ERInstance, source_id: str, target_id: str) -> None:
    instance.add_link("Generic", source_id, target_id)


def add_characteristic_to_concept(instance: ERInstance, concept_id: str, characteristic: str) -> None:
    instance.add_link("Delineated", concept_id, characteristic)


def group_characteristic(instance: ERInstance, type_characteristic: str, member: str) -> None:
    _require(instance, "Characteristic", type_characteristic)
    _require(instance, "Characteristic", member)
    variety = instance.get("Characteristic", type_characteristic).attrs["variety"]
    if variety != "type":
        raise NotATypeCharacteristicError(
            f"characteristic {type_characteristic!r} has variety {variety!r}; only 'type' characteristics group others"
        )
    if type_characteristic == member:
        raise SelfLinkError(f"characteristic {member!r} cannot group itself")
    instance.add_link("Group", type_characteristic, member)


# -- validation ---------------------------------------------------------------


def _strongly_connected(nodes: list[str], edges: dict[str, list[str]]) -> list[list[str]]:
    """Tarjan's algorithm, iterative."""
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    out: list[list[str]] = []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(edges.get(root, ())))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            node, it = work[-1]
            nxt = next(it, None)
            if nxt is not None:
                if nxt not in index:
                    index[nxt] = low[nxt] = counter
                    counter += 1
                    stack.append(nxt)
                    on_stack.add(nxt)
                    work.append((nxt, iter(edges.get(nxt, ()))))
                elif nxt in on_stack:
                    low[node] = min(low[node], index[nxt])
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == node:
                        break
                out.append(sorted(comp))
    return out


def validate_termbase(instance: ERInstance) -> ViolationReport:
    """Cardinality check plus the conditional rules ER minima cannot express."""
    _require_termbase(instance)
    found = list(check_cardinalities(instance))

    varieties = {e.id: e.attrs.get("variety") for e in instance.of_type("Characteristic")}
    grouped: dict[str, int] = {}
    for link in instance.links_of("Group"):
        if link.id1 in varieties and varieties[link.id1] != "type":
            found.append(
                Violation(
                    "conditional", "Characteristic", link.id1, "Group", "grouping-type",
                    message=f"variety {varieties[link.id1]!r} characteristic groups {link.id2!r}; only 'type' may group",
                )
            )
        if link.id1 == link.id2:
            found.append(
                Violation(
                    "conditional", "Characteristic", link.id1, "Group", "grouped-member",
                    message="characteristic groups itself",
                )
            )
        grouped[link.id1] = grouped.get(link.id1, 0) + 1
    for name, variety in varieties.items():
        if variety == "type" and not grouped.get(name):
            found.append(
                Violation(
                    "conditional", "Characteristic", name, "Group", "grouping-type", 0, 1,
                    "type characteristic groups no members",
                )
            )

    concepts = [e.id for e in instance.of_type("Concept")]
    known = set(concepts)
    children: dict[str, list[str]] = {}
    self_loops = set()
    for link in instance.links_of("Hierarchical"):
        if link.id1 in known and link.id2 in known:
            children.setdefault(link.id1, []).append(link.id2)
            if link.id1 == link.id2:
                self_loops.add(link.id1)
    for comp in _strongly_connected(concepts, children):
        if len(comp) > 1 or comp[0] in self_loops:
            found.append(
                Violation(
                    "conditional", "Concept", comp[0], "Hierarchical", None,
                    message="superordinate cycle through " + ", ".join(comp),
                )
            )
    return ViolationReport(found)


# -- queries -------------------------------------------------------------------

ANY = None


def homographs(instance: ERInstance, designation: str, language: Optional[str] = ANY) -> list[str]:
    """Ids of terms whose designation equals ``designation`` exactly (after NFC)."""
    wanted = nfc(designation)
    return [
        t.id
        for t in instance.of_type("Term")
        if t.attrs.get("designation") == wanted and (language is ANY or t.attrs.get("language") == language)
    ]


_DEFINITION_VARIETIES = ("delimiting", "essential", "non-essential")


def formal_definition(instance: ERInstance, concept_id: str) -> str:
    """Render a concept's characteristic-based definition in canonical form, e.g.

        Concept c1 := delimiting{has_wheels} essential{is_vehicle} non-essential{}

    Names inside a group are sorted and comma-separated; ``type`` characteristics
    are left out because they classify characteristics, not concepts.
    """
    instance.get("Concept", concept_id)
    by_variety: dict[str, list[str]] = {v: [] for v in _DEFINITION_VARIETIES}
    for link in instance.links_of("Delineated"):
        if link.id1 != concept_id or not instance.has("Characteristic", link.id2):
            continue
        variety = instance.get("Characteristic", link.id2).attrs.get("variety")
        if variety in by_variety:
            by_variety[variety].append(link.id2)
    groups = " ".join(f"{v}{{{','.join(sorted(by_variety[v]))}}}" for v in _DEFINITION_VARIETIES)
    return f"Concept {concept_id} := {groups}"


# -- views ---------------------------------------------------------------------


class Approach(str, Enum):
    ONOMASIOLOGICAL = "onomasiological"
    SEMASIOLOGICAL = "semasiological"
    ONTOTERMINOLOGICAL = "ontoterminological"
    FRAME_BASED = "frame-based"


_ONOMA_TYPES = frozenset({"Concept", "Term", "Characteristic"})
_ONOMA_ASSOCS = frozenset({"Denoted", "Hierarchical", "Generic", "Delineated", "Group"})

VIEW_INCLUSIONS: dict[Approach, tuple[frozenset, frozenset]] = {
    Approach.ONOMASIOLOGICAL: (_ONOMA_TYPES, _ONOMA_ASSOCS),
    Approach.SEMASIOLOGICAL: (
        _ONOMA_TYPES | {"TextSource", "Collection"},
        _ONOMA_ASSOCS | {"OccursIn", "PartOfCollection", "ConnectedTo", "ConsistsOf", "IsA"},
    ),
    Approach.ONTOTERMINOLOGICAL: (_ONOMA_TYPES, _ONOMA_ASSOCS),
    Approach.FRAME_BASED: (
        frozenset({"Concept", "Term", "Frame", "FrameElement"}),
        frozenset({"Denoted", "Evokes", "HasElement", "FilledBy"}),
    ),
}


@dataclass
class Projection:
    approach: Approach
    entity_types: frozenset
    associations: frozenset
    instance: ERInstance


def view(instance: ERInstance, approach: Approach | str) -> Projection:
    _require_termbase(instance)
    approach = Approach(approach)
    types, assocs = VIEW_INCLUSIONS[approach]
    schema = instance.schema
    projected = ERInstance(schema)
    for key, ent in instance.entities.items():
        if ent.type_name in types:
            projected._put_entity(ent)
    for link in instance.links:
        if link.association not in assocs:
            continue
        a = schema.association(link.association)
        if a.role1.entity_type in types and a.role2.entity_type in types:
            projected._put_link(link)
    return Projection(approach, types, assocs, projected)
