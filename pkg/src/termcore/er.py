"""Generic Entity-Relationship schemas, extensional instances and cardinality checks."""

from __future__ import annotations

import copy
import re
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Mapping, Optional

MANY = None  # unbounded maximum, written "n"

ID_PATTERN = re.compile(r"[A-Za-z0-9_.\-]{1,256}")

# C0 controls other than tab/LF/CR, surrogates and non-characters cannot be
# carried by XML 1.0 or safely by the other exporters.
_FORBIDDEN_TEXT = re.compile("[\x00-\x08\x0b\x0c\x0e-\x1f\ud800-\udfff￾￿]")


class ERError(Exception):
    """Base class for rejected schema or instance operations."""

    kind = "error"


class SchemaError(ERError):
    kind = "ill-formed-schema"


class UnknownTypeError(ERError):
    kind = "unknown-type"


class UnknownAssociationError(ERError):
    kind = "unknown-association"


class DuplicateIdError(ERError):
    kind = "duplicate-id"


class AttributeValueError(ERError):
    """Missing, undeclared or out-of-domain attribute value, or a malformed id."""

    kind = "bad-attribute"


class DanglingReferenceError(ERError):
    kind = "dangling-ref"


class DuplicateLinkError(ERError):
    kind = "duplicate-link"


class NotFoundError(ERError):
    kind = "not-found"


class EntityStillLinkedError(ERError):
    kind = "entity-still-linked"


class AttrKind(str, Enum):
    IDENTIFIER = "identifier"
    REQUIRED = "required"
    OPTIONAL = "optional"


@dataclass(frozen=True)
class Cardinality:
    min: int
    max: Optional[int] = MANY

    @property
    def bounded(self) -> bool:
        return self.max is not None

    def __str__(self) -> str:
        return f"({self.min},{'n' if self.max is None else self.max})"


@dataclass(frozen=True)
class AttributeDef:
    """One attribute of an entity type.

    ``domain`` is ``None`` for free text, otherwise the tuple of allowed values.
    ``pattern`` optionally narrows free text to values matching a regex.
    """

    name: str
    kind: AttrKind = AttrKind.REQUIRED
    domain: Optional[tuple[str, ...]] = None
    pattern: Optional[str] = None


@dataclass(frozen=True)
class EntityTypeDef:
    name: str
    attributes: tuple[AttributeDef, ...]

    @property
    def identifier(self) -> AttributeDef:
        return next(a for a in self.attributes if a.kind is AttrKind.IDENTIFIER)

    def attribute(self, name: str) -> Optional[AttributeDef]:
        for a in self.attributes:
            if a.name == name:
                return a
        return None


@dataclass(frozen=True)
class RoleDef:
    name: str
    entity_type: str
    cardinality: Cardinality


@dataclass(frozen=True)
class AssociationDef:
    name: str
    role1: RoleDef
    role2: RoleDef

    @property
    def roles(self) -> tuple[RoleDef, RoleDef]:
        return (self.role1, self.role2)


@dataclass(frozen=True)
class ERSchema:
    name: str
    version: str
    entity_types: tuple[EntityTypeDef, ...]
    associations: tuple[AssociationDef, ...]

    def entity_type(self, name: str) -> EntityTypeDef:
        for et in self.entity_types:
            if et.name == name:
                return et
        raise UnknownTypeError(f"unknown entity type {name!r}")

    def association(self, name: str) -> AssociationDef:
        for a in self.associations:
            if a.name == name:
                return a
        raise UnknownAssociationError(f"unknown association {name!r}")

    def roles_of(self, type_name: str) -> Iterator[tuple[AssociationDef, int, RoleDef]]:
        """Yield (association, role index, role) for every role played by ``type_name``."""
        for a in self.associations:
            for idx, role in enumerate(a.roles):
                if role.entity_type == type_name:
                    yield a, idx, role


def validate_schema(schema: ERSchema) -> list[str]:
    """Return one message per broken well-formedness rule; empty when the schema is sound."""
    errors: list[str] = []
    type_names = [et.name for et in schema.entity_types]
    for name, n in sorted(Counter(type_names).items()):
        if n > 1:
            errors.append(f"entity type {name!r} declared {n} times")
    for et in schema.entity_types:
        if not et.name:
            errors.append("entity type with empty name")
        attr_names = [a.name for a in et.attributes]
        for name, n in sorted(Counter(attr_names).items()):
            if n > 1:
                errors.append(f"entity type {et.name!r}: attribute {name!r} declared {n} times")
        n_ids = sum(a.kind is AttrKind.IDENTIFIER for a in et.attributes)
        if n_ids != 1:
            errors.append(f"entity type {et.name!r}: expected exactly one identifier, found {n_ids}")
        for a in et.attributes:
            if not a.name:
                errors.append(f"entity type {et.name!r}: attribute with empty name")
            if a.domain is not None:
                if not a.domain:
                    errors.append(f"entity type {et.name!r}: attribute {a.name!r} has an empty enumeration")
                elif len(set(a.domain)) != len(a.domain):
                    errors.append(f"entity type {et.name!r}: attribute {a.name!r} enumeration has duplicates")
            if a.pattern is not None:
                try:
                    re.compile(a.pattern)
                except re.error as exc:
                    errors.append(f"entity type {et.name!r}: attribute {a.name!r} has a bad pattern ({exc})")

    assoc_names = [a.name for a in schema.associations]
    for name, n in sorted(Counter(assoc_names).items()):
        if n > 1:
            errors.append(f"association {name!r} declared {n} times")
    known = set(type_names)
    for a in schema.associations:
        if not a.name:
            errors.append("association with empty name")
        if a.name in known:
            errors.append(f"association {a.name!r} collides with an entity type name")
        if a.role1.name == a.role2.name:
            errors.append(f"association {a.name!r}: both roles are named {a.role1.name!r}")
        for role in a.roles:
            if not role.name:
                errors.append(f"association {a.name!r}: role with empty name")
            if role.entity_type not in known:
                errors.append(
                    f"association {a.name!r}: role {role.name!r} targets unknown entity type {role.entity_type!r}"
                )
            c = role.cardinality
            if c.min < 0:
                errors.append(f"association {a.name!r}: role {role.name!r} has negative minimum {c.min}")
            if c.max is not None:
                if c.max < 1:
                    errors.append(f"association {a.name!r}: role {role.name!r} has maximum {c.max} (must be >= 1)")
                elif c.min > c.max:
                    errors.append(f"association {a.name!r}: role {role.name!r} has min {c.min} > max {c.max}")
    return errors


def nfc(text: str) -> str:
    return unicodedata.normalize("NFC", text)


@dataclass(frozen=True)
class EntityInstance:
    type_name: str
    id: str
    attrs: Mapping[str, str] = field(default_factory=dict)

    @property
    def key(self) -> tuple[str, str]:
        return (self.type_name, self.id)


@dataclass(frozen=True, order=True)
class Link:
    """A pair bound to an association; ``id1`` plays role1 and ``id2`` role2."""

    association: str
    id1: str
    id2: str


VIOLATION_KINDS = ("below-min", "above-max", "dangling-ref", "duplicate-id", "bad-attribute", "conditional")


@dataclass(frozen=True)
class Violation:
    kind: str
    type_name: str
    id: str
    association: Optional[str] = None
    role: Optional[str] = None
    observed: Optional[int] = None
    bound: Optional[int] = None
    message: str = ""

    def sort_key(self) -> tuple:
        return (self.type_name, self.id, self.association or "", self.role or "", self.kind, self.message)

    def __str__(self) -> str:
        where = f"{self.type_name} {self.id}"
        if self.association:
            where += f" {self.association}"
            if self.role:
                where += f"/{self.role}"
        return f"{self.kind}: {where}: {self.message}"


@dataclass
class ViolationReport:
    violations: list[Violation] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.violations = sorted(self.violations, key=Violation.sort_key)

    def __len__(self) -> int:
        return len(self.violations)

    def __iter__(self) -> Iterator[Violation]:
        return iter(self.violations)

    def __bool__(self) -> bool:
        return bool(self.violations)

    def of_kind(self, *kinds: str) -> list[Violation]:
        return [v for v in self.violations if v.kind in kinds]

    def render(self) -> str:
        return "".join(f"{v}\n" for v in self.violations)


def _attr_problems(et: EntityTypeDef, ent_id: str, attrs: Mapping[str, str]) -> list[str]:
    problems = []
    if not ID_PATTERN.fullmatch(ent_id):
        problems.append(f"identifier {ent_id!r} must be 1-256 characters from [A-Za-z0-9_.-]")
    for name, value in attrs.items():
        adef = et.attribute(name)
        if adef is None or adef.kind is AttrKind.IDENTIFIER:
            problems.append(f"attribute {name!r} is not declared on {et.name}")
            continue
        if not isinstance(value, str):
            problems.append(f"attribute {name!r} must be text")
            continue
        if _FORBIDDEN_TEXT.search(value):
            problems.append(f"attribute {name!r} contains a forbidden control character")
        if adef.domain is not None and value not in adef.domain:
            allowed = ", ".join(adef.domain)
            problems.append(f"value {value!r} of {name!r} is outside the enumeration {{{allowed}}}")
        if adef.pattern is not None and not re.fullmatch(adef.pattern, value):
            problems.append(f"value {value!r} of {name!r} does not match {adef.pattern}")
    for adef in et.attributes:
        if adef.kind is AttrKind.REQUIRED and not attrs.get(adef.name):
            problems.append(f"required attribute {adef.name!r} is missing")
    return problems


class ERInstance:
    """Extensional population of an :class:`ERSchema`.

    Mutators work in place and are atomic: a rejected call leaves the instance
    untouched. Use :meth:`copy` to keep an earlier state around.
    """

    def __init__(self, schema: ERSchema):
        errors = validate_schema(schema)
        if errors:
            raise SchemaError("; ".join(errors))
        self.schema = schema
        self.entities: dict[tuple[str, str], EntityInstance] = {}
        self.links: set[Link] = set()

    def copy(self) -> "ERInstance":
        return copy.copy(self)

    def __copy__(self) -> "ERInstance":
        other = ERInstance.__new__(ERInstance)
        other.schema = self.schema
        other.entities = dict(self.entities)
        other.links = set(self.links)
        return other

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ERInstance):
            return NotImplemented
        return self.schema == other.schema and self.entities == other.entities and self.links == other.links

    def __repr__(self) -> str:
        return f"ERInstance({self.schema.name!r}, entities={len(self.entities)}, links={len(self.links)})"

    def has(self, type_name: str, ent_id: str) -> bool:
        return (type_name, ent_id) in self.entities

    def get(self, type_name: str, ent_id: str) -> EntityInstance:
        try:
            return self.entities[(type_name, ent_id)]
        except KeyError:
            raise NotFoundError(f"no {type_name} with id {ent_id!r}") from None

    def of_type(self, type_name: str) -> list[EntityInstance]:
        """Instances of ``type_name`` sorted by id."""
        return sorted((e for e in self.entities.values() if e.type_name == type_name), key=lambda e: e.id)

    def links_of(self, association: str) -> list[Link]:
        return sorted(link for link in self.links if link.association == association)

    def add_entity(self, type_name: str, ent_id: str, attrs: Optional[Mapping[str, str]] = None) -> EntityInstance:
        et = self.schema.entity_type(type_name)
        values = {}
        for name, value in (attrs or {}).items():
            if name == et.identifier.name:
                if value != ent_id:
                    raise AttributeValueError(f"identifier attribute {name!r}={value!r} disagrees with id {ent_id!r}")
                continue
            values[name] = nfc(value) if isinstance(value, str) else value
        problems = _attr_problems(et, ent_id, values)
        if problems:
            raise AttributeValueError(f"{type_name} {ent_id!r}: " + "; ".join(problems))
        if (type_name, ent_id) in self.entities:
            raise DuplicateIdError(f"{type_name} with id {ent_id!r} already exists")
        ent = EntityInstance(type_name, ent_id, dict(sorted(values.items())))
        self.entities[ent.key] = ent
        return ent

    def add_link(self, association: str, id1: str, id2: str) -> Link:
        # maxima are deliberately not enforced here; see check_cardinalities
        assoc = self.schema.association(association)
        for role, ent_id in zip(assoc.roles, (id1, id2)):
            if (role.entity_type, ent_id) not in self.entities:
                raise DanglingReferenceError(
                    f"{association}: no {role.entity_type} with id {ent_id!r} for role {role.name!r}"
                )
        link = Link(association, id1, id2)
        if link in self.links:
            raise DuplicateLinkError(f"{association}({id1}, {id2}) already present")
        self.links.add(link)
        return link

    def remove_link(self, association: str, id1: str, id2: str) -> None:
        self.schema.association(association)
        link = Link(association, id1, id2)
        if link not in self.links:
            raise NotFoundError(f"{association}({id1}, {id2}) not present")
        self.links.remove(link)

    def remove_entity(self, type_name: str, ent_id: str) -> None:
        self.get(type_name, ent_id)
        for link in sorted(self.links):
            assoc = self.schema.association(link.association)
            for role, other in zip(assoc.roles, (link.id1, link.id2)):
                if role.entity_type == type_name and other == ent_id:
                    raise EntityStillLinkedError(
                        f"{type_name} {ent_id!r} is still linked by {link.association}({link.id1}, {link.id2})"
                    )
        del self.entities[(type_name, ent_id)]

    def participation_count(self, type_name: str, ent_id: str, association: str, role_name: str) -> int:
        assoc = self.schema.association(association)
        idx = next((i for i, r in enumerate(assoc.roles) if r.name == role_name), None)
        if idx is None:
            raise NotFoundError(f"association {association!r} has no role {role_name!r}")
        if assoc.roles[idx].entity_type != type_name:
            raise UnknownTypeError(f"role {role_name!r} of {association} is played by {assoc.roles[idx].entity_type}")
        self.get(type_name, ent_id)
        pos = 1 + idx
        return sum(
            1 for link in self.links if link.association == association and getattr(link, f"id{pos}") == ent_id
        )

    def counts(self) -> dict[str, int]:
        """Population per entity type and association name, zeros included."""
        out = {et.name: 0 for et in self.schema.entity_types}
        out.update({a.name: 0 for a in self.schema.associations})
        for ent in self.entities.values():
            out[ent.type_name] += 1
        for link in self.links:
            out[link.association] += 1
        return out

    # Raw insertion for file ingestion: skips eager checks so that
    # check_cardinalities can report what a hand-edited file got wrong.
    def _put_entity(self, ent: EntityInstance) -> None:
        self.entities[ent.key] = ent

    def _put_link(self, link: Link) -> None:
        self.links.add(link)


def new_instance(schema: ERSchema) -> ERInstance:
    return ERInstance(schema)


def check_cardinalities(instance: ERInstance) -> ViolationReport:
    """Report every participation outside its role bounds, plus integrity faults."""
    schema = instance.schema
    found: list[Violation] = []

    tally: Counter = Counter()
    for link in instance.links:
        assoc = schema.association(link.association)
        for idx, (role, ent_id) in enumerate(zip(assoc.roles, (link.id1, link.id2))):
            if (role.entity_type, ent_id) not in instance.entities:
                found.append(
                    Violation(
                        "dangling-ref",
                        role.entity_type,
                        ent_id,
                        assoc.name,
                        role.name,
                        message=f"{assoc.name}({link.id1}, {link.id2}) references a missing {role.entity_type}",
                    )
                )
            else:
                tally[(role.entity_type, ent_id, assoc.name, idx)] += 1

    for ent in instance.entities.values():
        et = schema.entity_type(ent.type_name)
        for problem in _attr_problems(et, ent.id, ent.attrs):
            found.append(Violation("bad-attribute", ent.type_name, ent.id, message=problem))
        for assoc, idx, role in schema.roles_of(ent.type_name):
            n = tally[(ent.type_name, ent.id, assoc.name, idx)]
            card = role.cardinality
            if n < card.min:
                found.append(
                    Violation(
                        "below-min", ent.type_name, ent.id, assoc.name, role.name, n, card.min,
                        f"participates {n} time(s), minimum {card.min}",
                    )
                )
            if card.max is not None and n > card.max:
                found.append(
                    Violation(
                        "above-max", ent.type_name, ent.id, assoc.name, role.name, n, card.max,
                        f"participates {n} time(s), maximum {card.max}",
                    )
                )
    return ViolationReport(found)


def entity_refs(instance: ERInstance, link: Link) -> Iterable[tuple[str, str]]:
    assoc = instance.schema.association(link.association)
    return ((assoc.role1.entity_type, link.id1), (assoc.role2.entity_type, link.id2))
