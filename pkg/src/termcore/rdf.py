"""ER instance to N-Triples, one line per entity type, attribute value and link."""

from __future__ import annotations

import re
from dataclasses import dataclass
from urllib.parse import quote

from .er import DanglingReferenceError, ERError, ERInstance

RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"

_BASE = re.compile(r"[A-Za-z][A-Za-z0-9+.\-]*://[^/?#\s<>\"{}|\\^`]+(/[^?#\s<>\"{}|\\^`]*)?")


class IriError(ERError):
    kind = "invalid-base"


@dataclass(frozen=True)
class IriScheme:
    """Mints ``BASE/TYPE/ID`` for instances and ``BASE/schema#NAME`` for vocabulary."""

    base: str

    def __post_init__(self) -> None:
        if not _BASE.fullmatch(self.base) or self.base.endswith("/"):
            raise IriError(f"base IRI {self.base!r} must be absolute, without trailing slash, query or fragment")

    def instance(self, type_name: str, ent_id: str) -> str:
        return f"{self.base}/{_component(type_name)}/{_component(ent_id)}"

    def schema_term(self, name: str) -> str:
        return f"{self.base}/schema#{_component(name)}"


def _component(name: str) -> str:
    if not name:
        raise IriError("IRI name components must be non-empty")
    return quote(name, safe="")


def iri_for(scheme: IriScheme | str, kind: str, *names: str) -> str:
    if isinstance(scheme, str):
        scheme = IriScheme(scheme)
    if kind == "instance":
        return scheme.instance(*names)
    if kind == "schema-term":
        return scheme.schema_term(*names)
    raise ValueError(f"unknown IRI kind {kind!r}")


_ECHAR = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t", "\b": "\\b", "\f": "\\f"}


def literal(value: str) -> str:
    out = []
    for ch in value:
        if ch in _ECHAR:
            out.append(_ECHAR[ch])
        elif ord(ch) < 0x20 or ch == "\x7f":
            out.append(f"\\u{ord(ch):04X}")
        else:
            out.append(ch)
    return '"' + "".join(out) + '"'


def to_ntriples(instance: ERInstance, scheme: IriScheme | str) -> str:
    if isinstance(scheme, str):
        scheme = IriScheme(scheme)
    lines = []
    for ent in instance.entities.values():
        subject = scheme.instance(ent.type_name, ent.id)
        lines.append(f"<{subject}> <{RDF_TYPE}> <{scheme.schema_term(ent.type_name)}> .")
        for name, value in ent.attrs.items():
            lines.append(f"<{subject}> <{scheme.schema_term(f'{ent.type_name}.{name}')}> {literal(value)} .")
    for link in instance.links:
        assoc = instance.schema.association(link.association)
        ends = []
        for role, ent_id in zip(assoc.roles, (link.id1, link.id2)):
            if not instance.has(role.entity_type, ent_id):
                raise DanglingReferenceError(
                    f"{link.association}({link.id1}, {link.id2}) references a missing {role.entity_type} {ent_id!r}"
                )
            ends.append(scheme.instance(role.entity_type, ent_id))
        lines.append(f"<{ends[0]}> <{scheme.schema_term(link.association)}> <{ends[1]}> .")
    lines.sort()
    return "".join(line + "\n" for line in lines)
