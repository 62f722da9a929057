"""TBX (TermBase eXchange) subset dialect: deterministic writer, strict reader, loss accounting.

Only concepts, terms, term definitions, superordinate/generic relations and
characteristics have a place in the dialect. Three ``descrip`` types carry
what TBX-Basic lacks: ``superordinateConcept`` and ``genericRelation`` hold a
target concept id, ``characteristic`` holds ``VARIETY:NAME``.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from typing import Optional

from .er import ERError, ERInstance, ViolationReport
from .terminology import (
    VARIETIES,
    add_characteristic,
    add_characteristic_to_concept,
    add_concept,
    add_generic,
    add_term,
    denote,
    new_termbase,
    set_superordinate,
    validate_termbase,
)

TBX_NS = "urn:iso:std:iso:30042:ed-2"
XML_LANG = "{http://www.w3.org/XML/1998/namespace}lang"

LOST_ENTITY_TYPES = ("Collection", "Frame", "FrameElement", "TextSource")
LOST_ASSOCIATIONS = (
    "ConnectedTo", "ConsistsOf", "Evokes", "FilledBy", "Group", "HasElement", "IsA", "OccursIn", "PartOfCollection",
)

_REASONS = {
    "Characteristic": "delineates no concept; characteristics travel only inside concept entries",
    "Group": "characteristic grouping has no dialect element",
}


class TbxError(ERError):
    """Malformed or out-of-dialect TBX input."""

    kind = "tbx"


class TbxConflictError(TbxError):
    kind = "tbx-conflict"


class InvalidInstanceError(ERError):
    """The instance fails validation and cannot be exported."""

    kind = "invalid-instance"

    def __init__(self, report: ViolationReport):
        self.report = report
        super().__init__(f"{len(report)} violation(s):\n{report.render()}")


@dataclass(frozen=True)
class LossEntry:
    kind: str
    count: int
    reason: str


@dataclass
class LossReport:
    entries: list[LossEntry] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.entries = sorted((e for e in self.entries if e.count > 0), key=lambda e: e.kind)

    def __bool__(self) -> bool:
        return bool(self.entries)

    def as_dict(self) -> dict[str, int]:
        return {e.kind: e.count for e in self.entries}

    def render(self) -> str:
        return "".join(f"lost {e.count} {e.kind}: {e.reason}\n" for e in self.entries)


def loss_census(instance: ERInstance) -> LossReport:
    counts = instance.counts()
    entries = [LossEntry(t, counts[t], f"{t} entities have no dialect element") for t in LOST_ENTITY_TYPES]
    entries += [
        LossEntry(a, counts[a], _REASONS.get(a, f"{a} links have no dialect element")) for a in LOST_ASSOCIATIONS
    ]
    delineating = {link.id2 for link in instance.links_of("Delineated")}
    orphans = sum(1 for c in instance.of_type("Characteristic") if c.id not in delineating)
    entries.append(LossEntry("Characteristic", orphans, _REASONS["Characteristic"]))
    return LossReport(entries)


def _escape(text: str) -> str:
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")
        .replace("\r", "&#13;")
    )


def _escape_attr(text: str) -> str:
    return _escape(text).replace("\n", "&#10;").replace("\t", "&#9;")


def export_tbx(instance: ERInstance, title: str, force: bool = False) -> tuple[str, LossReport]:
    """Serialize ``instance`` to dialect XML.

    Raises :class:`InvalidInstanceError` when validation finds anything other
    than conditional violations, or conditional ones without ``force``.
    """
    report = validate_termbase(instance)
    blocking = [v for v in report if v.kind != "conditional" or not force]
    if blocking:
        raise InvalidInstanceError(ViolationReport(blocking))

    parent: dict[str, str] = {}
    generic: dict[str, list[str]] = {}
    chars: dict[str, list[tuple[str, str]]] = {}
    terms: dict[str, list] = {}
    for link in instance.links:
        if link.association == "Hierarchical":
            parent[link.id2] = link.id1
        elif link.association == "Generic":
            generic.setdefault(link.id1, []).append(link.id2)
        elif link.association == "Delineated":
            variety = instance.get("Characteristic", link.id2).attrs["variety"]
            chars.setdefault(link.id1, []).append((variety, link.id2))
        elif link.association == "Denoted":
            terms.setdefault(link.id1, []).append(instance.get("Term", link.id2))

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<tbx style="dca" type="TBX-Basic" xml:lang="en" xmlns="{TBX_NS}">',
        f"  <tbxHeader><fileDesc><titleStmt><title>{_escape(title)}</title></titleStmt></fileDesc></tbxHeader>",
        "  <text><body>",
    ]
    for concept in instance.of_type("Concept"):
        cid = concept.id
        out.append(f'    <conceptEntry id="{_escape_attr(cid)}">')
        if cid in parent:
            out.append(f'      <descrip type="superordinateConcept">{_escape(parent[cid])}</descrip>')
        for target in sorted(generic.get(cid, ())):
            out.append(f'      <descrip type="genericRelation">{_escape(target)}</descrip>')
        for variety, name in sorted(chars.get(cid, ())):
            out.append(f'      <descrip type="characteristic">{_escape(variety)}:{_escape(name)}</descrip>')
        by_lang: dict[str, list] = {}
        for term in terms.get(cid, ()):
            by_lang.setdefault(term.attrs["language"], []).append(term)
        for lang in sorted(by_lang):
            out.append(f'      <langSec xml:lang="{_escape_attr(lang)}">')
            for term in sorted(by_lang[lang], key=lambda t: t.id):
                out.append(f'        <termSec id="{_escape_attr(term.id)}">')
                out.append(f"          <term>{_escape(term.attrs['designation'])}</term>")
                if "definition" in term.attrs:
                    out.append(f'          <descrip type="definition">{_escape(term.attrs["definition"])}</descrip>')
                out.append("        </termSec>")
            out.append("      </langSec>")
        out.append("    </conceptEntry>")
    out += ["  </body></text>", "</tbx>"]
    return "\n".join(out) + "\n", loss_census(instance)


# -- reading -------------------------------------------------------------------


def _local(elem: ET.Element) -> str:
    tag = elem.tag
    if not isinstance(tag, str):
        raise TbxError("unexpected non-element node")
    if tag.startswith("{"):
        ns, _, name = tag[1:].partition("}")
        if ns != TBX_NS:
            raise TbxError(f"unknown element {tag!r}")
        return name
    return tag


def _children(elem: ET.Element) -> list[ET.Element]:
    if elem.text and elem.text.strip():
        raise TbxError(f"unexpected text inside <{_local(elem)}>: {elem.text.strip()!r}")
    kids = list(elem)
    for kid in kids:
        if kid.tail and kid.tail.strip():
            raise TbxError(f"unexpected text after <{_local(kid)}>: {kid.tail.strip()!r}")
    return kids


def _expect(elem: ET.Element, name: str) -> ET.Element:
    if _local(elem) != name:
        raise TbxError(f"expected <{name}>, found <{_local(elem)}>")
    return elem


def _only_child(elem: ET.Element, name: str) -> ET.Element:
    kids = _children(elem)
    if len(kids) != 1:
        raise TbxError(f"<{_local(elem)}> must contain exactly one <{name}>")
    return _expect(kids[0], name)


def _leaf_text(elem: ET.Element) -> str:
    if len(elem):
        raise TbxError(f"<{_local(elem)}> must not contain elements")
    return elem.text or ""


def _attr(elem: ET.Element, name: str) -> str:
    value = elem.get(name)
    if value is None:
        shown = "xml:lang" if name == XML_LANG else name
        raise TbxError(f"<{_local(elem)}> lacks the {shown} attribute")
    return value


@dataclass
class _Entry:
    concept_id: str
    superordinate: Optional[str] = None
    generic: list[str] = field(default_factory=list)
    characteristics: list[tuple[str, str]] = field(default_factory=list)
    terms: list[tuple[str, str, str, Optional[str]]] = field(default_factory=list)


_PHASES = {"superordinateConcept": 0, "genericRelation": 1, "characteristic": 2}


def _read_entry(elem: ET.Element) -> _Entry:
    entry = _Entry(_attr(elem, "id"))
    phase = 0
    for kid in _children(elem):
        name = _local(kid)
        if name == "descrip":
            dtype = _attr(kid, "type")
            if dtype not in _PHASES:
                raise TbxError(f"conceptEntry {entry.concept_id!r}: unknown descrip type {dtype!r}")
            if _PHASES[dtype] < phase or phase == 3:
                raise TbxError(f"conceptEntry {entry.concept_id!r}: descrip {dtype!r} out of order")
            phase = _PHASES[dtype]
            value = _leaf_text(kid)
            if dtype == "superordinateConcept":
                if entry.superordinate is not None:
                    raise TbxError(f"conceptEntry {entry.concept_id!r}: more than one superordinateConcept")
                entry.superordinate = value
                phase = 1
            elif dtype == "genericRelation":
                entry.generic.append(value)
            else:
                variety, sep, char_name = value.partition(":")
                if not sep or variety not in VARIETIES:
                    raise TbxError(
                        f"conceptEntry {entry.concept_id!r}: characteristic {value!r} is not VARIETY:NAME"
                    )
                entry.characteristics.append((variety, char_name))
        elif name == "langSec":
            phase = 3
            lang = _attr(kid, XML_LANG)
            sections = _children(kid)
            if not sections:
                raise TbxError(f"conceptEntry {entry.concept_id!r}: empty langSec {lang!r}")
            for sec in sections:
                _expect(sec, "termSec")
                entry.terms.append(_read_term(sec, lang))
        else:
            raise TbxError(f"unknown element <{name}> in conceptEntry {entry.concept_id!r}")
    if not entry.terms:
        raise TbxError(f"conceptEntry {entry.concept_id!r} has no langSec")
    return entry


def _read_term(sec: ET.Element, lang: str) -> tuple[str, str, str, Optional[str]]:
    term_id = _attr(sec, "id")
    kids = _children(sec)
    if not kids or _local(kids[0]) != "term":
        raise TbxError(f"termSec {term_id!r} lacks a <term> designation")
    designation = _leaf_text(kids[0])
    definition = None
    rest = kids[1:]
    if rest:
        d = _expect(rest[0], "descrip")
        if _attr(d, "type") != "definition":
            raise TbxError(f"termSec {term_id!r}: unknown descrip type {d.get('type')!r}")
        definition = _leaf_text(d)
    if len(rest) > 1:
        raise TbxError(f"termSec {term_id!r}: unexpected <{_local(rest[1])}>")
    return term_id, designation, lang, definition


def read_title(xml_text: str) -> str:
    root = _parse_root(xml_text)
    header = _expect(_children(root)[0], "tbxHeader")
    return _leaf_text(_only_child(_only_child(_only_child(header, "fileDesc"), "titleStmt"), "title"))


def _parse_root(xml_text: str) -> ET.Element:
    try:
        root = ET.fromstring(xml_text.encode("utf-8"))
    except ET.ParseError as exc:
        raise TbxError(f"malformed XML: {exc}") from None
    _expect(root, "tbx")
    kids = _children(root)
    if [_local(k) for k in kids] != ["tbxHeader", "text"]:
        raise TbxError("<tbx> must contain <tbxHeader> followed by <text>")
    return root


def import_tbx(xml_text: str) -> ERInstance:
    """Rebuild a terminology instance from dialect XML."""
    root = _parse_root(xml_text)
    header, text = _children(root)
    _only_child(_only_child(_only_child(header, "fileDesc"), "titleStmt"), "title")
    body = _only_child(text, "body")
    entries = [_read_entry(_expect(e, "conceptEntry")) for e in _children(body)]

    inst = new_termbase()
    seen_chars: dict[str, tuple[str, str]] = {}
    try:
        for entry in entries:
            if inst.has("Concept", entry.concept_id):
                raise TbxError(f"duplicate conceptEntry id {entry.concept_id!r}")
            add_concept(inst, entry.concept_id)
            for term_id, designation, lang, definition in entry.terms:
                if inst.has("Term", term_id):
                    raise TbxError(f"duplicate termSec id {term_id!r}")
                add_term(inst, term_id, designation, lang, definition)
            for variety, name in entry.characteristics:
                if name in seen_chars:
                    first_variety, first_entry = seen_chars[name]
                    if first_variety != variety:
                        raise TbxConflictError(
                            f"characteristic {name!r} is {first_variety!r} in conceptEntry {first_entry!r} "
                            f"but {variety!r} in conceptEntry {entry.concept_id!r}"
                        )
                    continue
                seen_chars[name] = (variety, entry.concept_id)
                add_characteristic(inst, name, variety)

        for entry in entries:
            for term_id, *_ in entry.terms:
                denote(inst, entry.concept_id, term_id)
            for variety, name in entry.characteristics:
                add_characteristic_to_concept(inst, entry.concept_id, name)
            for target in entry.generic:
                if not inst.has("Concept", target):
                    raise TbxError(f"conceptEntry {entry.concept_id!r}: genericRelation target {target!r} is absent")
                add_generic(inst, entry.concept_id, target)
        for entry in entries:
            if entry.superordinate is None:
                continue
            if not inst.has("Concept", entry.superordinate):
                raise TbxError(
                    f"conceptEntry {entry.concept_id!r}: superordinateConcept {entry.superordinate!r} is absent"
                )
            set_superordinate(inst, entry.concept_id, entry.superordinate)
    except TbxError:
        raise
    except ERError as exc:
        raise TbxError(str(exc)) from exc
    return inst
