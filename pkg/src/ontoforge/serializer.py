"""Deterministic text renderers for ontologies.

Two formats come out of here. The Manchester-style text is the human-facing
one: one frame per declared entity in declaration order, fixed section order
inside each frame, eight-space entry indentation, and a trailing comma on
every entry except the last. The functional-style text is the interchange
format: one axiom per line in axiom order, designed to survive a parse and
re-render byte for byte.

Equal ontologies (same axioms in the same order, same prefixes) always render
to identical bytes; there is no hidden state.
"""

from __future__ import annotations

import re

from .errors import OntoforgeError
from .model import (
    And,
    AnnotationAssertion,
    Axiom,
    ClassExpression,
    Declaration,
    DisjointClasses,
    Entity,
    EquivalentClasses,
    FunctionalObjectProperty,
    Import,
    IRI,
    Kind,
    Named,
    Not,
    Nothing,
    Only,
    ObjectPropertyDomain,
    ObjectPropertyRange,
    Ontology,
    Or,
    OWL_NS,
    RDFS_NS,
    Some,
    SubClassOf,
    SubObjectPropertyOf,
    Thing,
    TransitiveObjectProperty,
)


class NoPrefix(OntoforgeError):
    """An IRI cannot be shortened with the registered prefixes."""


_LOCAL_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_.-]*$")

_BUILTIN_PREFIXES = {"owl": OWL_NS, "rdfs": RDFS_NS}


def prefix_map(ontology: Ontology) -> dict[str, str]:
    """Registered prefixes plus the always-available owl/rdfs pair."""
    merged = dict(_BUILTIN_PREFIXES)
    merged.update(ontology.prefixes)
    return merged


def shorten(iri: IRI, prefixes: dict[str, str]) -> str | None:
    """The CURIE under the longest matching prefix base, or None."""
    best: tuple[int, str] | None = None
    for label, base in prefixes.items():
        if iri.value.startswith(base):
            local = iri.value[len(base):]
            if _LOCAL_RE.match(local) and (best is None or len(base) > best[0]):
                best = (len(base), f"{label}:{local}")
    return best[1] if best else None


def _escape_literal(text: str) -> str:
    out = text.replace("\\", "\\\\").replace('"', '\\"')
    return out.replace("\n", "\\n").replace("\t", "\\t")


def _literal(value) -> str:
    body = f'"{_escape_literal(value.text)}"'
    if value.lang is not None:
        return f"{body}@{value.lang}"
    return body


# --- Manchester-style ------------------------------------------------------


def _omn_name(entity: Entity, prefixes: dict[str, str]) -> str:
    curie = shorten(entity.iri, prefixes)
    if curie is None:
        raise NoPrefix(f"no prefix covers <{entity.iri}>")
    return curie


def _omn_ce(ce: ClassExpression, prefixes: dict[str, str]) -> str:
    if isinstance(ce, Named):
        return _omn_name(ce.entity, prefixes)
    if isinstance(ce, Thing):
        return "owl:Thing"
    if isinstance(ce, Nothing):
        return "owl:Nothing"
    if isinstance(ce, And):
        return " and ".join(_omn_wrap(op, prefixes) for op in ce.operands)
    if isinstance(ce, Or):
        return " or ".join(_omn_wrap(op, prefixes) for op in ce.operands)
    if isinstance(ce, Not):
        return "not " + _omn_wrap(ce.operand, prefixes)
    if isinstance(ce, Some):
        return f"{_omn_name(ce.property, prefixes)} some {_omn_wrap(ce.filler, prefixes)}"
    if isinstance(ce, Only):
        return f"{_omn_name(ce.property, prefixes)} only {_omn_wrap(ce.filler, prefixes)}"
    raise TypeError(f"not a class expression: {ce!r}")


def _omn_wrap(ce: ClassExpression, prefixes: dict[str, str]) -> str:
    if isinstance(ce, (Named, Thing, Nothing)):
        return _omn_ce(ce, prefixes)
    return "(" + _omn_ce(ce, prefixes) + ")"


def _section(lines: list[str], keyword: str, entries: list[str]) -> None:
    if not entries:
        return
    lines.append(f"    {keyword}: ")
    for i, entry in enumerate(entries):
        comma = "," if i < len(entries) - 1 else ""
        lines.append(f"        {entry}{comma}")


class _FrameIndex:
    def __init__(self, ontology: Ontology, prefixes: dict[str, str]):
        self.prefixes = prefixes
        self.annotations: dict[IRI, list[AnnotationAssertion]] = {}
        self.superclasses: dict[IRI, list[ClassExpression]] = {}
        self.equivalents: dict[IRI, list[ClassExpression]] = {}
        self.disjoints: dict[IRI, list[Entity]] = {}
        self.subproperties: dict[IRI, list[Entity]] = {}
        self.domains: dict[IRI, list[ClassExpression]] = {}
        self.ranges: dict[IRI, list[ClassExpression]] = {}
        self.characteristics: dict[IRI, set[str]] = {}
        for axiom in ontology.axioms:
            self._index(axiom)

    def _index(self, axiom: Axiom) -> None:
        if isinstance(axiom, AnnotationAssertion):
            self.annotations.setdefault(axiom.subject, []).append(axiom)
        elif isinstance(axiom, SubClassOf) and isinstance(axiom.sub, Named):
            self.superclasses.setdefault(axiom.sub.entity.iri, []).append(axiom.sup)
        elif isinstance(axiom, EquivalentClasses):
            for i, op in enumerate(axiom.operands):
                if isinstance(op, Named):
                    others = [o for j, o in enumerate(axiom.operands) if j != i]
                    self.equivalents.setdefault(op.entity.iri, []).extend(others)
        elif isinstance(axiom, DisjointClasses):
            for member in axiom.operands:
                others = [o for o in axiom.operands if o != member]
                bucket = self.disjoints.setdefault(member.iri, [])
                for other in others:
                    if other not in bucket:
                        bucket.append(other)
        elif isinstance(axiom, SubObjectPropertyOf):
            self.subproperties.setdefault(axiom.sub.iri, []).append(axiom.sup)
        elif isinstance(axiom, ObjectPropertyDomain):
            self.domains.setdefault(axiom.property.iri, []).append(axiom.ce)
        elif isinstance(axiom, ObjectPropertyRange):
            self.ranges.setdefault(axiom.property.iri, []).append(axiom.ce)
        elif isinstance(axiom, FunctionalObjectProperty):
            self.characteristics.setdefault(axiom.property.iri, set()).add("Functional")
        elif isinstance(axiom, TransitiveObjectProperty):
            self.characteristics.setdefault(axiom.property.iri, set()).add("Transitive")

    def annotation_entries(self, iri: IRI) -> list[str]:
        entries = [
            (_omn_name(a.property, self.prefixes), a.value.lang or "", a.value.text)
            for a in self.annotations.get(iri, [])
        ]
        return [f"{prop} {_literal_from_parts(lang, text)}" for prop, lang, text in sorted(entries)]


def _literal_from_parts(lang: str, text: str) -> str:
    body = f'"{_escape_literal(text)}"'
    return f"{body}@{lang}" if lang else body


def _class_frame(entity: Entity, index: _FrameIndex) -> list[str]:
    prefixes = index.prefixes
    lines = [f"Class: {_omn_name(entity, prefixes)}"]
    _section(lines, "Annotations", index.annotation_entries(entity.iri))
    _section(
        lines,
        "EquivalentTo",
        [_omn_ce(ce, prefixes) for ce in index.equivalents.get(entity.iri, [])],
    )
    _section(
        lines,
        "SubClassOf",
        [_omn_ce(ce, prefixes) for ce in index.superclasses.get(entity.iri, [])],
    )
    _section(
        lines,
        "DisjointWith",
        [_omn_name(e, prefixes) for e in index.disjoints.get(entity.iri, [])],
    )
    return lines


def _property_frame(entity: Entity, index: _FrameIndex) -> list[str]:
    prefixes = index.prefixes
    lines = [f"ObjectProperty: {_omn_name(entity, prefixes)}"]
    _section(lines, "Annotations", index.annotation_entries(entity.iri))
    traits = index.characteristics.get(entity.iri, set())
    _section(lines, "Characteristics", [t for t in ("Functional", "Transitive") if t in traits])
    _section(
        lines,
        "SubPropertyOf",
        [_omn_name(p, prefixes) for p in index.subproperties.get(entity.iri, [])],
    )
    _section(lines, "Domain", [_omn_ce(ce, prefixes) for ce in index.domains.get(entity.iri, [])])
    _section(lines, "Range", [_omn_ce(ce, prefixes) for ce in index.ranges.get(entity.iri, [])])
    return lines


def _annotation_property_frame(entity: Entity, index: _FrameIndex) -> list[str]:
    lines = [f"AnnotationProperty: {_omn_name(entity, index.prefixes)}"]
    _section(lines, "Annotations", index.annotation_entries(entity.iri))
    return lines


def render_omn(ontology: Ontology) -> str:
    """Manchester-style text for the whole ontology."""
    prefixes = prefix_map(ontology)
    index = _FrameIndex(ontology, prefixes)
    blocks: list[list[str]] = []

    header = [f"Prefix: {label}: <{prefixes[label]}>" for label in sorted(prefixes)]
    header.append("")
    header.append(f"Ontology: <{ontology.iri}>")
    for axiom in ontology.axioms:
        if isinstance(axiom, Import):
            header.append(f"Import: <{axiom.iri}>")
    blocks.append(header)

    for entity in ontology.entities.values():
        if entity.kind is Kind.CLASS:
            blocks.append(_class_frame(entity, index))
        elif entity.kind is Kind.OBJECT_PROPERTY:
            blocks.append(_property_frame(entity, index))
        elif entity.kind is Kind.ANNOTATION_PROPERTY:
            blocks.append(_annotation_property_frame(entity, index))

    return "\n\n".join("\n".join(block) for block in blocks) + "\n"


# --- functional-style -------------------------------------------------------


def _fun_entity(entity: Entity, prefixes: dict[str, str]) -> str:
    curie = shorten(entity.iri, prefixes)
    return curie if curie is not None else f"<{entity.iri}>"


def _fun_ce(ce: ClassExpression, prefixes: dict[str, str]) -> str:
    if isinstance(ce, Named):
        return _fun_entity(ce.entity, prefixes)
    if isinstance(ce, Thing):
        return "owl:Thing"
    if isinstance(ce, Nothing):
        return "owl:Nothing"
    if isinstance(ce, And):
        return "ObjectIntersectionOf(" + " ".join(_fun_ce(op, prefixes) for op in ce.operands) + ")"
    if isinstance(ce, Or):
        return "ObjectUnionOf(" + " ".join(_fun_ce(op, prefixes) for op in ce.operands) + ")"
    if isinstance(ce, Not):
        return "ObjectComplementOf(" + _fun_ce(ce.operand, prefixes) + ")"
    if isinstance(ce, Some):
        return f"ObjectSomeValuesFrom({_fun_entity(ce.property, prefixes)} {_fun_ce(ce.filler, prefixes)})"
    if isinstance(ce, Only):
        return f"ObjectAllValuesFrom({_fun_entity(ce.property, prefixes)} {_fun_ce(ce.filler, prefixes)})"
    raise TypeError(f"not a class expression: {ce!r}")


_DECL_KEYWORD = {
    Kind.CLASS: "Class",
    Kind.OBJECT_PROPERTY: "ObjectProperty",
    Kind.ANNOTATION_PROPERTY: "AnnotationProperty",
}


def render_axiom_functional(axiom: Axiom, prefixes: dict[str, str]) -> str:
    """One axiom as a single functional-style line."""
    ent = lambda e: _fun_entity(e, prefixes)
    ce = lambda x: _fun_ce(x, prefixes)
    if isinstance(axiom, Declaration):
        return f"Declaration({_DECL_KEYWORD[axiom.entity.kind]}({ent(axiom.entity)}))"
    if isinstance(axiom, SubClassOf):
        return f"SubClassOf({ce(axiom.sub)} {ce(axiom.sup)})"
    if isinstance(axiom, EquivalentClasses):
        return "EquivalentClasses(" + " ".join(ce(op) for op in axiom.operands) + ")"
    if isinstance(axiom, DisjointClasses):
        return "DisjointClasses(" + " ".join(ent(op) for op in axiom.operands) + ")"
    if isinstance(axiom, SubObjectPropertyOf):
        return f"SubObjectPropertyOf({ent(axiom.sub)} {ent(axiom.sup)})"
    if isinstance(axiom, ObjectPropertyDomain):
        return f"ObjectPropertyDomain({ent(axiom.property)} {ce(axiom.ce)})"
    if isinstance(axiom, ObjectPropertyRange):
        return f"ObjectPropertyRange({ent(axiom.property)} {ce(axiom.ce)})"
    if isinstance(axiom, FunctionalObjectProperty):
        return f"FunctionalObjectProperty({ent(axiom.property)})"
    if isinstance(axiom, TransitiveObjectProperty):
        return f"TransitiveObjectProperty({ent(axiom.property)})"
    if isinstance(axiom, AnnotationAssertion):
        subject = shorten(axiom.subject, prefixes) or f"<{axiom.subject}>"
        return f"AnnotationAssertion({ent(axiom.property)} {subject} {_literal(axiom.value)})"
    if isinstance(axiom, Import):
        return f"Import(<{axiom.iri}>)"
    raise TypeError(f"not an axiom: {axiom!r}")


def render_functional(ontology: Ontology) -> str:
    """Functional-style text: prefixes, then one axiom per line in order."""
    prefixes = prefix_map(ontology)
    lines = [f"Prefix({label}:=<{prefixes[label]}>)" for label in sorted(prefixes)]
    lines.append(f"Ontology(<{ontology.iri}>")
    for axiom in ontology.axioms:
        lines.append(render_axiom_functional(axiom, prefixes))
    lines.append(")")
    return "\n".join(lines) + "\n"
