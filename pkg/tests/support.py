"""Shared fixtures: the bundled sample and seeded random ontology builders."""

from __future__ import annotations

import random
from pathlib import Path

import ontoforge
from ontoforge.evaluator import Environment, Loader
from ontoforge.model import (
    And,
    AnnotationAssertion,
    AnnotationValue,
    DisjointClasses,
    Entity,
    EquivalentClasses,
    FunctionalObjectProperty,
    Import,
    IRI,
    Kind,
    Named,
    Not,
    NOTHING,
    ObjectPropertyDomain,
    ObjectPropertyRange,
    Only,
    Ontology,
    Or,
    RDFS_COMMENT,
    RDFS_LABEL,
    Some,
    SubClassOf,
    SubObjectPropertyOf,
    THING,
    TransitiveObjectProperty,
)

BUNDLED = Path(ontoforge.__file__).parent / "bundled"

# One line per acceptance criterion, printed by conftest after the run.
ACCEPTANCE_RESULTS: list[str] = []


def pizza_env() -> Environment:
    """A freshly evaluated copy of the bundled sample."""
    return Loader(BUNDLED).load("pizza")


# --- random EL ontologies (reasoner oracle fodder) ---------------------------


def random_el_ontology(rng: random.Random) -> Ontology:
    """Up to 12 classes, 3 roles, 25 axioms; conjunction/existential/bottom only."""
    base = "https://example.org/gen#"
    onto = Ontology(IRI(base))
    onto.prefixes["g"] = base
    classes = [
        onto.declare(Kind.CLASS, IRI(f"{base}C{i}")) for i in range(rng.randint(3, 12))
    ]
    roles = [
        onto.declare(Kind.OBJECT_PROPERTY, IRI(f"{base}r{i}"))
        for i in range(rng.randint(1, 3))
    ]

    def atom():
        return THING if rng.random() < 0.06 else Named(rng.choice(classes))

    def ce(depth: int):
        roll = rng.random()
        if depth <= 0 or roll < 0.5:
            return atom()
        if roll < 0.8:
            return Some(rng.choice(roles), ce(depth - 1))
        return And(tuple(ce(depth - 1) for _ in range(rng.randint(2, 3))))

    for _ in range(rng.randint(3, 25)):
        roll = rng.random()
        if roll < 0.68:
            sup = NOTHING if rng.random() < 0.06 else ce(2)
            onto.add_axiom(SubClassOf(ce(2), sup))
        elif roll < 0.85:
            onto.add_axiom(EquivalentClasses((Named(rng.choice(classes)), ce(2))))
        elif len(classes) >= 2:
            members = rng.sample(classes, k=min(len(classes), rng.randint(2, 3)))
            onto.add_axiom(DisjointClasses(tuple(members)))
    return onto


# --- random full-model ontologies (round-trip fodder) -------------------------

_TEXTS = [
    "plain text",
    'with "quotes"',
    "line\nbreak",
    "tab\tstop",
    "back\\slash",
    "pìzzä é ü",
    'all \\ of "them"\n\ttogether',
]

_LANGS = [None, "en", "pt", "it", "en-gb"]


def random_full_ontology(rng: random.Random) -> Ontology:
    """Exercises every axiom and expression the functional syntax carries."""
    base = f"https://example.org/rt{rng.randrange(10_000)}#"
    onto = Ontology(IRI(base))
    onto.prefixes["rt"] = base
    classes = [
        onto.declare(Kind.CLASS, IRI(f"{base}C{i}")) for i in range(rng.randint(2, 8))
    ]
    props = [
        onto.declare(Kind.OBJECT_PROPERTY, IRI(f"{base}p{i}"))
        for i in range(rng.randint(1, 3))
    ]
    for i in range(rng.randint(0, 2)):
        onto.add_axiom(Import(IRI(f"https://example.org/dep{i}#")))

    def ce(depth: int):
        roll = rng.random()
        if depth <= 0 or roll < 0.35:
            return rng.choice([THING, NOTHING, *(Named(c) for c in classes)])
        if roll < 0.55:
            return Some(rng.choice(props), ce(depth - 1))
        if roll < 0.7:
            return Only(rng.choice(props), ce(depth - 1))
        if roll < 0.8:
            return Not(ce(depth - 1))
        ops = tuple(ce(depth - 1) for _ in range(rng.randint(2, 3)))
        return And(ops) if roll < 0.9 else Or(ops)

    for _ in range(rng.randint(4, 20)):
        roll = rng.random()
        if roll < 0.4:
            onto.add_axiom(SubClassOf(ce(2), ce(2)))
        elif roll < 0.5:
            onto.add_axiom(EquivalentClasses(tuple(ce(1) for _ in range(rng.randint(2, 3)))))
        elif roll < 0.58 and len(classes) >= 2:
            members = rng.sample(classes, k=min(len(classes), rng.randint(2, 3)))
            onto.add_axiom(DisjointClasses(tuple(members)))
        elif roll < 0.66 and len(props) >= 2:
            onto.add_axiom(SubObjectPropertyOf(*rng.sample(props, k=2)))
        elif roll < 0.74:
            onto.add_axiom(ObjectPropertyDomain(rng.choice(props), ce(1)))
        elif roll < 0.82:
            onto.add_axiom(ObjectPropertyRange(rng.choice(props), ce(1)))
        elif roll < 0.88:
            onto.add_axiom(FunctionalObjectProperty(rng.choice(props)))
        elif roll < 0.92:
            onto.add_axiom(TransitiveObjectProperty(rng.choice(props)))
        else:
            subject = rng.choice(classes + props).iri
            prop = rng.choice([RDFS_LABEL, RDFS_COMMENT])
            value = AnnotationValue(rng.choice(_TEXTS), rng.choice(_LANGS))
            onto.add_axiom(AnnotationAssertion(subject, prop, value))
    return onto


# --- random probe blocks over the bundled sample -------------------------------


def random_probe_text(rng: random.Random, env: Environment) -> str:
    """Source text of one with-probe-entities assertion over env's classes."""
    class_names = sorted(
        name
        for name, entity in env.bindings.items()
        if "/" not in name and entity.kind is Kind.CLASS
    )
    prop_names = sorted(
        name
        for name, entity in env.bindings.items()
        if "/" not in name and entity.kind is Kind.OBJECT_PROPERTY
    )
    bindings = []
    locals_ = []
    for i in range(rng.randint(1, 3)):
        supers = " ".join(rng.sample(class_names, k=rng.randint(1, 2)))
        if rng.random() < 0.5:
            supers += f" (owlsome {rng.choice(prop_names)} {rng.choice(class_names)})"
        local = f"v{i}"
        locals_.append(local)
        bindings.append(f'({local} (owlclass "probe_{i}" :subclass {supers}))')
    if rng.random() < 0.4:
        body = "(coherent?)"
    else:
        sub = rng.choice(locals_) if rng.random() < 0.5 else rng.choice(class_names)
        body = f"(isuperclass? {sub} {rng.choice(class_names)})"
    return f"(with-probe-entities [{' '.join(bindings)}] {body})"


# --- the synthetic deep forest (scale fodder) ----------------------------------


def forest_functional_text(n_classes: int, fanout: int = 3) -> str:
    """Functional-syntax text: n classes, parent(i)=i//fanout, one label each."""
    base = "https://example.org/forest#"
    lines = [
        "Prefix(owl:=<http://www.w3.org/2002/07/owl#>)",
        "Prefix(rdfs:=<http://www.w3.org/2000/01/rdf-schema#>)",
        f"Prefix(f:=<{base}>)",
        f"Ontology(<{base}>",
    ]
    for i in range(n_classes):
        lines.append(f"Declaration(Class(f:N{i}))")
        if i > 0:
            lines.append(f"SubClassOf(f:N{i} f:N{i // fanout})")
        lines.append(f'AnnotationAssertion(rdfs:label f:N{i} "term {i} name"@en)')
    lines.append(")")
    return "\n".join(lines) + "\n"
