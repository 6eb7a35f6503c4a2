"""Ontology development as programming: a textual DSL, patterns, an EL
reasoner, serializers, and a test runner for OWL ontologies."""

from .errors import Diagnostic, Location, OntoforgeError
from .evaluator import (
    Environment,
    EvalError,
    Evaluator,
    Loader,
    eval_forms,
    eval_text,
    load_namespace,
    resolve,
)
from .importer import (
    MemoTable,
    intern_external,
    label_to_identifier,
    memorise_check,
    memorise_save,
    parse_functional,
)
from .model import (
    And,
    AnnotationAssertion,
    AnnotationValue,
    Axiom,
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
    NOTHING,
    ObjectPropertyDomain,
    ObjectPropertyRange,
    Only,
    Ontology,
    Or,
    Some,
    SubClassOf,
    SubObjectPropertyOf,
    THING,
    TransitiveObjectProperty,
)
from .polyglot import apply_labels, emit_skeleton, parse_properties, render_properties
from .reasoner import Taxonomy, classify, coherence_report, direct_superclasses, inferred_superclass
from .serializer import render_functional, render_omn
from .sexpr import ParseError, read_forms
from .testkit import TestReport, run_tests, tap_lines

__version__ = "0.1.0"

__all__ = [
    "And",
    "AnnotationAssertion",
    "AnnotationValue",
    "Axiom",
    "Declaration",
    "Diagnostic",
    "DisjointClasses",
    "Entity",
    "Environment",
    "EquivalentClasses",
    "EvalError",
    "Evaluator",
    "FunctionalObjectProperty",
    "Import",
    "IRI",
    "Kind",
    "Loader",
    "Location",
    "MemoTable",
    "Named",
    "Not",
    "NOTHING",
    "ObjectPropertyDomain",
    "ObjectPropertyRange",
    "Only",
    "Ontology",
    "OntoforgeError",
    "Or",
    "ParseError",
    "Some",
    "SubClassOf",
    "SubObjectPropertyOf",
    "Taxonomy",
    "TestReport",
    "THING",
    "TransitiveObjectProperty",
    "apply_labels",
    "classify",
    "coherence_report",
    "direct_superclasses",
    "emit_skeleton",
    "eval_forms",
    "eval_text",
    "inferred_superclass",
    "intern_external",
    "label_to_identifier",
    "load_namespace",
    "memorise_check",
    "memorise_save",
    "parse_functional",
    "parse_properties",
    "read_forms",
    "render_functional",
    "render_omn",
    "render_properties",
    "resolve",
    "run_tests",
    "tap_lines",
]
