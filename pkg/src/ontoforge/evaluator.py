"""Evaluation of top-level forms into an Environment with one Ontology.

The rules are few and strict: the first form of a namespace must be
`defontology` and there can be only one; every identifier must be defined
before it is referenced; entity IRIs are the ontology IRI plus the identifier,
verbatim. Definitions bind identifiers in the environment, so later forms,
tests, and the CLI can resolve them by name.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from . import patterns
from .errors import Diagnostic, Location, OntoforgeError
from .importer import InternRecord, _derive_prefix_label, intern_external, parse_functional
from .model import (
    AnnotationAssertion,
    AnnotationValue,
    Axiom,
    ClassExpression,
    DisjointClasses,
    Entity,
    EquivalentClasses,
    FunctionalObjectProperty,
    Import,
    IRI,
    Kind,
    Named,
    Not,
    ObjectPropertyDomain,
    ObjectPropertyRange,
    Only,
    Ontology,
    Or,
    And,
    RDFS_COMMENT,
    RDFS_LABEL,
    Some,
    SubClassOf,
    SubObjectPropertyOf,
    TransitiveObjectProperty,
)
from .sexpr import (
    BracketForm,
    Form,
    Identifier,
    Keyword,
    ListForm,
    Text,
    is_valid_identifier,
    is_valid_namespace,
    read_forms,
)


class EvalError(OntoforgeError):
    pass


class UnboundIdentifier(EvalError):
    pass


class DuplicateOntology(EvalError):
    pass


class DuplicateBinding(EvalError):
    pass


class UnknownOption(EvalError):
    pass


class NamespaceNotFound(OntoforgeError):
    pass


class CycleError(OntoforgeError):
    pass


@dataclass
class DeprecatedAlias:
    old: str
    current: str
    entity: Entity


@dataclass(frozen=True)
class TestDef:
    name: str
    body: tuple[Form, ...]
    location: Location


class Environment:
    """Everything one namespace evaluation produces."""

    def __init__(self, namespace: str | None = None):
        self.namespace = namespace
        self.ontology: Ontology | None = None
        self.ontology_name: str | None = None
        self.bindings: dict[str, Entity] = {}
        self.deprecated: dict[str, DeprecatedAlias] = {}
        self.templates: dict[str, patterns.TemplateDef] = {}
        self.tests: list[TestDef] = []
        self.warnings: list[Diagnostic] = []
        self.interned: dict[str, InternRecord] = {}
        self.uses: list["Environment"] = []
        self.source_file = "<string>"
        self.source_dir: Path | None = None

    def all_environments(self) -> list["Environment"]:
        """This environment and its dependencies, dependencies first."""
        seen: set[int] = set()
        out: list[Environment] = []

        def visit(env: Environment) -> None:
            if id(env) in seen:
                return
            seen.add(id(env))
            for dep in env.uses:
                visit(dep)
            out.append(env)

        visit(self)
        return out

    def axiom_closure(self) -> list[Axiom]:
        """Own axioms plus those of transitively used namespaces."""
        out: list[Axiom] = []
        for env in self.all_environments():
            out.extend(env.ontology.axioms)
        return out


def resolve(env: Environment, name: str, location: Location | None = None) -> Entity:
    """Look up a binding; deprecated aliases still work but warn."""
    entity = env.bindings.get(name)
    if entity is not None:
        return entity
    alias = env.deprecated.get(name)
    if alias is not None:
        env.warnings.append(
            Diagnostic(
                "warning",
                f"label has changed: '{name}' is deprecated, use '{alias.current}'",
                location,
            )
        )
        return alias.entity
    raise UnboundIdentifier(f"unbound identifier '{name}'", location)


_CLASS_OPTIONS = {"label", "comment", "annotation", "subclass", "equivalent", "disjoint"}
_PROPERTY_OPTIONS = {
    "label",
    "comment",
    "annotation",
    "domain",
    "range",
    "subproperty",
    "characteristic",
}
_ONTOLOGY_OPTIONS = {"iri", "prefix"}

_PREFIX_LABEL_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_.-]*$")


@dataclass
class _AffixScope:
    where: str
    text: str
    aliases: dict[str, Entity] = field(default_factory=dict)


class Evaluator:
    """Walks top-level forms, mutating one Environment."""

    def __init__(self, env: Environment, loader: "Loader | None" = None):
        self.env = env
        self.loader = loader
        self._affixes: list[_AffixScope] = []
        # Transient name -> entity scope, used by probe blocks in tests.
        self.locals: dict[str, Entity] = {}

    # --- shared plumbing ---

    def _located(self, err: OntoforgeError, location: Location) -> OntoforgeError:
        if err.location is None:
            err.location = location
        return err

    def push_affix(self, where: str, text: str) -> None:
        self._affixes.append(_AffixScope(where, text))

    def pop_affix(self) -> None:
        self._affixes.pop()

    def _affixed(self, name: str) -> str:
        for scope in reversed(self._affixes):
            name = name + scope.text if scope.where == "suffix" else scope.text + name
        return name

    def resolve_ref(self, form: Form) -> Entity:
        if not isinstance(form, Identifier):
            raise EvalError("expected an identifier", form.location)
        for scope in reversed(self._affixes):
            entity = scope.aliases.get(form.name)
            if entity is not None:
                return entity
        entity = self.locals.get(form.name)
        if entity is not None:
            return entity
        return resolve(self.env, form.name, form.location)

    def resolve_class(self, form: Form) -> Entity:
        entity = self.resolve_ref(form)
        if entity.kind is not Kind.CLASS:
            raise EvalError(f"'{form.name}' is not a class", form.location)
        return entity

    def _resolve_property(self, form: Form) -> Entity:
        entity = self.resolve_ref(form)
        if entity.kind is not Kind.OBJECT_PROPERTY:
            raise EvalError(f"'{form.name}' is not an object property", form.location)
        return entity

    def bind_class(self, name_form: Identifier) -> Entity:
        return self._bind(name_form, Kind.CLASS)

    def bind_property(self, name_form: Identifier) -> Entity:
        return self._bind(name_form, Kind.OBJECT_PROPERTY)

    def _bind(self, name_form: Identifier, kind: Kind) -> Entity:
        name = name_form.name
        if not is_valid_identifier(name):
            raise EvalError(f"invalid identifier '{name}'", name_form.location)
        full = self._affixed(name)
        if full != name and full in self.env.bindings:
            raise DuplicateBinding(f"affixed name '{full}' is already bound", name_form.location)
        try:
            entity = self.env.ontology.declare(kind, IRI(self.env.ontology.iri.value + full))
        except ValueError as err:
            raise EvalError(str(err), name_form.location)
        except OntoforgeError as err:
            raise self._located(err, name_form.location)
        self.env.bindings[full] = entity
        if self._affixes and full != name:
            self._affixes[-1].aliases[name] = entity
        return entity

    # --- top-level dispatch ---

    def run(self, forms) -> Environment:
        for form in forms:
            self.eval_top(form)
        if self.env.ontology is None:
            raise EvalError(
                "namespace defines no ontology; the first form must be (defontology ...)",
                Location(self.env.source_file, 1, 1),
            )
        return self.env

    def eval_top(self, form: Form):
        if not isinstance(form, ListForm):
            raise EvalError("top-level form must be a list", form.location)
        if not form.children or not isinstance(form.children[0], Identifier):
            raise EvalError("form needs an identifier head", form.location)
        head = form.children[0]
        name = head.name
        if self.env.ontology is None and name != "defontology":
            raise EvalError("the first form must be (defontology ...)", head.location)
        if name == "defontology":
            return self._defontology(form)
        if name == "defclass":
            return self.eval_defclass(form)
        if name == "defoproperty":
            return self._defoproperty(form)
        if name == "use":
            return self._use(form)
        if name == "read-external":
            return self._read_external(form)
        if name == "deftest":
            return self._deftest(form)
        if name == "deftemplate":
            return patterns.define_template(self, form)
        if name == "as-disjoint-subclasses":
            return patterns.disjoint_subclasses(self, form)
        if name == "with-suffix":
            return patterns.affix_block(self, form, "suffix")
        if name == "with-prefix":
            return patterns.affix_block(self, form, "prefix")
        if name == "value-partition":
            return patterns.value_partition(self, form)
        template = self.env.templates.get(name)
        if template is not None:
            return patterns.apply_template(self, template, form)
        raise UnboundIdentifier(f"unbound identifier '{name}'", head.location)

    # --- options ---

    # Options whose values are themselves keywords (:characteristic :functional).
    _KEYWORD_VALUED = {"characteristic", "naming"}

    def _option_groups(
        self, forms, known: set[str]
    ) -> list[tuple[Keyword, list[Form]]]:
        groups: list[tuple[Keyword, list[Form]]] = []
        for form in forms:
            if isinstance(form, Keyword) and form.name in known:
                groups.append((form, []))
            elif isinstance(form, Keyword) and not (
                groups and groups[-1][0].name in self._KEYWORD_VALUED
            ):
                raise UnknownOption(f"unknown option ':{form.name}'", form.location)
            elif not groups:
                raise EvalError("expected an option keyword", form.location)
            else:
                groups[-1][1].append(form)
        return groups

    def _require_values(self, kw: Keyword, values: list[Form]) -> None:
        if not values:
            raise EvalError(f"option ':{kw.name}' needs at least one value", kw.location)

    def _annotation_axiom(self, subject: IRI, value_form: Form) -> AnnotationAssertion:
        if not (
            isinstance(value_form, ListForm)
            and len(value_form.children) in (2, 3)
            and isinstance(value_form.children[0], Identifier)
            and value_form.children[0].name in ("label", "comment")
            and all(isinstance(c, Text) for c in value_form.children[1:])
        ):
            raise EvalError(
                'annotation values look like (label "text" "lang")', value_form.location
            )
        prop = RDFS_LABEL if value_form.children[0].name == "label" else RDFS_COMMENT
        text = value_form.children[1].value
        lang = value_form.children[2].value if len(value_form.children) == 3 else None
        try:
            return AnnotationAssertion(subject, prop, AnnotationValue(text, lang))
        except ValueError as err:
            raise EvalError(str(err), value_form.location)

    def _single_text(self, kw: Keyword, values: list[Form]) -> str:
        if len(values) != 1 or not isinstance(values[0], Text):
            raise EvalError(f"option ':{kw.name}' needs exactly one text value", kw.location)
        return values[0].value

    def class_option_axioms(self, entity: Entity, forms) -> list[Axiom]:
        axioms: list[Axiom] = []
        for kw, values in self._option_groups(forms, _CLASS_OPTIONS):
            self._require_values(kw, values)
            if kw.name == "label":
                text = self._single_text(kw, values)
                axioms.append(
                    AnnotationAssertion(entity.iri, RDFS_LABEL, AnnotationValue(text, "en"))
                )
            elif kw.name == "comment":
                text = self._single_text(kw, values)
                axioms.append(
                    AnnotationAssertion(entity.iri, RDFS_COMMENT, AnnotationValue(text, "en"))
                )
            elif kw.name == "annotation":
                axioms.extend(self._annotation_axiom(entity.iri, v) for v in values)
            elif kw.name == "subclass":
                axioms.extend(SubClassOf(Named(entity), self.eval_ce(v)) for v in values)
            elif kw.name == "equivalent":
                operands = (Named(entity), *(self.eval_ce(v) for v in values))
                axioms.append(EquivalentClasses(operands))
            else:
                assert kw.name == "disjoint"
                others = tuple(self.resolve_class(v) for v in values)
                try:
                    axioms.append(DisjointClasses((entity, *others)))
                except ValueError as err:
                    raise EvalError(str(err), kw.location)
        return axioms

    def _property_option_axioms(self, entity: Entity, forms) -> list[Axiom]:
        axioms: list[Axiom] = []
        for kw, values in self._option_groups(forms, _PROPERTY_OPTIONS):
            self._require_values(kw, values)
            if kw.name == "label":
                text = self._single_text(kw, values)
                axioms.append(
                    AnnotationAssertion(entity.iri, RDFS_LABEL, AnnotationValue(text, "en"))
                )
            elif kw.name == "comment":
                text = self._single_text(kw, values)
                axioms.append(
                    AnnotationAssertion(entity.iri, RDFS_COMMENT, AnnotationValue(text, "en"))
                )
            elif kw.name == "annotation":
                axioms.extend(self._annotation_axiom(entity.iri, v) for v in values)
            elif kw.name == "domain":
                axioms.extend(ObjectPropertyDomain(entity, self.eval_ce(v)) for v in values)
            elif kw.name == "range":
                axioms.extend(ObjectPropertyRange(entity, self.eval_ce(v)) for v in values)
            elif kw.name == "subproperty":
                axioms.extend(
                    SubObjectPropertyOf(entity, self._resolve_property(v)) for v in values
                )
            else:
                assert kw.name == "characteristic"
                for v in values:
                    if isinstance(v, Keyword) and v.name == "functional":
                        axioms.append(FunctionalObjectProperty(entity))
                    elif isinstance(v, Keyword) and v.name == "transitive":
                        axioms.append(TransitiveObjectProperty(entity))
                    else:
                        raise EvalError(
                            "characteristics are :functional or :transitive", v.location
                        )
        return axioms

    # --- class expressions ---

    def eval_ce(self, form: Form) -> ClassExpression:
        if isinstance(form, Identifier):
            return Named(self.resolve_class(form))
        if not isinstance(form, ListForm) or not form.children:
            raise EvalError("expected a class expression", form.location)
        head = form.children[0]
        if not isinstance(head, Identifier):
            raise EvalError("expected a class expression", form.location)
        args = form.children[1:]
        name = head.name
        if name in ("owland", "owlor"):
            if not args:
                raise EvalError(f"{name} needs at least one operand", form.location)
            operands = [self.eval_ce(a) for a in args]
            if len(operands) == 1:
                return operands[0]
            return And(tuple(operands)) if name == "owland" else Or(tuple(operands))
        if name == "owlnot":
            if len(args) != 1:
                raise EvalError("owlnot takes exactly one operand", form.location)
            return Not(self.eval_ce(args[0]))
        if name in ("owlsome", "owlonly"):
            if len(args) != 2:
                raise EvalError(f"{name} takes a property and a filler", form.location)
            prop = self._resolve_property(args[0])
            filler = self.eval_ce(args[1])
            return Some(prop, filler) if name == "owlsome" else Only(prop, filler)
        if name == "owlclass":
            return Named(self.eval_owlclass(form))
        raise UnboundIdentifier(f"unbound identifier '{name}'", head.location)

    def eval_owlclass(self, form: ListForm) -> Entity:
        """(owlclass "Name" options...): declare a class without binding it."""
        args = form.children[1:]
        if not args or not isinstance(args[0], Text):
            raise EvalError("owlclass needs a text name", form.location)
        name = args[0].value
        if not is_valid_identifier(name):
            raise EvalError(f"invalid identifier '{name}'", args[0].location)
        try:
            entity = self.env.ontology.declare(
                Kind.CLASS, IRI(self.env.ontology.iri.value + name)
            )
        except OntoforgeError as err:
            raise self._located(err, args[0].location)
        self.env.ontology.add_axioms(self.class_option_axioms(entity, args[1:]))
        return entity

    # --- definition forms ---

    def _defontology(self, form: ListForm) -> Ontology:
        if self.env.ontology is not None:
            raise DuplicateOntology("namespace already defines an ontology", form.location)
        children = form.children
        if len(children) < 2 or not isinstance(children[1], Identifier):
            raise EvalError("defontology needs a name", form.location)
        name = children[1].name
        if not is_valid_identifier(name):
            raise EvalError(f"invalid identifier '{name}'", children[1].location)
        iri_text: str | None = None
        prefix: str | None = None
        for kw, values in self._option_groups(children[2:], _ONTOLOGY_OPTIONS):
            self._require_values(kw, values)
            if kw.name == "iri":
                iri_text = self._single_text(kw, values)
            else:
                prefix = self._single_text(kw, values)
        if iri_text is None:
            raise EvalError("defontology needs :iri", form.location)
        try:
            ontology = Ontology(IRI(iri_text))
        except ValueError as err:
            raise EvalError(str(err), form.location)
        if prefix is None:
            prefix = _derive_prefix_label(iri_text, {})
        elif not _PREFIX_LABEL_RE.match(prefix):
            raise EvalError(f"invalid prefix label '{prefix}'", form.location)
        ontology.prefixes[prefix] = iri_text
        self.env.ontology = ontology
        self.env.ontology_name = name
        if self.env.namespace is None:
            self.env.namespace = name
        return ontology

    def eval_defclass(self, form: ListForm) -> Entity:
        children = form.children
        if len(children) < 2 or not isinstance(children[1], Identifier):
            raise EvalError("defclass needs a name", form.location)
        entity = self.bind_class(children[1])
        try:
            axioms = self.class_option_axioms(entity, children[2:])
            self.env.ontology.add_axioms(axioms)
        except OntoforgeError as err:
            raise self._located(err, form.location)
        return entity

    def _defoproperty(self, form: ListForm) -> Entity:
        children = form.children
        if len(children) < 2 or not isinstance(children[1], Identifier):
            raise EvalError("defoproperty needs a name", form.location)
        entity = self.bind_property(children[1])
        try:
            axioms = self._property_option_axioms(entity, children[2:])
            self.env.ontology.add_axioms(axioms)
        except OntoforgeError as err:
            raise self._located(err, form.location)
        return entity

    def _use(self, form: ListForm) -> "Environment":
        children = form.children
        if len(children) != 2 or not isinstance(children[1], Identifier):
            raise EvalError("use needs a namespace name", form.location)
        ns = children[1].name
        if not is_valid_namespace(ns):
            raise EvalError(f"invalid namespace name '{ns}'", children[1].location)
        if self.loader is None:
            raise EvalError("no source loader available for (use ...)", form.location)
        try:
            dep = self.loader.load(ns)
        except OntoforgeError as err:
            raise self._located(err, children[1].location)
        self.env.uses.append(dep)
        self.env.ontology.add_axiom(Import(dep.ontology.iri))
        for name, entity in dep.bindings.items():
            if "/" in name:
                continue
            self.env.bindings[f"{ns}/{name}"] = entity
            self.env.ontology.register_imported(entity)
        own = self.env.ontology.prefixes
        for label, base in dep.ontology.prefixes.items():
            if base in own.values():
                continue
            candidate = label
            counter = 2
            while candidate in own:
                candidate = f"{label}{counter}"
                counter += 1
            own[candidate] = base
        return dep

    def _read_external(self, form: ListForm) -> int:
        children = form.children
        if len(children) < 2 or not isinstance(children[1], Text):
            raise EvalError("read-external needs a file path", form.location)
        naming = "fragment"
        prefix: str | None = None
        for kw, values in self._option_groups(children[2:], {"naming", "prefix"}):
            self._require_values(kw, values)
            if kw.name == "naming":
                value = values[0]
                if len(values) != 1 or not isinstance(value, Keyword) or value.name not in (
                    "fragment",
                    "label",
                ):
                    raise EvalError(":naming is :fragment or :label", kw.location)
                naming = value.name
            else:
                prefix = self._single_text(kw, values)
        path = Path(children[1].value)
        if not path.is_absolute():
            path = (self.env.source_dir or Path.cwd()) / path
        text = path.read_text(encoding="utf-8")
        external = parse_functional(text, str(path))
        return intern_external(self.env, external, naming=naming, prefix=prefix)

    def _deftest(self, form: ListForm) -> TestDef:
        children = form.children
        if len(children) < 2 or not isinstance(children[1], Identifier):
            raise EvalError("deftest needs a name", form.location)
        name = children[1].name
        if not is_valid_identifier(name):
            raise EvalError(f"invalid identifier '{name}'", children[1].location)
        if any(t.name == name for t in self.env.tests):
            raise EvalError(f"duplicate test name '{name}'", children[1].location)
        test = TestDef(name, tuple(children[2:]), form.location)
        self.env.tests.append(test)
        return test


def eval_forms(env: Environment, forms, loader: "Loader | None" = None) -> Environment:
    """Evaluate parsed top-level forms into env."""
    return Evaluator(env, loader).run(forms)


def eval_text(
    text: str,
    namespace: str | None = None,
    file: str = "<string>",
    loader: "Loader | None" = None,
) -> Environment:
    """Read and evaluate a whole namespace given as text."""
    env = Environment(namespace)
    env.source_file = file
    return eval_forms(env, read_forms(text, file), loader)


class Loader:
    """Loads namespaces from .ont files under a source root, memoized."""

    def __init__(self, root):
        self.root = Path(root)
        self.cache: dict[str, Environment] = {}
        self._loading: list[str] = []

    def load(self, namespace: str) -> Environment:
        cached = self.cache.get(namespace)
        if cached is not None:
            return cached
        if namespace in self._loading:
            cycle = self._loading[self._loading.index(namespace):] + [namespace]
            raise CycleError("cyclic use: " + " -> ".join(cycle))
        path = self.root.joinpath(*namespace.split(".")).with_suffix(".ont")
        if not path.is_file():
            raise NamespaceNotFound(f"no source file for namespace '{namespace}' at {path}")
        text = path.read_text(encoding="utf-8")
        env = Environment(namespace)
        env.source_file = str(path)
        env.source_dir = path.parent
        self._loading.append(namespace)
        try:
            eval_forms(env, read_forms(text, str(path)), loader=self)
        finally:
            self._loading.pop()
        self.cache[namespace] = env
        return env


def load_namespace(source_root, namespace: str, cache: Loader | None = None) -> Environment:
    """Load one namespace (and its dependencies) from a source tree."""
    loader = cache if cache is not None else Loader(source_root)
    return loader.load(namespace)
