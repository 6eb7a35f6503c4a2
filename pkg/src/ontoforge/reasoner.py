"""Polynomial classification for the EL fragment with disjointness.

The fragment covered: named classes, owl:Thing, owl:Nothing, intersections,
and existential restrictions, in subsumptions, equivalences, and pairwise
disjointness. A union at the top level of a subsumption's left-hand side is
decomposed into one subsumption per disjunct. Everything else (universal
restrictions, complements, remaining unions, and the property axioms) is
outside the fragment: those axioms are skipped and reported, never silently
dropped.

Classification runs in two stages:

1. `normalize` rewrites axioms into the four normal forms

       A ⊑ B      A1 ⊓ A2 ⊑ B      A ⊑ ∃r.B      ∃r.A ⊑ B

   where every letter is an atom: a named class, owl:Thing, owl:Nothing, or
   a fresh auxiliary name `_aux1`, `_aux2`, ... handed out in axiom order, so
   the output is deterministic for a given input sequence.

2. `saturate` computes, for every atom C, the set S(C) of entailed atomic
   subsumers and the role edge relation R(r), as the least fixpoint of

       R1: D ∈ S(C), D ⊑ B             then B ∈ S(C)
       R2: D1, D2 ∈ S(C), D1 ⊓ D2 ⊑ B  then B ∈ S(C)
       R3: D ∈ S(C), D ⊑ ∃r.B          then (C, B) ∈ R(r)
       R4: (C, D) ∈ R(r), E ∈ S(D), ∃r.E ⊑ B   then B ∈ S(C)
       R⊥: (C, D) ∈ R(r), Nothing ∈ S(D)       then Nothing ∈ S(C)

   starting from S(C) = {C, owl:Thing}. The fixpoint is unique, so the result
   does not depend on axiom order.

`classify` glues the stages together and projects the result onto the named
classes of the input, which is what queries and reports consume.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

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
    Kind,
    Named,
    Not,
    Nothing,
    ObjectPropertyDomain,
    ObjectPropertyRange,
    Only,
    Or,
    Some,
    SubClassOf,
    SubObjectPropertyOf,
    Thing,
    TransitiveObjectProperty,
)

TOP = "owl:Thing"
BOT = "owl:Nothing"

_PROPERTY_AXIOMS = (
    ObjectPropertyDomain,
    ObjectPropertyRange,
    FunctionalObjectProperty,
    TransitiveObjectProperty,
    SubObjectPropertyOf,
)


class UnknownEntity(OntoforgeError):
    """A query named a class outside the classified signature."""


# --- normal forms ----------------------------------------------------------


@dataclass(frozen=True)
class AtomAtom:
    sub: str
    sup: str


@dataclass(frozen=True)
class ConjAtom:
    left1: str
    left2: str
    sup: str


@dataclass(frozen=True)
class AtomExists:
    sub: str
    role: str
    filler: str


@dataclass(frozen=True)
class ExistsAtom:
    role: str
    filler: str
    sup: str


NormalAxiom = AtomAtom | ConjAtom | AtomExists | ExistsAtom


@dataclass(frozen=True)
class SkippedAxiom:
    axiom: Axiom
    reason: str


@dataclass
class NormalizeResult:
    normal: list[NormalAxiom] = field(default_factory=list)
    skipped: list[SkippedAxiom] = field(default_factory=list)
    classes: set[str] = field(default_factory=set)
    roles: set[str] = field(default_factory=set)


def _atom(ce: ClassExpression) -> str | None:
    if isinstance(ce, Named):
        return ce.entity.iri.value
    if isinstance(ce, Thing):
        return TOP
    if isinstance(ce, Nothing):
        return BOT
    return None


def _offending(ce: ClassExpression) -> str | None:
    """Name the first construct that falls outside the fragment, if any."""
    if isinstance(ce, Only):
        return "universal restriction"
    if isinstance(ce, Not):
        return "complement"
    if isinstance(ce, Or):
        return "union"
    if isinstance(ce, And):
        for op in ce.operands:
            bad = _offending(op)
            if bad:
                return bad
        return None
    if isinstance(ce, Some):
        return _offending(ce.filler)
    return None


class _Normalizer:
    def __init__(self) -> None:
        self.result = NormalizeResult()
        self._next_aux = 1

    def fresh(self) -> str:
        name = f"_aux{self._next_aux}"
        self._next_aux += 1
        return name

    def run(self, axioms) -> NormalizeResult:
        for axiom in axioms:
            self._axiom(axiom)
        return self.result

    def _axiom(self, axiom: Axiom) -> None:
        res = self.result
        if isinstance(axiom, Declaration):
            if axiom.entity.kind is Kind.CLASS:
                res.classes.add(axiom.entity.iri.value)
            elif axiom.entity.kind is Kind.OBJECT_PROPERTY:
                res.roles.add(axiom.entity.iri.value)
            return
        if isinstance(axiom, SubClassOf):
            self._sub(axiom.sub, axiom.sup, axiom)
            return
        if isinstance(axiom, EquivalentClasses):
            ops = axiom.operands
            for i, op in enumerate(ops):
                self._sub(op, ops[(i + 1) % len(ops)], axiom)
            return
        if isinstance(axiom, DisjointClasses):
            ops = [e.iri.value for e in axiom.operands]
            res.classes.update(ops)
            for i in range(len(ops)):
                for j in range(i + 1, len(ops)):
                    res.normal.append(ConjAtom(ops[i], ops[j], BOT))
            return
        if isinstance(axiom, (AnnotationAssertion, Import)):
            return
        if isinstance(axiom, _PROPERTY_AXIOMS):
            res.skipped.append(SkippedAxiom(axiom, f"{type(axiom).__name__} is outside the fragment"))
            return
        raise TypeError(f"not an axiom: {axiom!r}")

    def _sub(self, sub: ClassExpression, sup: ClassExpression, origin: Axiom) -> None:
        self._collect_signature(sub)
        self._collect_signature(sup)
        if isinstance(sub, Or):
            for disjunct in sub.operands:
                self._sub(disjunct, sup, origin)
            return
        bad = _offending(sub) or _offending(sup)
        if bad:
            self.result.skipped.append(SkippedAxiom(origin, f"{bad} is outside the fragment"))
            return
        self._emit(sub, sup)

    def _collect_signature(self, ce: ClassExpression) -> None:
        if isinstance(ce, Named):
            self.result.classes.add(ce.entity.iri.value)
        elif isinstance(ce, (And, Or)):
            for op in ce.operands:
                self._collect_signature(op)
        elif isinstance(ce, Not):
            self._collect_signature(ce.operand)
        elif isinstance(ce, (Some, Only)):
            self.result.roles.add(ce.property.iri.value)
            self._collect_signature(ce.filler)

    def _conjuncts(self, ce: ClassExpression, out: list[ClassExpression]) -> None:
        if isinstance(ce, And):
            for op in ce.operands:
                self._conjuncts(op, out)
        else:
            out.append(ce)

    def _lhs_atom(self, ce: ClassExpression) -> str:
        """An atom A with ce ⊑ A, naming ce when it is complex."""
        atom = _atom(ce)
        if atom is not None:
            return atom
        aux = self.fresh()
        self._emit_lhs(ce, aux)
        return aux

    def _rhs_atom(self, ce: ClassExpression) -> str:
        """An atom A with A ⊑ ce, naming ce when it is complex."""
        atom = _atom(ce)
        if atom is not None:
            return atom
        aux = self.fresh()
        self._emit_rhs(aux, ce)
        return aux

    def _emit(self, sub: ClassExpression, sup: ClassExpression) -> None:
        sup_atom = _atom(sup)
        if sup_atom is None:
            if isinstance(sup, And):
                for op in sup.operands:
                    self._emit(sub, op)
                return
            assert isinstance(sup, Some)
            filler = self._rhs_atom(sup.filler)
            self.result.normal.append(
                AtomExists(self._lhs_atom(sub), sup.property.iri.value, filler)
            )
            return
        self._emit_lhs(sub, sup_atom)

    def _emit_lhs(self, sub: ClassExpression, sup_atom: str) -> None:
        atom = _atom(sub)
        if atom is not None:
            self.result.normal.append(AtomAtom(atom, sup_atom))
            return
        if isinstance(sub, Some):
            filler = self._lhs_atom(sub.filler)
            self.result.normal.append(ExistsAtom(sub.property.iri.value, filler, sup_atom))
            return
        assert isinstance(sub, And)
        flat: list[ClassExpression] = []
        self._conjuncts(sub, flat)
        atoms = [self._lhs_atom(c) for c in flat]
        acc = atoms[0]
        for middle in atoms[1:-1]:
            aux = self.fresh()
            self.result.normal.append(ConjAtom(acc, middle, aux))
            acc = aux
        self.result.normal.append(ConjAtom(acc, atoms[-1], sup_atom))

    def _emit_rhs(self, sub_atom: str, sup: ClassExpression) -> None:
        if isinstance(sup, And):
            for op in sup.operands:
                atom = _atom(op)
                if atom is not None:
                    self.result.normal.append(AtomAtom(sub_atom, atom))
                else:
                    self._emit_rhs(sub_atom, op)
            return
        assert isinstance(sup, Some)
        filler = self._rhs_atom(sup.filler)
        self.result.normal.append(AtomExists(sub_atom, sup.property.iri.value, filler))


def normalize(axioms) -> NormalizeResult:
    """Rewrite axioms into normal forms, recording what was skipped."""
    return _Normalizer().run(axioms)


# --- saturation ------------------------------------------------------------


def saturate(
    normal: list[NormalAxiom], atoms=()
) -> tuple[dict[str, set[str]], dict[str, set[tuple[str, str]]]]:
    """The least fixpoint of the completion rules over the given axioms.

    Returns (S, R): S maps every atom to its entailed atomic subsumers
    (always containing the atom itself and owl:Thing); R maps each role to
    its derived edge set.
    """
    universe: set[str] = set(atoms) | {TOP}
    subs_by_lhs: dict[str, list[str]] = {}
    conj_by_operand: dict[str, list[tuple[str, str]]] = {}
    exists_rhs_by_lhs: dict[str, list[tuple[str, str]]] = {}
    exists_lhs_by_key: dict[tuple[str, str], list[str]] = {}

    for ax in normal:
        if isinstance(ax, AtomAtom):
            universe.update((ax.sub, ax.sup))
            subs_by_lhs.setdefault(ax.sub, []).append(ax.sup)
        elif isinstance(ax, ConjAtom):
            universe.update((ax.left1, ax.left2, ax.sup))
            conj_by_operand.setdefault(ax.left1, []).append((ax.left2, ax.sup))
            conj_by_operand.setdefault(ax.left2, []).append((ax.left1, ax.sup))
        elif isinstance(ax, AtomExists):
            universe.update((ax.sub, ax.filler))
            exists_rhs_by_lhs.setdefault(ax.sub, []).append((ax.role, ax.filler))
        elif isinstance(ax, ExistsAtom):
            universe.update((ax.filler, ax.sup))
            exists_lhs_by_key.setdefault((ax.role, ax.filler), []).append(ax.sup)
        else:
            raise TypeError(f"not a normal axiom: {ax!r}")

    S: dict[str, set[str]] = {a: set() for a in universe}
    R: dict[str, set[tuple[str, str]]] = {}
    edges_by_target: dict[str, set[tuple[str, str]]] = {}
    queue: deque[tuple] = deque()

    def add_sub(c: str, d: str) -> None:
        if d not in S[c]:
            S[c].add(d)
            queue.append(("s", c, d))

    def add_edge(role: str, src: str, tgt: str) -> None:
        edges = R.setdefault(role, set())
        if (src, tgt) not in edges:
            edges.add((src, tgt))
            edges_by_target.setdefault(tgt, set()).add((role, src))
            queue.append(("e", role, src, tgt))

    for a in universe:
        add_sub(a, a)
        add_sub(a, TOP)

    while queue:
        event = queue.popleft()
        if event[0] == "s":
            _, c, d = event
            for sup in subs_by_lhs.get(d, ()):
                add_sub(c, sup)
            for other, sup in conj_by_operand.get(d, ()):
                if other in S[c]:
                    add_sub(c, sup)
            for role, filler in exists_rhs_by_lhs.get(d, ()):
                add_edge(role, c, filler)
            for role, src in tuple(edges_by_target.get(c, ())):
                for sup in exists_lhs_by_key.get((role, d), ()):
                    add_sub(src, sup)
                if d == BOT:
                    add_sub(src, BOT)
        else:
            _, role, src, tgt = event
            for d in S[tgt].copy():
                for sup in exists_lhs_by_key.get((role, d), ()):
                    add_sub(src, sup)
            if BOT in S[tgt]:
                add_sub(src, BOT)

    return S, R


# --- the classified view ---------------------------------------------------


@dataclass(frozen=True)
class Taxonomy:
    """Saturation projected onto named classes."""

    subsumers: dict[str, frozenset[str]]
    role_edges: dict[str, frozenset[tuple[str, str]]]
    unsatisfiable: frozenset[str]
    skipped: tuple[SkippedAxiom, ...]

    @property
    def skipped_count(self) -> int:
        return len(self.skipped)


@dataclass(frozen=True)
class CoherenceReport:
    coherent: bool
    unsatisfiable: tuple[str, ...]


def classify(axioms) -> Taxonomy:
    """Normalize, saturate, and project onto the named classes."""
    norm = normalize(axioms)
    S, R = saturate(norm.normal, norm.classes)
    named = norm.classes | {TOP, BOT}
    subsumers = {c: frozenset(S[c] & named) for c in norm.classes}
    role_edges = {
        role: frozenset((a, b) for a, b in pairs if a in named and b in named)
        for role, pairs in R.items()
    }
    role_edges = {role: pairs for role, pairs in role_edges.items() if pairs}
    unsat = frozenset(c for c in norm.classes if BOT in S[c])
    return Taxonomy(subsumers, role_edges, unsat, tuple(norm.skipped))


def _lookup(taxonomy: Taxonomy, entity: Entity) -> str:
    key = entity.iri.value
    if key not in taxonomy.subsumers:
        raise UnknownEntity(f"<{key}> is not a named class of the classified ontology")
    return key


def inferred_superclass(
    taxonomy: Taxonomy, sub: Entity, sup: Entity, reflexive: bool = False
) -> bool:
    """Whether sub ⊑ sup is entailed; reflexive pairs count only when asked."""
    a = _lookup(taxonomy, sub)
    b = _lookup(taxonomy, sup)
    if a == b and not reflexive:
        return False
    return b in taxonomy.subsumers[a]


def coherence_report(taxonomy: Taxonomy) -> CoherenceReport:
    unsat = tuple(sorted(taxonomy.unsatisfiable))
    return CoherenceReport(not unsat, unsat)


def direct_superclasses(taxonomy: Taxonomy, name: str) -> list[str]:
    """Named strict superclasses with nothing strictly between, sorted."""
    if name not in taxonomy.subsumers:
        raise UnknownEntity(f"<{name}> is not a named class of the classified ontology")
    subsumers = taxonomy.subsumers
    strict = {
        d
        for d in subsumers[name]
        if d not in (name, TOP, BOT) and name not in subsumers.get(d, frozenset())
    }
    direct = [
        d
        for d in strict
        if not any(
            e != d and d in subsumers.get(e, frozenset()) and e not in subsumers.get(d, frozenset())
            for e in strict
        )
    ]
    return sorted(direct)
