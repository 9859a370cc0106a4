"""Concept extraction from a resolved corpus and concept role classification."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .concepts import (
    Concept,
    ConceptGraph,
    Edge,
    EdgeKind,
    Provenance,
    RoleAssignment,
    Rule,
    assemble_graph,
)
from .errors import Diagnostic, EmptyLabel, RoleConflict
from .lexical import singularize as singular_form
from .lexical import tokenize_label
from .xsd import (
    ONCE,
    AttributeDeclaration,
    Content,
    CorpusModel,
    ElementDeclaration,
    ModelGroup,
    Occurrence,
    QName,
    TypeDefinition,
    TypeKind,
    Wildcard,
)

OPAQUE_DATATYPE = "anySimpleType"
WILDCARD_LABEL = "any"
WILDCARD_DATATYPE = "anyType"
OPTIONAL = Occurrence(0, 1)


@dataclass
class _Draft:
    spellings: Counter = field(default_factory=Counter)
    instances: list[Provenance] = field(default_factory=list)
    datatype_targets: list[str] = field(default_factory=list)


class _Extractor:
    def __init__(self, model: CorpusModel, singularize: bool) -> None:
        self.model = model
        self.singularize = singularize
        self.drafts: dict[str, _Draft] = {}
        self.edges: list[Edge] = []
        self.warnings: list[Diagnostic] = list(model.warnings)

    # -- concept bookkeeping
    def key_for(self, name: str) -> str:
        if not self.singularize:
            return name.casefold()
        try:
            tokens = list(tokenize_label(name))
        except EmptyLabel:
            return name.casefold()
        tokens[-1] = singular_form(tokens[-1])
        return "_".join(tokens)

    def concept(self, name: str, prov: Provenance | None, datatype_target: str | None = None) -> str:
        key = self.key_for(name)
        draft = self.drafts.setdefault(key, _Draft())
        draft.spellings[name] += 1
        if prov is not None:
            draft.instances.append(prov)
        if datatype_target and datatype_target not in draft.datatype_targets:
            draft.datatype_targets.append(datatype_target)
        return key

    def edge(self, kind: EdgeKind, source: str, target: str, card: Occurrence | None = None) -> None:
        if source == target and kind is not EdgeKind.PROPERTY_OF:
            return  # element named like its own type, or a choice repeating one concept
        self.edges.append(Edge(kind, source, target, card))

    # -- type resolution helpers
    def ultimate_builtin(self, td: TypeDefinition | None, seen: frozenset = frozenset()) -> str | None:
        if td is None:
            return OPAQUE_DATATYPE
        if td.built_in_target:
            return td.built_in_target
        if td.content is Content.UNION:
            return None
        marker = (td.namespace, td.name, td.path)
        if marker in seen:
            return OPAQUE_DATATYPE
        seen = seen | {marker}
        if td.inline_base is not None:
            return self.ultimate_builtin(td.inline_base, seen)
        if td.base_type is not None:
            return self.ultimate_builtin(self.model.resolve_type(td.base_type), seen)
        return None

    def type_concept(self, qname: QName, rule: Rule, source: str, path: str) -> str:
        """Concept key standing for a referenced type; built-ins and unresolved names become datatypes."""
        td = self.model.resolve_type(qname)
        prov = Provenance(source, path, rule)
        if td is None:
            return self.concept(qname.local, prov, OPAQUE_DATATYPE)
        if td.content is Content.BUILT_IN:
            return self.concept(td.name, prov, td.name)
        return self.key_for(td.name)

    @staticmethod
    def is_any_type(qname: QName | None) -> bool:
        return qname is not None and qname.local == "anyType" and qname.namespace in (None, "http://www.w3.org/2001/XMLSchema")

    # -- walkers
    def run(self) -> ConceptGraph:
        for doc in self.model.documents:
            src = doc.source_id
            for td in doc.type_definitions:
                self.named_type(td, src)
            for el in doc.global_elements:
                self.element(el, None, ONCE, src)
            for attr in doc.global_attributes:
                self.attribute(attr, None, src)
        return self.finish()

    def named_type(self, td: TypeDefinition, src: str) -> None:
        if td.kind is TypeKind.SIMPLE:
            rule = Rule.SIMPLE_TYPE
        else:
            rule = Rule.SIMPLE_CONTENT if td.simple_content else Rule.COMPLEX_TYPE
        key = self.concept(td.name, Provenance(src, td.path, rule))
        if not self.model.is_shadowed(src, td.path):
            self.type_body(td, key, src)

    def type_body(self, td: TypeDefinition, owner: str, src: str) -> None:
        if td.kind is TypeKind.SIMPLE:
            if td.content is Content.UNION:
                for q in td.member_types:
                    self.edge(EdgeKind.PROPERTY_OF, owner, self.type_concept(q, Rule.UNION, src, td.path), ONCE)
                for inner in td.inline_members:
                    dt = self.ultimate_builtin(inner) or OPAQUE_DATATYPE
                    member = self.concept(dt, Provenance(src, inner.path, Rule.UNION), dt)
                    self.edge(EdgeKind.PROPERTY_OF, owner, member, ONCE)
                return
            self.derivation(td, owner, src)
            self.set_datatype(owner, self.ultimate_builtin(td))
            return
        if td.simple_content:
            self.derivation(td, owner, src)
            self.set_datatype(owner, self.ultimate_builtin(td))
            if td.attributes:
                self.warnings.append(Diagnostic(
                    "simple-content-attributes",
                    f"{len(td.attributes)} attribute(s) of simple-content type {td.display_name!r} are not mined",
                    concepts=(owner,), source_id=src, path=td.path,
                ))
            return
        self.derivation(td, owner, src)
        if td.particle is not None:
            self.particle(td.particle, owner, ONCE, src)
        for attr in td.attributes:
            self.attribute(attr, owner, src)

    def derivation(self, td: TypeDefinition, owner: str, src: str) -> None:
        if td.base_type is not None and not self.is_any_type(td.base_type):
            base = self.type_concept(td.base_type, Rule.DERIVATION, src, td.path)
            self.edge(EdgeKind.IS_A, owner, base)
        elif td.inline_base is not None:
            self.derivation(td.inline_base, owner, src)

    def set_datatype(self, key: str, target: str | None) -> None:
        if target:
            draft = self.drafts[key]
            if target not in draft.datatype_targets:
                draft.datatype_targets.append(target)

    def particle(self, group: ModelGroup, owner: str, outer: Occurrence, src: str) -> None:
        occ = outer.times(group.occurs)
        choice = group.compositor == "choice"
        if choice and len(group.items) > 1:
            occ = occ.optional()
        alternatives: list[str] = []
        for item in group.items:
            if isinstance(item, ElementDeclaration):
                key = self.element(item, owner, occ, src)
                if choice:
                    alternatives.append(key)
            elif isinstance(item, ModelGroup):
                self.particle(item, owner, occ, src)
            elif isinstance(item, Wildcard):
                key = self.concept(WILDCARD_LABEL, Provenance(src, item.path, Rule.ANY), WILDCARD_DATATYPE)
                self.edge(EdgeKind.PROPERTY_OF, owner, key, occ.times(item.occurs))
        for i, a in enumerate(alternatives):
            for b in alternatives[i + 1:]:
                self.edge(EdgeKind.DISJOINT, a, b)

    def element(self, el: ElementDeclaration, parent: str | None, occ: Occurrence, src: str) -> str:
        card = occ.times(el.occurs)
        if el.ref_target is not None:
            target = self.model.resolve_element(el.ref_target)
            prov = Provenance(src, el.path, Rule.ELEMENT_REF)
            if target is None:
                key = self.concept(el.ref_target.local, prov, OPAQUE_DATATYPE)
            else:
                key = self.concept(target.name, prov)
            if parent is not None:
                self.edge(EdgeKind.PROPERTY_OF, parent, key, card)
            return key

        rule = Rule.ELEMENT_TYPED if el.declared_type is not None else Rule.ELEMENT_NAMED
        key = self.concept(el.name, Provenance(src, el.path, rule))
        if parent is not None:
            self.edge(EdgeKind.PROPERTY_OF, parent, key, card)
        if parent is None and self.model.is_shadowed(src, el.path):
            return key
        if el.declared_type is not None:
            if not self.is_any_type(el.declared_type):
                self.edge(EdgeKind.IS_A, key, self.type_concept(el.declared_type, Rule.ELEMENT_TYPED, src, el.path))
        elif el.inline_type is not None:
            it = el.inline_type
            if it.kind is TypeKind.SIMPLE:
                inline_rule = Rule.SIMPLE_TYPE
            else:
                inline_rule = Rule.SIMPLE_CONTENT if it.simple_content else Rule.COMPLEX_TYPE
            self.drafts[key].instances.append(Provenance(src, f"{it.path}[{it.synthetic_name}]", inline_rule))
            self.type_body(it, key, src)
        return key

    def attribute(self, attr: AttributeDeclaration, owner: str | None, src: str) -> str:
        declared = attr.declared_type
        if attr.ref_target is not None:
            target = self.model.resolve_attribute(attr.ref_target)
            declared = target.declared_type if target is not None else None
        key = self.concept(attr.name, Provenance(src, attr.path, Rule.ATTRIBUTE))
        if owner is not None:
            self.edge(EdgeKind.PROPERTY_OF, owner, key, ONCE if attr.required else OPTIONAL)
        if declared is not None:
            self.edge(EdgeKind.IS_A, key, self.type_concept(declared, Rule.ATTRIBUTE, src, attr.path))
        elif attr.inline_type is not None:
            self.drafts[key].instances.append(
                Provenance(src, f"{attr.inline_type.path}[{attr.inline_type.synthetic_name}]", Rule.SIMPLE_TYPE)
            )
            self.type_body(attr.inline_type, key, src)
        else:
            dt = self.concept(OPAQUE_DATATYPE, Provenance(src, attr.path, Rule.ATTRIBUTE), OPAQUE_DATATYPE)
            self.edge(EdgeKind.IS_A, key, dt)
        return key

    # -- assembly
    def finish(self) -> ConceptGraph:
        has_props = {e.source for e in self.edges if e.kind is EdgeKind.PROPERTY_OF}
        concepts = []
        for key, draft in self.drafts.items():
            if not draft.instances:
                raise AssertionError(f"concept {key!r} was referenced but never declared")
            label = min(draft.spellings.items(), key=lambda kv: (-kv[1], kv[0]))[0]
            target = draft.datatype_targets[0] if draft.datatype_targets else None
            if len(draft.datatype_targets) > 1:
                self.warnings.append(Diagnostic(
                    "datatype-conflict",
                    f"concept {label!r} maps to several datatypes {draft.datatype_targets}; using {target}",
                    concepts=(key,),
                ))
            if target and key in has_props:
                self.warnings.append(Diagnostic(
                    "datatype-dropped",
                    f"concept {label!r} has properties, so its datatype {target} is ignored",
                    concepts=(key,),
                ))
                target = None
            concepts.append(Concept(key, label, tuple(draft.instances), (), target))
        return assemble_graph(concepts, self.edges, self.warnings)


def extract_concepts(model: CorpusModel, singularize: bool = False) -> ConceptGraph:
    """Map every modelled XSD construct onto concepts and is-a/propertyOf/disjointWith edges.

    Concepts whose normalised labels coincide anywhere in the corpus are
    unified; their provenance lists accumulate.
    """
    return _Extractor(model, singularize).run()


def classify_roles(graph: ConceptGraph) -> RoleAssignment:
    """Partition concepts into classes, properties and datatypes.

    A class has two or more properties, or exactly one when it comes from a
    complexType with complex content. A datatype has no properties and a
    printable target. Properties are the non-class members of some class's
    property list, plus every concept left over by the first two tests.
    """
    classes: set[str] = set()
    datatypes: set[str] = set()
    for cid, c in graph.concepts.items():
        n = len(c.properties)
        if c.datatype_target and n:
            raise RoleConflict(f"concept {cid!r} has properties and a printable target {c.datatype_target}")
        if n > 1 or (n == 1 and c.complex_origin):
            classes.add(cid)
        elif n == 0 and c.datatype_target:
            datatypes.add(cid)
    properties = {
        p for cid in classes for p, _ in graph.concepts[cid].properties
        if p not in classes and p in graph.concepts
    }
    properties |= set(graph.concepts) - classes - datatypes
    return RoleAssignment(frozenset(classes), frozenset(properties), frozenset(datatypes))
