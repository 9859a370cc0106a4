"""Structural model of XML Schema documents and corpus-wide reference resolution.

Only the constructs that feed concept extraction are modelled. Everything
else (annotations, identity constraints, named groups, ...) is reported as a
``skipped-construct`` warning so that real-world schemas never abort a run.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Union

from lxml import etree

from .errors import Diagnostic, MalformedXml, NotASchema

XSD_NS = "http://www.w3.org/2001/XMLSchema"

BUILT_IN_TYPES = frozenset(
    """
    anyType anySimpleType anyAtomicType string normalizedString token language
    Name NCName ID IDREF IDREFS ENTITY ENTITIES NMTOKEN NMTOKENS QName NOTATION
    boolean decimal integer nonPositiveInteger negativeInteger long int short
    byte nonNegativeInteger unsignedLong unsignedInt unsignedShort unsignedByte
    positiveInteger float double duration dayTimeDuration yearMonthDuration
    dateTime dateTimeStamp time date gYearMonth gYear gMonthDay gDay gMonth
    hexBinary base64Binary anyURI
    """.split()
)

# Children of these are never mined; one aggregated warning per construct kind.
SKIPPED_CONSTRUCTS = frozenset(
    {"annotation", "key", "keyref", "unique", "group", "attributeGroup",
     "anyAttribute", "notation", "redefine", "override", "assert", "openContent",
     "defaultOpenContent", "alternative", "assertion"}
)


@dataclass(frozen=True, order=True)
class QName:
    namespace: str | None
    local: str

    def __str__(self) -> str:
        return f"{{{self.namespace}}}{self.local}" if self.namespace else self.local


@dataclass(frozen=True, order=True)
class Occurrence:
    """Cardinality bounds; ``max=None`` means unbounded."""

    min: int = 1
    max: int | None = 1

    def __post_init__(self) -> None:
        if self.min < 0 or (self.max is not None and (self.max < 0 or self.min > self.max)):
            raise ValueError(f"invalid occurrence [{self.min},{self.max}]")

    @property
    def unbounded(self) -> bool:
        return self.max is None

    def times(self, other: Occurrence) -> Occurrence:
        lo = self.min * other.min
        if self.max == 0 or other.max == 0:
            return Occurrence(lo, 0)
        if self.max is None or other.max is None:
            return Occurrence(lo, None)
        return Occurrence(lo, self.max * other.max)

    def widen(self, other: Occurrence) -> Occurrence:
        hi = None if self.max is None or other.max is None else max(self.max, other.max)
        return Occurrence(min(self.min, other.min), hi)

    def optional(self) -> Occurrence:
        return Occurrence(0, self.max)

    def __str__(self) -> str:
        return f"[{self.min},{'*' if self.max is None else self.max}]"


ONCE = Occurrence(1, 1)


class TypeKind(str, Enum):
    COMPLEX = "complex"
    SIMPLE = "simple"


class Content(str, Enum):
    SEQUENCE = "element-sequence"
    ALL = "all-group"
    CHOICE = "choice-group"
    SIMPLE_CONTENT = "simple-content"
    UNION = "union"
    ANY = "any-wildcard"
    RESTRICTION = "restriction"
    EXTENSION = "extension"
    BUILT_IN = "built-in"


@dataclass(frozen=True)
class Wildcard:
    occurs: Occurrence = ONCE
    path: str = field(default="", compare=False)


@dataclass(frozen=True)
class ModelGroup:
    compositor: str  # sequence | all | choice
    occurs: Occurrence = ONCE
    items: tuple[Union["ElementDeclaration", "ModelGroup", Wildcard], ...] = ()
    path: str = field(default="", compare=False)

    def elements(self) -> Iterator["ElementDeclaration"]:
        for item in self.items:
            if isinstance(item, ElementDeclaration):
                yield item
            elif isinstance(item, ModelGroup):
                yield from item.elements()


@dataclass(frozen=True)
class AttributeDeclaration:
    name: str
    declared_type: QName | None = None
    required: bool = False
    inline_type: "TypeDefinition | None" = None
    ref_target: QName | None = None
    path: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("attribute name must be non-empty")


@dataclass(frozen=True)
class TypeDefinition:
    name: str | None
    kind: TypeKind
    content: Content
    base_type: QName | None = None
    particle: ModelGroup | None = None
    attributes: tuple[AttributeDeclaration, ...] = ()
    built_in_target: str | None = None
    simple_content: bool = False
    member_types: tuple[QName, ...] = ()
    inline_members: tuple["TypeDefinition", ...] = ()
    inline_base: "TypeDefinition | None" = None
    namespace: str | None = None
    synthetic_name: str | None = field(default=None, compare=False)
    path: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        if self.kind is TypeKind.SIMPLE and self.particle is not None:
            raise ValueError("simple types cannot have element children")
        if self.base_type is not None and self.content not in (Content.RESTRICTION, Content.EXTENSION):
            raise ValueError("base_type requires restriction or extension content")

    @property
    def children(self) -> tuple["ElementDeclaration", ...]:
        return tuple(self.particle.elements()) if self.particle else ()

    @property
    def display_name(self) -> str:
        return self.name or self.synthetic_name or "anonymous"


@dataclass(frozen=True)
class ElementDeclaration:
    name: str | None
    declared_type: QName | None = None
    ref_target: QName | None = None
    inline_type: TypeDefinition | None = None
    occurs: Occurrence = ONCE
    namespace: str | None = None
    path: str = field(default="", compare=False)


@dataclass(frozen=True)
class SchemaDocument:
    source_id: str
    target_namespace: str | None = None
    type_definitions: tuple[TypeDefinition, ...] = ()
    global_elements: tuple[ElementDeclaration, ...] = ()
    global_attributes: tuple[AttributeDeclaration, ...] = ()
    imports: tuple[str, ...] = ()
    warnings: tuple[Diagnostic, ...] = field(default=(), compare=False)


def builtin_type(local: str) -> TypeDefinition:
    return TypeDefinition(local, TypeKind.SIMPLE, Content.BUILT_IN, built_in_target=local, namespace=XSD_NS)


# --------------------------------------------------------------------------- parsing

_ENCODING_DECL = re.compile(r"^(\s*<\?xml[^>]*?)\s+encoding\s*=\s*(['\"])[^'\"]*\2", re.S)


def _local(tag) -> str | None:
    if not isinstance(tag, str):
        return None  # comments, processing instructions
    return tag.rsplit("}", 1)[-1]


def _ns(tag: str) -> str | None:
    return tag[1:].split("}", 1)[0] if tag.startswith("{") else None


class _Parser:
    def __init__(self, source_id: str, root) -> None:
        self.source_id = source_id
        self.root = root
        self.tns = root.get("targetNamespace")
        self.skipped: Counter[str] = Counter()
        self.first_skip: dict[str, str] = {}
        self.warnings: list[Diagnostic] = []

    # helpers
    def warn(self, code: str, message: str, path: str) -> None:
        self.warnings.append(Diagnostic(code, message, source_id=self.source_id, path=path))

    def skip(self, name: str, path: str) -> None:
        self.skipped[name] += 1
        self.first_skip.setdefault(name, path)

    def xsd_children(self, el, path: str) -> Iterator[tuple[str, object]]:
        for child in el:
            name = _local(child.tag)
            if name is None:
                continue
            ns = _ns(child.tag)
            if ns not in (XSD_NS, None):
                self.warn("foreign-construct", f"ignored non-XSD element {child.tag}", path)
                continue
            if name in SKIPPED_CONSTRUCTS:
                self.skip(name, f"{path}/{name}")
                continue
            yield name, child

    def qname(self, el, value: str | None, path: str) -> QName | None:
        if not value:
            return None
        value = value.strip()
        if ":" in value:
            prefix, local = value.split(":", 1)
            ns = el.nsmap.get(prefix)
            if ns is None:
                self.warn("unknown-prefix", f"prefix {prefix!r} is not declared", path)
            return QName(ns, local)
        return QName(el.nsmap.get(None), value)

    def occurs(self, el, path: str) -> Occurrence:
        raw_min, raw_max = el.get("minOccurs", "1"), el.get("maxOccurs", "1")
        try:
            lo = int(raw_min)
            hi = None if raw_max.strip() == "unbounded" else int(raw_max)
        except ValueError:
            self.warn("invalid-occurs", f"unparseable occurrence {raw_min!r}..{raw_max!r}", path)
            return ONCE
        if lo < 0 or (hi is not None and hi < lo):
            self.warn("invalid-occurs", f"occurrence [{lo},{hi}] is inconsistent; using [{max(lo, 0)},{max(lo, 0)}]", path)
            lo = max(lo, 0)
            hi = lo
        return Occurrence(lo, hi)

    # document level
    def document(self) -> SchemaDocument:
        types, elements, attributes, imports = [], [], [], []
        base = "/schema"
        for name, child in self.xsd_children(self.root, base):
            if name == "complexType":
                types.append(self.complex_type(child, base, child.get("name")))
            elif name == "simpleType":
                types.append(self.simple_type(child, base, child.get("name")))
            elif name == "element":
                el = self.element(child, base)
                if el is not None:
                    elements.append(el)
            elif name == "attribute":
                attr = self.attribute(child, base)
                if attr is not None:
                    attributes.append(attr)
            elif name in ("import", "include"):
                imports.append(child.get("schemaLocation") or child.get("namespace") or "")
            else:
                self.skip(name, f"{base}/{name}")
        for name, count in sorted(self.skipped.items()):
            self.warn("skipped-construct", f"skipped {count} xs:{name} construct(s)", self.first_skip[name])
        return SchemaDocument(
            source_id=self.source_id,
            target_namespace=self.tns,
            type_definitions=tuple(types),
            global_elements=tuple(elements),
            global_attributes=tuple(attributes),
            imports=tuple(imports),
            warnings=tuple(self.warnings),
        )

    # types
    def complex_type(self, el, parent_path: str, name: str | None, owner: str | None = None) -> TypeDefinition:
        synthetic = None if name else f"{owner or 'anonymous'}Type"
        path = f"{parent_path}/complexType[@name='{name}']" if name else f"{parent_path}/complexType"
        particle, attributes = None, []
        content = None
        base = None
        simple_content = False
        for cname, child in self.xsd_children(el, path):
            if cname in ("sequence", "all", "choice"):
                particle = self.group(child, path)
            elif cname == "attribute":
                attr = self.attribute(child, path)
                if attr is not None:
                    attributes.append(attr)
            elif cname in ("complexContent", "simpleContent"):
                simple_content = cname == "simpleContent"
                cpath = f"{path}/{cname}"
                for dname, deriv in self.xsd_children(child, cpath):
                    if dname not in ("extension", "restriction"):
                        self.skip(dname, f"{cpath}/{dname}")
                        continue
                    content = Content.EXTENSION if dname == "extension" else Content.RESTRICTION
                    dpath = f"{cpath}/{dname}"
                    base = self.qname(deriv, deriv.get("base"), dpath)
                    for iname, inner in self.xsd_children(deriv, dpath):
                        if iname in ("sequence", "all", "choice") and not simple_content:
                            particle = self.group(inner, dpath)
                        elif iname == "attribute":
                            attr = self.attribute(inner, dpath)
                            if attr is not None:
                                attributes.append(attr)
                        elif iname == "simpleType":
                            pass  # restriction facets' inline base; value space is not mined
                        elif iname not in _FACETS:
                            self.skip(iname, f"{dpath}/{iname}")
            else:
                self.skip(cname, f"{path}/{cname}")
        if content is None:
            if particle is None:
                content = Content.SEQUENCE
            elif particle.compositor == "choice":
                content = Content.CHOICE
            elif particle.compositor == "all":
                content = Content.ALL
            elif particle.items and all(isinstance(i, Wildcard) for i in particle.items):
                content = Content.ANY
            else:
                content = Content.SEQUENCE
        return TypeDefinition(
            name=name,
            kind=TypeKind.COMPLEX,
            content=content,
            base_type=base,
            particle=particle,
            attributes=tuple(attributes),
            simple_content=simple_content,
            namespace=self.tns,
            synthetic_name=synthetic,
            path=path,
        )

    def simple_type(self, el, parent_path: str, name: str | None, owner: str | None = None) -> TypeDefinition:
        synthetic = None if name else f"{owner or 'anonymous'}Type"
        path = f"{parent_path}/simpleType[@name='{name}']" if name else f"{parent_path}/simpleType"
        label = name or synthetic
        for cname, child in self.xsd_children(el, path):
            cpath = f"{path}/{cname}"
            if cname == "restriction":
                base = self.qname(child, child.get("base"), cpath)
                inline_base = None
                for iname, inner in self.xsd_children(child, cpath):
                    if iname == "simpleType":
                        inline_base = self.simple_type(inner, cpath, None, owner=label)
                if base is None and inline_base is None:
                    self.warn("missing-base", "restriction without a base type", cpath)
                return TypeDefinition(
                    name, TypeKind.SIMPLE, Content.RESTRICTION, base_type=base, inline_base=inline_base,
                    namespace=self.tns, synthetic_name=synthetic, path=path,
                )
            if cname == "union":
                members = tuple(
                    q for q in (self.qname(child, v, cpath) for v in (child.get("memberTypes") or "").split()) if q
                )
                inline = tuple(
                    self.simple_type(inner, cpath, None, owner=f"{label}Member{i + 1}")
                    for i, (iname, inner) in enumerate(self.xsd_children(child, cpath))
                    if iname == "simpleType"
                )
                return TypeDefinition(
                    name, TypeKind.SIMPLE, Content.UNION, member_types=members, inline_members=inline,
                    namespace=self.tns, synthetic_name=synthetic, path=path,
                )
            if cname == "list":
                self.warn("list-type", f"xs:list type {label!r} is treated as a string datatype", cpath)
                return TypeDefinition(
                    name, TypeKind.SIMPLE, Content.RESTRICTION, built_in_target="string",
                    namespace=self.tns, synthetic_name=synthetic, path=path,
                )
            self.skip(cname, cpath)
        self.warn("empty-simple-type", f"simple type {label!r} has no derivation; treated as string", path)
        return TypeDefinition(
            name, TypeKind.SIMPLE, Content.RESTRICTION, built_in_target="string",
            namespace=self.tns, synthetic_name=synthetic, path=path,
        )

    # particles
    def group(self, el, parent_path: str) -> ModelGroup:
        compositor = _local(el.tag)
        path = f"{parent_path}/{compositor}"
        items: list = []
        for cname, child in self.xsd_children(el, path):
            if cname == "element":
                decl = self.element(child, path)
                if decl is not None:
                    items.append(decl)
            elif cname in ("sequence", "choice", "all"):
                items.append(self.group(child, path))
            elif cname == "any":
                items.append(Wildcard(self.occurs(child, path), path=f"{path}/any"))
            else:
                self.skip(cname, f"{path}/{cname}")
        return ModelGroup(compositor, self.occurs(el, path), tuple(items), path=path)

    def element(self, el, parent_path: str) -> ElementDeclaration | None:
        name = el.get("name")
        ref = self.qname(el, el.get("ref"), parent_path)
        path = f"{parent_path}/element[@name='{name}']" if name else f"{parent_path}/element[@ref='{el.get('ref')}']"
        if name is None and ref is None:
            self.warn("anonymous-element", "element without name or ref ignored", parent_path)
            return None
        if el.get("substitutionGroup"):
            self.skip("substitutionGroup", path)
        declared = self.qname(el, el.get("type"), path)
        inline = None
        for cname, child in self.xsd_children(el, path):
            if cname == "complexType":
                inline = self.complex_type(child, path, None, owner=name)
            elif cname == "simpleType":
                inline = self.simple_type(child, path, None, owner=name)
            else:
                self.skip(cname, f"{path}/{cname}")
        if ref is not None:
            declared, inline, name = None, None, None
        elif declared is not None and inline is not None:
            self.warn("conflicting-type", "element has both a type attribute and an inline type; inline ignored", path)
            inline = None
        return ElementDeclaration(
            name=name, declared_type=declared, ref_target=ref, inline_type=inline,
            occurs=self.occurs(el, path), namespace=self.tns, path=path,
        )

    def attribute(self, el, parent_path: str) -> AttributeDeclaration | None:
        name = el.get("name")
        ref = self.qname(el, el.get("ref"), parent_path)
        if not name and ref is None:
            self.warn("anonymous-attribute", "attribute without name or ref ignored", parent_path)
            return None
        name = name or ref.local
        path = f"{parent_path}/@{name}"
        inline = None
        for cname, child in self.xsd_children(el, path):
            if cname == "simpleType":
                inline = self.simple_type(child, path, None, owner=name)
        return AttributeDeclaration(
            name=name,
            declared_type=self.qname(el, el.get("type"), path),
            required=el.get("use") == "required",
            inline_type=inline,
            ref_target=ref,
            path=path,
        )


_FACETS = frozenset(
    {"enumeration", "pattern", "length", "minLength", "maxLength", "minInclusive", "maxInclusive",
     "minExclusive", "maxExclusive", "totalDigits", "fractionDigits", "whiteSpace", "explicitTimezone"}
)


def parse_schema_document(text: str | bytes, source_id: str) -> SchemaDocument:
    """Parse one XSD document. ``text`` may be a str or raw bytes (declared encoding honoured)."""
    if isinstance(text, str):
        text = _ENCODING_DECL.sub(r"\1", text, count=1).encode("utf-8")
    parser = etree.XMLParser(resolve_entities=False, no_network=True, remove_comments=True)
    try:
        root = etree.fromstring(text, parser)
    except etree.XMLSyntaxError as exc:
        raise MalformedXml(f"{source_id}: {exc}") from exc
    if _local(root.tag) != "schema" or _ns(root.tag) not in (XSD_NS, None):
        raise NotASchema(f"{source_id}: root element is {root.tag!r}, not xs:schema")
    return _Parser(source_id, root).document()


# --------------------------------------------------------------------------- corpus


def _type_refs(td: TypeDefinition) -> Iterator[tuple[str, QName, str]]:
    if td.base_type is not None:
        yield "type", td.base_type, td.path
    for q in td.member_types:
        yield "type", q, td.path
    for inner in (*td.inline_members, td.inline_base):
        if inner is not None:
            yield from _type_refs(inner)
    if td.particle is not None:
        yield from _group_refs(td.particle)
    for attr in td.attributes:
        yield from _attr_refs(attr)


def _group_refs(group: ModelGroup) -> Iterator[tuple[str, QName, str]]:
    for item in group.items:
        if isinstance(item, ElementDeclaration):
            yield from _element_refs(item)
        elif isinstance(item, ModelGroup):
            yield from _group_refs(item)


def _element_refs(el: ElementDeclaration) -> Iterator[tuple[str, QName, str]]:
    if el.declared_type is not None:
        yield "type", el.declared_type, el.path
    if el.ref_target is not None:
        yield "element", el.ref_target, el.path
    if el.inline_type is not None:
        yield from _type_refs(el.inline_type)


def _attr_refs(attr: AttributeDeclaration) -> Iterator[tuple[str, QName, str]]:
    if attr.declared_type is not None:
        yield "type", attr.declared_type, attr.path
    if attr.ref_target is not None:
        yield "attribute", attr.ref_target, attr.path
    if attr.inline_type is not None:
        yield from _type_refs(attr.inline_type)


@dataclass(frozen=True)
class CorpusModel:
    """All documents of a corpus plus first-wins global symbol tables keyed by qualified name."""

    documents: tuple[SchemaDocument, ...] = ()
    types: dict[QName, tuple[str, TypeDefinition]] = field(default_factory=dict)
    elements: dict[QName, tuple[str, ElementDeclaration]] = field(default_factory=dict)
    attributes: dict[QName, tuple[str, AttributeDeclaration]] = field(default_factory=dict)
    shadowed: frozenset[tuple[str, str]] = frozenset()  # (source_id, path) of duplicate losers
    warnings: tuple[Diagnostic, ...] = field(default=(), compare=False)

    def _lookup(self, table: dict, qname: QName):
        hit = table.get(qname)
        if hit is not None:
            return hit[1]
        # chameleon includes and default-namespace schemas: fall back to the local name
        for key in sorted((k for k in table if k.local == qname.local), key=lambda k: (table[k][0], str(k))):
            return table[key][1]
        return None

    def resolve_type(self, qname: QName | None) -> TypeDefinition | None:
        if qname is None:
            return None
        if qname.namespace == XSD_NS and qname.local in BUILT_IN_TYPES:
            return builtin_type(qname.local)
        found = self._lookup(self.types, qname)
        if found is None and qname.local in BUILT_IN_TYPES and qname.namespace in (None, XSD_NS):
            return builtin_type(qname.local)
        return found

    def resolve_element(self, qname: QName | None) -> ElementDeclaration | TypeDefinition | None:
        """Global element by name; a complex type of that name is accepted as a fallback target."""
        if qname is None:
            return None
        found = self._lookup(self.elements, qname)
        if found is None:
            td = self._lookup(self.types, qname)
            if td is not None and td.kind is TypeKind.COMPLEX:
                return td
        return found

    def resolve_attribute(self, qname: QName | None) -> AttributeDeclaration | None:
        return None if qname is None else self._lookup(self.attributes, qname)

    def is_shadowed(self, source_id: str, path: str) -> bool:
        return (source_id, path) in self.shadowed


def build_corpus_model(documents: list[SchemaDocument]) -> CorpusModel:
    docs = sorted(documents, key=lambda d: d.source_id)
    ids = [d.source_id for d in docs]
    if len(set(ids)) != len(ids):
        raise ValueError("source_id values must be unique within a corpus")
    warnings: list[Diagnostic] = [w for d in docs for w in d.warnings]
    tables: dict[str, dict] = {"type": {}, "element": {}, "attribute": {}}
    shadowed: set[tuple[str, str]] = set()

    def register(kind: str, name: str | None, namespace: str | None, decl, doc: SchemaDocument) -> None:
        if not name:
            return
        table = tables[kind]
        key = QName(namespace, name)
        if key in table:
            first_source, first = table[key]
            # identical redefinitions are mined again (more provenance); differing ones lose
            if first != decl:
                shadowed.add((doc.source_id, decl.path))
                warnings.append(Diagnostic(
                    "duplicate-definition",
                    f"{kind} {key} redefined with a different structure; keeping {first_source}",
                    concepts=(name,), source_id=doc.source_id, path=decl.path,
                ))
            return
        table[key] = (doc.source_id, decl)

    for doc in docs:
        for td in doc.type_definitions:
            register("type", td.name, doc.target_namespace, td, doc)
        for el in doc.global_elements:
            register("element", el.name, doc.target_namespace, el, doc)
        for attr in doc.global_attributes:
            register("attribute", attr.name, doc.target_namespace, attr, doc)

    model = CorpusModel(tuple(docs), tables["type"], tables["element"], tables["attribute"], frozenset(shadowed))
    resolvers = {"type": model.resolve_type, "element": model.resolve_element, "attribute": model.resolve_attribute}
    seen: set[tuple[str, str, QName]] = set()
    for doc in docs:
        refs: list[tuple[str, QName, str]] = []
        for td in doc.type_definitions:
            refs.extend(_type_refs(td))
        for el in doc.global_elements:
            refs.extend(_element_refs(el))
        for attr in doc.global_attributes:
            refs.extend(_attr_refs(attr))
        for kind, qname, path in refs:
            if resolvers[kind](qname) is None and (doc.source_id, path, qname) not in seen:
                seen.add((doc.source_id, path, qname))
                warnings.append(Diagnostic(
                    "unresolved-reference",
                    f"{kind} reference {qname} has no definition in the corpus; treated as an opaque printable type",
                    concepts=(qname.local,), source_id=doc.source_id, path=path,
                ))
    return CorpusModel(
        model.documents, model.types, model.elements, model.attributes, model.shadowed, tuple(warnings)
    )


def iter_type_definitions(td: TypeDefinition) -> Iterator[TypeDefinition]:
    """The type itself and every anonymous type nested inside it."""
    yield td
    for inner in (*td.inline_members, td.inline_base):
        if inner is not None:
            yield from iter_type_definitions(inner)
    if td.particle is not None:
        for el in td.particle.elements():
            if el.inline_type is not None:
                yield from iter_type_definitions(el.inline_type)
    for attr in td.attributes:
        if attr.inline_type is not None:
            yield from iter_type_definitions(attr.inline_type)

