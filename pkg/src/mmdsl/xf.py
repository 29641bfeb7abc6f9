"""The metamodel-to-metamodel transformation language.

A transformation script (`.xf`) is a sequence of actions applied to a target
metamodel to derive the AST metamodel plus a trace:

    create [abstract] class Name [extends A, B] { <emfatic features> }
    refer img( Qualified::Name )[+] as Name ;
    skip Qualified::Name [+] ;
    make img( Name ) extend ( nothing | A, B ) ;

Every target class (and every builtin ecore class the target references)
gets an implicit image class named ``<name>AS``; the actions then create
syntax-specific classes, translate cross references into textual form,
rewire inheritance and remove images. Action order does not matter: the
executor applies canonical phases (map, create, change inheritance,
translate, skip) so any permutation of a valid action list derives an
isomorphic result.

The trace records the class and feature correspondences needed to run the
transformation one meta-level lower (AST instances to target instances) and
to reverse it; see the transform module.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .diagnostics import DiagnosticError, SourceLocation, error
from .emfatic import KEYWORDS as MM_KEYWORDS
from .emfatic import SYMBOLS as MM_SYMBOLS
from .emfatic import FeatureDecl, parse_feature_decl, parse_qname
from .lexer import Lexer, TokenStream
from .meta import (
    UNBOUNDED, Classifier, MetaAttribute, MetaClass, MetaDataType, Metamodel,
    MetaReference, Model, ModelObject, builtin_ecore, classifier_object,
    is_subtype, resolve_classifier, validate_metamodel,
)

KEYWORDS = MM_KEYWORDS | {"create", "refer", "img", "as", "skip", "make", "extend", "nothing"}
SYMBOLS = MM_SYMBOLS | {"(", ")", "+"}

_LEXER = Lexer(reserved=KEYWORDS, symbols=SYMBOLS, phase="transformation")

IMAGE_SUFFIX = "AS"


def image_name(proto: MetaClass) -> str:
    return proto.name + IMAGE_SUFFIX


# ---------------------------------------------------------------------------
# AST-side references. AST classes do not exist before derivation runs, so
# script positions that denote them hold symbolic references instead.


@dataclass(frozen=True)
class ImageRef:
    """The image of a target (or builtin) class, written by prototype name."""
    prototype: MetaClass
    written: str


@dataclass(frozen=True)
class CreatedRef:
    name: str


@dataclass(frozen=True)
class DatatypeRef:
    datatype: MetaDataType


AstRef = ImageRef | CreatedRef | DatatypeRef


def ast_ref_name(ref: AstRef) -> str:
    if isinstance(ref, ImageRef):
        return image_name(ref.prototype)
    if isinstance(ref, CreatedRef):
        return ref.name
    return ref.datatype.name


# ---------------------------------------------------------------------------
# Actions


@dataclass
class CreateClass:
    name: str
    abstract: bool
    superclasses: list[AstRef]
    features: list[FeatureDecl]
    feature_types: list[AstRef]
    loc: SourceLocation | None = None


@dataclass
class TranslateReferences:
    model_reference_type: MetaClass
    textual_reference_type: AstRef
    include_descendants: bool
    loc: SourceLocation | None = None


@dataclass
class ChangeInheritance:
    target: ImageRef
    superclasses: list[AstRef]
    loc: SourceLocation | None = None


@dataclass
class SkipClass:
    target: MetaClass
    include_descendants: bool
    loc: SourceLocation | None = None


Action = CreateClass | TranslateReferences | ChangeInheritance | SkipClass


@dataclass
class Transformation:
    actions: list[Action] = field(default_factory=list)


# ---------------------------------------------------------------------------
# Trace


@dataclass
class ClassRecord:
    proto: str  # qualified with ecore:: for builtin prototypes
    image: str
    status: str  # mapped | skipped


@dataclass
class FeatureRecord:
    proto_class: str
    proto_feature: str
    image_class: str
    image_feature: str
    mode: str  # copied | translated
    textual: str | None = None


@dataclass
class Trace:
    class_records: list[ClassRecord] = field(default_factory=list)
    feature_records: list[FeatureRecord] = field(default_factory=list)
    created: list[str] = field(default_factory=list)


def format_trace(trace: Trace) -> str:
    lines = []
    for r in trace.class_records:
        suffix = " skipped" if r.status == "skipped" else ""
        lines.append(f"class {r.proto} -> {r.image}{suffix}")
    for r in trace.feature_records:
        mode = r.mode if r.mode == "copied" else f"translated:{r.textual}"
        lines.append(f"feature {r.proto_class}.{r.proto_feature} -> "
                     f"{r.image_class}.{r.image_feature} {mode}")
    for name in trace.created:
        lines.append(f"created {name}")
    return "\n".join(lines) + "\n"


def parse_trace(text: str, file: str = "<trace>") -> Trace:
    trace = Trace()
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        loc = SourceLocation(file, n, 1)
        parts = line.split()
        try:
            if parts[0] == "class" and parts[2] == "->":
                status = "skipped" if parts[-1] == "skipped" else "mapped"
                trace.class_records.append(ClassRecord(parts[1], parts[3], status))
            elif parts[0] == "feature" and parts[2] == "->":
                pc, pf = parts[1].rsplit(".", 1)
                ic, if_ = parts[3].rsplit(".", 1)
                mode = parts[4]
                if mode == "copied":
                    trace.feature_records.append(FeatureRecord(pc, pf, ic, if_, "copied"))
                elif mode.startswith("translated:"):
                    trace.feature_records.append(
                        FeatureRecord(pc, pf, ic, if_, "translated", mode.split(":", 1)[1]))
                else:
                    raise ValueError(mode)
            elif parts[0] == "created":
                trace.created.append(parts[1])
            else:
                raise ValueError(parts[0])
        except (IndexError, ValueError):
            raise DiagnosticError([error("transformation", "plan-stale",
                                         f"malformed trace line: {line!r}", location=loc)])
    return trace


# ---------------------------------------------------------------------------
# Script parsing


def parse_transformation(text: str, target: Metamodel, file: str = "<xf>") -> Transformation:
    """Parse a `.xf` script against the target metamodel.

    Names inside ``img(...)`` and after ``skip`` resolve against the target
    metamodel, then builtin ecore (``ecore::`` qualification forces the
    builtin). Names after ``as``/``extends``/``extend`` and feature types
    resolve against created classes (simple name), then datatypes, then
    images of target classes written by prototype qualified name."""
    stream = TokenStream(_LEXER.tokenize(text, file), phase="transformation")
    raw: list[tuple] = []
    diags: list = []

    while not stream.at("EOF"):
        tok = stream.current
        if tok.is_kw("create"):
            stream.next()
            abstract = stream.accept_kw("abstract")
            stream.expect_kw("class")
            name_tok = stream.expect("ID")
            supers = []
            if stream.accept_kw("extends"):
                supers.append(parse_qname(stream))
                while stream.accept_kw(","):
                    supers.append(parse_qname(stream))
            stream.expect_kw("{")
            features = []
            while not stream.at_kw("}"):
                features.append(parse_feature_decl(stream))
            stream.expect_kw("}")
            raw.append(("create", name_tok.text, abstract, supers, features, name_tok.location))
        elif tok.is_kw("refer"):
            stream.next()
            stream.expect_kw("img")
            stream.expect_kw("(")
            proto = parse_qname(stream)
            stream.expect_kw(")")
            plus = stream.accept_kw("+")
            stream.expect_kw("as")
            textual = parse_qname(stream)
            stream.expect_kw(";")
            raw.append(("refer", proto, plus, textual, tok.location))
        elif tok.is_kw("skip"):
            stream.next()
            proto = parse_qname(stream)
            plus = stream.accept_kw("+")
            stream.expect_kw(";")
            raw.append(("skip", proto, plus, tok.location))
        elif tok.is_kw("make"):
            stream.next()
            stream.expect_kw("img")
            stream.expect_kw("(")
            proto = parse_qname(stream)
            stream.expect_kw(")")
            stream.expect_kw("extend")
            supers = []
            if not stream.accept_kw("nothing"):
                supers.append(parse_qname(stream))
                while stream.accept_kw(","):
                    supers.append(parse_qname(stream))
            stream.expect_kw(";")
            raw.append(("make", proto, supers, tok.location))
        else:
            stream.fail(f"expected a statement, found '{tok.text}'")

    created_names = {r[1] for r in raw if r[0] == "create"}

    def resolve_target_class(qname: str, loc) -> MetaClass | None:
        c = resolve_classifier(qname, target)
        if c is None or not c.is_class:
            diags.append(error("transformation", "name-unresolved",
                               f"unknown class {qname!r} in the target metamodel or ecore",
                               location=loc))
            return None
        return c

    def resolve_ast_ref(qname: str, loc) -> AstRef | None:
        if qname in created_names:
            return CreatedRef(qname)
        c = resolve_classifier(qname, target)
        if c is None:
            diags.append(error("transformation", "name-unresolved",
                               f"unknown name {qname!r}: not a created class, datatype or "
                               f"target class image", location=loc))
            return None
        if isinstance(c, MetaDataType):
            return DatatypeRef(c)
        return ImageRef(c, qname)

    actions: list[Action] = []
    for r in raw:
        if r[0] == "create":
            _, name, abstract, supers, features, loc = r
            super_refs = []
            for qn, qloc in supers:
                ref = resolve_ast_ref(qn, qloc)
                if isinstance(ref, DatatypeRef):
                    diags.append(error("transformation", "xf-bad-action",
                                       f"cannot extend datatype {qn!r}", location=qloc))
                elif ref is not None:
                    super_refs.append(ref)
            type_refs = []
            for fd in features:
                ref = resolve_ast_ref(fd.type_name, fd.type_loc)
                if ref is None:
                    continue
                if fd.kind == "attr" and not isinstance(ref, DatatypeRef):
                    diags.append(error("transformation", "mm-bad-type",
                                       f"attribute {fd.name!r} needs a datatype, not {fd.type_name!r}",
                                       location=fd.type_loc))
                    continue
                if fd.kind != "attr" and isinstance(ref, DatatypeRef):
                    diags.append(error("transformation", "mm-bad-type",
                                       f"reference {fd.name!r} needs a class, not {fd.type_name!r}",
                                       location=fd.type_loc))
                    continue
                if fd.default is not None:
                    diags.append(error("transformation", "syntax",
                                       "default values are not supported in create blocks",
                                       location=fd.name_loc))
                    continue
                type_refs.append(ref)
            actions.append(CreateClass(name, abstract, super_refs, features, type_refs, loc))
        elif r[0] == "refer":
            _, (pq, ploc), plus, (tq, tloc), loc = r
            proto = resolve_target_class(pq, ploc)
            textual = resolve_ast_ref(tq, tloc)
            if proto is not None and textual is not None:
                actions.append(TranslateReferences(proto, textual, plus, loc))
        elif r[0] == "skip":
            _, (pq, ploc), plus, loc = r
            proto = resolve_target_class(pq, ploc)
            if proto is not None:
                actions.append(SkipClass(proto, plus, loc))
        else:
            _, (pq, ploc), supers, loc = r
            proto = resolve_target_class(pq, ploc)
            super_refs = []
            for qn, qloc in supers:
                ref = resolve_ast_ref(qn, qloc)
                if isinstance(ref, DatatypeRef):
                    diags.append(error("transformation", "xf-bad-action",
                                       f"cannot extend datatype {qn!r}", location=qloc))
                elif ref is not None:
                    super_refs.append(ref)
            if proto is not None:
                actions.append(ChangeInheritance(ImageRef(proto, pq), super_refs, loc))

    if diags:
        raise DiagnosticError(diags)
    return Transformation(actions)


# ---------------------------------------------------------------------------
# Derivation


class _Mapping:
    def __init__(self, target: Metamodel):
        self.target = target
        self.ast = Metamodel(f"{target.name}_ast")
        self.trace = Trace()
        self.image_by_proto: dict[int, MetaClass] = {}
        self.proto_of_image: dict[int, MetaClass] = {}
        self.mapped: list[MetaClass] = []
        self.created: dict[str, MetaClass] = {}

    def proto_qname(self, proto: MetaClass) -> str:
        if any(c is proto for c in builtin_ecore().classifiers):
            return f"ecore::{proto.name}"
        return proto.name


def _mapped_domain(target: Metamodel) -> list[MetaClass]:
    """Target classes plus every builtin ecore class they reach through
    supertype or reference-type edges."""
    domain = list(target.classes())
    in_domain = {id(c) for c in domain}
    frontier = list(domain)
    while frontier:
        cls = frontier.pop()
        neighbours = list(cls.supertypes)
        neighbours += [f.type for f in cls.features if isinstance(f, MetaReference)]
        for n in neighbours:
            if isinstance(n, MetaClass) and id(n) not in in_domain:
                in_domain.add(id(n))
                domain.append(n)
                frontier.append(n)
    # keep deterministic order: target declaration order, then ecore order
    target_ids = {id(c) for c in target.classes()}
    builtin_part = [c for c in builtin_ecore().classes() if id(c) in in_domain and id(c) not in target_ids]
    return [c for c in domain if id(c) in target_ids] + builtin_part


def _default_mapping(target: Metamodel) -> _Mapping:
    m = _Mapping(target)
    m.mapped = _mapped_domain(target)
    names = {c.name for c in m.mapped}
    diags = []
    for proto in m.mapped:
        iname = image_name(proto)
        if iname in names:
            diags.append(error("transformation", "xf-name-collision",
                               f"image name {iname!r} collides with an existing class"))
    if diags:
        raise DiagnosticError(diags)

    for proto in m.mapped:
        img = MetaClass(image_name(proto), abstract=proto.abstract)
        m.image_by_proto[id(proto)] = img
        m.proto_of_image[id(img)] = proto
        m.ast.classifiers.append(img)
        m.trace.class_records.append(
            ClassRecord(m.proto_qname(proto), img.name, "mapped"))

    for proto in m.mapped:
        img = m.image_by_proto[id(proto)]
        img.supertypes = [m.image_by_proto[id(s)] for s in proto.supertypes]
        for f in proto.features:
            if isinstance(f, MetaAttribute):
                img.features.append(MetaAttribute(f.name, f.lower, f.upper,
                                                  type=f.type, default=f.default))
            else:
                img.features.append(MetaReference(f.name, f.lower, f.upper,
                                                  type=m.image_by_proto[id(f.type)],
                                                  containment=f.containment))
            m.trace.feature_records.append(FeatureRecord(
                m.proto_qname(proto), f.name, img.name, f.name, "copied"))
    return m


def default_mapping(target: Metamodel) -> tuple[Metamodel, Trace]:
    """One image class per target class: same features, attribute types
    unchanged, reference types replaced by images, bounds and containment
    flags preserved, supertypes mapped to images."""
    m = _default_mapping(target)
    return m.ast, m.trace


def derive_ast_metamodel(target: Metamodel, t: Transformation) -> tuple[Metamodel, Trace]:
    """Default mapping followed by all actions in canonical phases:
    create, change inheritance, translate, skip. Any permutation of the
    action list yields an isomorphic metamodel."""
    m = _default_mapping(target)
    diags: list = []

    creates = [a for a in t.actions if isinstance(a, CreateClass)]
    changes = [a for a in t.actions if isinstance(a, ChangeInheritance)]
    translates = [a for a in t.actions if isinstance(a, TranslateReferences)]
    skips = [a for a in t.actions if isinstance(a, SkipClass)]

    # Phase: create classes (shells first so created classes can reference
    # each other in any order).
    existing = {c.name for c in m.ast.classifiers}
    for a in creates:
        if a.name in existing or a.name in m.created:
            diags.append(error("transformation", "xf-name-collision",
                               f"created class {a.name!r} collides with an existing AST class",
                               location=a.loc))
            continue
        cls = MetaClass(a.name, abstract=a.abstract)
        m.created[a.name] = cls
        m.ast.classifiers.append(cls)
        m.trace.created.append(a.name)
    if diags:
        raise DiagnosticError(diags)

    def resolve_ref(ref: AstRef, loc) -> Classifier | None:
        if isinstance(ref, CreatedRef):
            cls = m.created.get(ref.name)
            if cls is None:
                diags.append(error("transformation", "name-unresolved",
                                   f"created class {ref.name!r} does not exist", location=loc))
            return cls
        if isinstance(ref, DatatypeRef):
            return ref.datatype
        img = m.image_by_proto.get(id(ref.prototype))
        if img is None:
            diags.append(error("transformation", "xf-bad-action",
                               f"class {ref.written!r} has no image in the AST metamodel",
                               location=loc))
        return img

    for a in creates:
        cls = m.created[a.name]
        for ref in a.superclasses:
            sup = resolve_ref(ref, a.loc)
            if isinstance(sup, MetaClass):
                cls.supertypes.append(sup)
        for fd, ref in zip(a.features, a.feature_types):
            ftype = resolve_ref(ref, fd.type_loc)
            if ftype is None:
                continue
            if fd.kind == "attr":
                cls.features.append(MetaAttribute(fd.name, fd.lower, fd.upper, type=ftype))
            else:
                cls.features.append(MetaReference(fd.name, fd.lower, fd.upper, type=ftype,
                                                  containment=(fd.kind == "val")))

    # Phase: change inheritance. No trace effect. Two actions setting
    # different superclass lists for one class would be order-dependent,
    # so that is an error (idempotent repeats are fine).
    ci_decisions: dict[int, tuple[MetaClass, list[MetaClass]]] = {}
    for a in changes:
        cls = resolve_ref(a.target, a.loc)
        if not isinstance(cls, MetaClass):
            continue
        new_supers = []
        for ref in a.superclasses:
            sup = resolve_ref(ref, a.loc)
            if isinstance(sup, MetaClass):
                new_supers.append(sup)
        prev = ci_decisions.get(id(cls))
        if prev is not None and [id(s) for s in prev[1]] != [id(s) for s in new_supers]:
            diags.append(error("transformation", "xf-bad-action",
                               f"two actions set different superclass lists for {cls.name!r}",
                               location=a.loc))
            continue
        ci_decisions[id(cls)] = (cls, new_supers)
    for cls, new_supers in ci_decisions.values():
        cls.supertypes = new_supers
    for cls, _supers in ci_decisions.values():
        # check after every rewiring: intermediate states are not meaningful
        # when action order is undefined
        if cls in cls.all_supertypes():
            diags.append(error("transformation", "mm-inheritance-cycle",
                               f"changing inheritance of {cls.name!r} creates a cycle"))

    # Phase: translate references. Decisions are collected against the
    # pre-translation feature types so action order cannot matter, then
    # applied in one sweep; two different textual types for one feature is
    # an error.
    decisions: dict[tuple[int, str], tuple[Classifier, TranslateReferences]] = {}
    for a in translates:
        textual = resolve_ref(a.textual_reference_type, a.loc)
        if textual is None:
            continue
        if id(a.model_reference_type) not in m.image_by_proto:
            diags.append(error("transformation", "xf-bad-action",
                               f"class {a.model_reference_type.name!r} has no image; nothing to "
                               f"translate", location=a.loc))
            continue
        covered = {id(m.image_by_proto[id(p)])
                   for p in m.mapped
                   if (p is a.model_reference_type
                       or (a.include_descendants and is_subtype(p, a.model_reference_type)))}
        for cls in m.ast.classes():
            for f in cls.features:
                if isinstance(f, MetaReference) and not f.containment and id(f.type) in covered:
                    key = (id(cls), f.name)
                    prev = decisions.get(key)
                    if prev is not None and prev[0] is not textual:
                        diags.append(error(
                            "transformation", "xf-translate-conflict",
                            f"{cls.name}.{f.name} is translated to both "
                            f"{prev[0].name!r} and {textual.name!r}", location=a.loc))
                        continue
                    decisions[key] = (textual, a)

    by_id = {id(c): c for c in m.ast.classes()}
    for (cls_id, fname), (textual, _a) in decisions.items():
        cls = by_id[cls_id]
        for i, f in enumerate(cls.features):
            if f.name != fname:
                continue
            if isinstance(textual, MetaDataType):
                cls.features[i] = MetaAttribute(f.name, f.lower, f.upper, type=textual)
            else:
                cls.features[i] = MetaReference(f.name, f.lower, f.upper,
                                                type=textual, containment=True)
        proto = m.proto_of_image.get(cls_id)
        if proto is not None:
            for r in m.trace.feature_records:
                if r.image_class == cls.name and r.image_feature == fname:
                    r.mode = "translated"
                    r.textual = textual.name

    # Phase: skip classes. Gather the whole removal set first, then check
    # the survivors once.
    removed: dict[int, MetaClass] = {}
    for a in skips:
        img = m.image_by_proto.get(id(a.target))
        if img is None:
            diags.append(error("transformation", "xf-bad-action",
                               f"class {a.target.name!r} has no image to skip", location=a.loc))
            continue
        protos = [p for p in m.mapped
                  if p is a.target or (a.include_descendants and is_subtype(p, a.target))]
        for p in protos:
            removed[id(m.image_by_proto[id(p)])] = m.image_by_proto[id(p)]

    if removed:
        removed_names = {c.name for c in removed.values()}
        m.ast.classifiers = [c for c in m.ast.classifiers if id(c) not in removed]
        for r in m.trace.class_records:
            if r.image in removed_names:
                r.status = "skipped"
        m.trace.feature_records = [r for r in m.trace.feature_records
                                   if r.image_class not in removed_names]
        for cls in m.ast.classes():
            for s in cls.supertypes:
                if id(s) in removed:
                    diags.append(error("transformation", "xf-removed-supertype",
                                       f"skipped image {s.name!r} is a supertype of surviving "
                                       f"class {cls.name!r}; rewire with 'make ... extend' first"))
            for f in cls.features:
                if isinstance(f, MetaReference) and id(f.type) in removed:
                    how = ("cross reference; translate it before skipping"
                           if not f.containment else "containment reference")
                    diags.append(error("transformation", "xf-dangling-type",
                                       f"{cls.name}.{f.name} is typed by skipped image "
                                       f"{f.type.name!r} ({how})"))

    if diags:
        raise DiagnosticError(diags)

    for d in validate_metamodel(m.ast):
        diags.append(error("transformation", d.code, d.message))
    if diags:
        raise DiagnosticError(diags)
    return m.ast, m.trace


def action_permutation_check(target: Metamodel, t: Transformation,
                             max_permutations: int = 24, rng: random.Random | None = None) -> bool:
    """True iff derivation over (sampled) permutations of the action list is
    isomorphic to the canonical derivation."""
    from .meta import metamodel_isomorphic

    base, _ = derive_ast_metamodel(target, t)
    n = len(t.actions)
    total = 1
    for k in range(2, n + 1):
        total *= k
    if total <= max_permutations:
        perms = itertools.permutations(t.actions)
    else:
        rng = rng or random.Random(0)
        perms = [rng.sample(t.actions, n) for _ in range(max_permutations)]
    for perm in perms:
        ast, _ = derive_ast_metamodel(target, Transformation(list(perm)))
        if not metamodel_isomorphic(base, ast):
            return False
    return True


# ---------------------------------------------------------------------------
# Reifying a parsed transformation as a model of the language's own target
# metamodel, so the direct parse can be compared with the text-to-model
# pipeline under model equality.


def transformation_to_model(t: Transformation, xf_mm: Metamodel, ast_mm: Metamodel) -> Model:
    """Express a Transformation as a Model over the transformation language's
    target metamodel ``xf_mm``. Classifier-valued fields become classifier
    stand-in objects; AST-side references resolve against ``ast_mm``."""

    def cls(name: str) -> MetaClass:
        c = xf_mm.classifier(name)
        if not isinstance(c, MetaClass):
            raise DiagnosticError([error("transformation", "plan-stale",
                                         f"metamodel {xf_mm.name!r} has no class {name!r}")])
        return c

    def ast_classifier(ref: AstRef) -> Classifier:
        if isinstance(ref, DatatypeRef):
            return ref.datatype
        name = ast_ref_name(ref)
        c = ast_mm.classifier(name)
        if c is None:
            raise DiagnosticError([error("transformation", "name-unresolved",
                                         f"AST metamodel has no classifier {name!r}")])
        return c

    def upper_int(upper) -> int:
        return -1 if upper is UNBOUNDED else upper

    root = ModelObject(cls("Transformation"))
    for a in t.actions:
        if isinstance(a, CreateClass):
            obj = ModelObject(cls("CreateClass"))
            obj.set("name", a.name)
            obj.set("abstract", a.abstract)
            obj.set("superclasses", [classifier_object(ast_classifier(r))
                                     for r in a.superclasses])
            feats = []
            for fd, ref in zip(a.features, a.feature_types):
                fobj = ModelObject(cls("Attribute" if fd.kind == "attr" else "Reference"))
                fobj.set("name", fd.name)
                fobj.set("lowerBound", fd.lower)
                fobj.set("upperBound", upper_int(fd.upper))
                fobj.set("type", classifier_object(ast_classifier(ref)))
                if fd.kind != "attr":
                    fobj.set("containment", fd.kind == "val")
                feats.append(fobj)
            obj.set("structuralFeatures", feats)
        elif isinstance(a, TranslateReferences):
            obj = ModelObject(cls("TranslateReferences"))
            obj.set("modelReferenceType", classifier_object(a.model_reference_type))
            obj.set("textualReferenceType", classifier_object(ast_classifier(a.textual_reference_type)))
            obj.set("includeDescendants", a.include_descendants)
        elif isinstance(a, ChangeInheritance):
            obj = ModelObject(cls("ChangeInheritance"))
            obj.set("target", classifier_object(ast_classifier(a.target)))
            obj.set("superclasses", [classifier_object(ast_classifier(r))
                                     for r in a.superclasses])
        else:
            obj = ModelObject(cls("SkipClass"))
            obj.set("target", classifier_object(a.target))
            obj.set("includeDescendants", a.include_descendants)
        root.add("actions", obj)
    return Model(root, xf_mm)
