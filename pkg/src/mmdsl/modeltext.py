"""Canonical `.model` dump format: deterministic, diffable, loadable.

Objects appear depth-first in containment order as ``ClassName #<id> {``
blocks with 2-space indentation. Attribute lines are ``name = <literal>``
(strings double-quoted with backslash escapes, booleans ``true``/``false``,
ints decimal; multi-valued attributes as a comma-separated ``[...]`` list).
Multi-valued containments open a ``[`` block of nested objects; a singleton
containment inlines its one object. Cross references are ``name = -> #<id>``
(forward references permitted) or, for classifier stand-ins, the classifier's
``package::Name`` qualified name. Features print in declaration order,
inherited first; unset and empty slots are omitted.
"""

from __future__ import annotations

from .diagnostics import DiagnosticError, error
from .lexer import Lexer, TokenStream, escape_string
from .meta import (
    Metamodel, MetaReference, Model, ModelObject, builtin_ecore,
    classifier_object, classifier_qname, find_classifier_home, iter_tree,
)

_LEXER = Lexer(
    reserved={"true", "false"},
    symbols={"{", "}", "[", "]", "=", ",", "->", "#", "::", "-"},
)


def dump_model(m: Model) -> str:
    ids: dict[int, int] = {}
    for n, obj in enumerate(iter_tree(m.root), start=1):
        ids[id(obj)] = n
        obj.id = n
    known = [m.metamodel, builtin_ecore()]

    out: list[str] = []

    def literal(v) -> str:
        if isinstance(v, bool):
            return "true" if v else "false"
        if isinstance(v, int):
            return str(v)
        return escape_string(v)

    def cross(v: ModelObject) -> str:
        if v.represents is not None:
            home = find_classifier_home(v.represents, known)
            return "-> " + classifier_qname(v.represents, home)
        if id(v) not in ids:
            raise DiagnosticError([error(
                "validate", "model-dangling",
                f"cross reference to an object outside the model ({v.cls.name})", path="/")])
        return f"-> #{ids[id(v)]}"

    def emit(obj: ModelObject, indent: int, prefix: str = ""):
        pad = "  " * indent
        out.append(f"{pad}{prefix}{obj.cls.name} #{ids[id(obj)]} {{")
        for f in obj.cls.all_features():
            if not obj.is_set(f.name):
                continue
            vals = obj.values(f.name)
            if not vals:
                continue
            inner = "  " * (indent + 1)
            if f.is_attribute:
                if f.many:
                    out.append(f"{inner}{f.name} = [{', '.join(literal(v) for v in vals)}]")
                else:
                    out.append(f"{inner}{f.name} = {literal(vals[0])}")
            elif isinstance(f, MetaReference) and f.containment:
                if f.many:
                    out.append(f"{inner}{f.name} = [")
                    for child in vals:
                        emit(child, indent + 2)
                    out.append(f"{inner}]")
                else:
                    emit(vals[0], indent + 1, prefix=f"{f.name} = ")
            else:
                if f.many:
                    out.append(f"{inner}{f.name} = [{', '.join(cross(v) for v in vals)}]")
                else:
                    out.append(f"{inner}{f.name} = {cross(vals[0])}")
        out.append(f"{pad}}}")

    emit(m.root, 0)
    return "\n".join(out) + "\n"


def load_model(text: str, mm: Metamodel, extra_metamodels=(), file: str = "<model>") -> Model:
    """Parse a dump back into a Model. Classifier stand-in references may
    name classifiers of ``mm``, builtin ecore, or any of ``extra_metamodels``."""
    stream = TokenStream(_LEXER.tokenize(text, file))
    packages = [mm, *extra_metamodels, builtin_ecore()]
    by_id: dict[int, ModelObject] = {}
    patches: list[tuple[ModelObject, str, int, int, object]] = []  # obj, feat, index, ref-id, loc

    def resolve_class(name: str, loc):
        for pkg in packages:
            c = pkg.classifier(name)
            if c is not None and c.is_class:
                return c
        raise DiagnosticError([error("parse", "model-unknown-class",
                                     f"unknown class name {name!r}", location=loc)])

    def resolve_qname(qname: str, loc):
        if "::" in qname:
            pkg_name, simple = qname.split("::", 1)
            for pkg in packages:
                if pkg.name == pkg_name:
                    c = pkg.classifier(simple)
                    if c is not None:
                        return c
        else:
            for pkg in packages:
                c = pkg.classifier(qname)
                if c is not None:
                    return c
        raise DiagnosticError([error("parse", "name-unresolved",
                                     f"unknown classifier reference {qname!r}", location=loc)])

    def parse_literal():
        tok = stream.current
        if tok.kind == "STRING":
            stream.next()
            return tok.value
        if tok.kind == "INT":
            stream.next()
            return tok.value
        if tok.is_kw("-"):
            stream.next()
            return -stream.expect("INT").value
        if tok.is_kw("true"):
            stream.next()
            return True
        if tok.is_kw("false"):
            stream.next()
            return False
        stream.fail("expected a literal value")

    def parse_object() -> ModelObject:
        name_tok = stream.expect("ID")
        cls = resolve_class(name_tok.text, name_tok.location)
        stream.expect_kw("#")
        oid = stream.expect("INT").value
        obj = ModelObject(cls)
        obj.id = oid
        if oid in by_id:
            stream.fail(f"duplicate object id #{oid}", token=name_tok)
        by_id[oid] = obj
        stream.expect_kw("{")
        while not stream.at_kw("}"):
            parse_field(obj)
        stream.expect_kw("}")
        return obj

    def parse_cross_target(obj, fname, index):
        loc = stream.expect_kw("->").location
        if stream.at_kw("#"):
            stream.next()
            ref = stream.expect("INT").value
            patches.append((obj, fname, index, ref, loc))
            return None
        seg_tok = stream.expect("ID")
        qname = seg_tok.text
        while stream.at_kw("::"):
            stream.next()
            qname += "::" + stream.expect("ID").text
        return classifier_object(resolve_qname(qname, seg_tok.location))

    def parse_field(obj: ModelObject):
        fname_tok = stream.next()
        if fname_tok.kind not in ("ID",):
            stream.fail(f"expected a feature name, found '{fname_tok.text}'", token=fname_tok)
        fname = fname_tok.text
        feat = obj.cls.find_feature(fname)
        if feat is None:
            raise DiagnosticError([error("parse", "model-unknown-feature",
                                         f"class {obj.cls.name} has no feature {fname!r}",
                                         location=fname_tok.location)])
        stream.expect_kw("=")
        if stream.at_kw("["):
            stream.next()
            items: list = []
            while not stream.at_kw("]"):
                if stream.at("ID") and stream.peek().is_kw("#"):
                    items.append(parse_object())
                elif stream.at_kw("->"):
                    target = parse_cross_target(obj, fname, len(items))
                    items.append(target)  # None placeholders patched later
                else:
                    items.append(parse_literal())
                stream.accept_kw(",")
            stream.expect_kw("]")
            obj.slots[fname] = items if feat.many else (items[0] if items else None)
        elif stream.at_kw("->"):
            target = parse_cross_target(obj, fname, 0)
            if feat.many:
                obj.slots[fname] = [target]
            elif target is not None:
                obj.set(fname, target)
        elif stream.at("ID") and stream.peek().is_kw("#"):
            child = parse_object()
            obj.add(fname, child) if feat.many else obj.set(fname, child)
        else:
            value = parse_literal()
            obj.add(fname, value) if feat.many else obj.set(fname, value)

    root = parse_object()
    stream.expect_eof()

    for obj, fname, index, ref, loc in patches:
        target = by_id.get(ref)
        if target is None:
            raise DiagnosticError([error("parse", "model-dangling",
                                         f"reference to unknown object #{ref}", location=loc)])
        feat = obj.cls.find_feature(fname)
        if feat.many:
            obj.slots[fname][index] = target
        else:
            obj.slots[fname] = target

    return Model(root, mm)
