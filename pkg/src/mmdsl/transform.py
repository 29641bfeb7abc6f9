"""Trace-driven AST-to-model transformation and its reverse.

build_plan turns a derivation trace plus the two metamodels into a
TransformPlan: per image class, the prototype to instantiate and one
instruction per feature (copy-attribute, map-containment, or resolve-cross
with the recorded textual type). transform_ast_to_model runs the plan in
two passes: pass one creates prototype instances bottom-up, copying
attributes and containment; pass two feeds every textual reference payload
to a resolver callback that returns the target object (or defers once, or
reports the name unresolved). Created (syntax-only) classes produce nothing
themselves: their instances are either consumed as reference payloads or,
for structures like rule blocks, handed to a placement callback that
decides which manually constructed container receives their children.

Resolvers are registered at runtime in a ResolverRegistry; the builtin
qualified-name resolver (namespace_registry) is configured from a small
key-value file and covers both shipped examples without user code. A
registry is immutable once built and produces a fresh seeded Namespace per
run, so distinct runs may execute concurrently.

transform_model_to_ast walks the opposite direction: prototype instances
yield image instances, and cross references are serialized back into
textual payloads by naming callbacks.
"""

from __future__ import annotations

from dataclasses import dataclass

from .diagnostics import Diagnostic, DiagnosticError, error
from .meta import (
    Classifier, MetaAttribute, MetaClass, MetaDataType, Metamodel, Model,
    ModelObject, builtin_ecore, classifier_object, find_classifier_home,
    is_subtype, object_path, resolve_classifier, validate_model,
)
from .xf import Trace

DEFER = object()  # resolver result: retry after every object exists


# ---------------------------------------------------------------------------
# Plan


@dataclass
class Instruction:
    kind: str  # copy | containment | cross
    image_feature: object
    target_feature: object
    textual: Classifier | None = None


class TransformPlan:
    def __init__(self, target: Metamodel, ast: Metamodel):
        self.target = target
        self.ast = ast
        self.proto_for_image: dict[str, MetaClass] = {}
        self.image_for_proto: dict[str, MetaClass] = {}
        self.by_feature: dict[int, Instruction] = {}  # id(image feature) -> instruction
        self.consume_only: set[str] = set()
        self.skipped: set[str] = set()

    def is_mapped(self, cls: MetaClass) -> bool:
        return cls.name in self.proto_for_image

    def is_consume_only(self, cls: MetaClass) -> bool:
        return cls.name in self.consume_only

    def instructions_for(self, cls: MetaClass) -> list[Instruction]:
        out = []
        for f in cls.all_features():
            instr = self.by_feature.get(id(f))
            if instr is not None:  # features inherited from created classes have none
                out.append(instr)
        return out


def build_plan(trace: Trace, target: Metamodel, ast: Metamodel) -> TransformPlan:
    """Resolve a trace against the metamodels it was derived from. A trace
    that does not line up with them (stale files) is an error, as is a
    copied cross reference, which no instruction kind can execute."""
    plan = TransformPlan(target, ast)
    diags: list[Diagnostic] = []

    def stale(msg):
        diags.append(error("transformation", "plan-stale", msg))

    records = {}
    for r in trace.feature_records:
        records[(r.image_class, r.image_feature)] = r

    for r in trace.class_records:
        proto = resolve_classifier(r.proto, target)
        if not isinstance(proto, MetaClass):
            stale(f"trace names unknown target class {r.proto!r}")
            continue
        if r.status == "skipped":
            plan.skipped.add(proto.name)
            continue
        image = ast.classifier(r.image)
        if not isinstance(image, MetaClass):
            stale(f"trace names unknown AST class {r.image!r}")
            continue
        plan.proto_for_image[image.name] = proto
        plan.image_for_proto[proto.name] = image
        for f in image.features:
            rec = records.pop((image.name, f.name), None)
            if rec is None:
                stale(f"trace has no record for feature {image.name}.{f.name}")
                continue
            pf = proto.find_feature(rec.proto_feature)
            if pf is None:
                stale(f"trace names unknown target feature {proto.name}.{rec.proto_feature}")
                continue
            if rec.mode == "copied":
                if isinstance(f, MetaAttribute):
                    plan.by_feature[id(f)] = Instruction("copy", f, pf)
                elif f.containment:
                    plan.by_feature[id(f)] = Instruction("containment", f, pf)
                else:
                    diags.append(error("transformation", "plan-untranslated",
                                       f"{image.name}.{f.name} is a cross reference that was "
                                       f"never translated"))
            else:
                textual = ast.classifier(rec.textual)
                if textual is None:
                    textual = builtin_ecore().classifier(rec.textual)
                if textual is None:
                    stale(f"trace names unknown textual type {rec.textual!r}")
                    continue
                plan.by_feature[id(f)] = Instruction("cross", f, pf, textual)

    for (icls, fname) in records:
        stale(f"trace records feature {icls}.{fname}, which the AST metamodel lacks")

    for name in trace.created:
        if ast.classifier(name) is None:
            stale(f"created class {name!r} is missing from the AST metamodel")
        plan.consume_only.add(name)

    if diags:
        raise DiagnosticError(diags)
    return plan


# ---------------------------------------------------------------------------
# Hierarchical namespace with forward-declaration stubs


@dataclass
class Stub:
    scope: "Scope"
    segments: tuple[str, ...]
    target: object = None

    @property
    def resolved(self) -> bool:
        return self.target is not None


class Scope:
    def __init__(self, name: str, parent: "Scope | None" = None):
        self.name = name
        self.parent = parent
        self.bindings: dict[str, object] = {}
        self.children: dict[str, "Scope"] = {}

    def child(self, name: str) -> "Scope":
        if name not in self.children:
            self.children[name] = Scope(name, self)
        return self.children[name]

    def path(self) -> str:
        if self.parent is None:
            return ""
        prefix = self.parent.path()
        return f"{prefix}::{self.name}" if prefix else self.name


class Namespace:
    """Scope tree with qualified-name resolution: simple names search the
    context scope then enclosing scopes outward; qualified names resolve
    segment by segment from the innermost scope where the first segment
    binds. Resolving before defining can leave a stub that a later define
    fills; finalize reports the stubs that never resolved."""

    def __init__(self):
        self.root = Scope("")
        self.pending: list[Stub] = []
        self.diagnostics: list[Diagnostic] = []

    def scope(self, path) -> Scope:
        scope = self.root
        for seg in path:
            scope = scope.child(seg)
        return scope

    def define(self, scope_path, name: str, obj, tolerate_duplicates: bool = False) -> bool:
        scope = self.scope(scope_path)
        if name in scope.bindings:
            if not tolerate_duplicates and scope.bindings[name] is not obj:
                self.diagnostics.append(error(
                    "resolve", "name-duplicate",
                    f"{name!r} is already defined in scope '{scope.path() or '<root>'}'"))
            return False
        scope.bindings[name] = obj
        for stub in self.pending:
            if not stub.resolved:
                found = self._lookup(stub.scope, stub.segments)
                if found is not None:
                    stub.target = found
        return True

    def _lookup(self, context: Scope, segments) -> object | None:
        scope = context
        while scope is not None:
            if segments[0] in scope.bindings or segments[0] in scope.children:
                break
            scope = scope.parent
        if scope is None:
            return None
        for seg in segments[:-1]:
            nxt = scope.children.get(seg)
            if nxt is None:
                return None
            scope = nxt
        return scope.bindings.get(segments[-1])

    def resolve(self, context: Scope | None, segments, stub_if_missing: bool = False):
        context = context or self.root
        segments = tuple(segments)
        if not segments:
            return None
        found = self._lookup(context, segments)
        if found is not None:
            return found
        if stub_if_missing:
            stub = Stub(context, segments)
            self.pending.append(stub)
            return stub
        return None

    def finalize(self) -> list[Diagnostic]:
        diags = list(self.diagnostics)
        for stub in self.pending:
            if not stub.resolved:
                found = self._lookup(stub.scope, stub.segments)
                if found is not None:
                    stub.target = found
                    continue
                diags.append(error("resolve", "name-unresolved",
                                   f"forward reference '{'::'.join(stub.segments)}' was never "
                                   f"defined"))
        return diags


# ---------------------------------------------------------------------------
# Resolution context and registry


@dataclass
class ResolutionContext:
    ast_object: ModelObject
    ast_ancestors: tuple[ModelObject, ...]  # innermost first, up to the AST root
    target_object: ModelObject
    target_feature: object
    target_root: ModelObject
    payload: object  # string or consumed created-class subtree
    textual: Classifier | None
    namespace: Namespace
    scope: Scope

    def segments(self) -> list[str]:
        return flatten_payload(self.payload)


def flatten_payload(payload) -> list[str]:
    """Qualified-name segments of a textual reference payload: strings split
    on '::'; created-class trees flatten head-first (string attributes, then
    the nested tail)."""
    if payload is None:
        return []
    if isinstance(payload, str):
        return [s for s in payload.split("::") if s]
    segs: list[str] = []
    obj = payload
    while isinstance(obj, ModelObject):
        tail = None
        for f in obj.cls.all_features():
            if f.is_attribute and f.type.kind == "string" and not f.many and obj.is_set(f.name):
                segs.append(obj.get(f.name))
            elif (not f.is_attribute and f.containment and not f.many
                  and obj.is_set(f.name)):
                tail = obj.get(f.name)
        obj = tail
    return segs


def build_payload_tree(cls: MetaClass, segments) -> ModelObject:
    """Inverse of flatten_payload for a qualified-name-shaped created class:
    one single-valued string attribute plus one self-typed containment."""
    head = next((f for f in cls.all_features()
                 if f.is_attribute and f.type.kind == "string" and not f.many), None)
    tail = next((f for f in cls.all_features()
                 if not f.is_attribute and f.containment and not f.many
                 and is_subtype(cls, f.type)), None)
    if head is None or (len(segments) > 1 and tail is None):
        raise DiagnosticError([error("resolve", "reverse-unsupported",
                                     f"class {cls.name!r} cannot carry a qualified name")])
    obj = ModelObject(cls)
    obj.set(head.name, segments[0])
    if len(segments) > 1:
        obj.set(tail.name, build_payload_tree(cls, segments[1:]))
    return obj


class ResolverRegistry:
    """Resolution behaviour for one language: resolver callbacks per
    translated feature plus a default, placement callbacks for consume-only
    classes, an optional root constructor for skipped roots, and the
    namespace seeding recipe. Immutable once built; make_namespace() hands
    each run its own scope tree."""

    def __init__(self, name_attribute: str = "name"):
        self.name_attribute = name_attribute
        self.resolvers: dict[tuple[str, str], object] = {}
        self.default_resolver = default_namespace_resolver
        self.placers: dict[str, object] = {}
        self.root_constructor = None
        self.scope_classes: set[str] = set()
        self._seed_metamodels: list[tuple[str, Metamodel]] = []
        self.namers: dict[tuple[str, str], object] = {}
        self.default_namer = None

    def on(self, image_class: str, feature: str, resolver) -> "ResolverRegistry":
        self.resolvers[(image_class, feature)] = resolver
        return self

    def place(self, created_class: str, placer) -> "ResolverRegistry":
        self.placers[created_class] = placer
        return self

    def seed(self, kind: str, mm: Metamodel) -> "ResolverRegistry":
        self._seed_metamodels.append((kind, mm))
        return self

    def resolver_for(self, owner: MetaClass, feature_name: str):
        r = self.resolvers.get((owner.name, feature_name))
        if r is not None:
            return r
        for sup in owner.all_supertypes():
            r = self.resolvers.get((sup.name, feature_name))
            if r is not None:
                return r
        return self.default_resolver

    def namer_for(self, owner: MetaClass, feature_name: str):
        n = self.namers.get((owner.name, feature_name))
        if n is not None:
            return n
        return self.default_namer or default_namer

    def make_namespace(self) -> Namespace:
        ns = Namespace()
        for kind, mm in self._seed_metamodels:
            if kind == "ecore":
                for c in mm.classifiers:
                    obj = classifier_object(c)
                    ns.define([], c.name, obj, tolerate_duplicates=True)
                    ns.define(["ecore"], c.name, obj, tolerate_duplicates=True)
            else:
                for c in mm.classifiers:
                    ns.define([], c.name, classifier_object(c), tolerate_duplicates=True)
        return ns


def default_namespace_resolver(ctx: ResolutionContext):
    segs = ctx.segments()
    if not segs:
        return None
    return ctx.namespace.resolve(ctx.scope, segs)


def default_namer(obj: ModelObject, registry: ResolverRegistry, model: Model) -> list[str] | None:
    """Textual reference for a target object: classifier stand-ins become
    their (ecore-qualified) names; model objects contribute their name
    attribute prefixed by the names of their scope-opening ancestors."""
    if obj.represents is not None:
        home = find_classifier_home(obj.represents, [builtin_ecore()])
        if home is not None:
            return ["ecore", obj.represents.name]
        return [obj.represents.name]
    attr = registry.name_attribute
    feat = obj.cls.find_feature(attr)
    if feat is None or not obj.is_set(attr):
        return None
    segs = [obj.get(attr)]
    container = _container_of(model.root, obj)
    while container is not None:
        if container.cls.name in registry.scope_classes and container.is_set(attr):
            segs.insert(0, container.get(attr))
        container = _container_of(model.root, container)
    return segs


def _container_of(root: ModelObject, target: ModelObject) -> ModelObject | None:
    def walk(obj):
        for f in obj.cls.all_features():
            if not f.is_attribute and f.containment:
                for child in obj.values(f.name):
                    if child is target:
                        return obj
                    found = walk(child)
                    if found is not None:
                        return found
        return None

    return walk(root) if target is not root else None


# ---------------------------------------------------------------------------
# Forward: AST model -> target model


@dataclass
class _CrossJob:
    ast_object: ModelObject
    ancestors: tuple
    target_object: ModelObject
    instr: Instruction
    payload: object
    buffer: list
    index: int


def transform_ast_to_model(ast_model: Model, plan: TransformPlan,
                           registry: ResolverRegistry) -> tuple[Model, list[Diagnostic]]:
    diags: list[Diagnostic] = []
    ns = registry.make_namespace()
    jobs: list[_CrossJob] = []
    buffers: list[tuple[ModelObject, str, list]] = []

    def build(ast_obj: ModelObject, ancestors: tuple) -> ModelObject:
        proto = plan.proto_for_image[ast_obj.cls.name]
        tobj = ModelObject(proto)
        chain = (ast_obj,) + ancestors
        for instr in plan.instructions_for(ast_obj.cls):
            name = instr.image_feature.name
            tname = instr.target_feature.name
            if instr.kind == "copy":
                v = ast_obj.get(name)
                if v is None or (instr.image_feature.many and not v):
                    continue
                tobj.set(tname, list(v) if instr.image_feature.many else v)
            elif instr.kind == "containment":
                children = [build(c, chain) for c in ast_obj.values(name)]
                if children:
                    tobj.set(tname, children if instr.target_feature.many
                             else children[0])
            else:
                payloads = ast_obj.values(name)
                if not payloads:
                    continue
                buffer = [None] * len(payloads)
                buffers.append((tobj, tname, buffer))
                for i, p in enumerate(payloads):
                    jobs.append(_CrossJob(ast_obj, chain, tobj, instr, p, buffer, i))
        return tobj

    # Root: a mapped root transforms to the target root; a consume-only root
    # (compilation unit) passes the torch to its single mapped subtree, or to
    # the configured root constructor when it has none.
    root = ast_model.root
    root_candidate: ModelObject | None = None
    consume_queue: list[tuple[ModelObject, tuple]] = []
    if plan.is_mapped(root.cls):
        troot = build(root, ())
    elif plan.is_consume_only(root.cls):
        mapped_children = []
        for f in root.cls.all_features():
            if not f.is_attribute and f.containment:
                mapped_children += [c for c in root.values(f.name) if plan.is_mapped(c.cls)]
        if len(mapped_children) == 1:
            root_candidate = mapped_children[0]
            troot = build(root_candidate, (root,))
        elif not mapped_children and registry.root_constructor is not None:
            troot = registry.root_constructor()
        else:
            raise DiagnosticError([error(
                "resolve", "resolve-root",
                f"consume-only root {root.cls.name!r} has {len(mapped_children)} mapped "
                f"subtree(s) and no root constructor covers this case")])
        consume_queue.append((root, ()))
    else:
        raise DiagnosticError([error("resolve", "resolve-root",
                                     f"AST root class {root.cls.name!r} is not in the plan")])

    # Remaining consume-only structure: place mapped children via placers.
    while consume_queue:
        ast_obj, ancestors = consume_queue.pop(0)
        chain = (ast_obj,) + ancestors
        placer = registry.placers.get(ast_obj.cls.name)
        placement = None  # computed lazily, once per consume-only object
        for f in ast_obj.cls.all_features():
            if f.is_attribute or not f.containment:
                continue
            for child in ast_obj.values(f.name):
                if child is root_candidate:
                    continue  # already transformed as the root
                if plan.is_consume_only(child.cls):
                    consume_queue.append((child, chain))
                elif plan.is_mapped(child.cls):
                    if placer is None:
                        diags.append(error(
                            "resolve", "resolve-no-rule",
                            f"no placement for {child.cls.name} objects under consume-only "
                            f"{ast_obj.cls.name}", path="/"))
                        continue
                    if placement is None:
                        placement = placer(_PlacementContext(
                            ast_obj, chain, troot, ns, registry, diags)) or False
                    if placement is False:
                        continue  # the placer reported why
                    container, feature_name = placement
                    container.add(feature_name, build(child, chain))

    # Bind named target objects so resolvers can look them up; scope classes
    # open nested scopes for their subtrees.
    scopes: dict[int, Scope] = {}

    def bind(obj: ModelObject, scope: Scope):
        scopes[id(obj)] = scope
        attr = registry.name_attribute
        inner = scope
        feat = obj.cls.find_feature(attr)
        if feat is not None and feat.is_attribute and obj.is_set(attr):
            ns.define(_scope_path(scope), obj.get(attr), obj, tolerate_duplicates=True)
            if obj.cls.name in registry.scope_classes:
                inner = scope.child(obj.get(attr))
        for f in obj.cls.all_features():
            if not f.is_attribute and f.containment:
                for child in obj.values(f.name):
                    bind(child, inner)

    bind(troot, ns.root)

    def run_job(job: _CrossJob):
        owner_scope = scopes.get(id(job.target_object), ns.root)
        ctx = ResolutionContext(
            ast_object=job.ast_object, ast_ancestors=job.ancestors,
            target_object=job.target_object, target_feature=job.instr.target_feature,
            target_root=troot, payload=job.payload, textual=job.instr.textual,
            namespace=ns, scope=owner_scope)
        resolver = registry.resolver_for(job.ast_object.cls, job.instr.image_feature.name)
        result = resolver(ctx)
        if result is DEFER:
            return DEFER
        if isinstance(result, Stub):
            return DEFER if not result.resolved else result.target
        return result

    deferred: list[_CrossJob] = []
    for job in jobs:
        result = run_job(job)
        if result is DEFER:
            deferred.append(job)
        else:
            _settle(job, result, troot, diags)
    for job in deferred:  # one retry once every object exists
        result = run_job(job)
        _settle(job, None if result is DEFER else result, troot, diags)

    for tobj, fname, buffer in buffers:
        values = [v for v in buffer if v is not None]
        feat = tobj.cls.find_feature(fname)
        if values:
            tobj.set(fname, values if feat.many else values[0])

    diags.extend(ns.finalize())
    model = Model(troot, plan.target)
    if not any(d.severity == "error" for d in diags):
        diags.extend(validate_model(model))
    return model, diags


def _settle(job: _CrossJob, result, troot, diags):
    if result is None:
        name = "::".join(flatten_payload(job.payload)) or "<empty>"
        diags.append(error("resolve", "resolve-unresolved",
                           f"unresolved reference '{name}' in "
                           f"{job.target_object.cls.name}.{job.instr.target_feature.name}",
                           path=object_path(troot, job.target_object) or "/"))
        return
    if not isinstance(result, ModelObject) or not is_subtype(
            result.cls, job.instr.target_feature.type):
        got = result.cls.name if isinstance(result, ModelObject) else type(result).__name__
        diags.append(error("resolve", "resolve-type",
                           f"resolved object of class {got} does not conform to "
                           f"{job.instr.target_feature.type.name}",
                           path=object_path(troot, job.target_object) or "/"))
        return
    job.buffer[job.index] = result


@dataclass
class _PlacementContext:
    ast_object: ModelObject
    ancestors: tuple
    target_root: ModelObject
    namespace: Namespace
    registry: ResolverRegistry
    diagnostics: list


def _scope_path(scope: Scope) -> list[str]:
    path = []
    while scope.parent is not None:
        path.insert(0, scope.name)
        scope = scope.parent
    return path


# ---------------------------------------------------------------------------
# Reverse: target model -> AST model


def transform_model_to_ast(m: Model, plan: TransformPlan,
                           registry: ResolverRegistry) -> tuple[Model, list[Diagnostic]]:
    diags: list[Diagnostic] = []

    root_image = plan.image_for_proto.get(m.root.cls.name)
    if root_image is None:
        raise DiagnosticError([error(
            "resolve", "reverse-unsupported",
            f"root class {m.root.cls.name!r} has no AST image; this model cannot be "
            f"rendered back to text")])

    def rev(tobj: ModelObject, path: str) -> ModelObject:
        image = plan.image_for_proto[tobj.cls.name]
        iobj = ModelObject(image)
        for instr in plan.instructions_for(image):
            name = instr.image_feature.name
            tname = instr.target_feature.name
            if instr.kind == "copy":
                v = tobj.get(tname)
                if v is None or (instr.target_feature.many and not v):
                    continue
                iobj.set(name, list(v) if instr.image_feature.many else v)
            elif instr.kind == "containment":
                children = []
                for child in tobj.values(tname):
                    if child.cls.name in plan.skipped:
                        continue  # skipped classes have no syntax
                    if child.cls.name not in plan.image_for_proto:
                        diags.append(error("resolve", "reverse-unsupported",
                                           f"class {child.cls.name!r} has no AST image",
                                           path=f"{path}/{tname}"))
                        continue
                    children.append(rev(child, f"{path}/{tname}"))
                if children:
                    iobj.set(name, children if instr.image_feature.many else children[0])
            else:
                payloads = []
                for target in tobj.values(tname):
                    namer = registry.namer_for(tobj.cls, tname)
                    segs = namer(target, registry, m)
                    if not segs:
                        diags.append(error(
                            "resolve", "reverse-unnamed",
                            f"no unique textual reference for the {target.cls.name} object in "
                            f"{tobj.cls.name}.{tname}", path=f"{path}/{tname}"))
                        continue
                    if isinstance(instr.textual, MetaDataType):
                        payloads.append("::".join(segs))
                    else:
                        payloads.append(build_payload_tree(instr.textual, segs))
                if payloads:
                    iobj.set(name, payloads if instr.image_feature.many else payloads[0])
        return iobj

    iroot = rev(m.root, "")
    return Model(iroot, plan.ast), diags


# ---------------------------------------------------------------------------
# Builtin registry from a key-value config file


def parse_config(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise DiagnosticError([error("resolve", "config",
                                         f"expected 'key = value', got {line!r}")])
        key, _, value = line.partition("=")
        out[key.strip()] = value.strip()
    return out


def namespace_registry(config: dict[str, str], target: Metamodel,
                       ast: Metamodel) -> ResolverRegistry:
    """Build the builtin qualified-name resolver registry from config keys:

    - ``name.attribute``: the attribute naming objects (default ``name``)
    - ``scope.classes``: target classes whose instances open nested scopes
    - ``seed.metamodels``: any of ``ecore``, ``target``, ``ast``; their
      classifiers are bound as instance-level stand-ins
    - ``root.class``: target class constructed when a consume-only AST root
      has no mapped subtree
    - ``place.<Cls>.{ensure,key,collection,children}``: placement of mapped
      children under consume-only ``<Cls>`` objects into a deduplicated,
      manually constructed container
    """
    diags: list[Diagnostic] = []
    reg = ResolverRegistry(name_attribute=config.get("name.attribute", "name"))

    def names(key):
        raw = config.get(key, "")
        return [p.strip() for p in raw.split(",") if p.strip()]

    for cname in names("scope.classes"):
        if not isinstance(target.classifier(cname), MetaClass):
            diags.append(error("resolve", "config",
                               f"scope.classes names unknown target class {cname!r}"))
        reg.scope_classes.add(cname)

    for kind in names("seed.metamodels"):
        if kind == "ecore":
            reg.seed("ecore", builtin_ecore())
        elif kind == "target":
            reg.seed("target", target)
        elif kind == "ast":
            reg.seed("ast", ast)
        else:
            diags.append(error("resolve", "config",
                               f"seed.metamodels entries must be ecore, target or ast; "
                               f"got {kind!r}"))

    root_class = config.get("root.class")
    if root_class:
        cls = target.classifier(root_class)
        if not isinstance(cls, MetaClass) or cls.abstract:
            diags.append(error("resolve", "config",
                               f"root.class names unknown or abstract class {root_class!r}"))
        else:
            reg.root_constructor = lambda: ModelObject(cls)

    placed = {key.split(".")[1] for key in config if key.startswith("place.")}
    for created in sorted(placed):
        ensure = config.get(f"place.{created}.ensure")
        key_attr = config.get(f"place.{created}.key")
        collection = config.get(f"place.{created}.collection")
        children = config.get(f"place.{created}.children")
        ensure_cls = target.classifier(ensure) if ensure else None
        if None in (ensure, key_attr, collection, children) or not isinstance(
                ensure_cls, MetaClass):
            diags.append(error("resolve", "config",
                               f"place.{created} needs ensure/key/collection/children keys "
                               f"naming real classes and features"))
            continue
        if ast.classifier(created) is None:
            diags.append(error("resolve", "config",
                               f"place.{created} names unknown AST class {created!r}"))
            continue
        reg.place(created, _make_placer(ensure_cls, key_attr, collection, children,
                                        reg.name_attribute))

    if diags:
        raise DiagnosticError(diags)
    return reg


def _make_placer(ensure_cls: MetaClass, key_attr: str, collection: str,
                 children: str, name_attribute: str):
    def placer(ctx: _PlacementContext):
        key = ctx.ast_object.get(key_attr)
        if not key:
            ctx.diagnostics.append(error(
                "resolve", "resolve-unresolved",
                f"{ctx.ast_object.cls.name}.{key_attr} is unset; cannot place children",
                path="/"))
            return None
        existing = ctx.namespace.resolve(ctx.namespace.root, [key])
        if isinstance(existing, ModelObject) and existing.cls is ensure_cls:
            return existing, children
        container = ModelObject(ensure_cls)
        container.set(name_attribute, key)
        ctx.target_root.add(collection, container)
        ctx.namespace.define([], key, container)
        return container, children

    return placer
