"""EMF-like metamodel and model-instance layer.

A Metamodel owns an ordered list of classifiers: MetaClass (with attributes,
containment references and cross references) and MetaDataType (String,
boolean, int). Models are single-rooted containment trees of ModelObject
instances with cross links inside the tree.

Metamodels are treated as immutable once built and can be shared freely
across threads; a Model is single-writer.

The builtin ``ecore`` package provides the reflective classifiers user
metamodels may reference (EClassifier, EClass, EDataType, ...). Metamodel
classifiers can also appear at the instance level: `classifier_object`
returns a shared EClass/EDataType instance standing for a classifier, so
that models may cross-reference classes the way transformation scripts do.
Such stand-ins live outside any containment tree and carry `represents`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .diagnostics import Diagnostic, error


class _Unbounded:
    """Upper bound '*'; compares greater than every integer."""

    def __repr__(self):
        return "UNBOUNDED"

    def __gt__(self, other):
        return True

    def __ge__(self, other):
        return True

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self


UNBOUNDED = _Unbounded()

def is_identifier(name: str) -> bool:
    return bool(name) and (name[0].isalpha() or name[0] == "_") and all(
        c.isalnum() or c == "_" for c in name
    ) and name.isascii()


@dataclass(eq=False)
class MetaDataType:
    name: str
    kind: str  # string | boolean | integer

    @property
    def is_class(self) -> bool:
        return False


@dataclass(eq=False)
class MetaFeature:
    name: str
    lower: int = 0
    upper: object = 1  # int or UNBOUNDED

    @property
    def many(self) -> bool:
        return self.upper is UNBOUNDED or self.upper > 1


@dataclass(eq=False)
class MetaAttribute(MetaFeature):
    type: MetaDataType = None
    default: object = None

    @property
    def is_attribute(self) -> bool:
        return True

    @property
    def containment(self) -> bool:
        return False


@dataclass(eq=False)
class MetaReference(MetaFeature):
    type: "MetaClass" = None
    containment: bool = False

    @property
    def is_attribute(self) -> bool:
        return False

    @property
    def default(self):
        return None


@dataclass(eq=False)
class MetaClass:
    name: str
    abstract: bool = False
    supertypes: list["MetaClass"] = field(default_factory=list)
    features: list[MetaFeature] = field(default_factory=list)

    @property
    def is_class(self) -> bool:
        return True

    def all_supertypes(self) -> list["MetaClass"]:
        """Transitive supertypes, depth-first, deduplicated, cycle-safe."""
        out, seen = [], set()

        def walk(cls):
            for s in cls.supertypes:
                if id(s) not in seen:
                    seen.add(id(s))
                    out.append(s)
                    walk(s)

        walk(self)
        return out

    def all_features(self) -> list[MetaFeature]:
        """Inherited features first (supertype declaration order), then own."""
        out, seen = [], set()
        for cls in reversed(self.all_supertypes()):
            for f in cls.features:
                if id(f) not in seen:
                    seen.add(id(f))
                    out.append(f)
        for f in self.features:
            if id(f) not in seen:
                seen.add(id(f))
                out.append(f)
        return out

    def find_feature(self, name: str) -> MetaFeature | None:
        for f in self.all_features():
            if f.name == name:
                return f
        return None


Classifier = MetaClass | MetaDataType


@dataclass(eq=False)
class Metamodel:
    name: str
    classifiers: list[Classifier] = field(default_factory=list)

    def classifier(self, name: str) -> Classifier | None:
        for c in self.classifiers:
            if c.name == name:
                return c
        return None

    def classes(self) -> list[MetaClass]:
        return [c for c in self.classifiers if isinstance(c, MetaClass)]

    def datatypes(self) -> list[MetaDataType]:
        return [c for c in self.classifiers if isinstance(c, MetaDataType)]


def is_subtype(sub: MetaClass, sup: MetaClass) -> bool:
    """Reflexive-transitive reachability over supertype edges."""
    return sub is sup or sup in sub.all_supertypes()


# ---------------------------------------------------------------------------
# Builtin ecore package


def _build_ecore() -> Metamodel:
    string = MetaDataType("String", "string")
    boolean = MetaDataType("boolean", "boolean")
    integer = MetaDataType("int", "integer")
    # Named elements need a name attribute so qualified-name lookup can
    # address classifier stand-ins at the instance level.
    eclassifier = MetaClass("EClassifier", abstract=True,
                            features=[MetaAttribute("name", 0, 1, type=string)])
    eclass = MetaClass("EClass", supertypes=[eclassifier])
    edatatype = MetaClass("EDataType", supertypes=[eclassifier])
    efeature = MetaClass("EStructuralFeature", abstract=True,
                         features=[MetaAttribute("name", 0, 1, type=string)])
    eattribute = MetaClass("EAttribute", supertypes=[efeature])
    ereference = MetaClass("EReference", supertypes=[efeature])
    return Metamodel("ecore", [
        eclassifier, eclass, edatatype,
        efeature, eattribute, ereference,
        string, boolean, integer,
    ])


_ECORE = _build_ecore()


def builtin_ecore() -> Metamodel:
    """The fixed builtin `ecore` metamodel (shared, do not mutate)."""
    return _ECORE


def builtin_datatype(name: str) -> MetaDataType | None:
    c = _ECORE.classifier(name)
    return c if isinstance(c, MetaDataType) else None


def resolve_classifier(name: str, mm: Metamodel | None) -> Classifier | None:
    """Resolve a possibly ``ecore::``-qualified name against mm, then builtin."""
    if name.startswith("ecore::"):
        return _ECORE.classifier(name.split("::", 1)[1])
    if mm is not None:
        c = mm.classifier(name)
        if c is not None:
            return c
    return _ECORE.classifier(name)


# ---------------------------------------------------------------------------
# Instance layer

_INTRINSIC_DEFAULTS = {"string": None, "boolean": False, "integer": 0}


class ModelObject:
    """An instance of a MetaClass. Slots are keyed by feature name; single
    valued slots hold a scalar or object, multi-valued slots hold a list."""

    __slots__ = ("cls", "slots", "id", "represents")

    def __init__(self, cls: MetaClass, represents: Classifier | None = None, **slots):
        self.cls = cls
        self.slots: dict[str, object] = {}
        self.id: int | None = None  # assigned at serialization time
        self.represents = represents
        for name, value in slots.items():
            self.set(name, value)

    def __repr__(self):
        return f"<{self.cls.name} {self.slots.get('name', '')!r}>"

    def _feature(self, name: str) -> MetaFeature:
        f = self.cls.find_feature(name)
        if f is None:
            raise LookupError(f"class {self.cls.name} has no feature {name!r}")
        return f

    def set(self, name: str, value):
        f = self._feature(name)
        if value is None:
            self.slots.pop(name, None)
        elif f.many:
            self.slots[name] = list(value)
        else:
            self.slots[name] = value

    def add(self, name: str, value):
        f = self._feature(name)
        if not f.many:
            raise LookupError(f"feature {self.cls.name}.{name} is single-valued")
        self.slots.setdefault(name, []).append(value)

    def get(self, name: str):
        """Effective value: the slot if set, else the declared default, else
        the intrinsic default of the datatype (0 / false / unset)."""
        if name in self.slots:
            return self.slots[name]
        f = self._feature(name)
        if f.many:
            return []
        if f.is_attribute:
            if f.default is not None:
                return f.default
            return _INTRINSIC_DEFAULTS[f.type.kind]
        return None

    def values(self, name: str) -> list:
        """Slot content as a list regardless of multiplicity (effective)."""
        v = self.get(name)
        if v is None:
            return []
        return list(v) if self._feature(name).many else [v]

    def is_set(self, name: str) -> bool:
        return name in self.slots


@dataclass(eq=False)
class Model:
    root: ModelObject
    metamodel: Metamodel


def classifier_object(c: Classifier) -> ModelObject:
    """Shared instance-level stand-in for a metamodel classifier: classes
    appear as EClass instances, datatypes as EDataType instances. The result
    is cached per classifier and must not be mutated."""
    cached = _CLASSIFIER_OBJECTS.get(id(c))
    if cached is not None and cached[0] is c:
        return cached[1]
    meta = _ECORE.classifier("EClass" if isinstance(c, MetaClass) else "EDataType")
    obj = ModelObject(meta, represents=c)
    obj.set("name", c.name)
    _CLASSIFIER_OBJECTS[id(c)] = (c, obj)
    return obj


_CLASSIFIER_OBJECTS: dict[int, tuple[Classifier, ModelObject]] = {}


def classifier_qname(c: Classifier, home: Metamodel | None) -> str:
    if home is not None and home.name:
        return f"{home.name}::{c.name}"
    return c.name


def find_classifier_home(c: Classifier, metamodels) -> Metamodel | None:
    for mm in metamodels:
        if mm is not None and any(x is c for x in mm.classifiers):
            return mm
    return None


# ---------------------------------------------------------------------------
# Validation


def validate_metamodel(mm: Metamodel) -> list[Diagnostic]:
    diags = []

    def err(code, message):
        diags.append(error("metamodel", code, message, path=f"/{mm.name}"))

    seen_names = set()
    for c in mm.classifiers:
        if not is_identifier(c.name):
            err("mm-identifier", f"classifier name {c.name!r} is not a valid identifier")
        if c.name in seen_names:
            err("mm-duplicate-classifier", f"duplicate classifier name {c.name!r}")
        seen_names.add(c.name)

    legal = {id(c) for c in mm.classifiers} | {id(c) for c in _ECORE.classifiers}

    for c in mm.classes():
        for s in c.supertypes:
            if id(s) not in legal:
                err("mm-bad-supertype",
                    f"class {c.name} extends {s.name}, which is not in this metamodel or ecore")
        if c in c.all_supertypes():
            err("mm-inheritance-cycle", f"class {c.name} is its own transitive supertype")
            continue
        fnames = set()
        for f in c.all_features():
            if not is_identifier(f.name):
                err("mm-identifier", f"feature name {f.name!r} on {c.name} is not a valid identifier")
            if f.name in fnames:
                err("mm-duplicate-feature", f"class {c.name} has two features named {f.name!r}")
            fnames.add(f.name)
        for f in c.features:
            if not (isinstance(f.lower, int) and f.lower >= 0):
                err("mm-bounds", f"{c.name}.{f.name}: lower bound must be a non-negative integer")
            if f.upper is not UNBOUNDED and not (isinstance(f.upper, int) and f.upper >= 1):
                err("mm-bounds", f"{c.name}.{f.name}: upper bound must be positive or unbounded")
            elif f.upper is not UNBOUNDED and isinstance(f.lower, int) and f.lower > f.upper:
                err("mm-bounds", f"{c.name}.{f.name}: lower bound exceeds upper bound")
            if isinstance(f, MetaAttribute):
                if not isinstance(f.type, MetaDataType):
                    err("mm-bad-type", f"{c.name}.{f.name}: attribute type must be a datatype")
                elif f.default is not None and not _value_fits(f.default, f.type):
                    err("mm-bad-default",
                        f"{c.name}.{f.name}: default {f.default!r} does not fit type {f.type.name}")
                elif f.default is not None and f.many:
                    err("mm-bad-default",
                        f"{c.name}.{f.name}: multi-valued attributes cannot carry defaults")
            else:
                if not isinstance(f.type, MetaClass):
                    err("mm-bad-type", f"{c.name}.{f.name}: reference type must be a class")
                elif id(f.type) not in legal:
                    err("mm-bad-type",
                        f"{c.name}.{f.name}: type {f.type.name} is not in this metamodel or ecore")
    return diags


def _value_fits(value, datatype: MetaDataType) -> bool:
    if datatype.kind == "string":
        return isinstance(value, str)
    if datatype.kind == "boolean":
        return type(value) is bool
    return type(value) is int


def iter_tree(root: ModelObject):
    """Depth-first walk of the containment tree (containment slots only)."""
    yield root
    for f in root.cls.all_features():
        if isinstance(f, MetaReference) and f.containment:
            for child in root.values(f.name):
                if isinstance(child, ModelObject):
                    yield from iter_tree(child)


def object_path(root: ModelObject, target: ModelObject) -> str | None:
    """Slash-separated containment path with indices on multi-valued steps."""
    if target is root:
        return "/"

    def walk(obj, prefix):
        for f in obj.cls.all_features():
            if isinstance(f, MetaReference) and f.containment:
                kids = obj.values(f.name)
                for i, child in enumerate(kids):
                    step = f"{f.name}[{i}]" if f.many else f.name
                    here = f"{prefix}/{step}" if prefix != "/" else f"/{step}"
                    if child is target:
                        return here
                    found = walk(child, here)
                    if found:
                        return found
        return None

    return walk(root, "/")


def validate_model(m: Model) -> list[Diagnostic]:
    diags = []

    def err(code, message, obj=None):
        path = object_path(m.root, obj) if obj is not None else "/"
        diags.append(error("validate", code, message, path=path or "/"))

    known = {id(c) for c in m.metamodel.classifiers} | {id(c) for c in _ECORE.classifiers}

    # Containment must be a tree: every object reached exactly once.
    seen: dict[int, ModelObject] = {}
    ok_tree = True

    def walk(obj):
        nonlocal ok_tree
        if id(obj) in seen:
            err("model-containment", f"object of class {obj.cls.name} is contained more than once")
            ok_tree = False
            return
        seen[id(obj)] = obj
        for f in obj.cls.all_features():
            if isinstance(f, MetaReference) and f.containment:
                for child in obj.values(f.name):
                    if isinstance(child, ModelObject):
                        walk(child)

    walk(m.root)

    for obj in list(seen.values()):
        if id(obj.cls) not in known:
            err("model-unknown-class", f"class {obj.cls.name} is not in the metamodel", obj)
            continue
        if obj.cls.abstract:
            err("model-abstract", f"class {obj.cls.name} is abstract", obj)
        declared = {f.name for f in obj.cls.all_features()}
        for name in obj.slots:
            if name not in declared:
                err("model-unknown-feature", f"class {obj.cls.name} has no feature {name!r}", obj)
        for f in obj.cls.all_features():
            vals = obj.values(f.name)  # effective: defaults count as present
            count = len(vals)
            if count < f.lower or (f.upper is not UNBOUNDED and count > f.upper):
                upper = "*" if f.upper is UNBOUNDED else f.upper
                err("model-multiplicity",
                    f"{obj.cls.name}.{f.name}: {count} value(s) violate bounds {f.lower}..{upper}", obj)
            for v in vals:
                if f.is_attribute:
                    if isinstance(v, ModelObject) or not _value_fits(v, f.type):
                        err("model-kind",
                            f"{obj.cls.name}.{f.name}: value {v!r} does not fit attribute type "
                            f"{f.type.name}", obj)
                else:
                    if not isinstance(v, ModelObject):
                        err("model-kind",
                            f"{obj.cls.name}.{f.name}: expected an object, found {v!r}", obj)
                        continue
                    if not is_subtype(v.cls, f.type):
                        err("model-kind",
                            f"{obj.cls.name}.{f.name}: object of class {v.cls.name} does not "
                            f"conform to {f.type.name}", obj)
                    if not f.containment:
                        if id(v) not in seen and v.represents is None:
                            err("model-dangling",
                                f"{obj.cls.name}.{f.name}: cross reference targets an object "
                                f"outside the model", obj)
    return diags


# ---------------------------------------------------------------------------
# Structural equality


def model_equals(a: Model, b: Model) -> bool:
    """Isomorphism: equal class names, equal effective attribute values,
    children pairwise equal in order, and cross references mapping to
    corresponding objects; classifier stand-ins compare by classifier name."""
    corr: dict[int, ModelObject] = {}
    cross_checks: list[tuple[ModelObject, ModelObject, MetaFeature]] = []

    def walk(x: ModelObject, y: ModelObject) -> bool:
        if x.cls.name != y.cls.name:
            return False
        corr[id(x)] = y
        fx = {f.name: f for f in x.cls.all_features()}
        fy = {f.name: f for f in y.cls.all_features()}
        if set(fx) != set(fy):
            return False
        for name, f in fx.items():
            g = fy[name]
            if f.is_attribute != g.is_attribute:
                return False
            if f.is_attribute:
                if x.get(name) != y.get(name):
                    return False
            elif f.containment:
                xs, ys = x.values(name), y.values(name)
                if len(xs) != len(ys):
                    return False
                for cx, cy in zip(xs, ys):
                    if not walk(cx, cy):
                        return False
            else:
                cross_checks.append((x, y, f))
        return True

    if not walk(a.root, b.root):
        return False
    for x, y, f in cross_checks:
        xs, ys = x.values(f.name), y.values(f.name)
        if len(xs) != len(ys):
            return False
        for tx, ty in zip(xs, ys):
            if tx.represents is not None or ty.represents is not None:
                if tx.represents is None or ty.represents is None:
                    return False
                if tx.represents.name != ty.represents.name:
                    return False
                hx = find_classifier_home(tx.represents, [a.metamodel, _ECORE])
                hy = find_classifier_home(ty.represents, [b.metamodel, _ECORE])
                # Same simple name must come from 'the same' package: either
                # both builtin or both model-level.
                if (hx is _ECORE) != (hy is _ECORE):
                    return False
            else:
                if corr.get(id(tx)) is not ty:
                    return False
    return True


def metamodel_equals(a: Metamodel, b: Metamodel) -> bool:
    """Structural equality, order-sensitive (classifier and feature order)."""
    if len(a.classifiers) != len(b.classifiers):
        return False
    return all(_classifier_eq(x, y) for x, y in zip(a.classifiers, b.classifiers))


def metamodel_isomorphic(a: Metamodel, b: Metamodel) -> bool:
    """Structural equality up to classifier ordering (names must match)."""
    an = {c.name: c for c in a.classifiers}
    bn = {c.name: c for c in b.classifiers}
    if set(an) != set(bn):
        return False
    return all(_classifier_eq(an[k], bn[k]) for k in an)


def _classifier_eq(x: Classifier, y: Classifier) -> bool:
    if x.name != y.name or x.is_class != y.is_class:
        return False
    if not x.is_class:
        return x.kind == y.kind
    if x.abstract != y.abstract:
        return False
    if [s.name for s in x.supertypes] != [s.name for s in y.supertypes]:
        return False
    if len(x.features) != len(y.features):
        return False
    for f, g in zip(x.features, y.features):
        if (f.name, f.lower, str(f.upper), f.is_attribute) != (g.name, g.lower, str(g.upper), g.is_attribute):
            return False
        if f.type.name != g.type.name:
            return False
        if f.is_attribute:
            if f.default != g.default:
                return False
        elif f.containment != g.containment:
            return False
    return True
