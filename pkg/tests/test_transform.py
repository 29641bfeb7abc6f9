import random
from pathlib import Path

import pytest

from mmdsl.diagnostics import DiagnosticError
from mmdsl.emfatic import parse_metamodel
from mmdsl.grammar import parse_grammar, parse_text, render_ast
from mmdsl.meta import (
    Model, ModelObject, builtin_ecore, classifier_object, model_equals,
    validate_model,
)
from mmdsl.transform import (
    DEFER, Namespace, ResolverRegistry, build_plan, flatten_payload,
    namespace_registry, parse_config, transform_ast_to_model,
    transform_model_to_ast,
)
from mmdsl.xf import (
    Transformation, derive_ast_metamodel, parse_transformation,
    transformation_to_model,
)

SAMPLES = Path(__file__).resolve().parent.parent / "samples"


def load_example(name):
    d = SAMPLES / name
    stem = "xf" if name == "selfhost" else "css"
    target = parse_metamodel((d / f"{stem}.mm").read_text(), stem)
    t = parse_transformation((d / f"{stem}.xf").read_text(), target)
    ast, trace = derive_ast_metamodel(target, t)
    g = parse_grammar((d / f"{stem}.gr").read_text(), ast)
    plan = build_plan(trace, target, ast)
    registry = namespace_registry(parse_config((d / "ns.cfg").read_text()), target, ast)
    return target, t, ast, trace, g, plan, registry


@pytest.fixture(scope="module")
def selfhost():
    return load_example("selfhost")


@pytest.fixture(scope="module")
def css():
    return load_example("css")


class TestBuildPlan:
    def test_selfhost_plan_instructions(self, selfhost):
        target, t, ast, trace, g, plan, registry = selfhost
        create = ast.classifier("CreateClassAS")
        kinds = {i.image_feature.name: i.kind for i in plan.instructions_for(create)}
        assert kinds["name"] == "copy"
        assert kinds["structuralFeatures"] == "containment"
        assert kinds["superclasses"] == "cross"
        refer = ast.classifier("TranslateReferencesAS")
        by_name = {i.image_feature.name: i for i in plan.instructions_for(refer)}
        instr = by_name["modelReferenceType"]
        assert instr.kind == "cross" and instr.textual.name == "QualifiedName"
        assert instr.target_feature.type.name == "EClass"
        assert plan.consume_only == {"QualifiedName"}
        assert plan.skipped == {"ClassMapping", "EClassifier", "EClass", "EDataType"}

    def test_empty_trace_empty_plan(self):
        from mmdsl.xf import Trace
        from mmdsl.meta import Metamodel
        plan = build_plan(Trace(), Metamodel("t"), Metamodel("a"))
        assert plan.proto_for_image == {} and plan.consume_only == set()

    def test_stale_trace(self, selfhost):
        target, t, ast, trace, *_ = selfhost
        from mmdsl.xf import parse_trace
        bad = parse_trace("class Transformation -> GhostAS\n")
        with pytest.raises(DiagnosticError) as exc:
            build_plan(bad, target, ast)
        assert exc.value.diagnostics[0].code == "plan-stale"

    def test_untranslated_cross_is_error(self):
        target = parse_metamodel("class A { ref A other; }", "m")
        from mmdsl.xf import default_mapping
        ast, trace = default_mapping(target)
        with pytest.raises(DiagnosticError) as exc:
            build_plan(trace, target, ast)
        assert exc.value.diagnostics[0].code == "plan-untranslated"


class TestNamespace:
    def test_define_then_resolve_in_scope(self):
        ns = Namespace()
        obj = object()
        ns.define(["a", "b"], "x", obj)
        assert ns.resolve(ns.scope(["a", "b"]), ["x"]) is obj

    def test_outward_search(self):
        ns = Namespace()
        obj = object()
        ns.define([], "x", obj)
        assert ns.resolve(ns.scope(["a", "b"]), ["x"]) is obj

    def test_qualified_resolution_from_inner_scope(self):
        ns = Namespace()
        obj = object()
        ns.define(["ecore"], "EClassifier", obj)
        assert ns.resolve(ns.scope(["somewhere"]), ["ecore", "EClassifier"]) is obj

    def test_inner_shadows_outer(self):
        ns = Namespace()
        outer, inner = object(), object()
        ns.define([], "x", outer)
        ns.define(["s"], "x", inner)
        assert ns.resolve(ns.scope(["s"]), ["x"]) is inner

    def test_duplicate_definition_diagnostic(self):
        ns = Namespace()
        ns.define([], "x", object())
        ns.define([], "x", object())
        diags = ns.finalize()
        assert any(d.code == "name-duplicate" for d in diags)

    def test_forward_reference_stub(self):
        ns = Namespace()
        stub = ns.resolve(ns.root, ["later"], stub_if_missing=True)
        assert not stub.resolved
        obj = object()
        ns.define([], "later", obj)
        assert stub.resolved and stub.target is obj
        assert ns.finalize() == []

    def test_unresolved_stub_reported(self):
        ns = Namespace()
        ns.resolve(ns.root, ["never"], stub_if_missing=True)
        diags = ns.finalize()
        assert any(d.code == "name-unresolved" for d in diags)

    def test_ecore_seeding(self, selfhost):
        *_, registry = selfhost
        ns = registry.make_namespace()
        found = ns.resolve(ns.root, ["ecore", "EClassifier"])
        assert found.represents is builtin_ecore().classifier("EClassifier")


class TestFlatten:
    def test_string_payload(self):
        assert flatten_payload("a::b::c") == ["a", "b", "c"]

    def test_tree_payload(self, selfhost):
        *_, ast, trace, g, plan, registry = selfhost
        qn = ast.classifier("QualifiedName")
        inner = ModelObject(qn, name="EClassifier")
        outer = ModelObject(qn, name="ecore")
        outer.set("subQN", inner)
        assert flatten_payload(outer) == ["ecore", "EClassifier"]


SELFHOST_SCRIPT = (SAMPLES / "selfhost" / "xf.xf").read_text()


class TestSelfHostingForward:
    def test_pipeline_equals_direct_parse(self, selfhost):
        target, t, ast, trace, g, plan, registry = selfhost
        ast_model = parse_text(SELFHOST_SCRIPT, g)
        result, diags = transform_ast_to_model(ast_model, plan, registry)
        assert [d.render() for d in diags] == []
        direct = transformation_to_model(t, target, ast)
        assert validate_model(result) == []
        assert model_equals(result, direct)

    def test_resolved_values(self, selfhost):
        target, t, ast, trace, g, plan, registry = selfhost
        result, diags = transform_ast_to_model(parse_text(SELFHOST_SCRIPT, g), plan, registry)
        assert not diags
        actions = result.root.values("actions")
        assert [a.cls.name for a in actions] == [
            "CreateClass", "TranslateReferences", "SkipClass", "SkipClass"]
        refer = actions[1]
        assert refer.get("includeDescendants") is True
        mrt = refer.get("modelReferenceType")
        assert mrt.represents is builtin_ecore().classifier("EClassifier")
        assert refer.get("textualReferenceType").represents is ast.classifier("QualifiedName")
        assert actions[2].get("target").represents is builtin_ecore().classifier("EClassifier")
        assert actions[3].get("target").represents is target.classifier("ClassMapping")
        assert actions[3].get("includeDescendants") is False
        create = actions[0]
        attr, ref = create.values("structuralFeatures")
        assert attr.cls.name == "Attribute"
        assert attr.get("type").represents is builtin_ecore().classifier("String")
        assert (attr.get("lowerBound"), attr.get("upperBound")) == (0, 1)
        assert ref.cls.name == "Reference"
        assert ref.get("containment") is True
        assert ref.get("type").represents is ast.classifier("QualifiedName")

    def test_dangling_name_is_one_resolve_diagnostic(self, selfhost):
        target, t, ast, trace, g, plan, registry = selfhost
        ast_model = parse_text("skip Missing;", g)
        result, diags = transform_ast_to_model(ast_model, plan, registry)
        errors = [d for d in diags if d.severity == "error"]
        assert len(errors) == 1
        d = errors[0]
        assert d.phase == "resolve" and d.code == "resolve-unresolved"
        assert "Missing" in d.message
        assert d.path is not None


class TestCssMerge:
    def grouped_and_split(self, css):
        target, t, ast, trace, g, plan, registry = css
        out = []
        for name in ("grouped.css", "split.css"):
            text = (SAMPLES / "css" / name).read_text()
            m, diags = transform_ast_to_model(parse_text(text, g), plan, registry)
            assert not diags, [d.render() for d in diags]
            out.append(m)
        return out

    def test_grouped_equals_split(self, css):
        grouped, split = self.grouped_and_split(css)
        assert model_equals(grouped, split)

    def test_one_selector_with_both_properties(self, css):
        grouped, split = self.grouped_and_split(css)
        for m in (grouped, split):
            selectors = m.root.values("selectors")
            assert len(selectors) == 1
            sel = selectors[0]
            assert sel.get("name") == "some"
            props = [(d.get("property"), d.get("value")) for d in sel.values("declarations")]
            assert props == [("borderWidth", "2px"), ("borderColor", "red")]
            assert validate_model(m) == []


class TestReverse:
    def test_selfhost_reverse_round_trip(self, selfhost):
        target, t, ast, trace, g, plan, registry = selfhost
        direct = transformation_to_model(t, target, ast)
        ast_model, rdiags = transform_model_to_ast(direct, plan, registry)
        assert not rdiags
        assert validate_model(ast_model) == []
        back, fdiags = transform_ast_to_model(ast_model, plan, registry)
        assert not fdiags
        assert model_equals(direct, back)

    def test_round_trip_50_random_selfhost_models(self, selfhost):
        target, t, ast, trace, g, plan, registry = selfhost
        rng = random.Random(99)
        for _ in range(50):
            m = _random_target_model(rng, target, ast)
            assert validate_model(m) == []
            ast_model, rdiags = transform_model_to_ast(m, plan, registry)
            assert not rdiags, [d.render() for d in rdiags]
            back, fdiags = transform_ast_to_model(ast_model, plan, registry)
            assert not fdiags, [d.render() for d in fdiags]
            assert model_equals(m, back)

    def test_unnamed_cross_target_reports_diagnostic(self):
        text = ("class Root { val Thing[*] things; ref Thing pick; }\n"
                "class Thing { attr String name; }\n")
        target = parse_metamodel(text, "m")
        t = parse_transformation("refer img(Thing) as String;", target)
        ast, trace = derive_ast_metamodel(target, t)
        plan = build_plan(trace, target, ast)
        registry = namespace_registry({}, target, ast)
        nameless = ModelObject(target.classifier("Thing"))
        root = ModelObject(target.classifier("Root"), things=[nameless])
        root.set("pick", nameless)
        _, diags = transform_model_to_ast(Model(root, target), plan, registry)
        assert any(d.code == "reverse-unnamed" for d in diags)

    def test_named_cross_target_round_trips(self):
        text = ("class Root { val Thing[*] things; ref Thing pick; }\n"
                "class Thing { attr String name; }\n")
        target = parse_metamodel(text, "m")
        t = parse_transformation("refer img(Thing) as String;", target)
        ast, trace = derive_ast_metamodel(target, t)
        plan = build_plan(trace, target, ast)
        registry = namespace_registry({}, target, ast)
        a = ModelObject(target.classifier("Thing"), name="a")
        b = ModelObject(target.classifier("Thing"), name="b")
        root = ModelObject(target.classifier("Root"), things=[a, b])
        root.set("pick", b)
        m = Model(root, target)
        ast_model, rdiags = transform_model_to_ast(m, plan, registry)
        assert not rdiags
        # the in-model object reference became its textual name
        assert ast_model.root.get("pick") == "b"
        back, fdiags = transform_ast_to_model(ast_model, plan, registry)
        assert not fdiags
        assert model_equals(m, back)
        assert back.root.get("pick") is back.root.values("things")[1]

    def test_skipped_root_is_unsupported(self, css):
        target, t, ast, trace, g, plan, registry = css
        stylesheet = ModelObject(target.classifier("Stylesheet"))
        with pytest.raises(DiagnosticError) as exc:
            transform_model_to_ast(Model(stylesheet, target), plan, registry)
        assert exc.value.diagnostics[0].code == "reverse-unsupported"

    def test_empty_root(self, selfhost):
        target, t, ast, trace, g, plan, registry = selfhost
        m = Model(ModelObject(target.classifier("Transformation")), target)
        ast_model, diags = transform_model_to_ast(m, plan, registry)
        assert not diags
        assert ast_model.root.cls.name == "TransformationAS"
        assert ast_model.root.values("actions") == []


def _random_target_model(rng, target, ast):
    """Random Transformation instances whose classifier references point at
    uniquely named classifiers (ecore, target, or AST classes)."""
    eclasses = [classifier_object(c) for c in builtin_ecore().classes()]
    eclasses += [classifier_object(c) for c in target.classes()]
    eclasses += [classifier_object(c) for c in ast.classes() if not c.abstract]
    datatypes = [classifier_object(c) for c in builtin_ecore().datatypes()]

    def cls(name):
        return target.classifier(name)

    root = ModelObject(cls("Transformation"))
    for i in range(rng.randint(1, 6)):
        kind = rng.choice(["create", "refer", "skip", "make"])
        if kind == "create":
            obj = ModelObject(cls("CreateClass"))
            obj.set("name", f"New{i}")
            obj.set("abstract", rng.random() < 0.5)
            if rng.random() < 0.5:
                obj.set("superclasses", [rng.choice(eclasses)])
            feats = []
            for j in range(rng.randint(0, 3)):
                if rng.random() < 0.5:
                    f = ModelObject(cls("Attribute"))
                    f.set("type", rng.choice(datatypes))
                else:
                    f = ModelObject(cls("Reference"))
                    f.set("type", rng.choice(eclasses))
                    f.set("containment", rng.random() < 0.5)
                f.set("name", f"f{j}")
                f.set("lowerBound", rng.randint(0, 5))
                f.set("upperBound", rng.randint(0, 9))
                feats.append(f)
            if feats:
                obj.set("structuralFeatures", feats)
        elif kind == "refer":
            obj = ModelObject(cls("TranslateReferences"))
            obj.set("modelReferenceType", rng.choice(eclasses))
            obj.set("textualReferenceType", rng.choice(eclasses + datatypes))
            obj.set("includeDescendants", rng.random() < 0.5)
        elif kind == "skip":
            obj = ModelObject(cls("SkipClass"))
            obj.set("target", rng.choice(eclasses))
            obj.set("includeDescendants", rng.random() < 0.5)
        else:
            obj = ModelObject(cls("ChangeInheritance"))
            obj.set("target", rng.choice(eclasses))
            if rng.random() < 0.7:
                obj.set("superclasses", [rng.choice(eclasses)
                                         for _ in range(rng.randint(1, 3))])
        root.add("actions", obj)
    return Model(root, target)


@pytest.fixture(scope="module")
def lang():
    target = parse_metamodel(
        "class Model { val Package[*] packages; }\n"
        "class Package { attr String name; val Class[*] classes; }\n"
        "class Class { attr String name; ref Class super; }\n", "pkg")
    t = parse_transformation(
        "create class QualifiedName { attr String name; val QualifiedName subQN; }\n"
        "refer img(Class) as QualifiedName;\n", target)
    ast, trace = derive_ast_metamodel(target, t)
    g = parse_grammar(
        "ModelAS : ( packages += PackageAS )* ;\n"
        'PackageAS : "package" name = ID "{" ( classes += ClassAS )* "}" ;\n'
        'ClassAS : "class" name = ID ( "extends" super = QualifiedName )? ";" ;\n'
        'QualifiedName : name = ID ( "::" subQN = QualifiedName )? ;\n', ast)
    plan = build_plan(trace, target, ast)
    registry = namespace_registry(
        {"name.attribute": "name", "scope.classes": "Package"}, target, ast)
    return target, g, plan, registry


class TestPackageScopes:
    """A package-like language: nested scopes, local and qualified class
    references, and the reverse direction producing qualified names."""

    SOURCE = (
        "package a { class X; class Y extends X; }\n"
        "package b { class Z extends a::X; }\n"
    )

    def test_local_and_qualified_references(self, lang):
        target, g, plan, registry = lang
        m, diags = transform_ast_to_model(parse_text(self.SOURCE, g), plan, registry)
        assert not diags, [d.render() for d in diags]
        pkg_a, pkg_b = m.root.values("packages")
        x, y = pkg_a.values("classes")
        (z,) = pkg_b.values("classes")
        assert y.get("super") is x
        assert z.get("super") is x

    def test_forward_reference_within_scope(self, lang):
        target, g, plan, registry = lang
        source = "package a { class Y extends X; class X; }\n"
        m, diags = transform_ast_to_model(parse_text(source, g), plan, registry)
        assert not diags
        y, x = m.root.values("packages")[0].values("classes")
        assert y.get("super") is x

    def test_reverse_produces_qualified_names(self, lang):
        target, g, plan, registry = lang
        m, _ = transform_ast_to_model(parse_text(self.SOURCE, g), plan, registry)
        ast_model, rdiags = transform_model_to_ast(m, plan, registry)
        assert not rdiags
        text = render_ast(ast_model, g)
        assert "extends a :: X" in text
        back, fdiags = transform_ast_to_model(parse_text(text, g), plan, registry)
        assert not fdiags
        assert model_equals(m, back)


class TestResolverRegistry:
    def test_custom_resolver_and_defer(self, selfhost):
        target, t, ast, trace, g, plan, registry = selfhost
        calls = []
        reg = ResolverRegistry()
        reg.seed("ecore", builtin_ecore())
        reg.seed("target", target)
        reg.seed("ast", ast)

        def deferring(ctx):
            calls.append(tuple(ctx.segments()))
            if len(calls) < 2:
                return DEFER
            return ctx.namespace.resolve(ctx.scope, ctx.segments())

        reg.on("SkipClassAS", "target", deferring)
        ast_model = parse_text("skip ClassMapping;", g)
        result, diags = transform_ast_to_model(ast_model, plan, reg)
        assert not diags
        assert calls == [("ClassMapping",), ("ClassMapping",)]
        assert result.root.values("actions")[0].get("target").represents \
            is target.classifier("ClassMapping")

    def test_resolver_invocation_count(self, selfhost):
        target, t, ast, trace, g, plan, registry = selfhost
        count = 0
        reg = ResolverRegistry()
        reg.seed("ecore", builtin_ecore())
        reg.seed("target", target)
        reg.seed("ast", ast)
        base = reg.default_resolver

        def counting(ctx):
            nonlocal count
            count += 1
            return base(ctx)

        reg.default_resolver = counting
        ast_model = parse_text(SELFHOST_SCRIPT, g)
        # payload slots: create(type x2) + refer(mrt, trt) + skip targets x2
        transform_ast_to_model(ast_model, plan, reg)
        assert count == 6

    def test_config_validation(self, selfhost):
        target, t, ast, *_ = selfhost
        with pytest.raises(DiagnosticError) as exc:
            namespace_registry({"scope.classes": "Ghost"}, target, ast)
        assert exc.value.diagnostics[0].code == "config"

    def test_determinism(self, selfhost):
        target, t, ast, trace, g, plan, registry = selfhost
        from mmdsl.modeltext import dump_model
        a, _ = transform_ast_to_model(parse_text(SELFHOST_SCRIPT, g), plan, registry)
        b, _ = transform_ast_to_model(parse_text(SELFHOST_SCRIPT, g), plan, registry)
        assert dump_model(a) == dump_model(b)
