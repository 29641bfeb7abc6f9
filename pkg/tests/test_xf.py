"""Transformation language: parsing, default mapping, derivation.

The expected self-hosting AST metamodel below was worked out by hand,
action by action, before the executor existed; the derivation must
reproduce it exactly.
"""

import random
from pathlib import Path

import pytest

from mmdsl.diagnostics import DiagnosticError
from mmdsl.emfatic import parse_metamodel, print_metamodel
from mmdsl.meta import (
    UNBOUNDED, MetaReference, builtin_ecore, metamodel_equals,
)
from mmdsl.xf import (
    ChangeInheritance, CreateClass, CreatedRef, DatatypeRef, ImageRef,
    SkipClass, Transformation, TranslateReferences, action_permutation_check,
    default_mapping, derive_ast_metamodel, format_trace, parse_trace,
    parse_transformation,
)

SAMPLES = Path(__file__).resolve().parent.parent / "samples"


@pytest.fixture(scope="module")
def xf_mm():
    return parse_metamodel((SAMPLES / "selfhost" / "xf.mm").read_text(), "xf")


@pytest.fixture(scope="module")
def selfhost_script():
    return (SAMPLES / "selfhost" / "xf.xf").read_text()


CLASSIFIER_LISTING = """
abstract class Classifier { }
class Class extends Classifier {
    ref Class[*] super;
    attr boolean abstract;
    val StructuralFeature[*] structuralFeatures;
}
abstract class StructuralFeature { }
"""


class TestParseTransformation:
    def test_selfhost_script(self, xf_mm, selfhost_script):
        t = parse_transformation(selfhost_script, xf_mm)
        assert len(t.actions) == 4
        create, refer, skip1, skip2 = t.actions
        assert isinstance(create, CreateClass)
        assert create.name == "QualifiedName" and not create.abstract
        assert [f.name for f in create.features] == ["name", "subQN"]
        assert create.features[0].kind == "attr"
        assert isinstance(create.feature_types[0], DatatypeRef)
        assert create.features[1].kind == "val"
        assert create.feature_types[1] == CreatedRef("QualifiedName")
        assert (create.features[1].lower, create.features[1].upper) == (0, 1)
        assert isinstance(refer, TranslateReferences)
        assert refer.model_reference_type is builtin_ecore().classifier("EClassifier")
        assert refer.textual_reference_type == CreatedRef("QualifiedName")
        assert refer.include_descendants
        assert isinstance(skip1, SkipClass)
        assert skip1.target is builtin_ecore().classifier("EClassifier")
        assert skip1.include_descendants
        assert isinstance(skip2, SkipClass)
        assert skip2.target is xf_mm.classifier("ClassMapping")
        assert not skip2.include_descendants

    def test_make_extend_nothing(self, xf_mm):
        t = parse_transformation("make img(CreateClass) extend nothing;", xf_mm)
        (action,) = t.actions
        assert isinstance(action, ChangeInheritance)
        assert action.target == ImageRef(xf_mm.classifier("CreateClass"), "CreateClass")
        assert action.superclasses == []

    def test_make_extend_list(self, xf_mm):
        t = parse_transformation("make img(Attribute) extend Action, Reference;", xf_mm)
        (action,) = t.actions
        assert [r.written for r in action.superclasses] == ["Action", "Reference"]

    def test_unresolved_img_name(self, xf_mm):
        with pytest.raises(DiagnosticError) as exc:
            parse_transformation("refer img(Missing) as QualifiedName;", xf_mm)
        d = exc.value.diagnostics[0]
        assert d.code == "name-unresolved" and "Missing" in d.message
        assert d.location is not None

    def test_unresolved_as_name(self, xf_mm):
        with pytest.raises(DiagnosticError) as exc:
            parse_transformation("refer img(Action) as Nowhere;", xf_mm)
        assert "Nowhere" in exc.value.diagnostics[0].message

    def test_created_names_visible_in_any_order(self, xf_mm):
        t = parse_transformation(
            "create class A { val B b; }\ncreate class B { }", xf_mm)
        assert t.actions[0].feature_types[0] == CreatedRef("B")

    def test_comments(self, xf_mm):
        t = parse_transformation("// x\nskip ClassMapping; /* y */", xf_mm)
        assert len(t.actions) == 1


class TestDefaultMapping:
    def test_classifier_listing(self):
        target = parse_metamodel(CLASSIFIER_LISTING, "targets")
        ast, trace = default_mapping(target)
        cls = ast.classifier("ClassAS")
        assert [s.name for s in cls.supertypes] == ["ClassifierAS"]
        sup, abstract, feats = cls.features
        assert sup.name == "super" and not sup.containment
        assert sup.type.name == "ClassAS" and sup.upper is UNBOUNDED
        assert abstract.name == "abstract" and abstract.type.kind == "boolean"
        assert feats.name == "structuralFeatures" and feats.containment
        assert feats.type.name == "StructuralFeatureAS"

    def test_empty_metamodel(self):
        from mmdsl.meta import Metamodel
        ast, trace = default_mapping(Metamodel("empty"))
        assert ast.classifiers == []
        assert trace.class_records == [] and trace.feature_records == []

    def test_suffix_collision(self):
        target = parse_metamodel("class Foo { }\nclass FooAS { }", "m")
        with pytest.raises(DiagnosticError) as exc:
            default_mapping(target)
        assert exc.value.diagnostics[0].code == "xf-name-collision"

    def test_counts_preserved(self, xf_mm):
        ast, trace = default_mapping(xf_mm)
        protos = {r.proto for r in trace.class_records}
        # ten target classes plus the three referenced ecore classes
        assert len(trace.class_records) == 13
        assert {"ecore::EClass", "ecore::EClassifier", "ecore::EDataType"} <= protos
        for cls in xf_mm.classes():
            img = ast.classifier(cls.name + "AS")
            assert img.abstract == cls.abstract
            assert len(img.features) == len(cls.features)
            assert [s.name + "" for s in cls.supertypes] == \
                [s.name.removesuffix("AS") for s in img.supertypes]
            for f, g in zip(cls.features, img.features):
                assert (f.name, f.lower, str(f.upper)) == (g.name, g.lower, str(g.upper))


# Hand-applied result of the four self-hosting actions (frozen oracle).
SELFHOST_AST_EXPECTED = """\
class TransformationAS {
    val ActionAS[*] actions;
}
abstract class ActionAS {
}
class TranslateReferencesAS extends ActionAS {
    val QualifiedName modelReferenceType;
    val QualifiedName textualReferenceType;
    attr boolean includeDescendants;
}
class CreateClassAS extends ActionAS {
    attr String name;
    attr boolean abstract;
    val QualifiedName[*] superclasses;
    val StructuralFeatureAS[*] structuralFeatures;
}
class ChangeInheritanceAS extends ActionAS {
    val QualifiedName target;
    val QualifiedName[*] superclasses;
}
class SkipClassAS extends ActionAS {
    val QualifiedName target;
    attr boolean includeDescendants;
}
abstract class StructuralFeatureAS {
    attr String name;
    attr int lowerBound;
    attr int upperBound = 1;
}
class AttributeAS extends StructuralFeatureAS {
    val QualifiedName type;
}
class ReferenceAS extends StructuralFeatureAS {
    val QualifiedName type;
    attr boolean containment;
}
class QualifiedName {
    attr String name;
    val QualifiedName subQN;
}
"""


class TestDerive:
    def test_selfhost_derivation_matches_hand_applied_oracle(self, xf_mm, selfhost_script):
        t = parse_transformation(selfhost_script, xf_mm)
        ast, trace = derive_ast_metamodel(xf_mm, t)
        assert print_metamodel(ast) == SELFHOST_AST_EXPECTED
        names = {c.name for c in ast.classifiers}
        assert "QualifiedName" in names
        assert not names & {"ClassMappingAS", "EClassifierAS", "EClassAS", "EDataTypeAS"}
        # zero cross references survive
        for cls in ast.classes():
            for f in cls.features:
                if isinstance(f, MetaReference):
                    assert f.containment
        # trace bookkeeping
        skipped = {r.proto for r in trace.class_records if r.status == "skipped"}
        assert skipped == {"ClassMapping", "ecore::EClassifier", "ecore::EClass",
                           "ecore::EDataType"}
        assert trace.created == ["QualifiedName"]
        translated = {(r.image_class, r.image_feature) for r in trace.feature_records
                      if r.mode == "translated"}
        assert ("TranslateReferencesAS", "modelReferenceType") in translated
        assert ("AttributeAS", "type") in translated
        for r in trace.feature_records:
            if r.mode == "translated":
                assert r.textual == "QualifiedName"

    def test_translate_classifier_refs_to_string(self):
        target = parse_metamodel(CLASSIFIER_LISTING, "targets")
        t = parse_transformation("refer img(Classifier)+ as String;", target)
        ast, trace = derive_ast_metamodel(target, t)
        cls = ast.classifier("ClassAS")
        sup = cls.features[0]
        assert sup.is_attribute and sup.type.name == "String"
        assert sup.name == "super" and sup.upper is UNBOUNDED
        assert cls.features[2].containment  # structuralFeatures untouched

    def test_translation_preserves_names_and_bounds(self, xf_mm, selfhost_script):
        t = parse_transformation(selfhost_script, xf_mm)
        ast, trace = derive_ast_metamodel(xf_mm, t)
        translated = [r for r in trace.feature_records if r.mode == "translated"]
        assert translated
        for r in translated:
            proto = xf_mm.classifier(r.proto_class)
            image = ast.classifier(r.image_class)
            pf = proto.find_feature(r.proto_feature)
            if_ = image.find_feature(r.image_feature)
            assert if_.name == pf.name
            assert (if_.lower, str(if_.upper)) == (pf.lower, str(pf.upper))
            assert not if_.is_attribute and if_.containment  # only kind changed

    def test_identity_transformation_is_default_mapping(self, xf_mm):
        ast_default, _ = default_mapping(xf_mm)
        ast_empty, _ = derive_ast_metamodel(xf_mm, Transformation([]))
        assert metamodel_equals(ast_default, ast_empty)

    def test_every_surviving_class_is_image_or_created(self, xf_mm, selfhost_script):
        t = parse_transformation(selfhost_script, xf_mm)
        ast, trace = derive_ast_metamodel(xf_mm, t)
        mapped_images = {r.image for r in trace.class_records if r.status == "mapped"}
        created = set(trace.created)
        for c in ast.classifiers:
            assert (c.name in mapped_images) ^ (c.name in created)
        assert len(trace.class_records) == 13  # every mapped-domain class accounted

    def test_skip_leaving_dangling_containment_is_an_error(self):
        target = parse_metamodel(
            "class Root { val Part[*] parts; }\nclass Part { }", "m")
        t = parse_transformation("skip Part;", target)
        with pytest.raises(DiagnosticError) as exc:
            derive_ast_metamodel(target, t)
        assert any(d.code == "xf-dangling-type" for d in exc.value.diagnostics)

    def test_skip_leaving_dangling_cross_is_an_error(self):
        target = parse_metamodel(
            "class Root { ref Part p; }\nclass Part { }", "m")
        t = parse_transformation("skip Part;", target)
        with pytest.raises(DiagnosticError) as exc:
            derive_ast_metamodel(target, t)
        assert any(d.code == "xf-dangling-type" for d in exc.value.diagnostics)

    def test_skip_of_surviving_supertype_is_an_error(self):
        target = parse_metamodel(
            "class Base { }\nclass Sub extends Base { }\nclass Root { val Sub s; }", "m")
        t = parse_transformation("skip Base;", target)
        with pytest.raises(DiagnosticError) as exc:
            derive_ast_metamodel(target, t)
        assert any(d.code == "xf-removed-supertype" for d in exc.value.diagnostics)

    def test_translate_conflict(self):
        target = parse_metamodel(
            "class A { ref B b; }\nclass B { }", "m")
        t = parse_transformation(
            "refer img(B) as String;\nrefer img(B) as QN;\ncreate class QN { attr String name; }",
            target)
        with pytest.raises(DiagnosticError) as exc:
            derive_ast_metamodel(target, t)
        assert any(d.code == "xf-translate-conflict" for d in exc.value.diagnostics)

    def test_create_collision(self, xf_mm):
        t = parse_transformation("create class ActionAS { }", xf_mm)
        with pytest.raises(DiagnosticError) as exc:
            derive_ast_metamodel(xf_mm, t)
        assert exc.value.diagnostics[0].code == "xf-name-collision"

    def test_change_inheritance_rewires(self):
        target = parse_metamodel(
            "class Type { }\nclass Class extends Type { }", "m")
        t = parse_transformation("make img(Class) extend nothing;", target)
        ast, _ = derive_ast_metamodel(target, t)
        assert ast.classifier("ClassAS").supertypes == []

    def test_change_inheritance_cycle(self):
        target = parse_metamodel("class A { }\nclass B extends A { }", "m")
        t = parse_transformation("make img(A) extend B;", target)
        with pytest.raises(DiagnosticError) as exc:
            derive_ast_metamodel(target, t)
        assert any(d.code == "mm-inheritance-cycle" for d in exc.value.diagnostics)

    def test_translate_on_created_class_features(self):
        target = parse_metamodel("class A { }\nclass Root { val A a; }", "m")
        t = parse_transformation(
            "create class Holder { ref A other; }\nrefer img(A) as String;", target)
        ast, _ = derive_ast_metamodel(target, t)
        other = ast.classifier("Holder").features[0]
        assert other.is_attribute and other.type.name == "String"


class TestPermutations:
    def test_selfhost_all_24(self, xf_mm, selfhost_script):
        t = parse_transformation(selfhost_script, xf_mm)
        assert action_permutation_check(xf_mm, t, max_permutations=24)

    def test_single_action(self, xf_mm):
        t = parse_transformation("skip ClassMapping;", xf_mm)
        assert action_permutation_check(xf_mm, t)

    def test_empty(self, xf_mm):
        assert action_permutation_check(xf_mm, Transformation([]))

    def test_random_action_sets(self):
        # >= 50 random valid action sets of <= 6 actions, >= 10 permutations each
        rng = random.Random(12345)
        found = 0
        attempts = 0
        while found < 50 and attempts < 600:
            attempts += 1
            target, script = _random_target_and_script(rng)
            try:
                t = parse_transformation(script, target)
                derive_ast_metamodel(target, t)
            except DiagnosticError:
                continue
            assert action_permutation_check(target, t, max_permutations=10,
                                            rng=random.Random(attempts))
            found += 1
        assert found >= 50, f"only {found} valid random action sets in {attempts} attempts"


def _random_target_and_script(rng):
    n = rng.randint(2, 5)
    lines = []
    fresh = iter(range(1000))  # feature names unique across the hierarchy
    for i in range(n):
        feats = []
        for _ in range(rng.randint(0, 3)):
            j = next(fresh)
            kind = rng.choice(["attr", "val", "ref"])
            if kind == "attr":
                feats.append(f"    attr {rng.choice(['String', 'int', 'boolean'])} f{j};")
            else:
                mult = rng.choice(["", "[*]"])
                feats.append(f"    {kind} C{rng.randrange(n)}{mult} f{j};")
        sup = f" extends C{rng.randrange(i)}" if i and rng.random() < 0.3 else ""
        lines.append(f"class C{i}{sup} {{")
        lines.extend(feats)
        lines.append("}")
    target = parse_metamodel("\n".join(lines), "rand")

    stmts = []
    n_actions = rng.randint(1, 6)
    created = 0
    for _ in range(n_actions):
        kind = rng.choice(["create", "refer", "skip", "make"])
        if kind == "create":
            stmts.append(f"create class N{created} {{ attr String name; }}")
            created += 1
        elif kind == "refer":
            textual = f"N{rng.randrange(created)}" if created and rng.random() < 0.5 else "String"
            plus = "+" if rng.random() < 0.5 else ""
            stmts.append(f"refer img(C{rng.randrange(n)}){plus} as {textual};")
        elif kind == "skip":
            plus = "+" if rng.random() < 0.3 else ""
            stmts.append(f"skip C{rng.randrange(n)}{plus};")
        else:
            target_i = rng.randrange(n)
            supers = "nothing" if rng.random() < 0.5 else f"C{rng.randrange(n)}"
            stmts.append(f"make img(C{target_i}) extend {supers};")
    return target, "\n".join(stmts)


class TestTraceIO:
    def test_round_trip(self, xf_mm, selfhost_script):
        t = parse_transformation(selfhost_script, xf_mm)
        _, trace = derive_ast_metamodel(xf_mm, t)
        text = format_trace(trace)
        again = parse_trace(text)
        assert format_trace(again) == text
        assert [r.proto for r in again.class_records] == [r.proto for r in trace.class_records]

    def test_malformed_line(self):
        with pytest.raises(DiagnosticError) as exc:
            parse_trace("klass A -> B\n")
        assert exc.value.diagnostics[0].code == "plan-stale"
