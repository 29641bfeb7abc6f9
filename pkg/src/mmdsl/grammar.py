"""Grammar notation interpreted in both directions.

A grammar file (`.gr`) holds rules over an AST metamodel:

    Name : body ;                     -- concrete rule, Name is an AST class
    Abstract Name : Alt1 | Alt2 ;     -- dispatch rule for an abstract class

Rule bodies combine double-quoted keywords, assignments (``feat=Callee``,
``feat+=Callee``, boolean flags ``feat?"kw"``), parenthesized groups with
``|`` alternation, ``?`` optionals and ``*``/``+`` repetitions. Callees are
other rules or the terminals ID, STRING, INT.

The same rules drive three interpreters: a single-token-lookahead
recursive-descent parser producing models (parse_text), a deterministic
renderer producing text (render_ast), and a random model generator used by
round-trip tests. check_grammar enforces what single-token lookahead needs:
no reachable left recursion and disjoint first-token sets at every choice
point (alternatives, optionals and repetition continuations are checked
against their local follow within the enclosing sequence).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .diagnostics import Diagnostic, DiagnosticError, SourceLocation, error
from .lexer import Lexer, Token, TokenStream, escape_string
from .meta import (
    MetaClass, Metamodel, Model, ModelObject, is_subtype, validate_model,
)

TERMINALS = ("ID", "STRING", "INT")


# ---------------------------------------------------------------------------
# Grammar model


@dataclass
class Keyword:
    text: str
    loc: SourceLocation | None = None


@dataclass
class Assignment:
    feature: str
    op: str  # "=" | "+=" | "?"
    callee: str | None = None  # rule name or terminal; None for flags
    keyword: str | None = None  # flag keyword
    loc: SourceLocation | None = None


@dataclass
class Sequence:
    items: list


@dataclass
class Opt:
    inner: object


@dataclass
class Repeat:
    inner: object
    kind: str  # "*" | "+"


@dataclass
class Group:
    alternatives: list


Element = Keyword | Assignment | Sequence | Opt | Repeat | Group


@dataclass
class ConcreteRule:
    name: str
    cls: MetaClass
    body: Element
    loc: SourceLocation | None = None


@dataclass
class AbstractRule:
    name: str
    cls: MetaClass
    alternatives: list[str] = field(default_factory=list)
    loc: SourceLocation | None = None


Rule = ConcreteRule | AbstractRule


@dataclass
class Grammar:
    rules: list[Rule]
    ast: Metamodel
    entry: str = ""

    def __post_init__(self):
        if not self.entry and self.rules:
            self.entry = self.rules[0].name
        self.by_name = {r.name: r for r in self.rules}
        self._analysis = None

    def keywords(self) -> set[str]:
        out: set[str] = set()

        def walk(e):
            if isinstance(e, Keyword):
                out.add(e.text)
            elif isinstance(e, Assignment):
                if e.op == "?":
                    out.add(e.keyword)
            elif isinstance(e, Sequence):
                for x in e.items:
                    walk(x)
            elif isinstance(e, (Opt, Repeat)):
                walk(e.inner)
            elif isinstance(e, Group):
                for x in e.alternatives:
                    walk(x)

        for r in self.rules:
            if isinstance(r, ConcreteRule):
                walk(r.body)
        return out

    def analysis(self) -> "_Analysis":
        if self._analysis is None:
            self._analysis = _Analysis(self)
        return self._analysis


# ---------------------------------------------------------------------------
# Grammar file parsing

_GR_LEXER = Lexer(reserved={"Abstract"},
                  symbols={":", ";", "|", "(", ")", "?", "*", "+", "+=", "="},
                  phase="grammar")


def parse_grammar(text: str, ast: Metamodel, file: str = "<grammar>") -> Grammar:
    stream = TokenStream(_GR_LEXER.tokenize(text, file), phase="grammar")
    rules: list[Rule] = []
    diags: list[Diagnostic] = []

    def parse_alternation():
        alts = [parse_sequence()]
        while stream.accept_kw("|"):
            alts.append(parse_sequence())
        return alts[0] if len(alts) == 1 else Group(alts)

    def parse_sequence():
        items = [parse_element()]
        while not (stream.at_kw(";") or stream.at_kw("|") or stream.at_kw(")") or stream.at("EOF")):
            items.append(parse_element())
        return items[0] if len(items) == 1 else Sequence(items)

    def parse_element():
        e = parse_primary()
        while True:
            if stream.at_kw("?"):
                e = Opt(e)
                stream.next()
            elif stream.at_kw("*"):
                e = Repeat(e, "*")
                stream.next()
            elif stream.at_kw("+"):
                e = Repeat(e, "+")
                stream.next()
            else:
                return e

    def parse_primary():
        tok = stream.current
        if tok.kind == "STRING":
            stream.next()
            return Keyword(tok.value, tok.location)
        if tok.is_kw("("):
            stream.next()
            inner = parse_alternation()
            stream.expect_kw(")")
            return inner
        if tok.kind == "ID":
            stream.next()
            if stream.at_kw("?"):
                # flag form feat?"kw"; only when a keyword literal follows,
                # otherwise the '?' is a postfix optional
                if stream.peek().kind == "STRING":
                    stream.next()
                    kw = stream.expect("STRING")
                    return Assignment(tok.text, "?", keyword=kw.value, loc=tok.location)
            if stream.at_kw("="):
                stream.next()
                callee = stream.expect("ID")
                return Assignment(tok.text, "=", callee=callee.text, loc=tok.location)
            if stream.at_kw("+="):
                stream.next()
                callee = stream.expect("ID")
                return Assignment(tok.text, "+=", callee=callee.text, loc=tok.location)
            stream.fail(f"expected '=', '+=' or '?\"kw\"' after '{tok.text}'")
        stream.fail(f"expected a keyword, assignment or group, found '{tok.text}'")

    while not stream.at("EOF"):
        if stream.accept_kw("Abstract"):
            name = stream.expect("ID")
            stream.expect_kw(":")
            alts = [stream.expect("ID").text]
            while stream.accept_kw("|"):
                alts.append(stream.expect("ID").text)
            stream.expect_kw(";")
            rules.append(AbstractRule(name.text, None, alts, name.location))
        else:
            name = stream.expect("ID")
            stream.expect_kw(":")
            body = parse_alternation()
            stream.expect_kw(";")
            rules.append(ConcreteRule(name.text, None, body, name.location))

    seen = set()
    for r in rules:
        if r.name in seen:
            diags.append(error("grammar", "name-duplicate",
                               f"duplicate rule name {r.name!r}", location=r.loc))
        seen.add(r.name)
        if r.name in TERMINALS:
            diags.append(error("grammar", "name-duplicate",
                               f"{r.name!r} is a terminal and cannot name a rule", location=r.loc))

    by_name = {r.name: r for r in rules}

    for r in rules:
        cls = ast.classifier(r.name)
        if not isinstance(cls, MetaClass):
            diags.append(error("grammar", "gr-unknown-class",
                               f"rule {r.name!r} does not match an AST class", location=r.loc))
            continue
        r.cls = cls
        if isinstance(r, AbstractRule):
            if not cls.abstract:
                diags.append(error("grammar", "gr-unknown-class",
                                   f"Abstract rule {r.name!r} needs an abstract class",
                                   location=r.loc))
            for alt in r.alternatives:
                sub = by_name.get(alt)
                if sub is None:
                    diags.append(error("grammar", "gr-unknown-rule",
                                       f"alternative {alt!r} of {r.name!r} is not a rule",
                                       location=r.loc))
                elif ast.classifier(alt) is not None and not is_subtype(ast.classifier(alt), cls):
                    diags.append(error("grammar", "gr-type",
                                       f"alternative {alt!r} is not a subtype of {r.name!r}",
                                       location=r.loc))
        else:
            if cls.abstract:
                diags.append(error("grammar", "gr-unknown-class",
                                   f"class {r.name!r} is abstract; use an Abstract rule",
                                   location=r.loc))
            _check_body(r, by_name, ast, diags)

    if diags:
        raise DiagnosticError(diags)
    return Grammar(rules, ast)


def _check_body(rule: ConcreteRule, by_name, ast, diags):
    cls = rule.cls

    def check(e):
        if isinstance(e, Keyword):
            if not e.text:
                diags.append(error("grammar", "syntax", "empty keyword", location=e.loc))
            return
        if isinstance(e, Sequence):
            for x in e.items:
                check(x)
            return
        if isinstance(e, (Opt, Repeat)):
            check(e.inner)
            return
        if isinstance(e, Group):
            for x in e.alternatives:
                check(x)
            return
        feat = cls.find_feature(e.feature)
        if feat is None:
            diags.append(error("grammar", "gr-unknown-feature",
                               f"class {cls.name} has no feature {e.feature!r}", location=e.loc))
            return
        if e.op == "?":
            if not (feat.is_attribute and feat.type.kind == "boolean" and not feat.many):
                diags.append(error("grammar", "gr-type",
                                   f"flag {e.feature!r} needs a single-valued boolean attribute",
                                   location=e.loc))
            return
        if e.op == "=" and feat.many:
            diags.append(error("grammar", "gr-operator",
                               f"'=' on multi-valued feature {e.feature!r}; use '+='",
                               location=e.loc))
        if e.op == "+=" and not feat.many:
            diags.append(error("grammar", "gr-operator",
                               f"'+=' on single-valued feature {e.feature!r}; use '='",
                               location=e.loc))
        if e.callee in TERMINALS:
            if not feat.is_attribute:
                diags.append(error("grammar", "gr-type",
                                   f"terminal {e.callee} cannot fill reference {e.feature!r}",
                                   location=e.loc))
            elif e.callee == "INT" and feat.type.kind != "integer":
                diags.append(error("grammar", "gr-type",
                                   f"INT does not fit {feat.type.name} attribute {e.feature!r}",
                                   location=e.loc))
            elif e.callee in ("ID", "STRING") and feat.type.kind != "string":
                diags.append(error("grammar", "gr-type",
                                   f"{e.callee} does not fit {feat.type.name} attribute "
                                   f"{e.feature!r}", location=e.loc))
            return
        callee_rule = by_name.get(e.callee)
        if callee_rule is None:
            diags.append(error("grammar", "gr-unknown-rule",
                               f"assignment callee {e.callee!r} is not a rule or terminal",
                               location=e.loc))
            return
        if feat.is_attribute:
            diags.append(error("grammar", "gr-type",
                               f"rule callee {e.callee!r} cannot fill attribute {e.feature!r}",
                               location=e.loc))
            return
        if not feat.containment:
            diags.append(error("grammar", "gr-cross-reference",
                               f"{cls.name}.{e.feature} is a cross reference; grammars only "
                               f"build containment trees", location=e.loc))
            return
        callee_cls = ast.classifier(e.callee)
        if isinstance(callee_cls, MetaClass) and not is_subtype(callee_cls, feat.type):
            diags.append(error("grammar", "gr-type",
                               f"rule {e.callee!r} builds {callee_cls.name}, which does not "
                               f"conform to {feat.type.name}", location=e.loc))

    check(rule.body)


# ---------------------------------------------------------------------------
# FIRST/nullability analysis

TokenKey = tuple  # ("kw", text) or ("term", "ID"|"STRING"|"INT")


class _Analysis:
    def __init__(self, g: Grammar):
        self.g = g
        self.nullable: dict[str, bool] = {r.name: False for r in g.rules}
        self.first: dict[str, set[TokenKey]] = {r.name: set() for r in g.rules}
        changed = True
        while changed:
            changed = False
            for r in g.rules:
                if isinstance(r, AbstractRule):
                    n = any(self.nullable.get(a, False) for a in r.alternatives)
                    f = set()
                    for a in r.alternatives:
                        f |= self.first.get(a, set())
                else:
                    n = self.elem_nullable(r.body)
                    f = self.elem_first(r.body)
                if n != self.nullable[r.name] or f != self.first[r.name]:
                    self.nullable[r.name] = n
                    self.first[r.name] = f
                    changed = True

    def elem_nullable(self, e) -> bool:
        if isinstance(e, Keyword):
            return False
        if isinstance(e, Assignment):
            if e.op == "?":
                return True
            if e.callee in TERMINALS:
                return False
            return self.nullable.get(e.callee, False)
        if isinstance(e, Sequence):
            return all(self.elem_nullable(x) for x in e.items)
        if isinstance(e, Opt):
            return True
        if isinstance(e, Repeat):
            return e.kind == "*" or self.elem_nullable(e.inner)
        return any(self.elem_nullable(x) for x in e.alternatives)

    def elem_first(self, e) -> set[TokenKey]:
        if isinstance(e, Keyword):
            return {("kw", e.text)}
        if isinstance(e, Assignment):
            if e.op == "?":
                return {("kw", e.keyword)}
            if e.callee in TERMINALS:
                return {("term", e.callee)}
            return set(self.first.get(e.callee, set()))
        if isinstance(e, Sequence):
            out: set[TokenKey] = set()
            for x in e.items:
                out |= self.elem_first(x)
                if not self.elem_nullable(x):
                    break
            return out
        if isinstance(e, (Opt, Repeat)):
            return self.elem_first(e.inner)
        out = set()
        for x in e.alternatives:
            out |= self.elem_first(x)
        return out

    def matches(self, keys: set[TokenKey], token: Token) -> bool:
        if token.kind == "KW":
            return ("kw", token.text) in keys
        if token.kind in TERMINALS:
            return ("term", token.kind) in keys
        return False


def _reachable_rules(g: Grammar) -> list[str]:
    out, frontier = [], [g.entry]
    seen = set()

    def callee_names(e, acc):
        if isinstance(e, Assignment):
            if e.callee and e.callee not in TERMINALS:
                acc.append(e.callee)
        elif isinstance(e, Sequence):
            for x in e.items:
                callee_names(x, acc)
        elif isinstance(e, (Opt, Repeat)):
            callee_names(e.inner, acc)
        elif isinstance(e, Group):
            for x in e.alternatives:
                callee_names(x, acc)

    while frontier:
        name = frontier.pop()
        if name in seen or name not in g.by_name:
            continue
        seen.add(name)
        out.append(name)
        r = g.by_name[name]
        acc: list[str] = []
        if isinstance(r, AbstractRule):
            acc.extend(r.alternatives)
        else:
            callee_names(r.body, acc)
        frontier.extend(acc)
    return out


def check_grammar(g: Grammar) -> list[Diagnostic]:
    """Reject grammars the single-token-lookahead interpreter cannot handle:
    left recursion reachable from the entry rule, and choice points whose
    first-token sets overlap (group and abstract-rule alternatives checked
    pairwise; optionals and repetitions checked against the first tokens of
    their local continuation in the enclosing sequence)."""
    diags: list[Diagnostic] = []
    a = g.analysis()
    reachable = _reachable_rules(g)

    # left recursion: cycle over leftmost rule references
    def left_refs(e, acc):
        if isinstance(e, Assignment):
            if e.op != "?" and e.callee and e.callee not in TERMINALS:
                acc.add(e.callee)
        elif isinstance(e, Sequence):
            for x in e.items:
                left_refs(x, acc)
                if not a.elem_nullable(x):
                    break
        elif isinstance(e, (Opt, Repeat)):
            left_refs(e.inner, acc)
        elif isinstance(e, Group):
            for x in e.alternatives:
                left_refs(x, acc)

    graph: dict[str, set[str]] = {}
    for name in reachable:
        r = g.by_name[name]
        acc: set[str] = set()
        if isinstance(r, AbstractRule):
            acc.update(al for al in r.alternatives if al in g.by_name)
        else:
            left_refs(r.body, acc)
        graph[name] = acc

    def reaches_itself(start: str) -> bool:
        seen: set[str] = set()
        frontier = list(graph.get(start, ()))
        while frontier:
            node = frontier.pop()
            if node == start:
                return True
            if node in seen:
                continue
            seen.add(node)
            frontier.extend(graph.get(node, ()))
        return False

    for name in reachable:
        if reaches_itself(name):
            diags.append(error("grammar", "gr-left-recursion",
                               f"rule {name!r} is left-recursive",
                               location=g.by_name[name].loc))

    if any(d.code == "gr-left-recursion" for d in diags):
        return diags  # FIRST sets are meaningless under left recursion

    def describe(keys):
        return ", ".join(sorted(
            f'"{k[1]}"' if k[0] == "kw" else k[1] for k in keys))

    def check_choices(e, rule, follow: set[TokenKey]):
        if isinstance(e, Sequence):
            for i, x in enumerate(e.items):
                local: set[TokenKey] = set()
                for y in e.items[i + 1:]:
                    local |= a.elem_first(y)
                    if not a.elem_nullable(y):
                        break
                else:
                    local |= follow
                check_choices(x, rule, local)
            return
        if isinstance(e, Opt):
            overlap = a.elem_first(e.inner) & follow
            if overlap:
                diags.append(error("grammar", "gr-ambiguous",
                                   f"in rule {rule!r}: optional part and its continuation both "
                                   f"start with {describe(overlap)}"))
            check_choices(e.inner, rule, follow)
            return
        if isinstance(e, Repeat):
            overlap = a.elem_first(e.inner) & follow
            if overlap:
                diags.append(error("grammar", "gr-ambiguous",
                                   f"in rule {rule!r}: repeated part and its continuation both "
                                   f"start with {describe(overlap)}"))
            check_choices(e.inner, rule, a.elem_first(e.inner) | follow)
            return
        if isinstance(e, Group):
            firsts = [a.elem_first(x) for x in e.alternatives]
            for i in range(len(firsts)):
                for j in range(i + 1, len(firsts)):
                    overlap = firsts[i] & firsts[j]
                    if overlap:
                        diags.append(error(
                            "grammar", "gr-ambiguous",
                            f"in rule {rule!r}: alternatives {i + 1} and {j + 1} both start "
                            f"with {describe(overlap)}"))
            nullable_alts = [x for x in e.alternatives if a.elem_nullable(x)]
            if len(nullable_alts) > 1:
                diags.append(error("grammar", "gr-ambiguous",
                                   f"in rule {rule!r}: more than one alternative can be empty"))
            for x in e.alternatives:
                check_choices(x, rule, follow)
            return

    for name in reachable:
        r = g.by_name[name]
        if isinstance(r, AbstractRule):
            firsts = [(alt, a.first.get(alt, set())) for alt in r.alternatives]
            for i in range(len(firsts)):
                for j in range(i + 1, len(firsts)):
                    overlap = firsts[i][1] & firsts[j][1]
                    if overlap:
                        diags.append(error(
                            "grammar", "gr-ambiguous",
                            f"in rule {name!r}: alternatives {firsts[i][0]!r} and "
                            f"{firsts[j][0]!r} both start with {describe(overlap)}"))
        else:
            check_choices(r.body, name, set())
    return diags


# ---------------------------------------------------------------------------
# Text to model


def parse_text(text: str, g: Grammar, ast: Metamodel | None = None,
               file: str = "<input>") -> Model:
    """Recursive-descent interpretation of the grammar from its entry rule.
    The result is a validated Model over the grammar's AST metamodel."""
    ast = ast or g.ast
    a = g.analysis()
    lexer = Lexer.for_keywords(g.keywords(), phase="parse")
    stream = TokenStream(lexer.tokenize(text, file), phase="parse")

    def flag_features(e, acc):
        if isinstance(e, Assignment) and e.op == "?":
            acc.append(e.feature)
        elif isinstance(e, Sequence):
            for x in e.items:
                flag_features(x, acc)
        elif isinstance(e, (Opt, Repeat)):
            flag_features(e.inner, acc)
        elif isinstance(e, Group):
            for x in e.alternatives:
                flag_features(x, acc)

    def expected(keys) -> str:
        names = sorted(f"'{k[1]}'" if k[0] == "kw" else k[1] for k in keys)
        return " or ".join(names) if names else "nothing"

    def parse_rule(name: str) -> ModelObject:
        rule = g.by_name[name]
        if isinstance(rule, AbstractRule):
            for alt in rule.alternatives:
                if a.matches(a.first.get(alt, set()), stream.current):
                    return parse_rule(alt)
            for alt in rule.alternatives:
                if a.nullable.get(alt, False):
                    return parse_rule(alt)
            stream.fail(f"expected {expected(a.first.get(name, set()))}, "
                        f"found {stream.describe()}")
        obj = ModelObject(rule.cls)
        walk(rule.body, obj)
        flags: list[str] = []
        flag_features(rule.body, flags)
        for f in flags:
            if not obj.is_set(f):
                obj.set(f, False)
        return obj

    def walk(e, obj):
        if isinstance(e, Keyword):
            stream.expect_kw(e.text)
            return
        if isinstance(e, Assignment):
            if e.op == "?":
                if stream.at_kw(e.keyword):
                    stream.next()
                    obj.set(e.feature, True)
                return
            if e.callee in TERMINALS:
                tok = stream.expect(e.callee)
                value = tok.value
            else:
                value = parse_rule(e.callee)
            if e.op == "=":
                if obj.is_set(e.feature):
                    stream.fail(f"feature {e.feature!r} assigned twice")
                obj.set(e.feature, value)
            else:
                obj.add(e.feature, value)
            return
        if isinstance(e, Sequence):
            for x in e.items:
                walk(x, obj)
            return
        if isinstance(e, Opt):
            if a.matches(a.elem_first(e.inner), stream.current):
                walk(e.inner, obj)
            return
        if isinstance(e, Repeat):
            first = a.elem_first(e.inner)
            if e.kind == "+" and not a.matches(first, stream.current):
                stream.fail(f"expected {expected(first)}, found {stream.describe()}")
            while a.matches(first, stream.current):
                walk(e.inner, obj)
            return
        # Group
        for alt in e.alternatives:
            if a.matches(a.elem_first(alt), stream.current):
                walk(alt, obj)
                return
        if any(a.elem_nullable(alt) for alt in e.alternatives):
            return
        stream.fail(f"expected {expected(a.elem_first(e))}, found {stream.describe()}")

    root = parse_rule(g.entry)
    stream.expect_eof()
    model = Model(root, ast)
    problems = validate_model(model)
    if problems:
        raise DiagnosticError([error("parse", d.code, d.message, path=d.path)
                               for d in problems])
    return model


# ---------------------------------------------------------------------------
# Model to text


def render_ast(m: Model, g: Grammar) -> str:
    """Deterministic inverse of parse_text: one space between tokens, a
    newline after ';' and '}', 4-space indentation inside braces.
    parse_text(render_ast(m)) is model-equal to m."""
    a = g.analysis()
    diags: list[Diagnostic] = []
    tokens: list[str] = []

    class Cursors:
        def __init__(self, obj):
            self.obj = obj
            self.used: dict[str, int] = {}

        def raw(self, feature):
            if not self.obj.is_set(feature):
                return []
            return self.obj.values(feature)

        def available(self, e: Assignment) -> bool:
            if e.op == "?":
                return self.obj.get(e.feature) is True
            return self.used.get(e.feature, 0) < len(self.raw(e.feature))

        def take(self, e: Assignment):
            i = self.used.get(e.feature, 0)
            self.used[e.feature] = i + 1
            return self.raw(e.feature)[i]

    def has_available(e, cur: Cursors) -> bool:
        if isinstance(e, Assignment):
            return cur.available(e)
        if isinstance(e, Sequence):
            return any(has_available(x, cur) for x in e.items)
        if isinstance(e, (Opt, Repeat)):
            return has_available(e.inner, cur)
        if isinstance(e, Group):
            return any(has_available(x, cur) for x in e.alternatives)
        return False

    def has_assignments(e) -> bool:
        if isinstance(e, Assignment):
            return True
        if isinstance(e, Sequence):
            return any(has_assignments(x) for x in e.items)
        if isinstance(e, (Opt, Repeat)):
            return has_assignments(e.inner)
        if isinstance(e, Group):
            return any(has_assignments(x) for x in e.alternatives)
        return False

    def render_obj(obj: ModelObject, path: str):
        rule = g.by_name.get(obj.cls.name)
        if not isinstance(rule, ConcreteRule):
            diags.append(error("grammar", "gr-no-rule",
                               f"no concrete rule for class {obj.cls.name!r}", path=path))
            return
        cur = Cursors(obj)
        walk(rule.body, cur, path)
        for f in obj.slots:
            used = cur.used.get(f, 0)
            feat = obj.cls.find_feature(f)
            if feat is not None and not feat.is_attribute and not feat.containment:
                continue  # cross slots are not the renderer's business
            if _is_flaggish(rule.body, f):
                continue
            if used < len(cur.raw(f)):
                diags.append(error("grammar", "gr-unset-mandatory",
                                   f"rule {rule.name!r} cannot emit all values of "
                                   f"{obj.cls.name}.{f}", path=path))

    def _is_flaggish(body, feature) -> bool:
        found = []

        def scan(e):
            if isinstance(e, Assignment) and e.feature == feature and e.op == "?":
                found.append(e)
            elif isinstance(e, Sequence):
                for x in e.items:
                    scan(x)
            elif isinstance(e, (Opt, Repeat)):
                scan(e.inner)
            elif isinstance(e, Group):
                for x in e.alternatives:
                    scan(x)

        scan(body)
        return bool(found)

    def walk(e, cur: Cursors, path: str):
        if isinstance(e, Keyword):
            tokens.append(e.text)
            return
        if isinstance(e, Assignment):
            if e.op == "?":
                if cur.available(e):
                    tokens.append(e.keyword)
                return
            if not cur.available(e):
                diags.append(error("grammar", "gr-unset-mandatory",
                                   f"{cur.obj.cls.name}.{e.feature} has no value to render",
                                   path=path))
                return
            value = cur.take(e)
            if e.callee == "STRING":
                tokens.append(escape_string(value))
            elif e.callee in ("ID", "INT"):
                tokens.append(str(value))
            else:
                render_obj(value, f"{path}/{e.feature}")
            return
        if isinstance(e, Sequence):
            for x in e.items:
                walk(x, cur, path)
            return
        if isinstance(e, Opt):
            if has_available(e.inner, cur):
                walk(e.inner, cur, path)
            return
        if isinstance(e, Repeat):
            if e.kind == "+" and not has_available(e.inner, cur):
                diags.append(error("grammar", "gr-unset-mandatory",
                                   f"'+' repetition has nothing to render", path=path))
                return
            while has_available(e.inner, cur):
                walk(e.inner, cur, path)
            return
        # Group: prefer an alternative with actual values, then a pure-keyword
        # one, then an empty one.
        for alt in e.alternatives:
            if has_available(alt, cur):
                walk(alt, cur, path)
                return
        for alt in e.alternatives:
            if not has_assignments(alt):
                walk(alt, cur, path)
                return
        for alt in e.alternatives:
            if a.elem_nullable(alt):
                return
        diags.append(error("grammar", "gr-unset-mandatory",
                           "no renderable alternative in group", path=path))

    render_obj(m.root, "/")
    if diags:
        raise DiagnosticError(diags)
    return _layout(tokens)


def _layout(tokens: list[str]) -> str:
    lines: list[str] = []
    current: list[str] = []
    depth = 0
    for tok in tokens:
        if tok == "}":
            depth = max(0, depth - 1)
        if not current:
            current.append("    " * depth + tok)
        else:
            current.append(tok)
        if tok == "{":
            depth += 1
        if tok in (";", "}"):
            lines.append(" ".join(current))
            current = []
    if current:
        lines.append(" ".join(current))
    return "\n".join(lines) + ("\n" if lines else "")


# ---------------------------------------------------------------------------
# Skeleton generation


def generate_grammar_skeleton(ast: Metamodel) -> str:
    """One rule per AST class: keyword-framed blocks listing every feature.
    The output always passes parse_grammar and check_grammar for ``ast``."""
    diags: list[Diagnostic] = []
    classes = ast.classes()
    if not any(not c.abstract for c in classes):
        diags.append(error("grammar", "gr-unknown-class",
                           "AST metamodel has no concrete class"))
    for cls in classes:
        for f in cls.features:
            if not f.is_attribute and not f.containment:
                diags.append(error("grammar", "gr-cross-reference",
                                   f"{cls.name}.{f.name} is a cross reference; translate it "
                                   f"before generating a grammar"))
    for cls in classes:
        if cls.abstract and not _has_concrete_descendant(cls, classes):
            diags.append(error("grammar", "gr-unknown-class",
                               f"abstract class {cls.name!r} has no concrete subtype"))
    if diags:
        raise DiagnosticError(diags)

    lines = []
    for cls in classes:
        if cls.abstract:
            subs = [c.name for c in classes if cls in c.supertypes]
            lines.append(f"Abstract {cls.name} :")
            lines.append("    " + " | ".join(subs) + " ;")
            lines.append("")
            continue
        parts = []
        for f in cls.all_features():
            if f.is_attribute and f.type.kind == "boolean":
                parts.append(f'( {f.name} ? "{f.name}" )?')
                continue
            if f.is_attribute:
                callee = "INT" if f.type.kind == "integer" else "STRING"
            else:
                callee = f.type.name
            op = "+=" if f.many else "="
            unit = f'"{f.name}" "=" {f.name} {op} {callee}'
            if f.many:
                if f.lower == 0:
                    parts.append(f"( {unit} )*")
                else:
                    parts.append(f"{unit} ( {unit} )*")
            else:
                if f.lower == 0:
                    parts.append(f"( {unit} )?")
                else:
                    parts.append(unit)
        lines.append(f"{cls.name} :")
        body = " ".join([f'"{cls.name}"', '"{"'] + parts + ['"}"'])
        lines.append(f"    {body} ;")
        lines.append("")
    return "\n".join(lines).rstrip() + "\n"


def _has_concrete_descendant(cls, classes) -> bool:
    return any(not c.abstract and is_subtype(c, cls) for c in classes)


# ---------------------------------------------------------------------------
# Grammar-respecting random models (round-trip test support)


def generate_random_model(g: Grammar, rng: random.Random, max_depth: int = 8) -> Model:
    """Walk the grammar generatively, making random choices; the result is a
    valid model that render_ast can always emit."""
    a = g.analysis()
    reserved = {k for k in g.keywords() if k and (k[0].isalpha() or k[0] == "_")}

    def rand_id():
        while True:
            name = rng.choice("abcdefgh") + "".join(
                rng.choice("abcdefgh123_") for _ in range(rng.randint(0, 5)))
            if name not in reserved:
                return name

    def rand_string():
        alphabet = "abc XYZ 123 _-:"
        s = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 8)))
        if rng.random() < 0.2:
            s += rng.choice(['"', "\\", "\n", "\t"])
        return s

    def gen_rule(name: str, depth: int) -> ModelObject:
        rule = g.by_name[name]
        if isinstance(rule, AbstractRule):
            alts = list(rule.alternatives)
            if depth > max_depth:
                alts.sort(key=_weight)
                return gen_rule(alts[0], depth + 1)
            return gen_rule(rng.choice(alts), depth + 1)
        obj = ModelObject(rule.cls)
        gen(rule.body, obj, depth)
        for f in _flags(rule.body):
            if not obj.is_set(f):
                obj.set(f, False)
        return obj

    def _weight(rule_name: str) -> int:
        r = g.by_name[rule_name]
        if isinstance(r, AbstractRule):
            return 5
        return _count_rule_refs(r.body)

    def _count_rule_refs(e) -> int:
        if isinstance(e, Assignment):
            return 0 if (e.op == "?" or e.callee in TERMINALS) else 1
        if isinstance(e, Sequence):
            return sum(_count_rule_refs(x) for x in e.items)
        if isinstance(e, (Opt, Repeat)):
            return _count_rule_refs(e.inner)
        if isinstance(e, Group):
            return max((_count_rule_refs(x) for x in e.alternatives), default=0)
        return 0

    def _flags(body) -> list[str]:
        acc: list[str] = []

        def scan(e):
            if isinstance(e, Assignment) and e.op == "?":
                acc.append(e.feature)
            elif isinstance(e, Sequence):
                for x in e.items:
                    scan(x)
            elif isinstance(e, (Opt, Repeat)):
                scan(e.inner)
            elif isinstance(e, Group):
                for x in e.alternatives:
                    scan(x)

        scan(body)
        return acc

    def gen(e, obj, depth):
        if isinstance(e, Keyword):
            return
        if isinstance(e, Assignment):
            if e.op == "?":
                if rng.random() < 0.5:
                    obj.set(e.feature, True)
                return
            if e.callee == "ID":
                value = rand_id()
            elif e.callee == "STRING":
                value = rand_string()
            elif e.callee == "INT":
                value = rng.randint(0, 20)
            else:
                value = gen_rule(e.callee, depth + 1)
            if e.op == "=":
                if not obj.is_set(e.feature):
                    obj.set(e.feature, value)
            else:
                obj.add(e.feature, value)
            return
        if isinstance(e, Sequence):
            for x in e.items:
                gen(x, obj, depth)
            return
        if isinstance(e, Opt):
            if depth <= max_depth and rng.random() < 0.5:
                gen(e.inner, obj, depth + 1)
            return
        if isinstance(e, Repeat):
            count = 1 if e.kind == "+" else 0
            if depth <= max_depth:
                while rng.random() < 0.5 and count < 4:
                    count += 1
            for _ in range(count):
                gen(e.inner, obj, depth + 1)
            return
        # Group
        alts = e.alternatives
        if depth > max_depth:
            nullable = [x for x in alts if a.elem_nullable(x)]
            if nullable:
                return
            keyword_only = [x for x in alts if not has_asg(x)]
            if keyword_only:
                gen(keyword_only[0], obj, depth + 1)
                return
        gen(rng.choice(alts), obj, depth + 1)

    def has_asg(e) -> bool:
        if isinstance(e, Assignment):
            return True
        if isinstance(e, Sequence):
            return any(has_asg(x) for x in e.items)
        if isinstance(e, (Opt, Repeat)):
            return has_asg(e.inner)
        if isinstance(e, Group):
            return any(has_asg(x) for x in e.alternatives)
        return False

    return Model(gen_rule(g.entry, 0), g.ast)
