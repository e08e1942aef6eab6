"""Proof-script parser, line checker and audit."""

from __future__ import annotations

import json
import re
from collections import defaultdict
from dataclasses import dataclass, field

from . import calculus as C
from . import kleene as K
from . import syntax as S
from .syntax import Formula, Obligation


class ScriptSyntaxError(SyntaxError):
    def __init__(self, msg: str, lineno: int = 0, col: int = 0):
        super().__init__(f"line {lineno}, column {col}: {msg}")
        self.lineno = lineno
        self.offset = self.col = col


class MonotonicityError(ScriptSyntaxError):
    pass


class LinkageMismatch(Exception):
    pass


# ---------------------------------------------------------------------------
# Script representation


@dataclass(frozen=True)
class ScriptLine:
    label: str
    formula: Formula
    just: str
    annotations: tuple[str, ...] = ()
    lineno: int = 0
    formula_text: str = ""


@dataclass(frozen=True)
class Script:
    name: str
    logic: str
    system: str
    params: tuple[S.Variable, ...]
    hyps: tuple[tuple[str, Formula], ...]
    premises: tuple[tuple[str, Formula], ...]
    axioms: tuple[tuple[str, Formula], ...]
    lines: tuple[ScriptLine, ...]
    qed: str
    macros: dict = field(default_factory=dict, compare=False, hash=False)
    term_macros: dict = field(default_factory=dict, compare=False, hash=False)

    def hyp(self, name):
        return dict(self.hyps).get(name)


_NUMERIC = re.compile(r"(\d+)(?:-(\d+))?([a-z]*)")
_NAMED = re.compile(r"[A-Za-z][A-Za-z0-9]*")
_LINE = re.compile(r"^(?P<label>[0-9A-Za-z]+(?:-\d+)?)\.\s+(?P<body>.*)$")
_REF = re.compile(r"\$([0-9]+[a-z]*|[A-Za-z][\w\-*]*)")


def label_key(label: str):
    m = _NUMERIC.fullmatch(label)
    if not m:
        return None
    start, end, suf = m.groups()
    return int(start), int(end or start), suf


def range_width(label: str) -> int | None:
    k = label_key(label)
    if k is None or k[0] == k[1]:
        return None
    return k[1] - k[0] + 1


def _split_statements(text: str):
    """Join continuation lines (leading whitespace) and drop comments."""
    stmts: list[list] = []
    for n, raw in enumerate(text.splitlines(), 1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        if raw[0] in " \t" and stmts:
            stmts[-1][1] += " " + raw.strip()
        else:
            stmts.append([n, raw.strip()])
    return stmts


def _params_of(text: str):
    text = text.strip()
    if not text:
        return ()
    return tuple(p.strip() for p in text.split(","))


def parse_script(text: str) -> Script:
    name, logic, system, qed = "", "open", "Ari", None
    params: list[S.Variable] = []
    macros: dict = {}
    term_macros: dict = {}
    decl_text: dict[str, str] = {}
    hyps: list[str] = []
    premises: list[str] = []
    axioms: list[str] = []
    raw_lines: list[tuple[int, str, str, str, tuple[str, ...]]] = []
    seen: set[str] = set()

    def parse_f(src, lineno):
        try:
            return S.parse_formula(src, macros=macros, term_macros=term_macros)
        except SyntaxError as exc:
            raise ScriptSyntaxError(str(exc), lineno, getattr(exc, "pos", 0) or 0) from None

    for lineno, stmt in _split_statements(text):
        word, _, rest = stmt.partition(" ")
        rest = rest.strip()
        match word:
            case "script":
                name = rest
            case "logic":
                if rest not in ("open", "closed"):
                    raise ScriptSyntaxError(f"unknown logic {rest!r}", lineno)
                logic = rest
            case "system":
                if rest not in ("Ari", "Ari+", "AriNu"):
                    raise ScriptSyntaxError(f"unknown system {rest!r}", lineno)
                system = rest
            case "param":
                for p in rest.split(","):
                    t = S.parse_termoid(p.strip())
                    if not isinstance(t, S.Var):
                        raise ScriptSyntaxError("param expects a variable", lineno)
                    params.append(t.var)
            case "define" | "termdef":
                m = re.fullmatch(r"([A-Za-z_][A-Za-z0-9_]*)(?:\(([^)]*)\))?\s*:=\s*(.+)", rest)
                if not m:
                    raise ScriptSyntaxError(f"malformed {word}", lineno)
                ps = tuple(p.lstrip("?") for p in _params_of(m.group(2) or ""))
                body_src = m.group(3)
                try:
                    if word == "define":
                        macros[m.group(1)] = (ps, S.parse_formula(body_src, macros=macros, term_macros=term_macros))
                    else:
                        term_macros[m.group(1)] = (ps, S.parse_termoid(body_src, macros=macros, term_macros=term_macros))
                except SyntaxError as exc:
                    raise ScriptSyntaxError(str(exc), lineno) from None
            case "hyp" | "premise" | "axiomdecl":
                m = re.fullmatch(r"([A-Za-z0-9][\w\-*]*)\s*:\s*(.+)", rest)
                if not m:
                    raise ScriptSyntaxError(f"malformed {word}", lineno)
                if m.group(1) in decl_text:
                    raise ScriptSyntaxError(f"duplicate declaration {m.group(1)}", lineno)
                decl_text[m.group(1)] = m.group(2)
                {"hyp": hyps, "premise": premises, "axiomdecl": axioms}[word].append(m.group(1))
            case "qed":
                qed = rest
            case _:
                m = _LINE.match(stmt)
                if not m or "::" not in m.group("body"):
                    raise ScriptSyntaxError(f"cannot parse {stmt[:40]!r}", lineno)
                label = m.group("label")
                if label in seen:
                    raise ScriptSyntaxError(f"duplicate label {label}", lineno)
                seen.add(label)
                ftext, _, jtext = m.group("body").partition("::")
                jtext, _, ann = jtext.partition("#")
                anns = tuple(a.strip() for a in ann.split(";") if a.strip())
                raw_lines.append((lineno, label, ftext.strip(), jtext.strip(), anns))

    # label order and aliases ("7" names the range line "3-7")
    alias: dict[str, str] = {}
    last = None
    for lineno, label, *_ in raw_lines:
        k = label_key(label)
        if k is None:
            if not _NAMED.fullmatch(label):
                raise ScriptSyntaxError(f"bad label {label}", lineno)
            continue
        if last is not None and (k[0], k[2]) <= (last[1], last[2]) and not (k[0] == last[1] and k[2] > last[2] and k[0] == k[1]):
            raise MonotonicityError(f"label {label} does not follow its predecessor", lineno)
        last = k
        if k[0] != k[1]:
            alias.setdefault(str(k[1]), label)

    texts = {label: ftext for _, label, ftext, _, _ in raw_lines}
    texts.update(decl_text)
    resolved: dict[str, str] = {}

    def expand(label, stack, lineno):
        if label in resolved:
            return resolved[label]
        target = label if label in texts else alias.get(label)
        if target is None:
            raise ScriptSyntaxError(f"reference to unknown line ${label}", lineno)
        if target in stack:
            raise ScriptSyntaxError(f"cyclic formula reference through ${label}", lineno)
        out = _REF.sub(lambda mm: expand(mm.group(1), stack | {target}, lineno), texts[target])
        resolved[label] = out
        return out

    def build(label, lineno):
        return parse_f(expand(label, frozenset(), lineno), lineno)

    lines = tuple(
        ScriptLine(label, build(label, lineno), jtext, anns, lineno, ftext)
        for lineno, label, ftext, jtext, anns in raw_lines)
    if qed is None:
        raise MonotonicityError("script has no qed directive")
    if qed not in seen and qed not in alias:
        raise MonotonicityError(f"qed target {qed} is not a line of the script")
    decl = lambda names: tuple((n, build(n, 0)) for n in names)  # noqa: E731
    return Script(name, logic, system, tuple(params), decl(hyps), decl(premises), decl(axioms),
                  lines, alias.get(qed, qed), macros, term_macros)


# ---------------------------------------------------------------------------
# Verdicts and reports


@dataclass(frozen=True)
class Verdict:
    kind: str            # Verified | VerifiedViaExpansion | HypothesisUse | AxiomByDeclaration | Failed
    detail: str = ""

    def __str__(self):
        return f"{self.kind}({self.detail})" if self.detail else self.kind


@dataclass(frozen=True)
class LineResult:
    label: str
    verdict: Verdict
    deps: frozenset = frozenset()
    axioms: frozenset = frozenset()
    obligations: tuple[Obligation, ...] = ()
    schema: str | None = None
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class HypEntry:
    name: str
    formula: str
    used_at: tuple[str, ...]
    discharged_at: str | None
    status: str          # discharged | linked | undischarged | unused | premise


@dataclass(frozen=True)
class LedgerEntry:
    kind: str            # hypothesis | reduced | declared-axiom | elem-axiom | nu-schema | deferred
    name: str
    lines: tuple[str, ...]
    note: str = ""


@dataclass(frozen=True)
class AuditReport:
    script: str
    classification: str  # PROOF | DEDUCTION | FAILED
    lines: tuple[LineResult, ...]
    hypotheses: tuple[HypEntry, ...]
    obligations: tuple[Obligation, ...]
    ledger: tuple[LedgerEntry, ...]
    final_formula: str
    stats: dict

    @property
    def failed(self):
        return [r for r in self.lines if r.verdict.kind == "Failed"]

    def line(self, label):
        for r in self.lines:
            if r.label == label:
                return r
        raise KeyError(label)


@dataclass(frozen=True)
class Link:
    """A linked, checked script standing in for a hypothesis or a line."""
    target: str
    report: AuditReport
    formula: Formula


# ---------------------------------------------------------------------------
# Line checking


def alpha_eq(a, b) -> bool:
    def go(x, y, env_x: dict, env_y: dict, depth: int) -> bool:
        if type(x) is not type(y):
            return False
        match x:
            case S.Var(v):
                return env_x.get(v, v) == env_y.get(y.var, y.var)
            case S.Numeroid() | S.Meta():
                return x == y
            case S.App(f, args):
                return f == y.fn and all(go(p, q, env_x, env_y, depth) for p, q in zip(args, y.args))
            case S.Nu(p) | S.NuF(p) | S.PiF(p):
                return go(p, y.arg, env_x, env_y, depth)
            case S.KleeneAtom(p):
                return go(p, y.sub, env_x, env_y, depth)
            case S.Atom(p, l, r):
                return p == y.pred and go(l, y.left, env_x, env_y, depth) and go(r, y.right, env_x, env_y, depth)
            case S.Imp(l, r) | S.And(l, r) | S.Or(l, r):
                return go(l, y.left, env_x, env_y, depth) and go(r, y.right, env_x, env_y, depth)
            case S.Forall(v, body) | S.Exists(v, body):
                tag = ("bound", depth)
                return go(body, y.body, {**env_x, v: tag}, {**env_y, y.var: tag}, depth + 1)
            case S.Iota(v, body):
                tag = ("bound", depth)
                return go(body, y.body, {**env_x, v: tag}, {**env_y, y.bound: tag}, depth + 1)
        return False
    return go(a, b, {}, {}, 0)


def _mentions_omega(e) -> bool:
    return any(t == S.OMEGA for t in S.subterms(e))


_SCHEMA_ALIASES = {"WBA": ("WBA-A", "WBA-E"), "SBA": ("SBA1", "SBA2"), "Fi": ("Fi1", "Fi2", "Fi3", "Fi4")}


class _Ctx:
    def __init__(self, script: Script, links: dict[str, Link], strict_capture: bool):
        self.script = script
        self.links = links
        self.strict = strict_capture
        self.formulas: dict[str, Formula] = {}
        self.results: dict[str, LineResult] = {}
        self.alias: dict[str, str] = {}
        self.hyps = dict(script.hyps)
        self.premises = dict(script.premises)
        self.axioms = dict(script.axioms)
        self.hyp_uses: dict[str, list[str]] = defaultdict(list)
        self.discharged: dict[str, str] = {}
        self.unlinked_deps: dict[str, frozenset] = {}

    def resolve(self, ref: str, at: str):
        """(formula, deps, axioms) for a line label or a declared name."""
        ref = ref.rstrip(".")
        if ref in self.hyps:
            self.hyp_uses[ref].append(at)
            if ref in self.links:
                lk = self.links[ref]
                return self.hyps[ref], _residual_hyps(lk.report), _residual_axioms(lk.report)
            return self.hyps[ref], frozenset({ref}), frozenset()
        if ref in self.premises:
            self.hyp_uses[ref].append(at)
            return self.premises[ref], frozenset({ref}), frozenset()
        if ref in self.axioms:
            return self.axioms[ref], frozenset(), frozenset({ref})
        label = ref if ref in self.formulas else self.alias.get(ref)
        if label is None or label not in self.results:
            raise _Fail("ForwardReference" if label is None or label not in self.results else "UnknownReference",
                        f"no earlier line {ref}")
        r = self.results[label]
        return self.formulas[label], r.deps, r.axioms

    def termoid(self, text: str):
        return S.parse_termoid(text, macros=self.script.macros, term_macros=self.script.term_macros)


class _Fail(Exception):
    def __init__(self, reason: str, msg: str = ""):
        super().__init__(msg)
        self.reason = reason


def _residual_hyps(rep: AuditReport) -> frozenset:
    return frozenset(h.name for h in rep.hypotheses if h.status == "undischarged")


def _residual_axioms(rep: AuditReport) -> frozenset:
    return frozenset(e.name for e in rep.ledger if e.kind == "declared-axiom")


def _check_schema(name: str, f: Formula, ctx: _Ctx, termoid=None):
    closed = ctx.script.logic == "closed"
    if closed and S.free_vars(f):
        raise _Fail("ClosedModeViolation", "axiom instance with free variables in closed logic")
    for cand in _SCHEMA_ALIASES.get(name, (name,)):
        m = C.match_schema(cand, f, termoid=termoid)
        if m is not None:
            return m
    raise _Fail("NotAnInstance", f"not an instance of {name}")


def check_line(script: Script, i: int, ctx: _Ctx) -> LineResult:
    line = script.lines[i]
    try:
        res = _check(line, ctx)
    except _Fail as exc:
        res = LineResult(line.label, Verdict("Failed", exc.reason + (f": {exc}" if str(exc) else "")))
    except (C.RuleError, S.CaptureViolation) as exc:
        res = LineResult(line.label, Verdict("Failed", type(exc).__name__ + f": {exc}"))
    except SyntaxError as exc:
        res = LineResult(line.label, Verdict("Failed", f"BadJustification: {exc}"))
    return res


def _ob(kind, var, t, origin, satisfied=True, note=""):
    return Obligation(kind, var, t, origin, satisfied, note)


def _check(line: ScriptLine, ctx: _Ctx) -> LineResult:
    f = line.formula
    lab = line.label
    words = line.just.split()
    if not words:
        raise _Fail("BadJustification", "empty justification")
    kind, args = words[0], words[1:]
    script = ctx.script
    if S.has_kleene(f) and script.system != "AriNu":
        raise _Fail("KleeneOutsideAriNu", "Kleene notation outside the extension")
    obligations: list[Obligation] = []
    warnings: list[str] = []

    # a linked line stands in for its own derivation
    link = ctx.links.get(f"line{lab}") or (ctx.links.get(f"line{label_key(lab)[1]}") if label_key(lab) else None)
    if link is not None:
        if not alpha_eq(link.formula, f):
            raise LinkageMismatch(f"line {lab} differs from the qed of {link.target}")
        try:
            orig = _check(line, _NoLinks(ctx))
            ctx.unlinked_deps[lab] = orig.deps
        except (_Fail, C.RuleError):
            ctx.unlinked_deps[lab] = frozenset()
        return LineResult(lab, Verdict("Verified", f"linked:{link.target}"),
                          _residual_hyps(link.report), _residual_axioms(link.report), (), "Link")

    match kind:
        case "MP":
            if len(args) != 2:
                raise _Fail("BadJustification", "MP takes two references")
            a, da, xa = ctx.resolve(args[0], lab)
            b, db, xb = ctx.resolve(args[1], lab)
            mode = script.logic
            if C.apply_mp(a, b, mode) != f:
                raise _Fail("ConclusionMismatch", "line differs from the consequent of the major premise")
            return LineResult(lab, Verdict("Verified"), da | db, xa | xb, (), "MP")
        case "Gen":
            if len(args) != 2:
                raise _Fail("BadJustification", "Gen takes a reference and a variable")
            a, da, xa = ctx.resolve(args[0], lab)
            v = ctx.termoid(args[1])
            if not isinstance(v, S.Var):
                raise _Fail("BadJustification", "Gen needs a variable")
            active = {h: ctx.hyps.get(h) or ctx.premises.get(h) for h in da}
            if C.apply_gen(a, v.var, script.logic, active) != f:
                raise _Fail("ConclusionMismatch", "line is not the generalisation")
            if v.var in script.params:
                obligations.append(_ob("GenOnParam", v.var, None, lab, True,
                                       "parameter generalised after its hypotheses were discharged"))
            return LineResult(lab, Verdict("Verified"), da, xa, tuple(obligations), "Gen")
        case "DR":
            if not args:
                raise _Fail("BadJustification", "DR needs a rule name")
            rule = C.canonical_rule(args[0])
            prem, deps, axs = [], frozenset(), frozenset()
            for r in args[1:]:
                p, d, x = ctx.resolve(r, lab)
                prem.append(p)
                deps, axs = deps | d, axs | x
            steps = C.expand_derived(rule, prem, f)
            env = dict(zip("ab", prem))
            bad = [(l_, e) for l_, e in C.verify_steps(steps, env) if e]
            if bad:
                raise _Fail("ExpansionFailed", f"step {bad[0][0]}: {bad[0][1]}")
            width = range_width(lab)
            if width is not None and width != C.RULE_WIDTH[rule]:
                if any(a_.startswith("width-typo") or a_.startswith("renumbered") for a_ in line.annotations):
                    warnings.append(f"range width {width} but {rule} has {C.RULE_WIDTH[rule]} lines")
                else:
                    raise _Fail("RangeWidth", f"range width {width}, {rule} expands to {C.RULE_WIDTH[rule]}")
            return LineResult(lab, Verdict("VerifiedViaExpansion", rule), deps, axs, (), rule,
                              tuple(warnings))
        case "Hyp" | "Premise":
            name = args[0] if args else ""
            table = ctx.hyps if kind == "Hyp" else ctx.premises
            if name not in table:
                raise _Fail("UnknownHypothesis", name)
            g, d, x = ctx.resolve(name, lab)
            if g != f:
                raise _Fail("ConclusionMismatch", f"line differs from hypothesis {name}")
            if name in ctx.links:
                return LineResult(lab, Verdict("Verified", f"linked:{ctx.links[name].target}"), d, x, (), "Link")
            return LineResult(lab, Verdict("HypothesisUse", name), d, x, (), kind)
        case "Axiom":
            name = args[0] if args else ""
            if name not in ctx.axioms:
                raise _Fail("UnknownAxiom", name)
            if ctx.axioms[name] != f:
                raise _Fail("ConclusionMismatch", f"line differs from declared axiom {name}")
            return LineResult(lab, Verdict("AxiomByDeclaration", name), frozenset(), frozenset({name}), (), "Axiom")
        case "Inst":
            if len(args) < 2:
                raise _Fail("BadJustification", "Inst takes a reference and a termoid")
            a, d, x = ctx.resolve(args[0], lab)
            t = ctx.termoid(" ".join(args[1:]))
            if not isinstance(a, S.Forall):
                raise _Fail("NotUniversal", "Inst needs a universally quantified formula")
            inst, obs = S.substitute(a.body, a.var, t, origin=lab)
            if any(not o.satisfied for o in obs):
                raise _Fail("CaptureViolation", "termoid is not free for the bound variable")
            if inst != f:
                raise _Fail("ConclusionMismatch", "line is not the instance")
            obligations += [_ob("RangeNonEmpty", a.var, t, lab)] + list(obs)
            if _mentions_omega(t):
                obligations.append(_ob("NuOmega", a.var, t, lab, False, "omega = nu omega is deferred"))
            if args[0] in ctx.hyps and args[0] not in ctx.links:
                v = Verdict("HypothesisUse", args[0])
            else:
                v = Verdict("Verified", "instance")
            return LineResult(lab, v, d, x, tuple(obligations), "Inst")
        case "Discharge":
            if len(args) != 2:
                raise _Fail("BadJustification", "Discharge takes a hypothesis and a reference")
            h = args[0]
            if h not in ctx.hyps:
                raise _Fail("UnknownHypothesis", h)
            g, d, x = ctx.resolve(args[1], lab)
            if f != S.Imp(ctx.hyps[h], g):
                raise _Fail("ConclusionMismatch", f"discharge of {h} must give {h} > line {args[1]}")
            ctx.discharged[h] = lab
            return LineResult(lab, Verdict("Verified", f"discharge {h}"), d - {h}, x, (), "Discharge")
        case "DefRewrite" | "Notation":
            if not args:
                raise _Fail("BadJustification", f"{kind} needs a reference")
            g, d, x = ctx.resolve(args[-1], lab)
            same = alpha_eq(f, g) if kind == "DefRewrite" else alpha_eq(K.normalize(f), K.normalize(g))
            if not same:
                raise _Fail("RewriteMismatch", f"{kind} changes the formula")
            return LineResult(lab, Verdict("Verified", kind), d, x, (), kind)
        case "Translate":
            g = K.normalize(f)
            m = _check_schema(args[0], g, ctx)
            return LineResult(lab, Verdict("Verified", f"translated {m.schema}"), frozenset(), frozenset(), (),
                              m.schema)
        case "ElemAx" | "DefAx":
            if not args:
                raise _Fail("BadJustification", f"{kind} needs a table key")
            m = C.match_schema(kind, f, key=args[0])
            if m is None:
                raise _Fail("NotAnInstance", f"not {kind} {args[0]}")
            if script.logic == "closed" and S.free_vars(f):
                raise _Fail("ClosedModeViolation", "open axiom instance in closed logic")
            if _mentions_omega(f):
                obligations.append(_ob("NuOmega", None, S.OMEGA, lab, False, "instance at omega"))
            return LineResult(lab, Verdict("Verified", m.schema), frozenset(), frozenset(), tuple(obligations),
                              m.schema)
        case "LEA1nu" | "LEA2nu" | "LEAMPnu":
            if script.system != "AriNu":
                raise _Fail("KleeneOutsideAriNu", kind)
            m = K.match_nu_schema(f)
            if m is None or m.schema != kind:
                raise _Fail("NotAnInstance", f"not an instance of {kind}")
            subs = [v for _, v in m.bindings]
            if kind != "LEA2nu" and all(K.materializes(s) for s in subs):
                note = "substantiated"
            else:
                note = "schema-level"
                obligations.append(_ob("Feasibility", None, subs[0], lab, False,
                                       "subscript does not materialise; accepted at schema level"))
            if _mentions_omega(f):
                obligations.append(_ob("NuOmega", None, S.OMEGA, lab, False, "Kleene subscript at omega"))
            return LineResult(lab, Verdict("Verified", f"{kind} {note}"), frozenset(), frozenset(),
                              tuple(obligations), kind)
        case _:
            termoid = ctx.termoid(" ".join(args)) if args and kind in ("SBA", "SBA1", "SBA2") else None
            if args and termoid is None:
                raise _Fail("BadJustification", f"unexpected arguments for {kind}")
            if kind not in C.SCHEMA_NAMES and kind not in _SCHEMA_ALIASES:
                raise _Fail("BadJustification", f"unknown justification {kind}")
            m = _check_schema(kind, f, ctx, termoid)
            obligations += [Obligation(o.kind, o.variable, o.termoid, lab, o.satisfied) for o in m.obligations]
            t = dict(m.bindings).get("t")
            if t is not None and _mentions_omega(t):
                obligations.append(_ob("NuOmega", None, t, lab, False, "instance at omega"))
            return LineResult(lab, Verdict("Verified", m.schema), frozenset(), frozenset(),
                              tuple(obligations), m.schema)


class _NoLinks(_Ctx):
    """View of a context with line links disabled (for the unlinked dependency set)."""

    def __init__(self, ctx: _Ctx):
        self.__dict__.update(ctx.__dict__)
        self.links = {k: v for k, v in ctx.links.items() if not k.startswith("line")}
        self.hyp_uses = defaultdict(list)


# ---------------------------------------------------------------------------
# Whole scripts


def check_script(script: Script, links: dict[str, Link] | None = None,
                 strict_capture: bool = False) -> AuditReport:
    links = links or {}
    ctx = _Ctx(script, links, strict_capture)
    for ln in script.lines:
        k = label_key(ln.label)
        if k and k[0] != k[1]:
            ctx.alias.setdefault(str(k[1]), ln.label)
    results = []
    for i, ln in enumerate(script.lines):
        r = check_line(script, i, ctx)
        ctx.results[ln.label] = r
        ctx.formulas[ln.label] = ln.formula
        results.append(r)
    return _report(script, results, ctx)


def _report(script: Script, results: list[LineResult], ctx: _Ctx) -> AuditReport:
    final = ctx.results.get(script.qed)
    final_line = next((ln for ln in script.lines if ln.label == script.qed), None)
    failed = [r for r in results if r.verdict.kind == "Failed"]
    final_deps = final.deps if final else frozenset()
    final_axioms = final.axioms if final else frozenset()
    undischarged = {h for h in final_deps if h in ctx.hyps}

    hyps = []
    for name, g in script.hyps:
        if name in ctx.links:
            status = "linked"
        elif name in undischarged:
            status = "undischarged"
        elif name in ctx.discharged:
            status = "discharged"
        elif ctx.hyp_uses.get(name):
            status = "reduced" if any(name in d for d in ctx.unlinked_deps.values()) else "discharged"
        else:
            status = "unused"
        hyps.append(HypEntry(name, S.print_formula(g), tuple(dict.fromkeys(ctx.hyp_uses.get(name, ()))),
                             ctx.discharged.get(name), status))
    for name, g in script.premises:
        hyps.append(HypEntry(name, S.print_formula(g), tuple(dict.fromkeys(ctx.hyp_uses.get(name, ()))),
                             None, "premise"))

    obligations = tuple(o for r in results for o in r.obligations)
    ledger: list[LedgerEntry] = []
    for h in sorted(undischarged):
        ledger.append(LedgerEntry("hypothesis", h, tuple(dict.fromkeys(ctx.hyp_uses[h]))))
    for lab, d in ctx.unlinked_deps.items():
        for h in sorted(d - final_deps):
            link = ctx.links.get(f"line{lab}") or ctx.links.get(f"line{label_key(lab)[1]}")
            red = sorted(_residual_axioms(link.report)) if link else []
            ledger.append(LedgerEntry("reduced", h, (lab,),
                                      f"reduced to {', '.join(red) or 'nothing'} via {link.target if link else '?'}"))
    for ax in sorted(final_axioms):
        uses = tuple(r.label for r in results if r.schema == "Axiom" and r.verdict.detail == ax)
        ledger.append(LedgerEntry("declared-axiom", ax, uses))
    elem = defaultdict(list)
    nu = defaultdict(list)
    for r in results:
        if r.schema and r.schema.startswith("ElemAx"):
            elem[r.schema].append(r.label)
        if r.schema in K.NU_SCHEMATA and "schema-level" in r.verdict.detail:
            nu[r.schema].append(r.label)
    for k_ in sorted(elem):
        ledger.append(LedgerEntry("elem-axiom", k_, tuple(elem[k_])))
    for k_ in sorted(nu):
        ledger.append(LedgerEntry("nu-schema", k_, tuple(nu[k_]), "non-materialisable instances"))
    deferred = [o.origin for o in obligations if o.kind == "NuOmega"]
    if deferred:
        ledger.append(LedgerEntry("deferred", "omega = nu omega", tuple(dict.fromkeys(deferred))))
    # residue carried in by linked scripts
    for lk in ctx.links.values():
        for e in lk.report.ledger:
            if e.kind in ("declared-axiom",):
                continue
            ledger.append(LedgerEntry(e.kind, e.name, tuple(f"{lk.target}:{x}" for x in e.lines), e.note))

    qed_ok = final is not None and final_line is not None and results and results[-1].label == script.qed
    if failed or final is None:
        cls = "FAILED"
    elif not undischarged and qed_ok:
        cls = "PROOF"
    else:
        cls = "DEDUCTION"

    stats = _stats(script, results)
    return AuditReport(script.name, cls, tuple(results), tuple(hyps), obligations, tuple(ledger),
                       S.print_formula(final_line.formula) if final_line else "", stats)


def _stats(script: Script, results: list[LineResult]) -> dict:
    verdicts = defaultdict(int)
    schemas = defaultdict(int)
    rules = defaultdict(list)
    for ln, r in zip(script.lines, results):
        verdicts[r.verdict.kind] += 1
        if r.schema:
            schemas[r.schema] += 1
        rule = r.verdict.detail if r.verdict.kind == "VerifiedViaExpansion" else None
        if r.schema == "Link" and ln.just.split()[:1] == ["DR"]:
            # a linked line still occurs in the script as a rule conclusion
            rule = C.canonical_rule(ln.just.split()[1])
        if rule:
            k = label_key(ln.label)
            rules[rule].append(str(k[1]) if k else ln.label)
    recon = [ln.label for ln in script.lines if any(a.startswith("reconstructed") for a in ln.annotations)]
    numbered = set()
    for ln in script.lines:
        k = label_key(ln.label)
        if k:
            numbered.update(range(k[0], k[1] + 1))
    return {
        "lines": len(results),
        "labeled_integers": len(numbered),
        "verdicts": dict(sorted(verdicts.items())),
        "schemas": dict(sorted(schemas.items())),
        "derived_rule_conclusions": {k: v for k, v in sorted(rules.items())},
        "reconstructed": recon,
        "warnings": [f"{r.label}: {w}" for r in results for w in r.warnings],
    }


# ---------------------------------------------------------------------------
# Cross-script audit


def make_link(target: str, report: AuditReport, script: Script) -> Link:
    if report.failed:
        raise LinkageMismatch(f"{target} has failed lines")
    qed = next(ln.formula for ln in script.lines if ln.label == script.qed)
    return Link(target, report, qed)


def _link_matches(f: Formula, lk: Link) -> bool:
    """f is the linked qed itself or, for a proof, its universal closure."""
    if alpha_eq(f, lk.formula):
        return True
    if lk.report.classification != "PROOF":
        return False
    order = sorted(S.free_vars(lk.formula), key=lambda v: v.index)
    return alpha_eq(f, S.closure(lk.formula, order))


def audit(main: Script, linked: dict[str, tuple[str, Script]] | None = None,
          strict_capture: bool = False) -> AuditReport:
    """linked maps a hypothesis name or 'line<label>' to (target name, script)."""
    links = {}
    for key, (target, scr) in (linked or {}).items():
        rep = check_script(scr, strict_capture=strict_capture)
        lk = make_link(target, rep, scr)
        if not key.startswith("line"):
            if main.hyp(key) is None:
                raise LinkageMismatch(f"{main.name} has no hypothesis {key}")
            if not _link_matches(main.hyp(key), lk):
                raise LinkageMismatch(f"hypothesis {key} differs from the qed of {target}")
        links[key] = lk
    return check_script(main, links, strict_capture)


# ---------------------------------------------------------------------------
# Serialisation


def _ob_dict(o: Obligation) -> dict:
    return {"kind": o.kind, "origin": o.origin, "satisfied": o.satisfied,
            "variable": str(o.variable) if o.variable else None,
            "termoid": S.print_termoid(o.termoid) if o.termoid is not None else None,
            "note": o.note}


def report_dict(rep: AuditReport) -> dict:
    return {
        "script": rep.script,
        "classification": rep.classification,
        "final_formula": rep.final_formula,
        "verdicts": [{"label": r.label, "verdict": r.verdict.kind, "detail": r.verdict.detail,
                      "deps": sorted(r.deps), "axioms": sorted(r.axioms)} for r in rep.lines],
        "hypotheses": [{"name": h.name, "formula": h.formula, "used_at": list(h.used_at),
                        "discharged_at": h.discharged_at, "status": h.status} for h in rep.hypotheses],
        "obligations": [_ob_dict(o) for o in rep.obligations],
        "ledger": [{"kind": e.kind, "name": e.name, "lines": list(e.lines), "note": e.note} for e in rep.ledger],
        "stats": rep.stats,
    }


def emit_report(rep: AuditReport, fmt: str = "text") -> str:
    if fmt in ("json", "structured"):
        return json.dumps(report_dict(rep), indent=1, ensure_ascii=False) + "\n"
    v = rep.stats.get("verdicts", {})
    ok = sum(n for k, n in v.items() if k != "Failed")
    out = [f"{rep.script}: {rep.classification}, {ok}/{len(rep.lines)} verified"]
    for r in rep.lines:
        if r.verdict.kind == "Failed":
            out.append(f"  {r.label}: {r.verdict}")
    for w in rep.stats.get("warnings", []):
        out.append(f"  warning {w}")
    if rep.hypotheses:
        out.append("hypotheses:")
        for h in rep.hypotheses:
            out.append(f"  {h.name}: {h.status}" + (f" at {h.discharged_at}" if h.discharged_at else ""))
    if rep.ledger:
        out.append("ledger:")
        for e in rep.ledger:
            lines = ", ".join(e.lines[:8]) + (" ..." if len(e.lines) > 8 else "")
            out.append(f"  [{e.kind}] {e.name}: {lines}" + (f" ({e.note})" if e.note else ""))
    open_obs = [o for o in rep.obligations if not o.satisfied]
    out.append(f"obligations: {len(rep.obligations)} recorded, {len(open_obs)} open")
    out.append(f"final: {rep.final_formula}")
    return "\n".join(out) + "\n"
