import dataclasses

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ari_kernel import calculus as C
from ari_kernel import checker as CH
from ari_kernel import corpus as K
from _cases import counted

pytestmark = pytest.mark.property

SMALL = ("imp0", "chin", "chin2", "chinfla2", "intant", "intant2", "contrap1", "contrap2",
         "mtp1", "mtp2", "appendixC", "appendixD1")

SCRIPTS = {n: K.load_corpus(n) for n in SMALL}

IMP0 = """script t
logic closed
system Ari
define A := lt(num(1),num(0))
{hyps}1. imp(@A,imp(@A,@A)) :: Imp1
2. imp(@A,imp(imp(@A,@A),@A)) :: Imp1
3. imp($2,imp($1,$5)) :: Imp2
4. imp($1,$5) :: MP 2 3
5. imp(@A,@A) :: {last}
qed 5
"""


def verdicts(rep):
    return [(r.label, r.verdict) for r in rep.lines]


def truncated(script, k):
    lines = script.lines[:k]
    return dataclasses.replace(script, lines=lines, qed=lines[-1].label)


@pytest.mark.parametrize("name", SMALL)
def test_checking_is_deterministic(name):
    a = CH.check_script(SCRIPTS[name])
    b = CH.check_script(K.load_corpus(name))
    assert a == b
    for fmt in ("text", "json", "structured"):
        assert CH.emit_report(a, fmt) == CH.emit_report(b, fmt)


@given(st.sampled_from(SMALL), st.data())
@counted
def test_prefix_verdicts_are_stable(name, data):
    script = SCRIPTS[name]
    k = data.draw(st.integers(1, len(script.lines)))
    full = verdicts(CH.check_script(script))
    assert verdicts(CH.check_script(truncated(script, k))) == full[:k]


def _exempt(line):
    return any(a.startswith(("width-typo", "renumbered")) for a in line.annotations)


@pytest.mark.parametrize("name", [*SMALL, "appendixD2", "main"])
def test_range_labels_have_rule_width(name):
    script = K.load_corpus(name)
    for ln in script.lines:
        w = CH.range_width(ln.label)
        if w is None or _exempt(ln):
            continue
        parts = ln.just.split()
        assert parts[0] == "DR", ln.label
        assert w == C.RULE_WIDTH[C.canonical_rule(parts[1])], ln.label


def test_wrong_range_width_fails():
    text = SCRIPTS["intant"]
    src = K.entry("intant").path.read_text().replace("4-8.", "4-9.").replace("qed 8", "qed 9")
    rep = CH.check_script(CH.parse_script(src))
    assert rep.classification == "FAILED"
    assert rep.lines[-1].verdict.kind == "Failed"
    assert text.lines[-1].label == "4-8"


def _undischarged(rep):
    return [h for h in rep.hypotheses if h.status == "undischarged"]


LAST = ["MP 1 4", "MP 4 1", "Imp1", "Hyp h", "MP 2 3"]


@given(st.sampled_from(LAST), st.booleans())
@counted
def test_proof_iff_no_failures_and_no_open_hypotheses(last, with_hyp):
    hyps = "hyp h: imp(@A,@A)\n" if with_hyp or last == "Hyp h" else ""
    rep = CH.check_script(CH.parse_script(IMP0.format(hyps=hyps, last=last)))
    failed = any(r.verdict.kind == "Failed" for r in rep.lines)
    open_ = _undischarged(rep)
    assert (rep.classification == "PROOF") == (not failed and not open_)
    assert (rep.classification == "FAILED") == failed
    match last:
        case "MP 1 4":
            assert rep.classification == "PROOF"
        case "Hyp h":
            assert rep.classification == "DEDUCTION"
            assert [h.name for h in open_] == ["h"]
        case _:
            assert rep.classification == "FAILED"


def test_mp_mismatch_reason():
    rep = CH.check_script(CH.parse_script(IMP0.format(hyps="", last="MP 4 1")))
    assert rep.lines[-1].verdict.kind == "Failed"
    assert rep.lines[-1].verdict.detail


def test_hypothesis_use_verdict(main_report):
    first = main_report.lines[0]
    assert first.label == "1"
    assert first.verdict.kind in ("HypothesisUse", "Verified")
    unlinked = CH.check_script(K.load_corpus("main"))
    assert unlinked.lines[0].verdict.kind == "HypothesisUse"
    assert unlinked.classification == "DEDUCTION"


def test_line_633_is_verified(main_report):
    r = next(r for r in main_report.lines if r.label == "633")
    assert r.verdict.kind == "Verified"


def test_imp0_parses_to_five_lines():
    s = SCRIPTS["imp0"]
    assert len(s.lines) == 5 and s.qed == "5"


@pytest.mark.parametrize("src,exc,line", [
    ("script t\nlogic closed\nsystem Ari\nqed 1\n", CH.MonotonicityError, None),
    ("script t\nlogic closed\nsystem Ari\n1. eq(num(0),num(0)) :: ElemAx\n"
     "1. eq(num(0),num(0)) :: ElemAx\nqed 1\n", CH.ScriptSyntaxError, 5),
    ("script t\nlogic closed\nsystem Ari\n2. eq(num(0),num(0)) :: ElemAx\n"
     "1. eq(num(0),num(0)) :: ElemAx\nqed 1\n", CH.MonotonicityError, 5),
    ("script t\nlogic sideways\n", CH.ScriptSyntaxError, 2),
    ("script t\nlogic closed\nsystem Ari\n1. eq(num(0) :: ElemAx\nqed 1\n", CH.ScriptSyntaxError, 4),
])
def test_parse_errors(src, exc, line):
    with pytest.raises(exc) as info:
        CH.parse_script(src)
    if line is not None:
        assert info.value.lineno == line


def test_linkage_mismatch():
    main = K.load_corpus("main")
    with pytest.raises(CH.LinkageMismatch):
        CH.audit(main, {"mp-ind": ("imp0", SCRIPTS["imp0"])})
    with pytest.raises(CH.LinkageMismatch):
        CH.audit(main, {"nosuch": ("appendixC", SCRIPTS["appendixC"])})


def test_empty_linkage_leaves_hypotheses_open():
    rep = CH.audit(K.load_corpus("main"), {})
    names = {h.name for h in _undischarged(rep)}
    assert {"T-Ax", "mp-ind"} <= names
    assert rep.classification == "DEDUCTION"


def test_text_and_structured_agree(main_report):
    import json
    doc = json.loads(CH.emit_report(main_report, "structured"))
    head = CH.emit_report(main_report, "text").splitlines()[0]
    ok = sum(1 for v in doc["verdicts"] if v["verdict"] != "Failed")
    assert head.startswith(f"main: {doc['classification']}, {ok}/{len(doc['verdicts'])} verified")
