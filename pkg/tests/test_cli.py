import json

import pytest

from ari_kernel import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check_imp0(capsys):
    code, out, _ = run(capsys, "check", "corpus:imp0")
    assert code == 0
    assert out.startswith("imp0: PROOF, 5/5 verified")


def test_audit_with_induction_link_only(capsys):
    code, out, _ = run(capsys, "audit", "corpus:main", "--link", "mp-ind=corpus:appendixC",
                       "--format", "json")
    assert code == 1
    doc = json.loads(out)
    assert doc["classification"] == "DEDUCTION"
    open_ = {h["name"] for h in doc["hypotheses"] if h["status"] == "undischarged"}
    assert "T-Ax" in open_
    declared = {e["name"] for e in doc["ledger"] if e["kind"] == "declared-axiom"}
    assert {"M-omega"} <= declared


def test_full_audit_exits_zero(capsys):
    code, out, _ = run(capsys, "audit", "main", "--link", "mp-ind=appendixC",
                       "--link", "line7=appendixD2")
    assert code == 0
    assert out.startswith("main: PROOF")


def test_eval_sg(capsys):
    assert run(capsys, "eval", "sg", "p(0)^3")[:2] == (0, "1\n")


def test_encode_falsum(capsys):
    code, out, _ = run(capsys, "encode", "eq(num(0),num(1))", "--value")
    assert code == 0
    first, value = out.splitlines()
    assert first == "p(0)^15 * p(1)^23 * p(2)^529"
    assert int(value) == 2 ** 15 * 3 ** 23 * 5 ** 529


def test_decode_round_trip(capsys):
    code, out, _ = run(capsys, "decode", "p(0)^15 * p(1)^23 * p(2)^529")
    assert code == 0 and out.strip() == "bot"


def test_corpus_list(capsys):
    code, out, _ = run(capsys, "corpus", "list")
    assert code == 0 and len(out.splitlines()) == 14


@pytest.mark.parametrize("argv", [
    [], ["frobnicate"], ["check"], ["encode", "x1", "--digit-budget", "0"],
    ["check", "corpus:nope"], ["check", "no/such/file.ari"],
    ["audit", "corpus:imp0", "--link", "oops"],
])
def test_usage_errors_exit_64(capsys, argv):
    with pytest.raises(SystemExit) as info:
        raise SystemExit(cli.main(argv))
    assert info.value.code == 64
    assert capsys.readouterr().err


def test_failed_script_exits_two(tmp_path, capsys):
    bad = tmp_path / "bad.ari"
    bad.write_text("script bad\nlogic closed\nsystem Ari\n"
                   "1. imp(eq(num(0),num(0)),eq(num(0),num(0))) :: Imp1\nqed 1\n")
    assert run(capsys, "check", str(bad))[0] == 2


@pytest.mark.parametrize("name", ["appendixC", "mtp2"])
def test_structured_output_is_stable(capsys, name):
    first = run(capsys, "check", name, "--format", "structured")
    second = run(capsys, "check", name, "--format", "structured")
    assert first == second
    json.loads(first[1])


def test_exit_status_follows_classification(capsys):
    for ref, code in (("corpus:imp0", 0), ("corpus:main", 1)):
        got, out, _ = run(capsys, "check", ref)
        assert got == code
        assert out.split(",")[0].split(": ")[1] == {0: "PROOF", 1: "DEDUCTION"}[code]
