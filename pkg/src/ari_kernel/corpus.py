"""Bundled proof scripts, their golden reports and two micro-systems."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from . import arithmetization as A
from . import checker as CH
from . import enumeration as E
from .syntax import Formula, Imp, parse_formula

ENTRIES = ("imp0", "chin", "chin2", "chinfla2", "intant", "intant2", "contrap1", "contrap2",
           "mtp1", "mtp2", "appendixC", "appendixD1", "appendixD2", "main")

# where each entry comes from, for listings
ANCHORS = {
    "imp0": "derived rule Imp0", "chin": "derived rule ch.in.", "chin2": "derived rule ch.in.2",
    "chinfla2": "derived rule ch.in.-fla2", "intant": "derived rule Int-Ant",
    "intant2": "derived rule int-ant", "contrap1": "derived rule Contrap",
    "contrap2": "derived rule contrap", "mtp1": "derived rule Mtp1", "mtp2": "derived rule Mtp2",
    "appendixC": "mp-induction", "appendixD1": "t-ax in Ari", "appendixD2": "formula 7",
    "main": "Con_Ari from T-Ax and mp-ind",
}

# links used for the full audit of the main entry
MAIN_LINKS = {"mp-ind": "appendixC", "line7": "appendixD2"}


class UnknownEntry(KeyError):
    pass


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    path: Path
    anchor: str
    golden: Path


def corpus_dir() -> Path:
    override = os.environ.get("ARI_CORPUS_DIR")
    if override:
        return Path(override)
    return Path(str(resources.files("ari_kernel") / "data"))


def entry(name: str) -> CorpusEntry:
    if name not in ENTRIES:
        raise UnknownEntry(name)
    d = corpus_dir()
    return CorpusEntry(name, d / f"{name}.ari", ANCHORS[name], d / "golden" / f"{name}.json")


def list_corpus() -> list[CorpusEntry]:
    return [entry(n) for n in ENTRIES]


def load_corpus(name: str) -> CH.Script:
    e = entry(name)
    try:
        text = e.path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise UnknownEntry(f"{name}: no script at {e.path}") from None
    return CH.parse_script(text)


def check_entry(name: str, linked: bool = True) -> CH.AuditReport:
    """The report the golden file records: main is audited with its links."""
    script = load_corpus(name)
    if name == "main" and linked:
        return CH.audit(script, {k: (t, load_corpus(t)) for k, t in MAIN_LINKS.items()})
    return CH.check_script(script)


def golden(name: str) -> dict:
    return json.loads(entry(name).golden.read_text(encoding="utf-8"))


def write_golden(name: str) -> Path:
    e = entry(name)
    e.golden.parent.mkdir(parents=True, exist_ok=True)
    e.golden.write_text(CH.emit_report(check_entry(name), "json"), encoding="utf-8")
    return e.golden


# ---------------------------------------------------------------------------
# Micro-systems: closed axioms over the atoms 0=0 and 1=1, small enough for
# exhaustive proof enumeration.

_P = "eq(num(0),num(0))"
_Q = "eq(num(1),num(1))"

MICRO_AXIOMS: dict[str, tuple[Formula, ...]] = {
    "micro2": (parse_formula(_P), parse_formula(f"imp({_P},{_Q})")),
    "micro3": (parse_formula(_P), parse_formula(f"imp({_P},{_Q})"),
               parse_formula(f"imp({_Q},imp({_P},{_P}))")),
}

MICRO_SYSTEMS: dict[str, A.AxiomTable] = {n: A.micro_table(n, fs) for n, fs in MICRO_AXIOMS.items()}


def micro_proofs(name: str, rounds: int = 3) -> dict[E.Code, E.Deduction]:
    """Bottom-up closure of the axiom leaves under MP, `rounds` times over.
    Keys are proof codes, so distinct trees with equal codes collapse."""
    found: dict[E.Code, E.Deduction] = {}
    for f in MICRO_AXIOMS[name]:
        d = E.Trivial(f)
        found[E.encode_deduction(d)] = d
    for _ in range(rounds):
        new = {}
        trees = list(found.values())
        for minor in trees:
            for major in trees:
                r = major.root
                if isinstance(r, Imp) and r.left == minor.root:
                    d = E.MpNode(r.right, minor, major)
                    new.setdefault(E.encode_deduction(d), d)
        grown = {c: d for c, d in new.items() if c not in found}
        if not grown:
            break
        found.update(grown)
    return found
