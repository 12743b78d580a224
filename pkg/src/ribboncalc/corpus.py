"""Bundled corpus of diagrams, ribbon descriptors and walkthrough scripts.

``corpus_run`` replays every bundled construction with its invariant
assertions and returns a summary report; any failed assertion fails the
run with the corpus item name.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

from .diagram import DOTTED, KirbyDiagram
from .middle import is_positive_ribbon
from .scripts import run_script
from .textio import (parse_diagram, parse_ribbon, parse_script,
                     serialize_diagram, serialize_ribbon, serialize_script)


def corpus_text(name: str) -> str:
    return (resources.files(__package__) / "corpus" / name).read_text("utf-8")


def corpus_names() -> list[str]:
    root = resources.files(__package__) / "corpus"
    return sorted(p.name for p in root.iterdir()
                  if p.name.rsplit(".", 1)[-1] in ("diagram", "ribbon", "script"))


@dataclass(frozen=True)
class CorpusItem:
    name: str
    ok: bool
    detail: str


@dataclass(frozen=True)
class CorpusReport:
    items: tuple[CorpusItem, ...]

    @property
    def ok(self) -> bool:
        return all(i.ok for i in self.items)


_PARSERS = {"diagram": (parse_diagram, serialize_diagram),
            "ribbon": (parse_ribbon, serialize_ribbon),
            "script": (parse_script, serialize_script)}


def _roundtrip_items() -> list[CorpusItem]:
    out = []
    for name in corpus_names():
        parse, serialize = _PARSERS[name.rsplit(".", 1)[-1]]
        text = corpus_text(name)
        value = parse(text)
        again = parse(serialize(value))
        ok = again == value
        out.append(CorpusItem(f"roundtrip:{name}", ok,
                              "parse/serialize round trip"
                              if ok else "round trip changed the value"))
    return out


def _positivity_items() -> list[CorpusItem]:
    out = []
    for name, expected in (("r1", True), ("r2", True), ("r3", True),
                           ("r0", False)):
        r = parse_ribbon(corpus_text(f"{name}.ribbon"))
        decision = is_positive_ribbon(r)
        if expected:
            ok = decision.positive and decision.witness_loop == "l1"
            detail = (f"positive via loop {decision.witness_loop}"
                      if ok else f"expected positive, got {decision}")
        else:
            ok = (not decision.positive and decision.refusals
                  and "accessory" in decision.refusals[0][1])
            detail = (f"refused: {decision.refusals[0][1]}"
                      if ok else f"expected refusal, got {decision}")
        out.append(CorpusItem(f"positivity:{name}", ok, detail))
    return out


def _script_item(diagram_name: str, script_name: str,
                 check=None) -> CorpusItem:
    d = parse_diagram(corpus_text(f"{diagram_name}.diagram"))
    s = parse_script(corpus_text(f"{script_name}.script"))
    result = run_script(d, s)
    label = f"script:{script_name}"
    if not result.ok:
        f = result.failure
        return CorpusItem(label, False, f"step {f.index} failed: {f.detail}")
    if check is not None:
        problem = check(result.final)
        if problem:
            return CorpusItem(label, False, problem)
    return CorpusItem(label, True,
                      f"{len(s.commands)} commands, all assertions hold")


def _dual_bookkeeping(final: KirbyDiagram) -> str | None:
    original = parse_diagram(corpus_text("y2c1.diagram"))
    dots = sum(1 for c in original.components if c.kind == DOTTED)
    if final.three_handles != dots:
        return (f"dual has {final.three_handles} 3-handles, expected one per "
                f"original dotted circle ({dots})")
    if final.hidden_one_handles != original.three_handles:
        return (f"dual has {final.hidden_one_handles} hidden 1-handles, "
                f"expected {original.three_handles}")
    return None


def _all_pairs_cancelled(final: KirbyDiagram) -> str | None:
    if final.three_handles != 0:
        return f"{final.three_handles} 3-handles left after cancellation"
    return None


def _swapped_to_dots(final: KirbyDiagram) -> str | None:
    bad = [c.id for c in final.components
           if c.id.startswith("b") and c.kind != DOTTED]
    if bad:
        return f"components {bad} were not swapped to dots"
    return None


def corpus_run() -> CorpusReport:
    items = _roundtrip_items() + _positivity_items()
    items.append(_script_item("y2c1", "dual_walkthrough", _dual_bookkeeping))
    items.append(
        _script_item("y2c1", "cancellation_walkthrough", _all_pairs_cancelled))
    items.append(_script_item("x1", "swap_to_dots", _swapped_to_dots))
    return CorpusReport(tuple(items))


def summary_table(report: CorpusReport) -> list[str]:
    width = max(len(i.name) for i in report.items)
    lines = [f"{i.name:<{width}}  {'pass' if i.ok else 'FAIL'}  {i.detail}"
             for i in report.items]
    lines.append(f"{'total':<{width}}  "
                 f"{'pass' if report.ok else 'FAIL'}  "
                 f"{sum(i.ok for i in report.items)}/{len(report.items)} items")
    return lines
