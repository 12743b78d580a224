"""Interpreter for move scripts over Kirby diagrams.

Each command is applied in order; the interpreter stops at the first failed
precondition or assertion and reports where and why.  Every step records the
Euler characteristic, signature and both boundary homology groups of the
resulting diagram so invariant drift is visible in traces.
"""

from __future__ import annotations

from dataclasses import dataclass

from .abelian import AbelianGroup
from .diagram import (KirbyDiagram, MoveError, add_cancelling_pair,
                      assert_geometric, blow_down, blow_up, cancel_pair,
                      dualize, handle_slide, twist_blow_up, zero_dot_swap,
                      boundary_homology, euler_char, signature)
from .textio import Command, MoveScript


@dataclass(frozen=True)
class StepReport:
    index: int            # 0 = initial state, then 1-based command index
    command: Command | None
    ok: bool
    detail: str
    euler: int
    sig: int
    plus: AbelianGroup
    minus: AbelianGroup | None  # only dual decompositions expose this side


@dataclass(frozen=True)
class ScriptResult:
    script: str
    ok: bool
    steps: tuple[StepReport, ...]
    final: KirbyDiagram

    @property
    def failure(self) -> StepReport | None:
        return next((s for s in self.steps if not s.ok), None)


def _snapshot(idx: int, cmd: Command | None, ok: bool, detail: str,
              d: KirbyDiagram) -> StepReport:
    plus, _ = boundary_homology(d, "plus")
    minus = boundary_homology(d, "minus")[0] if d.dual_flag else None
    return StepReport(idx, cmd, ok, detail, euler_char(d), signature(d),
                      plus, minus)


def apply_command(d: KirbyDiagram, cmd: Command) -> KirbyDiagram:
    """One command applied to a diagram; raises MoveError on bad input."""
    op, args = cmd.op, cmd.args
    if op == "slide":
        return handle_slide(d, moving=args[0], over=args[1], sign=args[2])
    if op == "blowup":
        return blow_up(d, sign=args[0], new_id=args[1])
    if op == "twistblowup":
        return twist_blow_up(d, t=args[0], strands=dict(args[2]),
                             new_id=args[1])
    if op == "blowdown":
        return blow_down(d, args[0])
    if op == "swap":
        return zero_dot_swap(d, args[0])
    if op == "addpair":
        if args[0] == "12":
            return add_cancelling_pair(d, "12", ids=(args[1], args[2]))
        return add_cancelling_pair(d, "23", ids=(args[1],))
    if op == "cancel":
        return cancel_pair(d, args[0], args[1])
    if op == "dualize":
        return dualize(d)
    if op == "assert-geom":
        return assert_geometric(d, args[0], args[1], args[2])
    raise MoveError(f"unknown command {op!r}")


def _check_assertion(d: KirbyDiagram, cmd: Command) -> str | None:
    """None on success, else a failure description."""
    op, args = cmd.op, cmd.args
    if op == "assert-homology":
        side, rank, torsion = args
        got, _ = boundary_homology(d, side)
        want = AbelianGroup(rank, torsion)
        if got != want:
            return f"H1(boundary {side}) = {got}, expected {want}"
        return None
    if op == "assert-euler":
        got = euler_char(d)
        if got != args[0]:
            return f"euler characteristic = {got}, expected {args[0]}"
        return None
    if op == "assert-signature":
        got = signature(d)
        if got != args[0]:
            return f"signature = {got}, expected {args[0]}"
        return None
    raise MoveError(f"unknown assertion {op!r}")


ASSERTIONS = frozenset(
    {"assert-homology", "assert-euler", "assert-signature"})


def run_script(d: KirbyDiagram, script: MoveScript) -> ScriptResult:
    steps = [_snapshot(0, None, True, "initial", d)]
    for idx, cmd in enumerate(script.commands, start=1):
        if cmd.op in ASSERTIONS:
            problem = _check_assertion(d, cmd)
            if problem is not None:
                steps.append(_snapshot(idx, cmd, False, problem, d))
                return ScriptResult(script.name, False, tuple(steps), d)
            steps.append(_snapshot(idx, cmd, True, "assertion holds", d))
            continue
        try:
            d = apply_command(d, cmd)
        except MoveError as exc:
            steps.append(_snapshot(idx, cmd, False, str(exc), d))
            return ScriptResult(script.name, False, tuple(steps), d)
        steps.append(_snapshot(idx, cmd, True, "applied", d))
    return ScriptResult(script.name, True, tuple(steps), d)


def trace_lines(result: ScriptResult) -> list[str]:
    """Human-readable per-step trace, one line per step."""
    out = []
    for s in result.steps:
        label = "initial" if s.command is None else s.command.op
        status = "ok" if s.ok else "FAIL"
        minus = f" H1-={s.minus}" if s.minus is not None else ""
        out.append(
            f"{s.index:3d} {label:<16} {status:<4} chi={s.euler} sigma={s.sig} "
            f"H1+={s.plus}{minus}  {s.detail}")
    return out
