"""Stabilization planning: turn a non-positive ribbon descriptor into a
verified product certificate, or report the positivity obstruction.

The pipeline mirrors the handle-by-handle argument: non-positive caps are
replaced by standard 2-handles at a blow-up cost, accessory loops through a
standard-capped finger are broken, remaining fingers are removed by Norman
tricks in reverse topological order, and the leftover complementary sphere
pairs are cancelled.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .middle import (AccessoryLoop, Cap, Finger, FingerGraph, MiddleLevelData,
                     PositivityDecision, RibbonDescriptor, STANDARD_CAP,
                     finger_graph, geometric_matrix, is_positive_ribbon,
                     make_descriptor, whitney_set)
from .trees import kuga_blowup_cost, prune_depth


class StabilizationError(Exception):
    """The descriptor falls outside the geometric hypotheses.

    Raised when a cycle of positively-capped fingers survives loop
    breaking; the argument excludes this for non-positive descriptors, so
    an encodable instance hitting it is flagged rather than planned around.
    """


# -- plan steps ----------------------------------------------------------

@dataclass(frozen=True)
class ReplaceCap:
    target: str  # whitney or accessory loop id
    cost: int


@dataclass(frozen=True)
class BreakLoop:
    loop: str
    via_whitney: str


@dataclass(frozen=True)
class NormanTrick:
    finger: str
    delta: tuple[tuple[int, int], ...]  # (target sphere, added intersections)


@dataclass(frozen=True)
class CancelPair:
    ids: tuple[str, ...]


Step = ReplaceCap | BreakLoop | NormanTrick | CancelPair


@dataclass(frozen=True)
class Outcome:
    kind: str  # "product" or "positive-obstruction"
    witness_loop: str | None = None
    note: str | None = None


@dataclass(frozen=True)
class StabilizationPlan:
    k: int
    blowups: int
    steps: tuple[Step, ...]
    outcome: Outcome


# -- pipeline stages -----------------------------------------------------

def replace_nonpositive_caps(
        r: RibbonDescriptor) -> tuple[RibbonDescriptor, list[Step], int, int]:
    """Swap every non-positive tree cap for a standard 2-handle.

    Returns the updated descriptor, the ReplaceCap steps, the blow-up total
    and the tower level bound k (max prune depth over replaced caps).
    """
    steps: list[Step] = []
    blowups = 0
    k = 0
    caps = dict(r.caps)
    for cid, cap in r.caps:
        if cap.standard or cap.positive:
            continue
        cost = kuga_blowup_cost(cap.tree)
        depth = prune_depth(cap.tree)
        assert depth is not None
        steps.append(ReplaceCap(cid, cost))
        blowups += cost
        k = max(k, depth)
        caps[cid] = STANDARD_CAP
    out = RibbonDescriptor(r.middle, tuple((cid, caps[cid]) for cid, _ in r.caps))
    return out, steps, blowups, k


def _drop_finger(m: MiddleLevelData, fid: str,
                 with_loops: bool = True) -> MiddleLevelData:
    loops = m.accessory_loops
    if with_loops:
        loops = tuple(l for l in loops if fid not in l.fingers)
    return MiddleLevelData(
        m.pairs, tuple(f for f in m.fingers if f.id != fid), loops)


def break_loops(r: RibbonDescriptor) -> tuple[RibbonDescriptor, list[Step]]:
    """Whitney-trick removal of standard-capped fingers and their loops.

    Every loop whose Whitney set contains a standard-capped Whitney loop is
    broken by removing that finger; standard-capped fingers left
    unreferenced are then cancelled outright.
    """
    steps: list[Step] = []
    m = r.middle
    capmap = dict(r.caps)
    while True:
        hit = None
        for loop in m.accessory_loops:
            for fid in loop.fingers:
                f = m.finger(fid)
                if capmap[f.whitney].standard:
                    hit = (loop, f)
                    break
            if hit:
                break
        if hit is None:
            break
        loop, f = hit
        for l in m.accessory_loops:
            if f.id in l.fingers:
                steps.append(BreakLoop(l.id, f.whitney))
                capmap.pop(l.id, None)
        m = _drop_finger(m, f.id)
        capmap.pop(f.whitney, None)
    # Unreferenced standard-capped fingers cancel as Whitney-trick pairs.
    referenced = {fid for l in m.accessory_loops for fid in l.fingers}
    for f in list(m.fingers):
        if f.id not in referenced and capmap[f.whitney].standard:
            steps.append(CancelPair((f.id, f.whitney)))
            m = _drop_finger(m, f.id)
            capmap.pop(f.whitney, None)
    # Caps of removed loops go with them.
    live = ({f.whitney for f in m.fingers}
            | {l.id for l in m.accessory_loops})
    capmap = {cid: cap for cid, cap in capmap.items() if cid in live}
    return make_descriptor(m, capmap), steps


def norman_trick_step(g: list[list[int]], from_a: int, through_b: int) -> dict[int, int]:
    """Apply one Norman trick to G in place, removing a finger pair.

    Two parallel copies of A_j (j = through_b) are tubed into A_i; each
    copy carries A_j's extra intersections, so row i gains twice row j's
    excess and the finger's own pair G[i][j] drops by 2.  Returns the
    per-column delta (excluding the -2 on the finger entry).
    """
    i, j = from_a - 1, through_b - 1
    if g[i][j] < 2:
        raise StabilizationError(
            f"no finger pair left between A_{from_a} and B_{through_b}")
    delta: dict[int, int] = {}
    excess = [g[j][t] - (1 if t == j else 0) for t in range(len(g))]
    for t, x in enumerate(excess):
        if x:
            g[i][t] += 2 * x
            delta[t + 1] = 2 * x
    g[i][j] -= 2
    return delta


@dataclass(frozen=True)
class NormanResult:
    steps: tuple[NormanTrick, ...]
    final: tuple[tuple[int, ...], ...]
    cycle: tuple[int, ...] | None = None

    @property
    def ok(self) -> bool:
        return self.cycle is None


def norman_eliminate(m: MiddleLevelData) -> NormanResult:
    """Remove every finger by Norman tricks, or report a blocking cycle.

    Fingers are processed grouped by source sphere, sources taken sinks
    first in the finger graph, so each processed finger sees a clean target
    row and contributes no cascade intersections.
    """
    graph = finger_graph(m, restrict_to_loops=False)
    if graph.cycles:
        return NormanResult((), _freeze(geometric_matrix(m)),
                            cycle=graph.cycles[0])
    g = geometric_matrix(m)
    order = _reverse_topological(m.pairs, graph)
    steps: list[NormanTrick] = []
    for source in order:
        for f in m.fingers:
            if f.from_a != source:
                continue
            j = f.through_b - 1
            row = g[j]
            if any(row[t] != (1 if t == j else 0) for t in range(m.pairs)):
                raise StabilizationError(
                    f"target row B_{f.through_b} not clean at finger {f.id}")
            delta = norman_trick_step(g, f.from_a, f.through_b)
            steps.append(NormanTrick(f.id, tuple(sorted(delta.items()))))
    return NormanResult(tuple(steps), _freeze(g))


def _freeze(g: list[list[int]]) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(row) for row in g)


def _reverse_topological(pairs: int, graph: FingerGraph) -> list[int]:
    """Sphere indices ordered sinks first along finger edges."""
    succ: dict[int, set[int]] = {n: set() for n in range(1, pairs + 1)}
    for _, a, b in graph.edges:
        succ[a].add(b)
    done: list[int] = []
    state: dict[int, int] = {}

    def dfs(v: int) -> None:
        state[v] = 1
        for w in sorted(succ[v]):
            if w not in state:
                dfs(w)
        state[v] = 2
        done.append(v)

    for n in range(1, pairs + 1):
        if n not in state:
            dfs(n)
    return done


# -- end-to-end planning -------------------------------------------------

PRODUCT_NOTE = "product structure certified; hence the cobordism is not stably non-product"


def stabilization_plan(r: RibbonDescriptor) -> StabilizationPlan:
    """Full pipeline: obstruction gate, cap replacement, loop breaking,
    Norman cascades, terminal pair cancellation."""
    decision = is_positive_ribbon(r)
    if decision.positive:
        return StabilizationPlan(
            k=0, blowups=0, steps=(),
            outcome=Outcome("positive-obstruction",
                            witness_loop=decision.witness_loop))
    r1, steps, blowups, k = replace_nonpositive_caps(r)
    r2, break_steps = break_loops(r1)
    steps = steps + break_steps
    result = norman_eliminate(r2.middle)
    if not result.ok:
        loops = [l.id for l in r2.middle.accessory_loops
                 if any(r2.middle.finger(fid).from_a in result.cycle
                        for fid in l.fingers)]
        raise StabilizationError(
                f"finger cycle {result.cycle} survives loop breaking"
                + (f" (loops {loops})" if loops else ""))
    m = r2.middle
    for trick in result.steps:
        broken = [l for l in m.accessory_loops if trick.finger in l.fingers]
        steps.append(trick)
        for l in broken:
            steps.append(BreakLoop(l.id, m.finger(trick.finger).whitney))
        m = _drop_finger(m, trick.finger)
    for i in range(1, m.pairs + 1):
        steps.append(CancelPair((f"A{i}", f"B{i}")))
    return StabilizationPlan(
        k=k, blowups=blowups, steps=tuple(steps),
        outcome=Outcome("product", note=PRODUCT_NOTE))


# -- replay verification -------------------------------------------------

@dataclass(frozen=True)
class VerifyResult:
    ok: bool
    failing_step: int | None = None
    reason: str | None = None


def verify_plan(r: RibbonDescriptor, p: StabilizationPlan) -> VerifyResult:
    """Replay every step against the descriptor, checking preconditions,
    recorded deltas, the blow-up total and the terminal product state."""
    if p.outcome.kind == "positive-obstruction":
        decision = is_positive_ribbon(r)
        if not decision.positive:
            return VerifyResult(False, None, "descriptor is not positive")
        if p.outcome.witness_loop != decision.witness_loop:
            return VerifyResult(False, None, "witness loop mismatch")
        return VerifyResult(True)

    m = r.middle
    capmap = dict(r.caps)
    g = geometric_matrix(m)
    blowups = 0
    spheres = set(range(1, m.pairs + 1))
    for idx, step in enumerate(p.steps):
        if isinstance(step, ReplaceCap):
            cap = capmap.get(step.target)
            if cap is None or cap.standard or cap.positive:
                return VerifyResult(False, idx,
                                    f"{step.target} has no non-positive tree cap")
            if kuga_blowup_cost(cap.tree) != step.cost:
                return VerifyResult(False, idx,
                                    f"recorded cost {step.cost} is wrong")
            capmap[step.target] = STANDARD_CAP
            blowups += step.cost
        elif isinstance(step, BreakLoop):
            try:
                loop = m.loop(step.loop)
            except KeyError:
                return VerifyResult(False, idx, f"loop {step.loop} not present")
            finger = next((f for f in m.fingers
                           if f.whitney == step.via_whitney), None)
            if finger is not None:
                if finger.id not in loop.fingers:
                    return VerifyResult(False, idx,
                                        f"loop {step.loop} does not cross "
                                        f"whitney {step.via_whitney}")
                if not capmap[step.via_whitney].standard:
                    return VerifyResult(
                        False, idx,
                        f"whitney {step.via_whitney} is not standard-capped")
                g[finger.from_a - 1][finger.through_b - 1] -= 2
                m = _drop_finger(m, finger.id, with_loops=False)
                capmap.pop(step.via_whitney, None)
            # finger already removed: the loop is simply broken.
            m = MiddleLevelData(
                m.pairs, m.fingers,
                tuple(l for l in m.accessory_loops if l.id != step.loop))
            capmap.pop(step.loop, None)
        elif isinstance(step, NormanTrick):
            try:
                f = m.finger(step.finger)
            except KeyError:
                return VerifyResult(False, idx,
                                    f"finger {step.finger} not present")
            j = f.through_b - 1
            if any(g[j][t] != (1 if t == j else 0) for t in range(m.pairs)):
                return VerifyResult(
                    False, idx,
                    f"target row B_{f.through_b} not clean at {step.finger}")
            delta = norman_trick_step(g, f.from_a, f.through_b)
            if tuple(sorted(delta.items())) != step.delta:
                return VerifyResult(False, idx, "recorded delta rows mismatch")
            m = _drop_finger(m, f.id, with_loops=False)
            capmap.pop(f.whitney, None)
        elif isinstance(step, CancelPair):
            if len(step.ids) == 2 and step.ids[0].startswith("A") \
                    and step.ids[1].startswith("B") \
                    and step.ids[0][1:] == step.ids[1][1:] \
                    and step.ids[0][1:].isdigit():
                i = int(step.ids[0][1:])
                if i not in spheres:
                    return VerifyResult(False, idx, f"sphere pair {i} missing")
                if any(f.from_a == i or f.through_b == i for f in m.fingers):
                    return VerifyResult(
                        False, idx, f"sphere pair {i} still carries fingers")
                if any(g[i - 1][t] != (1 if t == i - 1 else 0)
                       for t in range(m.pairs)):
                    return VerifyResult(
                        False, idx, f"row A_{i} carries extra intersections")
                spheres.discard(i)
            else:
                fid, wid = step.ids
                try:
                    f = m.finger(fid)
                except KeyError:
                    return VerifyResult(False, idx, f"finger {fid} not present")
                if f.whitney != wid or not capmap[wid].standard:
                    return VerifyResult(
                        False, idx, f"{fid}/{wid} is not a standard-capped pair")
                if any(fid in l.fingers for l in m.accessory_loops):
                    return VerifyResult(
                        False, idx, f"finger {fid} is still on a loop")
                g[f.from_a - 1][f.through_b - 1] -= 2
                m = _drop_finger(m, fid)
                capmap.pop(wid, None)
        else:
            return VerifyResult(False, idx, f"unknown step {step!r}")
    if blowups != p.blowups:
        return VerifyResult(False, None,
                            f"blow-up total {blowups} != recorded {p.blowups}")
    if spheres:
        return VerifyResult(False, None,
                            f"sphere pairs {sorted(spheres)} were never "
                            "cancelled")
    if m.fingers:
        return VerifyResult(False, None, "fingers remain at the end")
    if m.accessory_loops:
        return VerifyResult(False, None, "accessory loops remain at the end")
    if any(not cap.standard for cap in capmap.values()):
        return VerifyResult(False, None, "non-standard caps remain at the end")
    return VerifyResult(True)
