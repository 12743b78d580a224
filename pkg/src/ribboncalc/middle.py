"""Middle-level intersection data of an h-cobordism and ribbon descriptors.

The data records k sphere pairs (attaching spheres A_1..A_k against belt
spheres B_1..B_k), finger moves pushing an A sphere through a B sphere,
accessory loops threading designated finger points, and a cap (standard
2-handle or signed-tree Casson handle) for every Whitney loop and accessory
loop.  The algebraic A.B intersection matrix is always the identity; each
finger contributes a cancelling pair, so only geometric counts vary.
"""

from __future__ import annotations

from dataclasses import dataclass

from .trees import SignedTree, is_positive


class MiddleError(Exception):
    pass


@dataclass(frozen=True)
class Finger:
    id: str
    from_a: int
    through_b: int
    whitney: str


@dataclass(frozen=True)
class AccessoryLoop:
    id: str
    fingers: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.fingers:
            raise ValueError(f"accessory loop {self.id} traverses no fingers")


@dataclass(frozen=True)
class MiddleLevelData:
    """Sphere pairs, fingers and accessory loops.

    Construction does not validate; :func:`validate_middle` reports
    violations as data, and replay code may hold transient states where a
    loop still names a just-removed finger.
    """

    pairs: int
    fingers: tuple[Finger, ...] = ()
    accessory_loops: tuple[AccessoryLoop, ...] = ()

    def finger(self, fid: str) -> Finger:
        for f in self.fingers:
            if f.id == fid:
                return f
        raise KeyError(fid)

    def loop(self, lid: str) -> AccessoryLoop:
        for l in self.accessory_loops:
            if l.id == lid:
                return l
        raise KeyError(lid)


def validate_middle(m: MiddleLevelData) -> list[str]:
    out = []
    if m.pairs < 1:
        out.append(f"pairs = {m.pairs} must be positive")
    fids = [f.id for f in m.fingers]
    if len(set(fids)) != len(fids):
        out.append("duplicate finger ids")
    wids = [f.whitney for f in m.fingers]
    if len(set(wids)) != len(wids):
        out.append("duplicate whitney ids")
    for f in m.fingers:
        if not (1 <= f.from_a <= m.pairs and 1 <= f.through_b <= m.pairs):
            out.append(f"finger {f.id} references sphere outside 1..{m.pairs}")
    lids = [l.id for l in m.accessory_loops]
    if len(set(lids)) != len(lids):
        out.append("duplicate accessory loop ids")
    known = set(fids)
    for l in m.accessory_loops:
        for fid in l.fingers:
            if fid not in known:
                out.append(f"loop {l.id} references missing finger {fid}")
    return out


def geometric_matrix(m: MiddleLevelData) -> list[list[int]]:
    """G[i][j] = delta_ij + 2 * (number of fingers from A_i through B_j)."""
    g = [[1 if i == j else 0 for j in range(m.pairs)] for i in range(m.pairs)]
    for f in m.fingers:
        g[f.from_a - 1][f.through_b - 1] += 2
    return g


def whitney_set(m: MiddleLevelData, loop_id: str) -> set[str]:
    """Whitney ids of exactly the fingers traversed by the loop."""
    loop = m.loop(loop_id)
    return {m.finger(fid).whitney for fid in loop.fingers}


# -- finger graph --------------------------------------------------------

@dataclass(frozen=True)
class FingerGraph:
    """Directed multigraph on sphere indices; one edge per finger."""

    nodes: tuple[int, ...]
    edges: tuple[tuple[str, int, int], ...]  # (finger id, from_a, through_b)
    cycles: tuple[tuple[int, ...], ...]

    @property
    def acyclic(self) -> bool:
        return not self.cycles


def finger_graph(m: MiddleLevelData, restrict_to_loops: bool = True) -> FingerGraph:
    """The finger multigraph with a cycle report.

    With ``restrict_to_loops`` the cycle search starts only from fingers
    referenced by accessory loops; otherwise every finger seeds it.
    """
    edges = tuple((f.id, f.from_a, f.through_b) for f in m.fingers)
    if restrict_to_loops:
        seeds = {m.finger(fid).from_a
                 for l in m.accessory_loops for fid in l.fingers}
    else:
        seeds = {f.from_a for f in m.fingers}
    succ: dict[int, list[int]] = {}
    for _, a, b in edges:
        succ.setdefault(a, []).append(b)
    cycles: list[tuple[int, ...]] = []
    seen_cycles: set[frozenset[int]] = set()
    state: dict[int, int] = {}
    stack: list[int] = []

    def dfs(v: int) -> None:
        state[v] = 1
        stack.append(v)
        for w in succ.get(v, ()):
            if state.get(w) == 1:
                cyc = tuple(stack[stack.index(w):])
                key = frozenset(cyc)
                if key not in seen_cycles:
                    seen_cycles.add(key)
                    cycles.append(cyc)
            elif state.get(w) != 2:
                dfs(w)
        state[v] = 2
        stack.pop()

    for s in sorted(seeds):
        if state.get(s) != 2:
            state.pop(s, None)
            dfs(s)
    return FingerGraph(nodes=tuple(range(1, m.pairs + 1)), edges=edges,
                       cycles=tuple(cycles))


# -- caps and descriptors ------------------------------------------------

@dataclass(frozen=True)
class Cap:
    """Either a standard 2-handle or a Casson handle given by a signed tree."""

    tree: SignedTree | None = None

    @property
    def standard(self) -> bool:
        return self.tree is None

    @property
    def positive(self) -> bool:
        return self.tree is not None and is_positive(self.tree)


STANDARD_CAP = Cap()


@dataclass(frozen=True)
class RibbonDescriptor:
    """Middle-level data plus a total cap assignment.

    ``caps`` maps every whitney id and every accessory loop id to a Cap.
    """

    middle: MiddleLevelData
    caps: tuple[tuple[str, Cap], ...] = ()

    def __post_init__(self) -> None:
        capmap = dict(self.caps)
        needed = ({f.whitney for f in self.middle.fingers}
                  | {l.id for l in self.middle.accessory_loops})
        missing = needed - set(capmap)
        if missing:
            raise MiddleError(f"missing caps for {sorted(missing)}")
        extra = set(capmap) - needed
        if extra:
            raise MiddleError(f"caps for unknown ids {sorted(extra)}")

    def cap(self, cid: str) -> Cap:
        return dict(self.caps)[cid]


def make_descriptor(middle: MiddleLevelData,
                    caps: dict[str, Cap]) -> RibbonDescriptor:
    needed = [f.whitney for f in middle.fingers] + \
             [l.id for l in middle.accessory_loops]
    return RibbonDescriptor(middle, tuple((cid, caps[cid]) for cid in needed))


# -- the positivity decision ---------------------------------------------

@dataclass(frozen=True)
class PositivityDecision:
    positive: bool
    witness_loop: str | None
    refusals: tuple[tuple[str, str], ...]  # (loop id, first failed clause)

    def __bool__(self) -> bool:
        return self.positive


def is_positive_ribbon(r: RibbonDescriptor) -> PositivityDecision:
    """Whether some accessory loop satisfies all positivity clauses.

    A loop qualifies when (a) every cap of its Whitney set is a positive
    Casson handle, (b) for a singleton Whitney set the loop's own cap is a
    positive Casson handle, and (c) for a larger Whitney set the loop
    traverses at most one finger emanating from any single A sphere.
    """
    refusals = []
    for loop in r.middle.accessory_loops:
        ws = whitney_set(r.middle, loop.id)
        bad = next((w for w in sorted(ws) if not r.cap(w).positive), None)
        if bad is not None:
            refusals.append(
                (loop.id, f"whitney loop {bad} is not capped by a positive handle"))
            continue
        if len(ws) == 1:
            if not r.cap(loop.id).positive:
                refusals.append(
                    (loop.id, "singleton whitney set but the accessory cap is "
                              "not a positive handle"))
                continue
        else:
            sources = [r.middle.finger(fid).from_a for fid in loop.fingers]
            dup = next((a for a in sorted(set(sources))
                        if sources.count(a) > 1), None)
            if dup is not None:
                refusals.append(
                    (loop.id, f"traverses more than one finger from A_{dup}"))
                continue
        return PositivityDecision(True, loop.id, tuple(refusals))
    if not r.middle.accessory_loops:
        refusals.append(("", "no accessory loops"))
    return PositivityDecision(False, None, tuple(refusals))
