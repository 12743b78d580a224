"""Kirby diagrams at the linking-matrix level, and the legal move set.

A diagram records, for every pair of components, the algebraic linking
number and a conservative geometric intersection count.  No planar data is
kept: moves update linking data by the fixed bilinear rules, and geometric
linking can only be lowered by an explicit :func:`assert_geometric` step
standing in for an externally justified isotopy.

Diagrams are immutable values; every move returns a new diagram.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .abelian import AbelianGroup, cokernel, symmetric_signature

DOTTED = "dotted"
FRAMED = "framed"
PAREN = "parenframed"

_KINDS = (DOTTED, FRAMED, PAREN)


class MoveError(Exception):
    """A move's precondition failed."""


class ForbiddenMove(MoveError):
    """A dotted circle would slide over an undotted component."""


@dataclass(frozen=True)
class Component:
    id: str
    kind: str
    framing: int | None = None
    label: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"unknown component kind {self.kind!r}")
        if self.kind == DOTTED and self.framing is not None:
            raise ValueError(f"dotted component {self.id} carries a framing")
        if self.kind != DOTTED and self.framing is None:
            raise ValueError(f"component {self.id} needs a framing")


@dataclass(frozen=True)
class Violation:
    code: str
    subjects: tuple[str, ...]
    message: str


def _pair(i: str, j: str) -> tuple[str, str]:
    return (i, j) if i <= j else (j, i)


@dataclass(frozen=True)
class KirbyDiagram:
    """A framed link with dotted circles, plus 3-/4-handle bookkeeping.

    ``links`` stores off-diagonal (alg, geom) entries for unordered id pairs;
    unlisted pairs are (0, 0).  Diagonal algebraic entries are the framings
    carried by the components themselves (0 for dotted).
    """

    name: str
    components: tuple[Component, ...] = ()
    links: tuple[tuple[tuple[str, str], int, int], ...] = ()
    three_handles: int = 0
    four_handles: int = 0
    hidden_one_handles: int = 0
    dual_flag: bool = False
    notes: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        seen = set()
        for c in self.components:
            if c.id in seen:
                raise ValueError(f"duplicate component id {c.id}")
            seen.add(c.id)
        for (i, j), _, _ in self.links:
            if i == j:
                raise ValueError(f"self-linking entry for {i}")
            if i not in seen or j not in seen:
                raise ValueError(f"link references unknown component {i}/{j}")

    # -- queries ---------------------------------------------------------

    def ids(self) -> tuple[str, ...]:
        return tuple(c.id for c in self.components)

    def component(self, cid: str) -> Component:
        for c in self.components:
            if c.id == cid:
                return c
        raise KeyError(cid)

    def has(self, cid: str) -> bool:
        return any(c.id == cid for c in self.components)

    def _linkmap(self) -> dict[tuple[str, str], tuple[int, int]]:
        return {p: (a, g) for p, a, g in self.links}

    def alg(self, i: str, j: str) -> int:
        if i == j:
            c = self.component(i)
            return c.framing or 0
        return self._linkmap().get(_pair(i, j), (0, 0))[0]

    def geom(self, i: str, j: str) -> int:
        if i == j:
            return 0
        return self._linkmap().get(_pair(i, j), (0, 0))[1]

    def framing(self, cid: str) -> int:
        return self.component(cid).framing or 0

    def linking_matrix(self) -> list[list[int]]:
        """Full symmetric matrix, dotted diagonal entries as 0."""
        ids = self.ids()
        return [[self.alg(i, j) for j in ids] for i in ids]

    def framed_submatrix(self) -> list[list[int]]:
        ids = [c.id for c in self.components if c.kind != DOTTED]
        return [[self.alg(i, j) for j in ids] for i in ids]

    # -- construction helpers -------------------------------------------

    def with_links(self, linkmap: dict[tuple[str, str], tuple[int, int]],
                   components: tuple[Component, ...] | None = None,
                   **changes) -> "KirbyDiagram":
        comps = components if components is not None else self.components
        order = {c.id: n for n, c in enumerate(comps)}
        entries = []
        for (i, j), (a, g) in linkmap.items():
            if (a, g) == (0, 0):
                continue
            entries.append((_pair(i, j), a, g))
        entries.sort(key=lambda e: tuple(sorted((order[e[0][0]], order[e[0][1]]))))
        return replace(self, components=comps, links=tuple(entries), **changes)

    def _mutable(self) -> dict[tuple[str, str], tuple[int, int]]:
        return dict(self._linkmap())


def empty_diagram(name: str = "empty") -> KirbyDiagram:
    return KirbyDiagram(name=name)


# -- validation ----------------------------------------------------------

def validate(d: KirbyDiagram) -> list[Violation]:
    """Every violated type invariant, with the offending pair."""
    out: list[Violation] = []
    kinds = {c.id: c.kind for c in d.components}
    for (i, j), a, g in d.links:
        if g < 0:
            out.append(Violation("negative-geometric", (i, j),
                                 f"geom[{i}][{j}] = {g} is negative"))
        if abs(a) > g:
            out.append(Violation("magnitude", (i, j),
                                 f"|alg[{i}][{j}]| = {abs(a)} exceeds geom = {g}"))
        if (g - a) % 2 != 0:
            out.append(Violation("parity", (i, j),
                                 f"geom[{i}][{j}] = {g} and alg = {a} differ mod 2"))
        if kinds[i] == DOTTED and kinds[j] == DOTTED and a != 0:
            out.append(Violation("dotted-dotted", (i, j),
                                 f"dotted circles {i}, {j} have alg = {a}"))
    if any(c.kind == PAREN for c in d.components) and not d.dual_flag:
        paren = next(c.id for c in d.components if c.kind == PAREN)
        out.append(Violation("paren-without-dual", (paren,),
                             f"{paren} is paren-framed but dual_flag is unset"))
    for count, label in ((d.three_handles, "three_handles"),
                         (d.four_handles, "four_handles"),
                         (d.hidden_one_handles, "hidden_one_handles")):
        if count < 0:
            out.append(Violation("negative-count", (label,),
                                 f"{label} = {count} is negative"))
    return out


# -- invariants ----------------------------------------------------------

def euler_char(d: KirbyDiagram) -> int:
    dotted = sum(1 for c in d.components if c.kind == DOTTED)
    handles2 = sum(1 for c in d.components if c.kind != DOTTED)
    return (1 - (dotted + d.hidden_one_handles) + handles2
            - d.three_handles + d.four_handles)


def signature(d: KirbyDiagram) -> int:
    return symmetric_signature(d.framed_submatrix())


def boundary_homology(d: KirbyDiagram, side: str = "plus") -> tuple[AbelianGroup, bool]:
    """First homology of a boundary component, plus a 3-handle caveat flag.

    ``plus``: cokernel of the full linking matrix (dotted diagonals 0).
    ``minus``: cokernel of the paren-framed submatrix; requires a dual
    diagram.  Both sides gain a free Z summand per hidden 1-handle.  The
    caveat flag is set when 3-handles exist: the reported group is the
    pre-3-handle boundary.
    """
    if side == "plus":
        matrix = d.linking_matrix()
        gens = len(d.components)
    elif side == "minus":
        if not d.dual_flag:
            raise MoveError("minus boundary requires a dual decomposition")
        ids = [c.id for c in d.components if c.kind == PAREN]
        matrix = [[d.alg(i, j) for j in ids] for i in ids]
        gens = len(ids)
    else:
        raise ValueError(f"unknown side {side!r}")
    group = cokernel(matrix, generators=gens)
    group = AbelianGroup(group.free_rank + d.hidden_one_handles, group.torsion)
    return group, d.three_handles > 0


# -- moves ---------------------------------------------------------------

def handle_slide(d: KirbyDiagram, moving: str, over: str, sign: int) -> KirbyDiagram:
    """Band-sum ``moving`` with a framed parallel copy of ``over``."""
    if sign not in (1, -1):
        raise MoveError("slide sign must be +1 or -1")
    if moving == over:
        raise MoveError("cannot slide a component over itself")
    m = d.component(moving)
    o = d.component(over)
    if m.kind == DOTTED and o.kind != DOTTED:
        raise ForbiddenMove(
            f"dotted circle {moving} may not slide over undotted {over}")
    if o.kind == PAREN:
        raise MoveError(f"cannot slide over paren-framed component {over}")
    f_o = o.framing or 0
    links = d._mutable()

    def bump(i, j, da, dg):
        key = _pair(i, j)
        a, g = links.get(key, (0, 0))
        links[key] = (a + da, g + dg)

    for k in d.ids():
        if k in (moving, over):
            continue
        bump(moving, k, sign * d.alg(over, k), d.geom(over, k))
    bump(moving, over, sign * f_o, abs(f_o))
    comps = d.components
    if m.kind == FRAMED:
        new_f = m.framing + f_o + 2 * sign * d.alg(moving, over)
        comps = tuple(replace(c, framing=new_f) if c.id == moving else c
                      for c in comps)
    return d.with_links(links, components=comps)


def assert_geometric(d: KirbyDiagram, i: str, j: str, g: int) -> KirbyDiagram:
    """Record an externally justified isotopy lowering geometric linking."""
    d.component(i), d.component(j)
    cur = d.geom(i, j)
    a = d.alg(i, j)
    if g > cur:
        raise MoveError(f"geom[{i}][{j}] = {cur} cannot be raised to {g}")
    if g < abs(a):
        raise MoveError(f"geom[{i}][{j}] = {g} would drop below |alg| = {abs(a)}")
    if (g - a) % 2 != 0:
        raise MoveError(f"geom[{i}][{j}] = {g} has wrong parity against alg = {a}")
    links = d._mutable()
    links[_pair(i, j)] = (a, g)
    return d.with_links(links)


def _fresh_id(d: KirbyDiagram, base: str) -> str:
    if not d.has(base):
        return base
    n = 2
    while d.has(f"{base}{n}"):
        n += 1
    return f"{base}{n}"


def blow_up(d: KirbyDiagram, sign: int, new_id: str | None = None) -> KirbyDiagram:
    """Connected sum with +-CP^2: an unlinked (+-1)-framed unknot."""
    if sign not in (1, -1):
        raise MoveError("blow-up sign must be +1 or -1")
    cid = new_id or _fresh_id(d, "e")
    if d.has(cid):
        raise MoveError(f"component id {cid} already in use")
    comps = d.components + (Component(cid, FRAMED, sign),)
    return replace(d, components=comps)


def blow_down(d: KirbyDiagram, e: str) -> KirbyDiagram:
    c = d.component(e)
    if c.kind != FRAMED or c.framing not in (1, -1):
        raise MoveError(f"{e} is not a (+-1)-framed 2-handle")
    for k in d.ids():
        if k != e and d.geom(e, k) != 0:
            raise MoveError(f"{e} is geometrically linked with {k}")
    comps = tuple(x for x in d.components if x.id != e)
    links = {p: v for p, v in d._linkmap().items() if e not in p}
    return d.with_links(links, components=comps)


def twist_blow_up(d: KirbyDiagram, t: int, strands: dict[str, int],
                  new_id: str | None = None) -> KirbyDiagram:
    """Insert a full t-twist on the listed strands via a t-framed blow-up.

    This is the exact composite of blowing up a t-framed unknot and sliding
    every listed strand over it m_c times: the strands absorb the twist
    (framing += t*m_c^2, pairwise linking += t*m_c*m_c') and the new
    component stays linked to each strand with linking number t*m_c.  With
    that linked column the cokernel of the extended matrix reduces to the
    original one by a unit pivot, so the plus boundary is unchanged; the
    signature gains exactly t.
    """
    if t not in (1, -1):
        raise MoveError("twist sign must be +1 or -1")
    if not strands or all(m == 0 for m in strands.values()):
        raise MoveError("twist needs at least one strand with nonzero multiplicity")
    for cid in strands:
        if d.component(cid).kind != FRAMED:
            # Only 2-handle strands can be slid over the new handle; a
            # dotted circle may not slide over an undotted component.
            raise MoveError(f"can only twist framed strands, not {cid}")
    eid = new_id or _fresh_id(d, "e")
    if d.has(eid):
        raise MoveError(f"component id {eid} already in use")
    links = d._mutable()
    listed = list(strands)
    for x in range(len(listed)):
        for y in range(x + 1, len(listed)):
            ci, cj = listed[x], listed[y]
            key = _pair(ci, cj)
            a, g = links.get(key, (0, 0))
            links[key] = (a + t * strands[ci] * strands[cj],
                          g + abs(strands[ci] * strands[cj]))
    for cid, m in strands.items():
        if m:
            links[_pair(cid, eid)] = (t * m, abs(m))
    comps = tuple(
        replace(c, framing=c.framing + t * strands[c.id] ** 2)
        if c.id in strands and c.kind == FRAMED else c
        for c in d.components)
    comps = comps + (Component(eid, FRAMED, t),)
    return d.with_links(links, components=comps)


def zero_dot_swap(d: KirbyDiagram, c: str, note: str | None = None) -> KirbyDiagram:
    """Trade a 0-framed 2-handle for a dotted circle, or back."""
    comp = d.component(c)
    if comp.kind == FRAMED:
        if comp.framing != 0:
            raise MoveError(f"{c} has framing {comp.framing}, not 0")
        for other in d.components:
            if other.id != c and other.kind == DOTTED and d.alg(c, other.id) != 0:
                raise MoveError(
                    f"{c} links dotted circle {other.id}; cannot become dotted")
        new = Component(c, DOTTED, None, comp.label)
        notes = d.notes + ((note,) if note else
                           (f"zero-dot swap on {c}: ribbon condition not verified",))
    elif comp.kind == DOTTED:
        new = Component(c, FRAMED, 0, comp.label)
        notes = d.notes + ((note,) if note else ())
    else:
        raise MoveError(f"{c} is paren-framed; swap applies to dotted/0-framed")
    comps = tuple(new if x.id == c else x for x in d.components)
    return replace(d, components=comps, notes=notes)


ONE_TWO = "12"
TWO_THREE = "23"


def add_cancelling_pair(d: KirbyDiagram, kind: str,
                        ids: tuple[str, ...] | None = None) -> KirbyDiagram:
    """Add a complementary 1-2 pair (dotted Hopf pair) or 2-3 pair."""
    if kind == ONE_TWO:
        a, b = ids or (_fresh_id(d, "dpair"), _fresh_id(d, "hpair"))
        if d.has(a) or d.has(b) or a == b:
            raise MoveError(f"pair ids {a}, {b} unavailable")
        comps = d.components + (Component(a, DOTTED), Component(b, FRAMED, 0))
        links = d._mutable()
        links[_pair(a, b)] = (1, 1)
        return d.with_links(links, components=comps)
    if kind == TWO_THREE:
        (b,) = ids or (_fresh_id(d, "hpair"),)
        if d.has(b):
            raise MoveError(f"pair id {b} unavailable")
        comps = d.components + (Component(b, FRAMED, 0),)
        return replace(d, components=comps, three_handles=d.three_handles + 1)
    raise MoveError(f"unknown cancelling pair kind {kind!r}")


def cancel_pair(d: KirbyDiagram, a: str | None, b: str) -> KirbyDiagram:
    """Remove a complementary 1-2 pair (a dotted, b framed) or 2-3 pair.

    For the 2-3 case pass ``a=None``; ``b`` must be an unlinked 0-framed
    unknot and a 3-handle is consumed.
    """
    cb = d.component(b)
    if a is None:
        if cb.kind != FRAMED or cb.framing != 0:
            raise MoveError(f"{b} is not a 0-framed 2-handle")
        for k in d.ids():
            if k != b and d.geom(b, k) != 0:
                raise MoveError(f"{b} is geometrically linked with {k}")
        if d.three_handles < 1:
            raise MoveError("no 3-handle available to cancel against")
        comps = tuple(x for x in d.components if x.id != b)
        links = {p: v for p, v in d._linkmap().items() if b not in p}
        out = d.with_links(links, components=comps)
        return replace(out, three_handles=out.three_handles - 1)
    ca = d.component(a)
    if ca.kind != DOTTED:
        raise MoveError(f"{a} is not dotted")
    if cb.kind != FRAMED:
        raise MoveError(f"{b} is not a 2-handle")
    if abs(d.alg(a, b)) != 1 or d.geom(a, b) != 1:
        raise MoveError(f"{a} and {b} are not a geometric Hopf pair")
    for k in d.ids():
        if k in (a, b):
            continue
        for x in (a, b):
            if d.geom(x, k) != 0:
                raise MoveError(f"{x} is geometrically linked with {k}")
    comps = tuple(x for x in d.components if x.id not in (a, b))
    links = {p: v for p, v in d._linkmap().items()
             if a not in p and b not in p}
    return d.with_links(links, components=comps)


def dualize(d: KirbyDiagram) -> KirbyDiagram:
    """Dual handle decomposition: mirror, paren framings, 0-framed meridians.

    The diagram is assumed closed up with one 0- and one 4-handle; 3-handles
    of the original become hidden 1-handles of the dual, and original dotted
    circles become the dual's (counted, invisible) 3-handles.
    """
    if d.dual_flag:
        raise MoveError("diagram is already a dual decomposition")
    if any(c.kind == PAREN for c in d.components):
        raise MoveError("diagram already contains paren-framed components")
    comps: list[Component] = []
    for c in d.components:
        if c.kind == DOTTED:
            comps.append(Component(c.id, PAREN, 0, c.label))
        else:
            comps.append(Component(c.id, PAREN, -(c.framing or 0), c.label))
    links = {p: (-a, g) for p, (a, g) in d._linkmap().items()}
    meridians = []
    for c in d.components:
        if c.kind == FRAMED:
            mid = f"m_{c.id}"
            if d.has(mid):
                raise MoveError(f"meridian id {mid} collides with a component")
            meridians.append(Component(mid, FRAMED, 0))
            links[_pair(mid, c.id)] = (1, 1)
    dotted = sum(1 for c in d.components if c.kind == DOTTED)
    out = KirbyDiagram(
        name=f"{d.name}*",
        components=tuple(comps) + tuple(meridians),
        three_handles=dotted,
        four_handles=1,
        hidden_one_handles=d.three_handles,
        dual_flag=True,
        notes=d.notes,
    )
    return out.with_links(links)
