"""Link patterns (sector bases) and the action of the generators on them.

Sites are stored 0-based internally and printed 1-based.  A state is a partner
array where ``partner[k] == -1`` marks a defect.

Periodic states live on a cylinder cut at the seam between sites L and 1.
Gap ``g`` is the boundary segment between site ``g`` and site ``g + 1``
(0-based, mod L), so gap ``L - 1`` is the seam.  For distinct connectivities
(DC) the top of the cylinder is a puncture sitting in one face of the
matching; the face is recorded by its smallest gap.  An arc ``(a, b)`` with
``a < b`` crosses the seam exactly when the puncture gap lies under it.

For odd periodic systems the defect line runs to the top of the cylinder and
can wind.  Lifting to the universal cover, the defect sits at cover position
``x`` and the top end stays fixed; ``winding`` stores ``(x // L) % 2``, which
is the finite label left after the quotient ``J_0 e_L I_0 = J_0 I_0``.
"""

from __future__ import annotations

import enum
import json
from collections import deque
from dataclasses import dataclass, field
from math import comb
from typing import Iterator, Sequence

from .diagrams import TLDiagram


class BoundaryCondition(str, enum.Enum):
    CLOSED = "closed"
    PERIODIC_DC = "dc"
    PERIODIC_IC = "ic"
    PERIODIC_ODD = "podd"

    @property
    def periodic(self) -> bool:
        return self is not BoundaryCondition.CLOSED

    @classmethod
    def parse(cls, value: str | BoundaryCondition) -> BoundaryCondition:
        if isinstance(value, BoundaryCondition):
            return value
        try:
            return cls(value.lower())
        except ValueError:
            raise ValueError(f"unknown boundary condition {value!r} (closed|dc|ic|podd)") from None


BC = BoundaryCondition


def check_parity(L: int, bc: BC) -> None:
    if L < 1:
        raise ValueError("L must be positive")
    if bc in (BC.PERIODIC_DC, BC.PERIODIC_IC) and L % 2:
        raise ValueError(f"{bc.value} requires even L, got {L}")
    if bc is BC.PERIODIC_ODD and (L % 2 == 0 or L < 3):
        raise ValueError(f"podd requires odd L >= 3, got {L}")


@dataclass(frozen=True)
class LinkState:
    bc: BC
    partner: tuple[int, ...]
    puncture: int = -1
    loop: int = 0
    winding: int = 0

    @property
    def size(self) -> int:
        return len(self.partner)

    @property
    def defects(self) -> tuple[int, ...]:
        return tuple(k for k, p in enumerate(self.partner) if p < 0)

    def arcs(self) -> list[tuple[int, int]]:
        return [(k, p) for k, p in enumerate(self.partner) if k < p]

    def seam_flags(self) -> dict[tuple[int, int], bool]:
        if self.bc is not BC.PERIODIC_DC:
            return {arc: False for arc in self.arcs()}
        return {(a, b): a <= self.puncture < b for a, b in self.arcs()}

    def serialize(self) -> str:
        flags = self.seam_flags()
        tokens = []
        for k, p in enumerate(self.partner):
            if p < 0:
                tokens.append(f"*{k + 1}")
            elif k < p:
                tokens.append(f"({k + 1} {p + 1})" + ("~" if flags[(k, p)] else ""))
        text = "".join(tokens)
        if self.loop:
            text += "+O"
        if self.winding:
            text += f"@{self.winding}"
        return text

    def __str__(self) -> str:
        return self.serialize()


def parse_state(text: str, bc: BC | str) -> LinkState:
    """Inverse of :meth:`LinkState.serialize`."""
    bc = BC.parse(bc)
    winding = 0
    if "@" in text:
        text, w = text.split("@")
        winding = int(w)
    loop = 0
    if text.endswith("+O"):
        text, loop = text[:-2], 1
    pairs: list[tuple[int, int, bool]] = []
    defects: list[int] = []
    i = 0
    while i < len(text):
        if text[i] == "*":
            j = i + 1
            while j < len(text) and text[j].isdigit():
                j += 1
            defects.append(int(text[i + 1 : j]) - 1)
            i = j
        elif text[i] == "(":
            j = text.index(")", i)
            a, b = (int(t) - 1 for t in text[i + 1 : j].split())
            seam = j + 1 < len(text) and text[j + 1] == "~"
            pairs.append((a, b, seam))
            i = j + (2 if seam else 1)
        else:
            raise ValueError(f"cannot parse state {text!r}")
    L = 2 * len(pairs) + len(defects)
    partner = [-1] * L
    for a, b, _ in pairs:
        partner[a], partner[b] = b, a
    puncture = -1
    if bc is BC.PERIODIC_DC:
        crossing = [(a, b) for a, b, seam in pairs if seam]
        puncture = _puncture_from_flags(partner, crossing)
    state = LinkState(bc, tuple(partner), puncture, loop, winding)
    validate_state(state)
    return state


# -- generic helpers -------------------------------------------------------


def _arc_holds_gap(a: int, b: int, g: int) -> bool:
    lo, hi = min(a, b), max(a, b)
    return lo <= g < hi


def face_of(partner: Sequence[int], gap: int) -> int:
    """Smallest gap lying in the same face of the circular matching as ``gap``."""
    L = len(partner)
    arcs = [(k, p) for k, p in enumerate(partner) if k < p]
    for g in range(L):
        if all(_arc_holds_gap(a, b, g) == _arc_holds_gap(a, b, gap) for a, b in arcs):
            return g
    raise AssertionError("unreachable")


def _puncture_from_flags(partner: Sequence[int], crossing: Sequence[tuple[int, int]]) -> int:
    L = len(partner)
    cross = set(crossing)
    arcs = [(k, p) for k, p in enumerate(partner) if k < p]
    for g in range(L):
        if all(_arc_holds_gap(a, b, g) == ((a, b) in cross) for a, b in arcs):
            return g
    raise ValueError("seam-crossing flags do not describe a planar cylinder picture")


def is_noncrossing(partner: Sequence[int]) -> bool:
    arcs = [(k, p) for k, p in enumerate(partner) if k < p]
    for a, b in arcs:
        for c, d in arcs:
            if a < c < b < d:
                return False
    return True


def validate_state(s: LinkState) -> None:
    """Raise ``ValueError`` if ``s`` violates the invariants of its boundary condition."""
    L = s.size
    for k, p in enumerate(s.partner):
        if p >= 0 and (p >= L or p == k or s.partner[p] != k):
            raise ValueError(f"{s.partner} is not an involution")
    if not is_noncrossing(s.partner):
        raise ValueError(f"{s.serialize()} has crossing arcs")
    defects = s.defects
    if s.bc is BC.CLOSED:
        for a, b in s.arcs():
            if any(a < d < b for d in defects):
                raise ValueError(f"{s.serialize()}: defect under an arc")
    elif s.bc in (BC.PERIODIC_DC, BC.PERIODIC_IC):
        if defects:
            raise ValueError("even periodic sectors carry no defects here")
    elif s.bc is BC.PERIODIC_ODD:
        if len(defects) != 1:
            raise ValueError("odd periodic states have exactly one defect")
        if s.winding not in (0, 1):
            raise ValueError("winding label must be 0 or 1")
    if s.bc is BC.PERIODIC_DC:
        if not 0 <= s.puncture < L or face_of(s.partner, s.puncture) != s.puncture:
            raise ValueError("puncture must be the canonical gap of a face")
        if s.loop not in (0, 1):
            raise ValueError("at most one non-contractible loop")
    else:
        if s.puncture != -1 or s.loop:
            raise ValueError("puncture/loop only used for dc")
    if s.bc is not BC.PERIODIC_ODD and s.winding:
        raise ValueError("winding only used for podd")


# -- seed and generator action --------------------------------------------


def from_diagram(d: TLDiagram) -> LinkState:
    """Closed link state read off the bottom row of a diagram; through lines become defects."""
    L = d.size
    partner = tuple(p - L if p >= L else -1 for p in d.partner[L:])
    return LinkState(BC.CLOSED, partner)


def seed_state(L: int, bc: BC | str) -> LinkState:
    """The pattern of ``I_0``: sites (1,2),(3,4),... paired, last site a defect for odd L."""
    bc = BC.parse(bc)
    check_parity(L, bc)
    partner = [-1] * L
    for k in range(0, L - 1, 2):
        partner[k], partner[k + 1] = k + 1, k
    puncture = face_of(partner, L - 1) if bc is BC.PERIODIC_DC else -1
    # Odd periodic: the defect at site L sits directly under the top end,
    # cover position L - 1, i.e. winding 0.
    return LinkState(bc, tuple(partner), puncture)


def num_generators(L: int, bc: BC) -> int:
    return L - 1 if bc is BC.CLOSED else L


def apply_generator(i: int, s: LinkState) -> LinkState:
    """Act with ``e_i`` (1-based) on ``s``.

    Closed states may lose two defects when ``e_i`` joins two defect lines;
    callers working in a fixed-defect sector detect this by the defect count.
    """
    L = s.size
    n = num_generators(L, s.bc)
    if not 1 <= i <= n:
        raise ValueError(f"generator index {i} out of range 1..{n} for {s.bc.value}")
    a, b = i - 1, i % L
    p = list(s.partner)
    pa, pb = p[a], p[b]

    if pa == b:
        if s.bc is BC.PERIODIC_DC and s.puncture == a:
            # The arc runs round the back: the closed loop winds the cylinder.
            return LinkState(s.bc, s.partner, face_of(s.partner, (a - 1) % L), 1 - s.loop)
        return s

    if s.bc is BC.CLOSED:
        p[a], p[b] = b, a
        if pa >= 0:
            p[pa] = pb
        if pb >= 0:
            p[pb] = pa
        return LinkState(s.bc, tuple(p))

    if s.bc is BC.PERIODIC_IC:
        p[a], p[b] = b, a
        p[pa], p[pb] = pb, pa
        return LinkState(s.bc, tuple(p))

    if s.bc is BC.PERIODIC_DC:
        old = _face_gaps(s.partner, s.puncture)
        rep = next(g for g in old if g != a)
        p[a], p[b] = b, a
        p[pa], p[pb] = pb, pa
        return LinkState(s.bc, tuple(p), face_of(p, rep), s.loop)

    # Odd periodic: one defect, tracked on the universal cover.
    d = s.defects[0]
    x = s.winding * L + d
    p[a], p[b] = b, a
    if pa < 0:
        # Defect at site a = x; it moves to the partner of b, found to the right.
        x += 1 + (pb - b) % L
        p[pb] = -1
    elif pb < 0:
        x -= 1 + (a - pa) % L
        p[pa] = -1
    else:
        p[pa], p[pb] = pb, pa
    return LinkState(s.bc, tuple(p), winding=(x // L) % 2)


def _face_gaps(partner: Sequence[int], gap: int) -> list[int]:
    arcs = [(k, q) for k, q in enumerate(partner) if 0 <= k < q]
    return [
        g
        for g in range(len(partner))
        if all(_arc_holds_gap(x, y, g) == _arc_holds_gap(x, y, gap) for x, y in arcs)
    ]


# -- sectors ----------------------------------------------------------------


@dataclass
class SectorBasis:
    L: int
    bc: BC
    defects: int
    states: list[LinkState]
    index: dict[LinkState, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.states = sorted(set(self.states), key=LinkState.serialize)
        self.index = {s: k for k, s in enumerate(self.states)}

    def __len__(self) -> int:
        return len(self.states)

    def __iter__(self) -> Iterator[LinkState]:
        return iter(self.states)

    def to_json(self) -> str:
        return json.dumps([s.serialize() for s in self.states])


def count_states(L: int, m: int) -> int:
    """Number of closed link patterns on L sites with m defects."""
    if not 0 <= m <= L or (L - m) % 2:
        raise ValueError(f"need 0 <= m <= L with m = L mod 2, got L={L}, m={m}")
    hi = comb(L, (L - m + 1) // 2)
    lo = comb(L, (L - m - 1) // 2) if L - m - 1 >= 0 else 0
    return hi - lo


def _closed_patterns(L: int, m: int) -> Iterator[tuple[int, ...]]:
    # Walk left to right; a defect may only be placed when no arc is open.
    partner = [-1] * L

    def rec(k: int, stack: list[int], defects_left: int) -> Iterator[tuple[int, ...]]:
        remaining = L - k
        if remaining == 0:
            if not stack and defects_left == 0:
                yield tuple(partner)
            return
        if len(stack) + defects_left > remaining:
            return
        if not stack and defects_left:
            partner[k] = -1
            yield from rec(k + 1, stack, defects_left - 1)
        if stack:
            top = stack.pop()
            partner[k], partner[top] = top, k
            yield from rec(k + 1, stack, defects_left)
            partner[top] = -1
            partner[k] = -1
            stack.append(top)
        stack.append(k)
        yield from rec(k + 1, stack, defects_left)
        stack.pop()

    yield from rec(0, [], m)


def closure(seed: LinkState) -> list[LinkState]:
    """Breadth-first closure of ``seed`` under every generator of its boundary condition."""
    n = num_generators(seed.size, seed.bc)
    seen = {seed}
    queue = deque([seed])
    while queue:
        s = queue.popleft()
        for i in range(1, n + 1):
            t = apply_generator(i, s)
            if t not in seen:
                seen.add(t)
                queue.append(t)
    return list(seen)


def enumerate_sector(L: int, bc: BC | str, defects: int | None = None) -> SectorBasis:
    bc = BC.parse(bc)
    check_parity(L, bc)
    if defects is None:
        defects = L % 2
    if bc is BC.CLOSED:
        if not 0 <= defects <= L or (L - defects) % 2:
            raise ValueError(f"unsupported sector: L={L}, {defects} defects")
        states = [LinkState(bc, p) for p in _closed_patterns(L, defects)]
        return SectorBasis(L, bc, defects, states)
    if defects != L % 2:
        raise ValueError(f"{bc.value} sectors support only {L % 2} defects here")
    return SectorBasis(L, bc, defects, closure(seed_state(L, bc)))


def sector_dimension_formula(L: int, bc: BC | str, defects: int | None = None) -> int:
    """Closed-form sector dimensions quoted for the quotient algebras."""
    from .combinatorics import catalan

    bc = BC.parse(bc)
    if defects is None:
        defects = L % 2
    if bc is BC.CLOSED:
        return count_states(L, defects)
    if bc is BC.PERIODIC_DC:
        return (1 + L // 2) * catalan(L // 2)
    if bc is BC.PERIODIC_IC:
        return catalan(L // 2)
    return L * catalan((L + 1) // 2)
