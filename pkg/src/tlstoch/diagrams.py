"""Temperley-Lieb diagrams on a strip at loop weight one.

A diagram of size L has 2L endpoints.  Endpoint ``k`` for ``0 <= k < L`` is
top site ``k + 1``; endpoint ``L + k`` is bottom site ``k + 1``.  The diagram is
stored as a fixed-point-free involution on these endpoints (a partner array).

Products follow the loop-model convention: ``e_i * w`` places ``e_i`` *under*
``w``.  ``compose(d1, d2)`` stacks ``d2`` below ``d1``, so ``compose(w, e_i)``
is the algebra product ``e_i w``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

MAX_BASIS_SIZE = 8


@dataclass(frozen=True)
class TLDiagram:
    size: int
    partner: tuple[int, ...]

    def __post_init__(self) -> None:
        n = 2 * self.size
        if self.size < 1 or len(self.partner) != n:
            raise ValueError("partner array must have length 2L with L >= 1")
        for k, p in enumerate(self.partner):
            if not 0 <= p < n or p == k or self.partner[p] != k:
                raise ValueError(f"not a perfect matching at endpoint {k}")
        if not is_planar(self.partner, self.size):
            raise ValueError("diagram is not planar")

    @classmethod
    def identity(cls, size: int) -> TLDiagram:
        return cls(size, tuple(k + size for k in range(size)) + tuple(range(size)))

    def arcs(self) -> list[tuple[int, int]]:
        return sorted((k, p) for k, p in enumerate(self.partner) if k < p)

    def to_text(self) -> str:
        """Pairing list such as ``"T1-T2,B1-B2,T3-B3"`` sorted by first endpoint."""
        return ",".join(f"{_label(a, self.size)}-{_label(b, self.size)}" for a, b in self.arcs())

    @classmethod
    def from_text(cls, text: str) -> TLDiagram:
        pairs = []
        for item in text.split(","):
            left, right = item.strip().split("-")
            pairs.append((left, right))
        size = max(int(tok[1:]) for pair in pairs for tok in pair)
        partner = [-1] * (2 * size)
        for left, right in pairs:
            a, b = _parse_label(left, size), _parse_label(right, size)
            partner[a], partner[b] = b, a
        return cls(size, tuple(partner))

    def through_lines(self) -> int:
        return sum(1 for k in range(self.size) if self.partner[k] >= self.size)


def _label(k: int, size: int) -> str:
    return f"T{k + 1}" if k < size else f"B{k - size + 1}"


def _parse_label(tok: str, size: int) -> int:
    idx = int(tok[1:]) - 1
    if tok[0] == "T":
        return idx
    if tok[0] == "B":
        return size + idx
    raise ValueError(f"bad endpoint label {tok!r}")


def is_planar(partner: Sequence[int], size: int) -> bool:
    # Boundary walk top_1..top_L, bot_L..bot_1 turns strip planarity into a
    # circular noncrossing (balanced bracket) test.
    walk = list(range(size)) + [size + k for k in reversed(range(size))]
    pos = {e: i for i, e in enumerate(walk)}
    stack: list[int] = []
    for e in walk:
        other = partner[e]
        if pos[other] > pos[e]:
            stack.append(e)
        elif not stack or stack.pop() != other:
            return False
    return not stack


def generator_diagram(i: int, size: int) -> TLDiagram:
    """Monoid diagram ``e_i`` (1-based ``i``) joining sites i, i+1 on top and on bottom."""
    if not 1 <= i <= size - 1:
        raise ValueError(f"generator index {i} out of range 1..{size - 1}")
    partner = list(TLDiagram.identity(size).partner)
    a, b = i - 1, i
    partner[a], partner[b] = b, a
    partner[size + a], partner[size + b] = size + b, size + a
    return TLDiagram(size, tuple(partner))


def compose(d1: TLDiagram, d2: TLDiagram) -> tuple[TLDiagram, int]:
    """Stack ``d2`` below ``d1`` and return the result with the number of closed loops removed."""
    if d1.size != d2.size:
        raise ValueError(f"size mismatch: {d1.size} != {d2.size}")
    L = d1.size
    p1, p2 = d1.partner, d2.partner
    # Outer endpoints: 0..L-1 are d1's top, L..2L-1 are d2's bottom.
    # Middle point m (0..L-1) is d1's bottom L+m and d2's top m.
    result = [-1] * (2 * L)
    seen_mid = [False] * L

    def walk(side: int, endpoint: int) -> int:
        # side 1: currently at `endpoint` of d1; side 2: at `endpoint` of d2.
        while True:
            if side == 1:
                q = p1[endpoint]
                if q < L:
                    return q
                mid = q - L
                seen_mid[mid] = True
                side, endpoint = 2, mid
            else:
                q = p2[endpoint]
                if q >= L:
                    return q
                seen_mid[q] = True
                side, endpoint = 1, L + q

    for k in range(L):
        if result[k] < 0:
            end = walk(1, k)
            result[k], result[end] = end, k
    for k in range(L, 2 * L):
        if result[k] < 0:
            end = walk(2, k)
            if end < L:
                raise AssertionError("inconsistent trace")
            result[k], result[end] = end, k

    loops = 0
    for m in range(L):
        if seen_mid[m]:
            continue
        loops += 1
        # Trace the closed loop through the middle points.
        cur = m
        while not seen_mid[cur]:
            seen_mid[cur] = True
            nxt = p1[L + cur] - L
            seen_mid[nxt] = True
            cur = p2[nxt]
    return TLDiagram(L, tuple(result)), loops


def reduce_word(letters: Iterable[int], size: int) -> tuple[TLDiagram, int]:
    """Diagram of the product ``e_{a1} e_{a2} ... e_{ak}``; the first letter ends up at the bottom."""
    acc = TLDiagram.identity(size)
    total = 0
    for i in letters:
        acc, loops = compose(generator_diagram(i, size), acc)
        total += loops
    return acc, total


def enumerate_diagram_basis(size: int, bound: int = MAX_BASIS_SIZE) -> list[TLDiagram]:
    """All diagrams reachable from the identity by generator products, sorted by text form."""
    if size > bound:
        raise ValueError(f"size {size} exceeds enumeration bound {bound}")
    gens = [generator_diagram(i, size) for i in range(1, size)]
    start = TLDiagram.identity(size)
    seen = {start}
    queue = deque([start])
    while queue:
        d = queue.popleft()
        for g in gens:
            nd, _ = compose(d, g)
            if nd not in seen:
                seen.add(nd)
                queue.append(nd)
    return sorted(seen, key=lambda d: d.partner)
