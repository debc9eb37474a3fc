"""Fully packed loop enumeration refined by boundary connectivity.

Grid vertices are ``(r, c)`` with row 0 on top.  External stubs are keyed
``("W", r)``, ``("E", r)``, ``("N", c)``, ``("S", c)``.  Boundary presets:

* closed: an ``(L-1) x L/2`` (even L) or ``L x (L-1)/2`` (odd L) rectangle,
  ``cols x rows``.  Stubs alternate occupied/vacant along west (top to
  bottom), south (left to right) and east (bottom to top), starting occupied.
  The north side is the symmetry axis of the vertically symmetric ASM: all
  vacant for even L; for odd L exactly one north stub is used, by the defect.
* dc: the upper half (``L x L/2``) of a half-turn symmetric ASM.  North stubs
  ``c`` and ``cols-1-c`` are joined by nested arcs; a terminal pair linked
  through an odd number of arcs is a seam-crossing (back) arc.
* ic: the ``n x n`` grid with domain-wall stubs, terminals read cyclically.
* podd: half-turn symmetric FPLs on the ``(2n+1) x (2n+1)`` domain-wall grid;
  terminal ``k`` in clockwise order is identified with ``k + L``.

Two engines produce the same tally: an exhaustive depth-first search over the
plain grid (half-turn case: full grid filtered by symmetry) and a frontier
dynamic program over a loop graph (half-turn case: the quotient by rotation).
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterator

from .linkstates import BC, LinkState, SectorBasis, _puncture_from_flags, check_parity, enumerate_sector, validate_state
from .markov import build_intensity_matrix, stationary_vector

MAX_DFS_VERTICES = 64
MAX_DP_VERTICES = 144

DEFECT = -1

Stub = tuple[str, int]
# (lower terminal, higher terminal, parity); DEFECT marks the defect end.
Connectivity = frozenset[tuple[int, int, int]]


@dataclass(frozen=True)
class GridSpec:
    L: int
    bc: BC
    rows: int
    cols: int
    stubs: dict[Stub, str]
    terminals: tuple[Stub, ...]
    topology: str

    @property
    def n_vertices(self) -> int:
        return self.rows * self.cols

    def terminal_id(self) -> dict[Stub, int]:
        return {s: k for k, s in enumerate(self.terminals)}

    def describe(self) -> dict:
        return {
            "L": self.L,
            "bc": self.bc.value,
            "rows": self.rows,
            "cols": self.cols,
            "topology": self.topology,
            "terminals": [f"{side}{k}" for side, k in self.terminals],
        }


def _side_walk(rows: int, cols: int) -> list[Stub]:
    # West top->bottom, south left->right, east bottom->top.
    return (
        [("W", r) for r in range(rows)]
        + [("S", c) for c in range(cols)]
        + [("E", r) for r in reversed(range(rows))]
    )


def _clockwise(rows: int, cols: int) -> list[Stub]:
    return (
        [("N", c) for c in range(cols)]
        + [("E", r) for r in range(rows)]
        + [("S", c) for c in reversed(range(cols))]
        + [("W", r) for r in reversed(range(rows))]
    )


def _domain_wall(size: int) -> dict[Stub, str]:
    # Vertex (r, c) is even when r + c is even.  Horizontal boundary arrows
    # point in and vertical ones out, and an edge is occupied when its arrow
    # points at its even end.
    stubs: dict[Stub, str] = {}
    for k in range(size):
        stubs[("W", k)] = "occupied" if k % 2 == 0 else "vacant"
        stubs[("E", k)] = "occupied" if (k + size - 1) % 2 == 0 else "vacant"
        stubs[("N", k)] = "occupied" if k % 2 == 1 else "vacant"
        stubs[("S", k)] = "occupied" if (size - 1 + k) % 2 == 1 else "vacant"
    return stubs


def preset_grid(L: int, bc: BC | str) -> GridSpec:
    bc = BC.parse(bc)
    check_parity(L, bc)
    if bc is BC.CLOSED:
        if L < 2:
            raise ValueError("closed presets need L >= 2")
        rows, cols = L // 2, (L - 1 if L % 2 == 0 else L)
        stubs: dict[Stub, str] = {}
        walk = _side_walk(rows, cols)
        for p, stub in enumerate(walk):
            stubs[stub] = "occupied" if p % 2 == 0 else "vacant"
        for c in range(cols):
            stubs[("N", c)] = "vacant" if L % 2 == 0 else "free"
        terminals = tuple(s for s in walk if stubs[s] == "occupied")
        topology = "strip" if L % 2 == 0 else "strip-defect"
        return GridSpec(L, bc, rows, cols, stubs, terminals, topology)
    if bc is BC.PERIODIC_DC:
        n = L // 2
        rows, cols = n, L
        stubs = {}
        for r in range(rows):
            # Row r here is row n - r of the half-turn symmetric ASM.
            stubs[("W", r)] = "occupied" if (n - r) % 2 == 1 else "vacant"
            stubs[("E", r)] = "occupied" if (n - r) % 2 == 0 else "vacant"
        for c in range(cols):
            stubs[("S", c)] = "occupied" if c % 2 == 1 else "vacant"
            stubs[("N", c)] = "arc"
        walk = _side_walk(rows, cols)
        terminals = tuple(s for s in walk if stubs[s] == "occupied")
        return GridSpec(L, bc, rows, cols, stubs, terminals, "cylinder-arcs")
    if bc is BC.PERIODIC_IC:
        n = L // 2
        stubs = _domain_wall(n)
        terminals = tuple(s for s in _clockwise(n, n) if stubs[s] == "occupied")
        return GridSpec(L, bc, n, n, stubs, terminals, "disk")
    if L < 3:
        raise ValueError("podd presets need L >= 3")
    stubs = _domain_wall(L)
    terminals = tuple(s for s in _clockwise(L, L) if stubs[s] == "occupied")
    return GridSpec(L, bc, L, L, stubs, terminals, "half-turn")


# -- connectivity -> link state ---------------------------------------------


class StateReader:
    """Converts a terminal connectivity into a state of the matching sector."""

    def __init__(self, grid: GridSpec, basis: SectorBasis | None = None):
        self.grid = grid
        self.basis = basis if basis is not None else enumerate_sector(grid.L, grid.bc)
        self._by_pattern: dict[tuple, LinkState] = {}
        for s in self.basis.states:
            key = (s.partner, s.puncture)
            if key in self._by_pattern:
                raise AssertionError(f"pattern {key} is not unique in the sector basis")
            self._by_pattern[key] = s

    def __call__(self, conn: Connectivity) -> LinkState:
        L = self.grid.L
        partner = [-2] * L
        crossing = []
        for a, b, parity in conn:
            if a == DEFECT:
                partner[b] = -1
                continue
            if partner[a] != -2 or partner[b] != -2:
                raise ValueError(f"terminal used twice in {sorted(conn)}")
            partner[a], partner[b] = b, a
            if parity:
                crossing.append((a, b))
        if -2 in partner:
            raise ValueError(f"unmatched terminal in {sorted(conn)}")
        puncture = -1
        if self.grid.bc is BC.PERIODIC_DC:
            puncture = _puncture_from_flags(partner, crossing)
        state = self._by_pattern.get((tuple(partner), puncture))
        if state is None:
            raise ValueError(f"connectivity {sorted(conn)} is not a state of the sector")
        validate_state(state)
        return state


# -- exhaustive search oracle -----------------------------------------------


def _dfs_grid(rows: int, cols: int, stubs: dict[Stub, str], mirror_north: bool, max_free: int | None) -> Iterator[dict]:
    """Yield every FPL on the grid as a map edge-key -> bool.

    Edge keys: ``("h", r, c)`` joins (r, c)-(r, c+1) with c = -1 / cols-1 the
    west / east stub; ``("v", r, c)`` joins (r, c)-(r+1, c) with r = -1 /
    rows-1 the north / south stub.
    """
    occ: dict[tuple, bool] = {}
    for r in range(rows):
        occ[("h", r, -1)] = stubs[("W", r)] == "occupied"
        occ[("h", r, cols - 1)] = stubs[("E", r)] == "occupied"
    for c in range(cols):
        occ[("v", rows - 1, c)] = stubs[("S", c)] == "occupied"
        if stubs[("N", c)] == "occupied":
            occ[("v", -1, c)] = True
        elif stubs[("N", c)] == "vacant":
            occ[("v", -1, c)] = False

    order = [(r, c) for r in range(rows) for c in range(cols)]

    def rec(k: int, free_used: int) -> Iterator[dict]:
        if k == len(order):
            if max_free is None or free_used == max_free:
                yield dict(occ)
            return
        r, c = order[k]
        north_key = ("v", r - 1, c)
        options_n: list[bool]
        if north_key in occ:
            options_n = [occ[north_key]]
            decide_n = False
        elif mirror_north and c >= cols - c:
            options_n = [occ[("v", -1, cols - 1 - c)]]
            decide_n = True
        else:
            options_n = [False, True]
            decide_n = True
        west = occ[("h", r, c - 1)]
        east_key, south_key = ("h", r, c), ("v", r, c)
        east_fixed = c == cols - 1
        south_fixed = r == rows - 1
        for n_val in options_n:
            used = free_used + (1 if (decide_n and n_val and not mirror_north) else 0)
            if max_free is not None and used > max_free:
                continue
            if decide_n:
                occ[north_key] = n_val
            need = 2 - west - n_val
            east_opts = [occ[east_key]] if east_fixed else [False, True]
            south_opts = [occ[south_key]] if south_fixed else [False, True]
            for e_val in east_opts:
                for s_val in south_opts:
                    if e_val + s_val != need:
                        continue
                    if not east_fixed:
                        occ[east_key] = e_val
                    if not south_fixed:
                        occ[south_key] = s_val
                    yield from rec(k + 1, used)
            if not east_fixed:
                occ.pop(east_key, None)
            if not south_fixed:
                occ.pop(south_key, None)
            if decide_n:
                del occ[north_key]

    yield from rec(0, 0)


def _neighbours(rows: int, cols: int, occ: dict) -> dict:
    """Adjacency between vertices and stub nodes for an occupied edge set."""
    adj: dict = defaultdict(list)

    def node(r: int, c: int):
        if c < 0:
            return ("W", r)
        if c >= cols:
            return ("E", r)
        if r < 0:
            return ("N", c)
        if r >= rows:
            return ("S", c)
        return (r, c)

    for key, on in occ.items():
        if not on:
            continue
        kind, r, c = key
        u, v = (node(r, c), node(r, c + 1)) if kind == "h" else (node(r, c), node(r + 1, c))
        adj[u].append(v)
        adj[v].append(u)
    return adj


def _trace(adj: dict, start: Stub, jump) -> tuple[Stub, int]:
    """Follow the path leaving stub ``start``; ``jump`` maps arc stubs to their mirror."""
    parity = 0
    prev, cur = start, adj[start][0]
    while True:
        if isinstance(cur[0], str):
            target = jump(cur) if jump else None
            if target is None:
                return cur, parity
            parity ^= 1
            prev, cur = target, adj[target][0]
            continue
        a, b = adj[cur]
        prev, cur = cur, (b if a == prev else a)


def _rotate_edge(key: tuple, size: int) -> tuple:
    kind, r, c = key
    if kind == "h":
        return ("h", size - 1 - r, size - 2 - c)
    return ("v", size - 2 - r, size - 1 - c)


def _dfs_connectivities(grid: GridSpec) -> Iterator[Connectivity]:
    rows, cols = grid.rows, grid.cols
    tid = grid.terminal_id()
    topo = grid.topology
    mirror = topo == "cylinder-arcs"
    max_free = 1 if topo == "strip-defect" else None
    stubs = dict(grid.stubs)
    if mirror:
        stubs.update({("N", c): "free" for c in range(cols)})

    def jump(stub: Stub) -> Stub | None:
        if mirror and stub[0] == "N":
            return ("N", cols - 1 - stub[1])
        return None

    for occ in _dfs_grid(rows, cols, stubs, mirror, max_free):
        if topo == "half-turn" and any(occ[k] != occ[_rotate_edge(k, rows)] for k in occ):
            continue
        adj = _neighbours(rows, cols, occ)
        ends: set[tuple[int, int, int]] = set()
        if topo == "half-turn":
            L = grid.L
            for stub, k in tid.items():
                end, _ = _trace(adj, stub, None)
                j = tid[end]
                if (j - k) % (2 * L) == L:
                    ends.add((DEFECT, k % L, 0))
                else:
                    a, b = sorted((k % L, j % L))
                    ends.add((a, b, 0))
            yield frozenset(ends)
            continue
        for stub, k in tid.items():
            end, parity = _trace(adj, stub, jump)
            if end in tid:
                a, b = sorted((k, tid[end]))
                ends.add((a, b, parity))
            elif topo == "strip-defect" and end[0] == "N":
                ends.add((DEFECT, k, 0))
            else:
                raise AssertionError(f"path from {stub} ends at non-terminal {end}")
        yield frozenset(ends)


# -- frontier dynamic programme ---------------------------------------------


@dataclass
class LoopGraph:
    """Graph whose spanning degree-2 subgraphs are the FPLs of a preset.

    Vertices are eliminated in index order.  ``fixed[v]`` lists terminal ids
    of occupied stubs at ``v`` (``DEFECT`` for a defect sink); ``free[v]``
    counts optional defect stubs at ``v``.
    """

    n: int
    edges: list[tuple[int, int, int]]
    fixed: list[list[int]]
    free: list[int]
    exact_free: int | None = None

    incident_in: list[list[int]] = field(default_factory=list)
    incident_out: list[list[int]] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.incident_in = [[] for _ in range(self.n)]
        self.incident_out = [[] for _ in range(self.n)]
        for k, (u, v, _) in enumerate(self.edges):
            if not u < v:
                raise ValueError("edges must be stored as (earlier, later, parity)")
            self.incident_out[u].append(k)
            self.incident_in[v].append(k)


def loop_graph(grid: GridSpec) -> LoopGraph:
    rows, cols = grid.rows, grid.cols
    tid = grid.terminal_id()
    topo = grid.topology

    if topo == "half-turn":
        return _half_turn_quotient(grid)

    def vid(r: int, c: int) -> int:
        return r * cols + c

    n = rows * cols
    edges: list[tuple[int, int, int]] = []
    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols:
                edges.append((vid(r, c), vid(r, c + 1), 0))
            if r + 1 < rows:
                edges.append((vid(r, c), vid(r + 1, c), 0))
    if topo == "cylinder-arcs":
        for c in range(cols // 2):
            edges.append((vid(0, c), vid(0, cols - 1 - c), 1))
    fixed: list[list[int]] = [[] for _ in range(n)]
    free = [0] * n
    for stub, status in grid.stubs.items():
        side, k = stub
        r, c = {"W": (k, 0), "E": (k, cols - 1), "N": (0, k), "S": (rows - 1, k)}[side]
        if status == "occupied":
            fixed[vid(r, c)].append(tid[stub])
        elif status == "free":
            free[vid(r, c)] += 1
    exact_free = 1 if topo == "strip-defect" else None
    return LoopGraph(n, edges, fixed, free, exact_free)


def _half_turn_quotient(grid: GridSpec) -> LoopGraph:
    size, L = grid.rows, grid.L
    h = size // 2
    cells = [(r, c) for r in range(h) for c in range(size)] + [(h, c) for c in range(h + 1)]
    index = {cell: k for k, cell in enumerate(cells)}
    edges = []
    for (r, c), k in index.items():
        if (r, c + 1) in index:
            edges.append((k, index[(r, c + 1)], 0))
        if (r + 1, c) in index:
            edges.append((k, index[(r + 1, c)], 0))
    # South edges of the middle row leave the domain; their rotation images
    # are the south edges of row h-1 in the right half.
    for c in range(h):
        u, v = index[(h - 1, size - 1 - c)], index[(h, c)]
        edges.append((min(u, v), max(u, v), 0))
    tid = grid.terminal_id()
    fixed: list[list[int]] = [[] for _ in cells]
    for stub, status in grid.stubs.items():
        if status != "occupied":
            continue
        side, k = stub
        cell = {"W": (k, 0), "E": (k, size - 1), "N": (0, k), "S": (size - 1, k)}[side]
        if cell in index and (side != "E" or k < h) and (side != "W" or k <= h) and side != "S":
            fixed[index[cell]].append(tid[stub] % L)
    # The centre is fixed by the rotation; its two edges form one orbit, so
    # in the quotient it is the end of the defect path.
    fixed[index[(h, h)]].append(DEFECT)
    return LoopGraph(len(cells), edges, fixed, [0] * len(cells))


def _join(a: tuple, b: tuple, tags: dict[int, tuple], done: list) -> None:
    """Merge two path ends meeting at a vertex."""
    if a[0] == "T" and b[0] == "T":
        x, y = sorted((a[1], b[1]))
        done.append((x, y, a[2] ^ b[2]))
        return
    if a[0] == "P" and b[0] == "T":
        a, b = b, a
    if a[0] == "T":
        # b is a pair end: its partner now leads to terminal a.
        for e, t in tags.items():
            if t[0] == "P" and t[1] == b[1]:
                tags[e] = ("T", a[1], a[2] ^ b[2])
                return
        raise AssertionError("dangling pair label")
    if a[1] == b[1]:
        return  # closed loop
    partners = [e for e, t in tags.items() if t[0] == "P" and t[1] in (a[1], b[1])]
    new = ("P", min(a[1], b[1]), a[2] ^ b[2])
    for e in partners:
        tags[e] = new


def _dp_connectivities(graph: LoopGraph) -> dict[Connectivity, int]:
    # State: (frontier tags in frontier order, completed ends, free stubs used)
    frontier: list[int] = []
    states: dict[tuple, int] = {((), (), 0): 1}
    for v in range(graph.n):
        ins = set(graph.incident_in[v])
        outs = graph.incident_out[v]
        keep = [e for e in frontier if e not in ins]
        new_frontier = keep + outs
        nxt: dict[tuple, int] = defaultdict(int)
        for (tags_t, done_t, used), count in states.items():
            tags = dict(zip(frontier, tags_t))
            arriving = [tags[e] for e in frontier if e in ins and tags[e]]
            arriving += [("T", t, 0) for t in graph.fixed[v]]
            need = 2 - len(arriving)
            if need < 0:
                continue
            n_free = graph.free[v]
            for n_f in range(min(n_free, need) + 1):
                if graph.exact_free is not None and used + n_f > graph.exact_free:
                    continue
                for chosen in combinations(outs, need - n_f):
                    # Free defect stubs are interchangeable only by position;
                    # enumerate which of them are used.
                    for _ in combinations(range(n_free), n_f):
                        ends = arriving + [("T", DEFECT, 0)] * n_f
                        base = {e: t for e, t in tags.items() if e not in ins and t}
                        done = list(done_t)
                        new_tags = dict(base)
                        slots = list(chosen)
                        if len(ends) == 2:
                            _join(ends[0], ends[1], new_tags, done)
                        elif len(ends) == 1:
                            e = slots[0]
                            t = ends[0]
                            moved = (t[0], t[1], t[2] ^ graph.edges[e][2])
                            if t[0] == "P":
                                # both ends of a pair carry the segment parity
                                for f, u in new_tags.items():
                                    if u[0] == "P" and u[1] == t[1]:
                                        new_tags[f] = moved
                            new_tags[e] = moved
                        else:
                            e1, e2 = slots
                            label = 1 + max((t[1] for t in new_tags.values() if t[0] == "P"), default=0)
                            par = graph.edges[e1][2] ^ graph.edges[e2][2]
                            new_tags[e1] = ("P", label, par)
                            new_tags[e2] = ("P", label, par)
                        nxt[_canonical(new_frontier, new_tags, done, used + n_f)] += count
        frontier = new_frontier
        states = nxt
    result: dict[Connectivity, int] = defaultdict(int)
    for (tags_t, done_t, used), count in states.items():
        if graph.exact_free is not None and used != graph.exact_free:
            continue
        result[frozenset(done_t)] += count
    return dict(result)


def _canonical(frontier: list[int], tags: dict[int, tuple], done: list, used: int) -> tuple:
    relabel: dict[int, int] = {}
    out = []
    for e in frontier:
        t = tags.get(e)
        if not t:
            out.append(())
        elif t[0] == "P":
            if t[1] not in relabel:
                relabel[t[1]] = len(relabel) + 1
            out.append(("P", relabel[t[1]], t[2]))
        else:
            out.append(t)
    return tuple(out), tuple(sorted(done)), used


# -- public API ---------------------------------------------------------------


class EngineMismatch(RuntimeError):
    pass


@dataclass
class ConnectivityTally:
    grid: GridSpec
    counts: dict[LinkState, int]

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def to_dict(self) -> dict:
        return {
            "grid": self.grid.describe(),
            "total": str(self.total),
            "by_pattern": {s.serialize(): str(v) for s, v in sorted(self.counts.items(), key=lambda kv: kv[0].serialize())},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def raw_connectivities(grid: GridSpec, engine: str = "dp") -> dict[Connectivity, int]:
    if engine == "dfs":
        if grid.n_vertices > MAX_DFS_VERTICES:
            raise ValueError(f"grid too large for exhaustive search ({grid.n_vertices} vertices)")
        counts: dict[Connectivity, int] = defaultdict(int)
        for conn in _dfs_connectivities(grid):
            counts[conn] += 1
        return dict(counts)
    if engine == "dp":
        if grid.n_vertices > MAX_DP_VERTICES:
            raise ValueError(f"grid too large for the frontier DP ({grid.n_vertices} vertices)")
        return _dp_connectivities(loop_graph(grid))
    raise ValueError(f"unknown engine {engine!r}")


def enumerate_fpl(grid: GridSpec, engine: str = "dp", basis: SectorBasis | None = None) -> ConnectivityTally:
    """Tally FPL configurations of ``grid`` by the link state of their terminals.

    ``engine="both"`` runs the search oracle and the DP and raises
    :class:`EngineMismatch` if they differ.
    """
    if engine == "both":
        dfs = raw_connectivities(grid, "dfs")
        dp = raw_connectivities(grid, "dp")
        if dfs != dp:
            raise EngineMismatch(f"DFS and DP disagree on {grid.describe()}")
        raw = dp
    else:
        raw = raw_connectivities(grid, engine)
    reader = StateReader(grid, basis)
    counts: dict[LinkState, int] = defaultdict(int)
    for conn, n in raw.items():
        counts[reader(conn)] += n
    return ConnectivityTally(grid, dict(counts))


@dataclass
class ConjectureReport:
    L: int
    bc: BC
    states: int
    S: int
    fpl_total: int
    mismatches: list[tuple[str, int, int]]
    tally: ConnectivityTally | None = None

    @property
    def match(self) -> bool:
        return not self.mismatches and self.S == self.fpl_total

    def to_dict(self) -> dict:
        return {
            "L": self.L,
            "bc": self.bc.value,
            "states": self.states,
            "S": str(self.S),
            "fpl_total": str(self.fpl_total),
            "match": self.match,
            "mismatches": [{"state": s, "stationary": str(p), "fpl": str(f)} for s, p, f in self.mismatches],
        }


def verify_conjecture(L: int, bc: BC | str, engine: str = "dp") -> ConjectureReport:
    """Compare the exact stationary state with the FPL tally state by state."""
    bc = BC.parse(bc)
    basis = enumerate_sector(L, bc)
    vec = stationary_vector(build_intensity_matrix(basis))
    tally = enumerate_fpl(preset_grid(L, bc), engine, basis)
    mismatches = []
    for s, p in vec.by_state().items():
        f = tally.counts.get(s, 0)
        if f != p:
            mismatches.append((s.serialize(), p, f))
    for s in tally.counts:
        if s not in basis.index:
            mismatches.append((s.serialize(), 0, tally.counts[s]))
    return ConjectureReport(L, bc, len(basis), vec.S, tally.total, mismatches, tally)
