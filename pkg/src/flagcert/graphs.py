"""Graphs, types, rooted flags, and canonical forms.

Everything here is immutable after construction.  Graphs are stored as
adjacency bitmask rows, which keeps every neighbourhood in one machine
word for the vertex counts this package handles (n <= 11).
"""

from __future__ import annotations

from typing import Iterable, Sequence


class TypeMismatchError(ValueError):
    """Two flags were combined whose types differ as labeled graphs."""


class RootOutsideSubsetError(ValueError):
    """An induced subflag was requested on a set missing a root vertex."""


class Graph:
    """Undirected loop-free graph on vertices 0..n-1."""

    __slots__ = ("n", "adj")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        adj = [0] * n
        for u, v in edges:
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) out of range for n={n}")
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        self.n = n
        self.adj = tuple(adj)

    @classmethod
    def from_adj(cls, adj: Sequence[int]) -> "Graph":
        g = object.__new__(cls)
        g.n = len(adj)
        g.adj = tuple(adj)
        return g

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def edges(self) -> list[tuple[int, int]]:
        return [
            (u, v)
            for u in range(self.n)
            for v in range(u + 1, self.n)
            if self.adj[u] >> v & 1
        ]

    @property
    def edge_count(self) -> int:
        return sum(a.bit_count() for a in self.adj) // 2

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def complement(self) -> "Graph":
        full = (1 << self.n) - 1
        return Graph.from_adj(
            tuple((full & ~self.adj[v]) & ~(1 << v) for v in range(self.n))
        )

    def induced(self, vertices: Sequence[int]) -> "Graph":
        """Subgraph on `vertices`, relabeled 0..k-1 in the given order."""
        pos = {v: i for i, v in enumerate(vertices)}
        adj = [0] * len(vertices)
        for i, v in enumerate(vertices):
            m = self.adj[v]
            while m:
                w = (m & -m).bit_length() - 1
                m &= m - 1
                j = pos.get(w)
                if j is not None:
                    adj[i] |= 1 << j
        return Graph.from_adj(adj)

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and self.adj == other.adj

    def __hash__(self) -> int:
        return hash(self.adj)

    def __repr__(self) -> str:
        return f"Graph({self.n}, {self.edges()})"


def complete_graph(n: int) -> Graph:
    return Graph(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def empty_graph(n: int) -> Graph:
    return Graph(n, [])


class TypeGraph:
    """A graph on the labeled vertex set 0..s-1 serving as a flag type.

    Equality is label-sensitive: two types agree only when their edge
    sets are identical, not merely isomorphic.
    """

    __slots__ = ("s", "graph")

    def __init__(self, s: int, edges: Iterable[tuple[int, int]] = ()):
        self.s = s
        self.graph = Graph(s, edges)

    @classmethod
    def from_graph(cls, graph: Graph) -> "TypeGraph":
        t = object.__new__(cls)
        t.s = graph.n
        t.graph = graph
        return t

    def has_edge(self, i: int, j: int) -> bool:
        return self.graph.has_edge(i, j)

    def complement(self) -> "TypeGraph":
        return TypeGraph.from_graph(self.graph.complement())

    def __eq__(self, other) -> bool:
        return isinstance(other, TypeGraph) and self.graph == other.graph

    def __hash__(self) -> int:
        return hash(("type", self.graph.adj))

    def __repr__(self) -> str:
        return f"TypeGraph({self.s}, {self.graph.edges()})"


EMPTY_TYPE = TypeGraph(0)


class Flag:
    """A graph with an injective root embedding of a type.

    Equality and hashing go through the canonical form, so two flags
    compare equal exactly when they are isomorphic as rooted flags.
    """

    __slots__ = ("graph", "roots", "type", "_canon")

    def __init__(self, graph: Graph, roots: Sequence[int], type_: TypeGraph):
        roots = tuple(roots)
        if len(roots) != type_.s:
            raise ValueError(
                f"expected {type_.s} roots, got {len(roots)}"
            )
        if len(set(roots)) != len(roots):
            raise ValueError(f"roots {roots} are not pairwise distinct")
        for r in roots:
            if not 0 <= r < graph.n:
                raise ValueError(f"root {r} outside vertex range")
        for i in range(type_.s):
            for j in range(i + 1, type_.s):
                if graph.has_edge(roots[i], roots[j]) != type_.has_edge(i, j):
                    raise ValueError(
                        f"roots {roots} do not induce the type on pair ({i},{j})"
                    )
        self.graph = graph
        self.roots = roots
        self.type = type_
        self._canon: str | None = None

    @property
    def size(self) -> int:
        return self.graph.n

    def canonical_form(self) -> str:
        if self._canon is None:
            self._canon = canonical_form(self)
        return self._canon

    def complement(self) -> "Flag":
        return Flag(self.graph.complement(), self.roots, self.type.complement())

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Flag)
            and self.type == other.type
            and self.canonical_form() == other.canonical_form()
        )

    def __hash__(self) -> int:
        return hash((self.type, self.canonical_form()))

    def __repr__(self) -> str:
        return f"Flag({self.graph!r}, roots={self.roots})"


def graph_flag(graph: Graph) -> Flag:
    """View a plain graph as a flag with the empty type."""
    return Flag(graph, (), EMPTY_TYPE)


def induced_subflag(flag: Flag, vertices: Iterable[int]) -> Flag:
    """Restrict a flag to a vertex subset containing all roots.

    Kept vertices are compacted to 0..|U|-1 preserving their relative
    order; the type is unchanged.
    """
    vs = sorted(set(vertices))
    pos = {v: i for i, v in enumerate(vs)}
    for r in flag.roots:
        if r not in pos:
            raise RootOutsideSubsetError(f"root {r} not in subset {vs}")
    return Flag(
        flag.graph.induced(vs),
        tuple(pos[r] for r in flag.roots),
        flag.type,
    )


def is_isomorphic(f1: Flag, f2: Flag) -> bool:
    """Rooted isomorphism: a bijection mapping roots to roots in order."""
    if f1.type != f2.type:
        raise TypeMismatchError(f"types differ: {f1.type} vs {f2.type}")
    if f1.graph.n != f2.graph.n:
        return False
    return f1.canonical_form() == f2.canonical_form()


# --- canonical labeling -----------------------------------------------------
#
# Iterative partition refinement seeded by the roots (individualized first,
# in root order), then backtracking over the remaining cells.  The canonical
# form is the lexicographically greatest upper-triangular adjacency bitstring
# over all labelings reachable in the search tree; with this convention the
# canonical representative of a one-edge graph carries the edge {0,1}, so
# small type representatives come out in the conventional shape.

_canon_cache: dict[tuple, int] = {}


def _refine(adj: Sequence[int], cells: list[list[int]]) -> list[list[int]]:
    while True:
        masks = [0] * len(cells)
        for i, cell in enumerate(cells):
            m = 0
            for v in cell:
                m |= 1 << v
            masks[i] = m
        new_cells: list[list[int]] = []
        changed = False
        for cell in cells:
            if len(cell) == 1:
                new_cells.append(cell)
                continue
            groups: dict[tuple[int, ...], list[int]] = {}
            for v in cell:
                key = tuple((adj[v] & m).bit_count() for m in masks)
                groups.setdefault(key, []).append(v)
            if len(groups) == 1:
                new_cells.append(cell)
            else:
                changed = True
                for key in sorted(groups, reverse=True):
                    new_cells.append(groups[key])
        if not changed:
            return new_cells
        cells = new_cells


def _pack(adj: Sequence[int], perm: list[int]) -> int:
    bits = 0
    for i, v in enumerate(perm):
        row = adj[v]
        for w in perm[i + 1 :]:
            bits = bits << 1 | (row >> w & 1)
    return bits


def _search(adj: Sequence[int], cells: list[list[int]], best: int) -> int:
    cells = _refine(adj, cells)
    for idx, cell in enumerate(cells):
        if len(cell) > 1:
            for v in cell:
                rest = [u for u in cell if u != v]
                branched = cells[:idx] + [[v], rest] + cells[idx + 1 :]
                best = _search(adj, branched, best)
            return best
    return max(best, _pack(adj, [c[0] for c in cells]))


def canonical_labeling_bits(adj: Sequence[int], roots: Sequence[int]) -> int:
    """Canonical adjacency bits with roots pinned to the first positions."""
    key = (tuple(adj), tuple(roots))
    cached = _canon_cache.get(key)
    if cached is not None:
        return cached
    n = len(adj)
    rootset = set(roots)
    cells = [[r] for r in roots]
    rest = [v for v in range(n) if v not in rootset]
    if rest:
        cells.append(rest)
    bits = _search(adj, cells, -1)
    _canon_cache[key] = bits
    return bits


def canonical_form(flag: Flag) -> str:
    """Canonical bitstring of a flag; equal iff the flags are isomorphic."""
    n = flag.graph.n
    bits = canonical_labeling_bits(flag.graph.adj, flag.roots)
    width = n * (n - 1) // 2
    return format(bits, f"0{width}b") if width else ""


def graph_from_bitstring(bits: str, n: int) -> Graph:
    """Inverse of the upper-triangular row-major bitstring encoding."""
    if len(bits) != n * (n - 1) // 2:
        raise ValueError(f"bitstring length {len(bits)} does not match n={n}")
    adj = [0] * n
    k = 0
    for i in range(n):
        for j in range(i + 1, n):
            if bits[k] == "1":
                adj[i] |= 1 << j
                adj[j] |= 1 << i
            elif bits[k] != "0":
                raise ValueError(f"bad character {bits[k]!r} in bitstring")
            k += 1
    return Graph.from_adj(adj)
