"""Exhaustive generation of types and flag bases up to isomorphism.

Bases grow by one-vertex extension of the next-smaller basis, with
canonical-form deduplication, and are sorted ascending by canonical
bitstring so the ordering is reproducible across machines.
"""

from __future__ import annotations

from typing import Iterator

from .graphs import Flag, Graph, TypeGraph, graph_flag, graph_from_bitstring

# Flags beyond this size are rejected outright; generation stays correct
# up to here but the intended working range is l <= 7.
MAX_FLAG_SIZE = 9


class FlagSizeError(ValueError):
    """Requested flag size outside the supported range."""


class FlagBasis:
    """All flags of one type and size, canonically ordered."""

    __slots__ = ("type", "size", "flags", "_index")

    def __init__(self, type_: TypeGraph, size: int, flags: list[Flag]):
        self.type = type_
        self.size = size
        self.flags = tuple(flags)
        self._index = {f.canonical_form(): i for i, f in enumerate(self.flags)}

    def index_of(self, flag: Flag) -> int:
        """Position of the basis flag isomorphic to `flag`."""
        if flag.type != self.type:
            raise KeyError(f"flag type {flag.type} does not match basis")
        try:
            return self._index[flag.canonical_form()]
        except KeyError:
            raise KeyError(f"flag {flag!r} not in basis") from None

    def index_of_form(self, form: str) -> int | None:
        """Position of the flag with the given canonical bitstring, if any."""
        return self._index.get(form)

    def __len__(self) -> int:
        return len(self.flags)

    def __iter__(self) -> Iterator[Flag]:
        return iter(self.flags)

    def __getitem__(self, i: int) -> Flag:
        return self.flags[i]

    def __repr__(self) -> str:
        return f"FlagBasis(type={self.type!r}, size={self.size}, n={len(self)})"


def enumerate_types(s: int) -> list[TypeGraph]:
    """One representative per isomorphism class of graphs on s vertices.

    Representatives are the canonical-form graphs themselves, listed in
    ascending bitstring order.
    """
    if s < 0:
        raise ValueError("type order must be >= 0")
    forms = {graph_flag(g).canonical_form() for g in _all_labeled_graphs(s)}
    return [
        TypeGraph.from_graph(graph_from_bitstring(bits, s))
        for bits in sorted(forms)
    ]


def _all_labeled_graphs(n: int) -> Iterator[Graph]:
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    for mask in range(1 << len(pairs)):
        yield Graph(n, [p for k, p in enumerate(pairs) if mask >> k & 1])


def enumerate_flags(type_: TypeGraph, size: int) -> FlagBasis:
    """The basis of all `size`-vertex flags of the given type."""
    if size < type_.s:
        raise FlagSizeError(
            f"flag size {size} below type order {type_.s}"
        )
    if size > MAX_FLAG_SIZE:
        raise FlagSizeError(
            f"flag size {size} exceeds supported maximum {MAX_FLAG_SIZE}"
        )
    flags = [Flag(type_.graph, tuple(range(type_.s)), type_)]
    for _ in range(size - type_.s):
        flags = _extend_all(flags, type_)
    return FlagBasis(type_, size, flags)


def _extend_all(flags: list[Flag], type_: TypeGraph) -> list[Flag]:
    seen: dict[str, Flag] = {}
    for parent in flags:
        n = parent.graph.n
        for mask in range(1 << n):
            adj = list(parent.graph.adj) + [mask]
            for v in range(n):
                if mask >> v & 1:
                    adj[v] |= 1 << n
            child = Flag(Graph.from_adj(adj), parent.roots, type_)
            seen.setdefault(child.canonical_form(), child)
    return [seen[k] for k in sorted(seen)]
