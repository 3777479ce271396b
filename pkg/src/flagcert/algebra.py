"""Exact rational density computations on flags.

Single densities, sunflower joint densities, chain-rule expansion,
product coefficient tables, root-averaging weights, and the objective
vector for clique counting.  All values are `fractions.Fraction`, always
in lowest terms.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations
from math import comb, perm

from .enumeration import FlagBasis, enumerate_flags
from .graphs import (
    EMPTY_TYPE,
    Flag,
    TypeGraph,
    TypeMismatchError,
    canonical_labeling_bits,
    complete_graph,
    empty_graph,
    graph_flag,
    induced_subflag,
)


class SizeBudgetError(ValueError):
    """Petal sizes exceed the host flag's non-root vertex budget."""


def density(f1: Flag, f: Flag) -> Fraction:
    """Fraction of root-containing v(f1)-subsets of f inducing f1."""
    return joint_density([f1], f)


def joint_density(flags: list[Flag], f: Flag) -> Fraction:
    """Fraction of sunflowers in f whose petals induce the given flags.

    A sunflower is an ordered tuple of vertex subsets, each containing
    the roots, pairwise intersecting exactly in the root image.
    """
    s = f.type.s
    for g in flags:
        if g.type != f.type:
            raise TypeMismatchError(f"type of {g!r} does not match host flag")
    petal_sizes = [g.size - s for g in flags]
    pool = [v for v in range(f.size) if v not in f.roots]
    if sum(petal_sizes) > len(pool):
        raise SizeBudgetError(
            f"petal sizes {petal_sizes} exceed {len(pool)} free vertices"
        )
    targets = [g.canonical_form() for g in flags]
    rootset = list(f.roots)

    def count_matches(i: int, pool: list[int]) -> int:
        if i == len(flags):
            return 1
        total = 0
        for free in combinations(pool, petal_sizes[i]):
            sub = induced_subflag(f, rootset + list(free))
            if sub.canonical_form() == targets[i]:
                rest = [v for v in pool if v not in free]
                total += count_matches(i + 1, rest)
        return total

    matched = count_matches(0, pool)
    total = 1
    remaining = len(pool)
    for k in petal_sizes:
        total *= comb(remaining, k)
        remaining -= k
    return Fraction(matched, total)


@dataclass(frozen=True)
class FlagVector:
    """Coefficients over one flag basis."""

    basis: FlagBasis
    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.coeffs) != len(self.basis):
            raise ValueError("coefficient count does not match basis size")

    def __getitem__(self, i: int) -> Fraction:
        return self.coeffs[i]

    def __len__(self) -> int:
        return len(self.coeffs)


def expand(f1: Flag, basis: FlagBasis) -> FlagVector:
    """Chain-rule expansion of a flag over a larger-size basis."""
    if f1.size > basis.size:
        raise ValueError(
            f"cannot expand a {f1.size}-vertex flag over a {basis.size}-vertex basis"
        )
    return FlagVector(basis, tuple(density(f1, f) for f in basis))


class ProductTable:
    """Sparse coefficients p(F_a, F_b; F_j) for one (type, l1) pair.

    Entries are stored j-major as integer numerators over the common
    denominator C(l2-s, l1-s), keyed by (j, a, b) with a <= b.
    """

    __slots__ = (
        "type",
        "small_size",
        "large_size",
        "small_basis",
        "large_basis",
        "denominator",
        "rows",
    )

    def __init__(
        self,
        type_: TypeGraph,
        small_basis: FlagBasis,
        large_basis: FlagBasis,
        denominator: int,
        rows: dict[int, dict[tuple[int, int], int]],
    ):
        self.type = type_
        self.small_size = small_basis.size
        self.large_size = large_basis.size
        self.small_basis = small_basis
        self.large_basis = large_basis
        self.denominator = denominator
        self.rows = rows

    def entry(self, j: int, a: int, b: int) -> Fraction:
        if a > b:
            a, b = b, a
        return Fraction(self.rows.get(j, {}).get((a, b), 0), self.denominator)

    def sorted_items(self):
        """Yield (j, a, b, numerator) deterministically, j-major."""
        for j in sorted(self.rows):
            for (a, b), num in sorted(self.rows[j].items()):
                yield j, a, b, num


def product_table(
    type_: TypeGraph,
    l1: int,
    small_basis: FlagBasis | None = None,
    large_basis: FlagBasis | None = None,
) -> ProductTable:
    """Coefficients of all pairwise products of l1-vertex flags.

    Products land in the basis of size l2 = 2*l1 - s, where every split
    of the non-root vertices realizes exactly one sunflower.
    """
    s = type_.s
    if l1 <= s:
        raise ValueError(f"need l1 > s, got l1={l1}, s={s}")
    l2 = 2 * l1 - s
    if small_basis is None:
        small_basis = enumerate_flags(type_, l1)
    if large_basis is None:
        large_basis = enumerate_flags(type_, l2)
    free = l2 - s
    half = l1 - s
    denominator = comb(free, half)

    rows: dict[int, dict[tuple[int, int], int]] = {}
    for j, f in enumerate(large_basis):
        pool = [v for v in range(f.size) if v not in f.roots]
        rootset = list(f.roots)
        counts: dict[tuple[int, int], int] = {}
        for left in combinations(pool, half):
            right = [v for v in pool if v not in left]
            a = small_basis.index_of(induced_subflag(f, rootset + list(left)))
            b = small_basis.index_of(induced_subflag(f, rootset + right))
            counts[a, b] = counts.get((a, b), 0) + 1
        row = {(a, b): c for (a, b), c in counts.items() if a <= b}
        if row:
            rows[j] = row
    return ProductTable(type_, small_basis, large_basis, denominator, rows)


class AveragingMap:
    """Root-averaging weights q for all flags of one type and size.

    Maps each flag index to its underlying-graph index in the 0-flag
    basis and the rational weight q = (matching injections) / |Psi|.
    """

    __slots__ = ("type", "flag_size", "denominator", "rows")

    def __init__(
        self,
        type_: TypeGraph,
        flag_size: int,
        denominator: int,
        rows: dict[int, tuple[int, Fraction]],
    ):
        self.type = type_
        self.flag_size = flag_size
        self.denominator = denominator
        self.rows = rows


def averaging_map(
    type_: TypeGraph,
    l: int,
    flag_basis: FlagBasis | None = None,
    zero_basis: FlagBasis | None = None,
) -> AveragingMap:
    """Weights q and underlying-graph indices for all l-vertex flags.

    Sweeps every injective root placement on every l-vertex graph, so
    the weight numerator of a flag counts placements that both induce
    the type exactly (labels matter) and reproduce the flag up to
    isomorphism.
    """
    s = type_.s
    if s < 1:
        raise ValueError("averaging requires a type with at least one root")
    if l < s:
        raise ValueError(f"flag size {l} below type order {s}")
    if flag_basis is None:
        flag_basis = enumerate_flags(type_, l)
    if zero_basis is None:
        zero_basis = enumerate_flags(EMPTY_TYPE, l)

    tpairs = [
        (i, j, type_.has_edge(i, j))
        for i in range(s)
        for j in range(i + 1, s)
    ]
    psi_count = perm(l, s)
    width = l * (l - 1) // 2
    counts: dict[str, int] = {}
    graph_of: dict[str, int] = {}
    for k, zf in enumerate(zero_basis):
        adj = zf.graph.adj
        for psi in permutations(range(l), s):
            ok = True
            for i, j, e in tpairs:
                if (adj[psi[i]] >> psi[j] & 1 == 1) != e:
                    ok = False
                    break
            if not ok:
                continue
            form = format(canonical_labeling_bits(adj, psi), f"0{width}b")
            counts[form] = counts.get(form, 0) + 1
            graph_of[form] = k

    rows: dict[int, tuple[int, Fraction]] = {}
    for form, cnt in counts.items():
        idx = flag_basis.index_of_form(form)
        if idx is None:
            raise AssertionError("root placement produced a flag missing from the basis")
        rows[idx] = (graph_of[form], Fraction(cnt, psi_count))
    if len(rows) != len(flag_basis):
        raise AssertionError("some basis flag received no root placement")
    return AveragingMap(type_, l, psi_count, rows)


def quadratic_form_image(
    table: ProductTable,
    avg: AveragingMap,
    matrix: list[list[Fraction]],
    zero_basis: FlagBasis,
) -> FlagVector:
    """Coefficients on the 0-flag basis of the averaged quadratic form.

    For each target flag j the product table row is contracted with the
    matrix component-wise, then weighted by q and accumulated on the
    flag's underlying graph.
    """
    dim = len(table.small_basis)
    if len(matrix) != dim or any(len(r) != dim for r in matrix):
        raise ValueError(f"matrix dimensions do not match basis size {dim}")
    for a in range(dim):
        for b in range(a + 1, dim):
            if matrix[a][b] != matrix[b][a]:
                raise ValueError("matrix is not symmetric")
    if avg.type != table.type or avg.flag_size != table.large_size:
        raise ValueError("averaging map does not match product table")
    if zero_basis.size != table.large_size:
        raise ValueError("0-flag basis size does not match product table")

    out = [Fraction(0)] * len(zero_basis)
    den = table.denominator
    for j, row in table.rows.items():
        inner = 0
        for (a, b), num in row.items():
            term = num * matrix[a][b]
            inner += term if a == b else 2 * term
        if inner:
            k, q = avg.rows[j]
            out[k] += q * inner / den
    return FlagVector(zero_basis, tuple(out))


def objective_vector(t: int, zero_basis: FlagBasis) -> FlagVector:
    """Per-graph density of t-cliques plus independent t-sets."""
    n = zero_basis.size
    if n < t:
        raise ValueError(f"basis size {n} below clique size {t}")
    kt = graph_flag(complete_graph(t))
    kt_bar = graph_flag(empty_graph(t))
    coeffs = tuple(
        density(kt, f) + density(kt_bar, f) for f in zero_basis
    )
    return FlagVector(zero_basis, coeffs)
