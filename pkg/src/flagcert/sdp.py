"""Semidefinite program assembly and solver-neutral text I/O.

The program maximizes the constant c subject to one linear inequality
per 0-flag: the averaged quadratic forms of all types, plus c, must not
exceed the clique-plus-independent-set density on that flag.  Export
targets the sparse SDPA text format; a solution is read back from the
solver's standard text output (dual-vector line followed by
block-indexed primal matrix entries).

Coefficient data stays exact; floats appear only inside `export`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import (
    AveragingMap,
    FlagVector,
    ProductTable,
    averaging_map,
    objective_vector,
    product_table,
)
from .enumeration import FlagBasis, enumerate_flags, enumerate_types
from .graphs import EMPTY_TYPE, TypeGraph


class ProblemSizeError(ValueError):
    """Requested parameters cannot express the clique objective."""


class SolutionParseError(ValueError):
    """Solver output text does not match the expected grammar."""


@dataclass
class SdpProblem:
    """Assembled program with exact coefficients.

    `coeff[i][j]` is the sparse symmetric matrix (upper-triangle keys)
    pairing block i with constraint j; the coefficient of c is 1 in
    every constraint and `rhs` holds the objective-vector values.
    """

    t: int
    s: int
    l1: int
    l2: int
    types: list[TypeGraph]
    bases: list[FlagBasis]
    zero_basis: FlagBasis | None
    coeff: list[list[dict[tuple[int, int], Fraction]]]
    rhs: list[Fraction]
    tables: list[ProductTable] = field(default_factory=list, repr=False)
    avgs: list[AveragingMap] = field(default_factory=list, repr=False)
    objective: FlagVector | None = field(default=None, repr=False)

    @property
    def constraint_count(self) -> int:
        return len(self.rhs)

    @property
    def block_dims(self) -> list[int]:
        return [len(b) for b in self.bases]


def empty_problem() -> SdpProblem:
    return SdpProblem(0, 0, 0, 0, [], [], None, [], [])


def build_problem(t: int, s: int, l1: int) -> SdpProblem:
    """Assemble the program for clique size t over all types of order s."""
    if s < 1:
        raise ProblemSizeError("need at least one root vertex (s >= 1)")
    if l1 <= s:
        raise ProblemSizeError(f"need l1 > s, got l1={l1}, s={s}")
    l2 = 2 * l1 - s
    if l2 < t:
        raise ProblemSizeError(
            f"product size {l2} cannot hold the clique objective for t={t}"
        )
    types = enumerate_types(s)
    zero_basis = enumerate_flags(EMPTY_TYPE, l2)
    objective = objective_vector(t, zero_basis)
    m = len(zero_basis)

    bases: list[FlagBasis] = []
    kept_types: list[TypeGraph] = []
    tables: list[ProductTable] = []
    avgs: list[AveragingMap] = []
    coeff: list[list[dict[tuple[int, int], Fraction]]] = []
    for type_ in types:
        small = enumerate_flags(type_, l1)
        if len(small) == 0:
            continue
        large = enumerate_flags(type_, l2)
        table = product_table(type_, l1, small, large)
        avg = averaging_map(type_, l2, large, zero_basis)
        mats: list[dict[tuple[int, int], Fraction]] = [dict() for _ in range(m)]
        den = table.denominator
        for j, row in table.rows.items():
            k, q = avg.rows[j]
            target = mats[k]
            for key, num in row.items():
                target[key] = target.get(key, Fraction(0)) + Fraction(num * q, den)
        kept_types.append(type_)
        bases.append(small)
        tables.append(table)
        avgs.append(avg)
        coeff.append(mats)

    return SdpProblem(
        t=t,
        s=s,
        l1=l1,
        l2=l2,
        types=kept_types,
        bases=bases,
        zero_basis=zero_basis,
        coeff=coeff,
        rhs=list(objective.coeffs),
        tables=tables,
        avgs=avgs,
        objective=objective,
    )


def export_solver_format(problem: SdpProblem) -> str:
    """Render the program as sparse SDPA text, deterministically.

    Layout: constraint count, block count, block sizes (the trailing
    slack block is diagonal, written negative), the objective row, then
    one `constraint block i j value` entry per upper-triangle nonzero.
    Blocks are the PSD type blocks, a 1x1 block carrying c, and the
    slack diagonal.  A problem with no constraints renders as the four
    header lines only.
    """
    m = problem.constraint_count
    if m == 0:
        return "0\n0\n\n\n"
    dims = problem.block_dims
    n_types = len(dims)
    c_block = n_types + 1
    slack_block = n_types + 2
    lines = [str(m), str(slack_block)]
    lines.append(" ".join(str(d) for d in dims + [1, -m]))
    lines.append(" ".join(repr(float(w)) for w in problem.rhs))
    lines.append(f"0 {c_block} 1 1 1.0")
    for j in range(m):
        for i in range(n_types):
            entries = problem.coeff[i][j]
            for (a, b) in sorted(entries):
                v = entries[(a, b)]
                if v:
                    lines.append(f"{j + 1} {i + 1} {a + 1} {b + 1} {repr(float(v))}")
        lines.append(f"{j + 1} {c_block} 1 1 1.0")
        lines.append(f"{j + 1} {slack_block} {j + 1} {j + 1} 1.0")
    return "\n".join(lines) + "\n"


@dataclass
class SolverSolution:
    """Floating-point primal blocks read back from a solver."""

    matrices: list[list[list[float]]]
    c_float: float


def import_solution(problem: SdpProblem, text: str) -> SolverSolution:
    """Parse solver output and return symmetrized primal blocks.

    Grammar: the first non-empty line is the solver's vector of dual
    values (one float per constraint, unused here); every following
    line reads `mat block i j value` with 1-based indices, where lines
    with mat=2 carry the primal blocks and all others are ignored.
    Off-diagonal entries may be given in either or both orders; both
    orders with differing values are averaged, so the result equals
    (A + A^T)/2 for the matrix A described by the file.
    """
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise SolutionParseError("solution text is empty")
    try:
        head = [float(x) for x in lines[0].split()]
    except ValueError as exc:
        raise SolutionParseError(f"bad dual-vector line: {lines[0]!r}") from exc
    if len(head) != problem.constraint_count:
        raise SolutionParseError(
            f"dual vector has {len(head)} values, expected {problem.constraint_count}"
        )
    dims = problem.block_dims
    n_types = len(dims)
    c_block = n_types + 1
    slack_block = n_types + 2
    raw: list[dict[tuple[int, int], float]] = [dict() for _ in range(n_types)]
    c_float = 0.0
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 5:
            raise SolutionParseError(f"bad entry line: {ln!r}")
        try:
            mat = int(parts[0])
            block = int(parts[1])
            i = int(parts[2])
            j = int(parts[3])
            v = float(parts[4])
        except ValueError as exc:
            raise SolutionParseError(f"bad entry line: {ln!r}") from exc
        if mat != 2:
            continue
        if block == c_block:
            if i != 1 or j != 1:
                raise SolutionParseError(f"bad c-block entry: {ln!r}")
            c_float = v
        elif block == slack_block:
            continue
        elif 1 <= block <= n_types:
            d = dims[block - 1]
            if not (1 <= i <= d and 1 <= j <= d):
                raise SolutionParseError(
                    f"entry ({i},{j}) outside block {block} of size {d}"
                )
            raw[block - 1][i - 1, j - 1] = v
        else:
            raise SolutionParseError(f"unknown block {block} in line {ln!r}")

    matrices = []
    for bi, d in enumerate(dims):
        entries = raw[bi]
        mat = [[0.0] * d for _ in range(d)]
        for a in range(d):
            for b in range(a, d):
                up, lo = entries.get((a, b)), entries.get((b, a))
                if up is None and lo is None:
                    v = 0.0
                elif up is None:
                    v = lo
                elif lo is None or (a == b):
                    v = up
                else:
                    v = (up + lo) / 2.0
                mat[a][b] = mat[b][a] = v
        matrices.append(mat)
    return SolverSolution(matrices, c_float)
