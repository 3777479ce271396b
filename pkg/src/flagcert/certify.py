"""Exact rational certificates: rounding, PSD witnesses, verification.

The floating solver output is rounded to a fixed denominator, each
matrix gets an exact pivoted LDL^T factorization as a positive
semidefiniteness witness, and the bound is recomputed from scratch in
rational arithmetic.  Verification re-derives every density from the
certificate header alone, so a certificate file carries the whole
proof.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra import (
    averaging_map,
    objective_vector,
    product_table,
    quadratic_form_image,
)
from .enumeration import enumerate_flags
from .graphs import EMPTY_TYPE, TypeGraph
from .sdp import SdpProblem, SolverSolution

Matrix = list[list[Fraction]]


class AsymmetricMatrixError(ValueError):
    """PSD certification requires a symmetric input matrix."""


class CertificationError(RuntimeError):
    """The rounding/repair pipeline could not produce PSD matrices."""


class CertificateFormatError(ValueError):
    """Certificate text is malformed or has an unsupported version."""


def round_matrices(sol: SolverSolution, denominator: int) -> list[Matrix]:
    """Round float blocks to the nearest multiples of 1/denominator."""
    if denominator < 1:
        raise ValueError("denominator must be >= 1")
    out = []
    for mat in sol.matrices:
        d = len(mat)
        r = [[Fraction(0)] * d for _ in range(d)]
        for i in range(d):
            for j in range(i, d):
                v = Fraction(round(mat[i][j] * denominator), denominator)
                r[i][j] = r[j][i] = v
        out.append(r)
    return out


@dataclass
class PsdWitness:
    """Exact pivoted factorization P M P^T = L D L^T with D >= 0.

    `permutation[k]` is the original row/column eliminated at step k;
    `lower` is unit lower triangular in pivot coordinates.
    """

    permutation: list[int]
    diagonal: list[Fraction]
    lower: list[list[Fraction]]

    def reconstruct(self) -> Matrix:
        """Reassemble the certified matrix in its original indexing."""
        n = len(self.permutation)
        out = [[Fraction(0)] * n for _ in range(n)]
        for a in range(n):
            for b in range(n):
                val = sum(
                    self.lower[a][k] * self.lower[b][k] * self.diagonal[k]
                    for k in range(min(a, b) + 1)
                )
                out[self.permutation[a]][self.permutation[b]] = val
        return out


@dataclass
class IndefiniteWitness:
    """A rational direction of negative curvature: value = z^T M z < 0."""

    vector: tuple[Fraction, ...]
    value: Fraction


def _quadratic_value(m: Matrix, z) -> Fraction:
    n = len(m)
    return sum(m[i][j] * z[i] * z[j] for i in range(n) for j in range(n))


def psd_certify(matrix: Matrix) -> PsdWitness | IndefiniteWitness:
    """Exact positive-semidefiniteness check via pivoted LDL^T.

    Pivots greedily on the largest remaining diagonal entry; a zero
    maximal pivot forces the whole remaining Schur complement to vanish.
    On failure the returned witness vector satisfies z^T M z < 0
    exactly.
    """
    n = len(matrix)
    for row in matrix:
        if len(row) != n:
            raise AsymmetricMatrixError("matrix is not square")
    for i in range(n):
        for j in range(i + 1, n):
            if matrix[i][j] != matrix[j][i]:
                raise AsymmetricMatrixError(
                    f"entries ({i},{j}) and ({j},{i}) differ"
                )

    schur = {
        (i, j): Fraction(matrix[i][j]) for i in range(n) for j in range(n)
    }
    remaining = list(range(n))
    order: list[int] = []
    diagonal: list[Fraction] = []
    columns: list[dict[int, Fraction]] = []

    def pull_back(partial: dict[int, Fraction]) -> IndefiniteWitness:
        z = dict(partial)
        for step in range(len(order) - 1, -1, -1):
            p = order[step]
            z[p] = -sum(c * z.get(i, 0) for i, c in columns[step].items())
        vec = tuple(z.get(i, Fraction(0)) for i in range(n))
        value = _quadratic_value(matrix, vec)
        if value >= 0:
            raise AssertionError("internal error: witness is not negative")
        return IndefiniteWitness(vec, value)

    while remaining:
        pivot = max(remaining, key=lambda i: schur[i, i])
        d = schur[pivot, pivot]
        if d < 0:
            return pull_back({pivot: Fraction(1)})
        if d == 0:
            # all remaining diagonals are <= 0 here; any negative one or
            # any nonzero off-diagonal entry disproves semidefiniteness
            for i in remaining:
                if schur[i, i] < 0:
                    return pull_back({i: Fraction(1)})
            for ai, i in enumerate(remaining):
                for j in remaining[ai + 1 :]:
                    if schur[i, j] != 0:
                        sign = 1 if schur[i, j] > 0 else -1
                        return pull_back({i: Fraction(1), j: Fraction(-sign)})
            for i in remaining:
                order.append(i)
                diagonal.append(Fraction(0))
                columns.append({})
            break
        remaining.remove(pivot)
        col = {i: schur[i, pivot] / d for i in remaining}
        for ai, i in enumerate(remaining):
            for j in remaining[ai:]:
                v = schur[i, j] - col[i] * col[j] * d
                schur[i, j] = schur[j, i] = v
        order.append(pivot)
        diagonal.append(d)
        columns.append(col)

    pos = {orig: k for k, orig in enumerate(order)}
    lower = [[Fraction(0)] * n for _ in range(n)]
    for k in range(n):
        lower[k][k] = Fraction(1)
        for orig, mult in columns[k].items():
            lower[pos[orig]][k] = mult
    return PsdWitness(order, diagonal, lower)


def best_bound(
    matrices: list[Matrix],
    tables,
    avgs,
    objective,
) -> Fraction:
    """Largest exact c with all averaged forms plus c below the objective.

    Returns min over 0-flags of the slack; nonpositive values are valid
    output and simply mean the matrices certify no useful bound.
    """
    zero_basis = objective.basis
    totals = [Fraction(0)] * len(zero_basis)
    for mat, table, avg in zip(matrices, tables, avgs):
        vec = quadratic_form_image(table, avg, mat, zero_basis)
        for k, v in enumerate(vec.coeffs):
            totals[k] += v
    return min(w - v for w, v in zip(objective.coeffs, totals))


@dataclass
class Certificate:
    """Everything needed to re-verify a bound from scratch."""

    t: int
    s: int
    l1: int
    types: list[TypeGraph]
    matrices: list[Matrix]
    bound: Fraction

    @property
    def l2(self) -> int:
        return 2 * self.l1 - self.s


@dataclass
class VerificationResult:
    """Outcome of an independent certificate check."""

    accepted: bool
    bound: Fraction | None = None
    failed_matrix: int | None = None
    witness: IndefiniteWitness | None = None
    violated_flag: int | None = None
    residual: Fraction | None = None
    message: str = ""


def verify(cert: Certificate) -> VerificationResult:
    """Recompute all densities and certify the claimed bound.

    Re-enumerates the flag bases, certifies every matrix PSD in exact
    arithmetic, recomputes the best bound, and accepts exactly when the
    recomputed value is at least the claimed one.
    """
    l2 = cert.l2
    if l2 < cert.t:
        return VerificationResult(
            False, message=f"flag size {l2} cannot express the t={cert.t} objective"
        )
    if len(cert.types) != len(cert.matrices):
        return VerificationResult(False, message="type/matrix count mismatch")
    for idx, (type_, mat) in enumerate(zip(cert.types, cert.matrices)):
        if type_.s != cert.s:
            return VerificationResult(
                False, message=f"type {idx} has order {type_.s}, expected {cert.s}"
            )
        dim = len(enumerate_flags(type_, cert.l1))
        if len(mat) != dim or any(len(row) != dim for row in mat):
            return VerificationResult(
                False,
                failed_matrix=idx,
                message=f"matrix {idx} does not match basis dimension {dim}",
            )

    for idx, mat in enumerate(cert.matrices):
        try:
            outcome = psd_certify(mat)
        except AsymmetricMatrixError as exc:
            return VerificationResult(
                False, failed_matrix=idx, message=f"matrix {idx}: {exc}"
            )
        if isinstance(outcome, IndefiniteWitness):
            return VerificationResult(
                False,
                failed_matrix=idx,
                witness=outcome,
                message=f"matrix {idx} is not positive semidefinite",
            )

    zero_basis = enumerate_flags(EMPTY_TYPE, l2)
    objective = objective_vector(cert.t, zero_basis)
    totals = [Fraction(0)] * len(zero_basis)
    for type_, mat in zip(cert.types, cert.matrices):
        small = enumerate_flags(type_, cert.l1)
        large = enumerate_flags(type_, l2)
        table = product_table(type_, cert.l1, small, large)
        avg = averaging_map(type_, l2, large, zero_basis)
        vec = quadratic_form_image(table, avg, mat, zero_basis)
        for k, v in enumerate(vec.coeffs):
            totals[k] += v

    slacks = [w - v for w, v in zip(objective.coeffs, totals)]
    recomputed = min(slacks)
    if recomputed >= cert.bound:
        return VerificationResult(True, bound=recomputed, message="certificate accepted")
    worst = min(range(len(slacks)), key=lambda k: slacks[k])
    return VerificationResult(
        False,
        bound=recomputed,
        violated_flag=worst,
        residual=slacks[worst] - cert.bound,
        message=(
            f"claimed bound exceeds the exact slack at 0-flag {worst} "
            f"by {cert.bound - slacks[worst]}"
        ),
    )


# regularization steps tried on non-PSD rounded blocks, in units of
# 1/denominator on the diagonal
_REPAIR_STEPS = [0] + [1 << k for k in range(21)]


def build_certificate(
    problem: SdpProblem, sol: SolverSolution, denominator: int
) -> tuple[Certificate, list[PsdWitness]]:
    """Round a solver solution and assemble a verified-exact certificate.

    Each rounded block that fails the exact PSD check is retried with a
    growing diagonal shift k/denominator until it passes; the bound is
    then recomputed exactly from the repaired matrices.
    """
    matrices = round_matrices(sol, denominator)
    repaired: list[Matrix] = []
    witnesses: list[PsdWitness] = []
    for idx, mat in enumerate(matrices):
        dim = len(mat)
        witness = None
        for k in _REPAIR_STEPS:
            eps = Fraction(k, denominator)
            trial = [
                [mat[i][j] + (eps if i == j else 0) for j in range(dim)]
                for i in range(dim)
            ]
            outcome = psd_certify(trial)
            if isinstance(outcome, PsdWitness):
                witness = outcome
                repaired.append(trial)
                break
        if witness is None:
            raise CertificationError(
                f"block {idx} stayed indefinite after diagonal repair"
            )
        witnesses.append(witness)
    bound = best_bound(repaired, problem.tables, problem.avgs, problem.objective)
    cert = Certificate(
        t=problem.t,
        s=problem.s,
        l1=problem.l1,
        types=list(problem.types),
        matrices=repaired,
        bound=bound,
    )
    return cert, witnesses


# --- certificate text format -------------------------------------------------

_HEADER = "flagcert v1"


def certificate_to_text(cert: Certificate) -> str:
    """Serialize a certificate; the rendering is canonical and bit-exact."""
    lines = [_HEADER, f"t {cert.t}", f"s {cert.s}", f"l1 {cert.l1}"]
    lines.append(f"types {len(cert.types)}")
    for type_ in cert.types:
        edges = type_.graph.edges()
        parts = ["type", str(len(edges))]
        for u, v in edges:
            parts.append(str(u))
            parts.append(str(v))
        lines.append(" ".join(parts))
    for mat in cert.matrices:
        lines.append(f"matrix {len(mat)}")
        for row in mat:
            lines.append(" ".join(f"{x.numerator}/{x.denominator}" for x in row))
    lines.append(f"bound {cert.bound.numerator}/{cert.bound.denominator}")
    return "\n".join(lines) + "\n"


def certificate_from_text(text: str) -> Certificate:
    """Parse the line-oriented certificate format."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise CertificateFormatError("empty certificate")
    if lines[0] != _HEADER:
        raise CertificateFormatError(
            f"unsupported certificate version: {lines[0]!r}"
        )
    pos = 1

    def take(keyword: str) -> list[str]:
        nonlocal pos
        if pos >= len(lines):
            raise CertificateFormatError(f"missing {keyword!r} line")
        parts = lines[pos].split()
        if parts[0] != keyword:
            raise CertificateFormatError(
                f"expected {keyword!r}, found {lines[pos]!r}"
            )
        pos += 1
        return parts[1:]

    try:
        t = int(take("t")[0])
        s = int(take("s")[0])
        l1 = int(take("l1")[0])
        n_types = int(take("types")[0])
        types = []
        for _ in range(n_types):
            parts = take("type")
            n_edges = int(parts[0])
            nums = [int(x) for x in parts[1:]]
            if len(nums) != 2 * n_edges:
                raise CertificateFormatError("type edge list length mismatch")
            edges = [(nums[2 * k], nums[2 * k + 1]) for k in range(n_edges)]
            types.append(TypeGraph(s, edges))
        matrices = []
        for _ in range(n_types):
            dim = int(take("matrix")[0])
            mat = []
            for _ in range(dim):
                if pos >= len(lines):
                    raise CertificateFormatError("truncated matrix block")
                row = [Fraction(x) for x in lines[pos].split()]
                pos += 1
                if len(row) != dim:
                    raise CertificateFormatError(
                        f"matrix row has {len(row)} entries, expected {dim}"
                    )
                mat.append(row)
            matrices.append(mat)
        bound = Fraction(take("bound")[0])
    except CertificateFormatError:
        raise
    except (ValueError, IndexError, ZeroDivisionError) as exc:
        raise CertificateFormatError(f"malformed certificate: {exc}") from exc
    if pos != len(lines):
        raise CertificateFormatError("trailing content after bound line")
    return Certificate(t, s, l1, types, matrices, bound)
