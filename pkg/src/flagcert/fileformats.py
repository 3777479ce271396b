"""Readers and writers for the coefficient-file formats.

Two dialects exist for every numeric table.  The compatibility dialect
("paper") uses 1-based indices, stores only numerators, and leaves the
common denominator implied by the flag sizes.  The native dialect is
0-based and self-describing: a single `#`-prefixed header line records
the dialect and the denominator.  Flag-list files are identical in both
dialects since they contain no indices.
"""

from __future__ import annotations

from fractions import Fraction

from .certify import Certificate
from .enumeration import FlagBasis
from .graphs import Flag, TypeGraph, graph_from_bitstring


class FormatError(ValueError):
    """File contents do not match the expected table format."""


def _size_from_bits(bits: str) -> int:
    n = 0
    while n * (n - 1) // 2 < len(bits):
        n += 1
    if n * (n - 1) // 2 != len(bits):
        raise FormatError(f"bitstring length {len(bits)} is not triangular")
    return n


# --- flag lists ---------------------------------------------------------------


def write_flag_list(basis: FlagBasis) -> str:
    """Count line, then one upper-triangular adjacency bitstring per flag."""
    lines = [str(len(basis))]
    lines.extend(f.canonical_form() for f in basis)
    return "\n".join(lines) + "\n"


def read_flag_list(text: str, type_: TypeGraph, size: int | None = None) -> list[Flag]:
    """Parse a flag list; roots are the first `type_.s` vertices of each line."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise FormatError("empty flag list")
    try:
        count = int(lines[0])
    except ValueError as exc:
        raise FormatError(f"bad count line {lines[0]!r}") from exc
    if count != len(lines) - 1:
        raise FormatError(
            f"count line says {count} flags, file has {len(lines) - 1}"
        )
    flags = []
    for bits in lines[1:]:
        n = _size_from_bits(bits) if size is None else size
        graph = graph_from_bitstring(bits, n)
        flags.append(Flag(graph, tuple(range(type_.s)), type_))
    return flags


# --- integer tables -----------------------------------------------------------

_HEADERS = {
    "coeffs": "# flagcert-coeffs v1 base=0",
    "q": "# flagcert-q v1 base=0",
    "vec": "# flagcert-vec v1 base=0",
}


def _header(kind: str, denominator: int) -> str:
    return f"{_HEADERS[kind]} denom={denominator}"


def _parse_header(line: str, kind: str) -> int:
    prefix = _HEADERS[kind]
    if not line.startswith(prefix):
        raise FormatError(f"unexpected header {line!r}")
    field = line[len(prefix) :].strip()
    if not field.startswith("denom="):
        raise FormatError(f"header missing denominator: {line!r}")
    return int(field[len("denom=") :])


def _int_rows(lines: list[str], width: int) -> list[tuple[int, ...]]:
    rows = []
    for ln in lines:
        parts = ln.split()
        if len(parts) != width:
            raise FormatError(f"expected {width} columns, found {ln!r}")
        try:
            rows.append(tuple(int(x) for x in parts))
        except ValueError as exc:
            raise FormatError(f"non-integer value in {ln!r}") from exc
    return rows


def write_quadruples(
    entries, fmt: str, denominator: int
) -> str:
    """Sparse coefficient rows `a b c d`: target index, two factor
    indices, and the numerator over the implied denominator."""
    lines = []
    if fmt == "native":
        lines.append(_header("coeffs", denominator))
        shift = 0
    elif fmt == "paper":
        shift = 1
    else:
        raise ValueError(f"unknown format {fmt!r}")
    for a, b, c, d in entries:
        lines.append(f"{a + shift} {b + shift} {c + shift} {d}")
    return "\n".join(lines) + "\n"


def read_quadruples(text: str) -> tuple[list[tuple[int, int, int, int]], int | None]:
    """Parse coefficient rows back to 0-based indices.

    A native header fixes the index base and yields the denominator; a
    headerless file is read as the compatibility dialect (1-based, with
    the denominator left to the caller).
    """
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    denominator = None
    shift = 1
    if lines and lines[0].startswith("#"):
        denominator = _parse_header(lines[0], "coeffs")
        shift = 0
        lines = lines[1:]
    rows = _int_rows(lines, 4)
    out = [(a - shift, b - shift, c - shift, d) for a, b, c, d in rows]
    for a, b, c, d in out:
        if min(a, b, c) < 0:
            raise FormatError("index column underflows its base")
    return out, denominator


def read_averaged_products(
    text: str, a_column: str = "zero-flag"
) -> tuple[list[tuple[int, int, int, int]], int | None, str]:
    """Read a combined (averaged product) coefficient file.

    Whether column `a` indexes the 0-flag basis or the type's own flag
    basis is not self-evident from the file, so the caller states the
    intended reading via `a_column` ("zero-flag" or "type-flag") and it
    is echoed back alongside the rows.  Files written by this package
    always use 0-flag indices in column `a`.
    """
    if a_column not in ("zero-flag", "type-flag"):
        raise ValueError(f"unknown a_column {a_column!r}")
    rows, denominator = read_quadruples(text)
    return rows, denominator, a_column


def write_q_triples(rows, fmt: str, denominator: int) -> str:
    """Rows `a b c`: flag index, underlying 0-flag index, q numerator."""
    lines = []
    if fmt == "native":
        lines.append(_header("q", denominator))
        shift = 0
    elif fmt == "paper":
        shift = 1
    else:
        raise ValueError(f"unknown format {fmt!r}")
    for a, b, c in rows:
        lines.append(f"{a + shift} {b + shift} {c}")
    return "\n".join(lines) + "\n"


def read_q_triples(text: str) -> tuple[list[tuple[int, int, int]], int | None]:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    denominator = None
    shift = 1
    if lines and lines[0].startswith("#"):
        denominator = _parse_header(lines[0], "q")
        shift = 0
        lines = lines[1:]
    rows = _int_rows(lines, 3)
    out = [(a - shift, b - shift, c) for a, b, c in rows]
    for a, b, c in out:
        if min(a, b) < 0:
            raise FormatError("index column underflows its base")
    return out, denominator


def write_vector_numerators(nums, fmt: str, denominator: int) -> str:
    """One numerator per line, ordered by basis index."""
    lines = []
    if fmt == "native":
        lines.append(_header("vec", denominator))
    elif fmt != "paper":
        raise ValueError(f"unknown format {fmt!r}")
    lines.extend(str(int(x)) for x in nums)
    return "\n".join(lines) + "\n"


def read_vector_numerators(text: str) -> tuple[list[int], int | None]:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    denominator = None
    if lines and lines[0].startswith("#"):
        denominator = _parse_header(lines[0], "vec")
        lines = lines[1:]
    try:
        return [int(x) for x in lines], denominator
    except ValueError as exc:
        raise FormatError(f"non-integer vector entry: {exc}") from exc


# --- numerator matrices in csv form -------------------------------------------


def write_csv_matrix(matrix, denominator: int) -> str:
    """Comma-separated numerators of a rational matrix over one denominator."""
    rows = []
    for row in matrix:
        nums = []
        for x in row:
            scaled = Fraction(x) * denominator
            if scaled.denominator != 1:
                raise ValueError(
                    f"entry {x} is not a multiple of 1/{denominator}"
                )
            nums.append(str(scaled.numerator))
        rows.append(",".join(nums))
    return "\n".join(rows) + "\n"


def read_csv_matrix(text: str, denominator: int) -> list[list[Fraction]]:
    rows = []
    for ln in text.splitlines():
        if not ln.strip():
            continue
        try:
            rows.append([Fraction(int(x), denominator) for x in ln.split(",")])
        except ValueError as exc:
            raise FormatError(f"bad csv row {ln!r}") from exc
    if rows and any(len(r) != len(rows) for r in rows):
        raise FormatError("csv matrix is not square")
    return rows


# --- compatibility import -----------------------------------------------------


def certificate_from_external_data(
    t: int,
    s: int,
    l1: int,
    types: list[TypeGraph],
    flag_list_texts: list[str],
    matrix_csv_texts: list[str],
    denominator: int,
    bound: Fraction,
) -> Certificate:
    """Assemble a certificate from externally ordered flag lists and matrices.

    Each flag list fixes the row/column order of the matching csv
    matrix; rows are permuted onto this package's canonical basis order
    so the result verifies like a native certificate.  Roots are taken
    to be the first s vertices of every flag line.
    """
    from .enumeration import enumerate_flags

    if not (len(types) == len(flag_list_texts) == len(matrix_csv_texts)):
        raise ValueError("need one flag list and one matrix per type")
    matrices = []
    for type_, flags_text, csv_text in zip(types, flag_list_texts, matrix_csv_texts):
        flags = read_flag_list(flags_text, type_)
        basis = enumerate_flags(type_, l1)
        if len(flags) != len(basis):
            raise FormatError(
                f"flag list has {len(flags)} flags, basis needs {len(basis)}"
            )
        perm = [basis.index_of(f) for f in flags]
        if len(set(perm)) != len(perm):
            raise FormatError("flag list contains isomorphic duplicates")
        ext = read_csv_matrix(csv_text, denominator)
        dim = len(basis)
        if len(ext) != dim:
            raise FormatError(f"matrix is {len(ext)}x?, basis needs {dim}")
        mat = [[Fraction(0)] * dim for _ in range(dim)]
        for p in range(dim):
            for q in range(dim):
                mat[perm[p]][perm[q]] = ext[p][q]
        matrices.append(mat)
    return Certificate(t, s, l1, list(types), matrices, Fraction(bound))
