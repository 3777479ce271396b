"""Command-line pipeline: enumerate, coeffs, build-sdp, certify, verify.

Exit codes: 0 success, 1 verification/processing failure, 2 usage
error, 3 I/O error.  All file outputs are deterministic.
"""

from __future__ import annotations

import argparse
import shlex
import subprocess
import sys
import tempfile
from fractions import Fraction
from math import comb
from pathlib import Path

from .algebra import averaging_map, objective_vector, product_table
from .certify import (
    CertificateFormatError,
    CertificationError,
    build_certificate,
    certificate_from_text,
    certificate_to_text,
    verify,
)
from .enumeration import FlagSizeError, enumerate_flags, enumerate_types
from .fileformats import (
    FormatError,
    write_flag_list,
    write_q_triples,
    write_quadruples,
    write_vector_numerators,
)
from .graphs import EMPTY_TYPE
from .sdp import (
    ProblemSizeError,
    SolutionParseError,
    build_problem,
    export_solver_format,
    import_solution,
)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_IO = 3


def _flag_file_name(s: int, l: int, index: int) -> str:
    return f"jbc0{l}" if s == 0 else f"jbc{s}{l}_{index}"


def _outdir(args) -> Path:
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_enumerate(args) -> int:
    s, l = args.s, args.l1
    if l < s:
        raise ProblemSizeError(f"flag size {l} below type order {s}")
    out = _outdir(args)
    types = enumerate_types(s)
    for i, type_ in enumerate(types, start=1):
        basis = enumerate_flags(type_, l)
        path = out / _flag_file_name(s, l, i)
        path.write_text(write_flag_list(basis))
        print(f"{path}: {len(basis)} flags")
    return EXIT_OK


def cmd_coeffs(args) -> int:
    t, s, l1 = args.t, args.s, args.l1
    if s < 1:
        raise ProblemSizeError("coefficient files need a type order s >= 1")
    if l1 <= s:
        raise ProblemSizeError(f"need l1 > s, got l1={l1}, s={s}")
    l2 = 2 * l1 - s
    if l2 < t:
        raise ProblemSizeError(f"product size {l2} cannot hold t={t}")
    out = _outdir(args)
    fmt = args.format
    zero_basis = enumerate_flags(EMPTY_TYPE, l2)
    types = enumerate_types(s)

    for i, type_ in enumerate(types, start=1):
        small = enumerate_flags(type_, l1)
        large = enumerate_flags(type_, l2)
        table = product_table(type_, l1, small, large)
        avg = averaging_map(type_, l2, large, zero_basis)

        si_rows = [(j, a, b, num) for j, a, b, num in table.sorted_items()]
        si_path = out / f"si{s}{l1}_{i}"
        si_path.write_text(write_quadruples(si_rows, fmt, table.denominator))

        q_rows = [
            (j, avg.rows[j][0], int(avg.rows[j][1] * avg.denominator))
            for j in sorted(avg.rows)
        ]
        q_path = out / f"qjb{s}{l2}_{i}"
        q_path.write_text(write_q_triples(q_rows, fmt, avg.denominator))

        combined: dict[tuple[int, int, int], int] = {}
        for j, a, b, num in table.sorted_items():
            k, q = avg.rows[j]
            qn = int(q * avg.denominator)
            key = (k, a, b)
            combined[key] = combined.get(key, 0) + qn * num
        sp_rows = [(k, a, b, num) for (k, a, b), num in sorted(combined.items())]
        sp_den = avg.denominator * table.denominator
        sp_path = out / f"sp{s}{l1}_{i}"
        sp_path.write_text(write_quadruples(sp_rows, fmt, sp_den))
        print(
            f"type {i}: {len(si_rows)} product rows (den {table.denominator}), "
            f"{len(q_rows)} q rows (den {avg.denominator}), "
            f"{len(sp_rows)} combined rows (den {sp_den})"
        )

    w_den = comb(l2, t)
    objective = objective_vector(t, zero_basis)
    nums = [int(w * w_den) for w in objective.coeffs]
    l_path = out / f"l{t}{l2}"
    l_path.write_text(write_vector_numerators(nums, fmt, w_den))
    print(f"{l_path}: {len(nums)} objective numerators (den {w_den})")
    return EXIT_OK


def cmd_build_sdp(args) -> int:
    problem = build_problem(args.t, args.s, args.l1)
    out = Path(args.out or f"problem_t{args.t}s{args.s}l{args.l1}.dat-s")
    if out.parent != Path("."):
        out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(export_solver_format(problem))
    print(
        f"{out}: {problem.constraint_count} constraints, "
        f"blocks {problem.block_dims} + c + slack"
    )
    return EXIT_OK


def _run_solver(template: str, problem_text: str, workdir: Path) -> str:
    """Shell out to the templated solver command and read its output file."""
    input_path = workdir / "problem.dat-s"
    output_path = workdir / "solution.sol"
    input_path.write_text(problem_text)
    cmd = [
        part.replace("{input}", str(input_path)).replace(
            "{output}", str(output_path)
        )
        for part in shlex.split(template)
    ]
    proc = subprocess.run(cmd, capture_output=True, text=True)
    if proc.returncode != 0:
        raise CertificationError(
            f"solver command failed with code {proc.returncode}: "
            f"{proc.stderr.strip() or proc.stdout.strip()}"
        )
    if not output_path.exists():
        raise CertificationError("solver command produced no output file")
    return output_path.read_text()


def cmd_certify(args) -> int:
    problem = build_problem(args.t, args.s, args.l1)
    if args.solution:
        solution_text = Path(args.solution).read_text()
    elif args.solver_cmd:
        with tempfile.TemporaryDirectory(prefix="flagcert-") as tmp:
            solution_text = _run_solver(
                args.solver_cmd, export_solver_format(problem), Path(tmp)
            )
    else:
        print(
            "error: certify needs a solver output file or --solver-cmd",
            file=sys.stderr,
        )
        return EXIT_USAGE
    sol = import_solution(problem, solution_text)
    cert, _ = build_certificate(problem, sol, args.denominator)
    out = Path(
        args.out or f"cert_t{args.t}s{args.s}l{args.l1}.flagcert"
    )
    if out.parent != Path("."):
        out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(certificate_to_text(cert))
    print(f"{out}: certified bound {cert.bound} = {float(cert.bound)}")
    return EXIT_OK


def cmd_verify(args) -> int:
    text = Path(args.certificate).read_text()
    cert = certificate_from_text(text)
    result = verify(cert)
    if result.accepted:
        print(f"accepted: bound {result.bound} = {float(result.bound)}")
        return EXIT_OK
    print(f"rejected: {result.message}", file=sys.stderr)
    if result.witness is not None:
        print(
            f"negative direction with value {result.witness.value} "
            f"= {float(result.witness.value)}",
            file=sys.stderr,
        )
    return EXIT_FAILURE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flagcert",
        description=(
            "Build, round, and exactly verify flag-algebra certificates "
            "for clique-plus-complement density bounds."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, t=False, l1=True, denominator=False):
        if t:
            p.add_argument("--t", type=int, required=True, help="clique size")
        p.add_argument("--s", type=int, required=True, help="type order")
        if l1:
            p.add_argument(
                "--l1", type=int, required=True, help="flag size of the SDP blocks"
            )
        if denominator:
            p.add_argument(
                "--denominator",
                type=int,
                default=11289600,
                help="rounding denominator for the exact certificate",
            )

    p = sub.add_parser("enumerate", help="write flag-list files per type")
    common(p)
    p.add_argument("--out", help="output directory (default: current)")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("coeffs", help="write product, q, combined, objective files")
    common(p, t=True)
    p.add_argument("--out", help="output directory (default: current)")
    p.add_argument(
        "--format",
        choices=("native", "paper"),
        default="native",
        help="index dialect for coefficient files",
    )
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("build-sdp", help="write the sparse SDPA problem file")
    common(p, t=True)
    p.add_argument("--out", help="output file path")
    p.set_defaults(func=cmd_build_sdp)

    p = sub.add_parser(
        "certify", help="round a solver solution into an exact certificate"
    )
    common(p, t=True, denominator=True)
    p.add_argument(
        "solution",
        nargs="?",
        help="solver output file (omit when using --solver-cmd)",
    )
    p.add_argument(
        "--solver-cmd",
        help="command template with {input} and {output} placeholders",
    )
    p.add_argument("--out", help="certificate output path")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("verify", help="independently verify a certificate file")
    p.add_argument("certificate", help="certificate file path")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ProblemSizeError, FlagSizeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (
        SolutionParseError,
        CertificationError,
        CertificateFormatError,
        FormatError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except OSError as exc:
        name = getattr(exc, "filename", None)
        where = f" ({name})" if name else ""
        print(f"i/o error{where}: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
