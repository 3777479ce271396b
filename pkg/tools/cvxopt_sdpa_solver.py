#!/usr/bin/env python3
"""Solve a sparse-SDPA problem file with cvxopt and write a CSDP-style
solution file.

Usage:
    python tools/cvxopt_sdpa_solver.py problem.dat-s solution.sol

The problem read from the file is
    maximize  tr(F0 X)   s.t.  tr(Fj X) = w_j (j = 1..m),  X >= 0,
with X block-diagonal as declared in the header (negative sizes are
diagonal blocks).  The solution file contains the dual vector y on the
first line followed by `2 block i j value` entries of the primal X, the
format emitted by CSDP and read back by the flagcert pipeline.

This script is deliberately self-contained: it shares no code with the
flagcert package, so it can stand in for any external SDPA-capable
solver.
"""

import sys

from cvxopt import matrix, solvers


def parse_sdpa(text):
    lines = [
        ln
        for ln in text.splitlines()
        if ln.strip() and not ln.lstrip().startswith(('"', "*"))
    ]
    m = int(lines[0])
    n_blocks = int(lines[1])
    sizes = [int(tok.strip("{},")) for tok in lines[2].replace(",", " ").split()]
    if len(sizes) != n_blocks:
        raise ValueError("block size line does not match block count")
    rhs = [float(x) for x in lines[3].split()]
    if len(rhs) != m:
        raise ValueError("objective row does not match constraint count")
    entries = []
    for ln in lines[4:]:
        k, b, i, j, v = ln.split()
        entries.append((int(k), int(b), int(i), int(j), float(v)))
    return m, sizes, rhs, entries


def solve(m, sizes, rhs, entries):
    psd_blocks = [(b, d) for b, d in enumerate(sizes, start=1) if d > 0]
    diag_blocks = [(b, -d) for b, d in enumerate(sizes, start=1) if d < 0]
    psd_pos = {b: k for k, (b, _) in enumerate(psd_blocks)}
    diag_offset = {}
    total_l = 0
    for b, d in diag_blocks:
        diag_offset[b] = total_l
        total_l += d

    # constraint matrices and cost matrix, stored densely per block
    def block_store():
        mats = {}
        for b, d in psd_blocks:
            mats[b] = [[0.0] * d for _ in range(d)]
        for b, d in diag_blocks:
            mats[b] = [0.0] * d
        return mats

    F = [block_store() for _ in range(m + 1)]
    for k, b, i, j, v in entries:
        store = F[k][b]
        if isinstance(store[0], list):
            store[i - 1][j - 1] = v
            store[j - 1][i - 1] = v
        else:
            if i != j:
                raise ValueError("off-diagonal entry in a diagonal block")
            store[i - 1] = v

    # dual form for cvxopt: minimize rhs^T y s.t. sum_j y_j F_j - F0 >= 0
    c = matrix(rhs)
    Gs, hs = [], []
    for b, d in psd_blocks:
        g = matrix(0.0, (d * d, m))
        for j in range(m):
            mat_j = F[j + 1][b]
            for col in range(d):
                for row in range(d):
                    g[col * d + row, j] = -mat_j[row][col]
        Gs.append(g)
        h = matrix(0.0, (d, d))
        f0 = F[0][b]
        for row in range(d):
            for col in range(d):
                h[row, col] = -f0[row][col]
        hs.append(h)
    Gl = matrix(0.0, (total_l, m))
    hl = matrix(0.0, (total_l, 1))
    for b, d in diag_blocks:
        off = diag_offset[b]
        for pos in range(d):
            hl[off + pos] = -F[0][b][pos]
            for j in range(m):
                Gl[off + pos, j] = -F[j + 1][b][pos]

    solvers.options["show_progress"] = False
    if total_l:
        sol = solvers.sdp(c, Gl=Gl, hl=hl, Gs=Gs, hs=hs)
    else:
        sol = solvers.sdp(c, Gs=Gs, hs=hs)
    if sol["x"] is None:
        raise RuntimeError(f"solver failed: status {sol['status']}")
    return sol, psd_blocks, diag_blocks, psd_pos, diag_offset


def write_solution(path, m, sol, psd_blocks, diag_blocks, psd_pos, diag_offset):
    out = [" ".join(repr(v) for v in sol["x"])]
    for b, d in psd_blocks:
        z = sol["zs"][psd_pos[b]]
        for i in range(d):
            for j in range(i, d):
                out.append(f"2 {b} {i + 1} {j + 1} {z[i, j]!r}")
    for b, d in diag_blocks:
        off = diag_offset[b]
        for i in range(d):
            out.append(f"2 {b} {i + 1} {i + 1} {sol['zl'][off + i]!r}")
    with open(path, "w") as fh:
        fh.write("\n".join(out) + "\n")


def main(argv):
    if len(argv) != 3:
        print(__doc__, file=sys.stderr)
        return 2
    with open(argv[1]) as fh:
        m, sizes, rhs, entries = parse_sdpa(fh.read())
    sol, psd_blocks, diag_blocks, psd_pos, diag_offset = solve(
        m, sizes, rhs, entries
    )
    write_solution(argv[2], m, sol, psd_blocks, diag_blocks, psd_pos, diag_offset)
    print(f"objective {sol['dual objective']!r}")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
