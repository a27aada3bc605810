#!/usr/bin/env python3
"""Solve an SDPA sparse problem file with cvxpy and write a CSDP-layout solution.

Usage: sdpa_solve.py problem.dat-s solution.sol

The input encodes  min c^T y  s.t.  sum_v y_v F_v - F_0 >= 0  blockwise
(negative block sizes are diagonal).  The output follows the CSDP solution
layout: line 1 holds y, then sparse entries "matno blk i j value" with
matno 1 the slack Z = sum_v y_v F_v - F_0 and matno 2 the PSD multiplier X.

Exit codes: 0 solved, 1 infeasible, 2 anything else.
"""

import sys

import numpy as np
import scipy.sparse as sp


def fail(msg, code=2):
    print("sdpa_solve: " + msg, file=sys.stderr)
    sys.exit(code)


def read_tokens(path):
    toks = []
    try:
        with open(path) as f:
            for line in f:
                s = line.strip()
                if not s or s[0] in '*"':
                    continue
                for ch in "{}(),":
                    s = s.replace(ch, " ")
                toks.extend(s.split())
    except OSError as e:
        fail("cannot read %s: %s" % (path, e))
    return toks


def parse_problem(path):
    toks = read_tokens(path)
    pos = 0

    def take(kind):
        nonlocal pos
        if pos >= len(toks):
            fail("truncated file while reading " + kind)
        t = toks[pos]
        pos += 1
        return t

    try:
        m = int(take("variable count"))
        nblocks = int(take("block count"))
        sizes = [int(take("block sizes")) for _ in range(nblocks)]
        c = np.array([float(take("objective")) for _ in range(m)])
    except ValueError as e:
        fail("bad header token: %s" % e)
    if m < 1 or nblocks < 1 or any(s == 0 for s in sizes):
        fail("degenerate header")
    rest = toks[pos:]
    if len(rest) % 5 != 0:
        fail("entry token count %d is not a multiple of 5" % len(rest))
    entries = []
    for k in range(0, len(rest), 5):
        try:
            v = int(rest[k])
            b = int(rest[k + 1])
            i = int(rest[k + 2])
            j = int(rest[k + 3])
            val = float(rest[k + 4])
        except ValueError as e:
            fail("bad entry near token %d: %s" % (k, e))
        if not 0 <= v <= m:
            fail("entry references variable %d (have %d)" % (v, m))
        if not 1 <= b <= nblocks:
            fail("entry references block %d (have %d)" % (b, nblocks))
        n = abs(sizes[b - 1])
        if not (1 <= i <= n and 1 <= j <= n):
            fail("entry (%d,%d) outside block %d of size %d" % (i, j, b, n))
        if sizes[b - 1] < 0 and i != j:
            fail("off-diagonal entry in diagonal block %d" % b)
        entries.append((v, b, i, j, val))
    return m, sizes, c, entries


def build_blocks(m, sizes, entries):
    """Per block: (size, is_diag, A, F0) with A mapping y to vec of the block."""
    blocks = []
    for s in sizes:
        n = abs(s)
        if s < 0:
            blocks.append([n, True, sp.lil_matrix((n, m)), np.zeros(n)])
        else:
            blocks.append([n, False, sp.lil_matrix((n * n, m)), np.zeros((n, n))])
    for v, b, i, j, val in entries:
        n, diag, A, F0 = blocks[b - 1]
        if diag:
            if v == 0:
                F0[i - 1] = val
            else:
                A[i - 1, v - 1] = val
        else:
            if v == 0:
                F0[i - 1, j - 1] = val
                F0[j - 1, i - 1] = val
            else:
                A[(i - 1) * n + (j - 1), v - 1] = val
                A[(j - 1) * n + (i - 1), v - 1] = val
    return [(n, diag, A.tocsr(), F0) for n, diag, A, F0 in blocks]


def adjoint_residual(blocks, duals, c):
    """l1 norm of A*(dual) - c; measures whether the dual orientation is right."""
    g = np.zeros(len(c))
    for (n, diag, A, _), X in zip(blocks, duals):
        if diag:
            g += A.T @ X
        else:
            g += A.T @ X.reshape(n * n)
    return float(np.abs(g - c).sum())


def main():
    if len(sys.argv) != 3:
        fail("usage: sdpa_solve.py problem.dat-s solution.sol")
    problem_path, solution_path = sys.argv[1], sys.argv[2]
    m, sizes, c, entries = parse_problem(problem_path)
    blocks = build_blocks(m, sizes, entries)

    import cvxpy as cp

    y = cp.Variable(m)
    cons = []
    for n, diag, A, F0 in blocks:
        if diag:
            cons.append(A @ y - F0 >= 0)
        else:
            expr = cp.reshape(A @ y, (n, n), order="C") - F0
            cons.append((expr + expr.T) / 2 >> 0)
    prob = cp.Problem(cp.Minimize(c @ y), cons)

    status = None
    for solver, kwargs in (
        ("CLARABEL", {}),
        ("SCS", {"eps_abs": 1e-9, "eps_rel": 1e-9, "max_iters": 200000}),
    ):
        try:
            prob.solve(solver=solver, verbose=False, **kwargs)
        except cp.error.SolverError as e:
            status = "error: %s" % e
            continue
        status = prob.status
        if status in ("optimal", "optimal_inaccurate") and y.value is not None:
            break
    if status in ("infeasible", "infeasible_inaccurate"):
        print("STATUS: infeasible")
        sys.exit(1)
    if status not in ("optimal", "optimal_inaccurate") or y.value is None:
        fail("no usable solution (status: %s)" % status)

    yv = np.asarray(y.value).reshape(-1)
    duals = []
    for (n, diag, A, F0), con in zip(blocks, cons):
        d = con.dual_value
        if d is None:
            fail("solver returned no dual for a block")
        d = np.asarray(d)
        duals.append(d.reshape(-1) if diag else (d + d.T) / 2)
    if adjoint_residual(blocks, [-d for d in duals], c) < adjoint_residual(
        blocks, duals, c
    ):
        duals = [-d for d in duals]

    out = []
    out.append(" ".join("%.17g" % v for v in yv))
    for b, ((n, diag, A, F0), X) in enumerate(zip(blocks, duals), start=1):
        if diag:
            z = A @ yv - F0
            for i in range(n):
                if z[i] != 0.0:
                    out.append("1 %d %d %d %.17g" % (b, i + 1, i + 1, z[i]))
            for i in range(n):
                if X[i] != 0.0:
                    out.append("2 %d %d %d %.17g" % (b, i + 1, i + 1, X[i]))
        else:
            Z = (A @ yv).reshape(n, n) - F0
            Z = (Z + Z.T) / 2
            for i in range(n):
                for j in range(i, n):
                    if Z[i, j] != 0.0:
                        out.append("1 %d %d %d %.17g" % (b, i + 1, j + 1, Z[i, j]))
            for i in range(n):
                for j in range(i, n):
                    if X[i, j] != 0.0:
                        out.append("2 %d %d %d %.17g" % (b, i + 1, j + 1, X[i, j]))
    try:
        with open(solution_path, "w") as f:
            f.write("\n".join(out) + "\n")
    except OSError as e:
        fail("cannot write %s: %s" % (solution_path, e))
    print("status %s objective %.17g" % (status, prob.value))
    sys.exit(0)


if __name__ == "__main__":
    main()
