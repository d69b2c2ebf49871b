#!/usr/bin/env python3
"""Solve a problem in the plain-text conic format with CVXPY.

usage: socp_cvxpy.py INPUT OUTPUT [TOL]

OUTPUT receives::

    status <optimal|infeasible|unbounded|max_iters|numerical_failure>
    objective <value>
    primal <n>
    <x_0>
    ...
"""

import math
import sys

import cvxpy as cp
import numpy as np
import scipy.sparse as sp


def _lines(path):
    with open(path) as f:
        for raw in f:
            s = raw.strip()
            if s and not s.startswith("#"):
                yield s.split()


def _num(tok):
    return float(tok)


def read_conic(path):
    it = _lines(path)
    head = next(it)
    if head[:2] != ["SOCP", "1"]:
        raise ValueError("not a version 1 conic file")
    n = int(next(it)[1])
    cost = np.zeros(n)
    for _ in range(int(next(it)[1])):
        i, v = next(it)
        cost[int(i)] = _num(v)

    def rows():
        _, m, nnz = next(it)
        m, nnz = int(m), int(nnz)
        r, c, v = [], [], []
        for _ in range(nnz):
            a, b, x = next(it)
            r.append(int(a))
            c.append(int(b))
            v.append(_num(x))
        rhs = np.array([_num(next(it)[0]) for _ in range(m)])
        return sp.csr_matrix((v, (r, c)), shape=(m, n)), rhs

    a_eq, b_eq = rows()
    a_in, b_in = rows()
    cones = []
    for _ in range(int(next(it)[1])):
        rec = next(it)
        cones.append([int(t) for t in rec[1:]])
    bounds = []
    for _ in range(int(next(it)[1])):
        var, lo, hi = next(it)
        bounds.append((int(var), _num(lo), _num(hi)))
    return n, cost, (a_eq, b_eq), (a_in, b_in), cones, bounds


def main(argv):
    if len(argv) < 3:
        print(__doc__, file=sys.stderr)
        return 2
    tol = float(argv[3]) if len(argv) > 3 else 1e-8
    n, cost, (a_eq, b_eq), (a_in, b_in), cones, bounds = read_conic(argv[1])
    x = cp.Variable(n)
    cons = []
    if a_eq.shape[0]:
        cons.append(a_eq @ x == b_eq)
    if a_in.shape[0]:
        cons.append(a_in @ x <= b_in)
    for cone in cones:
        if len(cone) == 1:
            cons.append(x[cone[0]] >= 0)
        else:
            cons.append(cp.SOC(x[cone[0]], x[cone[1:]]))
    for var, lo, hi in bounds:
        if math.isfinite(lo):
            cons.append(x[var] >= lo)
        if math.isfinite(hi):
            cons.append(x[var] <= hi)
    prob = cp.Problem(cp.Minimize(cost @ x), cons)
    try:
        prob.solve(solver=cp.CLARABEL, tol_gap_abs=tol, tol_gap_rel=tol, tol_feas=tol)
    except cp.error.SolverError:
        status = "numerical_failure"
    else:
        status = {
            cp.OPTIMAL: "optimal",
            cp.INFEASIBLE: "infeasible",
            cp.UNBOUNDED: "unbounded",
            cp.USER_LIMIT: "max_iters",
        }.get(prob.status, "numerical_failure")
    values = x.value if x.value is not None else np.zeros(n)
    objective = float(cost @ values) if status == "optimal" else 0.0
    with open(argv[2], "w") as f:
        f.write(f"status {status}\nobjective {objective!r}\nprimal {n}\n")
        for v in values:
            f.write(f"{float(v)!r}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
