"""Independent reference computations used by the tests."""

import itertools
import math

import numpy as np

from recyclesys.program import LinearProgram


def random_bounded_lp(rng, max_vars=6, max_cons=6):
    """Dense LP with a known feasible point and a box bound keeping it bounded."""
    n = int(rng.integers(1, max_vars + 1))
    m = int(rng.integers(1, max_cons + 1))
    x0 = rng.uniform(0, 5, n)
    lp = LinearProgram()
    for j in range(n):
        lp.add_variable(f"x{j}", cost=float(rng.uniform(-10, 10)))
    for i in range(m - 1):
        a = np.round(rng.uniform(-5, 5, n), 3)
        rel = rng.choice(["<=", ">=", "="], p=[0.5, 0.3, 0.2])
        act = float(a @ x0)
        if rel == "<=":
            rhs = act + float(rng.uniform(0, 3))
        elif rel == ">=":
            rhs = act - float(rng.uniform(0, 3))
        else:
            rhs = act
        lp.add_constraint(f"r{i}", {f"x{j}": float(a[j]) for j in range(n)}, str(rel), rhs)
    lp.add_constraint("box", {f"x{j}": 1.0 for j in range(n)}, "<=", float(x0.sum() + rng.uniform(1, 10)))
    return lp


def vertex_enumeration(lp: LinearProgram, tol=1e-7):
    """Minimum of c.x over all basic feasible points of {rows, x >= 0}.

    Brute force: every choice of n active constraints (rows or x_j = 0) that
    includes all equalities is solved as a square system.
    """
    names = [v.name for v in lp.variables]
    n = len(names)
    idx = {k: j for j, k in enumerate(names)}
    c = np.array([v.cost for v in lp.variables])
    rows, rhs, rels = [], [], []
    for con in lp.constraints:
        a = np.zeros(n)
        for k, v in con.coefficients.items():
            a[idx[k]] = v
        rows.append(a)
        rhs.append(con.rhs)
        rels.append(con.relation)
    for j in range(n):
        a = np.zeros(n)
        a[j] = 1.0
        rows.append(a)
        rhs.append(0.0)
        rels.append(">=")
    A = np.array(rows)
    b = np.array(rhs)
    eq = [i for i, r in enumerate(rels) if r == "="]
    others = [i for i, r in enumerate(rels) if r != "="]
    best = math.inf
    need = n - len(eq)
    if need < 0:
        combos = [()]
    else:
        combos = itertools.combinations(others, need)
    for combo in combos:
        act = list(eq) + list(combo)
        M = A[act]
        if np.linalg.matrix_rank(M) < n:
            continue
        if len(act) > n:
            x, *_ = np.linalg.lstsq(M, b[act], rcond=None)
        else:
            x = np.linalg.solve(M, b[act])
        r = A @ x - b
        scale = 1.0 + np.abs(b)
        ok = True
        for i, rel in enumerate(rels):
            if rel == "<=" and r[i] > tol * scale[i]:
                ok = False
            elif rel == ">=" and r[i] < -tol * scale[i]:
                ok = False
            elif rel == "=" and abs(r[i]) > tol * scale[i]:
                ok = False
            if not ok:
                break
        if ok:
            best = min(best, float(c @ x))
    return best


def annuity(invest, lifetime, rate):
    """Capital recovery by summing discounted payments (no closed form)."""
    pv_of_unit = sum((1 + rate) ** -k for k in range(1, int(lifetime) + 1))
    return invest / pv_of_unit


def gaussian_density(mu, sigma, x):
    return math.exp(-((x - mu) ** 2) / (2 * sigma * sigma)) / (sigma * math.sqrt(2 * math.pi))
