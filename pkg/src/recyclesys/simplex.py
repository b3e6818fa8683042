"""Dense two-phase primal simplex with shadow prices.

The kernel converts a :class:`~recyclesys.program.LinearProgram` to standard
form (shifted bounds, finite upper bounds as rows, slack and surplus
columns), equilibrates it, and runs a tableau simplex. Pricing is Dantzig's
rule; after ``DEGENERACY_STREAK`` consecutive degenerate pivots it falls back
to Bland's rule until progress resumes, which rules out cycling.

Duals are reported as sensitivities of the optimal objective to the
right-hand side: ``dual[row] = d(objective) / d(rhs)``. A binding ``<=`` row
of a minimization therefore has a nonpositive dual.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping

import numpy as np

from .errors import SolverError, SolverStateError, UnknownNameError
from .program import EQ, GE, LE, LinearProgram

FEAS_TOL = 1e-8
OPT_TOL = 1e-9
PIVOT_TOL = 1e-9
REFACTOR_EVERY = 500
DEGENERACY_STREAK = 50
MAX_ITER_FACTOR = 50


class LpStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True, eq=False)
class LpSolution:
    status: LpStatus
    objective: float
    primal: Mapping[str, float] = field(default_factory=dict)
    dual: Mapping[str, float] = field(default_factory=dict)
    iterations: int = 0
    reduced_costs: Mapping[str, float] = field(default_factory=dict)
    basis: tuple[str, ...] = ()
    ray: Mapping[str, float] | None = None
    infeasible_rows: tuple[str, ...] = ()

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


def dual_of(sol: LpSolution, constraint_name: str) -> float:
    """Shadow price of a row, ``d(objective)/d(rhs)``."""
    if not sol.optimal:
        raise SolverStateError(f"no duals for a {sol.status.value} solution")
    try:
        return sol.dual[constraint_name]
    except KeyError:
        raise UnknownNameError(f"unknown constraint {constraint_name!r}") from None


def dual_objective(lp: LinearProgram, sol: LpSolution) -> float:
    """Lagrangian dual value ``b.y`` plus the bound terms of the reduced costs."""
    total = sum(c.rhs * sol.dual[c.name] for c in lp.constraints)
    for v in lp.variables:
        r = sol.reduced_costs[v.name]
        # basic columns carry round-off, not a bound multiplier
        if abs(r) <= 1e-7 * max(1.0, abs(v.cost)):
            continue
        total += r * (v.lower if r > 0 else v.upper)
    return total


# -- standard form -----------------------------------------------------------


class _Standard:
    """min c.x, A x (+/- slack) = b, x >= 0, built from a named LP."""

    def __init__(self, lp: LinearProgram):
        n = len(lp.variables)
        vidx = {v.name: j for j, v in enumerate(lp.variables)}
        self.lp = lp
        self.offset = np.zeros(n)
        self.cols: list[tuple[int, float]] = []  # (original variable, sign)
        ub_rows: list[tuple[int, float]] = []
        for j, v in enumerate(lp.variables):
            lo, hi = v.lower, v.upper
            if math.isfinite(lo) and lo == hi:
                self.offset[j] = lo
            elif math.isfinite(lo):
                self.offset[j] = lo
                self.cols.append((j, 1.0))
                if math.isfinite(hi):
                    ub_rows.append((len(self.cols) - 1, hi - lo))
            elif math.isfinite(hi):
                self.offset[j] = hi
                self.cols.append((j, -1.0))
            else:
                self.cols.append((j, 1.0))
                self.cols.append((j, -1.0))

        m0 = len(lp.constraints)
        A0 = np.zeros((m0, n))
        for i, c in enumerate(lp.constraints):
            for name, a in c.coefficients.items():
                A0[i, vidx[name]] = a
        self.A0 = A0
        self.c0 = np.array([v.cost for v in lp.variables], dtype=float)
        self.b0 = np.array([c.rhs for c in lp.constraints], dtype=float)

        ns = len(self.cols)
        orig = np.array([j for j, _ in self.cols], dtype=int)
        sign = np.array([s for _, s in self.cols], dtype=float)
        self.orig, self.sign = orig, sign
        m = m0 + len(ub_rows)
        A = np.zeros((m, ns))
        if ns:
            A[:m0] = A0[:, orig] * sign
        b = np.empty(m)
        b[:m0] = self.b0 - A0 @ self.offset
        rel = [c.relation for c in lp.constraints]
        for k, (col, bound) in enumerate(ub_rows):
            A[m0 + k, col] = 1.0
            b[m0 + k] = bound
            rel.append(LE)
        self.m0, self.m, self.ns = m0, m, ns
        self.A, self.b, self.rel = A, b, rel
        self.c = self.c0[orig] * sign if ns else np.zeros(0)
        self.const = float(self.c0 @ self.offset)
        self.row_names = [c.name for c in lp.constraints] + [
            f"ub:{lp.variables[orig[col]].name}" for col, _ in ub_rows
        ]
        self.col_names = [
            lp.variables[j].name + ("" if s > 0 else "-") for j, s in self.cols
        ]

    def scale(self, passes: int = 6):
        """Geometric-mean equilibration with power-of-two factors."""
        A = np.abs(self.A)
        r = np.ones(self.m)
        s = np.ones(self.ns)
        if A.size == 0:
            self.r, self.s = r, s
            return
        nz = A > 0
        logA = np.where(nz, np.log2(np.where(nz, A, 1.0)), 0.0)
        lr = np.zeros(self.m)
        ls = np.zeros(self.ns)
        row_nz, col_nz = nz.any(axis=1), nz.any(axis=0)
        for _ in range(passes):
            M = logA + lr[:, None] + ls[None, :]
            rmax = np.where(nz, M, -np.inf).max(axis=1)
            rmin = np.where(nz, M, np.inf).min(axis=1)
            with np.errstate(invalid="ignore"):
                lr -= np.where(row_nz, (rmax + rmin) / 2.0, 0.0)
            M = logA + lr[:, None] + ls[None, :]
            cmax = np.where(nz, M, -np.inf).max(axis=0)
            cmin = np.where(nz, M, np.inf).min(axis=0)
            with np.errstate(invalid="ignore"):
                ls -= np.where(col_nz, (cmax + cmin) / 2.0, 0.0)
        r = np.exp2(np.round(lr))
        s = np.exp2(np.round(ls))
        self.r, self.s = r, s


# -- tableau kernel ------------------------------------------------------------


class _Tableau:
    """Full tableau ``B^-1 [A | b]`` kept next to the original ``[A | b]``.

    The tableau is rebuilt from the original data every ``REFACTOR_EVERY``
    pivots, and whenever a basic value drifts below ``-FEAS_TOL``, so
    rounding errors do not accumulate over long runs.
    """

    def __init__(self, A, b, basis, n_cols):
        m = A.shape[0]
        self.A = np.zeros((m, n_cols))
        self.A[:, : A.shape[1]] = A
        self.b = np.array(b, dtype=float)
        self.T = np.zeros((m, n_cols + 1))
        self.T[:, :n_cols] = self.A
        self.T[:, -1] = self.b
        self.basis = np.array(basis, dtype=int)
        self.n = n_cols
        self.iterations = 0

    def rhs(self):
        return self.T[:, -1]

    def restrict(self, rows, n_cols):
        """Keep the given rows and the first ``n_cols`` columns."""
        self.A = self.A[rows][:, :n_cols]
        self.b = self.b[rows]
        self.T = np.hstack([self.T[rows][:, :n_cols], self.T[rows][:, -1:]])
        self.basis = self.basis[rows]
        self.n = n_cols

    def refactor(self):
        if not self.T.shape[0]:
            return
        B = self.A[:, self.basis]
        try:
            self.T[:, : self.n] = np.linalg.solve(B, self.A)
            self.T[:, -1] = np.linalg.solve(B, self.b)
        except np.linalg.LinAlgError:
            raise SolverError("basis became singular") from None
        T = self.T
        T[np.abs(T) < 1e-13] = 0.0
        T[np.arange(len(self.basis)), self.basis] = 1.0

    def pivot(self, r, q):
        T = self.T
        T[r] /= T[r, q]
        col = T[:, q].copy()
        col[r] = 0.0
        rows = np.flatnonzero(col)
        if rows.size:
            prow = T[r]
            cols = np.flatnonzero(prow)
            if cols.size * 3 < prow.size:
                T[np.ix_(rows, cols)] -= np.outer(col[rows], prow[cols])
            else:
                T[rows] -= np.outer(col[rows], prow)
        T[:, q] = 0.0
        T[r, q] = 1.0
        self.basis[r] = q
        self.iterations += 1

    def reduced_costs(self, cost):
        """cost - c_B B^-1 A for all columns, plus -objective in the last slot."""
        d = np.zeros(self.n + 1)
        d[: len(cost)] = cost
        cb = d[self.basis]
        return d - cb @ self.T

    def _ratio_test(self, q, bland):
        col = self.T[:, q]
        mask = col > PIVOT_TOL
        if not mask.any():
            return None, 0.0
        rows = np.flatnonzero(mask)
        rhs = np.maximum(self.rhs()[rows], 0.0)
        cr = col[rows]
        if bland:
            ratios = rhs / cr
            best = ratios.min()
            ties = rows[ratios <= best + 1e-12 * (1.0 + best)]
            return int(ties[np.argmin(self.basis[ties])]), best
        # Harris: allow a feasibility tolerance, then take the largest pivot
        bound = ((rhs + FEAS_TOL) / cr).min()
        ratios = rhs / cr
        ok = ratios <= bound
        pick = np.flatnonzero(ok)
        k = pick[np.argmax(cr[pick])]
        return int(rows[k]), float(ratios[k])

    def run(self, cost, allowed, opt_tol, max_iter, on_degenerate_streak=DEGENERACY_STREAK):
        """Iterate to optimality; returns ('optimal'|'unbounded', entering column)."""
        if self.n == 0:
            return "optimal", None
        d = self.reduced_costs(cost)
        streak = 0
        bland = False
        since_refactor = 0
        while True:
            if self.iterations > max_iter:
                raise SolverError(f"iteration limit {max_iter} reached")
            dj = np.where(allowed, d[: self.n], 0.0)
            if bland:
                cands = np.flatnonzero(dj < -opt_tol)
                if cands.size == 0:
                    return "optimal", None
                q = int(cands[0])
            else:
                q = int(np.argmin(dj))
                if dj[q] >= -opt_tol:
                    return "optimal", None
            r, step = self._ratio_test(q, bland)
            if r is None:
                return "unbounded", q
            degenerate = step <= FEAS_TOL * 1e-3
            self.pivot(r, q)
            since_refactor += 1
            d -= d[q] * self.T[r]
            d[q] = 0.0
            if degenerate:
                streak += 1
                if streak >= on_degenerate_streak:
                    bland = True
            else:
                streak = 0
                bland = False
            if since_refactor >= REFACTOR_EVERY or self.rhs().min() < -FEAS_TOL:
                self.refactor()
                d = self.reduced_costs(cost)
                since_refactor = 0


def solve(lp: LinearProgram, *, max_iter: int | None = None) -> LpSolution:
    """Minimize ``lp`` and return a primal/dual certified solution."""
    sf = _Standard(lp)
    sf.scale()
    m, ns = sf.m, sf.ns
    A = sf.A * sf.r[:, None] * sf.s[None, :]
    b = sf.b * sf.r
    c = sf.c * sf.s

    # slacks: +1 for <=, -1 for >=, none for =
    slack_rows = [i for i in range(m) if sf.rel[i] != EQ]
    n_slack = len(slack_rows)
    S = np.zeros((m, n_slack))
    for k, i in enumerate(slack_rows):
        S[i, k] = 1.0 if sf.rel[i] == LE else -1.0
    flip = b < 0
    A[flip] *= -1.0
    S[flip] *= -1.0
    b = np.abs(b)
    row_sign = np.where(flip, -1.0, 1.0)

    basis = np.full(m, -1, dtype=int)
    for k, i in enumerate(slack_rows):
        if S[i, k] > 0:
            basis[i] = ns + k
    art_rows = np.flatnonzero(basis < 0)
    n_art = len(art_rows)
    n_cols = ns + n_slack + n_art
    Afull = np.hstack([A, S])
    tab = _Tableau(np.hstack([Afull, np.zeros((m, n_art))]), b, basis, n_cols)
    for k, i in enumerate(art_rows):
        tab.T[i, ns + n_slack + k] = 1.0
        tab.A[i, ns + n_slack + k] = 1.0
        tab.basis[i] = ns + n_slack + k
    if max_iter is None:
        max_iter = MAX_ITER_FACTOR * (m + n_cols) + 1000

    # phase 1
    if n_art:
        cost1 = np.zeros(n_cols)
        cost1[ns + n_slack :] = 1.0
        allowed = np.ones(n_cols, dtype=bool)
        tab.run(cost1, allowed, OPT_TOL, max_iter)
        infeas = float(cost1[tab.basis] @ tab.rhs())
        if infeas > FEAS_TOL * max(1.0, np.abs(b).max()):
            is_art = tab.basis >= ns + n_slack
            bad = [
                sf.row_names[art_rows[tab.basis[i] - ns - n_slack]]
                for i in np.flatnonzero(is_art & (tab.rhs() > FEAS_TOL))
            ]
            return LpSolution(LpStatus.INFEASIBLE, math.nan, iterations=tab.iterations, infeasible_rows=tuple(bad))
        # drive remaining artificials out of the basis
        keep = np.ones(m, dtype=bool)
        for i in range(m):
            if tab.basis[i] >= ns + n_slack:
                row = np.abs(tab.T[i, : ns + n_slack])
                j = int(np.argmax(row)) if row.size else -1
                if j >= 0 and row[j] > 1e-9:
                    tab.pivot(i, j)
                else:
                    keep[i] = False
        tab.restrict(np.flatnonzero(keep), ns + n_slack)
        tab.refactor()
    else:
        keep = np.ones(m, dtype=bool)
    n2 = ns + n_slack

    # phase 2
    cost2 = np.zeros(n2)
    cost2[:ns] = c
    opt_tol = OPT_TOL * max(1.0, float(np.abs(c).max()) if c.size else 1.0)
    allowed = np.ones(n2, dtype=bool)
    status, q = tab.run(cost2, allowed, opt_tol, max_iter)
    iters = tab.iterations

    if status == "unbounded":
        direction = np.zeros(n2)
        direction[q] = 1.0
        direction[tab.basis] = -tab.T[:, q]
        x_dir = np.zeros(len(lp.variables))
        for k in range(ns):
            x_dir[sf.orig[k]] += sf.sign[k] * sf.s[k] * direction[k]
        ray = {v.name: float(x_dir[j]) for j, v in enumerate(lp.variables)}
        return LpSolution(LpStatus.UNBOUNDED, -math.inf, iterations=iters, ray=ray)

    # refine from the final basis
    Ak = Afull[keep]
    bk = b[keep]
    B = Ak[:, tab.basis]
    try:
        xb = np.linalg.solve(B, bk) if B.size else np.zeros(0)
        yk = np.linalg.solve(B.T, cost2[tab.basis]) if B.size else np.zeros(0)
    except np.linalg.LinAlgError:
        raise SolverError("singular final basis") from None
    if not (np.all(np.isfinite(xb)) and np.all(np.isfinite(yk))):
        raise SolverError("non-finite values in final basis solve")
    xs = np.zeros(n2)
    xs[tab.basis] = xb
    y_scaled = np.zeros(m)
    y_scaled[keep] = yk
    y = y_scaled * row_sign * sf.r

    x_struct = np.maximum(xs[:ns], 0.0) * sf.s
    x = sf.offset.copy()
    np.add.at(x, sf.orig, sf.sign * x_struct)
    y_orig = y[: sf.m0]
    rc = sf.c0 - sf.A0.T @ y_orig if sf.m0 else sf.c0.copy()
    names = [v.name for v in lp.variables]
    col_labels = sf.col_names + [f"slack:{sf.row_names[i]}" for i in slack_rows]
    return LpSolution(
        LpStatus.OPTIMAL,
        float(sf.c0 @ x),
        primal=dict(zip(names, x.tolist())),
        dual={cn.name: float(y_orig[i]) for i, cn in enumerate(lp.constraints)},
        iterations=iters,
        reduced_costs=dict(zip(names, rc.tolist())),
        basis=tuple(sorted(col_labels[j] for j in tab.basis)),
    )
