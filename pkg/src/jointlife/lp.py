"""Dense linear programming: min/max c.x subject to A.x <= b and box bounds.

A self-contained bounded-variable primal simplex.  Problem sizes in this
package are tiny (a few hundred variables and rows), so a dense tableau is
the right tool.  Pricing is Dantzig's rule with lowest-index tie-breaking;
after a run of degenerate pivots the solver switches to Bland's rule, which
guarantees termination.  All choices are index-deterministic, so identical
inputs produce bit-identical outputs.

Numerical failures surface as an explicit ``failure`` status, never as a
silently wrong answer.  The solver accepts an optional warm-start basis
from a previous solve over the same constraint matrix; an unusable start is
detected and discarded.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

FEASIBILITY_TOL = 1e-9
OPTIMALITY_TOL = 1e-9
_PIVOT_TOL = 1e-11
_DEGENERATE_STALL = 40


class SolverFailure(RuntimeError):
    """The simplex could not certify a result (iteration limit or numerics)."""


@dataclass(frozen=True)
class LinearProgram:
    c: np.ndarray
    sense: str
    a_ub: np.ndarray
    b_ub: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self) -> None:
        c = np.asarray(self.c, dtype=float)
        a = np.asarray(self.a_ub, dtype=float)
        b = np.asarray(self.b_ub, dtype=float)
        lo = np.asarray(self.lower, dtype=float)
        hi = np.asarray(self.upper, dtype=float)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "a_ub", a.reshape(-1, c.size))
        object.__setattr__(self, "b_ub", b.ravel())
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        if self.sense not in ("min", "max"):
            raise ValueError(f"sense must be 'min' or 'max', got {self.sense!r}")
        if self.a_ub.shape != (self.b_ub.size, c.size):
            raise ValueError("constraint matrix shape does not match rhs/objective")
        if lo.shape != c.shape or hi.shape != c.shape:
            raise ValueError("bound vectors must match the objective length")
        if np.any(lo > hi + 1e-15):
            raise ValueError("lower bounds exceed upper bounds")
        if np.any(np.isinf(lo) & np.isinf(hi)):
            raise ValueError("each variable needs at least one finite bound")


@dataclass
class LPResult:
    status: str  # optimal | infeasible | unbounded | failure
    value: float | None = None
    x: np.ndarray | None = None
    basis: tuple | None = None  # opaque warm-start token


class _Tableau:
    """Simplex state over structural + slack (+ artificial) columns."""

    def __init__(self, a_full, lower, upper, basis, at_upper):
        self.a = a_full
        self.lower = lower
        self.upper = upper
        self.basis = basis            # length m, indices into columns
        self.at_upper = at_upper      # bool per column (meaning: nonbasic side)
        m = a_full.shape[0]
        self.t = a_full.copy()        # B^-1 A, starts with B = I ordering
        self.in_basis = np.zeros(a_full.shape[1], dtype=bool)
        self.in_basis[basis] = True
        self.xb = np.zeros(m)

    def nonbasic_values(self):
        vals = np.where(self.at_upper, self.upper, self.lower)
        vals[self.in_basis] = 0.0
        return vals

    def recompute_xb(self, b):
        """Solve for the basic values from scratch (drift control)."""
        bmat = self.a[:, self.basis]
        rhs = b - self.a @ self.nonbasic_values()
        try:
            self.xb = np.linalg.solve(bmat, rhs)
        except np.linalg.LinAlgError as exc:
            raise SolverFailure("singular basis") from exc


def _simplex_phase(tab: _Tableau, cost: np.ndarray, maxiter: int) -> str:
    """Run primal simplex to optimality of ``min cost.x``; returns status."""
    stall = 0
    use_bland = False
    reduced = cost - cost[tab.basis] @ tab.t
    refresh_in = 128
    for _ in range(maxiter):
        if refresh_in <= 0:  # rank-one updates drift; rebuild occasionally
            reduced = cost - cost[tab.basis] @ tab.t
            refresh_in = 128
        at_up = tab.at_upper
        eligible_lo = (~tab.in_basis) & ~at_up & (reduced < -OPTIMALITY_TOL) \
            & ~np.isinf(tab.lower)
        eligible_hi = (~tab.in_basis) & at_up & (reduced > OPTIMALITY_TOL) \
            & ~np.isinf(tab.upper)
        eligible = eligible_lo | eligible_hi
        if not np.any(eligible):
            return "optimal"
        idx = np.nonzero(eligible)[0]
        if use_bland:
            j = int(idx[0])
        else:
            j = int(idx[np.argmax(np.abs(reduced[idx]))])
        increasing = not tab.at_upper[j]
        col = tab.t[:, j]
        direction = col if increasing else -col

        # ratio test: basic variables must stay inside their bounds, and the
        # entering variable may at most traverse its own range (bound flip)
        lo_b = tab.lower[tab.basis]
        hi_b = tab.upper[tab.basis]
        step = tab.upper[j] - tab.lower[j]
        leave_row = -1
        leave_to_upper = False
        pos = direction > _PIVOT_TOL
        neg = direction < -_PIVOT_TOL
        with np.errstate(divide="ignore", invalid="ignore"):
            lim_lo = np.where(pos, (tab.xb - lo_b) / direction, np.inf)
            lim_hi = np.where(neg, (tab.xb - hi_b) / direction, np.inf)
        lim_lo[np.isnan(lim_lo)] = np.inf
        lim_hi[np.isnan(lim_hi)] = np.inf
        limits = np.minimum(lim_lo, lim_hi)
        limits[limits < 0.0] = 0.0
        r = int(np.argmin(limits)) if limits.size else -1
        best = limits[r] if limits.size else np.inf
        if use_bland and limits.size:
            near = np.nonzero(limits <= best + 1e-15)[0]
            r = int(near[np.argmin(tab.basis[near])])
        if best < step:
            leave_row = r
            leave_to_upper = lim_hi[r] <= lim_lo[r]
            step = best
        if not np.isfinite(step):
            return "unbounded"

        if leave_row < 0:
            # bound flip: entering variable crosses to its other bound
            tab.xb = tab.xb - direction * step
            tab.at_upper[j] = increasing
            stall += 1 if step <= FEASIBILITY_TOL else 0
            use_bland = use_bland or stall >= _DEGENERATE_STALL
            continue

        enter_val = (tab.lower[j] + step) if increasing else (tab.upper[j] - step)
        leaving = tab.basis[leave_row]
        tab.xb = tab.xb - direction * step
        tab.xb[leave_row] = enter_val
        tab.in_basis[leaving] = False
        tab.in_basis[j] = True
        tab.at_upper[leaving] = leave_to_upper
        tab.at_upper[j] = False
        tab.basis[leave_row] = j

        pivot = tab.t[leave_row, j]
        if abs(pivot) < _PIVOT_TOL:
            raise SolverFailure("vanishing pivot element")
        row = tab.t[leave_row, :] / pivot
        coljs = tab.t[:, j].copy()
        coljs[leave_row] = 0.0
        tab.t -= np.outer(coljs, row)
        tab.t[leave_row, :] = row
        reduced = reduced - reduced[j] * row
        reduced[j] = 0.0
        refresh_in -= 1

        if step <= FEASIBILITY_TOL:
            stall += 1
            if stall >= _DEGENERATE_STALL:
                use_bland = True
        else:
            stall = 0
    raise SolverFailure(f"iteration limit reached ({maxiter})")


def solve(lp: LinearProgram, start: tuple | None = None) -> LPResult:
    """Solve the program; see module docstring for guarantees."""
    n = lp.c.size
    m = lp.b_ub.size
    sign = 1.0 if lp.sense == "min" else -1.0
    cost_struct = sign * lp.c

    a_full = np.hstack([lp.a_ub, np.eye(m)]) if m else np.zeros((0, n))
    lower = np.concatenate([lp.lower, np.zeros(m)])
    upper = np.concatenate([lp.upper, np.full(m, np.inf)])

    # nonbasic start values: finite lower preferred, else upper
    def fresh_tableau():
        basis = np.arange(n, n + m)
        at_upper = np.isinf(lower) & ~np.isinf(upper)
        tab = _Tableau(a_full, lower, upper, basis, at_upper)
        tab.recompute_xb(lp.b_ub)
        return tab

    tab = None
    if start is not None:
        basis, at_upper = start
        basis = np.asarray(basis, dtype=int)
        at_upper = np.asarray(at_upper, dtype=bool)[: n + m].copy()
        if basis.size == m and at_upper.size == n + m and \
                np.unique(basis).size == m and np.all(basis < n + m):
            cand = _Tableau(a_full, lower, upper, basis.copy(), at_upper)
            try:
                bmat = a_full[:, basis]
                binv = np.linalg.inv(bmat)
                cand.t = binv @ a_full
                cand.recompute_xb(lp.b_ub)
                lo_b, hi_b = lower[basis], upper[basis]
                if np.all(cand.xb >= lo_b - FEASIBILITY_TOL) and \
                        np.all(cand.xb <= hi_b + FEASIBILITY_TOL):
                    tab = cand
            except (np.linalg.LinAlgError, SolverFailure):
                tab = None

    maxiter = 2000 + 60 * (n + m)
    try:
        if tab is None:
            tab = fresh_tableau()
            lo_b, hi_b = lower[tab.basis], upper[tab.basis]
            if np.any(tab.xb < lo_b - FEASIBILITY_TOL) or \
                    np.any(tab.xb > hi_b + FEASIBILITY_TOL):
                status = _phase_one(tab, lp.b_ub, maxiter)
                if status != "optimal":
                    return LPResult(status="infeasible")
        cost = np.zeros(tab.t.shape[1])
        cost[:n] = cost_struct
        status = _simplex_phase(tab, cost, maxiter)
    except SolverFailure:
        return LPResult(status="failure")
    if status == "unbounded":
        return LPResult(status="unbounded")

    tab.recompute_xb(lp.b_ub)
    x_all = tab.nonbasic_values()
    x_all[tab.basis] = tab.xb
    x = x_all[:n]
    # certify feasibility of the reported point
    if m and np.any(lp.a_ub @ x > lp.b_ub + 1e-7):
        return LPResult(status="failure")
    if np.any(x < lp.lower - 1e-7) or np.any(x > lp.upper + 1e-7):
        return LPResult(status="failure")
    value = float(np.dot(lp.c, x))
    token = (tab.basis.copy(), tab.at_upper.copy())
    return LPResult(status="optimal", value=value, x=x, basis=token)


def _phase_one(tab: _Tableau, b: np.ndarray, maxiter: int) -> str:
    """Repair an infeasible slack start by minimizing total violation.

    Rows whose slack starts below zero get an artificial column with a free
    ride to feasibility; once total violation hits zero the artificials are
    pinned at zero and the caller proceeds with the true objective.
    """
    viol_rows = np.nonzero(tab.xb < tab.lower[tab.basis] - FEASIBILITY_TOL)[0]
    if viol_rows.size == 0:
        return "optimal"
    m, n_cols = tab.t.shape
    k = viol_rows.size
    art_cols = np.zeros((m, k))
    art_cols[viol_rows, np.arange(k)] = -1.0
    tab.a = np.hstack([tab.a, art_cols])
    tab.t = np.hstack([tab.t, art_cols])
    tab.lower = np.concatenate([tab.lower, np.zeros(k)])
    tab.upper = np.concatenate([tab.upper, np.full(k, np.inf)])
    tab.in_basis = np.concatenate([tab.in_basis, np.zeros(k, dtype=bool)])
    tab.at_upper = np.concatenate([tab.at_upper, np.zeros(k, dtype=bool)])
    for i, row in enumerate(viol_rows):
        old = tab.basis[row]
        tab.in_basis[old] = False
        tab.at_upper[old] = False  # slack rests at its lower bound 0
        tab.basis[row] = n_cols + i
        tab.in_basis[n_cols + i] = True
        tab.t[row, :] *= -1.0
        tab.xb[row] *= -1.0
    # rows swapped to artificial basis need xb refreshed
    tab.recompute_xb(b)

    cost = np.zeros(n_cols + k)
    cost[n_cols:] = 1.0
    status = _simplex_phase(tab, cost, maxiter)
    if status != "optimal":
        return "infeasible"
    total = float(np.sum(tab.xb[np.asarray(tab.basis) >= n_cols]))
    if total > 1e-7:
        return "infeasible"
    # forbid artificials from re-entering
    tab.upper[n_cols:] = 0.0
    tab.lower[n_cols:] = 0.0
    return "optimal"
