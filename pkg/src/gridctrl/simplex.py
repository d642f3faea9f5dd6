"""Embedded bounded-variable primal simplex.

Solves   min c @ x   s.t.   A x = b,   lower <= x <= upper
with infinite bounds allowed on either side.  Two phases (artificial
variables for feasibility), Dantzig pricing with a Bland-rule fallback after
a degenerate streak so cycling cannot occur, explicit bound-flip steps for
boxed variables.  Dense tableau arithmetic: this is meant for the small
problems this package generates, not as a general-purpose LP code.

The optimal status is only returned after re-solving the final basis against
the original data and certifying primal and dual feasibility at 1e-7.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

FEAS_TOL = 1e-7
PIVOT_TOL = 1e-9
DEGENERATE_STREAK = 40

_AT_LOWER, _AT_UPPER, _FREE, _BASIC = 0, 1, 2, 3


class SimplexStallError(RuntimeError):
    """Iteration cap hit before reaching an optimum."""


class SimplexNumericalError(RuntimeError):
    """Final basis failed the primal/dual certification."""


@dataclass(frozen=True, eq=False)
class LpProblem:
    c: np.ndarray                       # (n,)
    a_eq: np.ndarray                    # (m, n)
    b_eq: np.ndarray                    # (m,)
    lower: np.ndarray                   # (n,), -inf allowed
    upper: np.ndarray                   # (n,), +inf allowed

    @classmethod
    def build(cls, c, a_eq, b_eq, lower, upper) -> "LpProblem":
        c = np.atleast_1d(np.asarray(c, dtype=float))
        a_eq = np.asarray(a_eq, dtype=float).reshape(-1, c.shape[0])
        b_eq = np.atleast_1d(np.asarray(b_eq, dtype=float))
        lower = np.atleast_1d(np.asarray(lower, dtype=float))
        upper = np.atleast_1d(np.asarray(upper, dtype=float))
        return cls(c=c, a_eq=a_eq, b_eq=b_eq, lower=lower, upper=upper)


@dataclass(frozen=True, eq=False)
class LpResult:
    status: str                         # optimal | infeasible | unbounded
    x: np.ndarray | None = None
    objective: float | None = None
    iterations: int = 0


def _validate(p: LpProblem) -> None:
    n = p.c.shape[0]
    m = p.b_eq.shape[0]
    if p.a_eq.shape != (m, n):
        raise ValueError(f"A shape {p.a_eq.shape} does not match ({m}, {n})")
    if p.lower.shape != (n,) or p.upper.shape != (n,):
        raise ValueError("bound vectors must match the variable count")
    for name, arr in (("c", p.c), ("a_eq", p.a_eq), ("b_eq", p.b_eq)):
        if not np.all(np.isfinite(arr)):
            raise ValueError(f"{name} contains non-finite entries")
    if np.any(np.isnan(p.lower)) or np.any(np.isnan(p.upper)):
        raise ValueError("bounds contain NaN")
    if np.any(p.lower > p.upper):
        raise ValueError("lower bound exceeds upper bound")


class _Tableau:
    def __init__(self, p: LpProblem):
        self.n = p.c.shape[0]
        self.m = p.b_eq.shape[0]
        n, m = self.n, self.m
        self.total = n + m

        self.lower = np.concatenate([p.lower, np.zeros(m)])
        self.upper = np.concatenate([p.upper, np.full(m, np.inf)])
        self.x = np.zeros(self.total)
        self.status = np.full(self.total, _AT_LOWER, dtype=np.int8)
        for j in range(n):
            if np.isfinite(self.lower[j]):
                self.x[j] = self.lower[j]
                self.status[j] = _AT_LOWER
            elif np.isfinite(self.upper[j]):
                self.x[j] = self.upper[j]
                self.status[j] = _AT_UPPER
            else:
                self.x[j] = 0.0
                self.status[j] = _FREE

        resid = p.b_eq - p.a_eq @ self.x[:n]
        signs = np.where(resid >= 0.0, 1.0, -1.0)
        a_ext = np.hstack([p.a_eq, np.diag(signs)])
        # initial basis = artificials, B^-1 = diag(signs)
        self.t = signs[:, None] * a_ext
        self.a_ext = a_ext
        self.b = p.b_eq.copy()
        self.basis = np.arange(n, n + m)
        self.x[n:] = np.abs(resid)
        self.status[n:] = _BASIC
        self.iterations = 0

    def run(self, cvec: np.ndarray, max_iter: int) -> str:
        """Minimize cvec over the current basis.  'optimal' or 'unbounded'."""
        bland = False
        streak = 0
        rng = self.upper - self.lower
        while True:
            if self.iterations >= max_iter:
                raise SimplexStallError(
                    f"no optimum after {self.iterations} iterations")
            self.iterations += 1

            z = cvec - (cvec[self.basis] @ self.t if self.m else 0.0)
            movable = (self.status != _BASIC) & (rng > 0.0)
            dtol = FEAS_TOL * (1.0 + np.abs(cvec).max(initial=0.0))
            up = movable & ((self.status == _AT_LOWER) | (self.status == _FREE)) & (z < -dtol)
            dn = movable & ((self.status == _AT_UPPER) | (self.status == _FREE)) & (z > dtol)
            elig = up | dn
            if not elig.any():
                return "optimal"
            if bland:
                j = int(np.flatnonzero(elig)[0])
            else:
                scores = np.where(elig, np.abs(z), -1.0)
                j = int(np.argmax(scores))
            direction = 1.0 if up[j] else -1.0

            d = self.t[:, j] if self.m else np.zeros(0)
            rate = -direction * d
            bvars = self.basis
            ratios = np.full(self.m, np.inf)
            grow = rate > PIVOT_TOL
            shrink = rate < -PIVOT_TOL
            if grow.any():
                room = self.upper[bvars[grow]] - self.x[bvars[grow]]
                ratios[grow] = np.maximum(room, 0.0) / rate[grow]
            if shrink.any():
                room = self.x[bvars[shrink]] - self.lower[bvars[shrink]]
                ratios[shrink] = np.maximum(room, 0.0) / (-rate[shrink])

            own = rng[j]  # inf unless both bounds finite
            row_min = ratios.min() if self.m else np.inf
            delta = min(own, row_min)
            if not np.isfinite(delta):
                return "unbounded"

            streak = streak + 1 if delta <= 1e-10 else 0
            if streak > DEGENERATE_STREAK:
                bland = True
            elif streak == 0:
                bland = False

            if own <= row_min:
                # bound flip: variable crosses its box, basis unchanged
                self.x[bvars] -= direction * own * d
                self.x[j] = self.upper[j] if direction > 0 else self.lower[j]
                self.status[j] = _AT_UPPER if direction > 0 else _AT_LOWER
                continue

            tie = ratios <= row_min + 1e-10
            if bland:
                cands = np.flatnonzero(tie)
                r = int(cands[np.argmin(bvars[cands])])
            else:
                stab = np.where(tie, np.abs(d), -1.0)
                r = int(np.argmax(stab))

            leaving = int(bvars[r])
            self.x[bvars] -= direction * delta * d
            self.x[j] = self.x[j] + direction * delta
            self.x[leaving] = self.upper[leaving] if rate[r] > 0 else self.lower[leaving]
            self.status[leaving] = _AT_UPPER if rate[r] > 0 else _AT_LOWER

            piv = self.t[r, j]
            self.t[r] /= piv
            col = self.t[:, j].copy()
            col[r] = 0.0
            self.t -= np.outer(col, self.t[r])
            self.basis[r] = j
            self.status[j] = _BASIC


def _certify(p: LpProblem, tab: _Tableau) -> np.ndarray:
    """Re-solve the final basis on the original data; check KKT at 1e-7."""
    n, m = tab.n, tab.m
    x = tab.x.copy()
    if m:
        basis = tab.basis
        nonbasic = np.setdiff1d(np.arange(tab.total), basis)
        b_mat = tab.a_ext[:, basis]
        rhs = tab.b - tab.a_ext[:, nonbasic] @ x[nonbasic]
        try:
            x[basis] = np.linalg.solve(b_mat, rhs)
        except np.linalg.LinAlgError as exc:
            raise SimplexNumericalError("final basis matrix is singular") from exc

    scale_b = 1.0 + (np.abs(tab.b).max() if m else 0.0)
    if m and np.abs(tab.a_ext @ x - tab.b).max() > FEAS_TOL * scale_b:
        raise SimplexNumericalError("primal residual exceeds tolerance")
    span = np.abs(x).max(initial=0.0) + 1.0
    if (np.any(x < tab.lower - FEAS_TOL * span)
            or np.any(x > tab.upper + FEAS_TOL * span)):
        raise SimplexNumericalError("variable bound violated at optimum")

    cvec = np.concatenate([p.c, np.zeros(m)])
    if m:
        try:
            y = np.linalg.solve(tab.a_ext[:, tab.basis].T, cvec[tab.basis])
        except np.linalg.LinAlgError as exc:
            raise SimplexNumericalError("final basis matrix is singular") from exc
        z = cvec - tab.a_ext.T @ y
    else:
        z = cvec.copy()
    dual_tol = FEAS_TOL * (1.0 + np.abs(p.c).max(initial=0.0))
    rng = tab.upper - tab.lower
    for j in range(tab.total):
        if tab.status[j] == _BASIC or rng[j] <= 0.0:
            continue
        if tab.status[j] == _AT_LOWER and z[j] < -dual_tol:
            raise SimplexNumericalError("dual feasibility violated at a lower bound")
        if tab.status[j] == _AT_UPPER and z[j] > dual_tol:
            raise SimplexNumericalError("dual feasibility violated at an upper bound")
        if tab.status[j] == _FREE and abs(z[j]) > dual_tol:
            raise SimplexNumericalError("dual feasibility violated on a free variable")
    return x


def solve_lp(problem: LpProblem, max_iter: int | None = None) -> LpResult:
    """Two-phase bounded-variable simplex.  See module docstring."""
    _validate(problem)
    n, m = problem.c.shape[0], problem.b_eq.shape[0]
    if max_iter is None:
        max_iter = max(2000, 100 * (n + m))
    tab = _Tableau(problem)

    if m:
        phase1 = np.concatenate([np.zeros(n), np.ones(m)])
        if tab.run(phase1, max_iter) == "unbounded":
            # phase-1 objective is bounded below by 0; this cannot happen
            raise SimplexNumericalError("phase 1 reported an unbounded ray")
        if float(phase1 @ tab.x) > FEAS_TOL * (1.0 + np.abs(problem.b_eq).max()):
            return LpResult(status="infeasible", iterations=tab.iterations)
        # pin artificials at zero for phase 2
        tab.lower[n:] = 0.0
        tab.upper[n:] = 0.0

    phase2 = np.concatenate([problem.c, np.zeros(m)])
    outcome = tab.run(phase2, max_iter)
    if outcome == "unbounded":
        return LpResult(status="unbounded", iterations=tab.iterations)

    x_full = _certify(problem, tab)
    x = x_full[:n].copy()
    return LpResult(status="optimal", x=x, objective=float(problem.c @ x),
                    iterations=tab.iterations)
