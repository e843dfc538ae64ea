"""Bounded-variable revised primal simplex.

Solves ``max c x`` s.t. ``A x (= or <=) b``, ``lo <= x <= hi`` with finite
structural bounds.  Every row gets a slack column (bounds ``[0, inf)`` for
``<=`` rows, ``[0, 0]`` for equalities), so the slack basis always exists.

Phase 1 is the composite form: while some basic variable sits outside its
bounds, the objective is the negated total infeasibility, recomputed every
iteration.  It starts from any basis, which is how branch-and-bound children
warm-start from their parent's optimal basis after a bound change.

The basis is kept as a sparse LU factorization (``scipy.sparse.linalg.splu``)
plus a product-form eta file, refactorized every ``refactor_every`` pivots.
Pricing is Dantzig's largest reduced cost; after ``degenerate_limit``
consecutive degenerate pivots it falls back to Bland's smallest-index rule
until a pivot makes progress.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
TIME_LIMIT = "time_limit"


class LPNumericalError(RuntimeError):
    pass


@dataclass
class BasisState:
    basic: np.ndarray
    at_upper: np.ndarray

    def copy(self) -> "BasisState":
        return BasisState(self.basic.copy(), self.at_upper.copy())


@dataclass
class LPResult:
    status: str
    x: Optional[np.ndarray]
    objective: float
    basis: Optional[BasisState]
    iterations: int
    bland_iterations: int = 0


class BoundedSimplex:
    def __init__(self, A, sense, rhs, c, tol: float = 1e-9, refactor_every: int = 40,
                 degenerate_limit: int = 60):
        A = sp.csc_matrix(A, dtype=float)
        self.m, self.n = A.shape
        m = self.m
        self.M = sp.hstack([A, sp.identity(m, format="csc")], format="csc")
        self.MT = self.M.T.tocsr()
        self.b = np.asarray(rhs, dtype=float)
        self.c = np.concatenate([np.asarray(c, dtype=float), np.zeros(m)])
        sense = np.asarray(sense)
        self.slack_lo = np.zeros(m)
        self.slack_hi = np.where(sense == "E", 0.0, np.inf)
        self.tol = tol
        self.pivot_tol = 1e-9
        self.refactor_every = refactor_every
        self.degenerate_limit = degenerate_limit

    def slack_basis(self) -> BasisState:
        return BasisState(np.arange(self.n, self.n + self.m), np.zeros(self.n + self.m, dtype=bool))

    # -- factorization ---------------------------------------------------

    def _factor(self):
        self._lu = None
        self._etas = []
        if self.m == 0:
            return
        B = self.M[:, self.basic]
        try:
            self._lu = splu(sp.csc_matrix(B), permc_spec="COLAMD")
        except RuntimeError as exc:
            raise LPNumericalError(f"singular basis: {exc}") from exc

    def _ftran(self, a):
        z = self._lu.solve(a)
        for r, idx, vals, diag in self._etas:
            zr = z[r]
            if zr != 0.0:
                z[idx] += vals * zr
                z[r] = zr * diag
        return z

    def _btran(self, v):
        v = v.copy()
        for r, idx, vals, diag in reversed(self._etas):
            v[r] = v[r] * diag + v[idx] @ vals
        return self._lu.solve(v, trans="T")

    def _push_eta(self, r, alpha):
        # E = I + (eta - e_r) e_r^T with eta_r = 1/alpha_r, eta_i = -alpha_i/alpha_r
        ar = alpha[r]
        idx = np.flatnonzero(alpha)
        idx = idx[idx != r]
        self._etas.append((r, idx, -alpha[idx] / ar, 1.0 / ar))

    def _column(self, q):
        a = np.zeros(self.m)
        lo, hi = self.M.indptr[q], self.M.indptr[q + 1]
        a[self.M.indices[lo:hi]] = self.M.data[lo:hi]
        return a

    def _recompute_basic(self, x):
        xn = x.copy()
        xn[self.basic] = 0.0
        x[self.basic] = self._lu.solve(self.b - self.M @ xn) if self.m else 0.0

    # -- main loop -------------------------------------------------------

    def solve(self, lo, hi, basis: Optional[BasisState] = None, deadline: Optional[float] = None,
              max_iter: int = 200_000) -> LPResult:
        n, m = self.n, self.m
        lo_f = np.concatenate([np.asarray(lo, dtype=float), self.slack_lo])
        hi_f = np.concatenate([np.asarray(hi, dtype=float), self.slack_hi])
        if np.any(lo_f > hi_f):
            return LPResult(INFEASIBLE, None, -np.inf, None, 0)
        if m == 0:
            x = np.where(self.c[:n] > 0, hi_f[:n], lo_f[:n])
            return LPResult(OPTIMAL, x, float(self.c[:n] @ x), self.slack_basis(), 0)

        state = (basis or self.slack_basis()).copy()
        try:
            return self._run(lo_f, hi_f, state, deadline, max_iter)
        except LPNumericalError:
            if basis is None:
                raise
            return self._run(lo_f, hi_f, self.slack_basis(), deadline, max_iter)

    def _run(self, lo_f, hi_f, state, deadline, max_iter) -> LPResult:
        n, m = self.n, self.m
        tol = self.tol
        self.basic = state.basic
        at_upper = state.at_upper & np.isfinite(hi_f)
        is_basic = np.zeros(n + m, dtype=bool)
        is_basic[self.basic] = True
        at_upper[is_basic] = False
        fixed = hi_f - lo_f <= 0.0
        x = np.where(at_upper, hi_f, lo_f)
        self._factor()
        self._recompute_basic(x)

        it = bland_its = 0
        degenerate_run = 0
        bland = False
        while True:
            if it % self.refactor_every == 0 and it:
                self._factor()
                self._recompute_basic(x)
            if deadline is not None and it % 16 == 0 and time.perf_counter() > deadline:
                return LPResult(TIME_LIMIT, None, np.nan, None, it, bland_its)
            if it >= max_iter:
                raise LPNumericalError(f"no convergence after {max_iter} iterations")

            xb = x[self.basic]
            lob, hib = lo_f[self.basic], hi_f[self.basic]
            below = xb < lob - tol
            above = xb > hib + tol
            phase1 = bool(below.any() or above.any())
            if phase1:
                cb = below.astype(float) - above.astype(float)
                d = -(self.MT @ self._btran(cb))
            else:
                cb = self.c[self.basic]
                d = self.c - self.MT @ self._btran(cb)
            d[is_basic] = 0.0
            d[fixed] = 0.0
            eligible = np.where(at_upper, d < -tol, d > tol)
            cand = np.flatnonzero(eligible)
            if cand.size == 0:
                if self._etas:
                    # confirm on a fresh factorization before stopping
                    self._factor()
                    self._recompute_basic(x)
                    continue
                if phase1:
                    return LPResult(INFEASIBLE, None, -np.inf, BasisState(self.basic.copy(), at_upper.copy()),
                                    it, bland_its)
                break
            if bland:
                q = int(cand[0])
                bland_its += 1
            else:
                q = int(cand[np.argmax(np.abs(d[cand]))])

            direction = -1.0 if at_upper[q] else 1.0
            alpha = self._ftran(self._column(q))
            delta = -direction * alpha
            t_flip = hi_f[q] - lo_f[q]

            limits = np.full(m, np.inf)
            leave_upper = np.zeros(m, dtype=bool)
            dec = delta < -self.pivot_tol
            inc = delta > self.pivot_tol
            # decreasing basics stop at lo (or at hi when currently above it)
            dec_above = dec & above
            dec_ok = dec & ~above & ~below
            limits[dec_above] = (xb[dec_above] - hib[dec_above]) / -delta[dec_above]
            leave_upper[dec_above] = True
            limits[dec_ok] = (xb[dec_ok] - lob[dec_ok]) / -delta[dec_ok]
            inc_below = inc & below
            inc_ok = inc & ~above & ~below
            limits[inc_below] = (lob[inc_below] - xb[inc_below]) / delta[inc_below]
            limits[inc_ok] = (hib[inc_ok] - xb[inc_ok]) / delta[inc_ok]
            leave_upper[inc_ok] = True
            np.maximum(limits, 0.0, out=limits)

            t_min = limits.min() if m else np.inf
            if t_flip <= t_min:
                t = t_flip
                if not np.isfinite(t):
                    raise LPNumericalError("unbounded direction in a bounded model")
                x[q] += direction * t
                x[self.basic] += delta * t
                at_upper[q] = not at_upper[q]
                x[q] = hi_f[q] if at_upper[q] else lo_f[q]
                degenerate_run = 0
                bland = False
                it += 1
                continue
            if not np.isfinite(t_min):
                raise LPNumericalError("unbounded direction in a bounded model")
            ties = np.flatnonzero(limits <= t_min + 1e-12)
            if bland:
                r = int(ties[np.argmin(self.basic[ties])])
            else:
                r = int(ties[np.argmax(np.abs(alpha[ties]))])
            t = limits[r]
            if abs(alpha[r]) < self.pivot_tol:
                raise LPNumericalError("pivot element too small")

            x[self.basic] += delta * t
            x[q] += direction * t
            p = int(self.basic[r])
            at_upper[p] = bool(leave_upper[r]) and np.isfinite(hi_f[p])
            x[p] = hi_f[p] if at_upper[p] else lo_f[p]
            is_basic[p] = False
            is_basic[q] = True
            at_upper[q] = False
            self.basic[r] = q
            self._push_eta(r, alpha)

            if t <= 1e-12:
                degenerate_run += 1
                if degenerate_run >= self.degenerate_limit:
                    bland = True
            else:
                degenerate_run = 0
                bland = False
            it += 1

        xs = np.clip(x[:n], lo_f[:n], hi_f[:n])
        return LPResult(OPTIMAL, xs, float(self.c[:n] @ xs), BasisState(self.basic.copy(), at_upper.copy()),
                        it, bland_its)
