"""Collage distance D(p) = d_sup(T_p F, F) and its minimization over the
weight simplex C = {p >= 0, sum p = 1 - sum delta}.

With maps and offsets fixed, T_p F(x) - F(x) is affine in p at every x, so
D is a maximum of finitely many |affine| terms once the sup is reduced to a
finite evaluation set:

- exact mode (identity partitions): the difference is monotone in F on each
  cell, so the sup sits at cell endpoints and their left limits -- two
  constraint rows per cell, and D is the true sup;
- grid mode (general maps): rows are sampled on a uniform grid united with
  all map-image and target breakpoints, a lower bound on the true sup.

Minimizing max_m |A_m p + b_m| over C is the linear program
min t s.t. -t <= A_m p + b_m <= t, p in C, solved by a self-contained dense
two-phase simplex routine.  A projected-subgradient solver is provided as an
independent cross-check for small problems.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .distfn import DistributionFunction
from .ifs import IfsSystem, _structural_violations

__all__ = [
    "CollageProblem",
    "InverseSolution",
    "collage_distance",
    "solve_inverse",
    "solve_inverse_subgradient",
    "collage_bound",
    "convexity_witness",
]


class LpError(RuntimeError):
    """Internal simplex failure; cannot occur for well-formed collage LPs."""


class CollageProblem:
    """Inverse problem: fixed target F, maps and offsets; free weights p.

    ``mode`` is auto-selected: "exact" for identity partitions (endpoint
    reduction, exact sup), "grid" otherwise.  The constraint rows (A, b)
    with D(p) = max |A p + b| are assembled once at construction.
    """

    def __init__(self, target: DistributionFunction, maps, delta,
                 mode: str | None = None, grid_size: int = 512):
        structural = _structural_violations(maps, list(delta))
        if structural:
            raise ValueError("invalid collage problem: " + "; ".join(structural))
        self.target = target
        self.maps = tuple(maps)
        self.delta = np.asarray(delta, float).copy()
        self.delta.flags.writeable = False
        self.k = len(self.maps)
        self.weight_sum = 1.0 - float(np.sum(self.delta))
        if self.weight_sum <= 0.0:
            raise ValueError(
                f"1 - sum(delta) = {self.weight_sum} must be positive for a usable simplex"
            )
        identity = all(m.is_identity() for m in self.maps)
        if mode is None:
            mode = "exact" if identity else "grid"
        if mode == "exact" and not identity:
            raise ValueError("exact mode requires identity-partition maps")
        if mode not in ("exact", "grid"):
            raise ValueError(f"unknown mode {mode!r}")
        self.mode = mode
        self.grid_size = int(grid_size)
        self._assemble()

    # -- constraint assembly ------------------------------------------------

    def _assemble(self) -> None:
        target, maps = self.target, self.maps
        cum_delta = np.concatenate([[0.0], np.cumsum(self.delta)])
        rows_a, rows_b, spots = [], [], []

        def add_row(i: int, f_pulled: float, f_at: float, x: float, left: bool) -> None:
            # T_p F(x) - F(x) = sum_{j<i} p_j + p_i F(w_i^{-1}(x)) + sum_{j<i} delta_j - F(x)
            coeff = np.zeros(self.k)
            coeff[:i] = 1.0
            coeff[i] = f_pulled
            rows_a.append(coeff)
            rows_b.append(cum_delta[i] - f_at)
            spots.append((x, left))

        if self.mode == "exact":
            for i, m in enumerate(maps):
                lo = target.eval(m.a)
                hi = target.eval_left_limit(m.b)
                add_row(i, lo, lo, m.a, False)
                add_row(i, hi, hi, m.b, True)
        else:
            starts = np.array([m.c for m in maps])
            pts = [np.linspace(0.0, 1.0, self.grid_size)]
            pts.append(starts)
            pts.append(np.array([m.d for m in maps]))
            bps = np.asarray(target.breakpoints(), float)
            if bps.size:
                pts.append(bps)
                for m in maps:
                    inside = bps[(bps >= m.a) & (bps < m.b)]
                    if inside.size:
                        pts.append(m.slope * inside + m.intercept)
            xs = np.unique(np.concatenate(pts))
            xs = xs[(xs >= 0.0) & (xs <= 1.0)]
            kmax = self.k - 1
            for x in xs:
                i = min(max(int(np.searchsorted(starts, x, side="right")) - 1, 0), kmax)
                add_row(i, target.eval(maps[i].inverse(x)), target.eval(x), x, False)
                if x > 0.0:
                    pos = int(np.searchsorted(starts, x, side="left"))
                    if 0 < pos <= kmax and starts[pos] == x:
                        il = pos - 1
                        pulled_left = target.eval_left_limit(maps[il].b)
                    else:
                        il = i
                        pulled_left = target.eval_left_limit(maps[il].inverse(x))
                    add_row(il, pulled_left, target.eval_left_limit(x), x, True)

        self._A = np.asarray(rows_a)
        self._b = np.asarray(rows_b)
        self._A.flags.writeable = False
        self._b.flags.writeable = False
        self.eval_spots = tuple(spots)  # (x, is_left_limit) per constraint row

    def residuals(self, p) -> np.ndarray:
        """Signed values T_p F - F at every constraint point, affine in p."""
        p = np.asarray(p, float)
        if p.shape != (self.k,):
            raise ValueError(f"expected weight vector of length {self.k}, got shape {p.shape}")
        return self._A @ p + self._b

    def __repr__(self) -> str:
        return f"CollageProblem(k={self.k}, mode={self.mode!r}, rows={len(self._b)})"


def collage_distance(problem: CollageProblem, p) -> float:
    """D(p) = max |T_p F - F| over the problem's evaluation set.

    Defined for any real weight vector, not only points of C; D is convex.
    """
    return float(np.max(np.abs(problem.residuals(p))))


def convexity_witness(problem: CollageProblem, p1, p2, lam: float):
    """(D(lam*p1 + (1-lam)*p2), lam*D(p1) + (1-lam)*D(p2)) for property checks."""
    p1 = np.asarray(p1, float)
    p2 = np.asarray(p2, float)
    if p1.shape != p2.shape:
        raise ValueError("weight vectors must have equal length")
    lhs = collage_distance(problem, lam * p1 + (1.0 - lam) * p2)
    rhs = lam * collage_distance(problem, p1) + (1.0 - lam) * collage_distance(problem, p2)
    return lhs, rhs


def collage_bound(epsilon: float, c: float) -> float:
    """Fixed-point distance guarantee epsilon/(1-c) from a collage distance."""
    if epsilon < 0.0:
        raise ValueError("epsilon must be non-negative")
    if not c < 1.0:
        raise ValueError(f"contractivity constant must be < 1, got {c}")
    return epsilon / (1.0 - c)


@dataclass
class InverseSolution:
    p_star: np.ndarray
    d_star: float
    iterations: int
    mode: str
    active_constraints: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "p_star": [float(v) for v in self.p_star],
            "D_star": float(self.d_star),
            "active_constraints": [int(i) for i in self.active_constraints],
            "iterations": int(self.iterations),
            "mode": self.mode,
        }


def solve_inverse(problem: CollageProblem, tol: float = 1e-9) -> InverseSolution:
    """Minimize D over C as the LP  min t : |A p + b| <= t, p in C.

    The LP is exact for the assembled constraint set, so D(p*) matches the
    true constrained minimum up to simplex arithmetic; ``tol`` only guards
    the optimality assertion in degenerate near-ties.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    p, t, pivots = _solve_minimax_lp(problem._A, problem._b, problem.weight_sum)
    d_star = collage_distance(problem, p)
    res = np.abs(problem.residuals(p))
    active = np.nonzero(res >= d_star - 1e-8)[0]
    return InverseSolution(
        p_star=p,
        d_star=d_star,
        iterations=pivots,
        mode=problem.mode,
        active_constraints=list(active),
    )


def solve_inverse_subgradient(problem: CollageProblem, iterations: int = 100_000,
                              step_scale: float | None = None):
    """Projected subgradient descent on D over C; independent cross-check.

    Steps are step_scale/sqrt(t); the best iterate is returned.  Converges
    like O(log t / sqrt(t)), so this is a coarse check, not the solver.
    """
    k, s = problem.k, problem.weight_sum
    if step_scale is None:
        step_scale = s
    p = np.full(k, s / k)
    best_p, best_d = p.copy(), collage_distance(problem, p)
    a_mat, b_vec = problem._A, problem._b
    for t in range(1, iterations + 1):
        r = a_mat @ p + b_vec
        m = int(np.argmax(np.abs(r)))
        g = a_mat[m] if r[m] >= 0.0 else -a_mat[m]
        p = _project_simplex(p - (step_scale / np.sqrt(t)) * g, s)
        d = float(np.max(np.abs(a_mat @ p + b_vec)))
        if d < best_d:
            best_d, best_p = d, p.copy()
    return best_p, best_d


def _project_simplex(v: np.ndarray, total: float) -> np.ndarray:
    """Euclidean projection onto {x >= 0, sum x = total}."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - total
    rho = np.nonzero(u - css / np.arange(1, len(v) + 1) > 0.0)[0][-1]
    theta = css[rho] / (rho + 1.0)
    return np.maximum(v - theta, 0.0)


# ---------------------------------------------------------------------------
# dense two-phase simplex for the minimax LP


def _solve_minimax_lp(a_mat: np.ndarray, b_vec: np.ndarray, weight_sum: float):
    """min t s.t. -t <= A p + b <= t, p >= 0, sum p = weight_sum.

    Solved by an active-set outer loop: the LP is solved on a working subset
    of rows and rows violating the current optimum are pulled in until none
    remain.  A minimax optimum has few active rows, so the inner dense
    simplex stays small even for thousands of sampled constraints.
    Returns (p, t, total pivot count).
    """
    m = len(b_vec)
    working = np.unique(np.concatenate([
        np.argsort(np.abs(b_vec))[-16:],
        np.linspace(0, m - 1, min(m, 64)).astype(int),
    ]))
    pivots = 0
    for _ in range(200):
        p, t, piv = _minimax_lp_once(a_mat[working], b_vec[working], weight_sum)
        pivots += piv
        res = np.abs(a_mat @ p + b_vec)
        violated = np.nonzero(res > t + 1e-11)[0]
        if violated.size == 0:
            return p, t, pivots
        worst = violated[np.argsort(res[violated])[-32:]]
        working = np.unique(np.concatenate([working, worst]))
    raise LpError("active-set loop failed to close")


def _minimax_lp_once(a_mat: np.ndarray, b_vec: np.ndarray, weight_sum: float):
    """Two-phase dense simplex on the full row set given.

    Bland's rule prevents cycling on the (heavily degenerate) minimax
    constraints; artificial variables are introduced only for rows whose
    slack cannot serve as the initial basis.
    """
    m, k = a_mat.shape
    nvar = k + 1 + 2 * m  # p, t, slacks
    rows = 2 * m + 1
    tab = np.zeros((rows, nvar + 1))
    # A p - t + s = -b   and   -A p - t + s' = b
    tab[:m, :k] = a_mat
    tab[m:2 * m, :k] = -a_mat
    tab[:2 * m, k] = -1.0
    slack_col = np.concatenate([np.arange(k + 1, k + 1 + 2 * m), [-1]])
    tab[np.arange(2 * m), slack_col[:-1]] = 1.0
    tab[:m, -1] = -b_vec
    tab[m:2 * m, -1] = b_vec
    tab[2 * m, :k] = 1.0
    tab[2 * m, -1] = weight_sum

    neg = tab[:, -1] < 0.0
    tab[neg] *= -1.0

    # phase 1: slack columns still holding +1 serve as basis, the rest
    # (sign-flipped rows and the equality row) get artificials
    basis = np.empty(rows, dtype=int)
    needs_artificial = []
    for r in range(rows):
        sc = slack_col[r]
        if sc >= 0 and tab[r, sc] == 1.0:
            basis[r] = sc
        else:
            needs_artificial.append(r)
    n_art = len(needs_artificial)
    art_block = np.zeros((rows, n_art))
    for j, r in enumerate(needs_artificial):
        art_block[r, j] = 1.0
        basis[r] = nvar + j
    tab = np.hstack([tab[:, :nvar], art_block, tab[:, -1:]])
    cost1 = np.zeros(nvar + n_art)
    cost1[nvar:] = 1.0
    piv1 = _simplex_core(tab, basis, cost1)
    if cost1[basis] @ tab[:, -1] > 1e-7:
        raise LpError("phase-1 optimum is positive: LP infeasible")
    _expel_artificials(tab, basis, nvar)

    # phase 2 on the original variables only
    keep_rows = basis < nvar
    tab = tab[keep_rows][:, list(range(nvar)) + [-1]]
    basis = basis[keep_rows]
    cost2 = np.zeros(nvar)
    cost2[k] = 1.0
    piv2 = _simplex_core(tab, basis, cost2)

    x = np.zeros(nvar)
    x[basis] = tab[:, -1]
    return x[:k], float(x[k]), piv1 + piv2


def _simplex_core(tab: np.ndarray, basis: np.ndarray, cost: np.ndarray,
                  maxiter: int = 200_000) -> int:
    rows, cols = tab.shape
    n = cols - 1
    for it in range(maxiter):
        reduced = cost[:n] - cost[basis] @ tab[:, :n]
        candidates = np.nonzero(reduced < -1e-9)[0]
        if candidates.size == 0:
            return it
        j = int(candidates[0])  # Bland: smallest entering index
        col = tab[:, j]
        positive = col > 1e-9
        if not positive.any():
            raise LpError("unbounded LP")
        ratios = np.full(rows, np.inf)
        ratios[positive] = tab[positive, -1] / col[positive]
        rmin = ratios.min()
        ties = np.nonzero(ratios <= rmin + 1e-12)[0]
        r = int(ties[np.argmin(basis[ties])])  # Bland: smallest leaving variable
        pivot = tab[r, j]
        tab[r] /= pivot
        colv = tab[:, j].copy()
        colv[r] = 0.0
        tab -= np.outer(colv, tab[r])
        basis[r] = j
    raise LpError("simplex iteration limit exceeded")


def _expel_artificials(tab: np.ndarray, basis: np.ndarray, nvar: int) -> None:
    """Pivot zero-level artificial variables out of the basis where possible."""
    for r in range(len(basis)):
        if basis[r] < nvar:
            continue
        swap = np.nonzero(np.abs(tab[r, :nvar]) > 1e-9)[0]
        if swap.size == 0:
            continue  # redundant row, dropped by the caller
        j = int(swap[0])
        pivot = tab[r, j]
        tab[r] /= pivot
        colv = tab[:, j].copy()
        colv[r] = 0.0
        tab -= np.outer(colv, tab[r])
        basis[r] = j
