"""Optimizers for the compilation cost: L-BFGS and Nelder-Mead.

Both are written against a plain callable interface so they can be
exercised on textbook functions, but they assume a 2*pi-periodic
objective when they wrap parameters: L-BFGS wraps the iterate into
[-pi, pi] after every accepted step (the cost is exactly periodic, so
this never changes the objective value), and returned parameters are
always canonically wrapped.

L-BFGS uses the standard two-loop recursion over a bounded history of
curvature pairs with an Armijo backtracking line search.  Nelder-Mead is
the classic simplex method with reflection/expansion/contraction/shrink
coefficients 1, 2, 0.5, 0.5.  Every iteration of either method appends a
trace record (cost, gradient norm or simplex spread, wall time), which
downstream tooling writes out as training curves.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .hamiltonian import wrap_angles
from .seeding import derive_rng

ARMIJO_C1 = 1e-4
MAX_HALVINGS = 60
CURVATURE_EPS = 1e-12

DEFAULT_MAX_ITERS = {"lbfgs": 200, "nelder-mead": 2000}


@dataclass(frozen=True)
class InitScheme:
    """Gaussian initial parameters, clipped to a box.

    Draws theta_j ~ Normal(mean, sigma) and clips each coordinate into
    the `clip` interval, so every draw lies in [-1, 1] by default.
    """

    sigma: float = 0.5
    mean: float = 0.0
    clip: tuple[float, float] = (-1.0, 1.0)
    seed: int = 0

    def sample(self, rng: np.random.Generator, q: int) -> np.ndarray:
        lo, hi = self.clip
        return np.clip(rng.normal(self.mean, self.sigma, q), lo, hi)


@dataclass
class OptimizerConfig:
    """Knobs shared by both optimizers; max_iters=None picks the per-algorithm
    default (200 for lbfgs, 2000 for nelder-mead)."""

    algorithm: str = "lbfgs"
    max_iters: int | None = None
    cost_tolerance: float = 1e-4
    gradient_tolerance: float = 1e-8
    history_size: int = 10
    simplex_step: float = 0.1
    spread_tolerance: float = 1e-8
    restarts: int = 10

    def __post_init__(self):
        if self.algorithm not in DEFAULT_MAX_ITERS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")

    @property
    def resolved_max_iters(self) -> int:
        if self.max_iters is not None:
            return int(self.max_iters)
        return DEFAULT_MAX_ITERS[self.algorithm]


@dataclass
class OptimizationTrace:
    """Per-iteration history of one optimizer run.

    `metric` holds the gradient infinity norm (lbfgs) or the simplex cost
    spread (nelder-mead).  Row 0 describes the initial point or simplex.
    """

    restart_index: int
    algorithm: str
    costs: np.ndarray
    metric: np.ndarray
    elapsed_ms: np.ndarray
    theta_history: np.ndarray
    final_theta: np.ndarray
    final_cost: float
    converged: bool
    stop_reason: str
    n_evals: int

    @property
    def iterations(self) -> int:
        """Number of optimizer iterations performed (row 0 is the start)."""
        return len(self.costs) - 1


class _Recorder:
    def __init__(self):
        self.t0 = time.perf_counter()
        self.costs = []
        self.metric = []
        self.elapsed = []
        self.thetas = []

    def add(self, cost, metric, theta):
        self.costs.append(float(cost))
        self.metric.append(float(metric))
        self.elapsed.append((time.perf_counter() - self.t0) * 1e3)
        self.thetas.append(np.array(theta, dtype=float))

    def finish(self, restart_index, algorithm, final_theta, final_cost,
               converged, stop_reason, n_evals) -> OptimizationTrace:
        return OptimizationTrace(
            restart_index=restart_index,
            algorithm=algorithm,
            costs=np.array(self.costs),
            metric=np.array(self.metric),
            elapsed_ms=np.array(self.elapsed),
            theta_history=np.array(self.thetas),
            final_theta=np.asarray(final_theta, dtype=float),
            final_cost=float(final_cost),
            converged=converged,
            stop_reason=stop_reason,
            n_evals=n_evals,
        )


def lbfgs_minimize(fun, grad, x0: np.ndarray, cfg: OptimizerConfig,
                   restart_index: int = 0) -> OptimizationTrace:
    """Two-loop-recursion L-BFGS with Armijo backtracking.

    Stops when the cost falls to cfg.cost_tolerance, the gradient infinity
    norm falls to cfg.gradient_tolerance, or max_iters is reached.  A failed
    line search ends the run without raising.  converged is True only when
    the cost goal was met; a gradient-tolerance stop above it is a stall at
    a stationary point (a trapped restart), not a success.
    """
    rec = _Recorder()
    x = wrap_angles(np.asarray(x0, dtype=float))
    f = float(fun(x))
    g = np.asarray(grad(x), dtype=float)
    n_evals = 1
    s_hist: list[np.ndarray] = []
    y_hist: list[np.ndarray] = []
    rho_hist: list[float] = []
    rec.add(f, np.max(np.abs(g)), x)

    def done(reason, conv):
        return rec.finish(restart_index, "lbfgs", x, f, conv, reason, n_evals)

    if f <= cfg.cost_tolerance:
        return done("cost-tolerance", True)
    if np.max(np.abs(g)) <= cfg.gradient_tolerance:
        return done("gradient-tolerance", False)

    for _ in range(cfg.resolved_max_iters):
        # two-loop recursion for d = -H g
        d = -g.copy()
        alphas = []
        for s, y, r in zip(reversed(s_hist), reversed(y_hist), reversed(rho_hist)):
            a = r * np.dot(s, d)
            alphas.append(a)
            d -= a * y
        if s_hist:
            gamma = np.dot(s_hist[-1], y_hist[-1]) / np.dot(y_hist[-1], y_hist[-1])
            d *= gamma
        for (s, y, r), a in zip(zip(s_hist, y_hist, rho_hist), reversed(alphas)):
            b = r * np.dot(y, d)
            d += (a - b) * s
        slope = np.dot(g, d)
        if slope >= 0.0:
            # not a descent direction; drop history and fall back to steepest descent
            s_hist, y_hist, rho_hist = [], [], []
            d = -g
            slope = np.dot(g, d)
        # Armijo backtracking
        alpha = 1.0
        f_new = None
        for _ in range(MAX_HALVINGS):
            cand = x + alpha * d
            f_try = float(fun(cand))
            n_evals += 1
            if f_try <= f + ARMIJO_C1 * alpha * slope:
                f_new = f_try
                break
            alpha *= 0.5
        if f_new is None:
            return done("line-search-failure", False)
        x_new = wrap_angles(x + alpha * d)
        g_new = np.asarray(grad(x_new), dtype=float)
        s = x_new - x
        y = g_new - g
        sy = np.dot(s, y)
        if sy > CURVATURE_EPS:
            s_hist.append(s)
            y_hist.append(y)
            rho_hist.append(1.0 / sy)
            if len(s_hist) > cfg.history_size:
                s_hist.pop(0)
                y_hist.pop(0)
                rho_hist.pop(0)
        x, f, g = x_new, f_new, g_new
        gnorm = np.max(np.abs(g))
        rec.add(f, gnorm, x)
        if f <= cfg.cost_tolerance:
            return done("cost-tolerance", True)
        if gnorm <= cfg.gradient_tolerance:
            return done("gradient-tolerance", False)
    return done("max-iterations", False)


def nelder_mead_minimize(fun, x0: np.ndarray, cfg: OptimizerConfig,
                         restart_index: int = 0) -> OptimizationTrace:
    """Classic simplex search; derivative-free, usable on noisy costs.

    The initial simplex is x0 plus cfg.simplex_step along each coordinate.
    Terminates when the best vertex reaches cfg.cost_tolerance, when the
    simplex cost spread drops below cfg.spread_tolerance, or after
    max_iters iterations.  The best vertex is returned (wrapped); its cost
    never increases between iterations.  As with L-BFGS, converged is True
    only when the cost goal was met; a collapsed simplex above it counts
    as a stall.
    """
    x0 = np.asarray(x0, dtype=float)
    q = x0.size
    verts = [x0.copy()]
    for j in range(q):
        v = x0.copy()
        v[j] += cfg.simplex_step
        verts.append(v)
    fvals = [float(fun(v)) for v in verts]
    n_evals = q + 1
    rec = _Recorder()

    def order():
        idx = np.argsort(fvals, kind="stable")
        return [verts[i] for i in idx], [fvals[i] for i in idx]

    verts, fvals = order()
    rec.add(fvals[0], fvals[-1] - fvals[0], verts[0])
    reason, conv = "max-iterations", False
    for _ in range(cfg.resolved_max_iters):
        if fvals[0] <= cfg.cost_tolerance:
            reason, conv = "cost-tolerance", True
            break
        if fvals[-1] - fvals[0] < cfg.spread_tolerance:
            reason, conv = "spread-tolerance", False
            break
        centroid = np.mean(verts[:-1], axis=0)
        worst = verts[-1]
        xr = centroid + (centroid - worst)
        fr = float(fun(xr))
        n_evals += 1
        if fr < fvals[0]:
            xe = centroid + 2.0 * (xr - centroid)
            fe = float(fun(xe))
            n_evals += 1
            if fe < fr:
                verts[-1], fvals[-1] = xe, fe
            else:
                verts[-1], fvals[-1] = xr, fr
        elif fr < fvals[-2]:
            verts[-1], fvals[-1] = xr, fr
        else:
            if fr < fvals[-1]:
                xc = centroid + 0.5 * (xr - centroid)
            else:
                xc = centroid + 0.5 * (worst - centroid)
            fc = float(fun(xc))
            n_evals += 1
            if fc < min(fr, fvals[-1]):
                verts[-1], fvals[-1] = xc, fc
            else:
                best = verts[0]
                for i in range(1, q + 1):
                    verts[i] = best + 0.5 * (verts[i] - best)
                    fvals[i] = float(fun(verts[i]))
                n_evals += q
        verts, fvals = order()
        rec.add(fvals[0], fvals[-1] - fvals[0], verts[0])
    return rec.finish(restart_index, "nelder-mead", wrap_angles(verts[0]),
                      fvals[0], conv, reason, n_evals)


@dataclass
class RestartSummary:
    """Aggregate of a multi-restart optimization."""

    traces: list[OptimizationTrace]
    best_index: int
    seeds: list[list[int]]

    @property
    def best(self) -> OptimizationTrace:
        return self.traces[self.best_index]

    @property
    def final_costs(self) -> np.ndarray:
        return np.array([t.final_cost for t in self.traces])

    def stats(self) -> dict:
        """Mean/std of final cost over all restarts and over converged ones."""
        costs = self.final_costs
        conv = np.array([t.converged for t in self.traces], dtype=bool)
        out = {
            "mean_final_cost": float(costs.mean()),
            "std_final_cost": float(costs.std()),
            "n_restarts": len(self.traces),
            "n_converged": int(conv.sum()),
        }
        if conv.any():
            out["mean_final_cost_converged"] = float(costs[conv].mean())
            out["std_final_cost_converged"] = float(costs[conv].std())
        disp = 0.0
        finals = [t.final_theta for t, c in zip(self.traces, conv) if c]
        for i in range(len(finals)):
            for j in range(i + 1, len(finals)):
                disp = max(disp, float(np.max(np.abs(finals[i] - finals[j]))))
        out["parameter_dispersion_converged"] = disp
        return out


def run_single_restart(evaluator, init: InitScheme, cfg: OptimizerConfig,
                       index: int) -> OptimizationTrace:
    """One restart with its counter-derived seed; used serially or from a pool."""
    rng = derive_rng(init.seed, index)
    theta0 = init.sample(rng, evaluator.circuit.q)
    if cfg.algorithm == "lbfgs":
        return lbfgs_minimize(evaluator.cost, evaluator.gradient, theta0, cfg,
                              restart_index=index)
    return nelder_mead_minimize(evaluator.cost, theta0, cfg, restart_index=index)


def multi_restart(evaluator, init: InitScheme, cfg: OptimizerConfig,
                  workers: int = 1) -> RestartSummary:
    """Run cfg.restarts independent optimizations and keep them all.

    Per-restart seeds derive from (init.seed, restart index), so results do
    not depend on scheduling; restarts may run on a thread pool.
    """
    indices = list(range(cfg.restarts))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            traces = list(pool.map(
                lambda i: run_single_restart(evaluator, init, cfg, i), indices))
    else:
        traces = [run_single_restart(evaluator, init, cfg, i) for i in indices]
    best_index = int(np.argmin([t.final_cost for t in traces]))
    return RestartSummary(traces=traces, best_index=best_index,
                          seeds=[[init.seed, i] for i in indices])
