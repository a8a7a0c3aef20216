"""Two-block solvers: the alternating CG/prox method and its baselines.

All solvers minimize 0.5 ||X + Y - M||_F^2 + R_X(X) + R_Y(Y) from the zero
start, record an iteration trace, and are deterministic given the config
seed. Trace row t holds the objective of the iterate entering iteration t
(so row 1 is the value at the starting point) together with the combination
coefficient applied during that iteration.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionTooLarge, InfeasibleStart
from .matrices import FULL_SVD_MAX_DIM, as_matrix, singular_values
from .oracles import (
    ElasticNet,
    L1Ball,
    LpBall,
    NuclearBall,
    Regularizer,
    feasibility_residual,
    generalized_lmo,
    project_l1_ball,
    project_lp_ball,
    project_nuclear_ball,
    prox_step,
    regularizer_value,
)
from .schedules import HarmonicStep, StepSchedule

ALGORITHMS = ("alt_cgpg", "alt_pgcg", "cgcg", "cgcg_p", "fista")

RANK_THRESHOLD = 1e-8  # relative singular value cutoff used for rank reporting


@dataclass(frozen=True)
class ProblemSpec:
    """Observed matrix, the two regularizers, loss constants, and role assignment.

    The loss is fixed to g(Z) = 0.5 ||Z - M||_F^2 in this release, so alpha
    and beta must both equal 1. ``prox_block`` names the block receiving the
    proximal update; the other block receives the linear minimization step.
    """

    m_data: np.ndarray
    reg_x: Regularizer
    reg_y: Regularizer
    alpha: float = 1.0
    beta: float = 1.0
    prox_block: str = "x"

    def __post_init__(self):
        object.__setattr__(self, "m_data", as_matrix(self.m_data))
        if self.alpha != 1.0 or self.beta != 1.0:
            raise ValueError(
                "the shipped loss 0.5||Z - M||_F^2 has alpha = beta = 1; "
                "other values require a custom quadratic, which is not supported"
            )
        if self.prox_block not in ("x", "y"):
            raise ValueError(f"prox_block must be 'x' or 'y', got {self.prox_block!r}")


@dataclass(frozen=True)
class SolverConfig:
    algorithm: str
    max_iters: int
    schedule: StepSchedule | None = None
    line_search: bool = False
    f_target: float | None = None
    time_budget_s: float | None = None
    seed: int = 0
    record_every: int = 1
    svd_tol: float = 1e-9
    svd_max_iter: int = 300

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; pick one of {ALGORITHMS}")
        if self.max_iters < 1 or self.record_every < 1:
            raise ValueError("max_iters and record_every must be >= 1")


@dataclass(frozen=True)
class IterationRecord:
    t: int
    wall_time_s: float
    f_value: float
    eta_used: float
    feas_x: float
    feas_y: float
    rank_x: int


def objective(problem: ProblemSpec, x, y) -> float:
    """f(x, y) = 0.5 ||x + y - M||_F^2 + R_X(x) + R_Y(y); may be +inf."""
    x = as_matrix(x)
    y = as_matrix(y)
    resid = x + y - problem.m_data
    return (
        0.5 * float((resid * resid).sum())
        + regularizer_value(problem.reg_x, x)
        + regularizer_value(problem.reg_y, y)
    )


def _golden_section(fun, tol=1e-10):
    """Minimize a convex scalar function over [0, 1]."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    lo, hi = 0.0, 1.0
    c = hi - inv_phi * (hi - lo)
    d = lo + inv_phi * (hi - lo)
    fc, fd = fun(c), fun(d)
    while hi - lo > tol:
        if fc <= fd:
            hi, d, fd = d, c, fc
            c = hi - inv_phi * (hi - lo)
            fc = fun(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + inv_phi * (hi - lo)
            fd = fun(d)
    best = (lo + hi) / 2.0
    for cand in (0.0, 1.0):
        if fun(cand) < fun(best):
            best = cand
    return best


def line_search(problem: ProblemSpec, q, u) -> float:
    """Optimal convex combination coefficient along the segment from q to u.

    With indicator regularizers only the quadratic loss varies along the
    segment, so the minimizer is closed-form. With an elastic net block the
    full objective is minimized by golden-section search.
    """
    x, y = q
    v, w = u
    z = x + y
    uu = v + w
    d = z - uu
    d2 = float((d * d).sum())
    if d2 == 0.0:
        return 0.0
    en_x = isinstance(problem.reg_x, ElasticNet)
    en_y = isinstance(problem.reg_y, ElasticNet)
    if not en_x and not en_y:
        return min(1.0, max(0.0, float((d * (z - problem.m_data)).sum()) / d2))

    def along(c):
        resid = (1.0 - c) * z + c * uu - problem.m_data
        val = 0.5 * float((resid * resid).sum())
        if en_x:
            val += regularizer_value(problem.reg_x, (1.0 - c) * x + c * v)
        if en_y:
            val += regularizer_value(problem.reg_y, (1.0 - c) * y + c * w)
        return val

    return _golden_section(along)


def _reg_value_with_sv(reg, mat, sv):
    """regularizer_value, reusing precomputed singular values for nuclear balls."""
    if isinstance(reg, NuclearBall):
        from .oracles import FEASIBILITY_SLACK

        return 0.0 if sv.sum() <= reg.tau * (1.0 + FEASIBILITY_SLACK) else float("inf")
    return regularizer_value(reg, mat)


class _TraceRecorder:
    """Collects IterationRecords, reusing X's singular values across fields."""

    def __init__(self, problem: ProblemSpec, config: SolverConfig):
        self.problem = problem
        self.config = config
        self.records: list[IterationRecord] = []
        self.start = time.perf_counter()

    def due(self, t: int) -> bool:
        return (t - 1) % self.config.record_every == 0 or t == self.config.max_iters

    def full_objective(self, g_value: float, x, y):
        sv = singular_values(x)
        rx = _reg_value_with_sv(self.problem.reg_x, x, sv)
        ry = regularizer_value(self.problem.reg_y, y)
        return g_value + rx + ry, sv

    def record(self, t: int, g_value: float, eta_used: float, x, y):
        f_value, sv = self.full_objective(g_value, x, y)
        sigma1 = sv[0] if sv.size else 0.0
        rank_x = int((sv > RANK_THRESHOLD * sigma1).sum()) if sigma1 > 0 else 0
        if isinstance(self.problem.reg_x, NuclearBall):
            feas_x = max(0.0, (float(sv.sum()) - self.problem.reg_x.tau) / self.problem.reg_x.tau)
        else:
            feas_x = feasibility_residual(self.problem.reg_x, x)
        feas_y = feasibility_residual(self.problem.reg_y, y)
        self.records.append(
            IterationRecord(
                t=t,
                wall_time_s=time.perf_counter() - self.start,
                f_value=f_value,
                eta_used=eta_used,
                feas_x=feas_x,
                feas_y=feas_y,
                rank_x=rank_x,
            )
        )
        return f_value

    def over_time_budget(self) -> bool:
        budget = self.config.time_budget_s
        return budget is not None and time.perf_counter() - self.start > budget


def _check_start_feasible(problem: ProblemSpec, x, y):
    if not math.isfinite(regularizer_value(problem.reg_x, x)):
        raise InfeasibleStart("starting X lies outside the domain of R_X")
    if not math.isfinite(regularizer_value(problem.reg_y, y)):
        raise InfeasibleStart("starting Y lies outside the domain of R_Y")


def solve_alternating(problem: ProblemSpec, config: SolverConfig):
    """Alternating method: LMO on one block, prox on the other, convex combination.

    ``alt_cgpg`` sends the prox step to X and the LMO to Y; ``alt_pgcg``
    swaps the roles. The problem's declared prox_block must agree with the
    requested algorithm. When line search is enabled, the schedule still
    shapes the prox center while the combination coefficient is optimized.
    """
    if config.algorithm not in ("alt_cgpg", "alt_pgcg"):
        raise ValueError(f"solve_alternating cannot run {config.algorithm!r}")
    prox_on_x = config.algorithm == "alt_cgpg"
    if (problem.prox_block == "x") != prox_on_x:
        raise ValueError(
            f"algorithm {config.algorithm!r} needs prox_block "
            f"{'x' if prox_on_x else 'y'!r}, got {problem.prox_block!r}"
        )
    cg_reg = problem.reg_y if prox_on_x else problem.reg_x
    prox_reg = problem.reg_x if prox_on_x else problem.reg_y
    schedule = config.schedule if config.schedule is not None else HarmonicStep()
    rng = np.random.default_rng(config.seed)
    m = problem.m_data
    x = np.zeros_like(m)
    y = np.zeros_like(m)
    _check_start_feasible(problem, x, y)
    rec = _TraceRecorder(problem, config)
    for t in range(1, config.max_iters + 1):
        z = x + y
        grad = z - m
        g_value = 0.5 * float((grad * grad).sum())
        eta = schedule.eta(t)
        cg_out = generalized_lmo(cg_reg, grad, seed=rng, tol=config.svd_tol,
                                 max_iter=config.svd_max_iter)
        prox_out = prox_step(prox_reg, z, cg_out, grad, eta, problem.beta, seed=rng)
        x_dir, y_dir = (prox_out, cg_out) if prox_on_x else (cg_out, prox_out)
        coeff = line_search(problem, (x, y), (x_dir, y_dir)) if config.line_search else eta
        stop = False
        if rec.due(t):
            f_value = rec.record(t, g_value, coeff, x, y)
            stop = config.f_target is not None and f_value <= config.f_target
        elif config.f_target is not None:
            f_value, _ = rec.full_objective(g_value, x, y)
            stop = f_value <= config.f_target
        if stop or rec.over_time_budget():
            break
        x = (1.0 - coeff) * x + coeff * x_dir
        y = (1.0 - coeff) * y + coeff * y_dir
    return x, y, rec.records


def _require_indicators(problem: ProblemSpec, who: str):
    for name, reg in (("R_X", problem.reg_x), ("R_Y", problem.reg_y)):
        if isinstance(reg, ElasticNet):
            raise ValueError(f"{who} requires indicator regularizers, {name} is an elastic net")


def solve_cgcg(problem: ProblemSpec, config: SolverConfig):
    """Standard conditional gradient on both blocks with a joint combination."""
    if config.algorithm != "cgcg":
        raise ValueError(f"solve_cgcg cannot run {config.algorithm!r}")
    _require_indicators(problem, "cgcg")
    schedule = config.schedule if config.schedule is not None else HarmonicStep()
    rng = np.random.default_rng(config.seed)
    m = problem.m_data
    x = np.zeros_like(m)
    y = np.zeros_like(m)
    rec = _TraceRecorder(problem, config)
    for t in range(1, config.max_iters + 1):
        z = x + y
        grad = z - m
        g_value = 0.5 * float((grad * grad).sum())
        v = generalized_lmo(problem.reg_x, grad, seed=rng, tol=config.svd_tol,
                            max_iter=config.svd_max_iter)
        w = generalized_lmo(problem.reg_y, grad, seed=rng, tol=config.svd_tol,
                            max_iter=config.svd_max_iter)
        coeff = line_search(problem, (x, y), (v, w)) if config.line_search else schedule.eta(t)
        stop = False
        if rec.due(t):
            f_value = rec.record(t, g_value, coeff, x, y)
            stop = config.f_target is not None and f_value <= config.f_target
        elif config.f_target is not None:
            f_value, _ = rec.full_objective(g_value, x, y)
            stop = f_value <= config.f_target
        if stop or rec.over_time_budget():
            break
        x = (1.0 - coeff) * x + coeff * v
        y = (1.0 - coeff) * y + coeff * w
    return x, y, rec.records


def _project_ball(reg: Regularizer, mat):
    if isinstance(reg, L1Ball):
        return project_l1_ball(mat.ravel(), reg.s).reshape(mat.shape)
    if isinstance(reg, LpBall):
        return project_lp_ball(mat.ravel(), reg.p, reg.s).reshape(mat.shape)
    if isinstance(reg, NuclearBall):
        return project_nuclear_ball(mat, reg.tau)
    raise ValueError(f"no Euclidean projection for {type(reg).__name__}")


def solve_cgcg_p(problem: ProblemSpec, config: SolverConfig):
    """CG on both blocks followed by a projected-gradient touch-up of Y."""
    if config.algorithm != "cgcg_p":
        raise ValueError(f"solve_cgcg_p cannot run {config.algorithm!r}")
    _require_indicators(problem, "cgcg_p")
    if not isinstance(problem.reg_y, (L1Ball, LpBall)):
        raise ValueError("cgcg_p requires R_Y to be an l1 or lp ball")
    schedule = config.schedule if config.schedule is not None else HarmonicStep()
    rng = np.random.default_rng(config.seed)
    m = problem.m_data
    x = np.zeros_like(m)
    y = np.zeros_like(m)
    rec = _TraceRecorder(problem, config)
    for t in range(1, config.max_iters + 1):
        z = x + y
        grad = z - m
        g_value = 0.5 * float((grad * grad).sum())
        v = generalized_lmo(problem.reg_x, grad, seed=rng, tol=config.svd_tol,
                            max_iter=config.svd_max_iter)
        w = generalized_lmo(problem.reg_y, grad, seed=rng, tol=config.svd_tol,
                            max_iter=config.svd_max_iter)
        coeff = line_search(problem, (x, y), (v, w)) if config.line_search else schedule.eta(t)
        stop = False
        if rec.due(t):
            f_value = rec.record(t, g_value, coeff, x, y)
            stop = config.f_target is not None and f_value <= config.f_target
        elif config.f_target is not None:
            f_value, _ = rec.full_objective(g_value, x, y)
            stop = f_value <= config.f_target
        if stop or rec.over_time_budget():
            break
        x = (1.0 - coeff) * x + coeff * v
        y = (1.0 - coeff) * y + coeff * w
        grad_post = x + y - m
        y = _project_ball(problem.reg_y, y - grad_post / problem.beta)
    return x, y, rec.records


def solve_fista(problem: ProblemSpec, config: SolverConfig):
    """Accelerated projected gradient on the product of the two balls.

    The joint smoothness constant of the loss over (X, Y) is 2 beta, and the
    momentum follows the classical t_{k+1} = (1 + sqrt(1 + 4 t_k^2)) / 2 rule.
    """
    if config.algorithm != "fista":
        raise ValueError(f"solve_fista cannot run {config.algorithm!r}")
    _require_indicators(problem, "fista")
    m = problem.m_data
    if min(m.shape) > FULL_SVD_MAX_DIM:
        raise DimensionTooLarge(
            f"fista performs full SVDs; min(m, n) must be <= {FULL_SVD_MAX_DIM}"
        )
    lips = 2.0 * problem.beta
    x = np.zeros_like(m)
    y = np.zeros_like(m)
    px, py = x, y
    tk = 1.0
    rec = _TraceRecorder(problem, config)
    for t in range(1, config.max_iters + 1):
        resid = x + y - m
        g_value = 0.5 * float((resid * resid).sum())
        stop = False
        if rec.due(t):
            f_value = rec.record(t, g_value, 1.0 / lips, x, y)
            stop = config.f_target is not None and f_value <= config.f_target
        elif config.f_target is not None:
            f_value, _ = rec.full_objective(g_value, x, y)
            stop = f_value <= config.f_target
        if stop or rec.over_time_budget():
            break
        grad = px + py - m
        xn = _project_ball(problem.reg_x, px - grad / lips)
        yn = _project_ball(problem.reg_y, py - grad / lips)
        tn = (1.0 + math.sqrt(1.0 + 4.0 * tk * tk)) / 2.0
        px = xn + ((tk - 1.0) / tn) * (xn - x)
        py = yn + ((tk - 1.0) / tn) * (yn - y)
        x, y, tk = xn, yn, tn
    return x, y, rec.records


def solve(problem: ProblemSpec, config: SolverConfig):
    """Dispatch to the solver matching config.algorithm."""
    if config.algorithm in ("alt_cgpg", "alt_pgcg"):
        return solve_alternating(problem, config)
    if config.algorithm == "cgcg":
        return solve_cgcg(problem, config)
    if config.algorithm == "cgcg_p":
        return solve_cgcg_p(problem, config)
    return solve_fista(problem, config)
