"""Step-size schedules, rate constants, and recursion certifiers.

Each schedule encodes one of the convergence regimes of the alternating
method: the two-phase rule for a generic convex CG block, the decaying rule
for a strongly convex CG ball, and the fixed steps that yield linear rates.
The recursion simulators replay the scalar inequalities behind those rates
at equality and report the worst margin against the closed-form bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import InfeasibleStart, InvalidConstants
from .matrices import as_matrix
from .oracles import generalized_lmo, regularizer_value


@dataclass(frozen=True)
class MinDiamTwoPhase:
    """Constant alpha/(2 beta) for t <= t0, then 2 / (t - t0 + 4 beta/alpha)."""

    alpha: float
    beta: float
    t0: int

    def __post_init__(self):
        if self.alpha <= 0 or self.beta <= 0 or self.t0 < 0:
            raise InvalidConstants("alpha, beta must be positive and t0 >= 0")
        if self.alpha / (2.0 * self.beta) > 1.0:
            raise InvalidConstants("alpha / (2 beta) must lie in (0, 1]")

    def eta(self, t: int) -> float:
        if t <= self.t0:
            return self.alpha / (2.0 * self.beta)
        return min(1.0, 2.0 / (t - self.t0 + 4.0 * self.beta / self.alpha))


@dataclass(frozen=True)
class StrongSetDecaying:
    """eta_t = 1 / (t - 1 + 6 beta/alpha) for a strongly convex CG ball."""

    alpha: float
    beta: float

    def __post_init__(self):
        if self.alpha <= 0 or self.beta <= 0:
            raise InvalidConstants("alpha, beta must be positive")

    def eta(self, t: int) -> float:
        return min(1.0, 1.0 / (t - 1.0 + 6.0 * self.beta / self.alpha))


@dataclass(frozen=True)
class FixedStep:
    """Constant step in (0, 1]."""

    value: float

    def __post_init__(self):
        if not 0.0 < self.value <= 1.0:
            raise InvalidConstants(f"fixed step must lie in (0, 1], got {self.value}")

    def eta(self, t: int) -> float:
        return self.value


@dataclass(frozen=True)
class HarmonicStep:
    """The practical default eta_t = 2 / (t + 1)."""

    def eta(self, t: int) -> float:
        return min(1.0, 2.0 / (t + 1.0))


StepSchedule = MinDiamTwoPhase | StrongSetDecaying | FixedStep | HarmonicStep


def make_min_diam_schedule(alpha: float, beta: float, c: float, d_y: float) -> MinDiamTwoPhase:
    """Two-phase schedule of the min-diameter 1/t rate.

    ``c`` must upper-bound the initial optimality gap and ``d_y`` is the
    Euclidean diameter of the CG block's feasible set.
    """
    if min(alpha, beta, c, d_y) <= 0:
        raise InvalidConstants("alpha, beta, c, d_y must all be positive")
    if alpha > beta:
        raise InvalidConstants(f"alpha <= beta required, got alpha={alpha}, beta={beta}")
    t0 = max(0, math.ceil(2.0 * beta / alpha * math.log(2.0 * c / (alpha * d_y**2))))
    return MinDiamTwoPhase(alpha, beta, t0)


def make_strong_set_schedule(alpha: float, beta: float) -> StrongSetDecaying:
    if min(alpha, beta) <= 0:
        raise InvalidConstants("alpha, beta must be positive")
    if alpha > beta:
        raise InvalidConstants(f"alpha <= beta required, got alpha={alpha}, beta={beta}")
    return StrongSetDecaying(alpha, beta)


def fixed_step_strong_set(alpha: float, beta: float, gamma: float, g_lower: float) -> FixedStep:
    """Fixed step min{alpha/(2 beta), gamma * G / (8 beta)} for the linear strong-set rate."""
    if min(alpha, beta, gamma, g_lower) <= 0:
        raise InvalidConstants("alpha, beta, gamma, G must all be positive")
    return FixedStep(min(1.0, alpha / (2.0 * beta), gamma * g_lower / (8.0 * beta)))


def fixed_step_strong_reg(alpha: float, delta: float, beta: float) -> FixedStep:
    """Fixed step min{alpha, delta} / (2 beta) for the strongly convex regularizer rate."""
    if min(alpha, delta, beta) <= 0:
        raise InvalidConstants("alpha, delta, beta must all be positive")
    return FixedStep(min(1.0, min(alpha, delta) / (2.0 * beta)))


def composed_strong_convexity(alpha: float, delta: float) -> float:
    """Strong convexity constant of the two-block objective when one block
    carries a delta-strongly-convex penalty on top of an alpha-strongly-convex
    loss: (delta + 2 alpha - sqrt(delta^2 + 4 alpha^2)) / 2."""
    if alpha <= 0 or delta <= 0:
        raise InvalidConstants("alpha, delta must be positive")
    return (delta + 2.0 * alpha - math.sqrt(delta**2 + 4.0 * alpha**2)) / 2.0


def lp_ball_strong_convexity(p: float, s: float, n_entries: int) -> float:
    """Euclidean set-strong-convexity constant of an lp ball of radius s in R^N.

    The lp-norm constant (p - 1) / s converts to the Euclidean norm through
    the equivalence factor N^(1/2 - 1/p) for p in (1, 2].
    """
    if not 1.0 < p <= 2.0:
        raise InvalidConstants(f"p must lie in (1, 2], got {p}")
    if s <= 0 or n_entries < 1:
        raise InvalidConstants("s must be positive and n_entries >= 1")
    return (p - 1.0) / s * float(n_entries) ** (0.5 - 1.0 / p)


def gap_bound_C(problem, x1, y1, seed=0) -> float:
    """Computable upper bound on the initial gap f(x1, y1) - f*.

    Evaluates both generalized LMOs at the starting gradient and combines
    them with the starting regularizer values; no knowledge of the optimum
    is required. Raises InfeasibleStart when an indicator regularizer is
    infinite at the start.
    """
    x1 = as_matrix(x1)
    y1 = as_matrix(y1)
    rx1 = regularizer_value(problem.reg_x, x1)
    ry1 = regularizer_value(problem.reg_y, y1)
    if not (math.isfinite(rx1) and math.isfinite(ry1)):
        raise InfeasibleStart("starting point lies outside a regularizer's domain")
    grad = (x1 + y1) - problem.m_data
    w1 = generalized_lmo(problem.reg_y, grad, seed=seed)
    v1 = generalized_lmo(problem.reg_x, grad, seed=seed)
    value = (
        float(((x1 + y1 - w1 - v1) * grad).sum())
        + ry1 + rx1
        - regularizer_value(problem.reg_y, w1)
        - regularizer_value(problem.reg_x, v1)
    )
    return max(0.0, value)


@dataclass
class RecursionReport:
    """Worst-case replay of a rate recursion against its closed-form bound."""

    horizon: int
    max_violation: float
    bound_values: list[float] = field(repr=False)
    sequence_values: list[float] = field(repr=False)


def simulate_recursion(lemma: str, constants: dict, horizon: int) -> RecursionReport:
    """Iterate a rate recursion at equality and compare with its bound.

    ``lemma`` selects the recursion:

    - ``"min_diam"``: h_{t+1} = (1 - eta_t) h_t + eta_t^2 beta d_y^2 with the
      two-phase schedule; constants {alpha, beta, d_y, c, h1} with c >= h1.
      Bound 4 beta d_y^2 / (t - t0 - 1 + 4 beta/alpha) past the first phase;
      during the constant phase the geometric envelope
      (1 - alpha/(2 beta))^(t-1) c + alpha d_y^2 / 2 applies.
    - ``"strong_set"``: h_{t+1} = (1 - eta_t) h_t with
      eta_t = 3 / (t - 1 + 3 / c2); constants {c1, c2, h1} with 0 < c2 <= 1.
      Bound 9 max{c1^-2, c2^-2 h1} / (t - 1 + 3 / c2)^2.

    max_violation <= 0 certifies the bound numerically over the horizon.
    """
    if horizon < 1:
        raise InvalidConstants(f"horizon must be >= 1, got {horizon}")
    if lemma == "min_diam":
        alpha, beta = constants["alpha"], constants["beta"]
        d_y, c, h1 = constants["d_y"], constants["c"], constants["h1"]
        if min(alpha, beta, d_y, c, h1) <= 0 or alpha > beta:
            raise InvalidConstants("need 0 < alpha <= beta and positive d_y, c, h1")
        if c < h1:
            raise InvalidConstants(f"c >= h1 required, got c={c}, h1={h1}")
        sched = make_min_diam_schedule(alpha, beta, c, d_y)
        t0 = sched.t0
        eta0 = alpha / (2.0 * beta)
        h = h1
        seq, bounds = [], []
        for t in range(1, horizon + 1):
            seq.append(h)
            if t <= t0:
                bounds.append((1.0 - eta0) ** (t - 1) * c + alpha * d_y**2 / 2.0)
            else:
                bounds.append(4.0 * beta * d_y**2 / (t - t0 - 1.0 + 4.0 * beta / alpha))
            eta = sched.eta(t)
            h = (1.0 - eta) * h + eta**2 * beta * d_y**2
    elif lemma == "strong_set":
        c1, c2, h1 = constants["c1"], constants["c2"], constants["h1"]
        if c1 <= 0 or not 0.0 < c2 <= 1.0 or h1 <= 0:
            raise InvalidConstants("need c1 > 0, 0 < c2 <= 1, and h1 > 0")
        amp = 9.0 * max(c1**-2, h1 / c2**2)
        h = h1
        seq, bounds = [], []
        for t in range(1, horizon + 1):
            seq.append(h)
            denom = t - 1.0 + 3.0 / c2
            bounds.append(amp / denom**2)
            h = (1.0 - 3.0 / denom) * h
    else:
        raise InvalidConstants(f"unknown lemma {lemma!r}")
    diffs = np.array(seq) - np.array(bounds)
    return RecursionReport(horizon, float(diffs.max()), bounds, seq)
