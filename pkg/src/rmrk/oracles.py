"""Linear minimization and proximal oracles for the supported regularizers.

Four regularizer families are shipped: the nuclear-norm ball (optionally
rank-capped), the entrywise l1 ball, the lp ball for p in (1, 2], and the
elastic net penalty. Every oracle is a pure function; randomized SVD seeds
are explicit arguments so parallel callers stay deterministic.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidConstants
from .matrices import as_matrix, full_svd, singular_values, top_singular_pair, truncated_svd

log = logging.getLogger(__name__)

# Relative slack applied when deciding ball membership; absorbs the float
# drift accumulated by repeated convex combinations.
FEASIBILITY_SLACK = 1e-9


@dataclass(frozen=True)
class NuclearBall:
    """Indicator of {X : ||X||_nuc <= tau}, optionally restricted to rank <= rank_cap."""

    tau: float
    rank_cap: int | None = None

    def __post_init__(self):
        if self.tau <= 0:
            raise InvalidConstants(f"nuclear ball radius must be positive, got {self.tau}")
        if self.rank_cap is not None and self.rank_cap < 1:
            raise InvalidConstants(f"rank_cap must be >= 1, got {self.rank_cap}")


@dataclass(frozen=True)
class L1Ball:
    """Indicator of {X : ||X||_1 <= s} (entrywise l1 norm)."""

    s: float

    def __post_init__(self):
        if self.s <= 0:
            raise InvalidConstants(f"l1 ball radius must be positive, got {self.s}")


@dataclass(frozen=True)
class LpBall:
    """Indicator of {X : ||X||_p <= s} for p in (1, 2], entrywise lp norm."""

    p: float
    s: float

    def __post_init__(self):
        if not 1.0 < self.p <= 2.0:
            raise InvalidConstants(f"lp ball requires p in (1, 2], got {self.p}")
        if self.s <= 0:
            raise InvalidConstants(f"lp ball radius must be positive, got {self.s}")


@dataclass(frozen=True)
class ElasticNet:
    """Penalty lambda1 * ||Y||_1 + lambda2 * ||Y||_F^2."""

    lambda1: float
    lambda2: float

    def __post_init__(self):
        if self.lambda1 <= 0 or self.lambda2 <= 0:
            raise InvalidConstants("elastic net weights must be positive")


Regularizer = NuclearBall | L1Ball | LpBall | ElasticNet


def soft_threshold(x, threshold):
    return np.sign(x) * np.maximum(np.abs(x) - threshold, 0.0)


def lp_norm(x, p: float) -> float:
    """Entrywise lp norm, computed max-normalized to avoid overflow for p near 1."""
    a = np.abs(np.asarray(x, dtype=np.float64))
    peak = a.max(initial=0.0)
    if peak == 0.0:
        return 0.0
    return float(peak * ((a / peak) ** p).sum() ** (1.0 / p))


def regularizer_norm(reg: Regularizer, x) -> float:
    """The norm each ball regularizer constrains (elastic net has none)."""
    if isinstance(reg, NuclearBall):
        return float(singular_values(x).sum())
    if isinstance(reg, L1Ball):
        return float(np.abs(x).sum())
    if isinstance(reg, LpBall):
        return float(lp_norm(x, reg.p))
    raise TypeError(f"{type(reg).__name__} is not a ball regularizer")


def regularizer_value(reg: Regularizer, x) -> float:
    """Evaluate R(x): 0/+inf for indicators (with relative slack), penalty value else."""
    x = as_matrix(x)
    if isinstance(reg, ElasticNet):
        return float(reg.lambda1 * np.abs(x).sum() + reg.lambda2 * (x * x).sum())
    radius = reg.tau if isinstance(reg, NuclearBall) else reg.s
    if regularizer_norm(reg, x) <= radius * (1.0 + FEASIBILITY_SLACK):
        return 0.0
    return float("inf")


def feasibility_residual(reg: Regularizer, x) -> float:
    """Relative constraint violation max(0, (||x|| - radius) / radius); 0 for elastic net."""
    if isinstance(reg, ElasticNet):
        return 0.0
    radius = reg.tau if isinstance(reg, NuclearBall) else reg.s
    return max(0.0, (regularizer_norm(reg, x) - radius) / radius)


def elastic_net_min(lambda1: float, lambda2: float, grad) -> np.ndarray:
    """argmin_W lambda1 ||W||_1 + lambda2 ||W||_F^2 + <W, grad>, entrywise soft threshold."""
    if lambda1 <= 0 or lambda2 <= 0:
        raise InvalidConstants("elastic net weights must be positive")
    grad = as_matrix(grad)
    return soft_threshold(-grad / (2.0 * lambda2), lambda1 / (2.0 * lambda2))


def generalized_lmo(reg: Regularizer, grad, seed=0, tol: float = 1e-9, max_iter: int = 300) -> np.ndarray:
    """Minimize R(W) + <W, grad> over all W (Frobenius inner product).

    For indicator regularizers this is the classical ball LMO; the zero
    gradient makes the direction undefined, in which case the zero matrix
    (a feasible minimizer) is returned and the event is logged.
    """
    grad = as_matrix(grad)
    if isinstance(reg, ElasticNet):
        return elastic_net_min(reg.lambda1, reg.lambda2, grad)
    if not np.any(grad):
        log.warning("generalized_lmo: zero gradient, returning the zero matrix")
        return np.zeros_like(grad)
    if isinstance(reg, L1Ball):
        flat = np.abs(grad).ravel()
        idx = int(np.argmax(flat))
        out = np.zeros_like(grad)
        out.flat[idx] = -reg.s * np.sign(grad.flat[idx])
        return out
    if isinstance(reg, LpBall):
        # extremizer of Holder's inequality: |w_i| proportional to |g_i|^(q-1)
        q = reg.p / (reg.p - 1.0)
        a = np.abs(grad)
        peak = a.max()
        scaled = a / peak
        norm_q = peak * ((scaled**q).sum()) ** (1.0 / q)
        w = (a / norm_q) ** (q - 1.0)
        return -reg.s * np.sign(grad) * w
    if isinstance(reg, NuclearBall):
        u, _, v = top_singular_pair(grad, tol=tol, max_iter=max_iter, seed=seed)
        return -reg.tau * np.outer(u, v)
    raise TypeError(f"unsupported regularizer {type(reg).__name__}")


def project_l1_ball(v, s: float) -> np.ndarray:
    """Euclidean projection of a vector onto {x : ||x||_1 <= s} (sort-based, O(d log d))."""
    if s <= 0:
        raise InvalidConstants(f"l1 ball radius must be positive, got {s}")
    v = np.asarray(v, dtype=np.float64)
    if np.abs(v).sum() <= s:
        return v.copy()
    mags = np.sort(np.abs(v).ravel())[::-1]
    csum = np.cumsum(mags)
    counts = np.arange(1, mags.size + 1)
    rho = np.nonzero(mags * counts > csum - s)[0][-1]
    theta = (csum[rho] - s) / (rho + 1.0)
    return soft_threshold(v, theta)


def project_lp_ball(v, p: float, s: float, tol: float = 1e-12) -> np.ndarray:
    """Euclidean projection onto {x : ||x||_p <= s}, p in (1, 2].

    Solved through the KKT system x_i + lam * p * x_i^(p-1) = |v_i| with a
    safeguarded Newton iteration on the multiplier lam; each inner solve is a
    vectorized Newton on the concave increasing per-entry equation.
    """
    if not 1.0 < p <= 2.0:
        raise InvalidConstants(f"lp projection requires p in (1, 2], got {p}")
    if s <= 0:
        raise InvalidConstants(f"lp ball radius must be positive, got {s}")
    v = np.asarray(v, dtype=np.float64)
    if lp_norm(v, p) <= s:
        return v.copy()
    a = np.abs(v)
    sign = np.sign(v)
    scale = a.max()

    def x_of(lam, x0):
        x = np.minimum(x0, a)
        c = lam * p
        for _ in range(60):
            safe = np.maximum(x, 1e-300)
            fx = x + c * safe ** (p - 1.0) - a
            dfx = 1.0 + c * (p - 1.0) * safe ** (p - 2.0)
            xn = np.maximum(x - fx / dfx, 0.0)
            if np.max(np.abs(xn - x)) <= 1e-15 * scale:
                return xn
            x = xn
        return x

    lam, lo, hi = 1e-12, 0.0, None
    x = x_of(lam, a)
    for _ in range(200):
        norm = lp_norm(x, p)
        if abs(norm - s) <= tol * s:
            break
        if norm > s:
            lo = lam
        else:
            hi = lam
        safe = np.maximum(x, 1e-300)
        dx = -p * safe ** (p - 1.0) / (1.0 + lam * p * (p - 1.0) * safe ** (p - 2.0))
        dnorm = norm ** (1.0 - p) * ((safe ** (p - 1.0)) * dx).sum()
        lam_next = lam - (norm - s) / dnorm if dnorm != 0 else None
        if lam_next is None or lam_next <= lo or (hi is not None and lam_next >= hi):
            lam_next = 2.0 * lam if hi is None else 0.5 * (lo + hi)
        lam = lam_next
        x = x_of(lam, x)
    return sign * x


def project_nuclear_ball(a, tau: float) -> np.ndarray:
    """Full-rank Euclidean projection onto the nuclear-norm ball (full SVD route)."""
    u, s, v = full_svd(a)
    return (u * project_l1_ball(s, tau)) @ v.T


def prox_nuclear_lowrank(center, tau: float, r_star: int, seed=0, tol: float = 1e-9,
                         max_iter: int = 300) -> np.ndarray:
    """argmin over {rank <= r_star, ||.||_nuc <= tau} of ||X - center||_F^2.

    Rank-r_star truncated SVD of the center followed by an l1 projection of
    the leading singular values.
    """
    center = as_matrix(center)
    if not 1 <= r_star <= min(center.shape):
        raise ValueError(f"r_star must be in [1, {min(center.shape)}], got {r_star}")
    if not np.any(center):
        return np.zeros_like(center)
    u, s, v = truncated_svd(center, r_star, tol=tol, max_iter=max_iter, seed=seed)
    return (u * project_l1_ball(s, tau)) @ v.T


def prox_step(reg: Regularizer, z, w, grad, eta: float, beta: float, seed=0) -> np.ndarray:
    """Proximal update of the prox block given the other block's fresh step w.

    Minimizes R(V) + <V, grad> + (eta * beta / 2) ||V + w - z||_F^2, which by
    completing the square is the regularizer's proximal map at the center
    A = z - w - grad / (eta * beta).
    """
    if eta <= 0 or beta <= 0 or eta * beta <= 0:
        raise InvalidConstants(f"eta * beta must be positive, got eta={eta}, beta={beta}")
    z = as_matrix(z)
    w = as_matrix(w)
    grad = as_matrix(grad)
    center = z - w - grad / (eta * beta)
    if isinstance(reg, NuclearBall):
        if reg.rank_cap is None:
            return project_nuclear_ball(center, reg.tau)
        return prox_nuclear_lowrank(center, reg.tau, reg.rank_cap, seed=seed)
    if isinstance(reg, L1Ball):
        return project_l1_ball(center.ravel(), reg.s).reshape(center.shape)
    if isinstance(reg, ElasticNet):
        # argmin l1/l2 penalty plus the quadratic: a scaled soft threshold
        denom = 2.0 * reg.lambda2 + eta * beta
        return soft_threshold(eta * beta * center / denom, reg.lambda1 / denom)
    raise TypeError(f"prox_step does not support {type(reg).__name__}")
