"""Proximal gradient solver for  loss(theta) + beta * J(theta).

Each update is

    theta_{k+1} = prox_{alpha_k * beta * J}(theta_k - alpha_k * grad(theta_k))

with either a constant stepsize admissible under

    1/alpha > max(2*beta*zeta, ||X||^2 / 8 + beta*zeta)

or a backtracked stepsize alpha_k = eta^{n_k} * alpha_{k-1} where n_k is
the smallest count of reductions for which the candidate satisfies the
quadratic upper bound

    loss(cand) <= loss(theta_k) + (cand - theta_k) @ grad(theta_k)
                  + ||cand - theta_k||^2 / (2*alpha_k).

Both rules keep each subproblem strongly convex (alpha*beta*zeta < 1/2),
make the objective non-increasing, and drive the steps and the criticality
residual to zero.  An optional momentum schedule restarts the classic
t-sequence extrapolation on top of the same prox step.

Iterations stop once the objective change falls to ``eps_tol`` or
``max_iters`` is reached.  Every iteration can be recorded as a trace row
(objective, step norm, criticality residual, stepsize) and exported as CSV.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .model import Dataset, loss, loss_gradient, spectral_norm
from .penalty import PenaltySpec, convexified_derivatives, penalty_total, prox_vector

CONSTANT = "constant"
BACKTRACKING = "backtracking"

__all__ = [
    "CONSTANT",
    "BACKTRACKING",
    "SolverConfig",
    "TraceRow",
    "FitResult",
    "NumericalError",
    "max_constant_stepsize",
    "prox_grad_step",
    "backtrack_stepsize",
    "fit",
    "accelerated_fit",
    "criticality_residual",
    "write_trace_csv",
]

# one extra reduction per entry would mean alpha shrank by 2^-100: a bug,
# not a hard problem instance
_MAX_BACKTRACK_REDUCTIONS = 100


class NumericalError(RuntimeError):
    """The iteration produced a non-finite quantity."""


@dataclass
class SolverConfig:
    """Stepsize rule, stopping parameters, and trace switches.

    ``alpha`` (constant rule) defaults to 0.99x the largest admissible
    stepsize for the problem at hand; ``alpha0`` (backtracking start)
    defaults to 0.49/(beta*zeta), or 1.0 when zeta = 0.
    """

    stepsize_rule: str = CONSTANT
    alpha: float | None = None
    alpha0: float | None = None
    eta: float = 0.5
    accelerate: bool = False
    eps_tol: float = 1e-8
    max_iters: int = 10000
    record_trace: bool = True

    def __post_init__(self):
        if self.stepsize_rule not in (CONSTANT, BACKTRACKING):
            raise ValueError(f"unknown stepsize rule {self.stepsize_rule!r}")
        if not (0.0 < self.eta < 1.0):
            raise ValueError(f"eta must lie in (0, 1), got {self.eta}")
        if not (np.isfinite(self.eps_tol) and self.eps_tol > 0):
            raise ValueError(f"eps_tol must be a positive real, got {self.eps_tol}")
        if int(self.max_iters) < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        self.max_iters = int(self.max_iters)


class TraceRow(NamedTuple):
    objective: float
    step_norm: float
    residual: float
    stepsize: float


@dataclass
class FitResult:
    theta: np.ndarray
    iterations: int
    converged: bool
    final_objective: float
    trace: list[TraceRow] = field(default_factory=list)


def write_trace_csv(result: FitResult, path) -> None:
    """Export the iteration trace with columns iter,objective,step_norm,residual,stepsize."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iter", "objective", "step_norm", "residual", "stepsize"])
        for k, row in enumerate(result.trace):
            writer.writerow(
                [k, repr(row.objective), repr(row.step_norm), repr(row.residual), repr(row.stepsize)]
            )


def max_constant_stepsize(beta: float, spec: PenaltySpec, data: Dataset) -> float:
    """Supremum of admissible constant stepsizes, 1 / max(2*beta*zeta, ||X||^2/8 + beta*zeta)."""
    beta = _check_beta(beta, spec)
    norm = spectral_norm(data, tol=1e-12)
    denom = max(2.0 * beta * spec.zeta, norm * norm / 8.0 + beta * spec.zeta)
    return 1.0 / denom if denom > 0 else np.inf


def prox_grad_step(theta, alpha: float, beta: float, spec: PenaltySpec, data: Dataset):
    """One update theta -> prox_{alpha*beta*J}(theta - alpha*grad(theta))."""
    beta = _check_beta(beta, spec)
    g = loss_gradient(theta, data)
    return prox_vector(np.asarray(theta, dtype=float) - alpha * g, alpha * beta, spec)


def criticality_residual(theta, beta: float, spec: PenaltySpec, data: Dataset) -> float:
    """Distance to criticality: min over subgradients g of H of
    ||beta*g - 2*beta*zeta*theta + grad(theta)||_2, computed coordinatewise."""
    beta = _check_beta(beta, spec)
    g = loss_gradient(theta, data)
    return _residual_from_gradient(np.asarray(theta, dtype=float), g, beta, spec)


def _residual_from_gradient(theta, grad, beta, spec) -> float:
    lo, hi = convexified_derivatives(theta, spec)
    target = 2.0 * spec.zeta * theta - grad / beta
    # per coordinate the minimizing subgradient clamps the target into [lo, hi]
    violation = np.maximum(0.0, np.maximum(lo - target, target - hi))
    return float(beta * np.linalg.norm(violation))


def _check_beta(beta, spec: PenaltySpec) -> float:
    beta = spec.beta if beta is None else float(beta)
    if not np.isfinite(beta) or beta <= 0:
        raise ValueError(f"beta must be a finite positive real, got {beta}")
    return beta


def _objective(theta, data, beta, spec) -> float:
    return loss(theta, data) + beta * penalty_total(theta, spec)


def _default_alpha0(beta: float, spec: PenaltySpec) -> float:
    if spec.zeta > 0:
        return 0.49 / (beta * spec.zeta)
    return 1.0


def _backtrack(theta, grad, loss_theta, alpha, eta, beta, spec, data):
    """Shrink alpha until the quadratic upper bound accepts the prox step.

    Returns (alpha, candidate, candidate_loss).  The acceptance test gets a
    small additive slack so that cancellation noise near a fixed point
    cannot force spurious reductions.
    """
    slack = 1e-12 * (1.0 + abs(loss_theta))
    for _ in range(_MAX_BACKTRACK_REDUCTIONS + 1):
        cand = prox_vector(theta - alpha * grad, alpha * beta, spec)
        diff = cand - theta
        cand_loss = loss(cand, data)
        bound = loss_theta + float(diff @ grad) + float(diff @ diff) / (2.0 * alpha)
        # an overflowed bound certifies nothing, so it cannot accept the step
        if np.isfinite(bound) and np.isfinite(cand_loss) and cand_loss <= bound + slack:
            return alpha, cand, cand_loss
        alpha *= eta
    raise NumericalError(
        f"backtracking did not accept a stepsize after {_MAX_BACKTRACK_REDUCTIONS} "
        "reductions; this indicates a numerical problem"
    )


def backtrack_stepsize(theta_prev, alpha_prev: float, config: SolverConfig,
                       beta: float, spec: PenaltySpec, data: Dataset):
    """One backtracked update from theta_prev; returns (alpha_k, theta_k)."""
    beta = _check_beta(beta, spec)
    theta_prev = np.asarray(theta_prev, dtype=float)
    grad = loss_gradient(theta_prev, data)
    alpha, cand, _ = _backtrack(
        theta_prev, grad, loss(theta_prev, data), float(alpha_prev), config.eta, beta, spec, data
    )
    return alpha, cand


def _initial_alpha(config: SolverConfig, beta: float, spec: PenaltySpec, data: Dataset,
                   accelerated: bool = False) -> float:
    if config.stepsize_rule == CONSTANT:
        bound = max_constant_stepsize(beta, spec, data)
        if config.alpha is None:
            alpha = 0.99 * bound
            if accelerated:
                # momentum needs the quadratic majorization at every point,
                # i.e. alpha <= 1/L; the plain-descent bound is ~2x that
                norm = spectral_norm(data, tol=1e-12)
                if norm > 0:
                    alpha = min(alpha, 0.99 * 4.0 / (norm * norm))
        else:
            alpha = float(config.alpha)
        if not (0.0 < alpha < bound):
            raise ValueError(
                f"constant stepsize {alpha} is not admissible; it must lie in "
                f"(0, {bound}) for this problem"
            )
        return alpha
    alpha = _default_alpha0(beta, spec) if config.alpha0 is None else float(config.alpha0)
    if alpha <= 0 or not np.isfinite(alpha):
        raise ValueError(f"alpha0 must be a finite positive real, got {alpha}")
    if beta * spec.zeta * alpha >= 0.5:
        raise ValueError(
            f"alpha0 = {alpha} violates beta*zeta*alpha0 < 1/2 "
            f"(beta*zeta = {beta * spec.zeta:.6g})"
        )
    return alpha


def _prepare_theta0(theta0, data: Dataset) -> np.ndarray:
    if theta0 is None:
        return np.zeros(data.n_features)
    theta0 = np.array(theta0, dtype=float)
    if theta0.shape != (data.n_features,):
        raise ValueError(
            f"theta0 has shape {theta0.shape} but the dataset has {data.n_features} features"
        )
    return theta0


def fit(data: Dataset, beta: float, spec: PenaltySpec, config: SolverConfig,
        theta0=None) -> FitResult:
    """Run the proximal gradient iteration until the objective stalls.

    ``beta`` may be None to use ``spec.beta``.  With ``config.accelerate``
    the momentum schedule of :func:`accelerated_fit` runs instead.
    """
    if config.accelerate:
        return accelerated_fit(data, beta, spec, config, theta0)
    beta = _check_beta(beta, spec)
    theta = _prepare_theta0(theta0, data)
    alpha = _initial_alpha(config, beta, spec, data)

    grad = loss_gradient(theta, data)
    loss_val = loss(theta, data)
    obj = loss_val + beta * penalty_total(theta, spec)
    _require_finite(obj)
    trace = []
    if config.record_trace:
        trace.append(TraceRow(obj, 0.0, _residual_from_gradient(theta, grad, beta, spec), 0.0))

    iterations = 0
    converged = False
    for _ in range(config.max_iters):
        if config.stepsize_rule == BACKTRACKING:
            alpha, theta_new, loss_new = _backtrack(
                theta, grad, loss_val, alpha, config.eta, beta, spec, data
            )
        else:
            theta_new = prox_vector(theta - alpha * grad, alpha * beta, spec)
            loss_new = loss(theta_new, data)
        obj_new = loss_new + beta * penalty_total(theta_new, spec)
        _require_finite(obj_new)
        grad_new = loss_gradient(theta_new, data)
        iterations += 1
        if config.record_trace:
            trace.append(TraceRow(
                obj_new,
                float(np.linalg.norm(theta_new - theta)),
                _residual_from_gradient(theta_new, grad_new, beta, spec),
                alpha,
            ))
        stalled = abs(obj_new - obj) <= config.eps_tol
        theta, grad, loss_val, obj = theta_new, grad_new, loss_new, obj_new
        if stalled:
            converged = True
            break

    return FitResult(theta, iterations, converged, obj, trace)


def accelerated_fit(data: Dataset, beta: float, spec: PenaltySpec, config: SolverConfig,
                    theta0=None) -> FitResult:
    """Momentum variant: prox steps with t-sequence extrapolation.

    t_1 = 1, t_{k+1} = (1 + sqrt(1 + 4*t_k^2)) / 2, and the next base point
    is  hat_k + ((t_k - 1)/t_{k+1}) * (hat_k - hat_{k-1}); the first
    momentum coefficient is 0.  The objective is monitored at the prox
    outputs hat_k, and the usual stall test stops the run early.
    """
    beta = _check_beta(beta, spec)
    hat_prev = _prepare_theta0(theta0, data)
    base = hat_prev.copy()
    alpha = _initial_alpha(config, beta, spec, data, accelerated=True)

    obj_prev = _objective(hat_prev, data, beta, spec)
    _require_finite(obj_prev)
    trace = []
    if config.record_trace:
        g0 = loss_gradient(hat_prev, data)
        trace.append(TraceRow(obj_prev, 0.0, _residual_from_gradient(hat_prev, g0, beta, spec), 0.0))

    t = 1.0
    iterations = 0
    converged = False
    theta_out = hat_prev
    obj_out = obj_prev
    for _ in range(config.max_iters):
        grad = loss_gradient(base, data)
        if config.stepsize_rule == BACKTRACKING:
            alpha, hat, hat_loss = _backtrack(
                base, grad, loss(base, data), alpha, config.eta, beta, spec, data
            )
        else:
            hat = prox_vector(base - alpha * grad, alpha * beta, spec)
            hat_loss = loss(hat, data)
        obj_hat = hat_loss + beta * penalty_total(hat, spec)
        _require_finite(obj_hat)
        t_next = (1.0 + np.sqrt(1.0 + 4.0 * t * t)) / 2.0
        base = hat + ((t - 1.0) / t_next) * (hat - hat_prev)
        iterations += 1
        if config.record_trace:
            g_hat = loss_gradient(hat, data)
            trace.append(TraceRow(
                obj_hat,
                float(np.linalg.norm(hat - hat_prev)),
                _residual_from_gradient(hat, g_hat, beta, spec),
                alpha,
            ))
        theta_out, obj_out = hat, obj_hat
        stalled = abs(obj_hat - obj_prev) <= config.eps_tol
        hat_prev, obj_prev, t = hat, obj_hat, t_next
        if stalled:
            converged = True
            break

    return FitResult(theta_out, iterations, converged, obj_out, trace)


def _require_finite(value: float) -> None:
    if not np.isfinite(value):
        raise NumericalError(
            "objective became non-finite; the data or stepsize is pathological"
        )
