"""Weakly convex sparsity penalty (minimax concave / MCP family) and its prox.

The scalar penalty with nonconvexity parameter ``zeta >= 0`` is

    F(t) = |t| - zeta*t^2      for |t| <= 1/(2*zeta)
    F(t) = 1/(4*zeta)          for |t| >  1/(2*zeta)

``zeta = 0`` pushes the plateau to infinity and degenerates to the l1
penalty F(t) = |t|, so the convex baseline shares this code path.  The
convexified companion

    H(t) = F(t) + zeta*t^2

is convex; its one-sided derivatives drive the optimality checks.  The
proximal operator of ``w*F`` (firm shrinkage) is closed form whenever the
strong-convexity condition ``w*zeta < 1/2`` holds:

    prox(v) = 0                              for |v| <  w
    prox(v) = (v - w*sign(v)) / (1 - 2*w*zeta)  for w <= |v| <= 1/(2*zeta)
    prox(v) = v                              for |v| >  1/(2*zeta)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MCP = "mcp"

__all__ = [
    "MCP",
    "PenaltySpec",
    "penalty_value",
    "penalty_total",
    "prox_scalar",
    "prox_vector",
    "penalty_derivatives",
    "convexified_derivatives",
    "convexified_second_derivatives",
]


@dataclass(frozen=True)
class PenaltySpec:
    """Parameters of the separable penalty ``J(x) = sum_i F(x_i)``.

    ``beta`` is the weight the objective puts on ``J``; solver and
    certification entry points accept it explicitly and this field acts as
    the bundled default.
    """

    zeta: float
    beta: float = 1.0
    kind: str = MCP

    def __post_init__(self):
        object.__setattr__(self, "zeta", float(self.zeta))
        object.__setattr__(self, "beta", float(self.beta))
        if self.kind != MCP:
            raise ValueError(f"unknown penalty kind {self.kind!r}")
        if not np.isfinite(self.zeta) or self.zeta < 0:
            raise ValueError(f"zeta must be a finite nonnegative real, got {self.zeta}")
        if not np.isfinite(self.beta) or self.beta <= 0:
            raise ValueError(f"beta must be a finite positive real, got {self.beta}")

    @property
    def plateau_start(self) -> float:
        """|t| beyond which F is constant and the prox is the identity."""
        return 1.0 / (2.0 * self.zeta) if self.zeta > 0 else np.inf

    @property
    def plateau_value(self) -> float:
        """Constant value of F on the plateau (infinite for zeta = 0)."""
        return 1.0 / (4.0 * self.zeta) if self.zeta > 0 else np.inf


def _as_float_array(t):
    a = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(a)):
        raise ValueError("penalty input must be finite")
    return a


def _maybe_scalar(out, like):
    return float(out) if np.ndim(like) == 0 else out


def penalty_value(t, spec: PenaltySpec):
    """Evaluate F elementwise."""
    a = np.abs(_as_float_array(t))
    inner = a - spec.zeta * a * a
    if spec.zeta > 0:
        out = np.where(a <= spec.plateau_start, inner, spec.plateau_value)
    else:
        out = inner
    return _maybe_scalar(out, t)


def penalty_total(theta, spec: PenaltySpec) -> float:
    """Separable penalty J(theta) = sum_i F(theta_i)."""
    return float(np.sum(penalty_value(np.asarray(theta, dtype=float), spec)))


def _check_weight(weight: float, spec: PenaltySpec) -> float:
    weight = float(weight)
    if not np.isfinite(weight) or weight <= 0:
        raise ValueError(f"prox weight must be a finite positive real, got {weight}")
    if weight * spec.zeta >= 0.5:
        raise ValueError(
            "prox is not well posed: weight*zeta = "
            f"{weight * spec.zeta:.6g} but the strong-convexity condition "
            "requires weight*zeta < 1/2"
        )
    return weight


def prox_vector(v, weight: float, spec: PenaltySpec):
    """Elementwise minimizer of  w*F(u) + (u - v)^2 / 2  (firm shrinkage)."""
    w = _check_weight(weight, spec)
    v = _as_float_array(v)
    a = np.abs(v)
    shrunk = (v - w * np.sign(v)) / (1.0 - 2.0 * w * spec.zeta)
    out = np.where(a < w, 0.0, np.where(a <= spec.plateau_start, shrunk, v))
    return _maybe_scalar(out, v)


def prox_scalar(v: float, weight: float, spec: PenaltySpec) -> float:
    return float(prox_vector(float(v), weight, spec))


def penalty_derivatives(t, spec: PenaltySpec):
    """One-sided derivatives (left, right) of F; they differ only at 0."""
    a = np.asarray(_as_float_array(t))
    slope = np.where(np.abs(a) <= spec.plateau_start, np.sign(a) - 2.0 * spec.zeta * a, 0.0)
    left = np.where(a == 0.0, -1.0, slope)
    right = np.where(a == 0.0, 1.0, slope)
    return _maybe_scalar(left, t), _maybe_scalar(right, t)


def convexified_derivatives(t, spec: PenaltySpec):
    """One-sided derivatives (left, right) of H(t) = F(t) + zeta*t^2."""
    a = np.asarray(_as_float_array(t))
    fl, fr = penalty_derivatives(a, spec)
    corr = 2.0 * spec.zeta * a
    left = np.asarray(fl) + corr
    right = np.asarray(fr) + corr
    return _maybe_scalar(left, t), _maybe_scalar(right, t)


def convexified_second_derivatives(t, spec: PenaltySpec):
    """One-sided second derivatives (left, right) of H.

    For MCP these are 0 inside the kink radius and 2*zeta beyond it; at
    |t| = 1/(2*zeta) the inner side is 0 and the outer side 2*zeta.
    """
    a = np.asarray(_as_float_array(t))
    p = spec.plateau_start
    outer = 2.0 * spec.zeta
    beyond = np.abs(a) > p
    left = np.where(beyond | (a == -p), outer, 0.0)
    right = np.where(beyond | (a == p), outer, 0.0)
    return _maybe_scalar(left, t), _maybe_scalar(right, t)
