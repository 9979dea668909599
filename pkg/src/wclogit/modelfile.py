"""Human-readable model files.

Line-oriented ``key value`` text with a leading format-version line, e.g.

    wclogit-model 1
    dimension 3
    beta 1.2
    zeta 0.1
    ...
    center 0.0 0.5 0.0
    theta 1.25 0.0 -0.75

Floats are written with ``repr`` so loading reproduces them exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAGIC = "wclogit-model"
FORMAT_VERSION = 1

__all__ = ["MAGIC", "FORMAT_VERSION", "ModelFile", "save_model", "load_model"]


@dataclass
class ModelFile:
    theta: np.ndarray
    beta: float
    zeta: float
    kind: str
    centered: bool
    center: np.ndarray
    has_intercept: bool
    stepsize_rule: str
    accelerate: bool
    iterations: int
    converged: bool
    final_objective: float


def save_model(path, model: ModelFile) -> None:
    lines = [
        f"{MAGIC} {FORMAT_VERSION}",
        f"dimension {model.theta.size}",
        f"beta {model.beta!r}",
        f"zeta {model.zeta!r}",
        f"kind {model.kind}",
        f"centered {str(model.centered).lower()}",
        f"has_intercept {str(model.has_intercept).lower()}",
        f"stepsize_rule {model.stepsize_rule}",
        f"accelerate {str(model.accelerate).lower()}",
        f"iterations {model.iterations}",
        f"converged {str(model.converged).lower()}",
        f"final_objective {model.final_objective!r}",
        "center " + " ".join(repr(float(v)) for v in model.center),
        "theta " + " ".join(repr(float(v)) for v in model.theta),
    ]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _parse_bool(token: str, key: str) -> bool:
    if token == "true":
        return True
    if token == "false":
        return False
    raise ValueError(f"model file field {key!r} must be true or false, got {token!r}")


def load_model(path) -> ModelFile:
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty model file")
    head = lines[0].split()
    if len(head) != 2 or head[0] != MAGIC:
        raise ValueError(f"{path}: not a {MAGIC} file")
    if int(head[1]) != FORMAT_VERSION:
        raise ValueError(
            f"{path}: unsupported model format version {head[1]} (expected {FORMAT_VERSION})"
        )
    fields = {}
    for line in lines[1:]:
        key, _, rest = line.partition(" ")
        fields[key] = rest
    required = ["dimension", "beta", "zeta", "kind", "centered", "has_intercept",
                "stepsize_rule", "accelerate", "iterations", "converged",
                "final_objective", "center", "theta"]
    missing = [k for k in required if k not in fields]
    if missing:
        raise ValueError(f"{path}: model file is missing fields {missing}")
    dim = int(fields["dimension"])
    theta = np.array([float(t) for t in fields["theta"].split()])
    centervec = np.array([float(t) for t in fields["center"].split()])
    if theta.size != dim or centervec.size != dim:
        raise ValueError(f"{path}: vector lengths disagree with dimension {dim}")
    return ModelFile(
        theta=theta,
        beta=float(fields["beta"]),
        zeta=float(fields["zeta"]),
        kind=fields["kind"],
        centered=_parse_bool(fields["centered"], "centered"),
        center=centervec,
        has_intercept=_parse_bool(fields["has_intercept"], "has_intercept"),
        stepsize_rule=fields["stepsize_rule"],
        accelerate=_parse_bool(fields["accelerate"], "accelerate"),
        iterations=int(fields["iterations"]),
        converged=_parse_bool(fields["converged"], "converged"),
        final_objective=float(fields["final_objective"]),
    )
