"""Total-cost evaluation: trapezoidal quadrature of the objective along a trajectory."""

from __future__ import annotations

import numpy as np

from .core import CostKind, CostWeights, Trajectory, ValidationError
from . import models
from .models import ModelId

__all__ = ["CostKind", "check_kind_weights", "total_cost"]

_trapezoid = getattr(np, "trapezoid", None) or np.trapz


def check_kind_weights(kind: CostKind, w: CostWeights) -> None:
    """Reject weight sets inconsistent with the declared functional shape."""
    kind = CostKind(kind)
    if kind is CostKind.C2 and w.a2 != 0.0:
        raise ValidationError("cost kind C2 has no latent term; a2 must be 0")
    if kind is CostKind.C3 and w.a1 != 0.0:
        raise ValidationError("cost kind C3 has no infectious term; a1 must be 0")


def total_cost(kind: CostKind, model: ModelId, traj: Trajectory, w: CostWeights) -> float:
    """Composite trapezoidal quadrature of the running cost over the grid."""
    check_kind_weights(kind, w)
    if traj.control is None:
        raise ValidationError("trajectory has no control samples; cannot evaluate cost")
    d = models.model_definition(model)
    if traj.control.shape[1] != d.control_dim:
        raise ValidationError(f"{d.id.value}: control dimension mismatch in trajectory")
    if traj.state.shape[1] != d.state_dim:
        raise ValidationError(f"{d.id.value}: state dimension mismatch in trajectory")
    if len(w.b) != d.control_dim:
        raise ValidationError(f"{d.id.value} needs {d.control_dim} effort weights, got {len(w.b)}")
    vec = models.cost_state_vector(model, w)
    integrand = traj.state @ vec + 0.5 * (np.square(traj.control) @ w.b_array)
    return float(_trapezoid(integrand, dx=traj.grid.h))
