"""Post-exposure intervention TB model with early and persistent latent classes.

Compartments S, L3 (early latent, infected under two years), I1 (active
infectious), L4 (persistent latent), T (treated). Control u1 (case holding,
effectiveness eps1) suppresses reactivation of treated individuals:
omega_R becomes (1-eps1*u1)*omega_R in both the I1 source and the T sink.
Control u2 (case finding, effectiveness eps2) adds treatment of persistent
latents: tau2 becomes tau2+eps2*u2 in both the L4 sink and the T source.
Births balance natural deaths, so population is the constant parameter N.
"""

from __future__ import annotations

import numpy as np

from ..core import CostKind, ParameterSet, ValidationError
from .base import ModelDefinition, ModelId, clamp

LABELS = ("S", "L3", "I1", "L4", "T")
PARAMS = ("N", "mu", "beta", "sigma", "sigma_R", "delta", "k1",
          "omega", "omega_R", "tau0", "tau1", "tau2", "eps1", "eps2")


def _unpack(p: ParameterSet):
    return (
        p.value("N"), p.value("mu"), p.value("beta"), p.value("sigma"),
        p.value("sigma_R"), p.value("delta"), p.value("k1"), p.value("omega"),
        p.value("omega_R"), p.value("tau0"), p.value("tau1"), p.value("tau2"),
        p.value("eps1"), p.value("eps2"),
    )


def rhs(t, x, u, p):
    (n_pop, mu, beta, sigma, sig_r, delta, k1, omega, omega_r,
     tau0, tau1, tau2, eps1, eps2) = _unpack(p)
    if n_pop <= 0.0:
        raise ValidationError("parameter N must be positive")
    s, l3, i1, l4, tr = x
    u1, u2 = u
    th = beta / n_pop
    foi = th * i1
    react_t = (1.0 - eps1 * u1) * omega_r   # treated reactivation under case holding
    treat_l4 = tau2 + eps2 * u2             # persistent-latent treatment under case finding
    return np.array([
        mu * n_pop - foi * s - mu * s,
        foi * (s + sigma * l4 + sig_r * tr) - (delta + tau1 + mu) * l3,
        k1 * delta * l3 + omega * l4 + react_t * tr - (tau0 + mu) * i1,
        (1.0 - k1) * delta * l3 - sigma * foi * l4 - (omega + treat_l4 + mu) * l4,
        tau0 * i1 + tau1 * l3 + treat_l4 * l4 - sig_r * foi * tr - (react_t + mu) * tr,
    ])


def jac(t, x, u, p):
    (n_pop, mu, beta, sigma, sig_r, delta, k1, omega, omega_r,
     tau0, tau1, tau2, eps1, eps2) = _unpack(p)
    s, l3, i1, l4, tr = x
    u1, u2 = u
    th = beta / n_pop
    react_t = (1.0 - eps1 * u1) * omega_r
    treat_l4 = tau2 + eps2 * u2
    j = np.zeros((5, 5))
    # columns: S, L3, I1, L4, T
    j[0] = [-th * i1 - mu, 0.0, -th * s, 0.0, 0.0]
    j[1] = [th * i1,
            -(delta + tau1 + mu),
            th * (s + sigma * l4 + sig_r * tr),
            th * i1 * sigma,
            th * i1 * sig_r]
    j[2] = [0.0, k1 * delta, -(tau0 + mu), omega, react_t]
    j[3] = [0.0,
            (1.0 - k1) * delta,
            -sigma * th * l4,
            -sigma * th * i1 - (omega + treat_l4 + mu),
            0.0]
    j[4] = [0.0,
            tau1,
            tau0 - sig_r * th * tr,
            treat_l4,
            -sig_r * th * i1 - react_t - mu]
    return j


def characterize(t, x, lam, p, w):
    omega_r = p.value("omega_R")
    eps1 = p.value("eps1")
    eps2 = p.value("eps2")
    l4, tr = x[3], x[4]
    u1 = eps1 * omega_r * tr * (lam[2] - lam[4]) / w.b[0]
    u2 = eps2 * l4 * (lam[3] - lam[4]) / w.b[1]
    return np.array([clamp(u1, w.lower, w.upper), clamp(u2, w.lower, w.upper)])


DEFINITION = ModelDefinition(
    id=ModelId.POST_EXPOSURE,
    description="post-exposure TB model (early/persistent latents), case holding and finding",
    state_labels=LABELS,
    control_labels=("u1", "u2"),
    cost_kind=CostKind.C1,
    required_params=PARAMS,
    rhs=rhs,
    characterize=characterize,
    infectious=(0.0, 0.0, 1.0, 0.0, 0.0),
    latent=(0.0, 0.0, 0.0, 1.0, 0.0),  # persistent latents L4
    jac=jac,
    nonnegative_params=("mu", "beta", "delta", "omega", "omega_R",
                        "tau0", "tau1", "tau2"),
    unit_interval_params=("sigma", "sigma_R", "k1"),
    open_unit_params=("eps1", "eps2"),
    positive_params=("N",),
    constant_population=True,
)

DEFAULT_PARAMS = {
    "N": 30000.0,
    "mu": 0.0143,
    "beta": 50.0,
    "sigma": 0.25,
    "sigma_R": 0.25,
    "delta": 12.0,
    "k1": 0.85,
    "omega": 0.0002,
    "omega_R": 0.0002,
    "tau0": 2.0,
    "tau1": 2.0,
    "tau2": 1.0,
    "eps1": 0.25,
    "eps2": 0.25,
}
