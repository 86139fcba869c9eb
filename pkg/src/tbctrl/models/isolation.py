"""TB model with immigration of infectious individuals and isolation for treatment.

Compartments S, L1, I1, J (isolated infectious), T. Immigrants arrive at
rate A with latent fraction p_star and active fraction q_star; control u1 is
medical screening of immigrants (scaling those infected inflows by 1-u1),
and u2 boosts the isolation rate of active cases to (1+u2)*xi. The isolation
level l in [0,1] sets how much J contributes to transmission (l=0 perfect
isolation), and sigma_star is the residual contact treated individuals keep
with the isolated. Population N(t) is the live compartment sum.
"""

from __future__ import annotations

import numpy as np

from ..core import CostKind, ParameterSet
from .base import ModelDefinition, ModelId, clamp, live_population

LABELS = ("S", "L1", "I1", "J", "T")
PARAMS = ("Lambda_star", "A", "p_star", "q_star", "beta", "c", "l", "m", "p",
          "sigma", "sigma_star", "k1", "mu", "d3", "d4", "r2", "r3", "xi")


def _unpack(p: ParameterSet):
    return (
        p.value("Lambda_star"), p.value("A"), p.value("p_star"), p.value("q_star"),
        p.value("beta"), p.value("c"), p.value("l"), p.value("m"), p.value("p"),
        p.value("sigma"), p.value("sigma_star"), p.value("k1"), p.value("mu"),
        p.value("d3"), p.value("d4"), p.value("r2"), p.value("r3"), p.value("xi"),
    )


def rhs(t, x, u, pp):
    (lam_in, a_in, ps, qs, beta, c, lvl, m, p, sigma, sig_s, k1, mu,
     d3, d4, r2, r3, xi) = _unpack(pp)
    s, l1, i1, jc, tr = x
    n = live_population(x)
    u1, u2 = u
    bc = beta * c
    phi = bc * (i1 + lvl * jc) / n          # force of infection on S and L1
    psi = sigma * bc * (i1 + sig_s * jc) / n  # residual force on treated
    screen = 1.0 - u1
    iso = (1.0 + u2) * xi * i1
    return np.array([
        lam_in + (1.0 - screen * (ps + qs)) * a_in - phi * s - mu * s,
        screen * (ps * a_in) + (1.0 - m) * phi * s - p * phi * l1 + psi * tr - (k1 + mu) * l1,
        screen * (qs * a_in) + m * phi * s + p * phi * l1 + k1 * l1 - (mu + d3 + r2) * i1 - iso,
        iso - (r3 + mu + d4) * jc,
        r2 * i1 + r3 * jc - psi * tr - mu * tr,
    ])


def jac(t, x, u, pp):
    (lam_in, a_in, ps, qs, beta, c, lvl, m, p, sigma, sig_s, k1, mu,
     d3, d4, r2, r3, xi) = _unpack(pp)
    s, l1, i1, jc, tr = x
    n = live_population(x)
    u1, u2 = u
    bc = beta * c
    phi = bc * (i1 + lvl * jc) / n
    psi = sigma * bc * (i1 + sig_s * jc) / n
    # d(phi)/dY and d(psi)/dY; the -phi/n part is the live-N feedback.
    d_phi = np.array([0.0, 0.0, bc / n, bc * lvl / n, 0.0]) - phi / n
    d_psi = np.array([0.0, 0.0, sigma * bc / n, sigma * bc * sig_s / n, 0.0]) - psi / n
    e_s = np.array([1.0, 0.0, 0.0, 0.0, 0.0])
    e_l1 = np.array([0.0, 1.0, 0.0, 0.0, 0.0])
    e_i1 = np.array([0.0, 0.0, 1.0, 0.0, 0.0])
    e_j = np.array([0.0, 0.0, 0.0, 1.0, 0.0])
    e_t = np.array([0.0, 0.0, 0.0, 0.0, 1.0])
    d_phis = s * d_phi + phi * e_s       # gradient of phi*S
    d_phil = l1 * d_phi + phi * e_l1     # gradient of phi*L1
    d_psit = tr * d_psi + psi * e_t      # gradient of psi*T
    j = np.zeros((5, 5))
    j[0] = -d_phis - mu * e_s
    j[1] = (1.0 - m) * d_phis - p * d_phil + d_psit - (k1 + mu) * e_l1
    j[2] = m * d_phis + p * d_phil + k1 * e_l1 - (mu + d3 + r2) * e_i1 - (1.0 + u2) * xi * e_i1
    j[3] = (1.0 + u2) * xi * e_i1 - (r3 + mu + d4) * e_j
    j[4] = r2 * e_i1 + r3 * e_j - d_psit - mu * e_t
    return j


def characterize(t, x, lam, pp, w):
    a_in = pp.value("A")
    ps = pp.value("p_star")
    qs = pp.value("q_star")
    xi = pp.value("xi")
    i1 = x[2]
    u1 = a_in * (ps * (lam[1] - lam[0]) + qs * (lam[2] - lam[0])) / w.b[0]
    u2 = xi * i1 * (lam[2] - lam[3]) / w.b[1]
    return np.array([clamp(u1, w.lower, w.upper), clamp(u2, w.lower, w.upper)])


DEFINITION = ModelDefinition(
    id=ModelId.ISOLATION_IMMIGRATION,
    description="TB model with infectious immigration, screening control and isolation control",
    state_labels=LABELS,
    control_labels=("u1", "u2"),
    cost_kind=CostKind.C2,
    required_params=PARAMS,
    rhs=rhs,
    characterize=characterize,
    infectious=(0.0, 0.0, 1.0, 0.0, 0.0),
    latent=(0.0, 1.0, 0.0, 0.0, 0.0),
    isolated=(0.0, 0.0, 0.0, 1.0, 0.0),
    jac=jac,
    nonnegative_params=("Lambda_star", "A", "beta", "c", "p", "k1", "mu",
                        "d3", "d4", "r2", "r3", "xi"),
    unit_interval_params=("p_star", "q_star", "l", "m", "sigma", "sigma_star"),
    sum_constraints=(("p_star", "q_star"),),
)

DEFAULT_PARAMS = {
    "Lambda_star": 100.0,
    "A": 50.0,
    "p_star": 0.2,
    "q_star": 0.1,
    "beta": 13.0,
    "c": 1.0,
    "l": 0.3,
    "m": 0.05,
    "p": 0.4,
    "sigma": 0.9,
    "sigma_star": 0.2,
    "k1": 0.5,
    "mu": 0.0143,
    "d3": 0.1,
    "d4": 0.05,
    "r2": 1.0,
    "r3": 1.5,
    "xi": 0.9,
}
