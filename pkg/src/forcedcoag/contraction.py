"""Weighted l^1 contraction between two solutions.

For two solutions ``c`` and ``d`` the distance ``D = sum_k k^mu |c_k - d_k|``
satisfies ``D' <= B D`` with the bracket

    B = 2 A* (C_mu + 2) sum_l l^(mu+beta) (c_l + d_l) - R*,
    C_mu = 2^max(mu-2, 0) * max(mu, mu(mu-1)).

The smallness constants ``kappa_1, kappa_2`` bound ``-B`` from below after
the moments have settled; either being positive gives a unique equilibrium
attracting every solution at an exponential rate.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DimensionError, ParameterError

__all__ = [
    "c_mu",
    "technical_inequality_check",
    "technical_inequality_scan",
    "contraction_rate",
    "pairwise_distance",
    "SmallnessCertificate",
    "smallness_certificate",
    "detect_contraction_time",
]


def c_mu(mu: float) -> float:
    """``2^max(mu-2,0) * max(mu, mu(mu-1))`` for ``mu >= 1``."""
    if mu < 1:
        raise ParameterError(f"C_mu needs mu >= 1, got {mu}")
    return 2.0 ** max(mu - 2.0, 0.0) * max(mu, mu * (mu - 1.0))


def technical_inequality_check(k, l, mu):
    """Evaluate ``(k+l)^mu - k^mu + l^mu <= C_mu l^max(1,mu-1) k^(mu-1) + 2 l^mu``.

    Works elementwise on arrays. Returns ``(lhs, rhs, holds)`` where
    ``holds`` allows a relative slack of ``1e-12``.
    """
    k = np.asarray(k, dtype=float)
    l = np.asarray(l, dtype=float)
    lhs = (k + l) ** mu - k**mu + l**mu
    rhs = c_mu(mu) * l ** max(1.0, mu - 1.0) * k ** (mu - 1.0) + 2.0 * l**mu
    holds = lhs <= rhs * (1.0 + 1e-12)
    if lhs.ndim == 0:
        return float(lhs), float(rhs), bool(holds)
    return lhs, rhs, holds


def technical_inequality_scan(k_max, mus):
    """Exhaustive scan over ``1 <= k, l <= k_max``.

    Returns a dict mapping each ``mu`` to ``(violations, equality_pairs)``,
    where ``equality_pairs`` lists the ``(k, l)`` at which both sides agree
    to within ``1e-12`` relative.
    """
    sizes = np.arange(1, k_max + 1, dtype=float)
    K, L = np.meshgrid(sizes, sizes, indexing="ij")
    out = {}
    for mu in mus:
        lhs, rhs, holds = technical_inequality_check(K, L, mu)
        eq = np.argwhere(np.abs(lhs - rhs) <= 1e-12 * rhs) + 1
        out[mu] = (int(np.count_nonzero(~holds)), [tuple(int(v) for v in p) for p in eq])
    return out


def _as_array(state):
    return np.asarray(getattr(state, "c", state), dtype=float)


def pairwise_distance(c, d, mu: float) -> float:
    """``sum_k k^mu |c_k - d_k|``."""
    c, d = _as_array(c), _as_array(d)
    if c.size != d.size:
        raise DimensionError(f"states have different sizes {c.size} and {d.size}")
    k = np.arange(1, c.size + 1, dtype=float)
    return math.fsum(k**mu * np.abs(c - d))


def contraction_rate(A_star, beta, R_star, mu, c, d) -> float:
    """Bracket ``2 A* (C_mu + 2) sum_l l^(mu+beta) (c_l + d_l) - R*``.

    A negative value means the weighted distance between ``c`` and ``d``
    is instantaneously decaying at least at that rate.
    """
    c, d = _as_array(c), _as_array(d)
    if c.size != d.size:
        raise DimensionError(f"states have different sizes {c.size} and {d.size}")
    k = np.arange(1, c.size + 1, dtype=float)
    return 2.0 * A_star * (c_mu(mu) + 2.0) * math.fsum(k ** (mu + beta) * (c + d)) - R_star


@dataclass
class SmallnessCertificate:
    mu: float
    C_mu: float
    p: float
    q: float
    rho: float
    kappa_1: float
    kappa_2: float
    kappa: float
    passed: bool
    inputs: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def to_json(self, **kw):
        return json.dumps(asdict(self), **kw)


def holder_exponents(order, alpha, beta, gamma):
    """``p = (order+gamma-1)/(1+gamma-alpha-beta)``, ``q = p/(p-1)``, ``rho = gamma/(order-1)``.

    ``order`` is the moment order being controlled: ``mu`` for the moment
    bounds, ``mu + beta`` for the smallness constants.
    """
    p = (order + gamma - 1.0) / (1.0 + gamma - alpha - beta)
    if p <= 1.0:
        raise ParameterError(f"Hoelder exponent p={p:.6g} must exceed 1")
    return p, p / (p - 1.0), gamma / (order - 1.0)


def smallness_certificate(mu, alpha, beta, gamma, A_star, R_star, s_hat_1, s_hat_mu_beta):
    """Evaluate both smallness conditions at moment order ``mu + beta``.

    ``s_hat_1`` and ``s_hat_mu_beta`` are the source moments of order 1 and
    ``mu + beta`` divided by ``R*``.
    """
    failed = []
    if mu < 1:
        failed.append("mu >= 1")
    if not mu + beta > max(2.0 - alpha - beta, 1.0):
        failed.append("mu + beta > max(2 - alpha - beta, 1)")
    if not gamma > max(0.0, alpha + beta - 1.0):
        failed.append("gamma > max(0, alpha + beta - 1)")
    if A_star <= 0 or R_star <= 0:
        failed.append("A* > 0 and R* > 0")
    if s_hat_1 < 0 or s_hat_mu_beta < 0:
        failed.append("nonnegative source moments")
    if failed:
        raise ParameterError("smallness hypotheses violated: " + "; ".join(failed))

    order = mu + beta
    p, q, rho = holder_exponents(order, alpha, beta, gamma)
    C = c_mu(mu)
    A_hat = A_star / R_star
    lead = (2.0**order * order) ** p * q ** (1.0 - p) / p * A_hat**p
    kappa_2 = R_star - 16.0 * C * A_star * (lead * s_hat_1 ** (1.0 + p) + s_hat_mu_beta)
    inner = (2.0 ** (2.0 + rho) * lead * s_hat_1 ** (1.0 + p + rho)
             + 2.0 ** (2.0 + rho) * s_hat_mu_beta * s_hat_1**rho)
    kappa_1 = R_star - 8.0 * C * A_star * inner ** (1.0 / (1.0 + rho))
    kappa = max(kappa_1, kappa_2)
    notes = ["exponents p, q, rho evaluated at moment order mu + beta"]
    if rho <= 1:
        notes.append("rho <= 1: nonlinear Gronwall step used with rho > 0")
    return SmallnessCertificate(
        mu=mu, C_mu=C, p=p, q=q, rho=rho, kappa_1=kappa_1, kappa_2=kappa_2,
        kappa=kappa, passed=kappa > 0,
        inputs=dict(alpha=alpha, beta=beta, gamma=gamma, A_star=A_star, R_star=R_star,
                    s_hat_1=s_hat_1, s_hat_mu_beta=s_hat_mu_beta),
        notes=notes)


def detect_contraction_time(times, brackets, kappa):
    """First sample time from which the bracket stays below ``-kappa``.

    Returns ``None`` if the bracket never settles below ``-kappa``.
    """
    below = np.asarray(brackets) < -kappa
    if not below[-1]:
        return None
    idx = len(below) - 1
    while idx > 0 and below[idx - 1]:
        idx -= 1
    return float(np.asarray(times)[idx])
