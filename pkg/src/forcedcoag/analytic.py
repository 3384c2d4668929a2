"""Exactly solvable monomer-only example.

With ``a_{1,1} = A*`` and all other kernel entries zero, ``r_k = R* k^gamma``
and an arbitrary nonnegative source, the system decouples:

* ``c_1`` obeys the constant-coefficient Riccati equation
  ``c_1' = -A* c_1^2 + s_1 - r_1 c_1``,
* ``c_2`` is driven linearly by ``c_1^2``,
* every ``c_k`` with ``k >= 3`` relaxes independently to ``s_k / r_k``.

The Riccati constant ``(r_1^2/A*^2 + 4 s_1/A*)^(-1/2)`` is called
``alpha_ric`` throughout, to keep it apart from the kernel exponent ``alpha``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .contraction import c_mu
from .errors import ParameterError, ToleranceError
from .kernels import KernelModel, RateModel, SourceModel
from .truncated import CoagulationSystem, StateVector

__all__ = [
    "ExampleParams",
    "RiccatiConstants",
    "riccati_constants",
    "exact_equilibrium",
    "exact_c1",
    "exact_c2",
    "exact_ck",
    "exact_state",
    "example_decay_rate",
    "smallness_gap_demo",
]


@dataclass
class ExampleParams:
    A_star: float = 1.0
    R_star: float = 1.0
    gamma: float = 1.0
    s: tuple = (1.0, 0.5)
    c_in: tuple = ()

    def __post_init__(self):
        if self.A_star < 0 or self.R_star <= 0 or self.gamma <= 0:
            raise ParameterError("need A* >= 0, R* > 0 and gamma > 0")
        self.s = tuple(float(v) for v in self.s)
        self.c_in = tuple(float(v) for v in self.c_in)
        if any(v < 0 for v in self.s) or any(v < 0 for v in self.c_in):
            raise ParameterError("source and initial data must be nonnegative")

    def r(self, k):
        return self.R_star * k**self.gamma

    def s_k(self, k):
        return self.s[k - 1] if k <= len(self.s) else 0.0

    def c_in_k(self, k):
        return self.c_in[k - 1] if k <= len(self.c_in) else 0.0

    def system(self, N):
        """The truncated system on sizes ``1..N`` for these parameters."""
        return CoagulationSystem(
            KernelModel.constant_monomer(self.A_star),
            RateModel.power_law(self.R_star, self.gamma),
            SourceModel.finite_support([(k + 1, v) for k, v in enumerate(self.s)]),
            N,
        )

    def initial_state(self, N):
        c = np.zeros(N)
        m = min(N, len(self.c_in))
        c[:m] = self.c_in[:m]
        return StateVector(c, 0.0)


@dataclass(frozen=True)
class RiccatiConstants:
    Q1_plus: float
    Q1_minus: float
    alpha_ric: float


def riccati_constants(p: ExampleParams) -> RiccatiConstants:
    """Roots of ``-A* Q^2 + s_1 - r_1 Q = 0`` and ``alpha_ric = 1/(Q+ - Q-)``."""
    if p.A_star == 0:
        raise ParameterError("the Riccati constants need A* > 0")
    A, r1, s1 = p.A_star, p.r(1), p.s_k(1)
    root = math.sqrt(r1**2 / A**2 + 4.0 * s1 / A)
    # Q+ written without cancellation: (root - r1/A)/2 = 2 s1 / (A (root + r1/A))
    q_plus = 2.0 * s1 / (A * (root + r1 / A))
    q_minus = -0.5 * root - r1 / (2.0 * A)
    return RiccatiConstants(q_plus, q_minus, 1.0 / root)


def exact_equilibrium(p: ExampleParams, N: int) -> np.ndarray:
    """Stationary state ``(Q_1, ..., Q_N)``."""
    Q = np.zeros(N)
    if N >= 1:
        Q[0] = riccati_constants(p).Q1_plus if p.A_star > 0 else p.s_k(1) / p.r(1)
    if N >= 2:
        Q[1] = p.A_star / (2.0 * p.r(2)) * Q[0] ** 2 + p.s_k(2) / p.r(2)
    for k in range(3, N + 1):
        Q[k - 1] = p.s_k(k) / p.r(k)
    return Q


def exact_c1(p: ExampleParams, t: float) -> float:
    """Closed-form monomer density at time ``t``."""
    if t < 0:
        raise ParameterError("t must be nonnegative")
    c0 = p.c_in_k(1)
    if p.A_star == 0:
        r1, s1 = p.r(1), p.s_k(1)
        return c0 * math.exp(-r1 * t) + s1 / r1 * (1.0 - math.exp(-r1 * t))
    rc = riccati_constants(p)
    q1, qm, a = rc.Q1_plus, rc.Q1_minus, rc.alpha_ric
    decay = math.exp(-p.A_star / a * t)
    num = (c0 - q1) / (a * (c0 - qm))
    den = 1.0 - (1.0 - 1.0 / (a * (c0 - qm))) * decay
    return q1 + num / den * decay


def exact_c2(p: ExampleParams, t: float, quadrature_tol: float = 1e-12) -> float:
    """Dimer density by variation of constants, integral by adaptive quadrature."""
    if t < 0:
        raise ParameterError("t must be nonnegative")
    r2, s2, c0 = p.r(2), p.s_k(2), p.c_in_k(2)
    linear = c0 * math.exp(-r2 * t) - s2 / r2 * math.expm1(-r2 * t)
    if p.A_star == 0 or t == 0:
        return linear
    val, err = integrate.quad(
        lambda u: 0.5 * p.A_star * exact_c1(p, u) ** 2 * math.exp(-r2 * (t - u)),
        0.0, t, epsabs=quadrature_tol, epsrel=quadrature_tol, limit=200)
    if err > max(quadrature_tol, quadrature_tol * abs(val)) * 10:
        raise ToleranceError(f"quadrature error estimate {err:.2e} exceeds tolerance")
    return linear + val


def exact_ck(p: ExampleParams, k: int, t: float) -> float:
    """Density of size ``k >= 3``: linear relaxation to ``s_k / r_k``."""
    if k < 3:
        raise ParameterError("exact_ck covers sizes k >= 3")
    if t < 0:
        raise ParameterError("t must be nonnegative")
    rk, sk = p.r(k), p.s_k(k)
    return p.c_in_k(k) * math.exp(-rk * t) - sk / rk * math.expm1(-rk * t)


def exact_state(p: ExampleParams, N: int, t: float) -> np.ndarray:
    out = np.empty(N)
    out[0] = exact_c1(p, t)
    if N >= 2:
        out[1] = exact_c2(p, t)
    for k in range(3, N + 1):
        out[k - 1] = exact_ck(p, k, t)
    return out


def example_decay_rate(p: ExampleParams) -> float:
    """``min{A*/(2 alpha_ric), r_2/2, 3^gamma R*/2}``."""
    if p.s_k(1) <= 0:
        raise ParameterError("the decay rate formula needs s_1 > 0")
    a = riccati_constants(p).alpha_ric
    return min(p.A_star / (2.0 * a), p.r(2) / 2.0, 3.0**p.gamma * p.R_star / 2.0)


@dataclass(frozen=True)
class GapDemo:
    contraction_bracket_lower: float
    bracket_at_equilibrium_lower: float
    observed_rate: float


def smallness_gap_demo(p: ExampleParams, mu: float = 1.0) -> GapDemo:
    """Contraction bracket lower bound versus the true exponential rate.

    For ``A* s_1 >= 4 R*^2`` the bracket ``2 A*(C_mu+2) sum l^{mu+beta}(c_l+Q_l) - R*``
    is at least ``(3 (C_mu + 2) - 1) R* > 0``, so the global contraction
    argument cannot apply, while the explicit solution still decays at
    :func:`example_decay_rate`. The intermediate bound
    ``(C_mu+2)(sqrt(r_1^2 + 4 A* s_1) - r_1) - R*`` is returned as well.
    """
    A, s1, R = p.A_star, p.s_k(1), p.R_star
    if A * s1 < 4.0 * R**2:
        raise ParameterError("the gap demonstration needs A* s_1 >= 4 R*^2")
    C = c_mu(mu)
    r1 = p.r(1)
    at_q = (C + 2.0) * (math.sqrt(r1**2 + 4.0 * A * s1) - r1) - R
    return GapDemo((3.0 * (C + 2.0) - 1.0) * R, at_q, example_decay_rate(p))
