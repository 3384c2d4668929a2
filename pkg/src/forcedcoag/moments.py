"""Moments of size distributions and their a-priori bounds.

All bounds are stated in terms of the structural constants of the models:
the kernel envelope ``(A*, alpha, beta)``, the removal lower bound
``(R*, gamma)`` and the source moments ``sum_k k^mu s_k``. Hatted
quantities are divided by ``R*``.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .contraction import holder_exponents
from .errors import ParameterError
from .kernels import KernelModel, RateModel, SourceModel

__all__ = [
    "moment",
    "Coefficients",
    "GronwallBound",
    "gronwall_bound",
    "total_mass_bound",
    "total_mass_entry_time",
    "general_moment_bound",
    "large_time_moment_bounds",
    "large_time_entry_times",
    "MomentEntry",
    "MomentReport",
    "audit_trajectory",
    "write_moment_reports",
]

_SLACK_MASS = 1e-8
_SLACK_GENERAL = 1e-6


def moment(state, mu: float) -> float:
    """``sum_k k^mu c_k`` with compensated summation."""
    if mu < 0:
        raise ParameterError("moment order must be nonnegative")
    c = np.asarray(getattr(state, "c", state), dtype=float)
    k = np.arange(1, c.size + 1, dtype=float)
    return math.fsum(k**mu * c)


@dataclass(frozen=True)
class Coefficients:
    """Structural constants of a configuration."""

    alpha: float
    beta: float
    gamma: float
    A_star: float
    R_star: float
    source: SourceModel

    @classmethod
    def from_models(cls, kernel: KernelModel, removal: RateModel, source: SourceModel):
        return cls(kernel.alpha, kernel.beta, removal.gamma, kernel.A_star, removal.R_star, source)

    @property
    def A_hat(self):
        return self.A_star / self.R_star

    def s_frak(self, mu):
        return self.source.moment(mu)

    def s_hat(self, mu):
        return self.source.moment(mu) / self.R_star

    def check(self):
        """Return a list of violated structural assumptions (empty if none)."""
        problems = []
        if not (0 <= self.alpha <= self.beta <= 1):
            problems.append("kernel envelope needs 0 <= alpha <= beta <= 1")
        if self.A_star < 0:
            problems.append("kernel envelope needs A* >= 0")
        if not self.R_star > 0:
            problems.append("removal needs R* > 0")
        if not self.gamma > max(0.0, self.alpha + self.beta - 1.0):
            problems.append(
                f"removal exponent gamma={self.gamma:g} must exceed "
                f"max(0, alpha + beta - 1) = {max(0.0, self.alpha + self.beta - 1.0):g}")
        if not self.s_hat(1) > 0:
            problems.append("bounds need a nonzero source (s_hat_1 > 0)")
        return problems

    def admissible(self, mu):
        """Whether the higher-moment bounds apply at order ``mu``."""
        return mu > max(2.0 - self.alpha - self.beta, 1.0)


@dataclass(frozen=True)
class GronwallBound:
    """Data of ``f' + Lambda f^(1+rho) <= Xi`` for ``t > t0``."""

    rho: float
    Lambda: float
    Xi: float
    t0: float = 0.0

    def __post_init__(self):
        if self.rho <= 0 or self.Lambda <= 0 or self.Xi < 0:
            raise ParameterError("need rho > 0, Lambda > 0 and Xi >= 0")

    @property
    def plateau(self):
        return (2.0 * self.Xi / self.Lambda) ** (1.0 / (1.0 + self.rho))


def gronwall_bound(b: GronwallBound, t: float) -> float:
    """``max{(2 Xi/Lambda)^(1/(1+rho)), (2/(rho Lambda))^(1/rho) (t-t0)^(-1/rho)}``."""
    if t <= b.t0:
        raise ParameterError("the bound is only defined for t > t0")
    if math.isinf(t):
        return b.plateau
    transient = (2.0 / (b.rho * b.Lambda)) ** (1.0 / b.rho) * (t - b.t0) ** (-1.0 / b.rho)
    return max(b.plateau, transient)


def total_mass_bound(m1_in: float, s_hat_1: float) -> float:
    """Uniform bound ``max{m1_in, s_hat_1}`` on the first moment."""
    if s_hat_1 <= 0:
        raise ParameterError("s_hat_1 must be positive")
    return max(m1_in, s_hat_1)


def total_mass_entry_time(m1_in: float, s_hat_1: float, R_star: float) -> float:
    """Time after which ``m1(t) <= 2 s_hat_1``.

    From ``m1(t) <= (m1_in - s_hat_1) e^{-R* t} + s_hat_1`` this is
    ``max{0, log(m1_in / s_hat_1 - 1) / R*}``.
    """
    if s_hat_1 <= 0 or R_star <= 0:
        raise ParameterError("s_hat_1 and R* must be positive")
    if m1_in <= 2.0 * s_hat_1:
        return 0.0
    return math.log(m1_in / s_hat_1 - 1.0) / R_star


def _check_order(mu, coef):
    if not coef.admissible(mu):
        raise ParameterError(
            f"moment order mu={mu:g} must exceed max(2 - alpha - beta, 1) = "
            f"{max(2.0 - coef.alpha - coef.beta, 1.0):g}")
    if not coef.gamma > max(0.0, coef.alpha + coef.beta - 1.0):
        raise ParameterError("gamma must exceed max(0, alpha + beta - 1)")


def general_gronwall_data(mu: float, coef: Coefficients, m1_in: float) -> GronwallBound:
    """``Xi`` and ``Lambda`` for the order-``mu`` moment from time zero."""
    _check_order(mu, coef)
    p, q, rho = holder_exponents(mu, coef.alpha, coef.beta, coef.gamma)
    M = total_mass_bound(m1_in, coef.s_hat(1))
    R, A = coef.R_star, coef.A_star
    Xi = ((2.0 ** (mu - 1.0) * mu) ** p * q ** (1.0 - p) / (2.0 * p)
          * R ** (1.0 - p) * A**p * M ** (1.0 + p) + coef.s_frak(mu))
    Lam = 0.5 * R * M ** (-rho)
    return GronwallBound(rho, Lam, Xi, 0.0)


def general_moment_bound(mu: float, coef: Coefficients, m1_in: float, t: float) -> float:
    """Bound on ``m_mu(t)`` valid for every ``t > 0`` and any initial data of mass ``m1_in``."""
    return gronwall_bound(general_gronwall_data(mu, coef, m1_in), t)


def large_time_moment_bounds(mu: float, coef: Coefficients):
    """The two initial-data free bounds on ``m_mu`` valid for large times."""
    _check_order(mu, coef)
    p, q, rho = holder_exponents(mu, coef.alpha, coef.beta, coef.gamma)
    s1, smu, Ah = coef.s_hat(1), coef.s_hat(mu), coef.A_hat
    lead = (2.0**mu * mu) ** p * q ** (1.0 - p) / p * Ah**p
    first = 2.0 * (2.0 ** (2.0 + rho) * lead * s1 ** (1.0 + p + rho)
                   + 2.0 ** (2.0 + rho) * smu * s1**rho) ** (1.0 / (1.0 + rho))
    second = 4.0 * (lead * s1 ** (1.0 + p) + smu)
    return first, second


def large_time_entry_times(mu: float, coef: Coefficients, m1_in: float, T1=None):
    """Times ``(T1, T2, T3)`` after which the large-time bounds are guaranteed.

    ``T1`` is the total mass entry time, computed from ``m1_in`` unless an
    observed time after which ``m1 <= 2 s_hat_1`` is passed in. After ``T2`` the Gronwall transient
    ``2 (4/(R* rho))^(1/rho) s_hat_1 (t - T1)^(-1/rho)`` is below half the
    first bound, so the first bound holds. After ``T3`` the linear
    relaxation at rate ``R*/2`` from ``T2`` brings the moment below the
    second bound.
    """
    _check_order(mu, coef)
    p, q, rho = holder_exponents(mu, coef.alpha, coef.beta, coef.gamma)
    s1, R = coef.s_hat(1), coef.R_star
    first, second = large_time_moment_bounds(mu, coef)
    if T1 is None:
        T1 = total_mass_entry_time(m1_in, s1, R)
    T2 = T1 + (4.0 * s1 / first) ** rho * 4.0 / (R * rho)
    T3 = T2 + max(0.0, 2.0 / R * math.log(2.0 * first / second))
    return T1, T2, T3


@dataclass
class MomentEntry:
    mu: float
    value: float
    bound_total_mass: Optional[float] = None
    bound_general: Optional[float] = None
    bound_large_time: Optional[float] = None
    ok_total_mass: Optional[bool] = None
    ok_general: Optional[bool] = None
    ok_large_time: Optional[bool] = None

    @property
    def ok(self):
        return all(v is not False for v in (self.ok_total_mass, self.ok_general, self.ok_large_time))


@dataclass
class MomentReport:
    t: float
    entries: list = field(default_factory=list)

    @property
    def ok(self):
        return all(e.ok for e in self.entries)


def audit_trajectory(traj, mus: Sequence[float], coef: Coefficients,
                     m1_in: Optional[float] = None, large_time_after: Optional[float] = None):
    """Compare moments along a trajectory with every applicable bound.

    The total mass bound is checked for ``mu <= 1`` (moments are ordered in
    ``mu``), tightened to ``2 s_hat_1`` after the entry time. The general
    bound is checked at ``t > 0`` for admissible ``mu``. Large-time bounds
    are reported everywhere but enforced only for ``t >= large_time_after``.
    """
    if m1_in is None:
        m1_in = moment(traj.samples[0], 1.0) if traj.samples else 0.0
    usable = not coef.check()
    if usable:
        s1 = coef.s_hat(1)
        t_entry = total_mass_entry_time(m1_in, s1, coef.R_star)
        gdata = {mu: general_gronwall_data(mu, coef, m1_in) for mu in mus if coef.admissible(mu)}
        large = {mu: min(large_time_moment_bounds(mu, coef)) for mu in gdata}
    reports = []
    for sample in traj.samples:
        rep = MomentReport(sample.t)
        for mu in mus:
            e = MomentEntry(mu, moment(sample, mu))
            if usable:
                if mu <= 1:
                    bound = total_mass_bound(m1_in, s1)
                    if sample.t >= t_entry:
                        bound = min(bound, 2.0 * s1)
                    e.bound_total_mass = bound
                    e.ok_total_mass = e.value <= bound * (1 + _SLACK_MASS)
                if mu in gdata:
                    if sample.t > 0:
                        e.bound_general = gronwall_bound(gdata[mu], sample.t)
                        e.ok_general = e.value <= e.bound_general * (1 + _SLACK_GENERAL)
                    e.bound_large_time = large[mu]
                    if large_time_after is not None and sample.t >= large_time_after:
                        e.ok_large_time = e.value <= large[mu] * (1 + _SLACK_GENERAL)
            rep.entries.append(e)
        reports.append(rep)
    return reports


def _fmt(v):
    return "" if v is None else "%.17g" % float(v)


def write_moment_reports(path, reports):
    """CSV with columns ``t,mu,value,bound_total_mass,bound_general,bound_large_time,ok``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "mu", "value", "bound_total_mass", "bound_general", "bound_large_time", "ok"])
        for rep in reports:
            for e in rep.entries:
                w.writerow([_fmt(rep.t), _fmt(e.mu), _fmt(e.value), _fmt(e.bound_total_mass),
                            _fmt(e.bound_general), _fmt(e.bound_large_time), int(e.ok)])
