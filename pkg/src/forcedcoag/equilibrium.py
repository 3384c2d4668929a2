"""Stationary states of the truncated system and convergence towards them."""
from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .contraction import pairwise_distance
from .errors import ConvergenceError, DimensionError, InsufficientDataError, ParameterError
from .truncated import CoagulationSystem, IntegratorConfig, StateVector, Trajectory, integrate

__all__ = [
    "EquilibriumResult",
    "ConvergenceReport",
    "fixed_point_sweep",
    "stationary_residual",
    "solve_equilibrium",
    "convergence_analysis",
    "stationarity_drift",
]

logger = logging.getLogger(__name__)


@dataclass
class EquilibriumResult:
    Q: StateVector
    residual: float
    iterations: int
    method: str
    history: list = field(default_factory=list, repr=False)


def stationary_residual(system: CoagulationSystem, Q) -> float:
    """Max-norm of the right-hand side at ``Q``."""
    c = np.asarray(getattr(Q, "c", Q), dtype=float)
    return float(np.max(np.abs(system.rhs(c)))) if c.size else 0.0


def fixed_point_sweep(system: CoagulationSystem, Q, damping: float = 0.8) -> StateVector:
    """One ascending Gauss-Seidel sweep of the stationary equations.

    Each component is replaced by a damped version of
    ``(1/2 sum_{l<k} a_{k-l,l} Q_{k-l} Q_l + s_k) / (r_k + sum_{l<=N-k} a_{k,l} Q_l)``
    using the components already updated in this sweep.
    """
    if not 0.0 < damping <= 1.0:
        raise ParameterError("damping must lie in (0, 1]")
    q = np.array(getattr(Q, "c", Q), dtype=float)
    if q.size != system.N:
        raise DimensionError(f"state has {q.size} components, system has N={system.N}")
    a, r, s = system.a, system.r, system.s
    for i in range(system.N):
        # size k = i + 1; gain from pairs (j+1, i-j) with j = 0..i-1
        if i >= 1:
            gain = 0.5 * np.dot(a[np.arange(i), i - 1 - np.arange(i)] * q[:i], q[i - 1::-1])
        else:
            gain = 0.0
        denom = r[i] + np.dot(a[i], q)
        q[i] = (1.0 - damping) * q[i] + damping * (gain + s[i]) / denom
    return StateVector(q, 0.0)


def _sweep_solve(system, q0, tol, max_iter, damping):
    q = StateVector(q0, 0.0)
    history = []
    for it in range(1, max_iter + 1):
        q = fixed_point_sweep(system, q, damping)
        res = stationary_residual(system, q)
        history.append(res)
        if not np.isfinite(res):
            break
        if res <= tol:
            return q, res, it, history
    return q, history[-1] if history else math.inf, max_iter, history


def solve_equilibrium(system: CoagulationSystem, tol: float = 1e-10, max_iter: int = 10_000,
                      damping: float = 0.8, initial=None) -> EquilibriumResult:
    """Solve ``rhs(Q) = 0`` for a nonnegative ``Q``.

    Damped sweeps are tried first. If they stall, the system is integrated
    from the current iterate up to ``t = 50 / R*`` and sweeps are resumed
    from there.

    Raises
    ------
    ConvergenceError
        If neither route reaches ``tol``; the residual history is attached.
    """
    if tol <= 0:
        raise ParameterError("tol must be positive")
    N = system.N
    if system.source.is_zero() and initial is None:
        return EquilibriumResult(StateVector.zeros(N), 0.0, 0, "sweep")
    q0 = np.zeros(N) if initial is None else np.array(getattr(initial, "c", initial), dtype=float)
    q, res, it, hist = _sweep_solve(system, q0, tol, max_iter, damping)
    if res <= tol:
        return EquilibriumResult(q, res, it, "sweep", hist)

    logger.info("sweep stalled at residual %.3e, falling back to integration", res)
    start = q.c if np.all(np.isfinite(q.c)) else q0
    t_end = 50.0 / system.removal.R_star
    try:
        traj = integrate(system, StateVector(np.maximum(start, 0.0), 0.0),
                         IntegratorConfig(t_end, rel_tol=1e-10, abs_tol=1e-14))
    except Exception as exc:  # noqa: BLE001 - reported with history
        raise ConvergenceError(f"long-time integration failed: {exc}", hist) from exc
    q2, res2, it2, hist2 = _sweep_solve(system, traj.samples[-1].c, tol, max_iter, damping)
    hist = hist + hist2
    if res2 <= tol:
        return EquilibriumResult(q2, res2, it + it2, "long-time-integration", hist)
    raise ConvergenceError(
        f"equilibrium residual {res2:.3e} above tolerance {tol:.1e}", hist)


@dataclass
class ConvergenceReport:
    times: list
    distances: list
    fitted_rate: float
    intercept: float
    r_squared: float
    window: tuple
    theoretical_kappa: Optional[float] = None

    def to_json(self, **kw):
        return json.dumps(asdict(self), **kw)


def convergence_analysis(traj: Trajectory, Q, mu: float = 1.0, tail_fraction: float = 0.5,
                         window=None, theoretical_kappa=None) -> ConvergenceReport:
    """Fit ``log ||c(t) - Q||_mu`` against ``t`` on the tail of a trajectory.

    Uses the last ``tail_fraction`` of samples, or the samples inside
    ``window = (t_lo, t_hi)`` when given. Points whose distance lies within
    ``100 eps`` of zero relative to the largest distance are dropped. A
    positive ``fitted_rate`` means decay.
    """
    if not 0.0 < tail_fraction < 1.0:
        raise ParameterError("tail_fraction must lie in (0, 1)")
    times = traj.times
    dist = np.array([pairwise_distance(s.c, Q, mu) for s in traj.samples])
    if window is not None:
        sel = (times >= window[0]) & (times <= window[1])
    else:
        n_tail = max(1, int(round(tail_fraction * len(times))))
        sel = np.zeros(len(times), dtype=bool)
        sel[len(times) - n_tail:] = True
    scale = float(np.max(dist)) if dist.size else 0.0
    usable = sel & (dist > 100.0 * np.finfo(float).eps * max(scale, 1e-300))
    if np.count_nonzero(usable) < 4:
        raise InsufficientDataError("fewer than 4 usable samples in the fitting window")
    tt, ld = times[usable], np.log(dist[usable])
    slope, intercept = np.polyfit(tt, ld, 1)
    pred = slope * tt + intercept
    ss_res = float(np.sum((ld - pred) ** 2))
    ss_tot = float(np.sum((ld - ld.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return ConvergenceReport(
        times=times.tolist(), distances=dist.tolist(), fitted_rate=float(-slope),
        intercept=float(intercept), r_squared=r2, window=(float(tt[0]), float(tt[-1])),
        theoretical_kappa=theoretical_kappa)


def stationarity_drift(traj: Trajectory, mu: float = 1.0):
    """``(t, sum_k k^mu |rhs_k(c(t))|)`` for each sample."""
    if len(traj) < 2:
        raise InsufficientDataError("need at least two samples")
    k = traj.system.sizes
    return [(s.t, math.fsum(k**mu * np.abs(traj.system.rhs(s.c)))) for s in traj.samples]
