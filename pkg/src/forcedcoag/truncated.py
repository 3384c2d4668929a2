"""Truncated coagulation system on sizes ``1..N`` and its time integration.

The right-hand side is

    dc_k/dt = 1/2 sum_{l<k} a_{k-l,l} c_{k-l} c_l - c_k sum_{l<=N-k} a_{k,l} c_l + s_k - r_k c_k

for ``k <= N``. Collisions that would produce a cluster larger than ``N``
are switched off entirely, so coagulation conserves ``sum_k k c_k`` and
only the source and removal terms change the mass.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DimensionError, ParameterError, StiffnessError
from .kernels import KernelModel, RateModel, SourceModel

__all__ = [
    "CoagulationSystem",
    "StateVector",
    "IntegratorConfig",
    "Trajectory",
    "rhs",
    "integrate",
    "weak_form_residual",
]


class CoagulationSystem:
    """Kernel, removal and source models bound to a truncation size ``N``."""

    def __init__(self, kernel: KernelModel, removal: RateModel, source: SourceModel, N: int):
        if N < 1:
            raise ParameterError("truncation size must be positive")
        self.kernel = kernel
        self.removal = removal
        self.source = source
        self.N = int(N)
        self.sizes = np.arange(1, N + 1, dtype=float)
        self.r = removal.array(N)
        self.s = source.array(N)
        i = np.arange(N)
        # a_{k,l} with k + l <= N, zero otherwise
        allowed = (i[:, None] + i[None, :] + 2) <= N
        self.a = np.where(allowed, kernel.table(N), 0.0)
        # product size minus one, used to bin the gain term
        self._gain_bin = (i[:, None] + i[None, :] + 1)[allowed]
        self._allowed = allowed

    def __repr__(self):
        return f"CoagulationSystem(N={self.N}, {self.kernel!r}, {self.removal!r}, {self.source!r})"

    def gain_loss(self, c):
        """Return the coagulation gain and loss vectors separately."""
        pair = self.a * np.outer(c, c)
        gain = 0.5 * np.bincount(self._gain_bin, weights=pair[self._allowed], minlength=self.N)
        loss = c * (self.a @ c)
        return gain, loss

    def rhs(self, c):
        gain, loss = self.gain_loss(c)
        return gain - loss + self.s - self.r * c

    def loss_rate(self, c):
        """Per-component linear decay rate ``r_k + sum_l a_{k,l} c_l``."""
        return self.r + self.a @ c


@dataclass
class StateVector:
    """Concentrations ``c = (c_1, ..., c_N)`` at time ``t``."""

    c: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.c = np.array(self.c, dtype=float)
        if self.c.ndim != 1:
            raise ParameterError("state must be a one-dimensional array")
        if np.any(self.c < 0) or not np.all(np.isfinite(self.c)):
            raise ParameterError("concentrations must be finite and nonnegative")
        if self.t < 0:
            raise ParameterError("time must be nonnegative")

    @property
    def N(self):
        return self.c.size

    @classmethod
    def zeros(cls, N, t=0.0):
        return cls(np.zeros(N), t)

    @classmethod
    def monomers(cls, N, mass, t=0.0):
        c = np.zeros(N)
        c[0] = mass
        return cls(c, t)


@dataclass
class IntegratorConfig:
    t_end: float
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_step: float = math.inf
    negativity_floor: float = 1e-14
    sample_times: Optional[Sequence[float]] = None

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ParameterError("tolerances must be positive")
        if self.t_end <= 0:
            raise ParameterError("t_end must be positive")
        if self.max_step <= 0 or self.negativity_floor <= 0:
            raise ParameterError("max_step and negativity_floor must be positive")
        if self.sample_times is None:
            self.sample_times = [self.t_end]
        ts = np.asarray(self.sample_times, dtype=float)
        if ts.size == 0 or np.any(np.diff(ts) <= 0):
            raise ParameterError("sample_times must be nonempty and strictly increasing")
        if ts[0] < 0 or ts[-1] > self.t_end:
            raise ParameterError("sample_times must lie in [0, t_end]")
        self.sample_times = [float(t) for t in ts]


@dataclass
class Trajectory:
    system: CoagulationSystem
    samples: list = field(default_factory=list)
    accepted: int = 0
    rejected: int = 0

    @property
    def times(self):
        return np.array([s.t for s in self.samples])

    @property
    def values(self):
        """Array of shape ``(n_samples, N)``."""
        return np.array([s.c for s in self.samples])

    def __len__(self):
        return len(self.samples)


def rhs(system: CoagulationSystem, state) -> np.ndarray:
    """Time derivative of the truncated system at ``state``."""
    c = state.c if isinstance(state, StateVector) else np.asarray(state, dtype=float)
    if c.size != system.N:
        raise DimensionError(f"state has {c.size} components, system has N={system.N}")
    return system.rhs(c)


def weak_form_residual(system: CoagulationSystem, state, phi, relative=False) -> float:
    """Discrepancy between ``sum_k phi_k rhs_k`` and the symmetric weak form.

    The weak form is
    ``1/2 sum_{k+l<=N} a_{k,l} c_k c_l (phi_{k+l} - phi_k - phi_l)
    + sum_k phi_k s_k - sum_k phi_k r_k c_k``.
    With ``relative=True`` the residual is divided by the sum of absolute
    values of all terms entering either side.
    """
    c = state.c if isinstance(state, StateVector) else np.asarray(state, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if phi.size != system.N or c.size != system.N:
        raise DimensionError("phi and state must have N components")
    N = system.N
    direct = np.dot(phi, system.rhs(c))
    pair = system.a * np.outer(c, c)
    i = np.arange(N)
    phi_sum = np.zeros((N, N))
    sum_idx = i[:, None] + i[None, :] + 1
    allowed = system._allowed
    phi_sum[allowed] = phi[sum_idx[allowed]]
    jump = phi_sum - phi[:, None] - phi[None, :]
    weak = 0.5 * np.sum(pair * jump) + np.dot(phi, system.s) - np.dot(phi, system.r * c)
    res = abs(direct - weak)
    if relative:
        scale = (0.5 * np.sum(np.abs(pair * jump)) + np.sum(np.abs(phi * system.s))
                 + np.sum(np.abs(phi * system.r * c)))
        return res / scale if scale > 0 else res
    return res


# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B = np.array(_A[6] + [0.0])
_B_LOW = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B - _B_LOW

_SAFETY = 0.9
_FAC_MIN = 0.2
_FAC_MAX = 5.0
# PI controller exponents for a 5th order pair
_EXP_I = 0.7 / 5
_EXP_P = 0.4 / 5


def _dp_step(f, y, fy, h):
    k = np.empty((7, y.size))
    k[0] = fy
    for s in range(1, 7):
        k[s] = f(y + h * np.dot(_A[s], k[:s]))
    y_new = y + h * np.dot(_B[:6], k[:6])
    err = h * np.dot(_E, k)
    return y_new, err, k[6]


def _initial_step(f, y, fy, rtol, atol):
    scale = atol + rtol * np.abs(y)
    d0 = np.sqrt(np.mean((y / scale) ** 2))
    d1 = np.sqrt(np.mean((fy / scale) ** 2))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    y1 = y + h0 * fy
    d2 = np.sqrt(np.mean(((f(y1) - fy) / scale) ** 2)) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / 5)
    return min(100 * h0, h1)


def integrate(system: CoagulationSystem, initial: StateVector, cfg: IntegratorConfig) -> Trajectory:
    """Integrate the truncated system with an adaptive Dormand-Prince 5(4) pair.

    Steps land exactly on each requested sample time. After every accepted
    step, components in ``(-negativity_floor, 0)`` are set to zero; a
    component at or below ``-negativity_floor`` rejects the step and halves it.

    Raises
    ------
    StiffnessError
        If the step size drops below ``1e-14 * t_end``.
    """
    if initial.N != system.N:
        raise DimensionError(f"initial state has N={initial.N}, system has N={system.N}")
    t = float(initial.t)
    if cfg.sample_times[0] < t:
        raise ParameterError("sample times precede the initial time")
    f = system.rhs
    y = initial.c.copy()
    fy = f(y)
    traj = Trajectory(system)
    pending = list(cfg.sample_times)
    while pending and pending[0] == t:
        traj.samples.append(StateVector(y.copy(), t))
        pending.pop(0)
    if not pending:
        return traj

    rtol, atol, floor = cfg.rel_tol, cfg.abs_tol, cfg.negativity_floor
    h_min = 1e-14 * cfg.t_end
    h = min(_initial_step(f, y, fy, rtol, atol), cfg.max_step)
    err_prev = 1e-4

    while pending:
        target = pending[0]
        hits = False
        h_try = min(h, cfg.max_step)
        if t + h_try >= target * (1 - 1e-15) or target - t - h_try < h_min:
            h_try = target - t
            hits = True
        if h_try < h_min:
            # an exact hit can legitimately be tiny only if the gap is tiny
            if not hits or h_try <= 0:
                comp = int(np.argmax(system.loss_rate(np.maximum(y, 0.0))))
                raise StiffnessError(
                    f"step size {h_try:.3e} underflowed at t={t:.6g} "
                    f"(stiffest component k={comp + 1})", t, comp + 1)
        y_new, err_vec, f_new = _dp_step(f, y, fy, h_try)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err = float(np.sqrt(np.mean((err_vec / scale) ** 2)))
        if not np.isfinite(err):
            err = math.inf

        if err > 1.0 or np.any(y_new <= -floor):
            traj.rejected += 1
            if err > 1.0 and np.isfinite(err):
                fac = max(_FAC_MIN, _SAFETY * err ** (-1 / 5))
            else:
                fac = 0.5
            if np.any(y_new <= -floor):
                fac = min(fac, 0.5)
            h = h_try * fac
            if h < h_min:
                comp = int(np.argmax(system.loss_rate(np.maximum(y, 0.0))))
                raise StiffnessError(
                    f"step size {h:.3e} underflowed at t={t:.6g} "
                    f"(stiffest component k={comp + 1})", t, comp + 1)
            continue

        traj.accepted += 1
        t = target if hits else t + h_try
        negative = y_new < 0
        if np.any(negative):
            y_new[negative] = 0.0
            f_new = f(y_new)
        y, fy = y_new, f_new
        err = max(err, 1e-10)
        fac = _SAFETY * err ** (-_EXP_I) * err_prev ** _EXP_P
        fac = min(_FAC_MAX, max(_FAC_MIN, fac))
        h_next = h_try * fac
        err_prev = err
        if hits:
            traj.samples.append(StateVector(y.copy(), t))
            pending.pop(0)
            # a clipped step says little about the natural step size
            h = max(h, h_next)
        else:
            h = h_next
    return traj
