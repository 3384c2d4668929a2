"""Coagulation kernels, removal rates and source terms.

Each model carries the structural constants used by the moment and
contraction estimates:

* a kernel is bounded by ``A* (k^alpha l^beta + k^beta l^alpha)``,
* removal rates satisfy ``r_k >= R* k^gamma``,
* sources have finite power moments ``sum_k k^mu s_k`` for every ``mu``.

Models are immutable after construction. Kernel tables for a given
truncation size are computed once and cached.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import mpmath
import numpy as np

from .errors import CertificationError, KernelIndexError, ParameterError

__all__ = [
    "KernelModel",
    "RateModel",
    "SourceModel",
    "EnvelopeCertificate",
    "evaluate_kernel",
    "evaluate_removal",
    "fit_envelope",
    "source_moment",
]

# full N x N tables above this size are not cached
_TABLE_CACHE_BYTES = 256 * 2**20


class KernelModel:
    """Symmetric coagulation kernel ``a_{k,l}`` with its growth envelope.

    Use the named constructors (:meth:`brownian`, :meth:`shear`,
    :meth:`product`, :meth:`constant_monomer`, :meth:`tabulated`) rather
    than calling the class directly.
    """

    def __init__(self, family, params, A_star, alpha, beta, table=None):
        if A_star < 0:
            raise ParameterError("envelope constant A* must be nonnegative")
        if not (0.0 <= alpha <= 1.0 and 0.0 <= beta <= 1.0):
            raise ParameterError("envelope exponents must lie in [0, 1]")
        if alpha > beta:
            raise ParameterError("envelope exponents must satisfy alpha <= beta")
        self.family = family
        self.params = dict(params)
        self.A_star = float(A_star)
        self.alpha = float(alpha)
        self.beta = float(beta)
        self._table = table
        self._cache = {}

    def __repr__(self):
        return (f"KernelModel({self.family!r}, {self.params}, A*={self.A_star:g}, "
                f"alpha={self.alpha:g}, beta={self.beta:g})")

    # -- constructors -----------------------------------------------------

    @classmethod
    def brownian(cls):
        """``(k^{1/3} + l^{1/3})(k^{-1/3} + l^{-1/3})``, envelope ``(2, 0, 1/3)``."""
        return cls("brownian", {}, 2.0, 0.0, 1.0 / 3.0)

    @classmethod
    def shear(cls):
        """``(k^{1/3} + l^{1/3})^3``, envelope ``(4, 0, 1)``."""
        return cls("shear", {}, 4.0, 0.0, 1.0)

    @classmethod
    def product(cls, a, b):
        """``k^a l^b + k^b l^a`` with envelope ``(1, min(a,b), max(a,b))``."""
        lo, hi = sorted((float(a), float(b)))
        return cls("product", {"a": float(a), "b": float(b)}, 1.0, lo, hi)

    @classmethod
    def constant_monomer(cls, A):
        """Only monomer-monomer collisions: ``a_{1,1} = A``, zero otherwise.

        The kernel vanishes off ``(1, 1)``, so ``A (k^alpha l^beta + k^beta l^alpha)``
        dominates it for every exponent pair. The envelope ``(A, 0, 1)`` is
        declared because it makes every moment order ``mu >= 1`` admissible.
        """
        return cls("constant-monomer", {"A": float(A)}, float(A), 0.0, 1.0)

    @classmethod
    def tabulated(cls, table, A_star, alpha, beta):
        """Kernel read from a square table; ``table[k-1, l-1] = a_{k,l}``.

        The table must be exactly symmetric and nonnegative, and an envelope
        must be declared. It is re-verified on construction.
        """
        arr = np.array(table, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ParameterError("tabulated kernel must be a square matrix")
        if not np.array_equal(arr, arr.T):
            raise ParameterError("tabulated kernel is not symmetric")
        if np.any(arr < 0) or not np.all(np.isfinite(arr)):
            raise ParameterError("tabulated kernel must be finite and nonnegative")
        arr.setflags(write=False)
        model = cls("tabulated", {"size": arr.shape[0]}, A_star, alpha, beta, table=arr)
        fit_envelope(model, arr.shape[0])
        return model

    # -- evaluation -------------------------------------------------------

    def _grid(self, k, l):
        k = np.asarray(k, dtype=float)
        l = np.asarray(l, dtype=float)
        fam = self.family
        if fam == "brownian":
            x, y = np.cbrt(k), np.cbrt(l)
            return (x + y) * (1.0 / x + 1.0 / y)
        if fam == "shear":
            return (np.cbrt(k) + np.cbrt(l)) ** 3
        if fam == "product":
            a, b = self.params["a"], self.params["b"]
            return k**a * l**b + k**b * l**a
        if fam == "constant-monomer":
            return np.where((k == 1) & (l == 1), self.params["A"], 0.0)
        if fam == "tabulated":
            size = self._table.shape[0]
            ki = k.astype(int)
            li = l.astype(int)
            if np.any(ki > size) or np.any(li > size):
                raise KernelIndexError(
                    f"tabulated kernel has size {size}; requested index up to "
                    f"{int(max(ki.max(initial=0), li.max(initial=0)))}")
            return self._table[ki - 1, li - 1]
        raise ParameterError(f"unknown kernel family {fam!r}")

    def evaluate(self, k, l):
        """Return ``a_{k,l}`` for sizes ``k, l >= 1``."""
        if k < 1 or l < 1:
            raise ParameterError("cluster sizes must be positive integers")
        return float(self._grid(k, l))

    def table(self, N):
        """Return the read-only ``N x N`` array with entries ``a_{i+1, j+1}``."""
        if N in self._cache:
            return self._cache[N]
        sizes = np.arange(1, N + 1, dtype=float)
        tab = np.array(self._grid(sizes[:, None], sizes[None, :]), dtype=float)
        tab.setflags(write=False)
        if tab.nbytes <= _TABLE_CACHE_BYTES:
            self._cache[N] = tab
        return tab

    def envelope(self, k, l):
        """``A* (k^alpha l^beta + k^beta l^alpha)``."""
        k = np.asarray(k, dtype=float)
        l = np.asarray(l, dtype=float)
        a, b = self.alpha, self.beta
        return self.A_star * (k**a * l**b + k**b * l**a)


class RateModel:
    """Removal rates ``r_k`` bounded below by ``R* k^gamma``."""

    def __init__(self, family, params, R_star, gamma, values=None):
        if R_star <= 0:
            raise ParameterError("R* must be positive")
        self.family = family
        self.params = dict(params)
        self.R_star = float(R_star)
        self.gamma = float(gamma)
        self._values = values

    def __repr__(self):
        return f"RateModel({self.family!r}, {self.params}, R*={self.R_star:g}, gamma={self.gamma:g})"

    @classmethod
    def power_law(cls, R, gamma):
        """``r_k = R k^gamma``."""
        return cls("power-law", {"R": float(R), "gamma": float(gamma)}, R, gamma)

    @classmethod
    def li_chen(cls, C):
        """Sedimentation rate ``C k^{2/3} [1 + (0.084 + 0.0264 exp(-16.7 k^{1/3})) / k^{1/3}]``."""
        return cls("li-chen", {"C": float(C)}, C, 2.0 / 3.0)

    @classmethod
    def tabulated(cls, values, R_star, gamma):
        vals = np.array(values, dtype=float)
        vals.setflags(write=False)
        if vals.ndim != 1 or vals.size == 0:
            raise ParameterError("tabulated removal rates must be a nonempty vector")
        model = cls("tabulated", {"size": vals.size}, R_star, gamma, values=vals)
        k = np.arange(1, vals.size + 1, dtype=float)
        bad = np.nonzero(vals < R_star * k**gamma)[0]
        if bad.size:
            raise CertificationError(
                f"removal rate below R* k^gamma at k={bad[0] + 1}", k=int(bad[0] + 1))
        return model

    def _grid(self, k):
        k = np.asarray(k, dtype=float)
        if self.family == "power-law":
            return self.params["R"] * k ** self.params["gamma"]
        if self.family == "li-chen":
            x = np.cbrt(k)
            return self.params["C"] * x * x * (1.0 + (0.084 + 0.0264 * np.exp(-16.7 * x)) / x)
        if self.family == "tabulated":
            ki = k.astype(int)
            if np.any(ki > self._values.size):
                raise KernelIndexError(
                    f"tabulated removal has size {self._values.size}; requested {int(ki.max())}")
            return self._values[ki - 1]
        raise ParameterError(f"unknown removal family {self.family!r}")

    def evaluate(self, k):
        if k < 1:
            raise ParameterError("cluster size must be a positive integer")
        return float(self._grid(k))

    def array(self, N):
        """Rates ``(r_1, ..., r_N)``."""
        return np.array(self._grid(np.arange(1, N + 1)), dtype=float)


class SourceModel:
    """Injection rates ``s_k``, constant in time."""

    def __init__(self, family, params):
        self.family = family
        self.params = params

    def __repr__(self):
        return f"SourceModel({self.family!r}, {self.params})"

    @classmethod
    def monomer(cls, s1):
        if s1 < 0:
            raise ParameterError("source rates must be nonnegative")
        return cls("monomer-only", {"s1": float(s1)})

    @classmethod
    def finite_support(cls, entries: Iterable[Sequence[float]]):
        """Source from ``(k, s_k)`` pairs; repeated sizes are added."""
        acc = {}
        for k, val in entries:
            if int(k) != k or k < 1:
                raise ParameterError(f"source size {k!r} is not a positive integer")
            if val < 0:
                raise ParameterError("source rates must be nonnegative")
            acc[int(k)] = acc.get(int(k), 0.0) + float(val)
        return cls("finite-support", {"entries": sorted(acc.items())})

    @classmethod
    def geometric(cls, s1, ratio):
        """``s_k = s1 * ratio^(k-1)`` with ``0 <= ratio < 1``."""
        if s1 < 0 or not 0.0 <= ratio < 1.0:
            raise ParameterError("geometric source needs s1 >= 0 and 0 <= ratio < 1")
        return cls("geometric-decay", {"s1": float(s1), "ratio": float(ratio)})

    def array(self, N):
        """Rates ``(s_1, ..., s_N)``; mass injected above ``N`` is dropped."""
        out = np.zeros(N)
        if self.family == "monomer-only":
            if N >= 1:
                out[0] = self.params["s1"]
        elif self.family == "finite-support":
            for k, val in self.params["entries"]:
                if k <= N:
                    out[k - 1] = val
        elif self.family == "geometric-decay":
            out[:] = self.params["s1"] * self.params["ratio"] ** np.arange(N)
        return out

    def is_zero(self):
        if self.family == "finite-support":
            return all(v == 0 for _, v in self.params["entries"])
        return self.params["s1"] == 0

    def moment(self, mu):
        """``sum_k k^mu s_k`` over the untruncated source."""
        if mu < 0:
            raise ParameterError("moment order must be nonnegative")
        if self.family == "monomer-only":
            return self.params["s1"]
        if self.family == "finite-support":
            return math.fsum(k**mu * v for k, v in self.params["entries"])
        s1, q = self.params["s1"], self.params["ratio"]
        if s1 == 0:
            return 0.0
        if q == 0:
            return s1
        # sum_k k^mu q^(k-1) = Li_{-mu}(q) / q
        return float(s1 * mpmath.polylog(-mu, q) / q)

    def scaled_moment(self, mu, R_star):
        """``s_hat_mu = (sum_k k^mu s_k) / R*``."""
        return self.moment(mu) / R_star


@dataclass(frozen=True)
class EnvelopeCertificate:
    A_star: float
    alpha: float
    beta: float
    max_ratio: float
    argmax: tuple
    k_max: int


def evaluate_kernel(model: KernelModel, k: int, l: int) -> float:
    return model.evaluate(k, l)


def evaluate_removal(model: RateModel, k: int) -> float:
    return model.evaluate(k)


def source_moment(model: SourceModel, mu: float) -> float:
    return model.moment(mu)


def fit_envelope(model: KernelModel, k_max: int) -> EnvelopeCertificate:
    """Scan ``1 <= k, l <= k_max`` and verify the declared growth envelope.

    Returns the declared constants and the largest observed ratio
    ``a_{k,l} / (k^alpha l^beta + k^beta l^alpha)``, which must not
    exceed ``A*``.

    Raises
    ------
    CertificationError
        If some ``a_{k,l}`` exceeds the envelope; the offending pair is
        attached as ``err.k, err.l``.
    """
    if k_max < 2:
        raise ParameterError("k_max must be at least 2")
    tab = model.table(k_max)
    sizes = np.arange(1, k_max + 1, dtype=float)
    base = model.envelope(sizes[:, None], sizes[None, :]) / max(model.A_star, 1e-300)
    ratio = tab / base
    idx = np.unravel_index(int(np.argmax(ratio)), ratio.shape)
    max_ratio = float(ratio[idx])
    k, l = int(idx[0]) + 1, int(idx[1]) + 1
    # relative slack for roundoff in the envelope powers
    if max_ratio > model.A_star * (1.0 + 1e-12):
        raise CertificationError(
            f"kernel exceeds envelope A*={model.A_star:g} at (k={k}, l={l}): "
            f"ratio {max_ratio:.6g}", k=k, l=l)
    return EnvelopeCertificate(model.A_star, model.alpha, model.beta, max_ratio, (k, l), k_max)
