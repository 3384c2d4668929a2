"""Flat-file exports. Numbers are written with 17 significant digits."""
from __future__ import annotations

import csv
from collections import defaultdict

import numpy as np

from .errors import ConfigError
from .truncated import StateVector, Trajectory

__all__ = ["fmt", "write_trajectory_csv", "read_trajectory_csv",
           "write_equilibrium_csv", "read_equilibrium_csv"]


def fmt(x):
    return "%.17g" % float(x)


def write_trajectory_csv(path, traj: Trajectory, layout="long"):
    """Write ``t,k,c_k`` rows (``long``) or one ``t,c_1,...,c_N`` row per sample (``wide``)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        if layout == "long":
            w.writerow(["t", "k", "c_k"])
            for s in traj.samples:
                for k, v in enumerate(s.c, start=1):
                    w.writerow([fmt(s.t), k, fmt(v)])
        elif layout == "wide":
            N = traj.system.N
            w.writerow(["t"] + [f"c_{k}" for k in range(1, N + 1)])
            for s in traj.samples:
                w.writerow([fmt(s.t)] + [fmt(v) for v in s.c])
        else:
            raise ValueError(f"unknown layout {layout!r}")


def read_trajectory_csv(path, system) -> Trajectory:
    """Read either layout back into a :class:`Trajectory` bound to ``system``."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ConfigError(f"{path}: empty trajectory file")
    header = rows[0]
    traj = Trajectory(system)
    if header == ["t", "k", "c_k"]:
        by_t = defaultdict(dict)
        order = []
        for t, k, v in rows[1:]:
            if t not in by_t:
                order.append(t)
            by_t[t][int(k)] = float(v)
        for t in order:
            c = np.zeros(system.N)
            for k, v in by_t[t].items():
                if k > system.N:
                    raise ConfigError(f"{path}: size {k} exceeds N={system.N}")
                c[k - 1] = v
            traj.samples.append(StateVector(c, float(t)))
    elif header and header[0] == "t" and all(h.startswith("c_") for h in header[1:]):
        if len(header) - 1 != system.N:
            raise ConfigError(f"{path}: {len(header) - 1} columns, expected N={system.N}")
        for row in rows[1:]:
            traj.samples.append(StateVector([float(v) for v in row[1:]], float(row[0])))
    else:
        raise ConfigError(f"{path}: unrecognised trajectory header {header[:3]}")
    return traj


def write_equilibrium_csv(path, Q):
    c = np.asarray(getattr(Q, "c", Q), dtype=float)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "Q_k"])
        for k, v in enumerate(c, start=1):
            w.writerow([k, fmt(v)])


def read_equilibrium_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))[1:]
    return np.array([float(v) for _, v in rows])
