"""Cross-validation of the simulator and solver against the solvable example."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analytic import (ExampleParams, example_decay_rate, exact_c1, exact_c2, exact_ck,
                       exact_equilibrium)
from .equilibrium import convergence_analysis, solve_equilibrium
from .errors import CoagulationError
from .truncated import IntegratorConfig, integrate

__all__ = ["Check", "verify_example", "format_checks"]

SAMPLE_TIMES = (0.5, 1.0, 2.0, 5.0, 10.0)


@dataclass
class Check:
    name: str
    value: float
    threshold: float
    passed: bool
    relation: str = "<="


def _rel_err(sim, exact):
    return abs(sim - exact) / max(abs(exact), 1e-300) if exact != 0 else abs(sim)


def verify_example(p: ExampleParams = None, N: int = 16, rel_tol: float = 1e-11,
                   abs_tol: float = 1e-13, oracle_tol: float = 1e-6):
    """Simulate the example and compare with its closed form.

    Checks the sizes 1, 2 and 3 at the fixed sample times, the equilibrium,
    and (when ``A* > 0`` and ``s_1 > 0``) the fitted decay rate of
    ``sum_k k |c_k - Q_k|`` on ``[2, 10]`` against the guaranteed rate.
    """
    p = ExampleParams() if p is None else p
    system = p.system(N)
    times = sorted(set(SAMPLE_TIMES) | set(np.linspace(2.0, 10.0, 33).tolist()))
    checks = []
    try:
        traj = integrate(system, p.initial_state(N),
                         IntegratorConfig(max(times), rel_tol=rel_tol, abs_tol=abs_tol,
                                          sample_times=times))
    except CoagulationError as exc:
        return [Check(f"integration ({exc})", math.inf, 0.0, False)]
    by_t = {s.t: s.c for s in traj.samples}
    for t in SAMPLE_TIMES:
        c = by_t[t]
        for k, exact in ((1, exact_c1(p, t)), (2, exact_c2(p, t)), (3, exact_ck(p, 3, t))):
            if k > N:
                continue
            err = _rel_err(c[k - 1], exact)
            checks.append(Check(f"c_{k}(t={t:g}) relative error", err, oracle_tol, err <= oracle_tol))

    Q_exact = exact_equilibrium(p, N)
    try:
        eq = solve_equilibrium(system, tol=1e-10)
        err = float(np.max(np.abs(eq.Q.c - Q_exact)))
        checks.append(Check("equilibrium max abs error", err, 1e-9, err <= 1e-9))
        checks.append(Check("equilibrium residual", eq.residual, 1e-10, eq.residual <= 1e-10))
    except CoagulationError as exc:
        checks.append(Check(f"equilibrium ({exc})", math.inf, 1e-9, False))

    if p.A_star > 0 and p.s_k(1) > 0:
        kappa = example_decay_rate(p)
        try:
            rep = convergence_analysis(traj, Q_exact, mu=1.0, window=(2.0, 10.0))
            checks.append(Check("fitted decay rate", rep.fitted_rate, 0.95 * kappa,
                                rep.fitted_rate >= 0.95 * kappa, ">="))
            checks.append(Check("decay fit R^2", rep.r_squared, 0.99, rep.r_squared >= 0.99, ">="))
        except CoagulationError as exc:
            checks.append(Check(f"decay fit ({exc})", math.nan, 0.95 * kappa, False, ">="))
    return checks


def format_checks(checks):
    width = max(len(c.name) for c in checks)
    lines = [f"{'check'.ljust(width)}  {'value':>12}  {'':2} {'threshold':>10}  result"]
    for c in checks:
        lines.append(f"{c.name.ljust(width)}  {c.value:12.4e}  {c.relation:2} {c.threshold:10.3e}  "
                     f"{'PASS' if c.passed else 'FAIL'}")
    return "\n".join(lines)
