"""
Stationary states and the rate of approach
==========================================

The stationary equations are solved by damped Gauss-Seidel sweeps, with a
long-time integration as fallback. The distance ``sum_k k |c_k(t) - Q_k|``
then decays exponentially until it reaches the accuracy of the computed
equilibrium, and its rate is fitted before that floor.
"""
import numpy as np

from forcedcoag import (CoagulationSystem, IntegratorConfig, KernelModel, RateModel, SourceModel,
                        StateVector, convergence_analysis, integrate, solve_equilibrium)

N = 64
system = CoagulationSystem(KernelModel.brownian(), RateModel.power_law(1.0, 2.0 / 3.0),
                           SourceModel.monomer(1.0), N)
eq = solve_equilibrium(system)
print(f"equilibrium: residual {eq.residual:.2e} after {eq.iterations} sweeps ({eq.method})")
print("Q_1..Q_5 =", np.round(eq.Q.c[:5], 6))

# The same state is reached from a different starting guess.
other = solve_equilibrium(system, initial=np.full(N, 0.05))
print(f"difference from a second start: {np.max(np.abs(other.Q.c - eq.Q.c)):.1e}")

traj = integrate(system, StateVector.monomers(N, 2.0),
                 IntegratorConfig(7.0, rel_tol=1e-11, abs_tol=1e-15,
                                  sample_times=np.linspace(0, 7, 29)))
rep = convergence_analysis(traj, eq.Q, mu=1.0, window=(1.0, 7.0))
print(f"fitted decay rate {rep.fitted_rate:.4f} with R^2 = {rep.r_squared:.5f}")
