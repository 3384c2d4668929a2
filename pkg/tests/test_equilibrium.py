import json
import math

import numpy as np
import pytest

from forcedcoag import (CoagulationSystem, ConvergenceError, ExampleParams, InsufficientDataError,
                        IntegratorConfig, KernelModel, ParameterError, RateModel, SourceModel,
                        StateVector, Trajectory, convergence_analysis, exact_equilibrium,
                        fixed_point_sweep, integrate, solve_equilibrium, stationarity_drift,
                        stationary_residual)


def _brownian(N=64, s=1.0):
    return CoagulationSystem(KernelModel.brownian(), RateModel.power_law(1.0, 2.0 / 3.0),
                             SourceModel.monomer(s), N)


def test_example_equilibrium():
    p = ExampleParams()
    res = solve_equilibrium(p.system(16))
    np.testing.assert_allclose(res.Q.c, exact_equilibrium(p, 16), atol=1e-9)
    assert res.residual <= 1e-10
    assert res.method == "sweep"


def test_zero_source_gives_zero():
    sys_ = _brownian(s=0.0)
    res = solve_equilibrium(sys_)
    assert res.residual == 0.0 and not res.Q.c.any()


def test_brownian_equilibrium_is_stationary_and_attracting():
    sys_ = _brownian()
    res = solve_equilibrium(sys_)
    assert stationary_residual(sys_, res.Q) <= 1e-10
    assert np.all(res.Q.c >= 0)
    traj = integrate(sys_, StateVector.zeros(64), IntegratorConfig(40.0, rel_tol=1e-10,
                                                                   abs_tol=1e-14))
    np.testing.assert_allclose(traj.values[-1], res.Q.c, rtol=1e-6, atol=1e-12)


def test_equilibrium_independent_of_initial_guess():
    sys_ = _brownian()
    a = solve_equilibrium(sys_)
    b = solve_equilibrium(sys_, initial=np.full(64, 0.05))
    np.testing.assert_allclose(a.Q.c, b.Q.c, atol=1e-9)


def test_sweep_fixed_point():
    sys_ = ExampleParams().system(8)
    Q = exact_equilibrium(ExampleParams(), 8)
    np.testing.assert_allclose(fixed_point_sweep(sys_, Q, damping=1.0).c, Q, atol=1e-15)
    with pytest.raises(ParameterError):
        fixed_point_sweep(sys_, Q, damping=0.0)


def test_convergence_error_carries_history():
    with pytest.raises(ConvergenceError) as info:
        solve_equilibrium(_brownian(N=16), tol=1e-300, max_iter=5)
    assert len(info.value.history) == 10


def _synthetic(rate, times):
    sys_ = ExampleParams().system(2)
    samples = [StateVector([1.0 + math.exp(-rate * t), 0.0], t) for t in times]
    return Trajectory(sys_, samples), np.array([1.0, 0.0])


def test_convergence_analysis_recovers_rate():
    traj, Q = _synthetic(1.7, np.linspace(0, 10, 41))
    rep = convergence_analysis(traj, Q, window=(2.0, 10.0), theoretical_kappa=1.0)
    assert rep.fitted_rate == pytest.approx(1.7, rel=1e-10)
    assert rep.r_squared == pytest.approx(1.0)
    assert rep.window == (2.0, 10.0)
    assert json.loads(rep.to_json())["theoretical_kappa"] == 1.0


def test_convergence_analysis_needs_data():
    traj, Q = _synthetic(1.0, [0.0, 1.0, 2.0])
    with pytest.raises(InsufficientDataError):
        convergence_analysis(traj, Q)


def test_convergence_on_example_trajectory():
    p = ExampleParams()
    sys_ = p.system(16)
    traj = integrate(sys_, p.initial_state(16),
                     IntegratorConfig(10.0, rel_tol=1e-11, abs_tol=1e-13,
                                      sample_times=np.linspace(0, 10, 41)))
    rep = convergence_analysis(traj, exact_equilibrium(p, 16), window=(2.0, 10.0))
    assert rep.fitted_rate >= 0.95
    drift = stationarity_drift(traj)
    assert drift[-1][1] < drift[1][1]
