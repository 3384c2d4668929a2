"""Command-line entry point: ``forcedcoag <subcommand> [options]``.

Subcommands
-----------
simulate         integrate a configuration, export trajectory, moments and a summary
equilibrium      solve for the stationary state (and fit convergence if a trajectory exists)
check-smallness  print the smallness certificate for one or more moment orders
verify-example   cross-check simulator and solver against the closed-form example
audit            check moment bounds over an existing trajectory CSV
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .analytic import ExampleParams, smallness_gap_demo
from .config import deep_update, load_config, parse_config
from .contraction import smallness_certificate
from .equilibrium import convergence_analysis, solve_equilibrium
from .errors import CoagulationError, ConfigError, ConvergenceError, ParameterError
from .io import read_trajectory_csv, write_equilibrium_csv, write_trajectory_csv
from .moments import audit_trajectory, moment, write_moment_reports
from .truncated import integrate
from .verify import format_checks, verify_example

__all__ = ["main", "build_parser"]

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_PARSE = 2
EXIT_INTEGRATOR = 3
EXIT_CONVERGENCE = 4


def _err(msg):
    print(f"error: {msg}", file=sys.stderr)


def _summarise_reports(reports):
    checks = {"total_mass": True, "general": True, "large_time": True}
    counted = {k: 0 for k in checks}
    for rep in reports:
        for e in rep.entries:
            for name, flag in (("total_mass", e.ok_total_mass), ("general", e.ok_general),
                               ("large_time", e.ok_large_time)):
                if flag is not None:
                    counted[name] += 1
                    checks[name] &= bool(flag)
    return {name: {"checked": counted[name], "passed": checks[name]} for name in checks}


# -- simulate --------------------------------------------------------------

def run_simulate(cfg, out: Path, layout="long"):
    out.mkdir(parents=True, exist_ok=True)
    for w in cfg.warnings:
        print(f"warning: {w}; bound checks suppressed", file=sys.stderr)
    system = cfg.system
    t0 = time.perf_counter()
    try:
        traj = integrate(system, cfg.initial, cfg.integrator)
    except CoagulationError as exc:
        _err(f"integration failed: {exc}")
        return EXIT_INTEGRATOR
    wall = time.perf_counter() - t0
    write_trajectory_csv(out / "trajectory.csv", traj, layout)
    reports = audit_trajectory(traj, cfg.mus, cfg.coefficients)
    write_moment_reports(out / "moments.csv", reports)
    summary = {
        "N": cfg.N,
        "t_end": cfg.integrator.t_end,
        "final_m1": moment(traj.samples[-1], 1.0),
        "accepted_steps": traj.accepted,
        "rejected_steps": traj.rejected,
        "wall_time_s": wall,
        "warnings": cfg.warnings,
        "bounds_enabled": cfg.bounds_enabled,
        "bound_checks": _summarise_reports(reports) if cfg.bounds_enabled else None,
        "all_bounds_ok": all(r.ok for r in reports),
        "seed": cfg.seed,
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=2))
    print(f"simulated N={cfg.N} to t={cfg.integrator.t_end:g} in {wall:.3f}s; "
          f"final m1={summary['final_m1']:.10g}; bounds ok: {summary['all_bounds_ok']}")
    return EXIT_OK


# -- equilibrium -----------------------------------------------------------

def _certificate(cfg, mu):
    coef = cfg.coefficients
    return smallness_certificate(mu, coef.alpha, coef.beta, coef.gamma, coef.A_star, coef.R_star,
                                 coef.s_hat(1), coef.s_hat(mu + coef.beta))


def run_equilibrium(cfg, out: Path, layout="long"):
    out.mkdir(parents=True, exist_ok=True)
    system = cfg.system
    try:
        res = solve_equilibrium(system, tol=cfg.eq_tol, max_iter=cfg.eq_max_iter,
                                damping=cfg.eq_damping)
    except ConvergenceError as exc:
        _err(str(exc))
        tail = exc.history[-10:]
        print("residual history (last %d): %s" % (len(tail), ", ".join(f"{h:.3e}" for h in tail)),
              file=sys.stderr)
        return EXIT_CONVERGENCE
    write_equilibrium_csv(out / "equilibrium.csv", res.Q)
    (out / "equilibrium.json").write_text(json.dumps(
        {"residual": res.residual, "iterations": res.iterations, "method": res.method,
         "m1": moment(res.Q, 1.0)}, indent=2))
    print(f"equilibrium: residual {res.residual:.3e} after {res.iterations} iterations ({res.method})")

    traj_path = out / "trajectory.csv"
    if traj_path.exists():
        kappa = None
        if cfg.bounds_enabled:
            try:
                cert = _certificate(cfg, 1.0)
                kappa = cert.kappa if cert.passed else None
            except ParameterError:
                pass
        traj = read_trajectory_csv(traj_path, system)
        try:
            rep = convergence_analysis(traj, res.Q, mu=1.0, theoretical_kappa=kappa)
        except CoagulationError as exc:
            print(f"warning: no convergence report: {exc}", file=sys.stderr)
        else:
            (out / "convergence.json").write_text(rep.to_json(indent=2))
            print(f"fitted decay rate {rep.fitted_rate:.6g} (R^2 = {rep.r_squared:.4f})")
    return EXIT_OK


# -- check-smallness -------------------------------------------------------

def _gap_note(cfg):
    """Note for the closed-form example family when the certificate cannot pass."""
    if cfg.kernel.family != "constant-monomer" or cfg.removal.family != "power-law":
        return None
    src = cfg.source.array(max(cfg.N, 2))
    p = ExampleParams(cfg.kernel.A_star, cfg.removal.R_star, cfg.removal.gamma, tuple(src[:2]))
    if p.A_star * p.s_k(1) < 4.0 * p.R_star**2:
        return None
    gap = smallness_gap_demo(p)
    return (f"closed-form example: contraction bracket is at least "
            f"{gap.contraction_bracket_lower:.6g} > 0, so the certificate cannot pass, "
            f"yet solutions converge exponentially at rate {gap.observed_rate:.6g}")


def run_check_smallness(cfg, mus):
    if cfg.warnings:
        for w in cfg.warnings:
            _err(f"hypothesis violated: {w}")
        return EXIT_PARSE
    certs = []
    try:
        for mu in mus:
            certs.append(_certificate(cfg, mu))
    except ParameterError as exc:
        _err(str(exc))
        return EXIT_PARSE
    note = _gap_note(cfg)
    for cert in certs:
        if note and not cert.passed:
            cert.notes.append(note)
    if len(certs) == 1:
        print(certs[0].to_json(indent=2))
    else:
        print(json.dumps([json.loads(c.to_json()) for c in certs], indent=2))
    return EXIT_OK if any(c.passed for c in certs) else EXIT_FAIL


# -- audit -----------------------------------------------------------------

def run_audit(cfg, trajectory_path, out=None):
    if cfg.warnings:
        for w in cfg.warnings:
            print(f"warning: {w}; bound checks suppressed", file=sys.stderr)
    traj = read_trajectory_csv(trajectory_path, cfg.system)
    # initial mass from the configuration, not from the file under audit
    reports = audit_trajectory(traj, cfg.mus, cfg.coefficients, m1_in=moment(cfg.initial, 1.0))
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        write_moment_reports(out / "moments.csv", reports)
    bad = [(r.t, e.mu) for r in reports for e in r.entries if not e.ok]
    for t, mu in bad[:20]:
        print(f"violation: t={t:.6g} mu={mu:g}")
    print(f"audited {len(reports)} samples: {len(bad)} violation(s)")
    return EXIT_OK if not bad else EXIT_FAIL


# -- grid fan-out ----------------------------------------------------------

def _run_grid(args, runner):
    cfg_path = Path(args.config)
    try:
        base = json.loads(cfg_path.read_text())
        overrides = json.loads(Path(args.grid).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        _err(f"cannot read grid inputs: {exc}")
        return EXIT_PARSE
    if not isinstance(overrides, list) or not all(isinstance(o, dict) for o in overrides):
        _err("grid file must contain a JSON list of override objects")
        return EXIT_PARSE
    try:
        cfgs = [parse_config(deep_update(base, o), base_dir=cfg_path.parent, seed=args.seed)
                for o in overrides]
    except ConfigError as exc:
        _err(str(exc))
        return EXIT_PARSE
    out = Path(args.out)

    def job(idx):
        return runner(cfgs[idx], out / f"grid_{idx:03d}")

    with ThreadPoolExecutor() as pool:
        codes = list(pool.map(job, range(len(cfgs))))
    out.mkdir(parents=True, exist_ok=True)
    (out / "grid_summary.json").write_text(json.dumps(
        [{"index": i, "override": o, "exit_code": c} for i, (o, c) in enumerate(zip(overrides, codes))],
        indent=2))
    return max(codes) if codes else EXIT_OK


# -- parser ----------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(prog="forcedcoag", description=__doc__.splitlines()[0],
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out_default="out"):
        p.add_argument("--config", required=True, help="run configuration (JSON)")
        p.add_argument("--out", default=out_default, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override the configuration seed")

    p = sub.add_parser("simulate", help="integrate a configuration")
    common(p)
    p.add_argument("--format", choices=("long", "wide"), default="long")
    p.add_argument("--grid", default=None, help="JSON list of configuration overrides")

    p = sub.add_parser("equilibrium", help="solve for the stationary state")
    common(p)
    p.add_argument("--grid", default=None, help="JSON list of configuration overrides")

    p = sub.add_parser("check-smallness", help="print the smallness certificate")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--mu", type=float, nargs="+", default=[1.0],
                   help="moment order(s); several values give a scan")

    p = sub.add_parser("verify-example", help="cross-check against the closed-form example")
    p.add_argument("--A-star", type=float, default=1.0)
    p.add_argument("--R-star", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--s", type=float, nargs="+", default=[1.0, 0.5])
    p.add_argument("--N", type=int, default=16)
    p.add_argument("--rel-tol", type=float, default=1e-11)
    p.add_argument("--abs-tol", type=float, default=1e-13)

    p = sub.add_parser("audit", help="check moment bounds over an existing trajectory")
    p.add_argument("--config", required=True)
    p.add_argument("--trajectory", required=True, help="trajectory CSV (long or wide)")
    p.add_argument("--out", default=None, help="write moments.csv here")
    p.add_argument("--seed", type=int, default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "verify-example":
            p = ExampleParams(args.A_star, args.R_star, args.gamma, tuple(args.s))
            checks = verify_example(p, N=args.N, rel_tol=args.rel_tol, abs_tol=args.abs_tol)
            print(format_checks(checks))
            failing = [c.name for c in checks if not c.passed]
            if failing:
                _err("failing checks: " + "; ".join(failing))
                return EXIT_FAIL
            return EXIT_OK

        if args.command in ("simulate", "equilibrium"):
            layout = getattr(args, "format", "long")
            runner = {"simulate": run_simulate, "equilibrium": run_equilibrium}[args.command]
            if args.grid:
                return _run_grid(args, lambda cfg, out: runner(cfg, out, layout))
            return runner(load_config(args.config, seed=args.seed), Path(args.out), layout)

        cfg = load_config(args.config, seed=args.seed)
        if args.command == "check-smallness":
            return run_check_smallness(cfg, args.mu)
        return run_audit(cfg, args.trajectory, None if args.out is None else Path(args.out))
    except ConfigError as exc:
        _err(str(exc))
        return EXIT_PARSE
    except ParameterError as exc:
        _err(str(exc))
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
