"""Run configuration: strict JSON schema, model construction, assumption checks."""
from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, CoagulationError
from .kernels import KernelModel, RateModel, SourceModel
from .moments import Coefficients
from .truncated import CoagulationSystem, IntegratorConfig, StateVector

__all__ = ["RunConfig", "load_config", "parse_config", "deep_update", "SCHEMA_VERSION"]

SCHEMA_VERSION = 1

_TOP_KEYS = {"schema_version", "kernel", "removal", "source", "N", "initial",
             "integrator", "diagnostics", "equilibrium", "seed"}
_KERNEL_KEYS = {
    "brownian": set(),
    "shear": set(),
    "product": {"a", "b"},
    "constant-monomer": {"A"},
    "tabulated": {"table", "A_star", "alpha", "beta"},
}
_REMOVAL_KEYS = {
    "power-law": {"R", "gamma"},
    "li-chen": {"C"},
    "tabulated": {"values", "R_star", "gamma"},
}
_SOURCE_KEYS = {
    "monomer-only": {"s1"},
    "finite-support": {"entries"},
    "geometric-decay": {"s1", "ratio"},
}
_INITIAL_KEYS = {
    "zero": set(),
    "monomer": {"mass"},
    "tabulated": {"values"},
    "file": {"path"},
    "random": {"mass"},
}
_INTEGRATOR_KEYS = {"t_end", "rel_tol", "abs_tol", "max_step", "negativity_floor",
                    "sample_times", "n_samples"}
_DIAG_KEYS = {"mu"}
_EQ_KEYS = {"tol", "max_iter", "damping"}


def _keys(section, where, allowed, required=()):
    if not isinstance(section, dict):
        raise ConfigError(f"{where}: expected an object")
    unknown = set(section) - set(allowed)
    if unknown:
        raise ConfigError(f"{where}: unknown key(s) {sorted(unknown)}")
    missing = [k for k in required if k not in section]
    if missing:
        raise ConfigError(f"{where}: missing key(s) {missing}")


def _family(section, where, table):
    if not isinstance(section, dict) or "family" not in section:
        raise ConfigError(f"{where}: missing 'family'")
    fam = section["family"]
    if fam not in table:
        raise ConfigError(f"{where}.family: unknown family {fam!r}; expected one of {sorted(table)}")
    _keys(section, where, table[fam] | {"family"}, table[fam])
    return fam


def deep_update(base, override):
    out = copy.deepcopy(base)
    for key, val in override.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = deep_update(out[key], val)
        else:
            out[key] = copy.deepcopy(val)
    return out


@dataclass
class RunConfig:
    raw: dict
    kernel: KernelModel
    removal: RateModel
    source: SourceModel
    N: int
    initial: StateVector
    integrator: IntegratorConfig
    mus: list
    eq_tol: float = 1e-10
    eq_max_iter: int = 10_000
    eq_damping: float = 0.8
    seed: int = 0
    warnings: list = field(default_factory=list)

    @property
    def system(self):
        return CoagulationSystem(self.kernel, self.removal, self.source, self.N)

    @property
    def coefficients(self):
        return Coefficients.from_models(self.kernel, self.removal, self.source)

    @property
    def bounds_enabled(self):
        return not self.warnings


def _build_kernel(spec):
    fam = _family(spec, "kernel", _KERNEL_KEYS)
    if fam == "brownian":
        return KernelModel.brownian()
    if fam == "shear":
        return KernelModel.shear()
    if fam == "product":
        return KernelModel.product(spec["a"], spec["b"])
    if fam == "constant-monomer":
        return KernelModel.constant_monomer(spec["A"])
    return KernelModel.tabulated(spec["table"], spec["A_star"], spec["alpha"], spec["beta"])


def _build_removal(spec):
    fam = _family(spec, "removal", _REMOVAL_KEYS)
    if fam == "power-law":
        return RateModel.power_law(spec["R"], spec["gamma"])
    if fam == "li-chen":
        return RateModel.li_chen(spec["C"])
    return RateModel.tabulated(spec["values"], spec["R_star"], spec["gamma"])


def _build_source(spec):
    fam = _family(spec, "source", _SOURCE_KEYS)
    if fam == "monomer-only":
        return SourceModel.monomer(spec["s1"])
    if fam == "finite-support":
        return SourceModel.finite_support(spec["entries"])
    return SourceModel.geometric(spec["s1"], spec["ratio"])


def _build_initial(spec, N, seed, base_dir):
    if not isinstance(spec, dict) or "type" not in spec:
        raise ConfigError("initial: missing 'type'")
    kind = spec["type"]
    if kind not in _INITIAL_KEYS:
        raise ConfigError(f"initial.type: unknown type {kind!r}; expected one of {sorted(_INITIAL_KEYS)}")
    _keys(spec, "initial", _INITIAL_KEYS[kind] | {"type"}, _INITIAL_KEYS[kind])
    c = np.zeros(N)
    if kind == "monomer":
        c[0] = spec["mass"]
    elif kind == "tabulated":
        vals = np.asarray(spec["values"], dtype=float)
        if vals.size > N:
            raise ConfigError(f"initial.values: {vals.size} entries exceed N={N}")
        c[:vals.size] = vals
    elif kind == "file":
        path = Path(spec["path"])
        if not path.is_absolute() and base_dir is not None:
            path = base_dir / path
        vals = np.loadtxt(path, delimiter=",", ndmin=1)
        if vals.size > N:
            raise ConfigError(f"initial.path: {vals.size} entries exceed N={N}")
        c[:vals.size] = vals
    elif kind == "random":
        rng = np.random.default_rng(seed)
        w = rng.random(N)
        c = spec["mass"] * w / np.dot(np.arange(1, N + 1), w)
    return StateVector(c, 0.0)


def parse_config(raw: dict, base_dir=None, seed=None) -> RunConfig:
    """Validate a configuration mapping and build the models it describes.

    Raises
    ------
    ConfigError
        On unknown or missing keys, wrong types or invalid values. The
        message names the offending field.
    """
    _keys(raw, "config", _TOP_KEYS, ["schema_version", "kernel", "removal", "source", "N"])
    if raw["schema_version"] != SCHEMA_VERSION:
        raise ConfigError(f"schema_version: expected {SCHEMA_VERSION}, got {raw['schema_version']!r}")
    N = raw["N"]
    if not isinstance(N, int) or N < 1:
        raise ConfigError("N: must be a positive integer")
    seed = raw.get("seed", 0) if seed is None else seed
    try:
        kernel = _build_kernel(raw["kernel"])
        removal = _build_removal(raw["removal"])
        source = _build_source(raw["source"])
        initial = _build_initial(raw.get("initial", {"type": "zero"}), N, seed, base_dir)

        integ = dict(raw.get("integrator", {"t_end": 10.0}))
        _keys(integ, "integrator", _INTEGRATOR_KEYS, ["t_end"])
        n_samples = integ.pop("n_samples", None)
        if n_samples is not None and "sample_times" in integ:
            raise ConfigError("integrator: give either sample_times or n_samples")
        if n_samples is None and "sample_times" not in integ:
            n_samples = 101
        if n_samples is not None:
            integ["sample_times"] = np.linspace(0.0, integ["t_end"], int(n_samples)).tolist()
        integrator = IntegratorConfig(**integ)

        diag = raw.get("diagnostics", {})
        _keys(diag, "diagnostics", _DIAG_KEYS)
        mus = [float(m) for m in diag.get("mu", [0.0, 1.0, 2.0, 3.0])]

        eq = raw.get("equilibrium", {})
        _keys(eq, "equilibrium", _EQ_KEYS)
    except ConfigError:
        raise
    except (CoagulationError, TypeError, ValueError, KeyError, OSError) as exc:
        raise ConfigError(f"invalid value: {exc}") from exc

    cfg = RunConfig(raw=raw, kernel=kernel, removal=removal, source=source, N=N,
                    initial=initial, integrator=integrator, mus=mus,
                    eq_tol=float(eq.get("tol", 1e-10)), eq_max_iter=int(eq.get("max_iter", 10_000)),
                    eq_damping=float(eq.get("damping", 0.8)), seed=int(seed))
    cfg.warnings = cfg.coefficients.check()
    return cfg


def load_config(path, seed=None) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return parse_config(raw, base_dir=path.parent, seed=seed)
