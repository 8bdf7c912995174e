"""Experiment configs: one JSON document describes a full run.

A config names a scheme, a problem (operator descriptors), a schedule
with its witnesses, a horizon, and the list of checks to execute.  The
same descriptor dicts the operators carry at runtime parse back into
operators, so a finished report's ``experiment`` block is itself a valid
config fragment.

Top-level keys:

    name, scheme (tkm|km|tfb|tdr), n_max, k_max, seed,
    instance            -- optional stock schedule/moduli pair by name
    schedule, moduli    -- explicit blocks (override the stock instance)
    problem             -- operators, keyed by scheme role
    x0                  -- {"kind": "explicit"|"seeded"|"near", ...}
    fixed_point, target -- reference points for checks (optional)
    tol                 -- strong-convergence tolerance (default 1e-3)
    checks              -- subset of {boundedness, asymptotic_regularity,
                           strong_convergence, dr_gap, metastability}
    metastability       -- {"k": int, "f": natfn descriptor}
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import iterations, operators, verify
from .moduli import (
    AffineFn,
    ComposeFn,
    ConstFn,
    ExpCeilFn,
    IdentityFn,
    MaxFn,
    NatFunction,
    PolyCeilFn,
    QuantitativeModuli,
    Schedule,
    TableFn,
    constant_sequence,
    poly_decay_to_one,
    stock_instances,
    validate_Q,
)
from .rates import nu1, nu2, rate_G
from .satnat import DEFAULT_CAP

__all__ = [
    "ConfigError",
    "load_config",
    "natfn_from_config",
    "moduli_from_config",
    "schedule_from_config",
    "operator_from_config",
    "x0_from_config",
    "resolve_instance",
    "run_experiment",
]


class ConfigError(ValueError):
    pass


def load_config(path) -> dict:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {p}")
    try:
        with open(p) as fh:
            cfg = json.load(fh)
    except json.JSONDecodeError as e:
        raise ConfigError(f"config is not valid JSON: {e}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a JSON object")
    return cfg


def _need(d: dict, key: str, where: str):
    if key not in d:
        raise ConfigError(f"missing '{key}' in {where}")
    return d[key]


# ----------------------------------------------------------------------
# Descriptor parsers
# ----------------------------------------------------------------------


def natfn_from_config(desc: dict) -> NatFunction:
    if not isinstance(desc, dict):
        raise ConfigError(f"function descriptor must be an object, got {desc!r}")
    kind = _need(desc, "kind", "function descriptor")
    try:
        if kind == "const":
            return ConstFn(int(desc["value"]))
        if kind == "identity":
            return IdentityFn()
        if kind == "affine":
            return AffineFn(int(desc["a"]), int(desc["c"]))
        if kind == "poly_ceil":
            return PolyCeilFn(tuple(Fraction(c) for c in desc["coeffs"]))
        if kind == "exp_ceil":
            return ExpCeilFn(int(desc.get("shift", 0)))
        if kind == "table":
            return TableFn(tuple(int(v) for v in desc["values"]))
        if kind == "compose":
            return ComposeFn(
                natfn_from_config(desc["outer"]), natfn_from_config(desc["inner"])
            )
        if kind == "max":
            return MaxFn(tuple(natfn_from_config(p) for p in desc["parts"]))
    except (KeyError, ValueError, TypeError) as e:
        raise ConfigError(f"bad '{kind}' function descriptor: {e}") from None
    raise ConfigError(f"unknown function kind {kind!r}")


def moduli_from_config(desc: dict) -> QuantitativeModuli:
    try:
        return QuantitativeModuli(
            h=natfn_from_config(_need(desc, "h", "moduli")),
            b=natfn_from_config(_need(desc, "b", "moduli")),
            D=natfn_from_config(_need(desc, "D", "moduli")),
            B=natfn_from_config(_need(desc, "B", "moduli")),
            L=natfn_from_config(_need(desc, "L", "moduli")),
            ell=int(_need(desc, "ell", "moduli")),
            N=int(_need(desc, "N", "moduli")),
        )
    except ValueError as e:
        raise ConfigError(f"bad moduli: {e}") from None


def _seq_from_config(desc: dict):
    kind = _need(desc, "kind", "sequence descriptor")
    if kind == "poly_decay":
        return poly_decay_to_one(float(desc["power"]), int(desc.get("shift", 2)))
    if kind == "const":
        return constant_sequence(float(desc["value"]))
    raise ConfigError(f"unknown sequence kind {kind!r}")


def schedule_from_config(desc: dict, lam_max: float = 1.0) -> Schedule:
    beta_desc = _need(desc, "beta", "schedule")
    lam_desc = _need(desc, "lambda", "schedule")
    return Schedule(
        beta=_seq_from_config(beta_desc),
        lam=_seq_from_config(lam_desc),
        descriptor={"beta": beta_desc, "lambda": lam_desc},
        lam_max=lam_max,
    )


def operator_from_config(desc: dict) -> operators.Operator:
    kind = _need(desc, "kind", "operator descriptor")
    try:
        if kind == "identity":
            return operators.Identity()
        if kind == "constant":
            return operators.ConstantMap(desc["c"])
        if kind == "zero":
            return operators.ZeroMap()
        if kind == "averaged":
            return operators.AveragedMap(
                float(desc["alpha"]), operator_from_config(desc["inner"])
            )
        if kind == "hyperplane":
            return operators.HyperplaneProjection(desc["a"], float(desc["c"]))
        if kind == "box":
            return operators.BoxProjection(desc["lo"], desc["hi"])
        if kind == "ball":
            return operators.BallProjection(desc["center"], float(desc["radius"]))
        if kind == "halfspace":
            return operators.HalfspaceProjection(desc["a"], float(desc["c"]))
        if kind == "soft_threshold":
            step = desc.get("step")
            return operators.SoftThreshold(
                float(desc["gamma"]), float(step) if step is not None else None
            )
        if kind == "affine_resolvent":
            return operators.AffineResolvent(
                desc["Q"], desc["q"], float(desc["gamma"])
            )
        if kind == "reflected":
            return operators.ReflectedResolvent(operator_from_config(desc["inner"]))
        if kind == "quadratic_gradient":
            return operators.QuadraticGradient(desc["Q"], desc["q"])
        if kind == "fb":
            return operators.FBMap(
                operator_from_config(desc["J1"]),
                operator_from_config(desc["T2"]),
                float(desc["gamma"]),
            )
        if kind == "dr":
            return operators.DRMap(
                operator_from_config(desc["J1"]), operator_from_config(desc["J2"])
            )
    except (KeyError, ValueError, TypeError) as e:
        raise ConfigError(f"bad '{kind}' operator descriptor: {e}") from None
    raise ConfigError(f"unknown operator kind {kind!r}")


def x0_from_config(desc: dict, seed: int) -> np.ndarray:
    kind = _need(desc, "kind", "x0 descriptor")
    if kind == "explicit":
        return operators.as_vector(desc["coords"])
    rng = np.random.default_rng(int(desc.get("seed", seed)))
    if kind == "seeded":
        dim = int(_need(desc, "dim", "x0"))
        return rng.normal(0.0, float(desc.get("scale", 1.0)), size=dim)
    if kind == "near":
        center = operators.as_vector(_need(desc, "center", "x0"))
        u = rng.normal(size=center.shape[0])
        u /= np.linalg.norm(u)
        return center + float(desc.get("radius", 1.0)) * u
    raise ConfigError(f"unknown x0 kind {kind!r}")


def resolve_instance(cfg: dict, lam_max: float = 1.0):
    """Schedule and witnesses from a config, honoring the stock shortcut."""
    schedule = None
    moduli = None
    if "instance" in cfg:
        for inst in stock_instances():
            if inst.name == cfg["instance"]:
                schedule, moduli = inst.schedule, inst.moduli
                break
        else:
            raise ConfigError(f"unknown stock instance {cfg['instance']!r}")
        if lam_max != schedule.lam_max:
            schedule = Schedule(
                beta=schedule.beta,
                lam=schedule.lam,
                descriptor=schedule.descriptor,
                lam_max=lam_max,
            )
    if "schedule" in cfg:
        schedule = schedule_from_config(cfg["schedule"], lam_max)
    if "moduli" in cfg:
        moduli = moduli_from_config(cfg["moduli"])
    if schedule is None or moduli is None:
        raise ConfigError("config needs 'instance' or both 'schedule' and 'moduli'")
    return schedule, moduli


# ----------------------------------------------------------------------
# Experiment driver
# ----------------------------------------------------------------------

_SCHEMES = ("tkm", "km", "tfb", "tdr")


def _build_problem(cfg: dict):
    """Returns (runner kwargs, composed nonexpansive map, extras)."""
    scheme = cfg["scheme"]
    prob = _need(cfg, "problem", "config")
    if scheme in ("tkm", "km"):
        T = operator_from_config(_need(prob, "T", "problem"))
        return {"T": T}, T
    if scheme == "tfb":
        J1 = operator_from_config(_need(prob, "J1", "problem"))
        T2 = operator_from_config(_need(prob, "T2", "problem"))
        gamma = float(_need(prob, "gamma", "problem"))
        try:
            composed = operators.compose_fb(J1, T2, gamma)
        except ValueError as e:
            raise ConfigError(str(e)) from None
        return {"J1": J1, "T2": T2, "gamma": gamma}, composed
    if scheme == "tdr":
        J1 = operator_from_config(_need(prob, "J1", "problem"))
        J2 = operator_from_config(_need(prob, "J2", "problem"))
        try:
            composed = operators.compose_dr(J1, J2)
        except ValueError as e:
            raise ConfigError(str(e)) from None
        return {"J1": J1, "J2": J2}, composed
    raise ConfigError(f"unknown scheme {scheme!r}; expected one of {_SCHEMES}")


def _effective_moduli(scheme: str, moduli: QuantitativeModuli, composed):
    """Witnesses for the plain-scheme reduction of a composed run.

    The two-resolvent scheme halves its raw relaxation, the
    forward-backward scheme rewrites through the averaged decomposition;
    both shrink the relaxation floor, inflating ``ell``.
    """
    if scheme == "tdr":
        return moduli.with_ell(2 * moduli.ell)
    if scheme == "tfb":
        alpha = composed.alpha
        a = 1 if alpha >= 1.0 - 1e-12 else 2
        return moduli.with_ell(a * moduli.ell)
    return moduli


def run_experiment(
    cfg: dict,
    out_dir,
    *,
    seed: int | None = None,
    cap: int = DEFAULT_CAP,
    thin: int = 1,
) -> dict:
    """Run one configured experiment end to end.

    Generates the trajectory, evaluates the rate table, executes the
    requested checks, and writes ``trajectory.csv`` and ``report.json``
    into ``out_dir``.  The returned report dict carries an overall
    ``status`` of pass/fail; unverifiable checks do not fail a run.
    """
    scheme = _need(cfg, "scheme", "config")
    if scheme not in _SCHEMES:
        raise ConfigError(f"unknown scheme {scheme!r}")
    n_max = int(_need(cfg, "n_max", "config"))
    k_max = int(cfg.get("k_max", 2))
    cfg_seed = int(cfg.get("seed", 0)) if seed is None else int(seed)

    lam_max = 2.0 if scheme == "tdr" else 1.0
    schedule, moduli = resolve_instance(cfg, lam_max)
    kwargs, composed = _build_problem(cfg)
    x0 = x0_from_config(_need(cfg, "x0", "config"), cfg_seed)

    if scheme == "tkm":
        traj = iterations.run_tkm(composed, schedule, x0, n_max)
    elif scheme == "km":
        traj = iterations.run_km(composed, schedule.lam, x0, n_max)
    elif scheme == "tfb":
        traj = iterations.run_tfb(
            kwargs["J1"], kwargs["T2"], kwargs["gamma"], schedule, x0, n_max
        )
    else:
        traj = iterations.run_tdr(kwargs["J1"], kwargs["J2"], schedule, x0, n_max)

    eff = _effective_moduli(scheme, moduli, composed)
    bounds = {}
    for k in range(k_max + 1):
        bounds[str(k)] = {
            "G": str(rate_G(eff.N, eff.B, eff.L, k, cap=cap)),
            "nu1": str(nu1(eff, k, cap=cap)),
            "nu2": str(nu2(eff, k, cap=cap)),
        }

    checks: list[verify.CheckResult] = []
    wanted = cfg.get("checks", ["boundedness", "asymptotic_regularity"])
    p = cfg.get("fixed_point")
    target = cfg.get("target")

    for name in wanted:
        if name == "boundedness":
            if p is None:
                checks.append(
                    verify.CheckResult(
                        "boundedness", "unverifiable", notes=["no fixed_point in config"]
                    )
                )
            else:
                checks.append(check_boundedness_entry(traj, composed, p, moduli))
        elif name == "asymptotic_regularity":
            if scheme == "km":
                checks.append(
                    verify.CheckResult(
                        "asymptotic_regularity",
                        "unverifiable",
                        notes=["undamped baseline carries no certified thresholds"],
                    )
                )
            else:
                checks.append(
                    verify.check_asymptotic_regularity(traj, composed, eff, k_max, cap=cap)
                )
        elif name == "strong_convergence":
            if target is None:
                checks.append(
                    verify.CheckResult(
                        "strong_convergence", "unverifiable", notes=["no target in config"]
                    )
                )
            else:
                checks.append(
                    verify.check_strong_convergence(
                        traj, target, float(cfg.get("tol", 1e-3))
                    )
                )
        elif name == "dr_gap":
            if scheme != "tdr":
                checks.append(
                    verify.CheckResult(
                        "dr_gap", "unverifiable", notes=["scheme has no shadow sequences"]
                    )
                )
            else:
                checks.append(verify.check_dr_gap(traj, moduli, k_max, cap=cap))
        elif name == "metastability":
            meta = cfg.get("metastability", {})
            kk = int(meta.get("k", 0))
            fdesc = meta.get("f", {"kind": "affine", "a": 2, "c": 10})
            fn = natfn_from_config(fdesc)
            checks.append(
                verify.find_metastability_witness(traj, kk, fn, moduli=eff, cap=cap)
            )
        else:
            raise ConfigError(f"unknown check {name!r}")

    report = {
        "experiment": {
            "name": cfg.get("name", "unnamed"),
            "scheme": scheme,
            "n_max": n_max,
            "k_max": k_max,
            "seed": cfg_seed,
            "problem": traj.problem_descriptor,
            "schedule": traj.schedule_descriptor,
        },
        "moduli": moduli.to_config(),
        "bounds": bounds,
        "checks": [c.to_dict() for c in checks],
        "status": "pass" if all(c.ok for c in checks) else "fail",
    }

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    iterations.export_csv(traj, out / "trajectory.csv", T=composed, thin=thin)
    with open(out / "report.json", "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return report


def check_boundedness_entry(traj, composed, p, moduli) -> verify.CheckResult:
    try:
        return verify.check_boundedness(traj, composed, p, moduli.N)
    except ValueError as e:
        return verify.CheckResult("boundedness", "fail", notes=[str(e)])


def validate_from_config(cfg: dict, horizon: int, k_max: int):
    schedule, moduli = resolve_instance(cfg, lam_max=2.0 if cfg.get("scheme") == "tdr" else 1.0)
    return validate_Q(schedule, moduli, horizon=horizon, k_max=k_max)
