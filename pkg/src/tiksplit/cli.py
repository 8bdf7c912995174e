"""Command-line front end.

Three subcommands:

    run CONFIG       simulate, check, and write trajectory.csv + report.json
    rates CONFIG     print certified thresholds for the configured witnesses
    validate CONFIG  scan the schedule against its witnesses

Exit codes: 0 success, 1 a check failed or a schedule condition was
violated, 2 the config or an argument could not be parsed.
"""

from __future__ import annotations

import argparse
import sys

from .config import (
    ConfigError,
    load_config,
    moduli_from_config,
    run_experiment,
    validate_from_config,
)
from .moduli import AffineFn, IdentityFn, TableFn, stock_instances
from .rates import dr_gap_threshold, mu, mu2, mu3, mu4, mu5, nu1, nu2, rate_G
from .satnat import DEFAULT_CAP

__all__ = ["main", "build_parser", "parse_fspec"]


def parse_fspec(spec: str):
    """Counterexample function from a compact string.

    ``identity`` | ``affine:a,c`` (maps m to a*m + c) | ``table:v0,v1,...``
    (clamped at the last entry).
    """
    s = spec.strip()
    try:
        if s == "identity":
            return IdentityFn()
        if s.startswith("affine:"):
            a, c = s[len("affine:") :].split(",")
            return AffineFn(int(a), int(c))
        if s.startswith("table:"):
            vals = tuple(int(v) for v in s[len("table:") :].split(","))
            return TableFn(vals)
    except ValueError as e:
        raise ConfigError(f"bad f-spec {spec!r}: {e}") from None
    raise ConfigError(
        f"bad f-spec {spec!r}; expected identity | affine:a,c | table:v0,v1,..."
    )


def _moduli_from(cfg: dict):
    if "moduli" in cfg:
        return moduli_from_config(cfg["moduli"])
    if "instance" in cfg:
        for inst in stock_instances():
            if inst.name == cfg["instance"]:
                return inst.moduli
        raise ConfigError(f"unknown stock instance {cfg['instance']!r}")
    raise ConfigError("config needs 'moduli' or 'instance'")


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    report = run_experiment(
        cfg, args.out, seed=args.seed, cap=args.cap, thin=args.thin
    )
    for chk in report["checks"]:
        print(f"[{chk['status'].upper():>12}] {chk['name']}")
        for note in chk.get("notes", []):
            print(f"{'':>15}note: {note}")
        if chk["status"] == "fail" and chk.get("violations"):
            first = chk["violations"][0]
            print(f"{'':>15}first violation: {first}")
    print(f"wrote {args.out}/trajectory.csv and {args.out}/report.json")
    return 0 if report["status"] == "pass" else 1


def cmd_rates(args) -> int:
    cfg = load_config(args.config)
    m = _moduli_from(cfg)
    k, cap = args.k, args.cap
    rows = [
        ("G", rate_G(m.N, m.B, m.L, k, cap=cap)),
        ("nu1", nu1(m, k, cap=cap)),
        ("nu2", nu2(m, k, cap=cap)),
        ("dr_gap_threshold", dr_gap_threshold(m, k, cap=cap)),
    ]
    if args.f is not None:
        fn = parse_fspec(args.f)
        rows += [
            ("mu", mu(m, k, fn, cap=cap)),
            ("mu2", mu2(m, k, fn, cap=cap)),
            ("mu3", mu3(m, k, fn, cap=cap)),
            ("mu4", mu4(m, k, fn, cap=cap)),
            ("mu5", mu5(m, k, fn, cap=cap)),
        ]
    width = max(len(name) for name, _ in rows)
    for name, value in rows:
        print(f"{name:<{width}}  k={k}  {value}")
    return 0


def cmd_validate(args) -> int:
    cfg = load_config(args.config)
    report = validate_from_config(cfg, horizon=args.horizon, k_max=args.k_max)
    for line in report.summary_lines():
        print(line)
    return 0 if report.ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tiksplit",
        description="Certified-rate harness for regularized splitting iterations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment config end to end")
    p_run.add_argument("config", help="path to a JSON experiment config")
    p_run.add_argument("--out", default="out", help="output directory (default: out)")
    p_run.add_argument("--seed", type=int, default=None, help="override the config seed")
    p_run.add_argument(
        "--cap", type=int, default=DEFAULT_CAP, help="saturation cap for rate values"
    )
    p_run.add_argument(
        "--thin", type=int, default=1, help="write every THIN-th trajectory row"
    )
    p_run.set_defaults(func=cmd_run)

    p_rates = sub.add_parser("rates", help="print certified thresholds")
    p_rates.add_argument("config", help="JSON config with 'moduli' or 'instance'")
    p_rates.add_argument("--k", type=int, default=0, help="error index (default 0)")
    p_rates.add_argument(
        "--f",
        default=None,
        help="counterexample function: identity | affine:a,c | table:v0,v1,...",
    )
    p_rates.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p_rates.set_defaults(func=cmd_rates)

    p_val = sub.add_parser("validate", help="check the schedule against its witnesses")
    p_val.add_argument("config", help="JSON config with schedule and moduli")
    p_val.add_argument("--horizon", type=int, default=10**5)
    p_val.add_argument("--k-max", type=int, default=8, dest="k_max")
    p_val.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
