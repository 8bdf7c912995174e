"""Damped relaxed two-resolvent (Douglas-Rachford style) iteration.

The run alternates two resolvents through reflections; its shadow
sequences y_n, z_n straddle the two constraint sets and their gap
|z_n - y_n| is the quantity the calculus certifies.  The exact algebra
z_n - y_n = (x_{n+1} - beta_n x_n)/lambda_n ties the gap to the stored
iterates, so bookkeeping errors cannot hide.

Run:  python3 demos/04_douglas_rachford_gap.py
"""

import json
from pathlib import Path

import numpy as np

from tiksplit import (
    AffineResolvent,
    SoftThreshold,
    check_dr_gap,
    dr_gap_threshold,
    run_experiment,
    run_tdr,
    stock_instances,
)

HERE = Path(__file__).parent
cfg = json.loads((HERE / "configs" / "dr_gap_sqrt.json").read_text())

print("== running the shipped config ==")
report = run_experiment(cfg, HERE / "out" / "dr")
for chk in report["checks"]:
    print(f"  {chk['name']:<28} {chk['status']}")
    for note in chk.get("notes", []):
        print(f"      note: {note}")

inst = stock_instances()[1]
prob = cfg["problem"]
J1 = SoftThreshold(prob["J1"]["gamma"], step=prob["J1"]["step"])
J2 = AffineResolvent(np.array(prob["J2"]["Q"]), np.array(prob["J2"]["q"]), 1.0)
rng = np.random.default_rng(4)
x0 = rng.normal(0.0, 0.3, size=5)

traj = run_tdr(J1, J2, inst.schedule, x0, 50_000)
gap = np.linalg.norm(traj.z - traj.y, axis=1)
print("\n== observed gap decay ==")
for n in (0, 10, 100, 1000, 10_000, 49_999):
    print(f"  n={n:>6}  |z_n - y_n| = {gap[n]:.3e}")

res = check_dr_gap(traj, inst.moduli, k_max=0)
print(f"\nexact-identity residual over the whole run: "
      f"{res.details['max_identity_residual']:.2e}")

print("\n== certified gap thresholds (raw witnesses, desk-scale horizon) ==")
for k in range(3):
    t = dr_gap_threshold(inst.moduli, k)
    print(f"  k={k}: gap <= 1/{3 * (k + 1)} certified from n = {t}")
print("(these sit past this horizon; the long-horizon streaming checker in the")
print(" test suite drives the k=0 threshold to completion)")
