"""Metastability: certified no-escape windows for arbitrary window maps.

Full convergence of the damped scheme has no computable rate in
general, but for every tolerance 1/(k+1) and every window map f there
is a certified index mu(k, f) by which the trajectory has settled on
some window [n, f(n)].  The honest bounds saturate (they pass through
an iterated-squaring projection search), so the scan below finds the
empirical witness and, where an injected inner bound makes the outer
arithmetic exact, checks witness <= mu.

Run:  python3 demos/05_metastability_scan.py
"""

import numpy as np

from tiksplit import (
    ConstFn,
    HyperplaneProjection,
    QuantitativeModuli,
    Trajectory,
    find_metastability_witness,
    mu,
    run_tkm,
    stock_instances,
)

inst = stock_instances()[1]
T = HyperplaneProjection([1.0, 0, 0, 0, 0], 1.0)
rng = np.random.default_rng(7)
u = rng.normal(size=5)
x0 = np.array([1.0, 0, 0, 0, 0]) + 0.9 * u / np.linalg.norm(u)
traj = run_tkm(T, inst.schedule, x0, 100_000)

print("== empirical witnesses on the hyperplane run ==")
fs = {
    "f(n) = 2n+10": lambda n: 2 * n + 10,
    "f(n) = n+1000": lambda n: n + 1000,
}
for label, f in fs.items():
    for k in (0, 4, 9):
        res = find_metastability_witness(traj, k, f)
        w = res.details.get("witness")
        print(f"  k={k:>2}, {label:<14} witness n = {w}"
              f" (window ends at {res.details.get('window_end')})")

print("\n== the certified bound saturates on honest witnesses ==")
b = mu(inst.moduli, 9, lambda n: 2 * n + 10)
print(f"  sqrt mu(9, 2n+10) = {b}")

print("\n== injected inner bound: exact arithmetic, checked both ways ==")
toy = QuantitativeModuli(h=ConstFn(1), b=ConstFn(0), D=ConstFn(0),
                         B=ConstFn(0), L=ConstFn(0), ell=1, N=1)
stub = lambda k, fn: 0
exact = mu(toy, 0, lambda n: n + 1, psi_fn=stub)
print(f"  toy mu(0, n+1) with stub inner bound = {exact}")
res = find_metastability_witness(
    traj, 0, lambda n: n + 1, moduli=toy, psi_fn=stub
)
print(f"  witness {res.details['witness']} <= mu {res.details['mu']}:"
      f" status {res.status}")
late = traj.x.copy()
late[:3] = np.array([[0.0] * 5, [10.0] * 5, [20.0] * 5])
# assembled by hand: the settle point moves past the exact bound
fake = Trajectory(scheme="tkm", x=late[:5], betas=np.ones(4), lambdas=np.ones(4))
res = find_metastability_witness(
    fake, 0, lambda n: n + 1, moduli=toy, psi_fn=stub
)
print(f"  doctored run: status {res.status} ({res.violations})")
