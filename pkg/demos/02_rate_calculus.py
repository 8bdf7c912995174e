"""Tour of the certified-rate calculus on the two stock instances.

Every bound is a plain natural number computed from the witnesses
(h, b, D, B, L, ell, N) by exact integer arithmetic; saturating
arithmetic caps the blow-up so that astronomically large bounds print
as SATURATED instead of hanging the process.  Raising the cap turns a
saturated value back into an exact integer whenever one exists below
the new cap.

Run:  python3 demos/02_rate_calculus.py
"""

from tiksplit import (
    dr_gap_threshold,
    mu,
    mu5,
    nu1,
    nu2,
    projection_bound,
    rate_G,
    stock_instances,
)

for inst in stock_instances():
    m = inst.moduli
    print(f"== instance {inst.name!r} "
          f"(ell={m.ell}, N={m.N}) ==")
    print(f"{'k':>2} {'G':>8} {'nu1':>26} {'nu2':>30} {'dr_gap_threshold':>30}")
    for k in range(3):
        print(f"{k:>2} {str(rate_G(m.N, m.B, m.L, k)):>8}"
              f" {str(nu1(m, k)):>26} {str(nu2(m, k)):>30}"
              f" {str(dr_gap_threshold(m, k)):>30}")
    print()

sqrt = stock_instances()[1].moduli
print("== saturation and raised caps ==")
harm = stock_instances()[0].moduli
v_def = nu2(harm, 0)
v_big = nu2(harm, 0, cap=10**60)
print(f"harmonic nu2(0) at default cap : {v_def}")
print(f"harmonic nu2(0) at cap 10^60   : {v_big}")

print("\n== the projection-search bound grows through iterated squaring ==")
print(f"projection_bound(N=1, k=0, f=0) exact at cap 10^50:")
print(f"  {projection_bound(1, 0, lambda n: 0, cap=10**50)}")

print("\n== metastability bounds saturate for honest witnesses ==")
f = lambda n: 2 * n + 10
print(f"sqrt mu(0, 2n+10)  = {mu(sqrt, 0, f)}")
print(f"sqrt mu5(0, 2n+10) = {mu5(sqrt, 0, f)}")
print("(the verification harness therefore checks these bounds through an")
print(" injected inner bound; see demos/05_metastability_scan.py)")
