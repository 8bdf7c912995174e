"""Checks that pit every certified bound against actual data.

Three kinds of evidence meet here:

* trajectory checks: run a scheme, then test the certified inequalities
  (boundedness, asymptotic regularity, the two-resolvent gap, strong
  convergence) index by index;
* brute-force searches: find a metastability witness by direct pairwise
  comparison and confirm it respects the certified bound whenever that
  bound is exactly representable;
* recurrence oracles: generate random admissible instances of the two
  scalar recurrence lemmas, simulate them at their upper envelope, and
  test the thresholds; deliberately corrupted witnesses must be caught,
  which keeps the checkers demonstrably non-vacuous.

A threshold that saturates or points beyond the available horizon makes
that instance "unverifiable" -- reported as such, never silently passed.
All float comparisons of certified bounds carry additive slack 1e-9
(round-off only; the mathematics is exact).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .iterations import Trajectory
from .moduli import QuantitativeModuli, Schedule
from .operators import Operator, as_vector, fixed_point_residual
from .rates import (
    as_counterexample,
    dr_gap_threshold,
    mu,
    nu1,
    nu2,
)
from .satnat import DEFAULT_CAP, BoundedNat

__all__ = [
    "CheckResult",
    "check_boundedness",
    "check_asymptotic_regularity",
    "check_asymptotic_regularity_streaming",
    "check_strong_convergence",
    "check_dr_gap",
    "check_dr_gap_streaming",
    "find_metastability_witness",
    "oracle_lemma_theta",
    "oracle_lemma_sigma",
]

SLACK = 1e-9


@dataclass
class CheckResult:
    name: str
    status: str  # "pass" | "fail" | "unverifiable" | "no-witness"
    details: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.status != "fail"

    def to_dict(self) -> dict:
        out = {"name": self.name, "status": self.status}
        if self.details:
            out["details"] = self.details
        if self.violations:
            out["violations"] = [list(v) for v in self.violations[:10]]
            out["violation_count"] = len(self.violations)
        if self.notes:
            out["notes"] = list(self.notes)
        return out


def _finish(res: CheckResult) -> CheckResult:
    if res.violations:
        res.status = "fail"
    return res


# ----------------------------------------------------------------------
# Boundedness
# ----------------------------------------------------------------------


def check_boundedness(
    traj: Trajectory, T: Operator, p, N: int, slack: float = SLACK
) -> CheckResult:
    """Norm bounds relative to a fixed point ``p`` of ``T``.

    Requires ``p`` to actually be a fixed point (residual <= 1e-10); that
    much is a precondition, not a finding.  ``N`` is NOT pre-validated:
    an undersized ``N`` must show up as a failed bound, keeping the
    negative control honest.  Checked for every ``n``:

        |x_n - p| <= N,   |x_n| <= 2N,   |T(b_n x_n)| <= 3N,
        |x_{n+1} - p| <= b_n |x_n - p| + (1 - b_n)|p|.
    """
    p = as_vector(p)
    res_p = fixed_point_residual(T, p)
    if res_p > 1e-10:
        raise ValueError(f"p is not a fixed point (residual {res_p:.3e})")
    out = CheckResult("boundedness", "pass", details={"N": N, "n_max": traj.n_max})

    dist = np.linalg.norm(traj.x - p, axis=1)
    xnorm = np.linalg.norm(traj.x, axis=1)
    normp = float(np.linalg.norm(p))

    if float(max(np.linalg.norm(traj.x[0] - p), normp)) > N + slack:
        out.notes.append("N is below max(|x0-p|, |p|); bounds are expected to fail")

    for label, vals, bound in (
        ("dist_to_p", dist, N + slack),
        ("norm_x", xnorm, 2 * N + slack),
    ):
        bad = np.flatnonzero(vals > bound)
        for n in bad[:5]:
            out.violations.append((label, int(n), float(vals[n]), bound))
        out.details[f"max_{label}"] = float(vals.max())

    bx = traj.betas[:, None] * traj.x[:-1]
    tb = np.linalg.norm(T(bx), axis=1)
    bad = np.flatnonzero(tb > 3 * N + slack)
    for n in bad[:5]:
        out.violations.append(("norm_T_beta_x", int(n), float(tb[n]), 3 * N + slack))
    out.details["max_norm_T_beta_x"] = float(tb.max())

    rhs = traj.betas * dist[:-1] + (1.0 - traj.betas) * normp
    bad = np.flatnonzero(dist[1:] > rhs + slack)
    for n in bad[:5]:
        out.violations.append(
            ("per_step_contraction", int(n), float(dist[n + 1]), float(rhs[n]))
        )
    return _finish(out)


# ----------------------------------------------------------------------
# Asymptotic regularity
# ----------------------------------------------------------------------


def _threshold_entries(m, k_list, horizon, rate_fn, cap):
    """(k, threshold) pairs small enough to check, plus notes for the rest."""
    usable, notes = [], []
    for k in k_list:
        t = rate_fn(m, k, cap=cap)
        if t.is_saturated:
            notes.append(f"k={k}: threshold SATURATED({t.cap}), unverifiable")
        elif t.value > horizon:
            notes.append(f"k={k}: threshold {t.value} beyond horizon {horizon}, unverifiable")
        else:
            usable.append((k, t.value))
    return usable, notes


def check_asymptotic_regularity(
    traj: Trajectory,
    T: Operator,
    m: QuantitativeModuli,
    k_max: int,
    slack: float = SLACK,
    cap: int = DEFAULT_CAP,
) -> CheckResult:
    """Certified residual decay on a stored trajectory.

    For each ``k <= k_max`` whose threshold is exact and within range:
    step differences ``|x_{n+1}-x_n| <= 1/(k+1)`` for ``n`` from ``nu1(k)``
    to ``n_max - 1``, and fixed-point residuals ``|T(x_n)-x_n| <= 1/(k+1)``
    for ``n`` from ``nu2(k)`` to ``n_max``.
    """
    out = CheckResult("asymptotic_regularity", "pass", details={"k_checked": []})
    ks = list(range(k_max + 1))

    nu1s, notes1 = _threshold_entries(m, ks, traj.n_max - 1, nu1, cap)
    nu2s, notes2 = _threshold_entries(m, ks, traj.n_max, nu2, cap)
    out.notes.extend(f"nu1 {s}" for s in notes1)
    out.notes.extend(f"nu2 {s}" for s in notes2)
    if not nu1s and not nu2s:
        out.status = "unverifiable"
        return out

    if nu1s:
        start0 = min(t for _, t in nu1s)
        sd = np.linalg.norm(np.diff(traj.x[start0:], axis=0), axis=1)
        for k, t in nu1s:
            seg = sd[t - start0 :]
            bound = 1.0 / (k + 1)
            bad = np.flatnonzero(seg > bound + slack)
            for j in bad[:5]:
                out.violations.append(("step", k, int(t + j), float(seg[j]), bound))
            out.details["k_checked"].append(
                {"kind": "step", "k": k, "threshold": t, "max": float(seg.max())}
            )

    if nu2s:
        start0 = min(t for _, t in nu2s)
        xs = traj.x[start0:]
        fr = np.linalg.norm(T(xs) - xs, axis=1)
        for k, t in nu2s:
            seg = fr[t - start0 :]
            bound = 1.0 / (k + 1)
            bad = np.flatnonzero(seg > bound + slack)
            for j in bad[:5]:
                out.violations.append(("fix", k, int(t + j), float(seg[j]), bound))
            out.details["k_checked"].append(
                {"kind": "fix", "k": k, "threshold": t, "max": float(seg.max())}
            )
    return _finish(out)


def _regimes(usable, slack):
    """Sorted (threshold, squared bound) pairs, tightening as n grows."""
    merged = {}
    for k, t in usable:
        b = (1.0 / (k + 1) + slack) ** 2
        merged[t] = min(merged.get(t, math.inf), b)
    regime = sorted(merged.items())
    # drop entries dominated by an earlier, tighter one
    out = []
    cur = math.inf
    for t, b in regime:
        if b < cur:
            out.append((t, b))
            cur = b
    return out


def check_asymptotic_regularity_streaming(
    T: Operator,
    s: Schedule,
    m: QuantitativeModuli,
    x0,
    n_max: int,
    k_list=(0, 1, 2),
    slack: float = SLACK,
    cap: int = DEFAULT_CAP,
) -> CheckResult:
    """Storage-free version for horizons past what fits in memory.

    Runs the damped relaxed iteration and checks both residual families
    against the strictest bound applicable at each index.  Squared-norm
    comparisons keep per-step cost flat; the fixed-point residual costs an
    extra operator call per step, paid only once some ``nu2`` threshold
    has been reached.
    """
    out = CheckResult(
        "asymptotic_regularity_streaming",
        "pass",
        details={"n_max": n_max, "k_list": list(k_list)},
    )
    nu1s, notes1 = _threshold_entries(m, k_list, n_max - 1, nu1, cap)
    nu2s, notes2 = _threshold_entries(m, k_list, n_max, nu2, cap)
    out.notes.extend(f"nu1 {s_}" for s_ in notes1)
    out.notes.extend(f"nu2 {s_}" for s_ in notes2)
    if not nu1s and not nu2s:
        out.status = "unverifiable"
        return out

    reg1 = _regimes(nu1s, slack)
    reg2 = _regimes(nu2s, slack)
    first2 = reg2[0][0] if reg2 else n_max + 1

    betas = s.beta_values(n_max - 1)[: n_max]
    lams = s.lam_values(n_max - 1)[: n_max]
    if lams.max() > 1.0 + 1e-12:
        raise ValueError("streaming check expects relaxation in (0, 1]")

    cur = as_vector(x0)
    i1 = i2 = 0
    b1 = b2 = math.inf
    max1 = {k: 0.0 for k, _ in nu1s}
    max2 = {k: 0.0 for k, _ in nu2s}
    for n in range(n_max):
        bx = betas[n] * cur
        nxt = bx + lams[n] * (T(bx) - bx)
        if i1 < len(reg1) and n >= reg1[i1][0]:
            b1 = reg1[i1][1]
            i1 += 1
        if b1 < math.inf:
            diff = nxt - cur
            dd = float(diff @ diff)
            if dd > b1:
                out.violations.append(("step", n, math.sqrt(dd)))
            for k, t in nu1s:
                if n >= t and dd > max1[k]:
                    max1[k] = dd
        cur = nxt
        mth = n + 1
        if mth >= first2:
            if i2 < len(reg2) and mth >= reg2[i2][0]:
                b2 = reg2[i2][1]
                i2 += 1
            r = T(cur) - cur
            rr = float(r @ r)
            if rr > b2:
                out.violations.append(("fix", mth, math.sqrt(rr)))
            for k, t in nu2s:
                if mth >= t and rr > max2[k]:
                    max2[k] = rr
    if not np.all(np.isfinite(cur)):
        raise ValueError("non-finite iterate during streaming check")
    out.details["k_checked"] = [
        {"kind": "step", "k": k, "threshold": t, "max": math.sqrt(max1[k])}
        for k, t in nu1s
    ] + [
        {"kind": "fix", "k": k, "threshold": t, "max": math.sqrt(max2[k])}
        for k, t in nu2s
    ]
    if len(out.violations) > 50:
        del out.violations[50:]
    return _finish(out)


# ----------------------------------------------------------------------
# Strong convergence and metastability
# ----------------------------------------------------------------------


def check_strong_convergence(traj: Trajectory, target, tol: float) -> CheckResult:
    """Distance of the final iterate to the known limit, plus a thinned
    distance curve for reports."""
    target = as_vector(target)
    dist = np.linalg.norm(traj.x - target, axis=1)
    idx = np.unique(
        np.clip(
            np.round(np.geomspace(1, traj.n_max + 1, 33)).astype(np.int64) - 1,
            0,
            traj.n_max,
        )
    )
    out = CheckResult(
        "strong_convergence",
        "pass",
        details={
            "tol": tol,
            "final_distance": float(dist[-1]),
            "curve": [[int(i), float(dist[i])] for i in idx],
        },
    )
    if dist[-1] > tol:
        out.violations.append(("final_distance", traj.n_max, float(dist[-1]), tol))
    return _finish(out)


def find_metastability_witness(
    traj: Trajectory,
    k: int,
    f,
    *,
    moduli: QuantitativeModuli | None = None,
    cap: int = DEFAULT_CAP,
    scan_limit: int = 20_000,
    psi_fn=None,
) -> CheckResult:
    """Least ``n`` such that all iterates in the window ``[n, f(n)]`` lie
    within ``1/(k+1)`` of each other, by direct pairwise comparison.

    No slack here: the certified tolerance is taken at face value.  When
    ``moduli`` is supplied and the certified bound ``mu(k, f)`` is exact
    (not saturated), a found witness must satisfy ``witness <= mu`` --
    anything else is a hard failure of the calculus.  ``psi_fn`` passes
    through to the bound computation.
    """
    fc = as_counterexample(f)
    tol = 1.0 / (k + 1)
    tol2 = tol * tol
    out = CheckResult("metastability_witness", "no-witness", details={"k": k})
    witness = None
    limit = min(scan_limit, traj.n_max)
    for n in range(limit + 1):
        fn = fc(BoundedNat.of(n, cap))
        if fn.is_saturated:
            out.notes.append(f"f({n}) saturated; window unbounded, scan stopped")
            break
        end = fn.value
        if end > traj.n_max:
            out.notes.append(
                f"f({n}) = {end} exceeds trajectory length {traj.n_max}; scan stopped"
            )
            break
        if end <= n:
            witness = n  # window has at most one point
            break
        w = traj.x[n : end + 1]
        ok = True
        for i in range(w.shape[0] - 1):
            d = w[i + 1 :] - w[i]
            if float(np.max(np.einsum("ij,ij->i", d, d))) > tol2:
                ok = False
                break
        if ok:
            witness = n
            break
    if witness is None:
        return out

    out.status = "pass"
    out.details["witness"] = witness
    out.details["window_end"] = int(fc(BoundedNat.of(witness, cap)).value)
    if moduli is not None:
        bound = mu(moduli, k, f, cap=cap, psi_fn=psi_fn)
        out.details["mu"] = str(bound)
        if not bound.is_saturated and witness > bound.value:
            out.violations.append(("witness_above_mu", witness, bound.value))
            out.status = "fail"
    return out


# ----------------------------------------------------------------------
# Two-resolvent gap
# ----------------------------------------------------------------------


def check_dr_gap(
    traj: Trajectory,
    m: QuantitativeModuli,
    k_max: int,
    slack: float = SLACK,
    ident_tol: float = 1e-10,
    cap: int = DEFAULT_CAP,
) -> CheckResult:
    """The shadow-sequence gap of a two-resolvent run.

    Two layers: the exact algebra ``z_n - y_n = (x_{n+1} - b_n x_n)/l_n``
    (a reconstruction from stored arrays, catching bookkeeping bugs), and
    the certified decay ``|z_i - y_i| <= 1/(3(k+1))`` for ``i`` past the
    threshold ``max(nu1(6l(k+1)-1), b(12lN(k+1)-1))``.
    """
    if traj.y is None or traj.z is None:
        raise ValueError("trajectory has no shadow sequences")
    out = CheckResult("dr_gap", "pass", details={})
    gap = traj.z - traj.y
    recon = (traj.x[1:] - traj.betas[:, None] * traj.x[:-1]) / traj.lambdas[:, None]
    ident = np.linalg.norm(gap - recon, axis=1)
    out.details["max_identity_residual"] = float(ident.max())
    bad = np.flatnonzero(ident > ident_tol)
    for n in bad[:5]:
        out.violations.append(("identity", int(n), float(ident[n]), ident_tol))

    gn = np.linalg.norm(gap, axis=1)
    usable, notes = _threshold_entries(
        m, list(range(k_max + 1)), traj.n_max - 1, dr_gap_threshold, cap
    )
    out.notes.extend(notes)
    checked = []
    for k, t in usable:
        bound = 1.0 / (3 * (k + 1))
        seg = gn[t:]
        bad = np.flatnonzero(seg > bound + slack)
        for j in bad[:5]:
            out.violations.append(("gap", k, int(t + j), float(seg[j]), bound))
        checked.append({"k": k, "threshold": t, "max_gap": float(seg.max())})
    out.details["k_checked"] = checked
    if not checked:
        out.notes.append("no gap threshold within horizon; only identity checked")
    return _finish(out)


def check_dr_gap_streaming(
    J1: Operator,
    J2: Operator,
    s: Schedule,
    m: QuantitativeModuli,
    x0,
    n_max: int,
    k_list=(0,),
    slack: float = SLACK,
    cap: int = DEFAULT_CAP,
) -> CheckResult:
    """Storage-free gap check: runs the two-resolvent recurrence and
    compares ``|z_n - y_n|`` against every applicable threshold bound."""
    out = CheckResult(
        "dr_gap_streaming", "pass", details={"n_max": n_max, "k_list": list(k_list)}
    )
    usable, notes = _threshold_entries(m, k_list, n_max - 1, dr_gap_threshold, cap)
    out.notes.extend(notes)
    if not usable:
        out.status = "unverifiable"
        return out
    regs = []
    seen = {}
    for k, t in usable:
        b = (1.0 / (3 * (k + 1)) + slack) ** 2
        seen[t] = min(seen.get(t, math.inf), b)
    curb = math.inf
    for t, b in sorted(seen.items()):
        if b < curb:
            regs.append((t, b))
            curb = b

    betas = s.beta_values(n_max - 1)[: n_max]
    lams = s.lam_values(n_max - 1)[: n_max]
    if lams.max() > 2.0 + 1e-12 or lams.min() <= 0.0:
        raise ValueError("raw relaxation must lie in (0, 2]")
    cur = as_vector(x0)
    i = 0
    bnd = math.inf
    maxg = {k: 0.0 for k, _ in usable}
    for n in range(n_max):
        bx = betas[n] * cur
        yn = J2(bx)
        zn = J1(2.0 * yn - bx)
        g = zn - yn
        if i < len(regs) and n >= regs[i][0]:
            bnd = regs[i][1]
            i += 1
        if bnd < math.inf:
            gg = float(g @ g)
            if gg > bnd:
                out.violations.append(("gap", n, math.sqrt(gg)))
                if len(out.violations) > 50:
                    return _finish(out)
            for k, t in usable:
                if n >= t and gg > maxg[k]:
                    maxg[k] = gg
        cur = bx + lams[n] * g
    if not np.all(np.isfinite(cur)):
        raise ValueError("non-finite iterate during streaming gap check")
    out.details["k_checked"] = [
        {"k": k, "threshold": t, "max_gap": math.sqrt(maxg[k])} for k, t in usable
    ]
    return _finish(out)


# ----------------------------------------------------------------------
# Recurrence-lemma oracles
# ----------------------------------------------------------------------


def _divergence_witness(prefix: np.ndarray, j: int) -> int:
    """Least m with prefix[m-1] = sum_{i=1}^{m} a_i >= j."""
    pos = int(np.searchsorted(prefix, j, side="left"))
    if pos >= prefix.shape[0]:
        raise RuntimeError("oracle horizon too small for requested divergence")
    return pos + 1


def oracle_lemma_theta(
    trials: int = 1000, seed: int = 2024, k_max: int = 5, corrupt: bool = False
) -> CheckResult:
    """Randomized upper-envelope test of the noisy damped recurrence.

    Each trial draws admissible data: weights ``a_n`` jittered uniformly
    above a trial floor, a vanishing ``r_n`` under a hyperbolic envelope
    (rate witness taken from the envelope), and a summable geometric
    ``g_n`` (Cauchy witness from the exact tail sum, repaired upward by
    one if float rounding left it short).  The recurrence is simulated at
    equality -- the hardest admissible instance -- and the threshold must
    silence it for every ``k <= k_max``.

    ``corrupt=True`` swaps the Cauchy witness for the constant zero while
    planting a unit-scale spike in ``g_n``; the claimed threshold then
    lands well before the spike, so violations are guaranteed.  Callers
    use it to prove the checker can fail.
    """
    rng = np.random.default_rng(seed)
    H = 2600
    t = trials
    d = rng.integers(1, 9, size=t)
    lo = rng.uniform(0.15, 0.6, size=t)
    alpha = rng.uniform(lo[:, None], 1.0, size=(t, H))
    c_r = rng.uniform(0.5, 2.0, size=t)
    ns = np.arange(H)
    r = rng.uniform(0.0, 1.0, size=(t, H)) * d[:, None] / (1.0 + ns / c_r[:, None])
    q = rng.uniform(0.3, 0.9, size=t)
    amp = rng.uniform(0.1, 1.0, size=t) * d
    gam = rng.uniform(0.0, 1.0, size=(t, H)) * amp[:, None] * q[:, None] ** ns

    spike_at = 25
    if corrupt:
        d = np.maximum(d, 2)
        alpha = np.ones((t, H))
        r = np.zeros((t, H))
        gam = amp[:, None] * q[:, None] ** ns
        gam[:, spike_at] = d

    # upper-envelope simulation, worst admissible start s_0 = d; the
    # clamp keeps the a-priori bound s_n <= d true (clamping preserves
    # the recurrence inequality, so the clamped path is still the
    # pointwise-largest admissible sequence for the drawn data)
    s = d.astype(np.float64)
    dmax = d.astype(np.float64)
    S = np.empty((t, H + 1))
    S[:, 0] = s
    for n in range(H):
        s = (1.0 - alpha[:, n]) * s + alpha[:, n] * r[:, n] + gam[:, n]
        s = np.minimum(s, dmax)
        S[:, n + 1] = s

    prefix = np.cumsum(alpha[:, 1:], axis=1)

    def R_wit(i: int, k: int) -> int:
        if corrupt:
            return 0
        return math.ceil(c_r[i] * (int(d[i]) * (k + 1) - 1))

    def G_wit(i: int, k: int) -> int:
        if corrupt:
            return 0
        # least g with amp * q^(g+1)/(1-q) <= 1/(k+1), from the exact log,
        # bumped if float rounding left the tail a hair too big
        qq, a = float(q[i]), float(amp[i])
        target = (1.0 - qq) / (k + 1)
        g = max(0, math.ceil(math.log(a * (k + 1) / (1.0 - qq)) / -math.log(qq)))
        while a * qq ** (g + 1) > target * (1.0 + 1e-12):
            g += 1
        return g

    out = CheckResult(
        "oracle_theta",
        "pass",
        details={"trials": trials, "seed": seed, "k_max": k_max, "corrupt": corrupt},
    )
    for i in range(t):
        for k in range(k_max + 1):
            j = 3 * k + 2
            M = max(R_wit(i, j), G_wit(i, j) + 1)
            arg = M - 1 + math.ceil(math.log(3 * int(d[i]) * (k + 1)))
            th = _divergence_witness(prefix[i], arg) + 1
            if th > H:
                raise RuntimeError("oracle horizon too small for threshold")
            bound = 1.0 / (k + 1) + SLACK
            seg = S[i, th:]
            if seg.size and float(seg.max()) > bound:
                n_bad = th + int(np.argmax(seg > bound))
                out.violations.append((i, k, n_bad, float(S[i, n_bad])))
    out.details["violation_count"] = len(out.violations)
    if len(out.violations) > 20:
        del out.violations[20:]
    return _finish(out)


def oracle_lemma_sigma(
    trials: int = 1000, seed: int = 4096, k_max: int = 5, corrupt: bool = False
) -> CheckResult:
    """Randomized test of the interval-perturbed damped recurrence.

    Per trial: weights in a random band inside (0,1), a random tolerance
    index ``k`` and window start ``n``; the perturbation bounds hold on
    ``[n, q]`` where ``q`` is drawn after the threshold is computed from
    the realized weights, and are adversarially large outside the window
    (clamped so the sequence stays admissible).  Within ``[sigma(k,n), q]``
    the simulated envelope must sit under ``1/(k+1)``.

    ``corrupt=True`` claims a zero divergence witness while making the
    weights tiny, so the sequence cannot have decayed by the claimed
    threshold; guaranteed violations.
    """
    rng = np.random.default_rng(seed)
    H = 1400
    t = trials
    d = rng.integers(2, 9, size=t)
    ks = rng.integers(0, k_max + 1, size=t)
    n0 = rng.integers(0, 41, size=t)
    lo = rng.uniform(0.1, 0.4, size=t)
    hi = rng.uniform(0.6, 0.95, size=t)
    alpha = rng.uniform(lo[:, None], hi[:, None], size=(t, H))
    if corrupt:
        u = rng.uniform(0.005, 0.02, size=t)
        alpha = np.broadcast_to(u[:, None], (t, H)).copy()

    prefix = np.cumsum(alpha[:, 1:], axis=1)
    sig = np.empty(t, dtype=np.int64)
    for i in range(t):
        if corrupt:
            sig[i] = 1  # claimed witness: constant zero function
        else:
            arg = int(n0[i]) + math.ceil(math.log(3 * int(d[i]) * (int(ks[i]) + 1)))
            sig[i] = _divergence_witness(prefix[i], arg) + 1
    qend = sig + rng.integers(10, 301, size=t)
    if int(qend.max()) >= H:
        raise RuntimeError("oracle horizon too small")

    idx = np.arange(H)
    in_win = (idx[None, :] >= n0[:, None]) & (idx[None, :] <= qend[:, None])
    rbound = 1.0 / (3.0 * (ks + 1.0))
    vbound = rbound / (qend + 1.0)
    v = np.where(
        in_win,
        rng.uniform(0.0, 1.0, size=(t, H)) * vbound[:, None],
        rng.uniform(0.0, 1.0, size=(t, H)) * d[:, None],
    )
    rr = np.where(
        in_win,
        rng.uniform(0.0, 1.0, size=(t, H)) * rbound[:, None],
        rng.uniform(0.0, 1.0, size=(t, H)) * d[:, None],
    )
    if corrupt:
        v = np.zeros((t, H))
        rr = np.broadcast_to(rbound[:, None], (t, H)).copy()

    s = d.astype(np.float64)
    S = np.empty((t, H + 1))
    S[:, 0] = s
    dmax = d.astype(np.float64)
    for i_step in range(H):
        s = (1.0 - alpha[:, i_step]) * (s + v[:, i_step]) + alpha[:, i_step] * rr[:, i_step]
        # the lemma premises an a-priori bound d; clamping keeps the
        # simulated sequence admissible under adversarial off-window noise
        s = np.minimum(s, dmax)
        S[:, i_step + 1] = s

    out = CheckResult(
        "oracle_sigma",
        "pass",
        details={"trials": trials, "seed": seed, "k_max": k_max, "corrupt": corrupt},
    )
    for i in range(t):
        a, b = int(sig[i]), int(qend[i])
        if a > b:
            continue
        bound = 1.0 / (int(ks[i]) + 1) + SLACK
        seg = S[i, a : b + 1]
        if float(seg.max()) > bound:
            n_bad = a + int(np.argmax(seg > bound))
            out.violations.append((i, int(ks[i]), n_bad, float(S[i, n_bad])))
    out.details["violation_count"] = len(out.violations)
    if len(out.violations) > 20:
        del out.violations[20:]
    return _finish(out)
