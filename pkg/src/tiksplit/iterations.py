"""Trajectory generation for the regularized splitting schemes.

Four runners share one convention: the full iterate history is kept in
memory as an ``(n_max+1, d)`` float64 array (desk scale tops out around
``10^7 x 10^2``), together with the schedule values actually used at each
step.  Verification needs random access to iterates, so nothing is thrown
away; CSV export offers a thinning stride instead.

The two composed schemes deliberately do NOT reuse the plain runner: they
implement their defining recurrences directly, and the equivalence with
the plain scheme on the composed operator is asserted by tests rather than
by construction.  Collapsing the two routes would make that check vacuous.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .moduli import Schedule
from .operators import Operator, as_vector

__all__ = ["Trajectory", "run_tkm", "run_km", "run_tfb", "run_tdr", "export_csv"]


@dataclass
class Trajectory:
    """A finished run: iterates, per-step schedule values, descriptors.

    ``x`` has shape ``(n_max+1, d)``; ``betas``/``lambdas`` hold the values
    used to produce step ``n -> n+1`` (length ``n_max``; ``lambdas`` is the
    raw relaxation for the two-resolvent scheme).  ``y``/``z`` are the
    shadow sequences of that scheme, shape ``(n_max, d)``.
    """

    scheme: str
    x: np.ndarray
    betas: np.ndarray
    lambdas: np.ndarray
    schedule_descriptor: dict = field(default_factory=dict)
    problem_descriptor: dict = field(default_factory=dict)
    y: np.ndarray | None = None
    z: np.ndarray | None = None

    @property
    def n_max(self) -> int:
        return self.x.shape[0] - 1

    @property
    def dim(self) -> int:
        return self.x.shape[1]


def _check_finite(x: np.ndarray, what: str):
    # vectorized post-run scan; a NaN/Inf mid-run only ever spreads forward,
    # so scanning once at the end loses nothing
    bad = ~np.isfinite(x)
    if bad.any():
        n = int(np.argwhere(bad.any(axis=tuple(range(1, x.ndim))))[0, 0])
        raise ValueError(f"non-finite {what} at step {n}; operator or schedule is bad")


def _prepare(s: Schedule, x0, n_max: int, lam_cap: float, scheme: str):
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    x0 = as_vector(x0)
    betas = s.beta_values(n_max - 1)
    lams = s.lam_values(n_max - 1)
    if betas.min() <= 0.0 or betas.max() > 1.0 + 1e-12:
        raise ValueError(f"{scheme}: beta values must lie in (0, 1]")
    if lams.min() <= 0.0 or lams.max() > lam_cap + 1e-12:
        raise ValueError(f"{scheme}: lambda values must lie in (0, {lam_cap:g}]")
    return x0, betas, lams


def run_tkm(T: Operator, s: Schedule, x0, n_max: int) -> Trajectory:
    """Damped relaxed fixed-point iteration:
    ``x_{n+1} = b_n x_n + l_n (T(b_n x_n) - b_n x_n)``."""
    x0, betas, lams = _prepare(s, x0, n_max, 1.0, "tkm")
    x = np.empty((n_max + 1, x0.shape[0]))
    x[0] = x0
    cur = x0
    for n in range(n_max):
        bx = betas[n] * cur
        cur = bx + lams[n] * (T(bx) - bx)
        x[n + 1] = cur
    _check_finite(x, "iterate")
    return Trajectory(
        scheme="tkm",
        x=x,
        betas=betas,
        lambdas=lams,
        schedule_descriptor=dict(s.descriptor),
        problem_descriptor={"T": T.descriptor},
    )


def run_km(T: Operator, lam, x0, n_max: int) -> Trajectory:
    """Undamped baseline: ``x_{n+1} = x_n + l_n (T(x_n) - x_n)``."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    x0 = as_vector(x0)
    if callable(lam):
        lams = np.asarray(lam(np.arange(n_max)), dtype=np.float64)
    else:
        lams = np.full(n_max, float(lam))
    if lams.min() < 0.0 or lams.max() > 1.0 + 1e-12:
        raise ValueError("km: lambda values must lie in [0, 1]")
    x = np.empty((n_max + 1, x0.shape[0]))
    x[0] = x0
    cur = x0
    for n in range(n_max):
        cur = cur + lams[n] * (T(cur) - cur)
        x[n + 1] = cur
    _check_finite(x, "iterate")
    return Trajectory(
        scheme="km",
        x=x,
        betas=np.ones(n_max),
        lambdas=lams,
        schedule_descriptor={"beta": {"kind": "const", "value": 1.0}},
        problem_descriptor={"T": T.descriptor},
    )


def run_tfb(
    J1: Operator, T2: Operator, gamma: float, s: Schedule, x0, n_max: int
) -> Trajectory:
    """Damped relaxed forward-backward iteration:
    ``x_{n+1} = (1-l_n) b_n x_n + l_n J1(b_n x_n - gamma T2(b_n x_n))``.

    The composed map is averaged, which buys relaxation headroom: the
    weights may fill ``(0, (4 delta - gamma)/(2 delta)]``.
    """
    delta = getattr(T2, "delta", None)
    if delta is None:
        raise ValueError("T2 must carry a cocoercivity constant .delta")
    if gamma <= 0 or (not math.isinf(delta) and gamma > 2.0 * delta + 1e-12):
        raise ValueError("need 0 < gamma <= 2*delta")
    lam_cap = 2.0 if math.isinf(delta) else (4.0 * delta - gamma) / (2.0 * delta)
    x0, betas, lams = _prepare(s, x0, n_max, lam_cap, "tfb")
    x = np.empty((n_max + 1, x0.shape[0]))
    x[0] = x0
    cur = x0
    g = float(gamma)
    for n in range(n_max):
        bx = betas[n] * cur
        cur = (1.0 - lams[n]) * bx + lams[n] * J1(bx - g * T2(bx))
        x[n + 1] = cur
    _check_finite(x, "iterate")
    return Trajectory(
        scheme="tfb",
        x=x,
        betas=betas,
        lambdas=lams,
        schedule_descriptor=dict(s.descriptor),
        problem_descriptor={"J1": J1.descriptor, "T2": T2.descriptor, "gamma": g},
    )


def run_tdr(J1: Operator, J2: Operator, s: Schedule, x0, n_max: int) -> Trajectory:
    """Damped relaxed two-resolvent iteration with raw weights in (0, 2]:

        y_n = J2(b_n x_n)
        z_n = J1(2 y_n - b_n x_n)
        x_{n+1} = b_n x_n + l_n (z_n - y_n)
    """
    x0, betas, lams = _prepare(s, x0, n_max, 2.0, "tdr")
    d = x0.shape[0]
    x = np.empty((n_max + 1, d))
    y = np.empty((n_max, d))
    z = np.empty((n_max, d))
    x[0] = x0
    cur = x0
    for n in range(n_max):
        bx = betas[n] * cur
        yn = J2(bx)
        zn = J1(2.0 * yn - bx)
        y[n] = yn
        z[n] = zn
        cur = bx + lams[n] * (zn - yn)
        x[n + 1] = cur
    _check_finite(x, "iterate")
    _check_finite(y, "shadow iterate")
    _check_finite(z, "shadow iterate")
    return Trajectory(
        scheme="tdr",
        x=x,
        betas=betas,
        lambdas=lams,
        schedule_descriptor=dict(s.descriptor),
        problem_descriptor={"J1": J1.descriptor, "J2": J2.descriptor},
        y=y,
        z=z,
    )


def export_csv(
    traj: Trajectory,
    path,
    T: Operator | None = None,
    thin: int = 1,
    coords: bool = True,
):
    """Write the trajectory as CSV.

    Columns: ``n``, then either every coordinate or just ``norm_x``, then
    ``step_residual`` (defect of the defining recurrence, recomputed from
    scratch) and ``fix_residual`` (``|T(x_n)-x_n|``, needs ``T``).  Floats
    are printed with 17 significant digits, locale-independent.
    """
    if thin < 1:
        raise ValueError("thin must be >= 1")
    rows = np.arange(0, traj.n_max + 1, thin)
    xs = traj.x[rows]

    step_res = np.full(rows.shape[0], np.nan)
    inner_rows = rows[rows < traj.n_max]
    if inner_rows.size:
        b = traj.betas[inner_rows, None]
        lam = traj.lambdas[inner_rows, None]
        bx = b * traj.x[inner_rows]
        if traj.scheme == "tdr":
            pred = bx + lam * (traj.z[inner_rows] - traj.y[inner_rows])
        elif T is not None:
            pred = bx + lam * (T(bx) - bx)
        else:
            pred = None
        if pred is not None:
            res = np.linalg.norm(traj.x[inner_rows + 1] - pred, axis=1)
            step_res[: inner_rows.size] = res

    fix_res = np.full(rows.shape[0], np.nan)
    if T is not None:
        fix_res = np.linalg.norm(T(xs) - xs, axis=1)

    def fmt(v: float) -> str:
        return "nan" if math.isnan(v) else format(v, ".17g")

    with open(path, "w", newline="") as fh:
        if coords:
            head = ["n"] + [f"x{i}" for i in range(traj.dim)]
        else:
            head = ["n", "norm_x"]
        head += ["step_residual", "fix_residual"]
        fh.write(",".join(head) + "\n")
        norms = np.linalg.norm(xs, axis=1)
        for i, n in enumerate(rows):
            if coords:
                body = [fmt(c) for c in xs[i]]
            else:
                body = [fmt(norms[i])]
            fh.write(
                ",".join([str(int(n))] + body + [fmt(step_res[i]), fmt(fix_res[i])])
                + "\n"
            )
