"""Iteration schedules and their quantitative witnesses.

A regularized splitting run is steered by two sequences: the damping
factors ``beta_n`` (pulling iterates toward the origin) and the relaxation
weights ``lambda_n``.  Every certified bound in :mod:`tiksplit.rates` is a
composition of seven witnesses for the behaviour of those sequences:

``h``
    pointwise lower bound, ``beta_n >= 1/h(n)``.
``b``
    convergence rate of ``beta_n -> 1``: ``|1 - beta_n| <= 1/(k+1)`` for
    all ``n >= b(k)``.
``D``
    divergence rate of the series ``sum (1 - beta_n)``: the partial sum
    through ``D(k)`` is at least ``k``.
``B``
    Cauchy rate of the variation series ``sum |beta_i - beta_{i-1}|``
    started after index ``B(k)``.
``L``
    same as ``B`` for the relaxation weights.
``ell``
    integer with ``lambda_n >= 1/ell``.
``N``
    norm bound of the experiment: ``N >= max(|x0 - p|, |p|)`` for some
    fixed point ``p``.

The conditions are referred to as Q1..Q6 in reports, in the order above
(``N`` is not a schedule condition).  ``validate_Q`` checks each one by
direct summation over a finite prefix; anything a finite prefix cannot
settle is reported as unchecked rather than passed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Sequence

import mpmath
import numpy as np

from .satnat import BoundedNat, _ceil_ln_int

__all__ = [
    "NatFunction",
    "ConstFn",
    "IdentityFn",
    "AffineFn",
    "PolyCeilFn",
    "ExpCeilFn",
    "TableFn",
    "ComposeFn",
    "MaxFn",
    "monotonize",
    "Schedule",
    "poly_decay_to_one",
    "constant_sequence",
    "QuantitativeModuli",
    "StockInstance",
    "stock_instances",
    "validate_Q",
    "ValidationReport",
    "ConditionReport",
]

# Additive slack used when a certified inequality is checked in floats.
CHECK_SLACK = 1e-9


# ----------------------------------------------------------------------
# Monotone functions on the naturals
# ----------------------------------------------------------------------


class NatFunction:
    """Monotone map on the naturals with two evaluation paths.

    ``f(n)`` with a Python int is exact and unbounded; ``f.bounded(x)``
    takes a :class:`BoundedNat` and saturates instead of producing values
    beyond the cap.  Subclasses are immutable and serializable through
    ``to_config``.
    """

    kind: str = "abstract"

    def __call__(self, n: int) -> int:
        raise NotImplementedError

    def bounded(self, x: BoundedNat) -> BoundedNat:
        if x.is_saturated:
            return x
        return BoundedNat.of(self(x.value), x.cap)

    def array(self, ns: np.ndarray) -> np.ndarray:
        """Evaluate on an integer array; exactness is kept per element."""
        return np.array([self(int(n)) for n in ns], dtype=object)

    def to_config(self) -> dict:
        raise NotImplementedError

    def check_monotone_prefix(self, upto: int = 32) -> None:
        prev = self(0)
        for n in range(1, upto + 1):
            cur = self(n)
            if cur < prev:
                raise ValueError(f"{self!r} is not monotone at n={n}")
            prev = cur


def _as_nat(n) -> int:
    if isinstance(n, (bool, float)):
        raise TypeError("natural expected")
    n = int(n)
    if n < 0:
        raise ValueError("natural expected")
    return n


@dataclass(frozen=True)
class ConstFn(NatFunction):
    value: int
    kind = "const"

    def __post_init__(self):
        _as_nat(self.value)

    def __call__(self, n: int) -> int:
        _as_nat(n)
        return self.value

    def array(self, ns):
        return np.full(len(ns), self.value, dtype=np.int64)

    def to_config(self):
        return {"kind": "const", "value": self.value}


@dataclass(frozen=True)
class IdentityFn(NatFunction):
    kind = "identity"

    def __call__(self, n: int) -> int:
        return _as_nat(n)

    def array(self, ns):
        return np.asarray(ns, dtype=np.int64)

    def to_config(self):
        return {"kind": "identity"}


@dataclass(frozen=True)
class AffineFn(NatFunction):
    """``a*n + c`` with natural coefficients."""

    a: int
    c: int
    kind = "affine"

    def __post_init__(self):
        _as_nat(self.a)
        _as_nat(self.c)

    def __call__(self, n: int) -> int:
        return self.a * _as_nat(n) + self.c

    def array(self, ns):
        return self.a * np.asarray(ns, dtype=np.int64) + self.c

    def to_config(self):
        return {"kind": "affine", "a": self.a, "c": self.c}


def _fraction_of(x) -> Fraction:
    if isinstance(x, Fraction):
        f = x
    elif isinstance(x, int):
        f = Fraction(x)
    elif isinstance(x, str):
        f = Fraction(x)
    else:
        raise TypeError("polynomial coefficients must be rational")
    if f < 0:
        raise ValueError("polynomial coefficients must be nonnegative")
    return f


@dataclass(frozen=True)
class PolyCeilFn(NatFunction):
    """``ceil(c0 + c1*n + c2*n^2 + ...)`` with nonnegative rational c_i.

    Rational coefficients keep witnesses like ``ceil((n/2 + 2)^2)``
    exactly representable; nonnegativity makes the map monotone.
    """

    coeffs: tuple[Fraction, ...]
    kind = "poly_ceil"

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(_fraction_of(c) for c in self.coeffs))

    def __call__(self, n: int) -> int:
        n = _as_nat(n)
        acc = Fraction(0)
        p = 1
        for c in self.coeffs:
            acc += c * p
            p *= n
        return math.ceil(acc)

    def to_config(self):
        return {"kind": "poly_ceil", "coeffs": [str(c) for c in self.coeffs]}


@dataclass(frozen=True)
class ExpCeilFn(NatFunction):
    """``ceil(e**(n + shift))``, exact via adaptive-precision evaluation."""

    shift: int = 0
    kind = "exp_ceil"

    _EXACT_LIMIT = 200_000  # ~87k digits; larger arguments must saturate

    def __post_init__(self):
        _as_nat(self.shift)

    def __call__(self, n: int) -> int:
        t = _as_nat(n) + self.shift
        if t == 0:
            return 1
        if t > self._EXACT_LIMIT:
            raise OverflowError(
                "exp_ceil exact evaluation out of range; use bounded()"
            )
        # e**t is irrational, so a generous guard precision makes the
        # ceiling unambiguous.
        with mpmath.workdps(int(t * 0.4342944819) + 30):
            return int(mpmath.ceil(mpmath.exp(t)))

    def bounded(self, x: BoundedNat) -> BoundedNat:
        if x.is_saturated:
            return x
        t = x.value + self.shift
        # e**t > cap whenever t exceeds the outward-rounded log of the cap.
        if t >= _ceil_ln_int(x.cap) + 1:
            return BoundedNat.saturated(x.cap)
        return BoundedNat.of(self(x.value), x.cap)

    def to_config(self):
        return {"kind": "exp_ceil", "shift": self.shift}


@dataclass(frozen=True)
class TableFn(NatFunction):
    """Finite table with a constant tail clamped to the last entry."""

    values: tuple[int, ...]
    kind = "table"

    def __post_init__(self):
        if not self.values:
            raise ValueError("table must be nonempty")
        object.__setattr__(self, "values", tuple(_as_nat(v) for v in self.values))
        for i in range(1, len(self.values)):
            if self.values[i] < self.values[i - 1]:
                raise ValueError(
                    "table is not monotone; run it through monotonize() first"
                )

    def __call__(self, n: int) -> int:
        n = _as_nat(n)
        return self.values[min(n, len(self.values) - 1)]

    def array(self, ns):
        idx = np.minimum(np.asarray(ns, dtype=np.int64), len(self.values) - 1)
        return np.asarray(self.values, dtype=np.int64)[idx]

    def to_config(self):
        return {"kind": "table", "values": list(self.values)}


@dataclass(frozen=True)
class ComposeFn(NatFunction):
    outer: NatFunction
    inner: NatFunction
    kind = "compose"

    def __call__(self, n: int) -> int:
        return self.outer(self.inner(n))

    def bounded(self, x: BoundedNat) -> BoundedNat:
        return self.outer.bounded(self.inner.bounded(x))

    def to_config(self):
        return {
            "kind": "compose",
            "outer": self.outer.to_config(),
            "inner": self.inner.to_config(),
        }


@dataclass(frozen=True)
class MaxFn(NatFunction):
    parts: tuple[NatFunction, ...]
    kind = "max"

    def __post_init__(self):
        if not self.parts:
            raise ValueError("max of nothing")

    def __call__(self, n: int) -> int:
        return max(p(n) for p in self.parts)

    def bounded(self, x: BoundedNat) -> BoundedNat:
        out = None
        for p in self.parts:
            v = p.bounded(x)
            out = v if out is None or v > out else out
        return out

    def to_config(self):
        return {"kind": "max", "parts": [p.to_config() for p in self.parts]}


def monotonize(f, horizon: int | None = None) -> TableFn:
    """Least monotone majorant ``n -> max(f(i) : i <= n)`` as a table.

    Accepts a sequence of naturals, or any callable together with a
    ``horizon`` giving the prefix to tabulate.  Beyond the table the value
    clamps to the running maximum, which matches the majorant whenever the
    tabulated prefix already contains the top.
    """
    if callable(f) and not isinstance(f, (list, tuple)):
        if horizon is None:
            raise ValueError("monotonize of a callable needs a horizon")
        seq = [f(n) for n in range(horizon + 1)]
    else:
        seq = list(f)
    if not seq:
        raise ValueError("monotonize of an empty table")
    out = []
    best = 0
    for v in seq:
        v = _as_nat(v)
        best = max(best, v)
        out.append(best)
    return TableFn(tuple(out))


# ----------------------------------------------------------------------
# Schedules
# ----------------------------------------------------------------------


def poly_decay_to_one(power: float, shift: int = 2) -> Callable:
    """``n -> 1 - (n + shift)**(-power)``, vectorized over arrays."""
    if power <= 0:
        raise ValueError("power must be positive")
    if shift < 1:
        raise ValueError("shift must keep the sequence positive")

    def seq(n):
        return 1.0 - (np.asarray(n, dtype=np.float64) + shift) ** (-power)

    return seq


def constant_sequence(value: float) -> Callable:
    def seq(n):
        return np.full_like(np.asarray(n, dtype=np.float64), value)

    return seq


@dataclass(frozen=True)
class Schedule:
    """The pair of steering sequences, plus a serializable description.

    ``beta`` and ``lam`` accept scalars or integer arrays and return
    floats.  ``lam_max`` is 1.0 for the plain regularized scheme and 2.0
    for Douglas-Rachford style relaxation, where the raw weights live in
    (0, 2] and are halved at composition time.
    """

    beta: Callable
    lam: Callable
    descriptor: dict = field(default_factory=dict)
    lam_max: float = 1.0

    def beta_values(self, upto: int) -> np.ndarray:
        return np.asarray(self.beta(np.arange(upto + 1)), dtype=np.float64)

    def lam_values(self, upto: int) -> np.ndarray:
        return np.asarray(self.lam(np.arange(upto + 1)), dtype=np.float64)

    def halved(self) -> "Schedule":
        """Same damping, relaxation halved; used to rewrite a
        Douglas-Rachford run as a plain regularized run."""
        lam = self.lam
        return Schedule(
            beta=self.beta,
            lam=lambda n: 0.5 * np.asarray(lam(n), dtype=np.float64),
            descriptor={**self.descriptor, "lambda_halved": True},
            lam_max=self.lam_max / 2.0,
        )


# ----------------------------------------------------------------------
# Witness bundles
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class QuantitativeModuli:
    h: NatFunction
    b: NatFunction
    D: NatFunction
    B: NatFunction
    L: NatFunction
    ell: int
    N: int

    def __post_init__(self):
        if self.ell < 1 or self.N < 1:
            raise ValueError("ell and N must be positive naturals")
        for name in ("h", "b", "D", "B", "L"):
            getattr(self, name).check_monotone_prefix(16)
        if self.h(0) < 1:
            raise ValueError("h must be >= 1")

    def with_N(self, N: int) -> "QuantitativeModuli":
        return replace(self, N=N)

    def with_ell(self, ell: int) -> "QuantitativeModuli":
        return replace(self, ell=ell)

    def to_config(self) -> dict:
        return {
            "h": self.h.to_config(),
            "b": self.b.to_config(),
            "D": self.D.to_config(),
            "B": self.B.to_config(),
            "L": self.L.to_config(),
            "ell": self.ell,
            "N": self.N,
        }


@dataclass(frozen=True)
class StockInstance:
    name: str
    schedule: Schedule
    moduli: QuantitativeModuli


def stock_instances() -> tuple[StockInstance, ...]:
    """Two ready-made schedule/witness bundles.

    ``harmonic``: ``beta_n = lambda_n = 1 - 1/(n+2)``.  Its witnesses are
    tiny except for the divergence rate ``D(k) = ceil(e^(k+2))``, which
    makes the certified indices astronomically large -- useful for
    exercising saturation and "beyond horizon" reporting.

    ``sqrt``: ``beta_n = 1 - 1/sqrt(n+2)`` with constant relaxation 1.
    All witnesses are polynomial, so certified indices stay at desk scale
    (about ``5e3`` to ``7e6`` for the first few k).
    """
    harmonic = StockInstance(
        name="harmonic",
        schedule=Schedule(
            beta=poly_decay_to_one(1.0),
            lam=poly_decay_to_one(1.0),
            descriptor={
                "beta": {"kind": "poly_decay", "power": 1.0, "shift": 2},
                "lambda": {"kind": "poly_decay", "power": 1.0, "shift": 2},
            },
        ),
        moduli=QuantitativeModuli(
            h=ConstFn(2),
            b=IdentityFn(),
            D=ExpCeilFn(2),
            B=IdentityFn(),
            L=IdentityFn(),
            ell=2,
            N=1,
        ),
    )
    square = PolyCeilFn((Fraction(1), Fraction(2), Fraction(1)))  # (n+1)^2
    sqrt = StockInstance(
        name="sqrt",
        schedule=Schedule(
            beta=poly_decay_to_one(0.5),
            lam=constant_sequence(1.0),
            descriptor={
                "beta": {"kind": "poly_decay", "power": 0.5, "shift": 2},
                "lambda": {"kind": "const", "value": 1.0},
            },
        ),
        moduli=QuantitativeModuli(
            h=ConstFn(4),
            b=square,
            D=PolyCeilFn((Fraction(4), Fraction(2), Fraction(1, 4))),  # ceil((n/2+2)^2)
            B=square,
            L=ConstFn(0),
            ell=1,
            N=1,
        ),
    )
    return (harmonic, sqrt)


# ----------------------------------------------------------------------
# Validation
# ----------------------------------------------------------------------


@dataclass
class ConditionReport:
    name: str
    description: str
    ok: bool
    violations: list = field(default_factory=list)  # (k, n, lhs, rhs)
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "description": self.description,
            "status": "pass" if self.ok else "fail",
            "violations": [list(v) for v in self.violations[:10]],
            "notes": list(self.notes),
        }


@dataclass
class ValidationReport:
    horizon: int
    k_max: int
    conditions: list[ConditionReport]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.conditions)

    def to_dict(self) -> dict:
        return {
            "horizon": self.horizon,
            "k_max": self.k_max,
            "status": "pass" if self.ok else "fail",
            "conditions": [c.to_dict() for c in self.conditions],
        }

    def summary_lines(self) -> list[str]:
        lines = []
        for c in self.conditions:
            flag = "pass" if c.ok else "FAIL"
            lines.append(f"{c.name:7s} {flag}  {c.description}")
            for v in c.violations[:3]:
                lines.append(f"        violation {v}")
            for note in c.notes:
                lines.append(f"        note: {note}")
        return lines


def validate_Q(
    schedule: Schedule,
    moduli: QuantitativeModuli,
    horizon: int = 10**5,
    k_max: int = 8,
) -> ValidationReport:
    """Check all schedule conditions against their witnesses on a prefix.

    Each condition is evaluated by direct summation for ``n <= horizon``
    and ``k <= k_max``.  Witness values pointing beyond the horizon make
    the corresponding instance unchecked (noted, not failed): a finite
    prefix can refute such an instance but never confirm it.
    """
    ns = np.arange(horizon + 1)
    beta = schedule.beta_values(horizon)
    lam = schedule.lam_values(horizon)
    conds: list[ConditionReport] = []

    # range sanity first: everything downstream assumes these
    c0 = ConditionReport("ranges", "0 < beta <= 1 and 0 < lambda <= lam_max", True)
    bad_b = np.flatnonzero((beta <= 0.0) | (beta > 1.0 + CHECK_SLACK))
    bad_l = np.flatnonzero((lam <= 0.0) | (lam > schedule.lam_max + CHECK_SLACK))
    for n in bad_b[:10]:
        c0.violations.append(("beta", int(n), float(beta[n]), "(0,1]"))
    for n in bad_l[:10]:
        c0.violations.append(("lambda", int(n), float(lam[n]), f"(0,{schedule.lam_max}]"))
    c0.ok = not c0.violations
    conds.append(c0)

    # Q1: beta_n >= 1/h(n)
    c1 = ConditionReport("Q1", "beta_n >= 1/h(n)", True)
    h_vals = moduli.h.array(ns).astype(np.float64)
    if np.any(h_vals < 1):
        c1.ok = False
        c1.violations.append(("h", int(np.argmax(h_vals < 1)), "h(n) < 1", ">= 1"))
    else:
        bad = np.flatnonzero(beta < 1.0 / h_vals - CHECK_SLACK)
        for n in bad[:10]:
            c1.violations.append((None, int(n), float(beta[n]), float(1.0 / h_vals[n])))
        c1.ok = not c1.violations
    conds.append(c1)

    # Q2: |1 - beta_n| <= 1/(k+1) for n >= b(k)
    c2 = ConditionReport("Q2", "|1-beta_n| <= 1/(k+1) for n >= b(k)", True)
    gap = np.abs(1.0 - beta)
    for k in range(k_max + 1):
        start = moduli.b(k)
        if start > horizon:
            c2.notes.append(f"k={k}: b(k)={start} beyond horizon, unchecked")
            continue
        bound = 1.0 / (k + 1)
        bad = np.flatnonzero(gap[start:] > bound + CHECK_SLACK)
        for j in bad[:3]:
            c2.violations.append((k, int(start + j), float(gap[start + j]), bound))
    c2.ok = not c2.violations
    conds.append(c2)

    # Q3: sum_{i=1}^{D(k)} (1 - beta_i) >= k
    c3 = ConditionReport("Q3", "sum_{i=1}^{D(k)} (1-beta_i) >= k", True)
    one_minus = 1.0 - beta
    prefix = np.concatenate([[0.0], np.cumsum(one_minus)])  # prefix[m+1] = sum_{i<=m}
    for k in range(k_max + 1):
        Dk = moduli.D(k)
        if Dk > horizon:
            c3.notes.append(f"k={k}: D(k)={Dk} beyond horizon, unchecked")
            continue
        total = float(prefix[Dk + 1] - one_minus[0])
        if total < k - CHECK_SLACK:
            c3.violations.append((k, Dk, total, k))
    c3.ok = not c3.violations
    conds.append(c3)

    # Q4 / Q6: variation-series Cauchy rates
    def _variation_cond(name, vals, witness, label):
        rep = ConditionReport(name, label, True)
        var = np.abs(np.diff(vals))
        vp = np.concatenate([[0.0], np.cumsum(var)])  # vp[j] = sum_{i=1}^{j} var_i
        for k in range(k_max + 1):
            start = witness(k)
            if start > horizon:
                rep.notes.append(f"k={k}: start {start} beyond horizon, unchecked")
                continue
            tail = float(vp[horizon] - vp[start])
            bound = 1.0 / (k + 1)
            if tail > bound + CHECK_SLACK:
                rep.violations.append((k, start, tail, bound))
        rep.ok = not rep.violations
        return rep

    conds.append(
        _variation_cond(
            "Q4", beta, moduli.B, "sum_{i>B(k)} |beta_i - beta_{i-1}| <= 1/(k+1)"
        )
    )

    # Q5: lambda_n >= 1/ell
    c5 = ConditionReport("Q5", "lambda_n >= 1/ell", True)
    bad = np.flatnonzero(lam < 1.0 / moduli.ell - CHECK_SLACK)
    for n in bad[:10]:
        c5.violations.append((None, int(n), float(lam[n]), 1.0 / moduli.ell))
    c5.ok = not c5.violations
    conds.append(c5)

    conds.append(
        _variation_cond(
            "Q6", lam, moduli.L, "sum_{i>L(k)} |lambda_i - lambda_{i-1}| <= 1/(k+1)"
        )
    )

    return ValidationReport(horizon=horizon, k_max=k_max, conditions=conds)
