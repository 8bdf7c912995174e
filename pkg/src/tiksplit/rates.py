"""Certified iteration-count bounds over saturating naturals.

This module turns the witnesses of :class:`tiksplit.moduli.QuantitativeModuli`
into concrete thresholds:

* ``theta`` / ``sigma``: thresholds for two scalar recurrence patterns
  (damped with additive noise, damped with interval perturbations).  All
  trajectory-level bounds reduce to these.
* ``nu1`` / ``nu2``: asymptotic-regularity thresholds for the regularized
  iteration, for the step difference ``|x_{n+1}-x_n|`` and the fixed-point
  residual ``|T(x_n)-x_n|`` respectively.
* ``psi``: bound on the index produced by the approximate-projection
  search.  Its definition iterates a quadratic-growth map ``R`` times with
  ``R >= 64``, so on any realistic cap the value saturates; the point of
  :class:`tiksplit.satnat.BoundedNat` is to report that honestly.
* ``mu`` and the ``mu1`` .. ``mu5`` family: metastability bounds.  For a
  tolerance ``1/(k+1)`` and a monotone ``f`` they bound some ``n`` such
  that the iterates (or the shadow sequences of the two-resolvent scheme)
  stay within tolerance of each other on the whole window ``[n, f(n)]``.
* ``projection_bound`` / ``dr_gap_threshold``: auxiliary bounds used by
  the verification harness.

Everything here is exact integer arithmetic; saturation is the only
approximation and it only ever rounds up.  Counterexample functions are
accepted as :class:`tiksplit.moduli.NatFunction`, plain int callables, or
pre-lifted :class:`CounterexampleFn`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

from .moduli import NatFunction, QuantitativeModuli
from .satnat import (
    DEFAULT_CAP,
    BoundedNat,
    NatLike,
    _ceil_ln_int,
    bn_max,
)
from .satnat import ceil_ln_upper as _ceil_ln_raw
from .satnat import iterate_fn as _iterate_raw

__all__ = [
    "CounterexampleFn",
    "as_counterexample",
    "ceil_ln_upper",
    "iterate_fn",
    "theta",
    "sigma",
    "rate_G",
    "nu1",
    "nu2",
    "projection_bound",
    "psi",
    "mu",
    "mu1",
    "mu2",
    "mu3",
    "mu4",
    "mu5",
    "dr_gap_threshold",
]


# ----------------------------------------------------------------------
# Counterexample functions
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class CounterexampleFn:
    """A monotone function lifted to saturating naturals.

    Monotonicity is the caller's contract (a non-monotone table can be
    repaired with :func:`tiksplit.moduli.monotonize` first).  Saturated
    input must yield saturated output; the constructors below guarantee
    it, hand-built instances must keep it.
    """

    fn: Callable[[BoundedNat], BoundedNat]
    label: str = "f"

    def __call__(self, x: NatLike) -> BoundedNat:
        if not isinstance(x, BoundedNat):
            x = BoundedNat.of(x)
        out = self.fn(x)
        if not isinstance(out, BoundedNat):
            out = BoundedNat.of(out, x.cap)
        return out


def as_counterexample(f) -> CounterexampleFn:
    if isinstance(f, CounterexampleFn):
        return f
    if isinstance(f, NatFunction):
        return CounterexampleFn(f.bounded, label=f.kind)
    if callable(f):

        def lifted(x: BoundedNat) -> BoundedNat:
            if x.is_saturated:
                return x
            return BoundedNat.of(int(f(x.value)), x.cap)

        return CounterexampleFn(lifted, label=getattr(f, "__name__", "f"))
    raise TypeError(f"cannot use {f!r} as a counterexample function")


def ceil_ln_upper(x: NatLike) -> NatLike:
    """Least ``m`` with ``e**m >= x``; precision doubts round upward."""
    if isinstance(x, BoundedNat):
        if not x.is_saturated and x.value < 1:
            raise ValueError("ceil_ln_upper needs x >= 1")
    elif x < 1:
        raise ValueError("ceil_ln_upper needs x >= 1")
    return _ceil_ln_raw(x)


def iterate_fn(f, times: NatLike, start: NatLike, *, cap: int = DEFAULT_CAP) -> BoundedNat:
    """``f`` applied ``times`` times to ``start``, saturating at ``cap``."""
    return _iterate_raw(as_counterexample(f), times, start, cap=cap)


def _nat(x, name: str) -> int:
    if isinstance(x, BoundedNat):
        x = x.expect_exact()
    if not isinstance(x, int) or isinstance(x, bool) or x < 0:
        raise ValueError(f"{name} must be a natural number")
    return x


# ----------------------------------------------------------------------
# Recurrence thresholds
# ----------------------------------------------------------------------


def theta(
    A: NatFunction,
    Rr: NatFunction,
    G: NatFunction,
    d: int,
    k: int,
    *,
    cap: int = DEFAULT_CAP,
) -> BoundedNat:
    """Threshold for the damped recurrence with additive noise.

    Suppose ``0 <= s_n <= d`` and ``s_{n+1} <= (1-a_n)s_n + a_n r_n + g_n``
    where the weights ``a_n`` in [0,1] have divergence witness ``A``
    (``sum_{i=1}^{A(k)} a_i >= k``), the ``r_n`` vanish with rate ``Rr``,
    and the series of ``g_n`` has Cauchy witness ``G``.  Then
    ``s_n <= 1/(k+1)`` for every ``n >= theta(k)``, with

        theta(k) = A(M - 1 + ceil_ln(3d(k+1))) + 1,
        M = max(Rr(3k+2), G(3k+2) + 1).
    """
    d = _nat(d, "d")
    k = _nat(k, "k")
    if d < 1:
        raise ValueError("d must be >= 1")
    j = BoundedNat.of(3 * k + 2, cap)
    M = bn_max(Rr.bounded(j), G.bounded(j) + 1)
    arg = M.monus(1) + _ceil_ln_int(3 * d * (k + 1))
    return A.bounded(arg) + 1


def sigma(
    A: NatFunction,
    d: int,
    k: int,
    n: NatLike,
    *,
    cap: int = DEFAULT_CAP,
) -> BoundedNat:
    """Threshold for the damped recurrence with interval perturbations.

    Suppose ``0 <= s_i <= d``, ``s_{i+1} <= (1-a_i)(s_i+v_i) + a_i r_i``
    with divergence witness ``A`` for the weights, and on a window
    ``[n, q]`` the perturbations obey ``v_i <= 1/(3(k+1)(q+1))`` and
    ``r_i <= 1/(3(k+1))``.  Then ``s_i <= 1/(k+1)`` on ``[sigma(k,n), q]``:

        sigma(k, n) = A(n + ceil_ln(3d(k+1))) + 1.
    """
    d = _nat(d, "d")
    k = _nat(k, "k")
    if d < 1:
        raise ValueError("d must be >= 1")
    n = BoundedNat.of(n, cap)
    return A.bounded(n + _ceil_ln_int(3 * d * (k + 1))) + 1


def rate_G(
    N: int,
    B: NatFunction,
    L: NatFunction,
    k: NatLike,
    *,
    cap: int = DEFAULT_CAP,
) -> BoundedNat:
    """Cauchy witness for the combined schedule-variation series:
    ``max(B(4N(k+1)-1), L(10N(k+1)-1))``."""
    N = _nat(N, "N")
    if N < 1:
        raise ValueError("N must be >= 1")
    kk = BoundedNat.of(k, cap)
    # 4N(k+1)-1 = 4N*k + (4N-1); stays exact in BoundedNat arithmetic
    return bn_max(
        B.bounded(kk * (4 * N) + (4 * N - 1)),
        L.bounded(kk * (10 * N) + (10 * N - 1)),
    )


# ----------------------------------------------------------------------
# Asymptotic regularity
# ----------------------------------------------------------------------


def nu1(m: QuantitativeModuli, k: NatLike, *, cap: int = DEFAULT_CAP) -> BoundedNat:
    """Step-difference threshold: ``|x_{n+1}-x_n| <= 1/(k+1)`` for all
    ``n >= nu1(k)``.  Instance of ``theta`` with the damping weights
    ``1 - beta_n``, noise term driven by the schedule variation, and
    bound ``d = 2N``."""
    kk = BoundedNat.of(k, cap)
    if kk.is_saturated:
        return kk
    j = kk * 3 + 2
    Gv = rate_G(m.N, m.B, m.L, j, cap=cap)
    lnv = _ceil_ln_raw((kk + 1) * (6 * m.N))
    return m.D.bounded(Gv + lnv) + 1


def nu2(m: QuantitativeModuli, k: NatLike, *, cap: int = DEFAULT_CAP) -> BoundedNat:
    """Fixed-point-residual threshold: ``|T(x_n)-x_n| <= 1/(k+1)`` for
    all ``n >= nu2(k) = max(b(4Nl(k+1)-1), nu1(2l(k+1)-1))``."""
    kk = BoundedNat.of(k, cap)
    if kk.is_saturated:
        return kk
    t = kk + 1
    bterm = m.b.bounded((t * (4 * m.N * m.ell)).monus(1))
    nterm = nu1(m, (t * (2 * m.ell)).monus(1), cap=cap)
    return bn_max(bterm, nterm)


# ----------------------------------------------------------------------
# Projection search and metastability
# ----------------------------------------------------------------------


def projection_bound(
    N: int, k: int, f, *, cap: int = DEFAULT_CAP
) -> BoundedNat:
    """Bound on the index found by the approximate-projection search
    within the ball of radius ``N``: ``24N(F^(R)(0)+1)^2`` where
    ``F(m) = max(f(24N(m+1)^2), 24N(m+1)^2)`` and ``R = 4N^4(k+1)^2``.

    ``F`` grows at least quadratically, so for ``R >= 2`` or so the
    iterate leaves any practical cap; expect a saturated result.
    """
    N = _nat(N, "N")
    k = _nat(k, "k")
    if N < 1:
        raise ValueError("N must be >= 1")
    fc = as_counterexample(f)

    def bumped(x: BoundedNat) -> BoundedNat:
        q = (x + 1) * (x + 1) * (24 * N)
        return bn_max(fc(q), q)

    R = 4 * N**4 * (k + 1) ** 2
    it = _iterate_raw(bumped, BoundedNat.of(R, cap), BoundedNat.of(0, cap), cap=cap)
    return (it + 1) * (it + 1) * (24 * N)


def psi(
    m: QuantitativeModuli, k: int, f, *, cap: int = DEFAULT_CAP
) -> BoundedNat:
    """Index bound for the projection search run at radius ``2N`` and
    composed with ``nu2``; the rate behind the inner-product localization
    step of the metastability proof.

    ``psi(k, f) = nu2(48N(F^(R)(0)+1)^2)`` with
    ``F(m) = max(f(nu2(48N(m+1)^2)), 48N(m+1)^2)`` and
    ``R = 64N^4(k+1)^2``.  Saturates on every realistic cap.
    """
    k = _nat(k, "k")
    fc = as_counterexample(f)
    N = m.N

    def bumped(x: BoundedNat) -> BoundedNat:
        q = (x + 1) * (x + 1) * (48 * N)
        return bn_max(fc(nu2(m, q, cap=q.cap)), q)

    R = 64 * N**4 * (k + 1) ** 2
    it = _iterate_raw(bumped, BoundedNat.of(R, cap), BoundedNat.of(0, cap), cap=cap)
    n0 = (it + 1) * (it + 1) * (48 * N)
    return nu2(m, n0, cap=cap)


def mu(
    m: QuantitativeModuli,
    k: int,
    f,
    *,
    cap: int = DEFAULT_CAP,
    psi_fn=None,
) -> BoundedNat:
    """Metastability bound for the regularized iteration itself.

    Guarantees some ``n <= mu(k, f)`` with ``|x_i - x_j| <= 1/(k+1)`` for
    all ``i, j`` in ``[n, f(n)]``.  Shape:

        ktilde = 4(k+1)^2 - 1            (squared tolerance index)
        n1     = b(54N^2(ktilde+1) - 1)
        s(n)   = D(n + ceil_ln(27N^2(ktilde+1))) + 1
        fbar(m)= f(s(max(m, n1)))
        ftilde(m) = 3(10N+1)(ktilde+1)(fbar(m)+1)h(fbar(m)) - 1
        mu(k,f)   = s(max(psi(12(ktilde+1)-1, ftilde), n1))

    ``psi_fn`` swaps out the inner projection-search bound; tests inject a
    stub to reach the exact arithmetic that the saturated ``psi`` hides.
    """
    k = _nat(k, "k")
    fc = as_counterexample(f)
    N = m.N
    ktilde = 4 * (k + 1) ** 2 - 1
    n1 = m.b.bounded(BoundedNat.of(54 * N * N * (ktilde + 1) - 1, cap))
    lnterm = _ceil_ln_int(27 * N * N * (ktilde + 1))

    def sig_at(n: BoundedNat) -> BoundedNat:
        return m.D.bounded(n + lnterm) + 1

    def fbar(x: BoundedNat) -> BoundedNat:
        return fc(sig_at(bn_max(x, n1)))

    scale = 3 * (10 * N + 1) * (ktilde + 1)

    def ftilde(x: BoundedNat) -> BoundedNat:
        fb = fbar(x)
        return ((fb + 1) * m.h.bounded(fb) * scale).monus(1)

    ft = CounterexampleFn(ftilde, label="ftilde")
    kpsi = 12 * (ktilde + 1) - 1
    p = psi_fn(kpsi, ft) if psi_fn is not None else psi(m, kpsi, ft, cap=cap)
    p = BoundedNat.of(p, cap)
    return sig_at(bn_max(p, n1))


def mu1(
    a: int,
    m: QuantitativeModuli,
    k: int,
    f,
    *,
    cap: int = DEFAULT_CAP,
    psi_fn=None,
) -> BoundedNat:
    """Metastability bound when the iteration map is ``1/a``-averaged or
    better: the run rewrites to the plain scheme with relaxation scaled
    down by at most ``a``, so ``ell`` inflates to ``a*ell``."""
    a = _nat(a, "a")
    if a < 1:
        raise ValueError("a must be >= 1")
    return mu(m.with_ell(a * m.ell), k, f, cap=cap, psi_fn=psi_fn)


def mu2(
    m: QuantitativeModuli, k: int, f, *, cap: int = DEFAULT_CAP, psi_fn=None
) -> BoundedNat:
    """Metastability bound for the regularized forward-backward scheme
    (its composed map is at least 1/2-averaged): ``mu1`` with ``a = 2``."""
    return mu1(2, m, k, f, cap=cap, psi_fn=psi_fn)


def mu3(
    m: QuantitativeModuli, k: int, f, *, cap: int = DEFAULT_CAP, psi_fn=None
) -> BoundedNat:
    """Metastability bound for the main sequence of the regularized
    two-resolvent scheme; the raw relaxation in (0,2] is halved, doubling
    ``ell``."""
    return mu(m.with_ell(2 * m.ell), k, f, cap=cap, psi_fn=psi_fn)


def mu4(
    m: QuantitativeModuli, k: int, f, *, cap: int = DEFAULT_CAP, psi_fn=None
) -> BoundedNat:
    """Metastability bound for the first shadow sequence ``y_n``:
    ``max(mu3(2k+1, g1), b(8N(k+1)-1))`` with
    ``g1(m) = f(max(m, b(8N(k+1)-1)))``."""
    k = _nat(k, "k")
    fc = as_counterexample(f)
    bterm = m.b.bounded(BoundedNat.of(8 * m.N * (k + 1) - 1, cap))

    def g1(x: BoundedNat) -> BoundedNat:
        return fc(bn_max(x, bterm))

    inner = mu3(m, 2 * k + 1, CounterexampleFn(g1, "g1"), cap=cap, psi_fn=psi_fn)
    return bn_max(inner, bterm)


def mu5(
    m: QuantitativeModuli, k: int, f, *, cap: int = DEFAULT_CAP, psi_fn=None
) -> BoundedNat:
    """Metastability bound for the second shadow sequence ``z_n``:
    ``max(mu4(3k+2, g2), nu1(6l(k+1)-1), b(12lN(k+1)-1))`` with
    ``g2(m) = f(max(m, nu1(6l(k+1)-1), b(12lN(k+1)-1)))``."""
    k = _nat(k, "k")
    fc = as_counterexample(f)
    gate = dr_gap_threshold(m, k, cap=cap)

    def g2(x: BoundedNat) -> BoundedNat:
        return fc(bn_max(x, gate))

    inner = mu4(m, 3 * k + 2, CounterexampleFn(g2, "g2"), cap=cap, psi_fn=psi_fn)
    return bn_max(inner, gate)


def dr_gap_threshold(
    m: QuantitativeModuli, k: NatLike, *, cap: int = DEFAULT_CAP
) -> BoundedNat:
    """Threshold past which the two-resolvent gap obeys
    ``|z_i - y_i| <= 1/(3(k+1))``: ``max(nu1(6l(k+1)-1), b(12lN(k+1)-1))``.
    ``ell`` here witnesses the raw relaxation weights in (0,2]."""
    kk = BoundedNat.of(k, cap)
    if kk.is_saturated:
        return kk
    t = kk + 1
    nterm = nu1(m, (t * (6 * m.ell)).monus(1), cap=cap)
    bterm = m.b.bounded((t * (12 * m.ell * m.N)).monus(1))
    return bn_max(nterm, bterm)
