"""Saturating arbitrary-size natural numbers.

Certified iteration bounds are built by composing monotone integer
functions, and some of those compositions (iterated quadratic maps) leave
any fixed-width integer range after a handful of steps.  ``BoundedNat``
carries an exact Python integer up to a configurable cap and collapses
anything larger into an explicit saturation marker.  Saturation is sticky:
it propagates through every operation, so a saturated result always means
"the exact value exceeds the cap", never "something went wrong".

Every operation is monotone with saturation as the top element: replacing
an operand by a larger one never decreases the result.  This is what makes
a saturated certificate sound -- the true bound is at least as large as
anything the caller could have read off.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import mpmath

DEFAULT_CAP = 10**18

NatLike = Union[int, "BoundedNat"]


@dataclass(frozen=True, eq=False)
class BoundedNat:
    """A natural number, exact up to ``cap`` and saturated above it.

    ``value is None`` encodes saturation.  Mixing two operands keeps the
    smaller cap, so a value can only ever be exact if it fits under every
    cap it has passed through.
    """

    value: int | None
    cap: int = DEFAULT_CAP

    def __post_init__(self):
        if not isinstance(self.cap, int) or self.cap < 1:
            raise ValueError("cap must be a positive integer")
        if self.value is not None:
            if not isinstance(self.value, int) or self.value < 0:
                raise ValueError("BoundedNat holds naturals only")
            if self.value > self.cap:
                object.__setattr__(self, "value", None)

    # ------------------------------------------------------------------
    @staticmethod
    def of(x: NatLike, cap: int = DEFAULT_CAP) -> "BoundedNat":
        if isinstance(x, BoundedNat):
            return x if x.cap <= cap else BoundedNat(x.value, cap)
        return BoundedNat(x, cap)

    @staticmethod
    def saturated(cap: int = DEFAULT_CAP) -> "BoundedNat":
        return BoundedNat(None, cap)

    @property
    def is_saturated(self) -> bool:
        return self.value is None

    def expect_exact(self) -> int:
        if self.value is None:
            raise ValueError(f"value saturated at cap {self.cap}")
        return self.value

    # -- arithmetic ----------------------------------------------------
    def _merge_cap(self, other: NatLike) -> int:
        if isinstance(other, BoundedNat):
            return min(self.cap, other.cap)
        return self.cap

    @staticmethod
    def _raw(other: NatLike) -> int | None:
        if isinstance(other, BoundedNat):
            return other.value
        if not isinstance(other, int) or other < 0:
            raise TypeError("expected a natural or BoundedNat")
        return other

    def __add__(self, other: NatLike) -> "BoundedNat":
        cap = self._merge_cap(other)
        o = self._raw(other)
        if self.value is None or o is None:
            return BoundedNat(None, cap)
        return BoundedNat(self.value + o, cap)

    __radd__ = __add__

    def __mul__(self, other: NatLike) -> "BoundedNat":
        cap = self._merge_cap(other)
        o = self._raw(other)
        if self.value is None or o is None:
            # 0 * saturated stays saturated: saturation marks "at least
            # cap+1", and a sound upper bound must not shrink it.
            return BoundedNat(None, cap)
        return BoundedNat(self.value * o, cap)

    __rmul__ = __mul__

    def monus(self, k: int) -> "BoundedNat":
        """Truncated subtraction by an exact constant, ``max(x - k, 0)``."""
        if not isinstance(k, int) or k < 0:
            raise ValueError("monus expects a natural constant")
        if self.value is None:
            return self
        return BoundedNat(max(self.value - k, 0), self.cap)

    # -- ordering: saturated compares as +infinity ----------------------
    def _key(self) -> float | int:
        return float("inf") if self.value is None else self.value

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            return self.value == other
        if isinstance(other, BoundedNat):
            return self._key() == other._key()
        return NotImplemented

    def __hash__(self):
        return hash(self._key())

    def __lt__(self, other: NatLike) -> bool:
        o = other._key() if isinstance(other, BoundedNat) else other
        return self._key() < o

    def __le__(self, other: NatLike) -> bool:
        o = other._key() if isinstance(other, BoundedNat) else other
        return self._key() <= o

    def __gt__(self, other: NatLike) -> bool:
        return not self.__le__(other)

    def __ge__(self, other: NatLike) -> bool:
        return not self.__lt__(other)

    def __str__(self) -> str:
        if self.value is None:
            return f"SATURATED({self.cap})"
        return str(self.value)

    def __repr__(self) -> str:
        return f"BoundedNat({self.value}, cap={self.cap})"


def bn_max(*vals: NatLike) -> BoundedNat:
    """Maximum of naturals/BoundedNats; saturation wins."""
    if not vals:
        raise ValueError("bn_max needs at least one argument")
    cap = min((v.cap for v in vals if isinstance(v, BoundedNat)), default=DEFAULT_CAP)
    best: BoundedNat | None = None
    for v in vals:
        b = BoundedNat.of(v, cap)
        if best is None or b > best:
            best = b
    return best


def _ceil_ln_int(x: int) -> int:
    """Least m >= 0 with e**m >= x, resolving any doubt upward."""
    if x <= 1:
        return 0
    with mpmath.workdps(len(str(x)) + 25):
        lx = mpmath.log(x)
        m = int(mpmath.floor(lx)) + 1
        # Guards against a floor taken at the wrong side of an integer
        # boundary; e**m is never a natural for m >= 1, so at this
        # precision both tests are decisive.
        if m >= 1 and mpmath.exp(m - 1) >= x:
            m -= 1
        elif mpmath.exp(m) < x:
            m += 1
    return m


def ceil_ln_upper(x: NatLike) -> BoundedNat | int:
    """Ceiling of the natural logarithm, rounded outward.

    Returns the least ``m`` with ``e**m >= x``.  Exact integers map to
    exact integers; a saturated input stays saturated (the true logarithm
    is unknown, only bounded below).
    """
    if isinstance(x, BoundedNat):
        if x.is_saturated:
            return x
        return BoundedNat(_ceil_ln_int(x.value), x.cap)
    if not isinstance(x, int) or x < 0:
        raise ValueError("ceil_ln_upper expects a natural")
    return _ceil_ln_int(x)


def iterate_fn(
    f: Callable[[BoundedNat], BoundedNat],
    times: NatLike,
    start: NatLike,
    *,
    cap: int = DEFAULT_CAP,
    step_limit: int = 1_000_000,
) -> BoundedNat:
    """Apply ``f`` to ``start`` repeatedly, ``times`` times, saturating.

    Stops early at a fixed point (further applications cannot change the
    value) or once the orbit saturates (monotone ``f`` keeps it there).  A
    saturated ``times`` is legal: because ``f`` is monotone the orbit is
    monotone, so the limit is reached at the first fixed point or at
    saturation, whichever comes first.

    Raises ``RuntimeError`` if the orbit neither stabilizes nor saturates
    within ``step_limit`` applications; for the quadratic-growth maps used
    by the rate calculus this never triggers.
    """
    x = BoundedNat.of(start, cap)
    t = BoundedNat.of(times, cap)
    budget = None if t.is_saturated else t.value
    steps = 0
    while budget is None or steps < budget:
        if x.is_saturated:
            return x
        nxt = f(x)
        if not isinstance(nxt, BoundedNat):
            nxt = BoundedNat.of(nxt, x.cap)
        if nxt == x:
            return x
        x = nxt
        steps += 1
        if steps > step_limit:
            raise RuntimeError(
                "iterate_fn exceeded its step budget without reaching a "
                "fixed point or saturating"
            )
    return x
