"""Operator toolbox for the splitting schemes.

Vectors are 1-D float64 numpy arrays.  Every operator also accepts a
stacked batch of shape ``(m, d)`` and maps it row-wise; the verification
code leans on this to evaluate thousands of sampled pairs in one call.

Operators are small immutable objects with a ``descriptor`` dict (tag plus
parameters) so a run can be reproduced from its serialized config.  The
toolbox provides exact projections and proximal maps with analytically
known behaviour, resolvent construction for affine monotone maps, and the
two compositions that turn a forward-backward or two-resolvent step into a
single nonexpansive map.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

__all__ = [
    "inner",
    "norm",
    "as_vector",
    "Identity",
    "ConstantMap",
    "ZeroMap",
    "AveragedMap",
    "HyperplaneProjection",
    "BoxProjection",
    "BallProjection",
    "HalfspaceProjection",
    "SoftThreshold",
    "AffineResolvent",
    "ReflectedResolvent",
    "QuadraticGradient",
    "FBMap",
    "DRMap",
    "project_affine_hyperplane",
    "project_box",
    "project_ball",
    "project_halfspace",
    "soft_threshold",
    "resolvent_affine",
    "reflected",
    "compose_fb",
    "compose_dr",
    "sample_nonexpansiveness",
    "sample_firm_nonexpansiveness",
    "sample_cocoercivity",
    "sample_averaged_identity",
    "fixed_point_residual",
]


def as_vector(v) -> np.ndarray:
    x = np.asarray(v, dtype=np.float64)
    if x.ndim == 0:
        x = x.reshape(1)
    if not np.all(np.isfinite(x)):
        raise ValueError("vector has non-finite entries")
    return x


def inner(u, v) -> float:
    u = as_vector(u)
    v = as_vector(v)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    return float(np.dot(u, v))


def norm(u) -> float:
    u = as_vector(u)
    return float(np.linalg.norm(u))


def _row_norms(x: np.ndarray) -> np.ndarray:
    return np.linalg.norm(x, axis=-1)


class Operator:
    """Base: callable on (d,) or (m,d) arrays, row-wise on the latter."""

    descriptor: dict

    def __call__(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}({self.descriptor})"


class Identity(Operator):
    def __init__(self):
        self.descriptor = {"kind": "identity"}

    def __call__(self, x):
        return np.asarray(x, dtype=np.float64)


class ConstantMap(Operator):
    def __init__(self, c):
        self.c = as_vector(c)
        self.descriptor = {"kind": "constant", "c": self.c.tolist()}

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        return np.broadcast_to(self.c, x.shape).copy()


class ZeroMap(Operator):
    """The zero operator; cocoercive with any constant (delta = inf)."""

    delta = math.inf

    def __init__(self):
        self.descriptor = {"kind": "zero"}

    def __call__(self, x):
        return np.zeros_like(np.asarray(x, dtype=np.float64))


class AveragedMap(Operator):
    """``(1-alpha) Id + alpha T`` for nonexpansive ``T``, alpha in (0,1]."""

    def __init__(self, alpha: float, inner_op: Operator):
        if not 0.0 < alpha <= 1.0:
            raise ValueError("alpha must lie in (0, 1]")
        self.alpha = float(alpha)
        self.inner_op = inner_op
        self.descriptor = {
            "kind": "averaged",
            "alpha": self.alpha,
            "inner": inner_op.descriptor,
        }

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        return (1.0 - self.alpha) * x + self.alpha * self.inner_op(x)


# ----------------------------------------------------------------------
# Projections and proximal maps
# ----------------------------------------------------------------------


class HyperplaneProjection(Operator):
    """Projection onto ``{x : <a, x> = c}``; fixed-point set is the
    hyperplane itself, and the minimal-norm fixed point is ``c a/|a|^2``."""

    def __init__(self, a, c: float):
        self.a = as_vector(a)
        na2 = float(np.dot(self.a, self.a))
        if na2 == 0.0:
            raise ValueError("hyperplane normal must be nonzero")
        self.c = float(c)
        self._na2 = na2
        self.descriptor = {"kind": "hyperplane", "a": self.a.tolist(), "c": self.c}

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        t = (self.c - x @ self.a) / self._na2
        return x + t[..., None] * self.a if x.ndim > 1 else x + t * self.a

    def min_norm_fixed_point(self) -> np.ndarray:
        return (self.c / self._na2) * self.a


class BoxProjection(Operator):
    def __init__(self, lo, hi):
        self.lo = as_vector(lo)
        self.hi = as_vector(hi)
        if self.lo.shape != self.hi.shape or np.any(self.lo > self.hi):
            raise ValueError("box needs lo <= hi componentwise")
        self.descriptor = {"kind": "box", "lo": self.lo.tolist(), "hi": self.hi.tolist()}

    def __call__(self, x):
        return np.clip(np.asarray(x, dtype=np.float64), self.lo, self.hi)


class BallProjection(Operator):
    def __init__(self, center, radius: float):
        if radius <= 0:
            raise ValueError("radius must be positive")
        self.center = as_vector(center)
        self.radius = float(radius)
        self.descriptor = {
            "kind": "ball",
            "center": self.center.tolist(),
            "radius": self.radius,
        }

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        r = x - self.center
        nr = np.linalg.norm(r, axis=-1, keepdims=x.ndim > 1)
        if x.ndim == 1:
            if nr <= self.radius:
                return x.copy()
            return self.center + (self.radius / nr) * r
        scale = np.where(nr > self.radius, self.radius / np.maximum(nr, 1e-300), 1.0)
        return self.center + scale * r


class HalfspaceProjection(Operator):
    """Projection onto ``{x : <a, x> <= c}``."""

    def __init__(self, a, c: float):
        self.a = as_vector(a)
        na2 = float(np.dot(self.a, self.a))
        if na2 == 0.0:
            raise ValueError("halfspace normal must be nonzero")
        self.c = float(c)
        self._na2 = na2
        self.descriptor = {"kind": "halfspace", "a": self.a.tolist(), "c": self.c}

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        excess = np.maximum(x @ self.a - self.c, 0.0) / self._na2
        return x - excess[..., None] * self.a if x.ndim > 1 else x - excess * self.a


class SoftThreshold(Operator):
    """Componentwise shrinkage by ``gamma``: the resolvent of the
    subdifferential of ``gamma * l1-norm``; firmly nonexpansive.

    As the resolvent of ``step * (tau * l1-norm)`` the same operator
    arises for every factorization ``step * tau == gamma``; pass ``step``
    when pairing with another resolvent so the stepsize compatibility
    check compares the right quantity.
    """

    def __init__(self, gamma: float, step: float | None = None):
        if gamma <= 0:
            raise ValueError("gamma must be positive")
        self.gamma = float(gamma)
        self.step = float(step) if step is not None else self.gamma
        if self.step <= 0:
            raise ValueError("step must be positive")
        self.descriptor = {
            "kind": "soft_threshold",
            "gamma": self.gamma,
            "step": self.step,
        }

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        return np.sign(x) * np.maximum(np.abs(x) - self.gamma, 0.0)


class AffineResolvent(Operator):
    """Resolvent of the affine monotone map ``x -> Qx - q`` at stepsize
    ``gamma``: solves ``(I + gamma Q) z = v + gamma q``.

    ``Q`` must be symmetric positive semidefinite, which keeps
    ``I + gamma Q`` well conditioned; the inverse is precomputed once.
    """

    def __init__(self, Q, q, gamma: float):
        if gamma <= 0:
            raise ValueError("gamma must be positive")
        Q = np.asarray(Q, dtype=np.float64)
        if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
            raise ValueError("Q must be square")
        if not np.allclose(Q, Q.T, atol=1e-9):
            raise ValueError("Q must be symmetric")
        w = np.linalg.eigvalsh(Q)
        if w.min() < -1e-9:
            raise ValueError("Q must be positive semidefinite")
        self.Q = Q
        self.q = as_vector(q)
        if self.q.shape[0] != Q.shape[0]:
            raise ValueError("q dimension mismatch")
        self.gamma = float(gamma)
        self.step = self.gamma
        M = np.eye(Q.shape[0]) + self.gamma * Q
        self._Minv = np.linalg.inv(M)
        # (I + gamma Q) has eigenvalues >= 1, so the inverse is accurate;
        # still, fail loudly if the solve drifted
        probe = np.arange(1.0, Q.shape[0] + 1.0)
        res = M @ (self._Minv @ probe) - probe
        if np.linalg.norm(res) > 1e-8 * np.linalg.norm(probe):
            raise ValueError("resolvent linear solve failed")
        self.descriptor = {
            "kind": "affine_resolvent",
            "Q": Q.tolist(),
            "q": self.q.tolist(),
            "gamma": self.gamma,
        }

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        rhs = x + self.gamma * self.q
        return rhs @ self._Minv.T


class ReflectedResolvent(Operator):
    """``2 J - Id``; nonexpansive whenever ``J`` is firmly nonexpansive."""

    def __init__(self, J: Operator):
        self.J = J
        self.gamma = getattr(J, "gamma", None)
        self.step = getattr(J, "step", None)
        self.descriptor = {"kind": "reflected", "inner": J.descriptor}

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        return 2.0 * self.J(x) - x


class QuadraticGradient(Operator):
    """Gradient of the quadratic ``x -> 1/2 <Qx, x> - <q, x>``.

    A gradient with Lipschitz constant ``lam_max(Q)`` is cocoercive with
    ``delta = 1/lam_max(Q)``; that constant is computed and stored.
    """

    def __init__(self, Q, q):
        Q = np.asarray(Q, dtype=np.float64)
        if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
            raise ValueError("Q must be square")
        if not np.allclose(Q, Q.T, atol=1e-9):
            raise ValueError("Q must be symmetric")
        w = np.linalg.eigvalsh(Q)
        if w.min() < -1e-9:
            raise ValueError("Q must be positive semidefinite")
        self.Q = Q
        self.q = as_vector(q)
        lmax = float(w.max())
        self.delta = math.inf if lmax == 0.0 else 1.0 / lmax
        self.descriptor = {
            "kind": "quadratic_gradient",
            "Q": Q.tolist(),
            "q": self.q.tolist(),
        }

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        return x @ self.Q.T - self.q


class FBMap(Operator):
    """One forward-backward step as a single map:
    ``x -> J1(x - gamma B(x))`` for cocoercive ``B``.

    For ``0 < gamma <= 2 delta`` the composition is ``alpha``-averaged
    with ``alpha = 2 delta/(4 delta - gamma)``, recorded for the rate
    calculus (``alpha -> 1/2`` as ``B`` vanishes, ``alpha = 1`` at the
    stepsize boundary).
    """

    def __init__(self, J1: Operator, T2: Operator, gamma: float):
        delta = getattr(T2, "delta", None)
        if delta is None:
            raise ValueError("T2 must carry a cocoercivity constant .delta")
        if gamma <= 0 or (not math.isinf(delta) and gamma > 2.0 * delta + 1e-12):
            raise ValueError("need 0 < gamma <= 2*delta")
        self.J1 = J1
        self.T2 = T2
        self.gamma = float(gamma)
        self.delta = delta
        if math.isinf(delta):
            self.alpha = 0.5
        else:
            self.alpha = 2.0 * delta / (4.0 * delta - gamma)
        self.descriptor = {
            "kind": "fb",
            "J1": J1.descriptor,
            "T2": T2.descriptor,
            "gamma": self.gamma,
            "alpha": self.alpha,
        }

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        return self.J1(x - self.gamma * self.T2(x))


class DRMap(Operator):
    """Two-resolvent composition ``R1 o R2`` of reflected resolvents;
    nonexpansive.  Fixed points ``x`` give zeros of the operator sum via
    ``J2(x)``."""

    def __init__(self, J1: Operator, J2: Operator):
        g1 = getattr(J1, "step", None)
        g2 = getattr(J2, "step", None)
        if g1 is not None and g2 is not None and not math.isclose(g1, g2):
            raise ValueError(f"resolvent stepsize mismatch: {g1} vs {g2}")
        self.J1 = J1
        self.J2 = J2
        self.gamma = g1 if g1 is not None else g2
        self.descriptor = {"kind": "dr", "J1": J1.descriptor, "J2": J2.descriptor}

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        y = 2.0 * self.J2(x) - x
        return 2.0 * self.J1(y) - y


# ----------------------------------------------------------------------
# Functional front-ends
# ----------------------------------------------------------------------


def project_affine_hyperplane(a, c: float, v) -> np.ndarray:
    return HyperplaneProjection(a, c)(as_vector(v))


def project_box(lo, hi, v) -> np.ndarray:
    return BoxProjection(lo, hi)(as_vector(v))


def project_ball(center, radius: float, v) -> np.ndarray:
    return BallProjection(center, radius)(as_vector(v))


def project_halfspace(a, c: float, v) -> np.ndarray:
    return HalfspaceProjection(a, c)(as_vector(v))


def soft_threshold(gamma: float, v) -> np.ndarray:
    return SoftThreshold(gamma)(as_vector(v))


def resolvent_affine(Q, q, gamma: float) -> AffineResolvent:
    return AffineResolvent(Q, q, gamma)


def reflected(J: Operator) -> ReflectedResolvent:
    return ReflectedResolvent(J)


def compose_fb(J1: Operator, T2: Operator, gamma: float) -> FBMap:
    return FBMap(J1, T2, gamma)


def compose_dr(J1: Operator, J2: Operator) -> DRMap:
    return DRMap(J1, J2)


# ----------------------------------------------------------------------
# Sampled property checks
# ----------------------------------------------------------------------


def _sample_pairs(dim: int, pairs: int, seed: int, scale: float):
    rng = np.random.default_rng(seed)
    x = rng.normal(0.0, scale, size=(pairs, dim))
    y = rng.normal(0.0, scale, size=(pairs, dim))
    return x, y


def sample_nonexpansiveness(
    T: Operator, dim: int, pairs: int = 10_000, seed: int = 0, scale: float = 3.0
) -> float:
    """Largest sampled value of ``|T(x)-T(y)| - |x-y|`` (<= 0 ideally)."""
    x, y = _sample_pairs(dim, pairs, seed, scale)
    lhs = _row_norms(T(x) - T(y))
    rhs = _row_norms(x - y)
    return float(np.max(lhs - rhs))


def sample_firm_nonexpansiveness(
    J: Operator, dim: int, pairs: int = 10_000, seed: int = 0, scale: float = 3.0
) -> float:
    """Largest sampled value of ``|Jx-Jy|^2 - <x-y, Jx-Jy>``."""
    x, y = _sample_pairs(dim, pairs, seed, scale)
    dj = J(x) - J(y)
    lhs = np.sum(dj * dj, axis=-1)
    rhs = np.sum((x - y) * dj, axis=-1)
    return float(np.max(lhs - rhs))


def sample_cocoercivity(
    B: Operator,
    delta: float,
    dim: int,
    pairs: int = 10_000,
    seed: int = 0,
    scale: float = 3.0,
) -> float:
    """Largest sampled value of ``delta |Bx-By|^2 - <x-y, Bx-By>``."""
    if math.isinf(delta):
        return 0.0
    x, y = _sample_pairs(dim, pairs, seed, scale)
    db = B(x) - B(y)
    lhs = delta * np.sum(db * db, axis=-1)
    rhs = np.sum((x - y) * db, axis=-1)
    return float(np.max(lhs - rhs))


def sample_averaged_identity(
    T: AveragedMap, dim: int, pairs: int = 100, seed: int = 0, scale: float = 3.0
) -> float:
    """Largest deviation of ``T(x)`` from ``(1-alpha)x + alpha T'(x)``."""
    x, _ = _sample_pairs(dim, pairs, seed, scale)
    direct = T(x)
    recomposed = (1.0 - T.alpha) * x + T.alpha * T.inner_op(x)
    return float(np.max(_row_norms(direct - recomposed)))


def fixed_point_residual(T: Operator, p) -> float:
    p = as_vector(p)
    return float(np.linalg.norm(T(p) - p))
