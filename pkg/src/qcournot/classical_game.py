"""Asymmetric classical Cournot duopoly with execution noise on firm 2.

Firm 1 executes its quantity exactly. Firm 2 only controls the mean of a
nonnegative integer outcome whose law (the "count distribution") is common
knowledge. In the limit a, c -> infinity with k = a - c fixed, the expected
payoffs are

    u1 = q1 (k - q1 - q2)
    u2 = q2 (k - q1 - q2) - Var(q2)

so the noise on firm 2 enters only through the variance of its outcome.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

from .errors import ConvergenceError, DomainError, SecondOrderConditionError

BISECTION_TOL = 1e-10
BISECTION_MAX_ITER = 200
CURVATURE_STEP = 1e-4


class DistributionKind(enum.Enum):
    DETERMINISTIC = "deterministic"
    CONSTANT_VARIANCE = "constant"
    POISSON = "poisson"
    CUSTOM = "custom"


@dataclass(frozen=True)
class CountDistribution:
    """Execution-noise law of firm 2, described through its variance.

    Only the variance as a function of the mean and its derivative enter the
    game, so that is all a distribution carries. Use the constructors
    :meth:`deterministic`, :meth:`constant`, :meth:`poisson` and :meth:`custom`
    rather than building instances by hand.
    """

    kind: DistributionKind
    sigma2: float = 0.0
    mean_to_variance: Optional[Callable[[float], float]] = None
    variance_derivative_fn: Optional[Callable[[float], float]] = None

    @classmethod
    def deterministic(cls) -> "CountDistribution":
        return cls(DistributionKind.DETERMINISTIC)

    @classmethod
    def constant(cls, sigma2: float) -> "CountDistribution":
        if not sigma2 >= 0:
            raise DomainError(f"constant variance must be nonnegative, got {sigma2}")
        return cls(DistributionKind.CONSTANT_VARIANCE, sigma2=float(sigma2))

    @classmethod
    def poisson(cls) -> "CountDistribution":
        return cls(DistributionKind.POISSON)

    @classmethod
    def custom(
        cls,
        variance: Callable[[float], float],
        derivative: Callable[[float], float],
        check_points=(0.5, 1.0, 2.0, 5.0),
    ) -> "CountDistribution":
        """Wrap a user-supplied variance law.

        The analytic derivative is compared with a central difference at
        ``check_points``; a disagreement only warns, since kinks such as
        ``max(4 - 2q, 0)`` legitimately break the comparison at isolated points.
        """
        dist = cls(
            DistributionKind.CUSTOM,
            mean_to_variance=variance,
            variance_derivative_fn=derivative,
        )
        for q in check_points:
            h = 1e-6 * max(1.0, q)
            fd = (variance(q + h) - variance(q - h)) / (2 * h)
            an = derivative(q)
            if abs(fd - an) > 1e-6 * max(1.0, abs(an)):
                warnings.warn(
                    f"variance derivative {an!r} disagrees with finite difference "
                    f"{fd!r} at q2={q}",
                    RuntimeWarning,
                    stacklevel=2,
                )
        return dist

    def variance(self, q2: float) -> float:
        if q2 < 0:
            raise DomainError(f"mean quantity must be nonnegative, got {q2}")
        if self.kind is DistributionKind.DETERMINISTIC:
            return 0.0
        if self.kind is DistributionKind.CONSTANT_VARIANCE:
            return self.sigma2
        if self.kind is DistributionKind.POISSON:
            return float(q2)
        v = float(self.mean_to_variance(q2))
        if not (v >= 0 and math.isfinite(v)):
            raise DomainError(f"variance undefined or negative at q2={q2}: {v}")
        return v

    def variance_derivative(self, q2: float) -> float:
        if self.kind in (DistributionKind.DETERMINISTIC, DistributionKind.CONSTANT_VARIANCE):
            return 0.0
        if self.kind is DistributionKind.POISSON:
            return 1.0
        return float(self.variance_derivative_fn(q2))


@dataclass(frozen=True)
class ClassicalQuantities:
    q1: float
    q2: float
    k: float

    def __post_init__(self):
        if not self.q1 >= 0 or not self.q2 >= 0:
            raise DomainError(f"quantities must be nonnegative, got q1={self.q1}, q2={self.q2}")
        if not self.k >= 1:
            raise DomainError(f"k must be >= 1, got {self.k}")


def classical_payoffs(q: ClassicalQuantities, dist: CountDistribution) -> tuple[float, float]:
    """Expected payoffs of both firms.

    Returns:
        ``(u1, u2)``; firm 2 pays the variance of its outcome.
    """
    margin = q.k - (q.q1 + q.q2)
    return q.q1 * margin, q.q2 * margin - dist.variance(q.q2)


def mandel_q(dist: CountDistribution, q2: float) -> tuple[float, float]:
    """Mandel Q parameter and g2(0) of firm 2's outcome at mean ``q2``."""
    if not q2 > 0:
        raise DomainError(f"Mandel Q and g2(0) need q2 > 0, got {q2}")
    if dist.kind is DistributionKind.POISSON:
        return 0.0, 1.0
    Q = dist.variance(q2) / q2 - 1.0
    return Q, (Q + q2) / q2


def classical_payoffs_mandel_form(q: ClassicalQuantities, Q: float) -> tuple[float, float]:
    """Same payoffs written through the Mandel Q parameter instead of the variance."""
    u1 = q.q1 * (q.k - (q.q1 + q.q2))
    u2 = q.q2 * (q.k - (q.q1 + q.q2 + Q + 1.0))
    return u1, u2


def _check_k(k: float) -> None:
    if not k >= 1:
        raise DomainError(f"k must be >= 1, got {k}")


def _variance_curvature(dist: CountDistribution, q2: float, h: float = CURVATURE_STEP) -> float:
    # one-sided stencil when the central one would leave q2 >= 0
    if q2 >= h:
        return (dist.variance(q2 + h) - 2 * dist.variance(q2) + dist.variance(q2 - h)) / h**2
    return (dist.variance(q2 + 2 * h) - 2 * dist.variance(q2 + h) + dist.variance(q2)) / h**2


def _firm2_bracket(dist: CountDistribution, k: float) -> tuple[float, float]:
    """Bisection bracket ``(lo, hi)`` around firm 2's equilibrium quantity.

    The map being solved can jump where the variance has a kink, so the
    bracket may close on a discontinuity rather than a true zero.
    """

    def f(q2):
        return q2 - max(k / 3.0 - (2.0 / 3.0) * dist.variance_derivative(q2), 0.0)

    lo, hi = 0.0, float(k)
    f_lo, f_hi = f(lo), f(hi)
    if f_lo == 0.0:
        return lo, lo
    if f_hi == 0.0:
        return hi, hi
    if (f_lo > 0) == (f_hi > 0):
        raise ConvergenceError(
            f"no sign change of the equilibrium condition on [0, {k}]", last=(lo, hi)
        )
    lo_sign = f_lo > 0
    for _ in range(BISECTION_MAX_ITER):
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if f_mid == 0.0:
            return mid, mid
        if (f_mid > 0) == lo_sign:
            lo = mid
        else:
            hi = mid
        if hi - lo <= BISECTION_TOL:
            return lo, hi
    raise ConvergenceError("bisection did not converge", last=(lo, hi))


def general_nash(dist: CountDistribution, k: float) -> tuple[float, float]:
    """Nash equilibrium quantities for an arbitrary count distribution.

    Firm 2's quantity is the root of ``q2 - max(k/3 - 2/3 dVar/dq2, 0)`` on
    ``[0, k]``, located by bisection; firm 1 then best-responds with
    ``(k - q2)/2``.

    Raises:
        DomainError: k < 1.
        ConvergenceError: no sign change on [0, k] or bisection cap reached.
        SecondOrderConditionError: the variance curvature is <= -2 at the root.
    """
    _check_k(k)
    lo, hi = _firm2_bracket(dist, k)
    root = 0.5 * (lo + hi)
    curvature = _variance_curvature(dist, root)
    if not curvature > -2.0:
        raise SecondOrderConditionError(
            f"d2Var/dq2^2 = {curvature:.6g} violates d2Var/dq2^2 > -2 at q2* = {root:.6g}"
        )
    return (k - root) / 2.0, root


def firm2_advantage(dist: CountDistribution, k: float) -> bool:
    """Whether firm 2 out-earns firm 1 at the equilibrium of :func:`general_nash`.

    Tests ``delta (k + delta)/3 + Var(q2*) < 0`` with ``delta = dVar/dq2``.
    Both are taken at the lower end of the final bisection bracket, i.e. as
    left limits, which only matters when ``q2*`` sits on a kink of the variance.
    """
    general_nash(dist, k)
    q2, _ = _firm2_bracket(dist, k)
    delta = dist.variance_derivative(q2)
    return delta * (k + delta) / 3.0 + dist.variance(q2) < 0


def poisson_case_equilibrium(k: float) -> tuple[float, float, float, float]:
    """Closed-form equilibrium ``(q1*, q2*, u1*, u2*)`` for Poisson execution noise."""
    _check_k(k)
    q1 = min((k + 1) / 3.0, k / 2.0)
    q2 = max((k - 2) / 3.0, 0.0)
    u1 = min((k + 1) ** 2 / 9.0, k * k / 4.0)
    u2 = q2 * q2
    return q1, q2, u1, u2
