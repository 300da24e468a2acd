"""Nash equilibrium of the coherent-state duopoly.

The closed forms have two branches split by ``cos(2 gamma) = 1/(k - 1)``:
an interior equilibrium where both firms displace their modes, and a corner
where firm 2 plays the vacuum and firm 1 plays ``x1^2 = k``. Both branches
meet continuously at the boundary.

:func:`numeric_nash` is the independent check on the closed forms. It runs
alternating best responses, each found by golden-section search on the raw
payoff function, and never touches the equilibrium formulas.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _ddarith as dd
from .errors import ConvergenceError, DomainError
from .quantum_payoff import GamePoint, payoffs_from_squares

BOUNDARY_TOL = 1e-12
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


class Branch(enum.Enum):
    INTERIOR = "Interior"
    CORNER = "Corner"
    BOUNDARY = "Boundary"


class Firm(enum.Enum):
    ONE = 1
    TWO = 2


@dataclass(frozen=True)
class EquilibriumResult:
    point: GamePoint
    x1_sq: float
    x2_sq: float
    U1: float
    U2: float
    branch: Branch


def branch_of(g: GamePoint) -> Branch:
    """Which equilibrium branch applies at ``g``.

    ``k = 1`` is always a corner; the threshold ``1/(k - 1)`` is not evaluated there.
    """
    if g.k == 1:
        return Branch.CORNER
    gap = g.cos2g - 1.0 / (g.k - 1.0)
    if abs(gap) <= BOUNDARY_TOL:
        return Branch.BOUNDARY
    return Branch.INTERIOR if gap > 0 else Branch.CORNER


def transition_gamma(k: float) -> Optional[float]:
    """Angle at which the equilibrium switches branch, or None when ``k < 2``."""
    if not k >= 1:
        raise DomainError(f"k must be >= 1, got {k}")
    if k < 2:
        return None
    return 0.5 * math.acos(1.0 / (k - 1.0))


def interior_strategies(g: GamePoint) -> tuple[float, float]:
    """Interior-branch formulas, evaluated regardless of which branch applies."""
    c2 = math.cos(g.gamma) ** 2
    cos2g = g.cos2g
    sec2g = 1.0 / cos2g
    denom = 2.0 + cos2g
    return 2 * c2 * (g.k + sec2g) / denom, 2 * c2 * (g.k - 1 - sec2g) / denom


def interior_payoffs(g: GamePoint) -> tuple[float, float]:
    c2 = math.cos(g.gamma) ** 2
    cos2g = g.cos2g
    denom = 4 * (2 + cos2g) ** 2
    return (
        c2 * (1 + 2 * g.k + cos2g) ** 2 / denom,
        c2 * (3 - 2 * g.k + cos2g) ** 2 / denom,
    )


def corner_payoffs(g: GamePoint) -> tuple[float, float]:
    k = g.k
    return k * k * math.cos(g.gamma) ** 2 / 4, k * (k - 2) * math.sin(g.gamma) ** 2 / 4


def nash_payoffs(g: GamePoint) -> tuple[float, float]:
    """Equilibrium payoffs ``(U1, U2)`` on whichever branch applies."""
    if branch_of(g) is Branch.INTERIOR:
        return interior_payoffs(g)
    return corner_payoffs(g)


def closed_form_nash(g: GamePoint) -> EquilibriumResult:
    branch = branch_of(g)
    if branch is Branch.INTERIOR:
        x1_sq, x2_sq = interior_strategies(g)
    else:
        # both formulas coincide on the boundary; the corner values are exact there
        x1_sq, x2_sq = float(g.k), 0.0
    U1, U2 = nash_payoffs(g)
    return EquilibriumResult(g, x1_sq, x2_sq, U1, U2, branch)


# --- numeric oracle -------------------------------------------------------


def _payoff_dd(firm, own, other, k, c2, s2):
    """Payoff of ``firm`` in double-double, as a function of its own squared strategy."""
    n = dd.add(dd.two_prod(own, c2), dd.two_prod(other, s2))
    n = dd.scale(n, 0.5)
    total = dd.scale(dd.two_sum(own, other), 0.5)
    base = dd.from_float(k) if firm is Firm.ONE else dd.two_sum(k, -np.ones_like(k))
    margin = dd.add(base, dd.neg(total))
    return dd.mul(n, margin)


def _golden_max(f, lo, hi, tol):
    """Vectorised golden-section maximisation of ``f`` on ``[lo, hi]``.

    ``f`` maps an array of abscissae to a double-double pair. Every element
    runs the same number of iterations, enough for the widest bracket.
    """
    lo = lo.copy()
    hi = hi.copy()
    width = float(np.max(hi - lo))
    n_iter = max(1, math.ceil(math.log(tol / width) / math.log(_INVPHI))) if width > tol else 0
    x1 = hi - _INVPHI * (hi - lo)
    x2 = lo + _INVPHI * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(n_iter):
        right = dd.greater(f2, f1)
        lo = np.where(right, x1, lo)
        hi = np.where(right, hi, x2)
        new_x = np.where(right, lo + _INVPHI * (hi - lo), hi - _INVPHI * (hi - lo))
        f_new = f(new_x)
        x1, x2 = np.where(right, x2, new_x), np.where(right, new_x, x1)
        f1, f2 = (
            (np.where(right, f2[0], f_new[0]), np.where(right, f2[1], f_new[1])),
            (np.where(right, f_new[0], f1[0]), np.where(right, f_new[1], f1[1])),
        )
    best = 0.5 * (lo + hi)
    # the search box starts at zero; a maximum there is reached only asymptotically
    at_zero = ~dd.greater(f(best), f(np.zeros_like(best)))
    return np.where(at_zero, 0.0, best)


def _best_response_batch(firm, other_sq, k, gamma, tol):
    c2 = np.cos(gamma) ** 2
    s2 = np.sin(gamma) ** 2

    def f(own):
        return _payoff_dd(firm, own, other_sq, k, c2, s2)

    return _golden_max(f, np.zeros_like(k), 4.0 * k, tol)


def best_response(firm: Firm, other_x_sq: float, g: GamePoint, tol: float = 1e-10) -> float:
    """Squared strategy maximising ``firm``'s payoff against ``other_x_sq``.

    Searches ``[0, 4k]`` by golden section; payoffs are negative beyond
    ``x^2 = 2k`` so the box always contains the maximiser.
    """
    if not other_x_sq >= 0:
        raise DomainError(f"opponent strategy must be nonnegative, got {other_x_sq}")
    k = np.array([float(g.k)])
    out = _best_response_batch(firm, np.array([float(other_x_sq)]), k, np.array([g.gamma]), tol)
    return float(out[0])


def numeric_nash_batch(ks, gammas, tol: float = 1e-10, max_iter: int = 10_000):
    """Alternating best-response equilibria for many game points at once.

    Returns:
        ``(x1_sq, x2_sq, iterations)`` arrays aligned with the inputs.

    Raises:
        ConvergenceError: some point had not settled after ``max_iter`` rounds;
            ``last`` holds the final ``(x1_sq, x2_sq)`` arrays.
    """
    if not 1e-12 <= tol <= 1e-4:
        raise DomainError(f"tol must lie in [1e-12, 1e-4], got {tol}")
    ks = np.asarray(ks, dtype=float).ravel()
    gammas = np.asarray(gammas, dtype=float).ravel()
    x1 = ks / 2
    x2 = ks / 2
    prev_change = np.full_like(ks, np.inf)
    iterations = np.zeros(ks.shape, dtype=int)
    active = np.ones(ks.shape, dtype=bool)
    br_tol = tol / 100

    for it in range(1, max_iter + 1):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        k, gm = ks[idx], gammas[idx]
        new1 = _best_response_batch(Firm.ONE, x2[idx], k, gm, br_tol)
        new2 = _best_response_batch(Firm.TWO, new1, k, gm, br_tol)
        change = np.maximum(np.abs(new1 - x1[idx]), np.abs(new2 - x2[idx]))
        x1[idx], x2[idx] = new1, new2
        iterations[idx] = it
        # a change below tol is necessary; scaling by (1 - rate) bounds the
        # remaining distance to the fixed point as well
        with np.errstate(divide="ignore", invalid="ignore"):
            rate = np.clip(change / prev_change[idx], 0.0, 0.999)
        rate = np.where(np.isfinite(rate), rate, 0.999)
        done = (change == 0) | (change < tol * (1 - rate))
        prev_change[idx] = change
        active[idx[done]] = False
    else:
        if active.any():
            raise ConvergenceError(
                f"best-response iteration did not settle after {max_iter} rounds",
                last=(x1, x2),
            )
    return x1, x2, iterations


def numeric_nash(g: GamePoint, tol: float = 1e-10) -> EquilibriumResult:
    """Equilibrium found by alternating best responses from ``(k/2, k/2)``.

    Payoffs are the raw expected payoffs at the strategies found, so nothing
    here depends on the closed-form equilibrium.
    """
    x1, x2, _ = numeric_nash_batch([g.k], [g.gamma], tol)
    x1_sq, x2_sq = float(x1[0]), float(x2[0])
    U1, U2 = payoffs_from_squares(x1_sq, x2_sq, g.k, g.gamma)
    return EquilibriumResult(g, x1_sq, x2_sq, U1, U2, branch_of(g))
