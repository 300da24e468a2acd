"""Quantities derived from the equilibrium payoffs, and grid sweeps over (k, gamma).

Besides the sum and difference of the equilibrium payoffs this module gives
the dimensionless asymmetry measures

    s     = min(2/k, 1)                      degree of asymmetry
    s_bar = 1 - s                            degree of symmetry
    xi    = (1 - cos 2g) / (1 + cos 2g)      degree of cooperation

in terms of which the scaled payoff difference has a three-way case split,
and the A/B/C/D labelling of the (k, gamma) plane by the signs of
dU1/dgamma, dU2/dgamma and d(U1 + U2)/dgamma.
"""

from __future__ import annotations

import enum
import io
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .equilibrium_solver import (
    Branch,
    branch_of,
    closed_form_nash,
    corner_payoffs,
    interior_payoffs,
    nash_payoffs,
    transition_gamma,
)
from .errors import DomainError, RegionInconsistencyError
from .quantum_payoff import MAX_GAMMA, GamePoint

DERIV_STEP = 1e-6
REGION_GUARD = 1e-4
GAMMA_CAP = MAX_GAMMA - 1e-6
TIE_TOL = 1e-12

CSV_HEADER = (
    "k,inv_k,gamma,x1_sq,x2_sq,x1_sq_over_k,x2_sq_over_k,U1,U2,"
    "U1_over_k2,U2_over_k2,sum_over_k2,diff_over_k2,branch,region"
)
REGION_HEADER = "k,inv_k,gamma,branch,region"


class Region(enum.Enum):
    A = "A"
    B = "B"
    C = "C"
    D = "D"


# sign triples of (dU1, dU2, d(U1+U2)) per region
_REGION_SIGNS = {
    (-1, -1, -1): Region.A,
    (-1, 1, -1): Region.B,
    (-1, 1, 1): Region.C,
    (1, 1, 1): Region.D,
}


@dataclass(frozen=True)
class AsymmetryMeasures:
    s: float
    s_bar: float
    xi: float


def payoff_sum_diff(g: GamePoint) -> tuple[float, float]:
    """``(U1 + U2, U1 - U2)`` at equilibrium, from their own closed forms."""
    k = g.k
    cos2g = g.cos2g
    c2 = math.cos(g.gamma) ** 2
    if branch_of(g) is Branch.INTERIOR:
        cos4g = math.cos(4 * g.gamma)
        total = c2 * (11 + 8 * k * (k - 1) + 8 * cos2g + cos4g) / (4 * (2 + cos2g) ** 2)
        diff = c2 * (2 * k - 1) / (2 + cos2g)
    else:
        total = k * (k - 1 + cos2g) / 4
        diff = k * (1 + (k - 1) * cos2g) / 4
    return total, diff


def asymmetry_measures(g: GamePoint) -> AsymmetryMeasures:
    s = min(2.0 / g.k, 1.0)
    cos2g = g.cos2g
    return AsymmetryMeasures(s, 1.0 - s, (1.0 - cos2g) / (1.0 + cos2g))


def scaled_diff(g: GamePoint) -> float:
    """``(U1 - U2)/k^2`` written through ``s_bar`` and ``xi``.

    Dispatches on the sign of ``s_bar - xi``; the tie is the branch boundary.
    """
    m = asymmetry_measures(g)
    if abs(m.s_bar - m.xi) <= TIE_TOL:
        return m.s / 4
    if m.s_bar > m.xi:
        return (1 - (1 + m.s_bar) ** 2 / 4) / (3 + m.xi)
    if m.s_bar == 0:
        return 0.25 * (1 + (2 / g.k - 1) * m.xi) / (1 + m.xi)
    return 0.25 * (1 - m.s_bar * m.xi) / (1 + m.xi)


def boundary_values(k: float) -> tuple[float, float]:
    """Scaled difference and sum of the equilibrium payoffs on the branch boundary."""
    if not k >= 2:
        raise DomainError(f"no branch boundary in [0, pi/4) for k = {k} < 2")
    s = min(2.0 / k, 1.0)
    s_bar = 1.0 - s
    return s / 4, 0.25 * (1 + s_bar**2) / (1 + s_bar)


def _branch_payoffs(k: float, gamma: float, branch: Branch) -> tuple[float, float]:
    # GamePoint validation is bypassed so stencils may poke just outside [0, pi/4)
    g = object.__new__(GamePoint)
    object.__setattr__(g, "k", k)
    object.__setattr__(g, "gamma", gamma)
    return interior_payoffs(g) if branch is Branch.INTERIOR else corner_payoffs(g)


class PayoffSlopes(NamedTuple):
    dU1: float
    dU2: float
    dsum: float


def payoff_gamma_derivatives(g: GamePoint, h: float = DERIV_STEP) -> PayoffSlopes:
    """Central-difference gamma-derivatives of the equilibrium payoffs.

    The branch formula in force at ``g`` is differenced, so a stencil that
    straddles the transition angle still sees a single smooth branch. On the
    boundary itself the corner side is used.
    """
    branch = branch_of(g)
    if branch is Branch.BOUNDARY:
        branch = Branch.CORNER
    lo = _branch_payoffs(g.k, g.gamma - h, branch)
    hi = _branch_payoffs(g.k, g.gamma + h, branch)
    d1 = (hi[0] - lo[0]) / (2 * h)
    d2 = (hi[1] - lo[1]) / (2 * h)
    return PayoffSlopes(d1, d2, ((hi[0] + hi[1]) - (lo[0] + lo[1])) / (2 * h))


def region_defined(g: GamePoint) -> bool:
    """Whether the derivative signs at ``g`` are well conditioned.

    Excludes points within 1e-4 of gamma = 0, pi/4 and the transition angle,
    and k within 1e-4 of 2 where U2 vanishes identically.
    """
    if g.gamma < REGION_GUARD or g.gamma > MAX_GAMMA - REGION_GUARD:
        return False
    if abs(g.k - 2) < REGION_GUARD:
        return False
    gc = transition_gamma(g.k)
    return gc is None or abs(g.gamma - gc) >= REGION_GUARD


def classify_region(g: GamePoint) -> Region:
    """Label ``g`` with one of the regions A-D by its payoff slope signs.

    Raises:
        DomainError: ``g`` is too close to an edge where the signs are unreliable.
        RegionInconsistencyError: the sign triple is not one of the four patterns.
    """
    if not region_defined(g):
        raise DomainError(f"region undefined near gamma edges, transition or k = 2: {g}")
    slopes = payoff_gamma_derivatives(g)
    signs = tuple(int(np.sign(v)) for v in slopes)
    try:
        return _REGION_SIGNS[signs]
    except KeyError:
        raise RegionInconsistencyError(
            f"slope signs {signs} at k={g.k}, gamma={g.gamma} match no region"
        ) from None


# --- sweeps ---------------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    """Inclusive evenly spaced grid ``(min, max, count)``."""

    min: float
    max: float
    count: int

    def __post_init__(self):
        if self.count < 1:
            raise DomainError(f"grid count must be >= 1, got {self.count}")
        if not self.min <= self.max:
            raise DomainError(f"grid min {self.min} exceeds max {self.max}")
        if self.count == 1 and self.min != self.max:
            raise DomainError("a one-point grid needs min == max")

    def values(self) -> np.ndarray:
        return np.linspace(self.min, self.max, self.count)


@dataclass(frozen=True)
class SweepRow:
    k: float
    gamma: float
    x1_sq: float
    x2_sq: float
    U1: float
    U2: float
    sum: float
    diff: float
    branch: Branch
    region: Optional[Region]

    @property
    def inv_k(self) -> float:
        return 1.0 / self.k

    def csv_fields(self) -> tuple:
        k2 = self.k * self.k
        return (
            self.k,
            self.inv_k,
            self.gamma,
            self.x1_sq,
            self.x2_sq,
            self.x1_sq / self.k,
            self.x2_sq / self.k,
            self.U1,
            self.U2,
            self.U1 / k2,
            self.U2 / k2,
            self.sum / k2,
            self.diff / k2,
            self.branch.value,
            self.region.value if self.region else "",
        )


def format_number(v: float, precision: int) -> str:
    text = f"{v:.{precision}g}"
    return "0" if text in ("-0", "0") else text


def _csv_cell(v, precision):
    return format_number(v, precision) if isinstance(v, float) else str(v)


@dataclass
class SweepTable:
    rows: list[SweepRow]

    def to_csv(self, precision: int = 12) -> str:
        out = io.StringIO()
        out.write(CSV_HEADER + "\n")
        for row in self.rows:
            out.write(",".join(_csv_cell(v, precision) for v in row.csv_fields()) + "\n")
        return out.getvalue()

    def to_region_csv(self, precision: int = 12) -> str:
        out = io.StringIO()
        out.write(REGION_HEADER + "\n")
        for row in self.rows:
            fields = row.csv_fields()
            cells = fields[:3] + fields[-2:]
            out.write(",".join(_csv_cell(v, precision) for v in cells) + "\n")
        return out.getvalue()


def sweep_point(k: float, gamma: float) -> SweepRow:
    g = GamePoint(float(k), float(gamma))
    eq = closed_form_nash(g)
    total, diff = payoff_sum_diff(g)
    region = classify_region(g) if region_defined(g) else None
    return SweepRow(g.k, g.gamma, eq.x1_sq, eq.x2_sq, eq.U1, eq.U2, total, diff, eq.branch, region)


def sweep(k_range: GridSpec, gamma_range: GridSpec) -> SweepTable:
    """Evaluate every grid point, ordered by k index then gamma index.

    The upper gamma bound is capped at ``pi/4 - 1e-6``; points where the
    region is ill-conditioned get an empty region.
    """
    if k_range.min < 1:
        raise DomainError(f"k grid must stay >= 1, got min {k_range.min}")
    if gamma_range.min < 0:
        raise DomainError(f"gamma grid must stay >= 0, got min {gamma_range.min}")
    if gamma_range.max > GAMMA_CAP:
        gamma_range = GridSpec(
            min(gamma_range.min, GAMMA_CAP),
            GAMMA_CAP,
            gamma_range.count,
        )
    ks = k_range.values()
    gammas = gamma_range.values()
    return SweepTable([sweep_point(k, gm) for k in ks for gm in gammas])
