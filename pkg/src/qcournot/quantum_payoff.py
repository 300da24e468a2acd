"""Coherent-state simulation of the asymmetric duopoly.

Each firm displaces its vacuum mode by ``x_i / sqrt(2)``; a beam splitter of
angle ``gamma`` then mixes the two coherent amplitudes. Firm 1 is judged by
its mean photon number ``n1`` (a power meter), firm 2 by an integer photon
count ``m2`` drawn from a Poisson law of mean ``lambda2``. The beam splitter
is passive and linear, so the state stays a product of coherent states and
everything follows from the two mixed amplitudes; no Fock-space state is
ever built.

Three evaluators of the expected payoffs are provided and are kept
independent of each other: a closed form, a truncated sum over the Poisson
law, and a seeded Monte Carlo estimate.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .errors import DomainError

MAX_GAMMA = math.pi / 4
MC_BLOCK = 1 << 16


@dataclass(frozen=True)
class GamePoint:
    """One game instance: demand-minus-cost scale ``k`` and mixing angle ``gamma``."""

    k: float
    gamma: float

    def __post_init__(self):
        if not self.k >= 1:
            raise DomainError(f"k must be >= 1, got {self.k}")
        if not 0 <= self.gamma < MAX_GAMMA:
            raise DomainError(f"gamma must lie in [0, pi/4), got {self.gamma}")

    @property
    def cos2g(self) -> float:
        return math.cos(2 * self.gamma)


@dataclass(frozen=True)
class StrategyPair:
    """Displacement magnitudes chosen by the two firms."""

    x1: float
    x2: float

    def __post_init__(self):
        if not self.x1 >= 0 or not self.x2 >= 0:
            raise DomainError(f"strategies must be nonnegative, got ({self.x1}, {self.x2})")

    @classmethod
    def from_squares(cls, x1_sq: float, x2_sq: float) -> "StrategyPair":
        if not x1_sq >= 0 or not x2_sq >= 0:
            raise DomainError(f"squared strategies must be nonnegative, got ({x1_sq}, {x2_sq})")
        return cls(math.sqrt(x1_sq), math.sqrt(x2_sq))

    @property
    def x1_sq(self) -> float:
        return self.x1 * self.x1

    @property
    def x2_sq(self) -> float:
        return self.x2 * self.x2


class ModeIntensities(NamedTuple):
    n1: float
    lambda2: float


@dataclass(frozen=True)
class LossChannel:
    """Symmetric photon loss at rate ``kappa`` over exposure time ``t``."""

    kappa: float
    t: float

    def __post_init__(self):
        if not self.kappa >= 0 or not self.t >= 0:
            raise DomainError(f"loss rate and time must be nonnegative, got ({self.kappa}, {self.t})")

    @property
    def gain(self) -> float:
        """Amplitude factor ``exp(kappa t / 2)`` that undoes the attenuation."""
        return math.exp(0.5 * self.kappa * self.t)


def _check_gamma(gamma: float) -> None:
    if not 0 <= gamma < MAX_GAMMA:
        raise DomainError(f"gamma must lie in [0, pi/4), got {gamma}")


def mix_amplitudes(s: StrategyPair, gamma: float) -> tuple[complex, complex]:
    """Coherent amplitudes of the two modes after the beam splitter."""
    _check_gamma(gamma)
    r = math.sqrt(2) / 2
    c, sn = math.cos(gamma), math.sin(gamma)
    alpha1 = complex(r * s.x1 * c, r * s.x2 * sn)
    alpha2 = complex(r * s.x2 * c, r * s.x1 * sn)
    return alpha1, alpha2


def intensities_from_squares(x1_sq: float, x2_sq: float, gamma: float) -> ModeIntensities:
    c2, s2 = math.cos(gamma) ** 2, math.sin(gamma) ** 2
    return ModeIntensities(0.5 * (x1_sq * c2 + x2_sq * s2), 0.5 * (x2_sq * c2 + x1_sq * s2))


def mode_intensities(s: StrategyPair, gamma: float) -> ModeIntensities:
    """Mean photon number of firm 1 and Poisson mean of firm 2's count."""
    _check_gamma(gamma)
    return intensities_from_squares(s.x1_sq, s.x2_sq, gamma)


def photon_count_pmf(lambda2: float, m: int) -> float:
    """Poisson probability of ``m`` photons at mean ``lambda2``, evaluated in log space."""
    if not lambda2 >= 0 or m < 0:
        raise DomainError(f"need lambda2 >= 0 and m >= 0, got ({lambda2}, {m})")
    if lambda2 == 0:
        return 1.0 if m == 0 else 0.0
    return math.exp(-lambda2 + m * math.log(lambda2) - math.lgamma(m + 1))


def poisson_truncation(lambda2: float, tail_tol: float) -> int:
    """Smallest cutoff of the form used here whose tail mass is provably below ``tail_tol``.

    Starts from ``ceil(lambda + 12 sqrt(lambda) + 30)``; for ``m > lambda`` the
    ratio of successive probabilities is below ``lambda/(m+1)``, so the tail
    past ``M`` is bounded by a geometric series.
    """
    if lambda2 == 0:
        return 0
    cutoff = math.ceil(lambda2 + 12 * math.sqrt(lambda2) + 30)
    while True:
        ratio = lambda2 / (cutoff + 2)
        if ratio < 1:
            bound = photon_count_pmf(lambda2, cutoff + 1) / (1 - ratio)
            if bound < tail_tol:
                return cutoff
        cutoff += max(10, cutoff // 4)


def payoffs_from_squares(x1_sq: float, x2_sq: float, k: float, gamma: float) -> tuple[float, float]:
    n1, lam = intensities_from_squares(x1_sq, x2_sq, gamma)
    half_total = 0.5 * (x1_sq + x2_sq)
    return n1 * (k - half_total), lam * (k - 1.0 - half_total)


def quantum_payoffs_closed(s: StrategyPair, g: GamePoint) -> tuple[float, float]:
    """Expected payoffs in closed form.

    Averaging over the Poisson count leaves ``n1 (k - (x1^2 + x2^2)/2)`` for
    firm 1; firm 2 additionally loses the count variance ``lambda2``.
    """
    return payoffs_from_squares(s.x1_sq, s.x2_sq, g.k, g.gamma)


def quantum_payoffs_series(
    s: StrategyPair, g: GamePoint, tail_tol: float = 1e-12
) -> tuple[float, float]:
    """Expected payoffs by explicit summation over firm 2's photon count.

    The per-outcome payoffs are ``n1 (k - n1 - m)`` and ``m (k - n1 - m)``;
    summation stops once the remaining Poisson mass is below ``tail_tol``.
    """
    if not 0 < tail_tol <= 1e-6:
        raise DomainError(f"tail_tol must lie in (0, 1e-6], got {tail_tol}")
    n1, lam = mode_intensities(s, g.gamma)
    cutoff = poisson_truncation(lam, tail_tol)
    terms1, terms2 = [], []
    for m in range(cutoff + 1):
        p = photon_count_pmf(lam, m)
        margin = g.k - (n1 + m)
        terms1.append(n1 * margin * p)
        terms2.append(m * margin * p)
    return math.fsum(terms1), math.fsum(terms2)


class MonteCarloPayoffs(NamedTuple):
    u1: float
    u2: float
    stderr2: float
    stderr1: float


def _block_counts(lam: float, seed: int, block: int, size: int) -> np.ndarray:
    ss = np.random.SeedSequence(seed & 0xFFFFFFFFFFFFFFFF, spawn_key=(block,))
    rng = np.random.Generator(np.random.PCG64(ss))
    return np.bincount(rng.poisson(lam, size))


def quantum_payoffs_mc(
    s: StrategyPair,
    g: GamePoint,
    n_samples: int = 1_000_000,
    seed: int = 1,
    workers: int = 1,
) -> MonteCarloPayoffs:
    """Monte Carlo estimate of the expected payoffs.

    Samples are drawn in fixed-size blocks, block ``i`` seeded from
    ``(seed, i)``, and reduced to exact integer power sums of the counts. The
    result is therefore bit-identical for a given seed whatever ``workers`` is.

    Returns:
        ``MonteCarloPayoffs(u1, u2, stderr2, stderr1)``; the standard errors
        are NaN when ``n_samples == 1``.
    """
    if n_samples < 1:
        raise DomainError(f"n_samples must be >= 1, got {n_samples}")
    n1, lam = mode_intensities(s, g.gamma)
    sizes = [MC_BLOCK] * (n_samples // MC_BLOCK)
    if n_samples % MC_BLOCK:
        sizes.append(n_samples % MC_BLOCK)

    jobs = [(lam, seed, i, size) for i, size in enumerate(sizes)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(lambda a: _block_counts(*a), jobs))
    else:
        counts = [_block_counts(*a) for a in jobs]

    sums = [0, 0, 0, 0, 0]
    for c in counts:
        for m, cnt in enumerate(c.tolist()):
            if cnt:
                mp = cnt
                for p in range(5):
                    sums[p] += mp
                    mp *= m
    n, s1, s2, s3, s4 = sums

    a = g.k - n1
    u1 = n1 * (a - s1 / n)
    u2 = (a * s1 - s2) / n
    if n == 1:
        return MonteCarloPayoffs(u1, u2, math.nan, math.nan)

    fa = Fraction(a)
    var_m = (Fraction(s2) - Fraction(s1 * s1, n)) / (n - 1)
    sum_u2 = fa * s1 - s2
    sum_u2_sq = fa * fa * s2 - 2 * fa * s3 + s4
    var_u2 = (sum_u2_sq - sum_u2 * sum_u2 / n) / (n - 1)
    stderr2 = math.sqrt(float(var_u2) / n)
    stderr1 = abs(n1) * math.sqrt(float(var_m) / n)
    return MonteCarloPayoffs(u1, u2, stderr2, stderr1)


def compensate_loss(s: StrategyPair, ch: LossChannel) -> StrategyPair:
    """Pre-amplify both strategies so that the channel's attenuation cancels."""
    f = ch.gain
    return StrategyPair(s.x1 * f, s.x2 * f)


def apply_loss(s: StrategyPair, ch: LossChannel) -> StrategyPair:
    """Attenuate both amplitudes by ``exp(-kappa t / 2)``.

    Equal attenuation on both modes commutes with the beam splitter, so it is
    immaterial whether the loss acts before or after mixing.
    """
    f = ch.gain
    return StrategyPair(s.x1 / f, s.x2 / f)
