"""Oscillation functional, restriction sequences and their refinements.

The oscillation of ``f`` at a base point ``x`` and radius ``r`` is the
smallest Hölder quotient ``|f(x) - f(x')| / |x - x'|**alpha`` over sample
points ``x' != x`` in the closed ball of radius ``r``. Small oscillation at
every scale is what lets us restrict ``f`` to a sequence converging to ``x``
on which it is Hölder at ``x``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from holderkit.core import SampleFunction, row_norms

DEFAULT_R_GRID = tuple(2.0**-j for j in range(41))


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0 < alpha <= 1:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    return alpha


def holder_quotients(F: SampleFunction, base: int, alpha: float) -> tuple[np.ndarray, np.ndarray]:
    """Distances to ``base`` and Hölder quotients for every sample.

    The base point itself gets distance 0 and quotient NaN.
    """
    d = F.distances_from(base)
    gap = F.value_gaps_from(base)
    q = np.full_like(d, np.nan)
    mask = d > 0
    q[mask] = gap[mask] / d[mask] ** alpha
    return d, q


@dataclass(frozen=True)
class OmegaValue:
    value: float
    witness_index: Optional[int] = None

    def __post_init__(self):
        if (self.witness_index is None) != math.isinf(self.value):
            raise ValueError("value is +inf exactly when there is no witness")

    @property
    def is_empty(self) -> bool:
        return self.witness_index is None


def omega(F: SampleFunction, base_index: int, r: float, alpha: float) -> OmegaValue:
    """Smallest Hölder quotient over the punctured closed ball ``B_r(x) \\ {x}``."""
    alpha = _check_alpha(alpha)
    base = F.check_index(base_index)
    if not r > 0:
        raise ValueError(f"radius must be positive, got {r}")
    d, q = holder_quotients(F, base, alpha)
    cand = np.flatnonzero((d > 0) & (d <= r))
    if cand.size == 0:
        return OmegaValue(math.inf)
    j = cand[np.argmin(q[cand])]
    return OmegaValue(float(q[j]), int(j))


def rho(F: SampleFunction, base_index: int, alpha: float,
        r_grid: Sequence[float] = DEFAULT_R_GRID) -> float:
    """Largest grid radius at which the oscillation is positive, or 0.

    Omega(x, r) > 0 exactly when no sample with ``f(x') == f(x)`` lies within
    ``r``, so this needs only the distance to the nearest such sample.
    """
    alpha = _check_alpha(alpha)
    base = F.check_index(base_index)
    grid = np.asarray(r_grid, dtype=float)
    if grid.size == 0:
        raise ValueError("empty radius grid")
    if not ((grid > 0) & (grid <= 1)).all():
        raise ValueError("radii must lie in (0, 1]")
    d = F.distances_from(base)
    gap = F.value_gaps_from(base)
    ties = d[(d > 0) & (gap == 0)]
    nearest_tie = ties.min() if ties.size else math.inf
    ok = grid[grid < nearest_tie]
    return float(ok.max()) if ok.size else 0.0


@dataclass(frozen=True)
class HolderCertificate:
    base_index: int
    alpha: float
    sequence: tuple[int, ...]
    M: float

    def to_dict(self) -> dict:
        return {"base": self.base_index, "alpha": self.alpha, "sequence": list(self.sequence), "M": self.M}

    def quotients(self, F: SampleFunction) -> np.ndarray:
        _, q = holder_quotients(F, self.base_index, self.alpha)
        return q[list(self.sequence)]

    def check(self, F: SampleFunction, rtol: float = 1e-12) -> list[str]:
        """Recompute the certificate's claims from ``F``; returns the problems found."""
        problems = []
        seq = list(self.sequence)
        if len(set(seq)) != len(seq) or self.base_index in seq:
            problems.append("sequence has repeats or contains the base")
        d = F.distances_from(self.base_index)[seq]
        if np.any(np.diff(d) >= 0):
            problems.append("distances do not strictly decrease")
        q = self.quotients(F)
        if np.any(q > self.M * (1 + rtol)):
            problems.append("a quotient exceeds M")
        return problems


def extract_restriction_sequence(F: SampleFunction, base_index: int, alpha: float,
                                 k_max: int = 40, shrink: float = 0.5) -> HolderCertificate:
    """Greedy sequence ``x_k -> x`` with the smallest quotient at each scale.

    Starting from the farthest sample, each step looks at the shell
    ``(shrink * d_far, d_far]`` where ``d_far`` is the largest remaining
    distance inside the current radius, picks the sample of least quotient
    there (lowest index on ties), then shrinks the radius to
    ``shrink * d_picked``.
    """
    alpha = _check_alpha(alpha)
    base = F.check_index(base_index)
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    if not 0 < shrink < 1:
        raise ValueError(f"shrink must lie in (0, 1), got {shrink}")
    d, q = holder_quotients(F, base, alpha)
    others = d > 0
    if not others.any():
        raise ValueError(f"base point {base} has no distinct neighbours")
    r = float(d.max())
    picks: list[int] = []
    while len(picks) < k_max:
        inside = others & (d <= r)
        if not inside.any():
            break
        d_far = d[inside].max()
        shell = np.flatnonzero(inside & (d > shrink * d_far))
        j = int(shell[np.argmin(q[shell])])
        picks.append(j)
        r = shrink * d[j]
    return HolderCertificate(base, alpha, tuple(picks), float(q[picks].max()))


def holder_factor(delta: float, alpha: float) -> float:
    """(1 + (1-delta)^-1)^alpha + (1-delta)^-alpha: the pairwise blow-up of a delta-step."""
    s = 1.0 / (1.0 - delta)
    return (1.0 + s) ** alpha + s**alpha


def delta_for_epsilon(alpha: float, epsilon: float, cap: float = 0.5) -> float:
    """Largest delta <= cap whose factor stays within 2^alpha + 1 + epsilon."""
    alpha = _check_alpha(alpha)
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    target = 2.0**alpha + 1.0 + epsilon
    if holder_factor(cap, alpha) <= target:
        return cap
    if alpha == 1.0:
        delta = epsilon / (2.0 + epsilon)
    else:
        delta = brentq(lambda t: holder_factor(t, alpha) - target, 0.0, cap, xtol=1e-15)
    while holder_factor(delta, alpha) > target:
        delta = math.nextafter(delta, 0.0)
    return delta


def pairwise_max_quotient(F: SampleFunction, indices: Sequence[int], alpha: float) -> float:
    idx = np.asarray(indices, dtype=int)
    if idx.size < 2:
        return 0.0
    P, V = F.points[idx], F.values[idx]
    iu, ju = np.triu_indices(idx.size, k=1)
    dist = row_norms(P[iu] - P[ju], F.norm_domain)
    gap = row_norms(V[iu] - V[ju], F.norm_range)
    return float((gap / dist**alpha).max())


@dataclass(frozen=True)
class UniformCertificate:
    base_index: int
    alpha: float
    subsequence: tuple[int, ...]
    M: float
    M_uniform: float
    epsilon: float
    delta_schedule: tuple[float, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "base": self.base_index,
            "alpha": self.alpha,
            "sequence": list(self.subsequence),
            "M": self.M,
            "M_uniform": self.M_uniform,
            "epsilon": self.epsilon,
            "delta_schedule": list(self.delta_schedule),
        }

    @property
    def bound(self) -> float:
        return (2.0**self.alpha + 1.0 + self.epsilon) * self.M


def refine_uniform(F: SampleFunction, cert: HolderCertificate, epsilon: float) -> UniformCertificate:
    """Thin a pointwise certificate so the quotient bound holds for all pairs."""
    delta = delta_for_epsilon(cert.alpha, epsilon)
    seq = list(cert.sequence)
    if not seq:
        raise ValueError("empty certificate")
    d = F.distances_from(cert.base_index)
    chosen = [seq[0]]
    schedule = []
    closest = d[seq[0]]
    for j in seq[1:]:
        if d[j] <= delta * closest:
            chosen.append(j)
            schedule.append(delta)
            closest = min(closest, d[j])
    M_uniform = pairwise_max_quotient(F, [cert.base_index] + chosen, cert.alpha)
    return UniformCertificate(cert.base_index, cert.alpha, tuple(chosen), cert.M, M_uniform,
                              float(epsilon), tuple(schedule))


@dataclass(frozen=True)
class DerivativeCertificate:
    base_index: int
    subsequence: tuple[int, ...]
    derivative: float
    spread: float
    tol: float

    def to_dict(self) -> dict:
        return {
            "base": self.base_index,
            "alpha": 1.0,
            "sequence": list(self.subsequence),
            "derivative": self.derivative,
            "spread": self.spread,
            "tol": self.tol,
        }


def difference_quotients(F: SampleFunction, base: int, indices: Sequence[int]) -> np.ndarray:
    idx = list(indices)
    x0, f0 = F.points[base, 0], F.values[base, 0]
    return (F.values[idx, 0] - f0) / (F.points[idx, 0] - x0)


def extract_derivative(F: SampleFunction, cert: HolderCertificate, tol: float) -> DerivativeCertificate:
    """Derivative along the densest cluster of signed difference quotients.

    A width-``tol`` window is slid over the sorted quotients; the window
    holding the most of them wins (the lower one on ties) and the derivative
    is the midpoint of the quotients it holds.
    """
    if F.n != 1 or F.m != 1:
        raise ValueError(f"derivative extraction needs n = m = 1, got n={F.n}, m={F.m}")
    if cert.alpha != 1.0:
        raise ValueError(f"derivative extraction needs alpha = 1, got {cert.alpha}")
    if not cert.sequence:
        raise ValueError("empty certificate")
    if not tol > 0:
        raise ValueError("tol must be positive")
    q = difference_quotients(F, cert.base_index, cert.sequence)
    s = np.sort(q)
    best_start, best_count = 0, 0
    hi = 0
    for lo in range(len(s)):
        hi = max(hi, lo)
        while hi + 1 < len(s) and s[hi + 1] - s[lo] <= tol:
            hi += 1
        if hi - lo + 1 > best_count:
            best_start, best_count = lo, hi - lo + 1
    lo_val, hi_val = s[best_start], s[best_start + best_count - 1]
    keep = (q >= lo_val) & (q <= hi_val)
    sub = tuple(j for j, k in zip(cert.sequence, keep) if k)
    return DerivativeCertificate(cert.base_index, sub, float((lo_val + hi_val) / 2),
                                 float(hi_val - lo_val), float(tol))


def holder_exponent_scan(F: SampleFunction, base_index: int, alphas: Sequence[float],
                         k_max: int = 40, shrink: float = 0.5) -> list[tuple[float, float]]:
    return [(float(a), extract_restriction_sequence(F, base_index, a, k_max, shrink).M) for a in alphas]
