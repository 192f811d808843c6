"""Grid outer-measure estimates and the Hölder measure-change bounds.

A map that is locally Hölder with exponent ``m/n`` from ``R^m`` into
``R^n`` (``m >= n``) cannot inflate measure by more than a dimensional
constant times ``M**n``. Finite samples have measure zero, so both sides of
every bound are estimated by counting occupied cells of side ``h``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from holderkit.core import Point, SampleFunction, dimension_constant, row_norms, unit_ball_volume

# ratios this close to an integer count as lying on the cell boundary
_SNAP_ULPS = 4


@dataclass(frozen=True)
class GridMeasureEstimate:
    h: float
    dim: int
    cell_count: int
    value: float


def cell_indices(points: np.ndarray, h: float) -> np.ndarray:
    """Integer labels of the cells ``[j h, (j+1) h)`` holding each point.

    ``p / h`` within a few ulps of an integer is taken to be that integer, so
    points meant to sit on a grid line (e.g. ``0.29`` with ``h = 0.01``) are
    not pushed into the previous cell by rounding. Scaling ``h`` by two
    scales every ratio exactly, so nested dyadic grids stay nested.
    """
    q = np.asarray(points, dtype=float) / h
    near = np.rint(q)
    snap = np.abs(q - near) <= _SNAP_ULPS * np.finfo(float).eps * np.maximum(np.abs(q), 1.0)
    return np.where(snap, near, np.floor(q)).astype(np.int64)


def grid_outer_measure(points: Union[np.ndarray, Sequence[Point]], h: float,
                       dim: Optional[int] = None) -> GridMeasureEstimate:
    """Number of occupied grid cells times ``h**dim``."""
    if not h > 0:
        raise ValueError("grid side h must be positive")
    if len(points) and isinstance(points[0], Point):
        points = np.array([p.coords for p in points], dtype=float)
    arr = np.asarray(points, dtype=float)
    if dim is None:
        if arr.ndim != 2:
            raise ValueError("cannot infer the dimension of an empty or 1-D point list")
        dim = arr.shape[1]
    arr = arr.reshape(-1, dim)
    if len(arr) == 0:
        return GridMeasureEstimate(float(h), dim, 0, 0.0)
    count = len(np.unique(cell_indices(arr, h), axis=0))
    return GridMeasureEstimate(float(h), dim, count, count * float(h) ** dim)


@dataclass
class BoundReport:
    lhs: float
    rhs: float
    satisfied: bool
    hypothesis_ok: bool
    inputs: dict
    violations: list = field(default_factory=list)
    violation_count: int = 0
    pairs_checked: int = 0
    subsampled: bool = False

    @property
    def passed(self) -> bool:
        return self.satisfied and self.hypothesis_ok

    def to_dict(self) -> dict:
        return asdict(self)


def _check_exponent(F: SampleFunction, beta: float) -> tuple[int, int]:
    dom, rng = F.n, F.m
    if dom < rng:
        raise ValueError(f"need domain dimension >= range dimension, got {dom} < {rng}")
    if abs(beta - dom / rng) > 1e-12:
        raise ValueError(f"beta must equal domain_dim / range_dim = {dom / rng}, got {beta}")
    return dom, rng


def _holder_violations(dist, gap, M, beta, rtol):
    return gap > M * dist**beta * (1.0 + rtol)


def check_ball_image_bound(F: SampleFunction, base_index: int, r: float, M: float, beta: float,
                           h: float, rtol: float = 1e-12, max_listed: int = 20) -> BoundReport:
    """Compare the grid measure of ``f(B_r(x))`` with ``C M^n mu_m(B_r)``.

    The Hölder hypothesis is checked against the base point for every sample
    in the ball; failures are listed but the bound is still evaluated.
    """
    dom, rng = _check_exponent(F, beta)
    base = F.check_index(base_index)
    if not (r > 0 and M >= 0):
        raise ValueError("need r > 0 and M >= 0")
    d = F.distances_from(base)
    inside = np.flatnonzero(d <= r)
    gap = F.value_gaps_from(base)
    bad = inside[_holder_violations(d[inside], gap[inside], M, beta, rtol)]
    lhs = grid_outer_measure(F.values[inside], h, rng).value
    rhs = dimension_constant(rng, dom) * M**rng * unit_ball_volume(dom) * r**dom
    return BoundReport(
        lhs=lhs,
        rhs=rhs,
        satisfied=lhs <= rhs,
        hypothesis_ok=bad.size == 0,
        inputs={"kind": "ball", "base": base, "M": M, "beta": beta, "r": r,
                "domain_dim": dom, "range_dim": rng, "h": h},
        violations=[[base, int(j)] for j in bad[:max_listed]],
        violation_count=int(bad.size),
        pairs_checked=int(inside.size - 1),
    )


def ball_bound_rhs_direct(M: float, r: float, domain_dim: int, range_dim: int) -> float:
    """``M^n r^m mu_n(B_1)``: the same right-hand side without the ratio constant."""
    return M**range_dim * r**domain_dim * unit_ball_volume(range_dim)


def default_slack(domain_dim: int) -> float:
    return 2.0 * 2.01**domain_dim


def _pair_batches(N: int, radius: Optional[float], max_pairs: int, seed: int):
    total = N * (N - 1) // 2
    if total <= max_pairs:
        iu, ju = np.triu_indices(N, k=1)
        for s in range(0, total, 1 << 20):
            yield iu[s:s + (1 << 20)], ju[s:s + (1 << 20)]
        return
    rng = np.random.default_rng(seed)
    i = rng.integers(0, N, size=max_pairs)
    j = rng.integers(0, N - 1, size=max_pairs)
    j = j + (j >= i)
    for s in range(0, max_pairs, 1 << 20):
        yield i[s:s + (1 << 20)], j[s:s + (1 << 20)]


def check_global_image_bound(F: SampleFunction, M: float, beta: float, h: float,
                             slack: Optional[float] = None, radius: Optional[float] = None,
                             max_pairs: int = 10**6, seed: int = 0, rtol: float = 1e-12,
                             max_listed: int = 20) -> BoundReport:
    """Compare the grid measure of ``f(A)`` with ``slack * C M^n`` times that of ``A``.

    The hypothesis is checked on sample pairs at distance at most ``radius``
    (all pairs when ``radius`` is None). Beyond ``max_pairs`` pairs a seeded
    random subset is checked and the report says so.
    """
    dom, rng = _check_exponent(F, beta)
    if M < 0:
        raise ValueError("M must be nonnegative")
    if slack is None:
        slack = default_slack(dom)
    if slack < 1:
        raise ValueError("slack must be >= 1")
    N = len(F)
    total = N * (N - 1) // 2
    listed: list = []
    count = checked = 0
    for i, j in _pair_batches(N, radius, max_pairs, seed):
        dist = row_norms(F.points[i] - F.points[j], F.norm_domain)
        gap = row_norms(F.values[i] - F.values[j], F.norm_range)
        if radius is not None:
            keep = dist <= radius
            i, j, dist, gap = i[keep], j[keep], dist[keep], gap[keep]
        checked += len(i)
        bad = np.flatnonzero(_holder_violations(dist, gap, M, beta, rtol))
        count += bad.size
        for b in bad[: max(0, max_listed - len(listed))]:
            listed.append([int(i[b]), int(j[b])])
    lhs = grid_outer_measure(F.values, h, rng).value
    dom_measure = grid_outer_measure(F.points, h, dom).value
    rhs = slack * dimension_constant(rng, dom) * M**rng * dom_measure
    return BoundReport(
        lhs=lhs,
        rhs=rhs,
        satisfied=lhs <= rhs,
        hypothesis_ok=count == 0,
        inputs={"kind": "global", "M": M, "beta": beta, "h": h, "slack": slack, "radius": radius,
                "domain_dim": dom, "range_dim": rng, "domain_measure": dom_measure, "seed": seed},
        violations=listed,
        violation_count=int(count),
        pairs_checked=int(checked),
        subsampled=total > max_pairs,
    )
