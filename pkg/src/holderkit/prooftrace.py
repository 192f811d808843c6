"""Finite-data replay of the partition argument behind restriction sequences.

Points whose oscillation stays large are successively narrowed down: by the
integer box of their value, by the dyadic size of their injectivity radius,
and finally by a spatial cell of that size. On the last set ``f`` must be
injective, which is the property the measure argument then exploits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from holderkit.core import SampleFunction, row_norms
from holderkit.oscillation import DEFAULT_R_GRID, _check_alpha, omega, rho

Label = tuple[int, ...]


def build_candidate_set(F: SampleFunction, alpha: float, omega_min: float, r_min: float) -> list[int]:
    """Indices whose oscillation at radius ``r_min`` is at least ``omega_min``."""
    if not (omega_min > 0 and r_min > 0):
        raise ValueError("omega_min and r_min must be positive")
    return [i for i in range(len(F)) if omega(F, i, r_min, alpha).value >= omega_min]


def _largest_bin(bins: dict) -> object:
    """Label of a bin of maximal size, the smallest label on ties."""
    return min(bins, key=lambda lab: (-len(bins[lab]), lab))


def _bin(indices: Sequence[int], labels: Sequence) -> dict:
    bins: dict = {}
    for i, lab in zip(indices, labels):
        bins.setdefault(lab, []).append(i)
    return dict(sorted(bins.items()))


def dyadic_exponent(x: float) -> int:
    """The k with 2**k <= x < 2**(k+1), exact for every positive float."""
    _, e = math.frexp(x)
    return e - 1


@dataclass
class PipelineTrace:
    alpha: float
    stage0_E: list[int]
    stage1_value_bins: dict[Label, list[int]]
    stage1_selected: Label
    E_tilde: list[int]
    rho_values: dict[int, float]
    stage2_dropped: list[int]
    stage2_rho_bins: dict[int, list[int]]
    stage2_selected: int
    E_hat: list[int]
    rho: float
    stage3_cells: dict[Label, list[int]]
    stage3_selected: Label
    E_prime: list[int]
    injective: bool
    omega_min: Optional[float] = None
    r_min: Optional[float] = None
    diameter: float = field(default=0.0)

    def to_dict(self) -> dict:
        def hist(bins):
            return [{"label": list(k) if isinstance(k, tuple) else k, "size": len(v), "indices": v}
                    for k, v in bins.items()]
        return {
            "alpha": self.alpha,
            "omega_min": self.omega_min,
            "r_min": self.r_min,
            "stage0": {"E": self.stage0_E},
            "stage1": {"bins": hist(self.stage1_value_bins), "selected": list(self.stage1_selected),
                       "E_tilde": self.E_tilde},
            "stage2": {"rho": {str(k): v for k, v in self.rho_values.items()},
                       "dropped": self.stage2_dropped, "bins": hist(self.stage2_rho_bins),
                       "selected": self.stage2_selected, "E_hat": self.E_hat, "rho_selected": self.rho},
            "stage3": {"cells": hist(self.stage3_cells), "selected": list(self.stage3_selected),
                       "E_prime": self.E_prime, "diameter": self.diameter},
            "injective": self.injective,
        }

    def summary(self) -> str:
        lines = [
            f"stage 0: |E| = {len(self.stage0_E)}",
            f"stage 1: {len(self.stage1_value_bins)} value boxes, selected {self.stage1_selected} "
            f"with {len(self.E_tilde)} points",
            f"stage 2: {len(self.stage2_dropped)} dropped (rho = 0), {len(self.stage2_rho_bins)} rho bins, "
            f"selected rho = 2^{self.stage2_selected} with {len(self.E_hat)} points",
            f"stage 3: {len(self.stage3_cells)} cells of side {self.rho:g}, selected {self.stage3_selected} "
            f"with {len(self.E_prime)} points, diameter {self.diameter:.6g}",
            f"injective on E': {self.injective}",
        ]
        return "\n".join(lines)


def partition_pipeline(F: SampleFunction, E: Sequence[int], alpha: float,
                       r_grid: Sequence[float] = DEFAULT_R_GRID,
                       omega_min: Optional[float] = None, r_min: Optional[float] = None) -> PipelineTrace:
    alpha = _check_alpha(alpha)
    E = sorted({F.check_index(i) for i in E})
    if not E:
        raise ValueError("candidate set E is empty")

    boxes = [tuple(int(v) for v in np.floor(F.values[i])) for i in E]
    value_bins = _bin(E, boxes)
    box = _largest_bin(value_bins)
    E_tilde = value_bins[box]

    rhos = {i: rho(F, i, alpha, r_grid) for i in E_tilde}
    dropped = [i for i in E_tilde if rhos[i] == 0]
    kept = [i for i in E_tilde if rhos[i] > 0]
    if not kept:
        raise ValueError("all points dropped: rho = 0 for every point of the selected value box")
    rho_bins = _bin(kept, [dyadic_exponent(rhos[i]) for i in kept])
    k = _largest_bin(rho_bins)
    E_hat = rho_bins[k]
    side = 2.0**k

    # half-open cells (c*side, (c+1)*side] per coordinate
    cells = [tuple(int(c) for c in np.ceil(F.points[i] / side) - 1) for i in E_hat]
    cell_bins = _bin(E_hat, cells)
    cell = _largest_bin(cell_bins)
    E_prime = cell_bins[cell]

    vals = [tuple(F.values[i]) for i in E_prime]
    injective = len(set(vals)) == len(vals)
    P = F.points[E_prime]
    if len(E_prime) > 1:
        iu, ju = np.triu_indices(len(E_prime), k=1)
        diameter = float(row_norms(P[iu] - P[ju], F.norm_domain).max())
    else:
        diameter = 0.0
    return PipelineTrace(alpha, list(E), value_bins, box, E_tilde, rhos, dropped, rho_bins, k, E_hat,
                         side, cell_bins, cell, E_prime, injective, omega_min, r_min, diameter)


def inverse_samples(F: SampleFunction, trace: PipelineTrace) -> SampleFunction:
    """Samples of the inverse map ``f(E') -> E'``; requires an injective trace."""
    if not trace.injective:
        raise ValueError("f is not injective on E'")
    idx = trace.E_prime
    return SampleFunction(F.values[idx], F.points[idx], F.norm_range, F.norm_domain)
