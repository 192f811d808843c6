"""Greedy selection of disjoint balls whose (2 + eps)-enlargements cover the centers."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from holderkit.core import BallSpec, NormKind, Point, Source, _read_bytes, row_norms


@dataclass(frozen=True, eq=False)
class BallFamily:
    centers: np.ndarray
    radii: np.ndarray

    def __post_init__(self):
        c = np.array(self.centers, dtype=float)
        r = np.array(self.radii, dtype=float).ravel()
        if c.ndim == 1:
            c = c.reshape(-1, 1)
        if c.shape[0] != r.shape[0]:
            raise ValueError(f"{c.shape[0]} centers but {r.shape[0]} radii")
        if c.size and not np.isfinite(c).all():
            raise ValueError("non-finite center coordinate")
        if not (np.isfinite(r) & (r > 0)).all():
            raise ValueError("radii must be positive and finite")
        c.setflags(write=False)
        r.setflags(write=False)
        object.__setattr__(self, "centers", c)
        object.__setattr__(self, "radii", r)

    @classmethod
    def from_balls(cls, balls: Sequence[BallSpec]) -> "BallFamily":
        if not balls:
            return cls(np.zeros((0, 1)), np.zeros(0))
        dims = {b.center.dim for b in balls}
        if len(dims) != 1:
            raise ValueError(f"mixed ambient dimensions {sorted(dims)}")
        return cls([b.center.coords for b in balls], [b.radius for b in balls])

    @property
    def ambient_dim(self) -> int:
        return self.centers.shape[1]

    def __len__(self) -> int:
        return len(self.radii)

    def ball(self, i: int) -> BallSpec:
        return BallSpec(Point(tuple(self.centers[i])), float(self.radii[i]))


@dataclass(frozen=True)
class SelectionStep:
    chosen: int
    candidates: tuple[int, ...]
    max_candidate_radius: float


@dataclass(frozen=True)
class Selection:
    chosen: tuple[int, ...]
    epsilon: float
    audit: Optional[tuple[SelectionStep, ...]] = field(default=None, compare=False)

    def to_dict(self) -> dict:
        return {"epsilon": self.epsilon, "chosen": list(self.chosen)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "Selection":
        doc = json.loads(text)
        return cls(tuple(int(i) for i in doc["chosen"]), float(doc["epsilon"]))


def select_balls(family: BallFamily, epsilon: float, audit: bool = False,
                 norm_kind: NormKind = NormKind.L2) -> Selection:
    """Repeatedly take the largest ball among those missing every chosen ball.

    With finitely many balls the supremum over the remaining candidates is
    attained, so taking the maximum (lowest index on ties) always satisfies
    the ``(1 + eps)``-near-maximality requirement.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    alive = np.ones(len(family), dtype=bool)
    chosen: list[int] = []
    steps: list[SelectionStep] = []
    radii = family.radii
    while alive.any():
        cand = np.flatnonzero(alive)
        k = int(cand[np.argmax(radii[cand])])
        if audit:
            steps.append(SelectionStep(k, tuple(cand.tolist()), float(radii[cand].max())))
        chosen.append(k)
        dist = row_norms(family.centers[cand] - family.centers[k], norm_kind)
        alive[cand[dist <= radii[cand] + radii[k]]] = False
    return Selection(tuple(chosen), float(epsilon), tuple(steps) if audit else None)


@dataclass
class SelectionReport:
    disjoint: bool
    covered: bool
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.disjoint and self.covered

    def to_dict(self) -> dict:
        return {"disjoint": self.disjoint, "covered": self.covered, "violations": self.violations}


def verify_selection(family: BallFamily, selection: Selection,
                     norm_kind: NormKind = NormKind.L2) -> SelectionReport:
    """Check pairwise disjointness of the chosen closed balls and the enlarged cover.

    Shares no code path with :func:`select_balls`: all chosen pairs are
    compared at once and every center is tested against every chosen ball.
    """
    violations = []
    n = len(family)
    chosen = list(selection.chosen)
    bad = [i for i in chosen if not 0 <= i < n]
    if bad:
        violations.append({"kind": "index", "indices": bad})
        return SelectionReport(False, False, violations)
    if len(set(chosen)) != len(chosen):
        violations.append({"kind": "repeat", "indices": sorted({i for i in chosen if chosen.count(i) > 1})})
    disjoint = not violations
    C, R = family.centers, family.radii
    uniq = list(dict.fromkeys(chosen))
    if len(uniq) > 1:
        Cc = C[uniq]
        diff = Cc[:, None, :] - Cc[None, :, :]
        if norm_kind is NormKind.L1:
            gap = np.abs(diff).sum(-1)
        elif norm_kind is NormKind.LINF:
            gap = np.abs(diff).max(-1)
        else:
            gap = np.sqrt((diff * diff).sum(-1))
        reach = R[uniq][:, None] + R[uniq][None, :]
        ia, ib = np.nonzero(np.triu(~(gap > reach), k=1))
        for a, b in zip(ia.tolist(), ib.tolist()):
            disjoint = False
            violations.append({"kind": "overlap", "pair": [uniq[a], uniq[b]]})
    covered = True
    if n:
        factor = 2.0 + selection.epsilon
        hit = np.zeros(n, dtype=bool)
        for k in uniq:
            hit |= row_norms(C - C[k], norm_kind) <= factor * R[k]
        for y in np.flatnonzero(~hit).tolist():
            covered = False
            violations.append({"kind": "uncovered", "index": y})
    return SelectionReport(disjoint, covered, violations)


def load_family(source: Source) -> BallFamily:
    """Read ``c0,...,c{d-1},r`` rows; the header row is optional."""
    text = _read_bytes(source).decode("utf-8")
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    if rows:
        try:
            [float(c) for c in rows[0]]
        except ValueError:
            head = [c.strip() for c in rows[0]]
            d = len(head) - 1
            if head != [f"c{i}" for i in range(d)] + ["r"]:
                raise ValueError(f"bad ball header {head}") from None
            rows = rows[1:]
    if not rows:
        return BallFamily(np.zeros((0, 1)), np.zeros(0))
    width = len(rows[0])
    if width < 2:
        raise ValueError("ball rows need at least one center coordinate and a radius")
    for i, r in enumerate(rows, start=1):
        if len(r) != width:
            raise ValueError(f"row {i}: row arity {len(r)}, expected {width}")
    arr = np.array([[float(c) for c in r] for r in rows])
    return BallFamily(arr[:, :-1], arr[:, -1])


def dump_family(family: BallFamily) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"c{i}" for i in range(family.ambient_dim)] + ["r"])
    for c, r in zip(family.centers.tolist(), family.radii.tolist()):
        w.writerow([repr(x) for x in c + [r]])
    return buf.getvalue().encode("utf-8")


def random_family(rng: np.random.Generator, size: int, dim: int,
                  r_min: float = 0.01, r_max: float = 1.0, box: float = 10.0) -> BallFamily:
    """Centers uniform in [0, box]^dim, radii log-uniform in [r_min, r_max]."""
    centers = rng.uniform(0.0, box, size=(size, dim))
    radii = np.exp(rng.uniform(np.log(r_min), np.log(r_max), size=size))
    return BallFamily(centers, radii)
