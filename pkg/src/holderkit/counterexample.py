"""Digit-interleaving maps that defeat every Hölder exponent above n/m.

A point of ``[0, inf)^n`` is written in base ``t`` with its digits grouped
into blocks of ``m``; the digit ``x[k, j, i]`` sits at position ``m*k + i``
of coordinate ``j``. The image reuses the same digits, read as coordinate
``i`` at position ``n*k + j`` in base ``t + 1``. All arithmetic here is exact.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

Rational = Fraction
Index = tuple[int, int, int]


@dataclass(frozen=True)
class DigitArray:
    """Digits ``x[k, j, i]`` for ``k`` in ``[k_min, k_max]``; absent entries are 0."""

    t: int
    n: int
    m: int
    k_min: int
    k_max: int
    digits: tuple[tuple[Index, int], ...] = ()

    def __post_init__(self):
        if self.t < 2:
            raise ValueError(f"base t must be >= 2, got {self.t}")
        if self.n < 1 or self.m < 1:
            raise ValueError("n and m must be positive")
        if self.k_max < self.k_min:
            raise ValueError("empty depth window")
        items = dict(self.digits.items() if isinstance(self.digits, Mapping) else self.digits)
        clean = {}
        for (k, j, i), v in items.items():
            if not (self.k_min <= k <= self.k_max and 0 <= j < self.n and 0 <= i < self.m):
                raise ValueError(f"digit index {(k, j, i)} outside the window")
            if not 0 <= v < self.t:
                raise ValueError(f"digit {v} at {(k, j, i)} not in [0, {self.t - 1}]")
            if v:
                clean[(int(k), int(j), int(i))] = int(v)
        object.__setattr__(self, "digits", tuple(sorted(clean.items())))
        object.__setattr__(self, "_lookup", clean)

    def __getitem__(self, idx: Index) -> int:
        return self._lookup.get(idx, 0)

    def indices(self) -> Iterable[Index]:
        """All window indices in lexicographic order."""
        for k in range(self.k_min, self.k_max + 1):
            for j in range(self.n):
                for i in range(self.m):
                    yield (k, j, i)

    def same_shape(self, other: "DigitArray") -> bool:
        return (self.t, self.n, self.m, self.k_min, self.k_max) == (
            other.t, other.n, other.m, other.k_min, other.k_max)

    def replace(self, idx: Index, value: int) -> "DigitArray":
        d = dict(self.digits)
        d[idx] = value
        return DigitArray(self.t, self.n, self.m, self.k_min, self.k_max, tuple(d.items()))

    def to_dict(self) -> dict:
        return {"t": self.t, "n": self.n, "m": self.m, "k_min": self.k_min, "k_max": self.k_max,
                "digits": [[k, j, i, v] for (k, j, i), v in self.digits]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, doc: dict) -> "DigitArray":
        return cls(int(doc["t"]), int(doc["n"]), int(doc["m"]), int(doc["k_min"]), int(doc["k_max"]),
                   tuple(((int(k), int(j), int(i)), int(v)) for k, j, i, v in doc["digits"]))

    @classmethod
    def from_json(cls, text: str) -> "DigitArray":
        return cls.from_dict(json.loads(text))


def _positional(coeffs: dict[int, int], base: int) -> Fraction:
    """sum of c * base**(-p) over positions p."""
    if not coeffs:
        return Fraction(0)
    deepest = max(coeffs)
    num = sum(c * base ** (deepest - p) for p, c in coeffs.items())
    return Fraction(num) / Fraction(base) ** deepest


def digits_to_point(d: DigitArray) -> tuple[Fraction, ...]:
    per_coord: list[dict[int, int]] = [{} for _ in range(d.n)]
    for (k, j, i), v in d.digits:
        per_coord[j][d.m * k + i] = v
    return tuple(_positional(c, d.t) for c in per_coord)


def digits_to_image(d: DigitArray) -> tuple[Fraction, ...]:
    per_coord: list[dict[int, int]] = [{} for _ in range(d.m)]
    for (k, j, i), v in d.digits:
        per_coord[i][d.n * k + j] = v
    return tuple(_positional(c, d.t + 1) for c in per_coord)


def point_to_digits(x: Sequence, t: int, m: int, k_min: int, k_max: int) -> DigitArray:
    """Finite base-``t`` digits of ``x`` laid out in the ``(k, j, i)`` window.

    Raises ValueError when some coordinate needs digits outside the window
    (including non-terminating expansions such as 1/3 in base 2).
    """
    n = len(x)
    lo, hi = m * k_min, m * k_max + m - 1
    width = hi - lo + 1
    digits = {}
    for j, xj in enumerate(x):
        xj = Fraction(xj)
        if xj < 0:
            raise ValueError(f"coordinate {j} is negative: {xj}")
        scaled = xj * Fraction(t) ** hi
        if scaled.denominator != 1 or scaled.numerator >= t**width:
            raise ValueError(f"coordinate {j} = {xj} is not representable with base-{t} digits "
                             f"in the window k in [{k_min}, {k_max}]")
        N = scaled.numerator
        for p in range(hi, lo - 1, -1):
            N, v = divmod(N, t)
            if v:
                k, i = divmod(p, m)
                digits[(k, j, i)] = v
    return DigitArray(t, n, m, k_min, k_max, tuple(digits.items()))


def l1_distance(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    return sum((abs(p - q) for p, q in zip(a, b)), Fraction(0))


@dataclass(frozen=True)
class BoundCheck:
    KJI: Index
    upper_ok: bool
    lower_ok: bool
    distance: Fraction
    image_distance: Fraction
    upper_bound: Fraction
    lower_bound: Fraction

    @property
    def ok(self) -> bool:
        return self.upper_ok and self.lower_ok

    def to_dict(self) -> dict:
        return {"KJI": list(self.KJI), "upper_ok": self.upper_ok, "lower_ok": self.lower_ok,
                "distance": str(self.distance), "image_distance": str(self.image_distance),
                "upper_bound": str(self.upper_bound), "lower_bound": str(self.lower_bound)}


def first_difference(dx: DigitArray, dy: DigitArray) -> Index:
    a, b = dx._lookup, dy._lookup
    diff = [idx for idx in set(a) | set(b) if a.get(idx, 0) != b.get(idx, 0)]
    if not diff:
        raise ValueError("digit arrays are identical")
    return min(diff)


def verify_bounds(dx: DigitArray, dy: DigitArray) -> BoundCheck:
    """Check ``|x-y|_1 <= n t^(1-mK)`` and ``|f(x)-f(y)|_1 >= (t+1)^(-nK-J-1)`` exactly."""
    if not dx.same_shape(dy):
        raise ValueError("digit arrays differ in base, dimensions or window")
    K, J, I = first_difference(dx, dy)
    t, n, m = dx.t, dx.n, dx.m
    dist = l1_distance(digits_to_point(dx), digits_to_point(dy))
    img = l1_distance(digits_to_image(dx), digits_to_image(dy))
    upper = n * Fraction(t) ** (1 - m * K)
    lower = Fraction(t + 1) ** (-n * K - J - 1)
    return BoundCheck((K, J, I), dist <= upper, img >= lower, dist, img, upper, lower)


def random_digits(rng: np.random.Generator, t: int, n: int, m: int, k_min: int, k_max: int) -> DigitArray:
    depth = k_max - k_min + 1
    vals = rng.integers(0, t, size=(depth, n, m))
    items = (((k_min + a, j, i), int(vals[a, j, i])) for a in range(depth) for j in range(n) for i in range(m))
    return DigitArray(t, n, m, k_min, k_max, tuple(items))


def random_pair(rng: np.random.Generator, t: int, n: int, m: int,
                k_min: int, k_max: int) -> tuple[DigitArray, DigitArray]:
    """Two distinct arrays that agree up to a random lexicographic cut."""
    dx = random_digits(rng, t, n, m, k_min, k_max)
    tail = random_digits(rng, t, n, m, k_min, k_max)
    order = list(dx.indices())
    cut = int(rng.integers(0, len(order)))
    a, b = dx._lookup, tail._lookup
    y = {idx: a.get(idx, 0) for idx in order[:cut]}
    first = order[cut]
    y[first] = (a.get(first, 0) + int(rng.integers(1, t))) % t
    for idx in order[cut + 1:]:
        y[idx] = b.get(idx, 0)
    return dx, DigitArray(t, n, m, k_min, k_max, tuple(y.items()))


def growth_exponent(t: int, n: int, m: int, alpha: float) -> float:
    """``alpha*m - n*log(t+1)/log(t)``: log-base-t growth of the quotient per digit block."""
    return alpha * m - n * math.log(t + 1) / math.log(t)


def predicted_ratio(t: int, n: int, m: int, alpha: float) -> float:
    return float(t) ** growth_exponent(t, n, m, alpha)


def _log(q: Fraction) -> float:
    return math.log(q.numerator) - math.log(q.denominator)


@dataclass(frozen=True)
class GrowthRow:
    K: int
    quotient: float
    ratio: Optional[float]
    distance: Fraction
    image_distance: Fraction


@dataclass(frozen=True)
class GrowthReport:
    t: int
    n: int
    m: int
    alpha: float
    rows: tuple[GrowthRow, ...]
    predicted_ratio: float
    k_min: int
    k_max: int
    seed: int

    def exact_increasing(self) -> list[bool]:
        """Whether each quotient strictly exceeds the previous one, decided exactly.

        ``a / b**alpha > c / d**alpha`` with ``alpha = p/q`` is equivalent to
        ``a**q * d**p > c**q * b**p``.
        """
        alpha = Fraction(repr(self.alpha))
        p, q = alpha.numerator, alpha.denominator
        out = []
        for prev, cur in zip(self.rows, self.rows[1:]):
            out.append(cur.image_distance**q * prev.distance**p > prev.image_distance**q * cur.distance**p)
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["K", "quotient", "ratio", "predicted"])
        for row in self.rows:
            ratio = "" if row.ratio is None else format(row.ratio, ".17g")
            w.writerow([row.K, format(row.quotient, ".17g"), ratio, format(self.predicted_ratio, ".17g")])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "t": self.t, "n": self.n, "m": self.m, "alpha": self.alpha,
            "k_min": self.k_min, "k_max": self.k_max, "seed": self.seed,
            "predicted_ratio": self.predicted_ratio,
            "rows": [{"K": r.K, "quotient": r.quotient, "ratio": r.ratio,
                      "distance": str(r.distance), "image_distance": str(r.image_distance)}
                     for r in self.rows],
        }


def quotient_probe(t: int, n: int, m: int, alpha: float, K_list: Sequence[int], seed: int = 0,
                   pad: int = 2) -> GrowthReport:
    """Hölder quotients of single-digit perturbations at increasing depth.

    For each ``K`` a random ``x`` is drawn and ``y`` differs from it only in
    the digit at ``(K, 0, 0)``, moved by one unit (down when it is ``t-1``).
    """
    if t < 2:
        raise ValueError("t must be >= 2")
    if not 0 < alpha <= 1:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    Ks = [int(K) for K in K_list]
    if not Ks or any(b <= a for a, b in zip(Ks, Ks[1:])):
        raise ValueError("K_list must be a nonempty increasing list")
    k_min, k_max = min(0, Ks[0]), Ks[-1] + pad
    rng = np.random.default_rng(seed)
    rows: list[GrowthRow] = []
    for K in Ks:
        dx = random_digits(rng, t, n, m, k_min, k_max)
        v = dx[(K, 0, 0)]
        dy = dx.replace((K, 0, 0), v + 1 if v < t - 1 else v - 1)
        dist = l1_distance(digits_to_point(dx), digits_to_point(dy))
        img = l1_distance(digits_to_image(dx), digits_to_image(dy))
        quotient = math.exp(_log(img) - alpha * _log(dist))
        ratio = quotient / rows[-1].quotient if rows else None
        rows.append(GrowthRow(K, quotient, ratio, dist, img))
    return GrowthReport(t, n, m, float(alpha), tuple(rows), predicted_ratio(t, n, m, alpha), k_min, k_max, seed)
