"""Shared geometry: points, norms, ball volumes, sample sets and test corpora."""

from __future__ import annotations

import csv
import enum
import io
import json
import math
import os
import warnings
from dataclasses import dataclass, field
from typing import BinaryIO, Callable, Iterable, Sequence, Union

import numpy as np

ArrayLike = Union[Sequence[float], np.ndarray]


class NormKind(enum.Enum):
    L1 = "l1"
    L2 = "l2"
    LINF = "linf"

    @classmethod
    def parse(cls, value: Union[str, "NormKind"]) -> "NormKind":
        if isinstance(value, NormKind):
            return value
        try:
            return cls(value.lower())
        except ValueError:
            raise ValueError(f"unknown norm {value!r}; expected one of l1, l2, linf") from None


@dataclass(frozen=True)
class Point:
    coords: tuple[float, ...]

    def __post_init__(self):
        coords = tuple(float(c) for c in self.coords)
        if not coords:
            raise ValueError("a point needs at least one coordinate")
        if not all(math.isfinite(c) for c in coords):
            raise ValueError(f"non-finite coordinate in {coords}")
        object.__setattr__(self, "coords", coords)

    @property
    def dim(self) -> int:
        return len(self.coords)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.coords, dtype=dtype or float)


@dataclass(frozen=True)
class BallSpec:
    center: Point
    radius: float

    def __post_init__(self):
        if not isinstance(self.center, Point):
            object.__setattr__(self, "center", Point(tuple(self.center)))
        r = float(self.radius)
        if not (math.isfinite(r) and r > 0):
            raise ValueError(f"ball radius must be positive and finite, got {self.radius!r}")
        object.__setattr__(self, "radius", r)


def row_norms(arr: np.ndarray, kind: NormKind) -> np.ndarray:
    """Norm of every row of a 2-D array."""
    arr = np.asarray(arr, dtype=float)
    if kind is NormKind.L1:
        return np.abs(arr).sum(axis=-1)
    if kind is NormKind.L2:
        # scale by the largest entry so tiny and huge coordinates neither underflow nor overflow
        scale = np.abs(arr).max(axis=-1, keepdims=True)
        safe = np.where(scale > 0, scale, 1.0)
        return (safe * np.sqrt(((arr / safe) ** 2).sum(axis=-1, keepdims=True)))[..., 0]
    if kind is NormKind.LINF:
        return np.abs(arr).max(axis=-1)
    raise ValueError(f"unknown norm {kind!r}")


def norm(p: Union[Point, ArrayLike], kind: NormKind = NormKind.L2) -> float:
    """l1, l2 or l-infinity norm of a point."""
    coords = np.asarray(p.coords if isinstance(p, Point) else p, dtype=float)
    return float(row_norms(coords.reshape(1, -1), NormKind.parse(kind))[0])


def unit_ball_volume(k: int) -> float:
    """Lebesgue measure of the closed Euclidean unit ball in R^k."""
    if int(k) != k or k < 1:
        raise ValueError(f"dimension must be a positive integer, got {k!r}")
    return math.pi ** (k / 2) / math.gamma(k / 2 + 1)


def dimension_constant(n: int, m: int) -> float:
    """Ratio of unit ball volumes mu_n(B_1) / mu_m(B_1), defined for m >= n."""
    if m < n:
        raise ValueError(f"need m >= n, got n={n}, m={m}")
    return unit_ball_volume(n) / unit_ball_volume(m)


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SampleFunction:
    """Finite samples of a map f: D -> R^m with D a finite subset of R^n.

    ``points`` has shape (N, n) and ``values`` shape (N, m). Both arrays are
    read-only. Use :meth:`from_arrays` to deduplicate raw input.
    """

    points: np.ndarray
    values: np.ndarray
    norm_domain: NormKind = NormKind.L2
    norm_range: NormKind = NormKind.L2
    _index: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if vals.ndim == 1:
            vals = vals.reshape(-1, 1)
        if pts.ndim != 2 or vals.ndim != 2:
            raise ValueError("points and values must be 2-D arrays")
        if len(pts) == 0 or len(pts) != len(vals):
            raise ValueError(
                f"points and values need equal nonzero length, got {len(pts)} and {len(vals)}"
            )
        if pts.shape[1] < 1 or vals.shape[1] < 1:
            raise ValueError("domain and range dimensions must be positive")
        if not (np.isfinite(pts).all() and np.isfinite(vals).all()):
            raise ValueError("non-finite entry in samples")
        keys = {tuple(row): i for i, row in enumerate(pts.tolist())}
        if len(keys) != len(pts):
            raise ValueError("duplicate domain points; build with SampleFunction.from_arrays")
        object.__setattr__(self, "points", _readonly(pts))
        object.__setattr__(self, "values", _readonly(vals))
        object.__setattr__(self, "norm_domain", NormKind.parse(self.norm_domain))
        object.__setattr__(self, "norm_range", NormKind.parse(self.norm_range))
        object.__setattr__(self, "_index", keys)

    @classmethod
    def from_arrays(
        cls,
        points: ArrayLike,
        values: ArrayLike,
        norm_domain: Union[str, NormKind] = NormKind.L2,
        norm_range: Union[str, NormKind] = NormKind.L2,
    ) -> "SampleFunction":
        """Build from raw rows, dropping exact repeats and rejecting conflicts."""
        pts = np.asarray(points, dtype=float)
        vals = np.asarray(values, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if vals.ndim == 1:
            vals = vals.reshape(-1, 1)
        if len(pts) != len(vals):
            raise ValueError(f"{len(pts)} points but {len(vals)} values")
        seen: dict[tuple, int] = {}
        keep = []
        for i, (p, v) in enumerate(zip(pts.tolist(), vals.tolist())):
            key = tuple(p)
            if key in seen:
                if vals[seen[key]].tolist() != v:
                    raise ValueError(f"conflicting duplicate at domain point {key} (rows {seen[key]} and {i})")
                continue
            seen[key] = i
            keep.append(i)
        return cls(pts[keep], vals[keep], NormKind.parse(norm_domain), NormKind.parse(norm_range))

    @property
    def n(self) -> int:
        return self.points.shape[1]

    @property
    def m(self) -> int:
        return self.values.shape[1]

    def __len__(self) -> int:
        return len(self.points)

    def __eq__(self, other):
        if not isinstance(other, SampleFunction):
            return NotImplemented
        return (
            self.norm_domain is other.norm_domain
            and self.norm_range is other.norm_range
            and np.array_equal(self.points, other.points)
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None

    def point(self, i: int) -> Point:
        return Point(tuple(self.points[i]))

    def value(self, i: int) -> Point:
        return Point(tuple(self.values[i]))

    def index_of(self, coords: ArrayLike) -> int:
        return self._index[tuple(float(c) for c in np.ravel(coords))]

    def distances_from(self, i: int) -> np.ndarray:
        """Domain distances |x_i - x_j| for all j."""
        return row_norms(self.points - self.points[i], self.norm_domain)

    def value_gaps_from(self, i: int) -> np.ndarray:
        """Range distances |f(x_i) - f(x_j)| for all j."""
        return row_norms(self.values - self.values[i], self.norm_range)

    def check_index(self, i: int) -> int:
        if not (isinstance(i, (int, np.integer)) and 0 <= i < len(self)):
            raise IndexError(f"sample index {i!r} out of range for {len(self)} samples")
        return int(i)

    def subset(self, indices: Iterable[int]) -> "SampleFunction":
        idx = list(indices)
        return SampleFunction(self.points[idx], self.values[idx], self.norm_domain, self.norm_range)


# -- ingestion ---------------------------------------------------------------

Source = Union[bytes, str, os.PathLike, BinaryIO]


def _read_bytes(source: Source) -> bytes:
    if isinstance(source, bytes):
        return source
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            return fh.read()
    return source.read()


def _parse_float(text: str, where: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise ValueError(f"{where}: not a number: {text!r}") from None
    if not math.isfinite(x):
        raise ValueError(f"{where}: non-finite entry {text!r}")
    return x


def csv_header(n: int, m: int) -> list[str]:
    return [f"x{j}" for j in range(n)] + [f"f{i}" for i in range(m)]


def load_samples(
    source: Source,
    format: str = "csv",
    n: int | None = None,
    m: int | None = None,
    norm_domain: Union[str, NormKind] = NormKind.L2,
    norm_range: Union[str, NormKind] = NormKind.L2,
) -> SampleFunction:
    """Read samples from CSV (``x0,..,f0,..`` rows) or JSON.

    For CSV, ``n`` and ``m`` are required; the header row is optional but
    checked when present. For JSON they default to the file's own fields.
    """
    text = _read_bytes(source).decode("utf-8")
    fmt = format.lower()
    if fmt == "json":
        doc = json.loads(text)
        jn, jm = int(doc["n"]), int(doc["m"])
        if (n is not None and n != jn) or (m is not None and m != jm):
            raise ValueError(f"dimension mismatch: file has n={jn}, m={jm}; expected n={n}, m={m}")
        pts, vals = doc["points"], doc["values"]
        if len(pts) != len(vals):
            raise ValueError(f"{len(pts)} points but {len(vals)} values")
        for r, (p, v) in enumerate(zip(pts, vals)):
            if len(p) != jn or len(v) != jm:
                raise ValueError(f"record {r}: row arity {len(p)}+{len(v)}, expected {jn}+{jm}")
            for x in list(p) + list(v):
                if not isinstance(x, (int, float)) or not math.isfinite(x):
                    raise ValueError(f"record {r}: non-finite entry {x!r}")
        if not pts:
            raise ValueError("no samples")
        return SampleFunction.from_arrays(
            np.array(pts, dtype=float).reshape(len(pts), jn),
            np.array(vals, dtype=float).reshape(len(vals), jm),
            norm_domain,
            norm_range,
        )
    if fmt != "csv":
        raise ValueError(f"unknown sample format {format!r}")
    if n is None or m is None:
        raise ValueError("CSV input needs explicit n and m")
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    if not rows:
        raise ValueError("no samples")
    header = [c.strip() for c in rows[0]]
    try:
        [float(c) for c in header]
    except ValueError:
        if header != csv_header(n, m):
            raise ValueError(f"bad header {header}; expected {csv_header(n, m)}") from None
        rows = rows[1:]
    if not rows:
        raise ValueError("no samples")
    data = []
    for lineno, row in enumerate(rows, start=1):
        if len(row) != n + m:
            raise ValueError(f"row {lineno}: row arity {len(row)}, expected {n + m}")
        data.append([_parse_float(c.strip(), f"row {lineno}") for c in row])
    arr = np.array(data, dtype=float)
    return SampleFunction.from_arrays(arr[:, :n], arr[:, n:], norm_domain, norm_range)


def dump_samples(F: SampleFunction, format: str = "csv") -> bytes:
    """Serialize samples; floats use repr so a reload is bit-identical."""
    if format.lower() == "json":
        doc = {"n": F.n, "m": F.m, "points": F.points.tolist(), "values": F.values.tolist()}
        return json.dumps(doc).encode("utf-8")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(csv_header(F.n, F.m))
    for p, v in zip(F.points.tolist(), F.values.tolist()):
        w.writerow([repr(x) for x in p + v])
    return buf.getvalue().encode("utf-8")


# -- corpora -----------------------------------------------------------------

def weierstrass(x: ArrayLike, a: float, b: int, terms: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for k in range(terms):
        out += a**k * np.cos(float(b) ** k * np.pi * x)
    return out


def generate_weierstrass(a: float, b: int, terms: int, grid: ArrayLike, norm_kind=NormKind.L2) -> SampleFunction:
    """Samples of W(x) = sum_{k<terms} a^k cos(b^k pi x) on a 1-D grid."""
    grid = np.asarray(grid, dtype=float).ravel()
    if grid.size == 0:
        raise ValueError("empty grid")
    if not 0 < a < 1:
        raise ValueError(f"a must lie in (0, 1), got {a}")
    if int(b) != b or b < 3 or b % 2 == 0:
        raise ValueError(f"b must be an odd integer >= 3, got {b}")
    if terms < 1:
        raise ValueError("terms must be >= 1")
    if a * b <= 1:
        warnings.warn(f"a*b = {a * b} <= 1: the series is smooth, not a Weierstrass-type function")
    return SampleFunction.from_arrays(grid, weierstrass(grid, a, int(b), int(terms)), norm_kind, norm_kind)


def sample_callable(
    f: Callable[[np.ndarray], np.ndarray],
    points: ArrayLike,
    norm_domain=NormKind.L2,
    norm_range=NormKind.L2,
) -> SampleFunction:
    """Evaluate a vectorized ``f`` on rows of ``points``."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    vals = np.asarray(f(pts[:, 0] if pts.shape[1] == 1 else pts), dtype=float)
    return SampleFunction.from_arrays(pts, vals.reshape(len(pts), -1), norm_domain, norm_range)


def geometric_grid(center: float, scale: float = 1.0, count: int = 30, ratio: float = 0.5,
                   two_sided: bool = True) -> np.ndarray:
    """``center`` together with ``center +/- scale * ratio**j`` for j < count."""
    offsets = scale * ratio ** np.arange(count)
    pts = [np.array([center]), center + offsets]
    if two_sided:
        pts.append(center - offsets)
    return np.concatenate(pts)
