"""Axis-aligned bounding-box predicates for 2D and depth-based 3D relations.

Coordinates follow the image convention: x grows rightward, y grows downward,
so "top" means smaller y. Boxes are (x_min, y_min, x_max, y_max) in absolute
pixels. All predicates are pure functions of their arguments; the strictness
value tau scales every threshold (larger tau = tighter constraints).

Scalar functions operate on BoundingBox values. The batch_* variants apply the
same formulas to numpy arrays of shape (..., 4) and exist for exhaustive sweeps
and large randomized suites; they must stay expression-for-expression identical
to the scalar code so both paths agree bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import EmptyRegion

__all__ = [
    "BoundingBox",
    "Locality",
    "RelationKind",
    "Strictness",
    "AxisDistances",
    "DepthMap",
    "DEFAULT_STRICTNESS",
    "KIND_ORDER",
    "OPPOSITE_PAIRS",
    "locality_kind",
    "kind_locality",
    "axis_distances",
    "directional_distance",
    "check_directional",
    "check_next",
    "check_between",
    "check_depth_overlap",
    "average_depth",
    "check_depth_relation",
    "batch_axis_distances",
    "batch_check_directional",
    "batch_check_next",
    "batch_check_between",
    "batch_check_depth_overlap",
]


class Locality(Enum):
    """Directional case selector for the 2D constraints."""

    RIGHT = "right"
    LEFT = "left"
    TOP = "top"
    BOTTOM = "bottom"

    @property
    def is_horizontal(self) -> bool:
        return self in (Locality.RIGHT, Locality.LEFT)


class RelationKind(Enum):
    """The eight supported spatial relation kinds."""

    RIGHT = "right"
    LEFT = "left"
    TOP = "top"
    BOTTOM = "bottom"
    NEXT = "next"
    BETWEEN = "between"
    FRONT = "front"
    BEHIND = "behind"

    @property
    def is_directional_2d(self) -> bool:
        return self in _DIRECTIONAL_2D

    @property
    def is_3d(self) -> bool:
        return self in (RelationKind.FRONT, RelationKind.BEHIND)

    @property
    def has_opposite(self) -> bool:
        # Between is the only kind without an inverse form
        return self is not RelationKind.BETWEEN

    def opposite(self) -> "RelationKind":
        """Opposite side of a directional or 3D kind (Next maps to itself)."""
        return _OPPOSITE[self]


_OPPOSITE = {
    RelationKind.RIGHT: RelationKind.LEFT,
    RelationKind.LEFT: RelationKind.RIGHT,
    RelationKind.TOP: RelationKind.BOTTOM,
    RelationKind.BOTTOM: RelationKind.TOP,
    RelationKind.FRONT: RelationKind.BEHIND,
    RelationKind.BEHIND: RelationKind.FRONT,
    RelationKind.NEXT: RelationKind.NEXT,
}

_DIRECTIONAL_2D = (
    RelationKind.RIGHT,
    RelationKind.LEFT,
    RelationKind.TOP,
    RelationKind.BOTTOM,
)

# Canonical sort order for deterministic relation listings.
KIND_ORDER = {kind: index for index, kind in enumerate(RelationKind)}

# The three opposite-side pairs, in report order.
OPPOSITE_PAIRS = (
    (RelationKind.TOP, RelationKind.BOTTOM),
    (RelationKind.LEFT, RelationKind.RIGHT),
    (RelationKind.FRONT, RelationKind.BEHIND),
)

_LOCALITY_KIND = {
    Locality.RIGHT: RelationKind.RIGHT,
    Locality.LEFT: RelationKind.LEFT,
    Locality.TOP: RelationKind.TOP,
    Locality.BOTTOM: RelationKind.BOTTOM,
}


def locality_kind(loc: Locality) -> RelationKind:
    """RelationKind carried by a Locality value."""
    return _LOCALITY_KIND[loc]


def kind_locality(kind: RelationKind) -> Locality:
    """Locality selecting the constraint case for a 2D directional kind."""
    for loc, k in _LOCALITY_KIND.items():
        if k is kind:
            return loc
    raise KeyError(f"{kind.value} has no locality")


@dataclass(frozen=True)
class Strictness:
    """Constraint strictness divisor; thresholds are min-extent / tau."""

    tau: float = 3.0

    def __post_init__(self):
        if not (math.isfinite(self.tau) and self.tau > 0):
            raise ValueError(f"tau must be finite and positive, got {self.tau}")


DEFAULT_STRICTNESS = Strictness()


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned box in pixel space; degenerate boxes are rejected."""

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self):
        coords = (self.x_min, self.y_min, self.x_max, self.y_max)
        if not all(math.isfinite(c) for c in coords):
            raise ValueError(f"box coordinates must be finite, got {coords}")
        if any(c < 0 for c in coords):
            raise ValueError(f"box coordinates must be >= 0, got {coords}")
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError(f"box must have positive extent, got {coords}")

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def center(self) -> tuple[float, float]:
        return ((self.x_min + self.x_max) / 2, (self.y_min + self.y_max) / 2)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.x_min, self.y_min, self.x_max, self.y_max)


@dataclass(frozen=True)
class AxisDistances:
    """Signed location-independent distances between a box pair."""

    x_max_dist: float
    x_min_dist: float
    y_max_dist: float
    y_min_dist: float

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.x_max_dist, self.x_min_dist, self.y_max_dist, self.y_min_dist)


def axis_distances(b1: BoundingBox, b2: BoundingBox) -> AxisDistances:
    """Location-independent edge distances for a box pair.

    Each axis picks its minuend independently: the wider box for the horizontal
    distances, the taller box for the vertical ones (ties keep input order).
    This per-axis choice is what makes the directional checks exactly symmetric
    under argument swap.
    """
    ha, hb = (b2, b1) if b1.width < b2.width else (b1, b2)
    va, vb = (b2, b1) if b1.height < b2.height else (b1, b2)
    return AxisDistances(
        x_max_dist=ha.x_max - hb.x_max,
        x_min_dist=ha.x_min - hb.x_min,
        y_max_dist=va.y_max - vb.y_max,
        y_min_dist=va.y_min - vb.y_min,
    )


def directional_distance(b1: BoundingBox, b2: BoundingBox, loc: Locality) -> float:
    """Signed gap between facing edges for the given direction of b1 vs b2.

    Positive means separation in that direction, negative means overlap along
    the axis. Right: left edge of b1 minus right edge of b2; the other cases
    mirror it (y-down convention for top/bottom).
    """
    if loc is Locality.RIGHT:
        return b1.x_min - b2.x_max
    if loc is Locality.LEFT:
        return b2.x_min - b1.x_max
    if loc is Locality.BOTTOM:
        return b1.y_min - b2.y_max
    if loc is Locality.TOP:
        return b2.y_min - b1.y_max
    raise ValueError(f"unknown locality {loc!r}")


def check_directional(
    b1: BoundingBox,
    b2: BoundingBox,
    loc: Locality,
    s: Strictness = DEFAULT_STRICTNESS,
) -> bool:
    """True iff b1 is strictly in direction loc of b2.

    Three strict inequalities must hold: the facing-edge gap may not fall below
    -min_extent/tau (limits overlap along the relation axis), and the two
    cross-axis distances must stay inside +-min_extent/tau (the boxes must be
    roughly aligned on the other axis). Boundary values fail.
    """
    dist = directional_distance(b1, b2, loc)
    ad = axis_distances(b1, b2)
    min_w = min(b1.width, b2.width)
    min_h = min(b1.height, b2.height)
    if loc.is_horizontal:
        return (
            dist > -min_w / s.tau
            and ad.y_max_dist < min_h / s.tau
            and ad.y_min_dist > -min_h / s.tau
        )
    return (
        dist > -min_h / s.tau
        and ad.x_max_dist < min_w / s.tau
        and ad.x_min_dist > -min_w / s.tau
    )


def check_next(
    b1: BoundingBox, b2: BoundingBox, s: Strictness = DEFAULT_STRICTNESS
) -> bool:
    """True iff b1 is next to b2: either horizontal direction holds."""
    return check_directional(b1, b2, Locality.RIGHT, s) or check_directional(
        b1, b2, Locality.LEFT, s
    )


def check_between(
    b_left: BoundingBox,
    b_mid: BoundingBox,
    b_right: BoundingBox,
    s: Strictness = DEFAULT_STRICTNESS,
) -> bool:
    """True iff b_mid sits between b_left and b_right.

    Order-specific: b_left must be left of the middle and b_right right of it.
    Side-agnostic acceptance belongs to the evaluator, not here.
    """
    return check_directional(b_left, b_mid, Locality.LEFT, s) and check_directional(
        b_right, b_mid, Locality.RIGHT, s
    )


def check_depth_overlap(
    b1: BoundingBox, b2: BoundingBox, s: Strictness = DEFAULT_STRICTNESS
) -> bool:
    """True iff the boxes overlap enough for a front/behind comparison.

    All four location-independent distances must stay inside the same
    +-min_extent/tau bands used by the directional checks.
    """
    ad = axis_distances(b1, b2)
    min_w = min(b1.width, b2.width)
    min_h = min(b1.height, b2.height)
    return (
        ad.x_max_dist < min_w / s.tau
        and ad.x_min_dist > -min_w / s.tau
        and ad.y_max_dist < min_h / s.tau
        and ad.y_min_dist > -min_h / s.tau
    )


class DepthMap:
    """Per-pixel closeness field; larger value = nearer the camera.

    Metric depth (larger = farther) must be inverted before construction.
    Values are stored as a read-only float64 grid of shape (height, width).
    """

    def __init__(self, values):
        arr = np.asarray(values, dtype=np.float64)
        if arr.ndim != 2 or arr.size == 0:
            raise ValueError(f"depth values must form a non-empty 2D grid, got shape {arr.shape}")
        if not np.isfinite(arr).all():
            raise ValueError("depth values must be finite")
        if (arr < 0).any():
            raise ValueError("depth values must be >= 0")
        arr = arr.copy()
        arr.setflags(write=False)
        self._values = arr

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def width(self) -> int:
        return self._values.shape[1]

    @property
    def height(self) -> int:
        return self._values.shape[0]

    def __repr__(self) -> str:
        return f"DepthMap({self.width}x{self.height})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, DepthMap):
            return NotImplemented
        return self._values.shape == other._values.shape and bool(
            (self._values == other._values).all()
        )

    def __hash__(self) -> int:
        return hash((self._values.shape, self._values.tobytes()))


def average_depth(d: DepthMap, b: BoundingBox) -> float:
    """Mean closeness over the box's pixel footprint.

    The footprint is the half-open integer region
    [floor(x_min), ceil(x_max)) x [floor(y_min), ceil(y_max)) clipped to the
    map; raises EmptyRegion when nothing remains.
    """
    x0 = max(0, math.floor(b.x_min))
    x1 = min(d.width, math.ceil(b.x_max))
    y0 = max(0, math.floor(b.y_min))
    y1 = min(d.height, math.ceil(b.y_max))
    if x1 <= x0 or y1 <= y0:
        raise EmptyRegion(f"box {b.as_tuple()} covers no pixels of a {d.width}x{d.height} map")
    return float(d.values[y0:y1, x0:x1].mean())


def check_depth_relation(
    b1: BoundingBox,
    b2: BoundingBox,
    d: DepthMap,
    s: Strictness = DEFAULT_STRICTNESS,
) -> RelationKind | None:
    """FRONT/BEHIND verdict for b1 relative to b2, or None.

    None when the overlap gate fails or the average depths tie exactly; a tie
    carries no information either way.
    """
    if not check_depth_overlap(b1, b2, s):
        return None
    d1 = average_depth(d, b1)
    d2 = average_depth(d, b2)
    if d1 > d2:
        return RelationKind.FRONT
    if d1 < d2:
        return RelationKind.BEHIND
    return None


# ---------------------------------------------------------------------------
# batch variants
#
# Arrays hold boxes as rows [x_min, y_min, x_max, y_max]. Broadcasting follows
# numpy rules, so (N, 4) against (N, 4) gives (N,) verdicts. The arithmetic
# mirrors the scalar functions exactly (same operations, same order); keep the
# two in lockstep when editing either.


def _require_boxes(a: np.ndarray) -> np.ndarray:
    arr = np.asarray(a, dtype=np.float64)
    if arr.shape[-1] != 4:
        raise ValueError(f"expected boxes with 4 coordinates in the last axis, got {arr.shape}")
    return arr


def batch_axis_distances(b1, b2):
    """Vectorized axis_distances; returns four arrays in field order."""
    b1 = _require_boxes(b1)
    b2 = _require_boxes(b2)
    w1 = b1[..., 2] - b1[..., 0]
    h1 = b1[..., 3] - b1[..., 1]
    w2 = b2[..., 2] - b2[..., 0]
    h2 = b2[..., 3] - b2[..., 1]
    hswap = w1 < w2
    vswap = h1 < h2
    x_max_dist = np.where(hswap, b2[..., 2] - b1[..., 2], b1[..., 2] - b2[..., 2])
    x_min_dist = np.where(hswap, b2[..., 0] - b1[..., 0], b1[..., 0] - b2[..., 0])
    y_max_dist = np.where(vswap, b2[..., 3] - b1[..., 3], b1[..., 3] - b2[..., 3])
    y_min_dist = np.where(vswap, b2[..., 1] - b1[..., 1], b1[..., 1] - b2[..., 1])
    return x_max_dist, x_min_dist, y_max_dist, y_min_dist


def batch_check_directional(b1, b2, loc: Locality, s: Strictness = DEFAULT_STRICTNESS):
    """Vectorized check_directional; returns a boolean array."""
    b1 = _require_boxes(b1)
    b2 = _require_boxes(b2)
    w1 = b1[..., 2] - b1[..., 0]
    h1 = b1[..., 3] - b1[..., 1]
    w2 = b2[..., 2] - b2[..., 0]
    h2 = b2[..., 3] - b2[..., 1]
    min_w = np.minimum(w1, w2)
    min_h = np.minimum(h1, h2)
    x_max_dist, x_min_dist, y_max_dist, y_min_dist = batch_axis_distances(b1, b2)
    if loc is Locality.RIGHT:
        dist = b1[..., 0] - b2[..., 2]
    elif loc is Locality.LEFT:
        dist = b2[..., 0] - b1[..., 2]
    elif loc is Locality.BOTTOM:
        dist = b1[..., 1] - b2[..., 3]
    elif loc is Locality.TOP:
        dist = b2[..., 1] - b1[..., 3]
    else:
        raise ValueError(f"unknown locality {loc!r}")
    if loc.is_horizontal:
        return (
            (dist > -min_w / s.tau)
            & (y_max_dist < min_h / s.tau)
            & (y_min_dist > -min_h / s.tau)
        )
    return (
        (dist > -min_h / s.tau)
        & (x_max_dist < min_w / s.tau)
        & (x_min_dist > -min_w / s.tau)
    )


def batch_check_next(b1, b2, s: Strictness = DEFAULT_STRICTNESS):
    return batch_check_directional(b1, b2, Locality.RIGHT, s) | batch_check_directional(
        b1, b2, Locality.LEFT, s
    )


def batch_check_between(b_left, b_mid, b_right, s: Strictness = DEFAULT_STRICTNESS):
    return batch_check_directional(b_left, b_mid, Locality.LEFT, s) & batch_check_directional(
        b_right, b_mid, Locality.RIGHT, s
    )


def batch_check_depth_overlap(b1, b2, s: Strictness = DEFAULT_STRICTNESS):
    b1 = _require_boxes(b1)
    b2 = _require_boxes(b2)
    w1 = b1[..., 2] - b1[..., 0]
    h1 = b1[..., 3] - b1[..., 1]
    w2 = b2[..., 2] - b2[..., 0]
    h2 = b2[..., 3] - b2[..., 1]
    min_w = np.minimum(w1, w2)
    min_h = np.minimum(h1, h2)
    x_max_dist, x_min_dist, y_max_dist, y_min_dist = batch_axis_distances(b1, b2)
    return (
        (x_max_dist < min_w / s.tau)
        & (x_min_dist > -min_w / s.tau)
        & (y_max_dist < min_h / s.tau)
        & (y_min_dist > -min_h / s.tau)
    )
