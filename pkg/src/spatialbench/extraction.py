"""Relation extraction: labeled detections in, unambiguous relation facts out.

A Scene is a set of scored, labeled boxes (plus optional depth). Extraction
filters out weak or tiny detections, applies a proximity gate to pairs, runs
the geometry predicates, and resolves directional ambiguity. Output lists are
deterministically ordered so identical inputs give identical outputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import DimensionMismatch, NotInvertible, SceneTooLarge
from .geometry import (
    BoundingBox,
    DepthMap,
    KIND_ORDER,
    Locality,
    RelationKind,
    Strictness,
    check_between,
    check_depth_relation,
    check_directional,
    check_next,
    locality_kind,
)
from .textutil import normalize_phrase

__all__ = [
    "AmbiguityPolicy",
    "DetectedObject",
    "Scene",
    "RelationInstance",
    "ExtractionConfig",
    "proximity_filter",
    "extract_pairwise",
    "extract_between",
    "extract_scene",
    "invert_relation",
]


class AmbiguityPolicy(Enum):
    """What to do when a pair satisfies both a horizontal and a vertical direction."""

    DROP_PAIR = "drop_pair"
    KEEP_ALL = "keep_all"


@dataclass(frozen=True)
class DetectedObject:
    """One detection: normalized label, box, confidence."""

    label: str
    box: BoundingBox
    score: float = 1.0

    def __post_init__(self):
        normalized = normalize_phrase(self.label)
        if not normalized:
            raise ValueError("detected object needs a non-empty label")
        object.__setattr__(self, "label", normalized)
        if not (0.0 <= self.score <= 1.0):
            raise ValueError(f"score must be in [0, 1], got {self.score}")


@dataclass(frozen=True)
class Scene:
    """Detections for one image, optionally with depth and an urban context."""

    image_id: str
    width: float
    height: float
    objects: tuple[DetectedObject, ...] = ()
    depth: DepthMap | None = None
    context: str | None = None

    def __post_init__(self):
        if not (math.isfinite(self.width) and self.width > 0):
            raise ValueError(f"width must be positive, got {self.width}")
        if not (math.isfinite(self.height) and self.height > 0):
            raise ValueError(f"height must be positive, got {self.height}")
        object.__setattr__(self, "objects", tuple(self.objects))
        for idx, obj in enumerate(self.objects):
            b = obj.box
            if b.x_max > self.width or b.y_max > self.height:
                raise ValueError(
                    f"object {idx} box {b.as_tuple()} exceeds scene bounds "
                    f"{self.width}x{self.height}; clip boxes before construction"
                )
        if self.depth is not None:
            if self.depth.width != self.width or self.depth.height != self.height:
                raise DimensionMismatch(
                    f"depth map is {self.depth.width}x{self.depth.height}, "
                    f"scene is {self.width}x{self.height}"
                )
        if self.context is not None:
            object.__setattr__(self, "context", normalize_phrase(self.context))

    @property
    def diagonal(self) -> float:
        return math.hypot(self.width, self.height)


@dataclass(frozen=True)
class RelationInstance:
    """A grounded relation fact over scene object indices.

    objects holds one index for pairwise kinds; for Between it holds the two
    flanking indices (left, right) and subject is the middle object.
    """

    kind: RelationKind
    subject: int
    objects: tuple[int, ...]
    context: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(self.objects))
        expected = 2 if self.kind is RelationKind.BETWEEN else 1
        if len(self.objects) != expected:
            raise ValueError(
                f"{self.kind.value} relation needs {expected} object index(es), "
                f"got {self.objects}"
            )
        indices = (self.subject, *self.objects)
        if any(i < 0 for i in indices):
            raise ValueError(f"object indices must be >= 0, got {indices}")
        if len(set(indices)) != len(indices):
            raise ValueError(f"relation indices must be distinct, got {indices}")

    def sort_key(self) -> tuple:
        return (self.subject, self.objects, KIND_ORDER[self.kind])


@dataclass(frozen=True)
class ExtractionConfig:
    """Extraction thresholds; defaults are the package-wide conventions.

    min_rel_area is a fraction of image area, max_center_dist a fraction of the
    image diagonal. Detections below min_score or min_rel_area never enter any
    predicate. max_between_objects caps the O(n^3) triplet sweep.
    """

    tau: float = 3.0
    min_rel_area: float = 0.01
    max_center_dist: float = 0.5
    min_score: float = 0.3
    ambiguity_policy: AmbiguityPolicy = AmbiguityPolicy.DROP_PAIR
    emit_next_when_directional: bool = True
    max_between_objects: int = 100

    def __post_init__(self):
        if not (math.isfinite(self.tau) and self.tau > 0):
            raise ValueError(f"tau must be positive, got {self.tau}")
        if not (0 < self.min_rel_area <= 1):
            raise ValueError(f"min_rel_area must be in (0, 1], got {self.min_rel_area}")
        if not (0 < self.max_center_dist <= 1):
            raise ValueError(f"max_center_dist must be in (0, 1], got {self.max_center_dist}")
        if not (0 <= self.min_score <= 1):
            raise ValueError(f"min_score must be in [0, 1], got {self.min_score}")
        if self.max_between_objects < 1:
            raise ValueError("max_between_objects must be >= 1")
        if isinstance(self.ambiguity_policy, str):
            object.__setattr__(self, "ambiguity_policy", AmbiguityPolicy(self.ambiguity_policy))

    @property
    def strictness(self) -> Strictness:
        return Strictness(self.tau)


DEFAULT_CONFIG = ExtractionConfig()


def proximity_filter(
    b1: BoundingBox,
    b2: BoundingBox,
    width: float,
    height: float,
    cfg: ExtractionConfig = DEFAULT_CONFIG,
) -> bool:
    """True iff the box centers are within max_center_dist of the image diagonal."""
    return math.dist(b1.center, b2.center) <= cfg.max_center_dist * math.hypot(width, height)


def _eligible(scene: Scene, cfg: ExtractionConfig) -> list[int]:
    min_area = cfg.min_rel_area * scene.width * scene.height
    return [
        i
        for i, obj in enumerate(scene.objects)
        if obj.score >= cfg.min_score and obj.box.area >= min_area
    ]


def extract_pairwise(scene: Scene, cfg: ExtractionConfig = DEFAULT_CONFIG) -> list[RelationInstance]:
    """All pairwise relations (directional, Next, Front/Behind) in the scene.

    Every ordered eligible pair within the proximity gate is checked. Under
    DROP_PAIR, a pair that hits both a horizontal and a vertical direction is
    treated as ambiguous and emits no directional relation at all; Next and
    depth relations are unaffected. When emit_next_when_directional is false,
    Next is emitted only for pairs without a directional emission.
    """
    s = cfg.strictness
    eligible = _eligible(scene, cfg)
    out: list[RelationInstance] = []
    for i in eligible:
        for j in eligible:
            if i == j:
                continue
            b1 = scene.objects[i].box
            b2 = scene.objects[j].box
            if not proximity_filter(b1, b2, scene.width, scene.height, cfg):
                continue
            hits = [loc for loc in Locality if check_directional(b1, b2, loc, s)]
            ambiguous = any(h.is_horizontal for h in hits) and any(
                not h.is_horizontal for h in hits
            )
            if ambiguous and cfg.ambiguity_policy is AmbiguityPolicy.DROP_PAIR:
                directional: list[Locality] = []
            else:
                directional = hits
            for loc in directional:
                out.append(RelationInstance(locality_kind(loc), i, (j,), scene.context))
            if check_next(b1, b2, s) and (cfg.emit_next_when_directional or not directional):
                out.append(RelationInstance(RelationKind.NEXT, i, (j,), scene.context))
            if scene.depth is not None:
                rel = check_depth_relation(b1, b2, scene.depth, s)
                if rel is not None:
                    out.append(RelationInstance(rel, i, (j,), scene.context))
    out.sort(key=RelationInstance.sort_key)
    return out


def extract_between(scene: Scene, cfg: ExtractionConfig = DEFAULT_CONFIG) -> list[RelationInstance]:
    """All Between relations over ordered triplets of eligible objects.

    The sweep is O(n^3); scenes with more than cfg.max_between_objects eligible
    objects raise SceneTooLarge rather than silently truncating.
    """
    s = cfg.strictness
    eligible = _eligible(scene, cfg)
    if len(eligible) > cfg.max_between_objects:
        raise SceneTooLarge(
            f"{len(eligible)} eligible objects exceed the between cap "
            f"of {cfg.max_between_objects}"
        )
    out: list[RelationInstance] = []
    for i in eligible:
        for j in eligible:
            for k in eligible:
                if i == j or j == k or i == k:
                    continue
                if check_between(
                    scene.objects[i].box, scene.objects[j].box, scene.objects[k].box, s
                ):
                    out.append(
                        RelationInstance(RelationKind.BETWEEN, j, (i, k), scene.context)
                    )
    out.sort(key=RelationInstance.sort_key)
    return out


def extract_scene(scene: Scene, cfg: ExtractionConfig = DEFAULT_CONFIG) -> list[RelationInstance]:
    """Pairwise and Between relations merged into one canonical ordering."""
    out = extract_pairwise(scene, cfg) + extract_between(scene, cfg)
    out.sort(key=RelationInstance.sort_key)
    return out


def invert_relation(r: RelationInstance) -> RelationInstance:
    """Swap subject and object and mirror the kind (Right<->Left etc.).

    Next maps to itself; Between has no pairwise inverse and raises.
    """
    if r.kind is RelationKind.BETWEEN:
        raise NotInvertible("between relations have no pairwise inverse")
    return RelationInstance(r.kind.opposite(), r.objects[0], (r.subject,), r.context)
