"""Benchmark scoring of prompts against detected scenes.

A clause is satisfied when ANY pair (or triple, for between) of detected
instances whose labels match the clause's noun phrases passes the geometry
predicate at the configured tau. Duplicate detections are therefore harmless:
one passing assignment suffices. Clause scoring ignores the extractor's
proximity, score and area filters on purpose; the prompt already commits to
the objects, so only the spatial constraint is under test.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import MissingRelation, NoSamples
from .extraction import DEFAULT_CONFIG, ExtractionConfig, Scene
from .geometry import (
    OPPOSITE_PAIRS,
    RelationKind,
    check_between,
    check_depth_relation,
    check_directional,
    check_next,
    kind_locality,
)
from .prompts import PromptSpec, RelationQuadruple

__all__ = [
    "EvalRecord",
    "ClauseVerdict",
    "BenchReport",
    "score_clause",
    "score_record",
    "soft_accuracy",
    "strict_accuracy",
    "bias_table",
    "evaluate_records",
    "pair_id",
]


def pair_id(pair: tuple[RelationKind, RelationKind]) -> str:
    return f"{pair[0].value}_{pair[1].value}"


@dataclass(frozen=True)
class EvalRecord:
    """One generated image: the prompt it came from plus its detections."""

    record_id: str
    prompt: PromptSpec
    scene: Scene


@dataclass(frozen=True)
class ClauseVerdict:
    clause_index: int
    satisfied: bool
    witness: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if self.satisfied != (self.witness is not None):
            raise ValueError("witness must be present exactly when satisfied")


def _instances(scene: Scene, label: str) -> list[int]:
    return [i for i, obj in enumerate(scene.objects) if obj.label == label]


def score_clause(
    clause: RelationQuadruple,
    scene: Scene,
    cfg: ExtractionConfig = DEFAULT_CONFIG,
    *,
    clause_index: int = 0,
    between_strict_order: bool = False,
) -> ClauseVerdict:
    """Satisfaction verdict for one clause against one scene.

    The witness is the first passing index tuple in ascending scan order:
    (subject, object) for pairwise kinds, (middle, flanker1, flanker2) for
    between. Missing labels, or a missing depth map for a 3D clause, simply
    yield an unsatisfied verdict.
    """
    s = cfg.strictness
    boxes = [obj.box for obj in scene.objects]
    subjects = _instances(scene, clause.subject)
    kind = clause.kind

    if kind is RelationKind.BETWEEN:
        first = _instances(scene, clause.objects[0])
        second = _instances(scene, clause.objects[1])
        for m in subjects:
            for i in first:
                if i == m:
                    continue
                for j in second:
                    if j == m or j == i:
                        continue
                    ok = check_between(boxes[i], boxes[m], boxes[j], s)
                    if not ok and not between_strict_order:
                        ok = check_between(boxes[j], boxes[m], boxes[i], s)
                    if ok:
                        return ClauseVerdict(clause_index, True, (m, i, j))
        return ClauseVerdict(clause_index, False)

    objects = _instances(scene, clause.objects[0])
    for i in subjects:
        for j in objects:
            if i == j:
                continue
            if kind.is_directional_2d:
                ok = check_directional(boxes[i], boxes[j], kind_locality(kind), s)
            elif kind is RelationKind.NEXT:
                ok = check_next(boxes[i], boxes[j], s)
            else:
                if scene.depth is None:
                    return ClauseVerdict(clause_index, False)
                ok = check_depth_relation(boxes[i], boxes[j], scene.depth, s) is kind
            if ok:
                return ClauseVerdict(clause_index, True, (i, j))
    return ClauseVerdict(clause_index, False)


def score_record(
    record: EvalRecord,
    cfg: ExtractionConfig = DEFAULT_CONFIG,
    *,
    between_strict_order: bool = False,
) -> list[ClauseVerdict]:
    return [
        score_clause(
            clause,
            record.scene,
            cfg,
            clause_index=i,
            between_strict_order=between_strict_order,
        )
        for i, clause in enumerate(record.prompt.clauses)
    ]


def _scored(
    records: Sequence[EvalRecord], cfg: ExtractionConfig
) -> list[tuple[EvalRecord, list[ClauseVerdict]]]:
    return [(r, score_record(r, cfg)) for r in records]


def soft_accuracy(
    records: Sequence[EvalRecord],
    kind: RelationKind,
    cfg: ExtractionConfig = DEFAULT_CONFIG,
) -> float:
    """Fraction of clauses of one kind satisfied, other clauses ignored."""
    total = 0
    hits = 0
    for record, verdicts in _scored(records, cfg):
        for clause, verdict in zip(record.prompt.clauses, verdicts):
            if clause.kind is kind:
                total += 1
                hits += verdict.satisfied
    if total == 0:
        raise NoSamples(f"no {kind.value} clauses in the given records")
    return hits / total


def strict_accuracy(
    records: Sequence[EvalRecord], cfg: ExtractionConfig = DEFAULT_CONFIG
) -> float:
    """Fraction of records whose every clause is satisfied."""
    if not records:
        raise NoSamples("no records")
    full = sum(
        1 for _, verdicts in _scored(records, cfg) if all(v.satisfied for v in verdicts)
    )
    return full / len(records)


def _subset_soft(
    scored: Sequence[tuple[EvalRecord, list[ClauseVerdict]]],
    kind: RelationKind,
    complex_subset: bool,
) -> float | None:
    total = 0
    hits = 0
    for record, verdicts in scored:
        if record.prompt.is_complex != complex_subset:
            continue
        for clause, verdict in zip(record.prompt.clauses, verdicts):
            if clause.kind is kind:
                total += 1
                hits += verdict.satisfied
    return hits / total if total else None


def _bias_from_scored(
    scored: Sequence[tuple[EvalRecord, list[ClauseVerdict]]],
) -> dict[str, dict[str, float]]:
    table: dict[str, dict[str, float]] = {}
    for pair in OPPOSITE_PAIRS:
        sides: dict[str, float] = {}
        for kind in pair:
            simple = _subset_soft(scored, kind, complex_subset=False)
            complex_ = _subset_soft(scored, kind, complex_subset=True)
            values = [v for v in (simple, complex_) if v is not None]
            if values:
                sides[kind.value] = sum(values) / len(values)
        if len(sides) == 2:
            table[pair_id(pair)] = sides
    if not table:
        raise MissingRelation("records cover no opposite pair on both sides")
    return table


def bias_table(
    records: Sequence[EvalRecord], cfg: ExtractionConfig = DEFAULT_CONFIG
) -> dict[str, dict[str, float]]:
    """Per opposite pair, each side's accuracy averaged over the simple and
    complex prompt subsets (equal weight; a missing subset falls back to the
    other). Pairs with clauses on only one side (or neither) are omitted;
    MissingRelation when nothing qualifies.
    """
    return _bias_from_scored(_scored(records, cfg))


@dataclass(frozen=True)
class BenchReport:
    """Aggregated benchmark numbers plus the configuration that produced them."""

    soft: dict[str, float]
    strict: float
    counts: dict[str, int]
    bias: dict[str, dict[str, float]]
    config: dict[str, object] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for name, value in {**self.soft, "strict": self.strict}.items():
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"accuracy {name}={value} outside [0, 1]")

    def to_json(self) -> str:
        payload = {
            "soft_accuracy": self.soft,
            "strict_accuracy": self.strict,
            "sample_counts": self.counts,
            "bias": self.bias,
            "config": self.config,
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "BenchReport":
        raw = json.loads(text)
        return cls(
            soft=dict(raw["soft_accuracy"]),
            strict=float(raw["strict_accuracy"]),
            counts=dict(raw["sample_counts"]),
            bias={k: dict(v) for k, v in raw.get("bias", {}).items()},
            config=dict(raw.get("config", {})),
        )

    def to_text(self) -> str:
        lines = [f"{'relation':<12}{'samples':>8}{'soft':>8}"]
        for kind in RelationKind:
            if kind.value in self.soft:
                lines.append(
                    f"{kind.value:<12}{self.counts.get(kind.value, 0):>8}"
                    f"{self.soft[kind.value]:>8.3f}"
                )
        lines.append("")
        lines.append(f"strict accuracy: {self.strict:.3f}")
        if self.bias:
            lines.append("")
            lines.append(f"{'pair':<14}{'side':<10}{'accuracy':>8}")
            for pair in OPPOSITE_PAIRS:
                pid = pair_id(pair)
                if pid not in self.bias:
                    continue
                for kind in pair:
                    lines.append(
                        f"{pid:<14}{kind.value:<10}{self.bias[pid][kind.value]:>8.3f}"
                    )
        return "\n".join(lines) + "\n"


def evaluate_records(
    records: Sequence[EvalRecord],
    cfg: ExtractionConfig = DEFAULT_CONFIG,
    *,
    seed: int | None = None,
) -> BenchReport:
    """Full report: per-kind soft accuracy, strict accuracy, bias table."""
    if not records:
        raise NoSamples("no records")
    scored = _scored(records, cfg)
    counts: dict[str, int] = {}
    hits: dict[str, int] = {}
    full = 0
    for record, verdicts in scored:
        if all(v.satisfied for v in verdicts):
            full += 1
        for clause, verdict in zip(record.prompt.clauses, verdicts):
            counts[clause.kind.value] = counts.get(clause.kind.value, 0) + 1
            hits[clause.kind.value] = hits.get(clause.kind.value, 0) + verdict.satisfied
    soft = {kind: hits[kind] / counts[kind] for kind in counts}
    try:
        bias = _bias_from_scored(scored)
    except MissingRelation:
        bias = {}
    config: dict[str, object] = {
        "tau": cfg.tau,
        "min_rel_area": cfg.min_rel_area,
        "max_center_dist": cfg.max_center_dist,
        "min_score": cfg.min_score,
    }
    if seed is not None:
        config["seed"] = seed
    return BenchReport(
        soft=soft, strict=full / len(records), counts=counts, bias=bias, config=config
    )
