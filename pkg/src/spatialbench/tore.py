"""Opposite-side prompt rewriting driven by measured accuracies.

Generative models render the two sides of an opposite pair (top/bottom,
left/right, front/behind) with different reliability. A clause asking for the
weaker side is semantically identical to its flipped form ("A bottom B" ==
"B top A"), so rewriting to the stronger side changes nothing about the
requested scene while moving the request onto ground the model handles
better. Flipping operates on parsed clauses, never on raw text, so noun
phrases are untouched.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Mapping

from .errors import FormatError, MissingRelation, NotFlippable, ParseError
from .evaluation import BenchReport, pair_id
from .geometry import OPPOSITE_PAIRS, RelationKind
from .lexicon import PhraseLexicon
from .prompts import PromptSpec, RelationQuadruple, parse_prompt, render_prompt

__all__ = [
    "BiasProfile",
    "ToreConfig",
    "PAIR_IDS",
    "pair_of",
    "flip_clause",
    "transform_spec",
    "transform_prompt",
    "compute_bias_profile",
    "load_bias_profile",
    "builtin_profile",
    "profile_to_json",
]

PAIR_IDS = tuple(pair_id(pair) for pair in OPPOSITE_PAIRS)

BUILTIN_PROFILES = ("flux1", "sdxl")


def pair_of(kind: RelationKind) -> tuple[RelationKind, RelationKind] | None:
    for pair in OPPOSITE_PAIRS:
        if kind in pair:
            return pair
    return None


@dataclass(frozen=True)
class BiasProfile:
    """Measured accuracy per side of each covered opposite pair.

    A pair is covered only with both sides present. The preferred side is the
    strictly greater one; equal accuracies leave the pair without a
    preference, which disables flipping for it.
    """

    accuracies: Mapping[RelationKind, float]

    def __post_init__(self) -> None:
        acc: dict[RelationKind, float] = {}
        for kind, value in self.accuracies.items():
            if isinstance(kind, str):
                kind = RelationKind(kind)
            value = float(value)
            if pair_of(kind) is None:
                raise ValueError(f"{kind.value} is not a side of an opposite pair")
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"accuracy for {kind.value} outside [0, 1]: {value}")
            acc[kind] = value
        for kind in acc:
            a, b = pair_of(kind)
            partner = b if kind is a else a
            if partner not in acc:
                raise ValueError(
                    f"{kind.value} given without its opposite {partner.value}"
                )
        object.__setattr__(self, "accuracies", acc)

    def pairs(self) -> tuple[tuple[RelationKind, RelationKind], ...]:
        return tuple(p for p in OPPOSITE_PAIRS if p[0] in self.accuracies)

    def accuracy(self, kind: RelationKind) -> float:
        return self.accuracies[kind]

    def preferred(self, pair: tuple[RelationKind, RelationKind]) -> RelationKind | None:
        a, b = pair
        if a not in self.accuracies or b not in self.accuracies:
            return None
        if self.accuracies[a] > self.accuracies[b]:
            return a
        if self.accuracies[b] > self.accuracies[a]:
            return b
        return None

    def dispreferred(self, pair: tuple[RelationKind, RelationKind]) -> RelationKind | None:
        best = self.preferred(pair)
        if best is None:
            return None
        a, b = pair
        return b if best is a else a


@dataclass(frozen=True)
class ToreConfig:
    profile: BiasProfile
    enabled_pairs: frozenset[str] = frozenset(PAIR_IDS)

    def __post_init__(self) -> None:
        enabled = frozenset(self.enabled_pairs)
        unknown = enabled - set(PAIR_IDS)
        if unknown:
            raise ValueError(f"unknown pair ids: {sorted(unknown)}")
        object.__setattr__(self, "enabled_pairs", enabled)


def flip_clause(q: RelationQuadruple) -> RelationQuadruple:
    """Swap subject and object and move to the opposite side. Involutive."""
    if not (q.kind.is_directional_2d or q.kind.is_3d):
        raise NotFlippable(f"{q.kind.value} has no opposite-side form")
    return RelationQuadruple(q.objects[0], q.kind.opposite(), (q.subject,), q.context)


def _wants_flip(kind: RelationKind, cfg: ToreConfig) -> bool:
    pair = pair_of(kind)
    if pair is None or pair_id(pair) not in cfg.enabled_pairs:
        return False
    return kind is cfg.profile.dispreferred(pair)


def transform_spec(spec: PromptSpec, cfg: ToreConfig) -> tuple[PromptSpec, bool]:
    """Flip every clause sitting on a dispreferred side; report whether any did.

    Flipping preserves each clause's phrase set, so a complex prompt keeps
    its shared anchor and stays renderable.
    """
    clauses = []
    changed = False
    for q in spec.clauses:
        if _wants_flip(q.kind, cfg):
            clauses.append(flip_clause(q))
            changed = True
        else:
            clauses.append(q)
    if not changed:
        return spec, False
    return PromptSpec(tuple(clauses), context=spec.context), True


def transform_prompt(
    text: str,
    cfg: ToreConfig,
    lex: PhraseLexicon | None = None,
    *,
    lenient: bool = False,
) -> str:
    """Rewrite dispreferred-side clauses in a prompt string.

    A prompt needing no flip is returned untouched, byte for byte; otherwise
    the whole prompt is re-rendered with canonical phrases. With lenient=True
    unparseable lines pass through unchanged instead of raising.
    """
    try:
        spec = parse_prompt(text, lex)
    except ParseError:
        if lenient:
            return text
        raise
    out, changed = transform_spec(spec, cfg)
    if not changed:
        return text
    return render_prompt(out, lex)


def compute_bias_profile(report: BenchReport) -> BiasProfile:
    """Derive a profile from a benchmark report.

    Uses the report's bias table where present (it already balances simple
    and complex subsets) and falls back to plain soft accuracies. A pair with
    neither side measured is skipped; a pair with exactly one side is an
    error, since no preference can be derived for it.
    """
    acc: dict[RelationKind, float] = {}
    for pair in OPPOSITE_PAIRS:
        have = [k for k in pair if k.value in report.soft]
        if not have:
            continue
        if len(have) == 1:
            raise MissingRelation(
                f"report covers {have[0].value} but not its opposite"
            )
        sides = report.bias.get(pair_id(pair))
        if sides is None:
            sides = {k.value: report.soft[k.value] for k in pair}
        for kind in pair:
            acc[kind] = float(sides[kind.value])
    if not acc:
        raise MissingRelation("report covers no opposite pair")
    return BiasProfile(acc)


# ---------------------------------------------------------------------------
# profile files: {"top_bottom": {"top": 0.41, "bottom": 0.33}, ...}

def _profile_from_raw(raw: object) -> BiasProfile:
    if not isinstance(raw, dict):
        raise FormatError("bias profile must be a JSON object")
    by_id = {pair_id(p): p for p in OPPOSITE_PAIRS}
    acc: dict[RelationKind, float] = {}
    for key, sides in raw.items():
        pair = by_id.get(key)
        if pair is None:
            raise FormatError(f"unknown opposite pair {key!r}", field=key)
        if not isinstance(sides, dict):
            raise FormatError("pair entry must map sides to accuracies", field=key)
        for kind in pair:
            if kind.value not in sides:
                raise FormatError(f"pair {key!r} lacks side {kind.value!r}", field=key)
            acc[kind] = float(sides[kind.value])
    return BiasProfile(acc)


def load_bias_profile(path: str | Path) -> BiasProfile:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"bias profile is not valid JSON: {exc}") from exc
    return _profile_from_raw(raw)


def builtin_profile(name: str) -> BiasProfile:
    if name not in BUILTIN_PROFILES:
        raise FormatError(
            f"unknown builtin profile {name!r}; available: {', '.join(BUILTIN_PROFILES)}"
        )
    src = resources.files("spatialbench").joinpath(
        "data", "profiles", f"{name}.json"
    ).read_text(encoding="utf-8")
    return _profile_from_raw(json.loads(src))


def profile_to_json(profile: BiasProfile) -> str:
    payload = {
        pair_id(pair): {kind.value: profile.accuracy(kind) for kind in pair}
        for pair in profile.pairs()
    }
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"
