"""Command line front end.

Subcommands wire the library together: extract relations from detection
scenes, sample benchmark prompts, rewrite prompts against a bias profile,
score generated scenes, derive bias tables and profiles, filter captions,
and fabricate synthetic scenes for pipeline tests.

Global flags live on every subcommand: --tau, --config, --seed, --output,
--format. A JSON config file (or the SPATIALBENCH_CONFIG env var) supplies
extraction defaults; explicit flags win. All randomness flows from --seed,
and a fixed seed makes every subcommand byte-reproducible.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from pathlib import Path

from .errors import SpatialBenchError
from .evaluation import evaluate_records
from .extraction import ExtractionConfig, extract_scene
from .geometry import RelationKind
from .lexicon import default_contexts, default_objects, load_context_list, load_object_list
from .prompts import (
    PromptSpec,
    RelationQuadruple,
    invert_quadruple,
    render_prompt,
    sample_prompt_set,
)
from .sceneio import (
    ObjectLexicon,
    caption_to_dict,
    eval_record_to_dict,
    filter_captions,
    load_captions,
    load_eval_records,
    load_scenes,
    relations_to_dict,
    write_jsonl,
)
from .stub import StubGeneratorConfig, stub_generate
from .tore import (
    ToreConfig,
    builtin_profile,
    compute_bias_profile,
    load_bias_profile,
    profile_to_json,
    transform_prompt,
)

__all__ = ["main"]

CONFIG_ENV_VAR = "SPATIALBENCH_CONFIG"

_CONFIG_KEYS = (
    "tau",
    "min_rel_area",
    "max_center_dist",
    "min_score",
    "ambiguity_policy",
    "emit_next_when_directional",
    "max_between_objects",
)


def _kind_count(text: str) -> tuple[RelationKind, int]:
    try:
        name, _, value = text.partition("=")
        return RelationKind(name.strip().lower()), int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected KIND=N with KIND one of {[k.value for k in RelationKind]}, got {text!r}"
        ) from None


def _kind_probability(text: str) -> tuple[RelationKind, float]:
    try:
        name, _, value = text.partition("=")
        return RelationKind(name.strip().lower()), float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected KIND=P with P a probability, got {text!r}"
        ) from None


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tau", type=float, default=None,
                        help="strictness divisor (default 3)")
    common.add_argument("--config", type=Path, default=None,
                        help=f"JSON config file (or set {CONFIG_ENV_VAR})")
    common.add_argument("--seed", type=int, default=0, help="seed for all randomness")
    common.add_argument("--output", type=Path, default=None,
                        help="output file (default stdout)")
    common.add_argument("--format", choices=("json", "text"), default="json",
                        help="report format where applicable")

    parser = argparse.ArgumentParser(
        prog="spatialbench",
        description="Spatial-relation benchmark tools: extraction, prompts, "
                    "bias-aware rewriting, and evaluation.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("extract", parents=[common],
                       help="extract relation facts from detection scenes")
    p.add_argument("scenes", type=Path, help="scene JSONL file")
    p.set_defaults(func=_cmd_extract)

    p = sub.add_parser("gen-prompts", parents=[common],
                       help="sample benchmark prompts from the object lexicon")
    p.add_argument("--simple", type=_kind_count, action="append", default=[],
                   metavar="KIND=N", help="simple prompts per kind (repeatable)")
    p.add_argument("--complex", type=_kind_count, action="append", default=[],
                   metavar="KIND=N", help="complex prompts per first-clause kind")
    p.add_argument("--objects", type=Path, default=None, help="object list file")
    p.add_argument("--contexts", type=Path, default=None, help="context list file")
    p.add_argument("--pool-size", type=int, default=None,
                   help="candidate pool size per kind (default 4x the largest count)")
    p.add_argument("--invert", action="store_true",
                   help="append the opposite-side version of every prompt")
    p.set_defaults(func=_cmd_gen_prompts)

    p = sub.add_parser("tore", parents=[common],
                       help="rewrite prompts toward each pair's stronger side")
    p.add_argument("--profile", required=True,
                   help="bias profile: a JSON file path or a builtin name")
    p.add_argument("--pairs", default=None,
                   help="comma-separated pair ids to enable (default all)")
    p.add_argument("prompts", help="prompt text file, one per line ('-' for stdin)")
    p.set_defaults(func=_cmd_tore)

    p = sub.add_parser("evaluate", parents=[common],
                       help="score evaluation records into a benchmark report")
    p.add_argument("records", type=Path, help="evaluation record JSONL file")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("bias-report", parents=[common],
                       help="per-pair side accuracies, optionally saved as a profile")
    p.add_argument("records", type=Path, help="evaluation record JSONL file")
    p.add_argument("--emit-profile", type=Path, default=None,
                   help="also write a bias profile JSON derived from the report")
    p.set_defaults(func=_cmd_bias_report)

    p = sub.add_parser("filter-captions", parents=[common],
                       help="keep captions naming an urban object and a context")
    p.add_argument("captions", type=Path, help="caption JSONL file")
    p.add_argument("--objects", type=Path, default=None, help="object list file")
    p.add_argument("--contexts", type=Path, default=None, help="context list file")
    p.set_defaults(func=_cmd_filter_captions)

    p = sub.add_parser("stub-gen", parents=[common],
                       help="fabricate synthetic scenes for prompts")
    p.add_argument("prompts", help="prompt text file, one per line ('-' for stdin)")
    p.add_argument("--p", type=_kind_probability, action="append", default=[],
                   metavar="KIND=P", help="satisfaction probability per kind")
    p.add_argument("--width", type=int, default=128, help="scene width")
    p.add_argument("--height", type=int, default=128, help="scene height")
    p.add_argument("--plans", type=Path, default=None,
                   help="also write per-record clause verdicts as JSONL")
    p.set_defaults(func=_cmd_stub_gen)

    return parser


# ---------------------------------------------------------------------------
# shared plumbing

def _extraction_config(args) -> ExtractionConfig:
    values: dict = {}
    config_path = args.config or (
        Path(os.environ[CONFIG_ENV_VAR]) if os.environ.get(CONFIG_ENV_VAR) else None
    )
    if config_path is not None:
        try:
            raw = json.loads(Path(config_path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise SpatialBenchError(f"cannot read config {config_path}: {exc}") from None
        if not isinstance(raw, dict):
            raise SpatialBenchError(f"config {config_path} must hold a JSON object")
        unknown = sorted(set(raw) - set(_CONFIG_KEYS))
        if unknown:
            raise SpatialBenchError(f"unknown config keys: {', '.join(unknown)}")
        values.update(raw)
    if args.tau is not None:
        values["tau"] = args.tau
    return ExtractionConfig(**values)


def _write_output(args, text: str) -> None:
    if args.output is None:
        sys.stdout.write(text)
    else:
        args.output.write_text(text, encoding="utf-8")


def _write_records(args, dicts) -> None:
    if args.output is None:
        write_jsonl(sys.stdout, dicts)
    else:
        write_jsonl(args.output, dicts)


def _read_lines(source: str) -> list[str]:
    if source == "-":
        return sys.stdin.read().splitlines()
    return Path(source).read_text(encoding="utf-8").splitlines()


def _load_lexicon(args) -> tuple[tuple[str, ...], tuple[str, ...]]:
    objects = load_object_list(args.objects) if args.objects else default_objects()
    contexts = load_context_list(args.contexts) if args.contexts else default_contexts()
    return objects, contexts


def _resolve_profile(name: str):
    path = Path(name)
    if path.exists():
        return load_bias_profile(path)
    return builtin_profile(name)


# ---------------------------------------------------------------------------
# subcommands

def _cmd_extract(args) -> int:
    cfg = _extraction_config(args)
    scenes = load_scenes(args.scenes)
    _write_records(
        args, (relations_to_dict(scene, extract_scene(scene, cfg)) for scene in scenes)
    )
    return 0


def _cmd_gen_prompts(args) -> int:
    simple = dict(args.simple)
    complex_counts = dict(getattr(args, "complex"))
    if not simple and not complex_counts:
        raise SpatialBenchError("nothing to generate: pass --simple and/or --complex")
    objects, contexts = _load_lexicon(args)
    kinds = sorted(set(simple) | set(complex_counts), key=lambda k: k.value)
    largest = max([*simple.values(), *complex_counts.values()])
    pool_size = args.pool_size or max(1000, 4 * largest)
    pool = _candidate_pool(kinds, objects, pool_size, args.seed)
    specs = sample_prompt_set(pool, simple, complex_counts or None,
                              seed=args.seed, contexts=contexts)
    if args.invert:
        # between has no inverse form, so such prompts are kept as-is
        specs = specs + [
            PromptSpec(tuple(invert_quadruple(c) for c in spec.clauses), spec.context)
            for spec in specs
            if all(c.kind.has_opposite for c in spec.clauses)
        ]
    _write_output(args, "".join(render_prompt(spec) + "\n" for spec in specs))
    return 0


def _candidate_pool(
    kinds, objects, pool_size: int, seed: int
) -> list[RelationQuadruple]:
    """Draw a deduplicated random pool of candidate facts per kind."""
    rng = random.Random(seed)
    pool: list[RelationQuadruple] = []
    for kind in kinds:
        seen = set()
        ceiling = len(objects) * max(1, len(objects) - 1)
        budget = min(pool_size, ceiling)
        while len(seen) < budget:
            if kind is RelationKind.BETWEEN:
                picked = tuple(rng.sample(objects, 3))
            else:
                picked = tuple(rng.sample(objects, 2))
            if picked in seen:
                continue
            seen.add(picked)
            pool.append(RelationQuadruple(picked[0], kind, picked[1:]))
    return pool


def _cmd_tore(args) -> int:
    profile = _resolve_profile(args.profile)
    if args.pairs is None:
        cfg = ToreConfig(profile)
    else:
        pairs = frozenset(p.strip() for p in args.pairs.split(",") if p.strip())
        cfg = ToreConfig(profile, pairs)
    lines = _read_lines(args.prompts)
    out = [transform_prompt(line, cfg, lenient=True) for line in lines]
    _write_output(args, "".join(line + "\n" for line in out))
    return 0


def _cmd_evaluate(args) -> int:
    cfg = _extraction_config(args)
    records = load_eval_records(args.records)
    report = evaluate_records(records, cfg, seed=args.seed)
    _write_output(args, report.to_json() if args.format == "json" else report.to_text())
    return 0


def _cmd_bias_report(args) -> int:
    cfg = _extraction_config(args)
    records = load_eval_records(args.records)
    report = evaluate_records(records, cfg, seed=args.seed)
    profile = compute_bias_profile(report) if args.emit_profile is not None else None
    if args.format == "json":
        text = json.dumps(report.bias, sort_keys=True, indent=2) + "\n"
    else:
        lines = [f"{'pair':<14}{'side':<10}{'accuracy':>8}"]
        for pid, sides in sorted(report.bias.items()):
            for side, acc in sorted(sides.items()):
                lines.append(f"{pid:<14}{side:<10}{acc:>8.3f}")
        text = "\n".join(lines) + "\n"
    _write_output(args, text)
    if profile is not None:
        args.emit_profile.write_text(profile_to_json(profile), encoding="utf-8")
    return 0


def _cmd_filter_captions(args) -> int:
    if args.objects or args.contexts:
        objects, contexts = _load_lexicon(args)
        lex = ObjectLexicon(frozenset(objects), frozenset(contexts))
    else:
        lex = None
    kept = filter_captions(load_captions(args.captions), lex)
    _write_records(args, (caption_to_dict(r) for r in kept))
    return 0


def _cmd_stub_gen(args) -> int:
    cfg = StubGeneratorConfig(
        probabilities=dict(args.p),
        seed=args.seed,
        width=args.width,
        height=args.height,
        tau=args.tau if args.tau is not None else 3.0,
    )
    prompts = [line for line in _read_lines(args.prompts) if line.strip()]
    records, plans = stub_generate(prompts, cfg)
    _write_records(args, (eval_record_to_dict(r) for r in records))
    if args.plans is not None:
        write_jsonl(args.plans, (
            {"id": plan.record_id, "verdicts": list(plan.verdicts)} for plan in plans
        ))
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SpatialBenchError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
