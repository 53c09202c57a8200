"""Command-line front door.

Exit codes: 0 success, 1 validation failures (ill-formed files, missing
predictions under --strict), 2 configuration or data errors, 3 backend or
network exhaustion. Every randomized command requires --seed (flag or
config) and prints the seed it used.
"""

from __future__ import annotations

import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace as entry_with
from pathlib import Path

import click

from tmrkit.baseline import deterministic_baseline
from tmrkit.config import ConfigError, load_config, resolve
from tmrkit.core.parser import TmrParseError, parse_tmr
from tmrkit.core.serialize import serialize_tmr
from tmrkit.core.validate import check_tmr
from tmrkit.corpus import (
    CorpusEntry,
    ManifestError,
    load_manifest,
    write_manifest,
)
from tmrkit.degrade import (
    NoiseLevel,
    generate_noised_corpus,
    list_overlays,
    packaged_overlays,
)
from tmrkit.knowledge.context import RetrievalService
from tmrkit.knowledge.geo import (
    GeoNamesClient,
    GeoQuery,
    geonames_search,
    haversine_km,
)
from tmrkit.knowledge.hisco import hisco_lookup
from tmrkit.knowledge.types import NetworkError, QuotaExceededError, RetrievalError
from tmrkit.knowledge.wordnet import wordnet_lookup
from tmrkit.assets import data_path
from tmrkit.pipeline.backend import HttpBackend, MockBackend
from tmrkit.pipeline.prompts import MAX_SHOTS, Shot
from tmrkit.pipeline.strategies import Strategy, run_strategy
from tmrkit.scoring.report import pair_seed, score_corpus

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CONFIG = 2
EXIT_BACKEND = 3

_BACKEND_WARNING_PREFIXES = ("backend failure", "entity extraction failed")


def _fail(code: int, message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _load_config_or_die(path: str | None) -> dict:
    try:
        return load_config(path)
    except ConfigError as exc:
        _fail(EXIT_CONFIG, str(exc))


def _require_seed(flag: int | None, config: dict, section: str) -> int:
    seed = resolve(flag, config, (f"{section}.seed", "seed"))
    if seed is None:
        _fail(EXIT_CONFIG, "--seed is required (flag or config)")
    try:
        return int(seed)
    except (TypeError, ValueError):
        _fail(EXIT_CONFIG, f"seed must be an integer, got {seed!r}")


def _resolve_path(base: Path, value: str) -> Path:
    path = Path(value)
    if not path.is_absolute():
        path = base / path
    # Prompt digests embed the image path, so normalize to one spelling.
    return Path(os.path.abspath(path))


def _read_manifest_or_die(path: str) -> tuple[Path, list[CorpusEntry]]:
    manifest_path = Path(os.path.abspath(path))
    try:
        return manifest_path.parent, load_manifest(manifest_path)
    except (ManifestError, OSError) as exc:
        _fail(EXIT_CONFIG, str(exc))


def _read_gold_or_die(base: Path, entry: CorpusEntry) -> str:
    gold_path = _resolve_path(base, entry.gold)
    try:
        return gold_path.read_text("utf-8")
    except OSError as exc:
        _fail(EXIT_CONFIG, f"cannot read gold for {entry.id!r}: {exc}")


@click.group()
def main() -> None:
    """Parse, score, generate, and retrieve tombstone meaning graphs."""


# ---------------------------------------------------------------------------
# parse
# ---------------------------------------------------------------------------


@main.command("parse")
@click.argument("files", nargs=-1, required=True, type=click.Path())
def cmd_parse(files: tuple[str, ...]) -> None:
    """Validate TMR files; exit 0 only when every file is well-formed."""
    failures = 0
    for name in files:
        try:
            text = Path(name).read_text("utf-8")
        except OSError as exc:
            _fail(EXIT_CONFIG, f"cannot read {name}: {exc}")
        _, verdict = check_tmr(text)
        if verdict.well_formed:
            click.echo(f"{name}: well-formed")
        else:
            failures += 1
            click.echo(f"{name}: ill-formed")
            for defect in verdict.defects:
                click.echo(f"  {defect.render()}")
    sys.exit(EXIT_VALIDATION if failures else EXIT_OK)


# ---------------------------------------------------------------------------
# score
# ---------------------------------------------------------------------------


@main.command("score")
@click.option("--pred-dir", required=True, type=click.Path(file_okay=False))
@click.option("--manifest", "manifest_path", required=True, type=click.Path())
@click.option("--split", default="test", type=click.Choice(["train", "test", "all"]))
@click.option("--restarts", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--out", type=click.Path(), default=None, help="Write the JSON report here.")
@click.option(
    "--strict/--lenient",
    default=False,
    help="Abort on a missing prediction instead of counting it ill-formed.",
)
@click.option("--config", "config_path", type=click.Path(), default=None)
def cmd_score(pred_dir, manifest_path, split, restarts, seed, out, strict, config_path):
    """Score predictions in PRED_DIR (one <id>.tmr each) against gold files."""
    config = _load_config_or_die(config_path)
    seed = _require_seed(seed, config, "score")
    restarts = int(resolve(restarts, config, ("score.restarts", "restarts"), default=4))

    base, entries = _read_manifest_or_die(manifest_path)
    if split != "all":
        entries = [e for e in entries if e.split == split]
    if not entries:
        _fail(EXIT_CONFIG, f"manifest has no entries for split {split!r}")

    pairs: list[tuple[str, str]] = []
    missing: list[str] = []
    for entry in entries:
        gold_text = _read_gold_or_die(base, entry)
        pred_path = Path(pred_dir) / f"{entry.id}.tmr"
        if pred_path.is_file():
            pred_text = pred_path.read_text("utf-8")
        else:
            missing.append(entry.id)
            pred_text = ""
        pairs.append((pred_text, gold_text))

    if missing and strict:
        _fail(
            EXIT_VALIDATION,
            f"missing predictions for {len(missing)} id(s): {', '.join(missing)}",
        )

    try:
        report = score_corpus(pairs, restarts=restarts, seed=seed)
    except ValueError as exc:
        _fail(EXIT_CONFIG, str(exc))

    click.echo(f"seed: {seed}  restarts: {restarts}  pairs: {report.n_pairs}")
    if missing:
        click.echo(f"missing predictions counted ill-formed: {len(missing)}")
    click.echo(report.render_table())
    if out is not None:
        Path(out).write_text(
            json.dumps(report.to_json_dict(), indent=2) + "\n", "utf-8"
        )
        click.echo(f"report: {out}")
    sys.exit(EXIT_OK)


# ---------------------------------------------------------------------------
# run
# ---------------------------------------------------------------------------


def _build_backend(kind, transcript, default_reply, endpoint, model):
    if kind == "mock":
        if transcript is None:
            _fail(EXIT_CONFIG, "mock backend needs --transcript")
        try:
            return MockBackend.from_file(transcript, default=default_reply)
        except (OSError, json.JSONDecodeError) as exc:
            _fail(EXIT_CONFIG, f"cannot load transcript {transcript}: {exc}")
    if endpoint is None or model is None:
        _fail(EXIT_CONFIG, "http backend needs --endpoint and --model")
    return HttpBackend(endpoint, model)


def _build_retrieval(cache: str | None) -> RetrievalService:
    if cache is None:
        return RetrievalService()
    return RetrievalService(geo_source=GeoNamesClient(cache_path=cache))


@main.command("run")
@click.option("--manifest", "manifest_path", required=True, type=click.Path())
@click.option("--out-dir", required=True, type=click.Path(file_okay=False))
@click.option(
    "--strategy",
    type=click.Choice([s.value for s in Strategy]),
    default=None,
)
@click.option("--shots", type=click.IntRange(0, MAX_SHOTS), default=None)
@click.option("--seed", type=int, default=None)
@click.option("--jobs", type=click.IntRange(min=1), default=None)
@click.option("--backend", "backend_kind", type=click.Choice(["mock", "http"]), default=None)
@click.option("--transcript", type=click.Path(), default=None)
@click.option("--default-reply", default=None)
@click.option("--endpoint", default=None)
@click.option("--model", default=None)
@click.option("--template", default=None)
@click.option(
    "--noise",
    type=click.Choice([level.name.lower() for level in NoiseLevel]),
    default=None,
)
@click.option("--cache", type=click.Path(), default=None, help="GeoNames replay cache.")
@click.option("--force", is_flag=True, help="Redo entries with existing records.")
@click.option("--config", "config_path", type=click.Path(), default=None)
def cmd_run(
    manifest_path,
    out_dir,
    strategy,
    shots,
    seed,
    jobs,
    backend_kind,
    transcript,
    default_reply,
    endpoint,
    model,
    template,
    noise,
    cache,
    force,
    config_path,
):
    """Run a generation strategy over the manifest's test split."""
    config = _load_config_or_die(config_path)
    seed = _require_seed(seed, config, "run")
    strategy = Strategy(resolve(strategy, config, "run.strategy", default="base"))
    shots = int(resolve(shots, config, "run.shots", default=0))
    jobs = int(resolve(jobs, config, "run.jobs", default=1))
    backend_kind = resolve(backend_kind, config, "run.backend", default="mock")
    transcript = resolve(transcript, config, "run.transcript")
    endpoint = resolve(endpoint, config, "run.endpoint")
    model = resolve(model, config, "run.model")
    template = resolve(template, config, "run.template", default="generate_v1")
    noise = NoiseLevel.from_name(resolve(noise, config, "run.noise", default="zero"))
    cache = resolve(cache, config, "run.cache")

    base, entries = _read_manifest_or_die(manifest_path)
    train = [e for e in entries if e.split == "train"]
    test = [e for e in entries if e.split == "test"]
    if not test:
        _fail(EXIT_CONFIG, "manifest has no test entries to run on")
    if shots > len(train):
        _fail(EXIT_CONFIG, f"--shots {shots} exceeds the {len(train)} train entries")

    shot_pool = tuple(
        Shot(image=str(_resolve_path(base, e.image)), gold_text=_read_gold_or_die(base, e))
        for e in train
    )

    out = Path(out_dir)
    predictions = out / "predictions"
    records = out / "records"
    predictions.mkdir(parents=True, exist_ok=True)
    records.mkdir(parents=True, exist_ok=True)

    if noise is not NoiseLevel.ZERO:
        try:
            test = generate_noised_corpus(
                [
                    entry_with(e, image=str(_resolve_path(base, e.image)))
                    for e in test
                ],
                packaged_overlays(),
                noise,
                seed,
                out / "noised",
            )
        except (FileNotFoundError, OSError) as exc:
            _fail(EXIT_CONFIG, str(exc))

    backend = _build_backend(backend_kind, transcript, default_reply, endpoint, model)
    retrieval = _build_retrieval(cache)

    todo: list[tuple[int, CorpusEntry]] = []
    skipped = 0
    for index, entry in enumerate(test):
        pred_path = predictions / f"{entry.id}.tmr"
        record_path = records / f"{entry.id}.json"
        if not force and pred_path.is_file() and record_path.is_file():
            skipped += 1
            continue
        todo.append((index, entry))

    def execute(item: tuple[int, CorpusEntry]):
        index, entry = item
        run = run_strategy(
            strategy,
            str(_resolve_path(base, entry.image)),
            backend,
            shots=shots,
            seed=pair_seed(seed, index),
            shot_pool=shot_pool,
            anchor=entry.gps,
            retrieval=retrieval,
            template_id=template,
        )
        pred_path = predictions / f"{entry.id}.tmr"
        tmp = pred_path.with_suffix(".tmr.tmp")
        tmp.write_text(run.final_text + "\n", "utf-8")
        tmp.replace(pred_path)
        record_path = records / f"{entry.id}.json"
        tmp = record_path.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(run.to_json_dict(), indent=2) + "\n", "utf-8")
        tmp.replace(record_path)
        return run

    if jobs == 1:
        runs = [execute(item) for item in todo]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            runs = list(pool.map(execute, todo))

    well_formed = sum(1 for r in runs if r.well_formed)
    backend_failures = sum(
        1
        for r in runs
        if any(w.startswith(_BACKEND_WARNING_PREFIXES) for w in r.warnings)
    )
    click.echo(
        f"seed: {seed}  strategy: {strategy.value}  shots: {shots}  jobs: {jobs}"
    )
    click.echo(
        f"processed: {len(runs)}  skipped: {skipped}"
        f"  well-formed: {well_formed}/{len(runs)}"
    )
    click.echo(f"predictions: {predictions}")
    if runs and backend_failures == len(runs):
        _fail(EXIT_BACKEND, "every entry failed at the backend")
    sys.exit(EXIT_OK)


# ---------------------------------------------------------------------------
# baseline
# ---------------------------------------------------------------------------


@main.command("baseline")
@click.option("--manifest", "manifest_path", required=True, type=click.Path())
@click.option("--split", default="train", type=click.Choice(["train", "test", "all"]))
@click.option("--restarts", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--out", type=click.Path(), default=None, help="Write the chosen TMR here.")
@click.option("--config", "config_path", type=click.Path(), default=None)
def cmd_baseline(manifest_path, split, restarts, seed, out, config_path):
    """Pick the constant-output baseline TMR from the training split."""
    config = _load_config_or_die(config_path)
    seed = _require_seed(seed, config, "baseline")
    restarts = int(
        resolve(restarts, config, ("baseline.restarts", "restarts"), default=4)
    )

    base, entries = _read_manifest_or_die(manifest_path)
    if split != "all":
        entries = [e for e in entries if e.split == split]
    graphs = []
    for entry in entries:
        text = _read_gold_or_die(base, entry)
        try:
            graphs.append(parse_tmr(text))
        except TmrParseError as exc:
            _fail(EXIT_CONFIG, f"gold for {entry.id!r} does not parse: {exc}")
    try:
        result = deterministic_baseline(graphs, restarts=restarts, seed=seed)
    except ValueError as exc:
        _fail(EXIT_CONFIG, str(exc))

    chosen = entries[result.chosen_index]
    click.echo(f"seed: {seed}  restarts: {restarts}")
    click.echo(
        f"baseline: {chosen.id} (index {result.chosen_index},"
        f" mean smatch {result.mean_score:.4f})"
    )
    if out is not None:
        Path(out).write_text(serialize_tmr(result.chosen) + "\n", "utf-8")
        click.echo(f"written: {out}")
    sys.exit(EXIT_OK)


# ---------------------------------------------------------------------------
# degrade
# ---------------------------------------------------------------------------


@main.command("degrade")
@click.option("--manifest", "manifest_path", required=True, type=click.Path())
@click.option("--out-dir", required=True, type=click.Path(file_okay=False))
@click.option(
    "--level",
    type=click.Choice([level.name.lower() for level in NoiseLevel]),
    required=True,
)
@click.option("--seed", type=int, default=None)
@click.option("--overlays", type=click.Path(file_okay=False), default=None)
@click.option("--alpha", type=float, default=None, help="Override the level's weight.")
@click.option("--config", "config_path", type=click.Path(), default=None)
def cmd_degrade(manifest_path, out_dir, level, seed, overlays, alpha, config_path):
    """Blend corpus images with damage overlays; write a noised manifest."""
    config = _load_config_or_die(config_path)
    seed = _require_seed(seed, config, "degrade")
    level = NoiseLevel.from_name(level)
    if alpha is None:
        alpha = resolve(None, config, f"degrade.alpha.{level.name.lower()}")
        alpha = float(alpha) if alpha is not None else None

    base, entries = _read_manifest_or_die(manifest_path)
    localized = [
        entry_with(entry, image=str(_resolve_path(base, entry.image)))
        for entry in entries
    ]
    try:
        overlay_paths = (
            list_overlays(overlays) if overlays else packaged_overlays()
        )
        noised = generate_noised_corpus(
            localized, overlay_paths, level, seed, out_dir, alpha=alpha
        )
    except (FileNotFoundError, ValueError, OSError) as exc:
        _fail(EXIT_CONFIG, str(exc))

    manifest_out = Path(out_dir) / "manifest.jsonl"
    write_manifest(noised, manifest_out)
    click.echo(f"seed: {seed}  level: {level.name.lower()}")
    click.echo(f"images: {len(noised)}  manifest: {manifest_out}")
    sys.exit(EXIT_OK)


# ---------------------------------------------------------------------------
# retrieve
# ---------------------------------------------------------------------------


def _parse_anchor(text: str | None) -> tuple[float, float] | None:
    if text is None:
        return None
    try:
        lat, lon = (float(part) for part in text.split(","))
    except ValueError:
        _fail(EXIT_CONFIG, f"anchor must be 'lat,lon', got {text!r}")
    return (lat, lon)


@main.command("retrieve")
@click.argument("kind", type=click.Choice(["geo", "hisco", "synset"]))
@click.argument("surface")
@click.option("--anchor", default=None, help="lat,lon used to rank geocodes.")
@click.option("--limit", type=click.IntRange(min=1), default=5)
@click.option("--pos", default="n", help="Part of speech for synset lookups.")
@click.option("--cache", type=click.Path(), default=None)
@click.option("--username", default=None, help="GeoNames account for live lookups.")
@click.option("--config", "config_path", type=click.Path(), default=None)
def cmd_retrieve(kind, surface, anchor, limit, pos, cache, username, config_path):
    """Look up SURFACE in the gazetteer, occupation table, or lexicon."""
    config = _load_config_or_die(config_path)
    anchor = _parse_anchor(resolve(anchor, config, "retrieve.anchor"))
    cache = resolve(cache, config, "retrieve.cache")
    username = resolve(username, config, "retrieve.username")

    try:
        if kind == "geo":
            source = GeoNamesClient(
                username=username,
                cache_path=cache or data_path("geonames_cache.json"),
                readonly_cache=cache is None,
            )
            candidates = geonames_search(GeoQuery(surface, anchor), limit, source)
            if anchor is not None:
                candidates = sorted(
                    candidates, key=lambda c: haversine_km(c.coordinate, anchor)
                )
            for c in candidates:
                line = f"{c.code}  {c.surface}"
                if anchor is not None:
                    line += f"  {haversine_km(c.coordinate, anchor):.1f} km"
                click.echo(line)
        elif kind == "hisco":
            candidates = hisco_lookup(surface)
            for c in candidates:
                click.echo(f"{c.code}  {c.surface}")
        else:
            candidates = wordnet_lookup(surface, pos)
            for c in candidates:
                click.echo(c.code)
    except (NetworkError, QuotaExceededError) as exc:
        _fail(EXIT_BACKEND, str(exc))
    except (RetrievalError, ValueError, OSError) as exc:
        _fail(EXIT_CONFIG, str(exc))
    if not candidates:
        click.echo("no match")
    sys.exit(EXIT_OK)


if __name__ == "__main__":
    main()
