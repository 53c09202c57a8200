"""End-to-end checks of the command-line interface via CliRunner."""

from __future__ import annotations

import json
from pathlib import Path

import pytest
from click.testing import CliRunner
from PIL import Image

from tmrkit.baseline import deterministic_baseline
from tmrkit.cli import main
from tmrkit.core.parser import parse_tmr
from tmrkit.core.serialize import serialize_tmr
from tmrkit.corpus import CorpusEntry, load_manifest, write_manifest
from tmrkit.pipeline.prompts import build_generation_prompt

GOLD_A = """\
(t1 / tombstone.n.01
    :ent (x1 / male.n.02
        :nam "A. de Vries"
        :pob (v1 / village.n.02
            :nam "Sebaldeburen"
            :geo "2747409")))
"""

GOLD_B = """\
(t1 / tombstone.n.01
    :ent (x1 / female.n.02
        :nam "G. Huizinga"
        :occ (o1 / teacher.n.01
            :hco "13100")))
"""

GPS = (53.21, 6.32)


def canon(text: str) -> str:
    return serialize_tmr(parse_tmr(text))


def make_corpus(root: Path, n_train: int = 2, n_test: int = 2) -> Path:
    (root / "images").mkdir(parents=True, exist_ok=True)
    (root / "gold").mkdir(exist_ok=True)
    entries = []
    golds = [GOLD_A, GOLD_B]
    for split, count, prefix in (("train", n_train, "tr"), ("test", n_test, "te")):
        for i in range(count):
            eid = f"{prefix}-{i + 1}"
            color = (200, 40, 40) if split == "train" else (40, 40, 200)
            Image.new("RGB", (12, 12), color).save(root / "images" / f"{eid}.png")
            (root / "gold" / f"{eid}.tmr").write_text(canon(golds[i % 2]) + "\n", "utf-8")
            entries.append(
                CorpusEntry(
                    id=eid,
                    image=f"images/{eid}.png",
                    gold=f"gold/{eid}.tmr",
                    gps=GPS,
                    split=split,
                )
            )
    manifest = root / "manifest.jsonl"
    write_manifest(entries, manifest)
    return manifest


def echo_transcript(root: Path, manifest: Path) -> Path:
    """Script the mock backend to return each test entry's own gold."""
    mapping = {}
    for entry in load_manifest(manifest):
        if entry.split != "test":
            continue
        digest = build_generation_prompt(str(root / entry.image)).digest()
        mapping[digest] = (root / entry.gold).read_text("utf-8")
    path = root / "transcript.json"
    path.write_text(json.dumps(mapping), "utf-8")
    return path


def fill_predictions(root: Path, manifest: Path, pred_dir: Path) -> None:
    pred_dir.mkdir(parents=True, exist_ok=True)
    for entry in load_manifest(manifest):
        if entry.split == "test":
            text = (root / entry.gold).read_text("utf-8")
            (pred_dir / f"{entry.id}.tmr").write_text(text, "utf-8")


@pytest.fixture()
def runner() -> CliRunner:
    return CliRunner()


# ---------------------------------------------------------------------------
# parse
# ---------------------------------------------------------------------------


def test_parse_reports_well_formed_files(runner, tmp_path):
    a = tmp_path / "a.tmr"
    b = tmp_path / "b.tmr"
    a.write_text(GOLD_A, "utf-8")
    b.write_text(GOLD_B, "utf-8")
    result = runner.invoke(main, ["parse", str(a), str(b)])
    assert result.exit_code == 0
    assert f"{a}: well-formed" in result.output
    assert f"{b}: well-formed" in result.output


def test_parse_flags_defects_and_exits_one(runner, tmp_path):
    bad = tmp_path / "bad.tmr"
    bad.write_text("(t1 / tombstone.n.01 :ent x9)", "utf-8")
    good = tmp_path / "good.tmr"
    good.write_text(GOLD_A, "utf-8")
    result = runner.invoke(main, ["parse", str(good), str(bad)])
    assert result.exit_code == 1
    assert f"{good}: well-formed" in result.output
    assert f"{bad}: ill-formed" in result.output
    assert "  dangling-edge" in result.output


def test_parse_missing_file_is_a_config_error(runner, tmp_path):
    result = runner.invoke(main, ["parse", str(tmp_path / "ghost.tmr")])
    assert result.exit_code == 2
    assert result.stderr.startswith("error: cannot read")


# ---------------------------------------------------------------------------
# score
# ---------------------------------------------------------------------------


def test_score_identity_is_perfect(runner, tmp_path):
    manifest = make_corpus(tmp_path)
    pred_dir = tmp_path / "preds"
    fill_predictions(tmp_path, manifest, pred_dir)
    out = tmp_path / "report.json"
    result = runner.invoke(
        main,
        [
            "score",
            "--pred-dir", str(pred_dir),
            "--manifest", str(manifest),
            "--seed", "7",
            "--out", str(out),
        ],
    )
    assert result.exit_code == 0
    assert "seed: 7  restarts: 4  pairs: 2" in result.output
    report = json.loads(out.read_text("utf-8"))
    assert report["smatch"]["f1"] == 1.0
    assert report["ifr"] == 0.0
    assert report["n_pairs"] == 2
    assert out.read_text("utf-8").endswith("\n")


def test_score_missing_prediction_lenient_counts_ill_formed(runner, tmp_path):
    manifest = make_corpus(tmp_path, n_test=4)
    pred_dir = tmp_path / "preds"
    fill_predictions(tmp_path, manifest, pred_dir)
    (pred_dir / "te-3.tmr").unlink()
    out = tmp_path / "report.json"
    result = runner.invoke(
        main,
        [
            "score",
            "--pred-dir", str(pred_dir),
            "--manifest", str(manifest),
            "--seed", "7",
            "--out", str(out),
        ],
    )
    assert result.exit_code == 0
    assert "missing predictions counted ill-formed: 1" in result.output
    report = json.loads(out.read_text("utf-8"))
    assert report["ifr"] == 0.25


def test_score_missing_prediction_strict_aborts(runner, tmp_path):
    manifest = make_corpus(tmp_path, n_test=4)
    pred_dir = tmp_path / "preds"
    fill_predictions(tmp_path, manifest, pred_dir)
    (pred_dir / "te-3.tmr").unlink()
    result = runner.invoke(
        main,
        [
            "score",
            "--pred-dir", str(pred_dir),
            "--manifest", str(manifest),
            "--seed", "7",
            "--strict",
        ],
    )
    assert result.exit_code == 1
    assert "te-3" in result.stderr


def test_score_requires_seed(runner, tmp_path):
    manifest = make_corpus(tmp_path)
    pred_dir = tmp_path / "preds"
    fill_predictions(tmp_path, manifest, pred_dir)
    result = runner.invoke(
        main, ["score", "--pred-dir", str(pred_dir), "--manifest", str(manifest)]
    )
    assert result.exit_code == 2
    assert "--seed is required" in result.stderr


def test_score_empty_split_is_config_error(runner, tmp_path):
    manifest = make_corpus(tmp_path, n_train=0)
    result = runner.invoke(
        main,
        [
            "score",
            "--pred-dir", str(tmp_path / "preds"),
            "--manifest", str(manifest),
            "--split", "train",
            "--seed", "7",
        ],
    )
    assert result.exit_code == 2
    assert "no entries for split 'train'" in result.stderr


def test_score_flag_beats_config(runner, tmp_path):
    manifest = make_corpus(tmp_path)
    pred_dir = tmp_path / "preds"
    fill_predictions(tmp_path, manifest, pred_dir)
    config = tmp_path / "score.toml"
    config.write_text("[score]\nseed = 3\nrestarts = 1\n", "utf-8")
    from_config = runner.invoke(
        main,
        [
            "score",
            "--pred-dir", str(pred_dir),
            "--manifest", str(manifest),
            "--config", str(config),
        ],
    )
    assert from_config.exit_code == 0
    assert "seed: 3  restarts: 1" in from_config.output
    overridden = runner.invoke(
        main,
        [
            "score",
            "--pred-dir", str(pred_dir),
            "--manifest", str(manifest),
            "--config", str(config),
            "--seed", "9",
            "--restarts", "2",
        ],
    )
    assert overridden.exit_code == 0
    assert "seed: 9  restarts: 2" in overridden.output


# ---------------------------------------------------------------------------
# run
# ---------------------------------------------------------------------------


def run_args(tmp_path: Path, manifest: Path, transcript: Path, out: str = "out"):
    return [
        "run",
        "--manifest", str(manifest),
        "--out-dir", str(tmp_path / out),
        "--seed", "7",
        "--backend", "mock",
        "--transcript", str(transcript),
    ]


def test_run_mock_echo_writes_canonical_predictions(runner, tmp_path):
    manifest = make_corpus(tmp_path)
    transcript = echo_transcript(tmp_path, manifest)
    result = runner.invoke(main, run_args(tmp_path, manifest, transcript))
    assert result.exit_code == 0
    assert "well-formed: 2/2" in result.output
    pred = (tmp_path / "out" / "predictions" / "te-1.tmr").read_text("utf-8")
    assert pred == canon(GOLD_A) + "\n"
    record = json.loads(
        (tmp_path / "out" / "records" / "te-1.json").read_text("utf-8")
    )
    assert record["strategy"] == "base"
    assert record["well_formed"] is True


def test_run_resumes_and_force_redoes(runner, tmp_path):
    manifest = make_corpus(tmp_path)
    transcript = echo_transcript(tmp_path, manifest)
    first = runner.invoke(main, run_args(tmp_path, manifest, transcript))
    assert first.exit_code == 0
    pred_path = tmp_path / "out" / "predictions" / "te-2.tmr"
    before = pred_path.read_bytes()
    second = runner.invoke(main, run_args(tmp_path, manifest, transcript))
    assert second.exit_code == 0
    assert "processed: 0  skipped: 2" in second.output
    assert pred_path.read_bytes() == before
    forced = runner.invoke(
        main, run_args(tmp_path, manifest, transcript) + ["--force"]
    )
    assert forced.exit_code == 0
    assert "processed: 2  skipped: 0" in forced.output
    assert pred_path.read_bytes() == before


def test_run_parallel_jobs_match_serial_bytes(runner, tmp_path):
    manifest = make_corpus(tmp_path, n_test=4)
    transcript = echo_transcript(tmp_path, manifest)
    serial = runner.invoke(main, run_args(tmp_path, manifest, transcript, "serial"))
    parallel = runner.invoke(
        main,
        run_args(tmp_path, manifest, transcript, "parallel") + ["--jobs", "4"],
    )
    assert serial.exit_code == 0 and parallel.exit_code == 0
    for i in range(1, 5):
        a = (tmp_path / "serial" / "predictions" / f"te-{i}.tmr").read_bytes()
        b = (tmp_path / "parallel" / "predictions" / f"te-{i}.tmr").read_bytes()
        assert a == b


def test_run_requires_seed(runner, tmp_path):
    manifest = make_corpus(tmp_path)
    transcript = echo_transcript(tmp_path, manifest)
    args = run_args(tmp_path, manifest, transcript)
    args.remove("--seed")
    args.remove("7")
    result = runner.invoke(main, args)
    assert result.exit_code == 2
    assert "--seed is required" in result.stderr


def test_run_reads_seed_from_config_unless_flag_given(runner, tmp_path):
    manifest = make_corpus(tmp_path)
    transcript = echo_transcript(tmp_path, manifest)
    config = tmp_path / "run.toml"
    config.write_text("[run]\nseed = 11\n", "utf-8")
    args = run_args(tmp_path, manifest, transcript)
    args.remove("--seed")
    args.remove("7")
    from_config = runner.invoke(main, args + ["--config", str(config)])
    assert from_config.exit_code == 0
    assert "seed: 11" in from_config.output
    flagged = runner.invoke(
        main,
        run_args(tmp_path, manifest, transcript, "out2") + ["--config", str(config)],
    )
    assert flagged.exit_code == 0
    assert "seed: 7" in flagged.output


def test_run_without_test_entries_is_config_error(runner, tmp_path):
    manifest = make_corpus(tmp_path, n_test=0)
    transcript = tmp_path / "transcript.json"
    transcript.write_text("{}", "utf-8")
    result = runner.invoke(main, run_args(tmp_path, manifest, transcript))
    assert result.exit_code == 2
    assert "no test entries" in result.stderr


def test_run_mock_backend_needs_transcript(runner, tmp_path):
    manifest = make_corpus(tmp_path)
    result = runner.invoke(
        main,
        [
            "run",
            "--manifest", str(manifest),
            "--out-dir", str(tmp_path / "out"),
            "--seed", "7",
        ],
    )
    assert result.exit_code == 2
    assert "needs --transcript" in result.stderr


def test_run_shots_beyond_train_pool_is_config_error(runner, tmp_path):
    manifest = make_corpus(tmp_path, n_train=2)
    transcript = echo_transcript(tmp_path, manifest)
    result = runner.invoke(
        main, run_args(tmp_path, manifest, transcript) + ["--shots", "3"]
    )
    assert result.exit_code == 2
    assert "exceeds the 2 train entries" in result.stderr


def test_run_exits_three_when_every_entry_fails(runner, tmp_path):
    manifest = make_corpus(tmp_path)
    transcript = tmp_path / "empty.json"
    transcript.write_text("{}", "utf-8")
    result = runner.invoke(main, run_args(tmp_path, manifest, transcript))
    assert result.exit_code == 3
    assert "every entry failed at the backend" in result.stderr
    # Failures still leave a record so reruns can skip or --force them.
    assert (tmp_path / "out" / "records" / "te-1.json").is_file()


# ---------------------------------------------------------------------------
# baseline
# ---------------------------------------------------------------------------


def test_baseline_matches_the_library_choice(runner, tmp_path):
    manifest = make_corpus(tmp_path, n_train=3, n_test=1)
    entries = [e for e in load_manifest(manifest) if e.split == "train"]
    graphs = [parse_tmr((tmp_path / e.gold).read_text("utf-8")) for e in entries]
    expected = deterministic_baseline(graphs, restarts=4, seed=7)
    out = tmp_path / "baseline.tmr"
    result = runner.invoke(
        main,
        [
            "baseline",
            "--manifest", str(manifest),
            "--seed", "7",
            "--out", str(out),
        ],
    )
    assert result.exit_code == 0
    chosen = entries[expected.chosen_index]
    assert f"baseline: {chosen.id} (index {expected.chosen_index}" in result.output
    assert out.read_text("utf-8") == serialize_tmr(expected.chosen) + "\n"


def test_baseline_rejects_unparseable_gold(runner, tmp_path):
    manifest = make_corpus(tmp_path, n_train=2, n_test=1)
    (tmp_path / "gold" / "tr-1.tmr").write_text("(broken", "utf-8")
    result = runner.invoke(
        main, ["baseline", "--manifest", str(manifest), "--seed", "7"]
    )
    assert result.exit_code == 2
    assert "gold for 'tr-1' does not parse" in result.stderr


# ---------------------------------------------------------------------------
# degrade
# ---------------------------------------------------------------------------


def test_degrade_zero_level_copies_bytes(runner, tmp_path):
    manifest = make_corpus(tmp_path, n_train=1, n_test=2)
    out_dir = tmp_path / "noised"
    result = runner.invoke(
        main,
        [
            "degrade",
            "--manifest", str(manifest),
            "--out-dir", str(out_dir),
            "--level", "zero",
            "--seed", "7",
        ],
    )
    assert result.exit_code == 0
    assert "seed: 7  level: zero" in result.output
    noised = load_manifest(out_dir / "manifest.jsonl")
    assert len(noised) == 3
    for entry in noised:
        original = tmp_path / "images" / f"{entry.id}.png"
        assert Path(entry.image).read_bytes() == original.read_bytes()
        assert entry.split in {"train", "test"}


def test_degrade_low_level_alters_pixels(runner, tmp_path):
    manifest = make_corpus(tmp_path, n_train=0, n_test=2)
    out_dir = tmp_path / "noised"
    result = runner.invoke(
        main,
        [
            "degrade",
            "--manifest", str(manifest),
            "--out-dir", str(out_dir),
            "--level", "low",
            "--seed", "7",
        ],
    )
    assert result.exit_code == 0
    noised = load_manifest(out_dir / "manifest.jsonl")
    assert len(noised) == 2
    for entry in noised:
        original = tmp_path / "images" / f"{entry.id}.png"
        assert Path(entry.image).read_bytes() != original.read_bytes()


def test_degrade_alpha_zero_override_copies_bytes(runner, tmp_path):
    manifest = make_corpus(tmp_path, n_train=0, n_test=1)
    out_dir = tmp_path / "noised"
    result = runner.invoke(
        main,
        [
            "degrade",
            "--manifest", str(manifest),
            "--out-dir", str(out_dir),
            "--level", "high",
            "--alpha", "0.0",
            "--seed", "7",
        ],
    )
    assert result.exit_code == 0
    entry = load_manifest(out_dir / "manifest.jsonl")[0]
    original = tmp_path / "images" / f"{entry.id}.png"
    assert Path(entry.image).read_bytes() == original.read_bytes()


# ---------------------------------------------------------------------------
# retrieve
# ---------------------------------------------------------------------------


def test_retrieve_geo_uses_packaged_cache(runner):
    result = runner.invoke(main, ["retrieve", "geo", "Sebaldeburen"])
    assert result.exit_code == 0
    assert "2747409" in result.output


def test_retrieve_geo_anchor_sorts_and_prints_distance(runner):
    result = runner.invoke(
        main, ["retrieve", "geo", "Sebaldeburen", "--anchor", "53.21,6.32"]
    )
    assert result.exit_code == 0
    first = result.output.splitlines()[0]
    assert "2747409" in first
    assert first.endswith("km")


def test_retrieve_hisco(runner):
    result = runner.invoke(main, ["retrieve", "hisco", "Brig. Tit. Rijksveldw."])
    assert result.exit_code == 0
    assert "58220" in result.output


def test_retrieve_synset(runner):
    result = runner.invoke(main, ["retrieve", "synset", "constable", "--pos", "n"])
    assert result.exit_code == 0
    assert "constable.n.01" in result.output


def test_retrieve_reports_no_match(runner):
    result = runner.invoke(main, ["retrieve", "hisco", "zzz-not-a-job"])
    assert result.exit_code == 0
    assert "no match" in result.output


def test_retrieve_bad_anchor_is_config_error(runner):
    result = runner.invoke(
        main, ["retrieve", "geo", "Sebaldeburen", "--anchor", "north-ish"]
    )
    assert result.exit_code == 2
    assert "anchor must be 'lat,lon'" in result.stderr
