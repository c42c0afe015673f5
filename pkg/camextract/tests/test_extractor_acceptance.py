"""End-to-end acceptance gate for the extractor.

One test per release criterion, each printing a [PASS]/[FAIL] line
(visible with ``pytest -s``). The pipeline fixture runs the whole chain
once: synthesize a labeled 50-scene set with the scoring toolkit's CLI,
fit a local checkpoint, extract Grad-CAM maps with ResNet50, then score
them through the toolkit's weighting-game command. The extractor talks
to the toolkit only through files and subprocesses.
"""

import json
import shutil
import subprocess
import time
from types import SimpleNamespace

import pytest

import prep

IMAGE_COUNT = 50
MARGIN = 0.05
TIME_BUDGET_S = 600.0


def verdict(name: str, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    work = tmp_path_factory.mktemp("pipeline")
    data = work / "data"
    started = time.perf_counter()

    prep.run_synth(data, seed=7, count=IMAGE_COUNT, dims="112x112")
    labels = prep.labels_from_masks(data / "masks")
    assert len(labels) == IMAGE_COUNT

    ckpt = work / "resnet50_synth.pt"
    prep.fit_resnet50(data / "images", labels, ckpt)

    exe = shutil.which("extract")
    assert exe is not None, "console script not installed"
    proc = subprocess.run(
        [
            exe,
            "--model", "resnet50",
            "--method", "grad-cam",
            "--images", str(data / "images"),
            "--classes", "annotation-class",
            "--labels", str(data / "annotations.json"),
            "--weights", str(ckpt),
            "--num-classes", "4",
            "--out", str(work / "maps"),
        ],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    manifest = json.loads((work / "maps" / "manifest.json").read_text())

    score = subprocess.run(
        [
            "salmetrics", "weighting-game",
            "--masks-dir", str(data / "masks"),
            "--saliency-dir", str(work / "maps"),
            "--out", str(work / "report.json"),
        ],
        capture_output=True,
        text=True,
    )
    report = json.loads((work / "report.json").read_text()) if score.returncode == 0 else None
    elapsed = time.perf_counter() - started

    return SimpleNamespace(
        manifest=manifest,
        score_rc=score.returncode,
        score_err=score.stderr,
        report=report,
        elapsed=elapsed,
    )


def test_smaps_parse_in_the_scoring_reader(pipeline):
    """Criterion: every produced map is readable by the downstream toolkit."""
    entries = len(pipeline.manifest["entries"])
    parsed = len(pipeline.report["records"]) if pipeline.report else 0
    ok = pipeline.score_rc == 0 and entries > 0 and parsed == entries
    verdict(
        "smap interchange",
        ok,
        f"scorer exit {pipeline.score_rc}, {parsed}/{entries} maps scored"
        + (f"; stderr: {pipeline.score_err.strip()}" if pipeline.score_rc else ""),
    )


def test_weighting_beats_uniform_baseline_by_margin(pipeline):
    """Criterion: mean weighting accuracy clears the chance level by 5 points."""
    summary = pipeline.report["summary"]
    accuracy = summary["mean_weighting_accuracy"]
    baseline = summary["mean_uniform_baseline"]
    ok = accuracy >= baseline + MARGIN
    verdict(
        "weighting margin",
        ok,
        f"mean accuracy {accuracy:.4f} vs baseline {baseline:.4f} "
        f"(margin {accuracy - baseline:+.4f}, need {MARGIN:+.2f})",
    )


def test_pipeline_fits_the_time_budget(pipeline):
    """Criterion: the whole chain stays under ten minutes of CPU wall time."""
    ok = pipeline.elapsed < TIME_BUDGET_S
    verdict("time budget", ok, f"{pipeline.elapsed:.0f}s of {TIME_BUDGET_S:.0f}s")
