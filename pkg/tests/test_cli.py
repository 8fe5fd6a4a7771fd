"""CLI subcommands: artifacts, determinism, exit codes."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner

from sketchgraph.cli import main
from sketchgraph.core import save_png
from sketchgraph.tam import hatch_texture


@pytest.fixture
def runner():
    return CliRunner()


def run_ok(runner, args):
    result = runner.invoke(main, args, catch_exceptions=False)
    assert result.exit_code == 0, result.output
    return result


def ndjson_file(tmp_path, drawings) -> Path:
    path = tmp_path / "sketches.ndjson"
    path.write_text("\n".join(json.dumps({"drawing": d}) for d in drawings) + "\n")
    return path


def tree_bytes(root: Path) -> dict[str, bytes]:
    return {str(p.relative_to(root)): p.read_bytes()
            for p in sorted(root.rglob("*")) if p.is_file()}


def test_synth_writes_dataset(runner, tmp_path):
    out = tmp_path / "data"
    run_ok(runner, ["synth", "--count", "2", "--seed", "5", "--out", str(out)])
    assert (out / "00000_input.png").exists()
    assert (out / "00000_masks.png").exists()
    assert (out / "00001_graph.json").exists()
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config"]["seed"] == 5
    assert len(manifest["files"]) == 6


def test_synth_from_ndjson(runner, tmp_path):
    src = ndjson_file(tmp_path, [[[[0, 100], [0, 50]]]])
    out = tmp_path / "data"
    run_ok(runner, ["synth", "--input", str(src), "--count", "1",
                    "--out", str(out)])
    graph = json.loads((out / "00000_graph.json").read_text())
    assert len(graph["vertices"]) == 2
    assert graph["edges"] == [[0, 1]]


def test_infer_from_synth_output(runner, tmp_path):
    data = tmp_path / "data"
    run_ok(runner, ["synth", "--count", "1", "--seed", "9", "--out", str(data)])
    out = tmp_path / "inferred"
    result = run_ok(runner, ["infer", "--input", str(data / "00000_input.png"),
                             "--out", str(out)])
    stats = json.loads(result.output.splitlines()[-1])
    graph = json.loads((out / "graph.json").read_text())
    assert stats["vertices"] == len(graph["vertices"]) > 0
    assert stats["edges"] == len(graph["edges"]) > 0
    gt = json.loads((data / "00000_graph.json").read_text())
    assert len(graph["vertices"]) == len(gt["vertices"])
    assert len(graph["edges"]) == len(gt["edges"])


def test_infer_debug_svg(runner, tmp_path):
    data = tmp_path / "data"
    run_ok(runner, ["synth", "--count", "1", "--seed", "9", "--out", str(data)])
    out = tmp_path / "dbg"
    run_ok(runner, ["infer", "--input", str(data / "00000_input.png"),
                    "--out", str(out), "--imax", "2", "--debug-svg"])
    assert (out / "iteration_00.svg").exists()
    assert (out / "iteration_02.svg").exists()


def test_strokes_gcode_svg_chain(runner, tmp_path):
    graph_path = tmp_path / "graph.json"
    graph_path.write_text(json.dumps(
        {"vertices": [[0.0, 0.0], [256.0, 256.0]], "edges": [[0, 1]]}))
    out = tmp_path / "artifacts"
    run_ok(runner, ["strokes", "--input", str(graph_path), "--out", str(out)])
    assert json.loads((out / "strokes.json").read_text()) == {"strokes": [[0, 1]]}
    run_ok(runner, ["gcode", "--input", str(graph_path), "--out", str(out)])
    lines = (out / "drawing.gcode").read_text().splitlines()
    assert lines[0] == "G00 Z-5"
    assert lines.count("G01 Z0") == 1
    run_ok(runner, ["svg", "--input", str(graph_path), "--out", str(out)])
    assert "<path" in (out / "drawing.svg").read_text()


def test_pipeline_runs_and_reports(runner, tmp_path):
    out = tmp_path / "run"
    run_ok(runner, ["pipeline", "--count", "2", "--seed", "3", "--out", str(out)])
    report = json.loads((out / "report.json").read_text())
    assert len(report["samples"]) == 2
    for entry in report["samples"]:
        assert entry["vertices"] > 0
        assert len(entry["edge_counts_per_iteration"]) == 11
        assert (out / f"{entry['id']}.gcode").exists()
        assert (out / f"{entry['id']}.svg").exists()


def test_pipeline_single_stroke_ndjson(runner, tmp_path):
    src = ndjson_file(tmp_path, [[[[0, 100], [0, 0]]]])
    out = tmp_path / "run"
    run_ok(runner, ["pipeline", "--input", str(src), "--out", str(out)])
    graph = json.loads((out / "00000_graph.json").read_text())
    assert len(graph["vertices"]) == 2
    assert len(graph["edges"]) == 1
    gcode = (out / "00000.gcode").read_text()
    assert gcode.splitlines().count("G01 Z0") == 1


def test_pipeline_deterministic(runner, tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    run_ok(runner, ["pipeline", "--count", "2", "--seed", "11", "--out", str(a)])
    run_ok(runner, ["pipeline", "--count", "2", "--seed", "11", "--out", str(b)])
    assert tree_bytes(a) == tree_bytes(b)


def test_missing_input_exits_2(runner, tmp_path):
    result = runner.invoke(main, ["infer", "--input",
                                  str(tmp_path / "nope.png")])
    assert result.exit_code == 2
    assert "nope.png" in result.output


def test_config_file_and_flag_override(runner, tmp_path):
    cfg = tmp_path / "config.json"
    cfg.write_text(json.dumps({"seed": 4, "count": 1, "tau": 0.5,
                               "lambda": 0.1, "imax": 3}))
    out = tmp_path / "out"
    run_ok(runner, ["pipeline", "--config", str(cfg), "--out", str(out),
                    "--imax", "2"])
    report = json.loads((out / "report.json").read_text())
    assert report["config"]["imax"] == 2       # flag wins
    assert report["config"]["lambda"] == 0.1   # config survives
    assert report["config"]["tau"] == 0.5


def test_degrade_flag_parsing(runner, tmp_path):
    out = tmp_path / "out"
    run_ok(runner, ["pipeline", "--count", "1", "--seed", "2", "--out", str(out),
                    "--degrade", "drop=0.1,salt=0.005"])
    report = json.loads((out / "report.json").read_text())
    assert report["config"]["drop_rate"] == 0.1
    assert report["config"]["salt_rate"] == 0.005
    result = runner.invoke(main, ["pipeline", "--degrade", "bogus=1"])
    assert result.exit_code == 2


def test_loss_check_passes(runner):
    result = run_ok(runner, ["loss-check", "--trials", "4", "--seed", "1"])
    assert "ok" in result.output


def test_csg_sample_writes_scenes(runner, tmp_path):
    out = tmp_path / "scenes"
    run_ok(runner, ["csg-sample", "--count", "3", "--seed", "8",
                    "--out", str(out)])
    from sketchgraph.csg import load_scene

    for k in range(3):
        tree, prims, _ = load_scene(out / f"scene_{k:04d}.json")
        assert tree.leaf_count == len(prims)


def test_tam_command(runner, tmp_path):
    illum = tmp_path / "illum.png"
    gradient = np.tile(np.linspace(0, 1, 64), (64, 1))
    save_png(gradient, illum)
    tex_dir = tmp_path / "textures"
    tex_dir.mkdir()
    for k, spacing in enumerate((12, 8, 5, 3)):
        save_png(hatch_texture(32, spacing, 1), tex_dir / f"tone{k}.png")
    out = tmp_path / "shaded"
    run_ok(runner, ["tam", "--input", str(illum), "--textures", str(tex_dir),
                    "--out", str(out)])
    from sketchgraph.core import load_png

    shaded = load_png(out / "tam.png")
    assert shaded.shape == (64, 64)
    # dark side hatches denser than light side
    assert shaded[:, :8].mean() < shaded[:, -8:].mean()


def test_validate_premise_command(runner, tmp_path):
    out = tmp_path / "premise"
    run_ok(runner, ["validate-premise", "--count", "4", "--seed", "6",
                    "--betas", "3,5", "--out", str(out)])
    payload = json.loads((out / "premise.json").read_text())
    assert set(payload["betas"]) == {"3.0", "5.0"}
    for entry in payload["betas"].values():
        assert 0.0 <= entry["gap_positive_fraction"] <= 1.0
        assert len(entry["tau_histogram"]) == 16
