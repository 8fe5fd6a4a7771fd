"""Command-line pipeline: synthesize, infer, extract strokes, emit machine
files, plus validation and procedural-scene utilities.

All artifacts are deterministic functions of (config, seed); timings are
printed to stderr so the artifact tree stays byte-stable across runs.
"""

from __future__ import annotations

import json
import sys
import time
from pathlib import Path

import click
import numpy as np

from . import csg as csgmod
from . import tam as tammod
from .config import PipelineConfig
from .core import SkeletonGraph, load_png
from .infer import feedback_infer, premise_stats
from .loss import xent_loss
from .output import (
    atomic_write_png,
    atomic_write_text,
    load_graph,
    load_masks,
    write_graph,
    write_manifest,
    write_sample,
)
from .synth import (
    SketchGenParams,
    build_ground_truth,
    degrade_masks,
    generate_sample,
    normalize_sketch,
    parse_sketch_ndjson,
)
from .toolpath import emit_gcode, emit_svg, fit_to_plate, graph_bbox, strokes_from_graph


def _parse_degrade(text: str | None) -> dict:
    if not text:
        return {}
    out = {}
    keys = {"drop": ("drop_rate", float), "dilate": ("dilate_px", int),
            "salt": ("salt_rate", float)}
    for part in text.split(","):
        if "=" not in part:
            raise click.UsageError(f"bad --degrade entry {part!r}; use drop=F,dilate=N,salt=F")
        key, value = part.split("=", 1)
        key = key.strip()
        if key not in keys:
            raise click.UsageError(f"unknown --degrade key {key!r}")
        name, cast = keys[key]
        out[name] = cast(value)
    return out


def _build_config(config_path, degrade, **flags) -> PipelineConfig:
    if config_path is not None:
        if not Path(config_path).exists():
            raise click.UsageError(f"config file not found: {config_path}")
        cfg = PipelineConfig.load(config_path)
    else:
        cfg = PipelineConfig()
    if "input_path" in flags:
        flags["input"] = flags.pop("input_path")
    overrides = {k: v for k, v in flags.items() if v is not None}
    overrides.update(_parse_degrade(degrade))
    try:
        return cfg.replace(**overrides)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc


def _require_input(path: str | None, what: str = "input") -> Path:
    if path is None:
        raise click.UsageError(f"missing required --{what}")
    p = Path(path)
    if not p.exists():
        raise click.UsageError(f"{what} file not found: {p}")
    return p


def common_options(fn):
    fn = click.option("--config", "config_path", type=click.Path(), default=None,
                      help="JSON config file; flags override it.")(fn)
    fn = click.option("--seed", type=int, default=None)(fn)
    fn = click.option("--size", type=int, default=None)(fn)
    fn = click.option("--beta", type=float, default=None)(fn)
    fn = click.option("--tau", type=float, default=None)(fn)
    fn = click.option("--lambda", "rate", type=float, default=None,
                      help="Threshold update rate per iteration.")(fn)
    fn = click.option("--imax", "i_max", type=int, default=None)(fn)
    fn = click.option("--out", type=click.Path(), default=None,
                      help="Output directory.")(fn)
    fn = click.option("--input", "input_path", type=click.Path(), default=None)(fn)
    fn = click.option("--degrade", type=str, default=None,
                      help="Mask degradation, e.g. drop=0.15,dilate=1,salt=0.01.")(fn)
    return fn


@click.group()
def main():
    """Raster line drawings -> skeleton graphs -> plotter instructions."""


def _load_sketches(cfg: PipelineConfig, count: int):
    """Sketches from NDJSON when an input is configured, else the seeded
    synthetic sampler.  Returns (sketch, sample_seed_index) pairs."""
    if cfg.input is not None:
        path = _require_input(cfg.input)
        sketches = parse_sketch_ndjson(path.read_bytes(), cfg.size)
        sketches = [normalize_sketch(s, cfg.size, cfg.margin) for s in sketches]
        if count:
            sketches = sketches[:count]
        return [(s, k) for k, s in enumerate(sketches)]
    gp = SketchGenParams(size=cfg.size, margin=cfg.margin)
    out = []
    for k in range(count):
        sample = generate_sample(cfg.seed, k, gp, cfg.stroke_width, cfg.vertex_radius)
        out.append((sample.sketch, k))
    return out


def _stage(name: str, fn, *args, **kwargs):
    started = time.perf_counter()
    try:
        result = fn(*args, **kwargs)
    except click.UsageError:
        raise
    except Exception as exc:
        click.echo(f"error in stage {name}: {exc}", err=True)
        sys.exit(1)
    click.echo(f"[{name}] {time.perf_counter() - started:.3f}s", err=True)
    return result


@main.command()
@common_options
@click.option("--count", type=int, default=None, help="Samples to generate.")
@click.option("--augment", "do_augment", is_flag=True, help="Apply random jitter.")
def synth(config_path, degrade, count, do_augment, **flags):
    """Generate a dataset of inputs, label masks and ground-truth graphs."""
    cfg = _build_config(config_path, degrade, count=count, **flags)
    out_dir = Path(cfg.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    def run():
        from .synth import OffCanvasError, augment, sample_augment_params

        files = []
        skipped_augment = 0
        entries = _load_sketches(cfg, cfg.count)
        for sketch, k in entries:
            sample = build_ground_truth(sketch, cfg.size, cfg.stroke_width,
                                        cfg.vertex_radius, seed=cfg.seed)
            if do_augment:
                rng = np.random.default_rng([cfg.seed, k, 2])
                for _ in range(8):
                    try:
                        sample = augment(sample, sample_augment_params(rng),
                                         cfg.stroke_width, cfg.vertex_radius)
                        break
                    except OffCanvasError:
                        continue
                else:
                    skipped_augment += 1
            if cfg.drop_rate or cfg.dilate_px or cfg.salt_rate:
                seed = int(np.random.default_rng([cfg.seed, k, 3]).integers(0, 2 ** 63))
                sample.masks = degrade_masks(sample.masks, cfg.drop_rate,
                                             cfg.dilate_px, cfg.salt_rate, seed)
            files.extend(write_sample(out_dir, f"{k:05d}", sample))
        write_manifest(out_dir, {"config": cfg.report_dict(), "files": files,
                                 "skipped_augmentations": skipped_augment})
        return files

    files = _stage("synth", run)
    click.echo(f"wrote {len(files)} files to {out_dir}")


@main.command()
@common_options
@click.option("--masks", "masks_path", type=click.Path(), default=None,
              help="Masks PNG; defaults to <input> with _input -> _masks.")
@click.option("--debug-svg", is_flag=True, help="Write per-iteration overlays.")
def infer(config_path, degrade, masks_path, debug_svg, **flags):
    """Infer a skeleton graph from an input image and segmentation masks."""
    cfg = _build_config(config_path, degrade, **flags)
    image_path = _require_input(cfg.input)
    if masks_path is None:
        masks_path = str(image_path).replace("_input.png", "_masks.png")
    masks_file = _require_input(masks_path, "masks")
    out_dir = Path(cfg.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    def run():
        image = load_png(image_path)
        masks = load_masks(masks_file)
        if cfg.drop_rate or cfg.dilate_px or cfg.salt_rate:
            masks = degrade_masks(masks, cfg.drop_rate, cfg.dilate_px,
                                  cfg.salt_rate, cfg.seed)
        graph, trace = feedback_infer(image, masks, cfg.infer_params())
        write_graph(out_dir / "graph.json", graph)
        if debug_svg:
            for i, edges in enumerate(trace.edge_sets):
                seq = strokes_from_graph(SkeletonGraph(graph.vertices, edges))
                atomic_write_text(out_dir / f"iteration_{i:02d}.svg",
                                  emit_svg(seq, graph.vertices, masks.size))
        return graph, trace

    graph, trace = _stage("infer", run)
    click.echo(json.dumps({"vertices": graph.num_vertices,
                           "edges": len(graph.edges),
                           "edge_counts": trace.edge_counts}))


@main.command()
@common_options
def strokes(config_path, degrade, **flags):
    """Partition a graph JSON into ordered pen strokes."""
    cfg = _build_config(config_path, degrade, **flags)
    graph_path = _require_input(cfg.input)
    out_dir = Path(cfg.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    def run():
        graph = load_graph(graph_path)
        seq = strokes_from_graph(graph)
        atomic_write_text(out_dir / "strokes.json",
                          json.dumps({"strokes": seq.paths}, sort_keys=True) + "\n")
        return seq

    seq = _stage("strokes", run)
    click.echo(f"{len(seq)} strokes")


@main.command()
@common_options
def gcode(config_path, degrade, **flags):
    """Emit plotter GCODE for a graph JSON."""
    cfg = _build_config(config_path, degrade, **flags)
    graph_path = _require_input(cfg.input)
    out_dir = Path(cfg.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    def run():
        graph = load_graph(graph_path)
        seq = strokes_from_graph(graph)
        transform = fit_to_plate(graph_bbox(graph))
        text = emit_gcode(seq, graph.vertices, transform)
        atomic_write_text(out_dir / "drawing.gcode", text)
        return text

    text = _stage("gcode", run)
    click.echo(f"{len(text.splitlines())} lines")


@main.command()
@common_options
def svg(config_path, degrade, **flags):
    """Emit an SVG path document for a graph JSON."""
    cfg = _build_config(config_path, degrade, **flags)
    graph_path = _require_input(cfg.input)
    out_dir = Path(cfg.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    def run():
        graph = load_graph(graph_path)
        seq = strokes_from_graph(graph)
        text = emit_svg(seq, graph.vertices, cfg.size)
        atomic_write_text(out_dir / "drawing.svg", text)
        return text

    text = _stage("svg", run)
    click.echo(f"{len(text.splitlines())} lines")


@main.command()
@common_options
@click.option("--count", type=int, default=None, help="Sketches to process.")
def pipeline(config_path, degrade, count, **flags):
    """Run synth -> infer -> strokes -> gcode/svg end to end."""
    cfg = _build_config(config_path, degrade, count=count, **flags)
    out_dir = Path(cfg.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    entries = _stage("synth", _load_sketches, cfg, cfg.count)
    report = {"config": cfg.report_dict(), "samples": []}
    for sketch, k in entries:
        stem = f"{k:05d}"

        def run_one():
            sample = build_ground_truth(sketch, cfg.size, cfg.stroke_width,
                                        cfg.vertex_radius, seed=cfg.seed)
            masks = sample.masks
            if cfg.drop_rate or cfg.dilate_px or cfg.salt_rate:
                seed = int(np.random.default_rng([cfg.seed, k, 3]).integers(0, 2 ** 63))
                masks = degrade_masks(masks, cfg.drop_rate, cfg.dilate_px,
                                      cfg.salt_rate, seed)
            atomic_write_png(out_dir / f"{stem}_input.png", sample.image)
            atomic_write_png(out_dir / f"{stem}_masks.png", None,
                             rgb=(masks.vertex, masks.edge, masks.background))
            graph, trace = feedback_infer(sample.image, masks, cfg.infer_params())
            write_graph(out_dir / f"{stem}_graph.json", graph)
            seq = strokes_from_graph(graph)
            atomic_write_text(out_dir / f"{stem}_strokes.json",
                              json.dumps({"strokes": seq.paths}, sort_keys=True) + "\n")
            if graph.num_vertices:
                transform = fit_to_plate(graph_bbox(graph))
                atomic_write_text(out_dir / f"{stem}.gcode",
                                  emit_gcode(seq, graph.vertices, transform))
            atomic_write_text(out_dir / f"{stem}.svg",
                              emit_svg(seq, graph.vertices, cfg.size))
            return graph, trace, seq

        graph, trace, seq = _stage(f"sample {stem}", run_one)
        report["samples"].append({
            "id": stem,
            "vertices": graph.num_vertices,
            "edges": len(graph.edges),
            "edge_counts_per_iteration": trace.edge_counts,
            "strokes": len(seq),
        })
    atomic_write_text(out_dir / "report.json",
                      json.dumps(report, indent=2, sort_keys=True) + "\n")
    click.echo(f"pipeline complete: {len(entries)} samples in {out_dir}")


@main.command("validate-premise")
@common_options
@click.option("--count", type=int, default=64, help="Samples to evaluate.")
@click.option("--betas", type=str, default="3,5,7", help="ROI widths.")
@click.option("--bins", type=int, default=16, help="Histogram bins.")
@click.option("--plot", is_flag=True, help="Also write a histogram PNG.")
def validate_premise(config_path, degrade, count, betas, bins, plot, **flags):
    """Check that accepted-edge responses clear the all-pairs mean."""
    cfg = _build_config(config_path, degrade, **flags)
    beta_list = [float(b) for b in betas.split(",")]
    out_dir = Path(cfg.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    def run():
        gp = SketchGenParams(size=cfg.size, margin=cfg.margin)
        samples = [generate_sample(cfg.seed, k, gp, cfg.stroke_width, cfg.vertex_radius)
                   for k in range(count)]
        return premise_stats(samples, beta_list, bins=bins)

    stats = _stage("premise", run)
    payload = {"count": count, "skipped": stats.skipped, "betas": {}}
    for b in stats.betas:
        counts, edges = stats.histogram(b)
        payload["betas"][str(b)] = {
            "gap_positive_fraction": stats.gap_positive_fraction(b),
            "tau_histogram": counts.tolist(),
            "bin_edges": edges.tolist(),
            "tau_mean": float(stats.tau_values(b).mean()),
            "gap_mean": float(stats.gap_values(b).mean()),
        }
    atomic_write_text(out_dir / "premise.json",
                      json.dumps(payload, indent=2, sort_keys=True) + "\n")
    if plot:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, axes = plt.subplots(1, len(stats.betas), figsize=(4 * len(stats.betas), 3))
        for ax, b in zip(np.atleast_1d(axes), stats.betas):
            counts, edges = stats.histogram(b)
            ax.bar(edges[:-1], np.maximum(counts, 0.5), width=np.diff(edges),
                   align="edge")
            ax.set_yscale("log")
            ax.set_title(f"threshold, roi width {b:g}")
        fig.tight_layout()
        fig.savefig(out_dir / "premise.png")
    click.echo(json.dumps({b: payload["betas"][str(b)]["gap_positive_fraction"]
                           for b in map(str, stats.betas)}))


@main.command("loss-check")
@click.option("--trials", type=int, default=20)
@click.option("--seed", type=int, default=0)
def loss_check(trials, seed):
    """Finite-difference check of the training-loss gradients (debug)."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        acts = rng.normal(size=(3, 8, 8))
        labels = rng.integers(0, 3, size=(8, 8))
        mode = ("plain", "balanced", "max_weighted")[int(rng.integers(0, 3))]
        _, grad = xent_loss(acts, labels, mode)
        h = 1e-5
        for _ in range(8):
            k, r, c = (int(rng.integers(0, n)) for n in acts.shape)
            bumped = acts.copy()
            bumped[k, r, c] += h
            up, _ = xent_loss(bumped, labels, mode)
            bumped[k, r, c] -= 2 * h
            down, _ = xent_loss(bumped, labels, mode)
            fd = (up - down) / (2 * h)
            denom = max(abs(fd), abs(grad[k, r, c]), 1e-12)
            worst = max(worst, abs(fd - grad[k, r, c]) / denom)
    ok = worst <= 1e-4
    click.echo(f"max relative gradient error: {worst:.3e} ({'ok' if ok else 'FAIL'})")
    if not ok:
        sys.exit(1)


@main.command("csg-sample")
@click.option("--count", type=int, default=1)
@click.option("--nmax", type=int, default=6)
@click.option("--sym-rate", type=float, default=0.5)
@click.option("--seed", type=int, default=0)
@click.option("--out", type=click.Path(), default="out")
def csg_sample(count, nmax, sym_rate, seed, out):
    """Sample solid-grammar scenes to JSON."""
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for k in range(count):
        tree, prims = csgmod.sample_csg_tree(nmax, sym_rate, [seed, k])
        atomic_write_text(out_dir / f"scene_{k:04d}.json",
                          csgmod.scene_to_json(tree, prims, seed))
    click.echo(f"wrote {count} scenes to {out_dir}")


@main.command()
@click.option("--input", "input_path", type=click.Path(), required=True,
              help="Illumination PNG.")
@click.option("--textures", "texture_dir", type=click.Path(), required=True,
              help="Directory of texture PNGs, lightest tone last.")
@click.option("--breakpoints", type=str, default=None,
              help="Comma-separated ascending levels; default even spacing.")
@click.option("--black-floor", type=float, default=0.02)
@click.option("--offset", type=str, default="0,0", help="Tile offset x,y.")
@click.option("--invert", is_flag=True, help="Apply textures above the level.")
@click.option("--out", type=click.Path(), default="out")
def tam(input_path, texture_dir, breakpoints, black_floor, offset, invert, out):
    """Composite a tonal-art-map texture ladder over an illumination image."""
    illum_path = _require_input(input_path)
    textures = tammod.load_textures(_require_input(texture_dir, "textures"))
    if breakpoints is None:
        bp = tammod.default_breakpoints(len(textures))
    else:
        bp = tuple(float(b) for b in breakpoints.split(","))
    spec = tammod.TamSpec(bp, tuple(textures), black_floor)
    dx, dy = (int(v) for v in offset.split(","))
    shaded = tammod.tam_shade(load_png(illum_path), spec, (dx, dy), invert)
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    atomic_write_png(out_dir / "tam.png", shaded)
    click.echo(str(out_dir / "tam.png"))


if __name__ == "__main__":
    main()
