#!/usr/bin/env python3
"""
CLI entrypoint for the navigation pipeline.

Provides commands for:
- Generating scenes and collecting roamer videos and goal images
- Labeling videos with pseudo-actions
- Training, evaluating and reporting
- Dumping context-frame embeddings
"""
import sys
from typing import List, Optional

import click
import typer
from rich.console import Console
from rich.table import Table

from src.domain.entities.enums import DecoderKind, Split, Variant
from src.infrastructure.config import settings
from src.infrastructure.config.experiment import ExperimentConfig, dump_config, load_experiment_config
from src.infrastructure.container import Container
from src.presentation.middleware import EXIT_VALIDATION, error_handler

app = typer.Typer(
    name="nolo",
    help="Navigate from a single context video: data, training and evaluation",
    add_completion=False
)
console = Console()

ConfigOption = typer.Option(None, "--config", "-c", help="JSON experiment config")
SetOption = typer.Option(None, "--set", help="Dotted override key.path=value (repeatable)")
SeedOption = typer.Option(None, "--seed", help="Seed override")

_ABLATION_OVERRIDES = {
    Variant.NO_CONTEXT: "train.ablation.no_context=true",
    Variant.NO_TEMPORAL: "train.ablation.no_temporal=true",
    Variant.MATCHING_DECODER: "train.ablation.matching_decoder=true",
}


def _load(config: Optional[str], overrides: Optional[List[str]], extra: Optional[List[str]] = None) -> ExperimentConfig:
    return load_experiment_config(config, list(overrides or []) + list(extra or []))


def _container(cfg: ExperimentConfig) -> Container:
    container = Container()
    container.config.from_dict({"dataset_root": cfg.dataset_root or settings.dataset_root})
    return container


def _write_effective_config(container: Container, cfg: ExperimentConfig, directory: str = "."):
    container.artifact_repository().write_text(f"{directory}/effective_config.json", dump_config(cfg))


def _metrics_table(title: str, rows) -> Table:
    table = Table(title=title)
    for column in ("Split", "Scene", "SR(%)↑", "SPL(%)↑", "TL↓", "NE↓", "Episodes"):
        table.add_column(column, style="cyan" if column in ("Split", "Scene") else "white")
    for split, scene, s in rows:
        table.add_row(split, scene, f"{s.sr:.2f}", f"{s.spl:.2f}", f"{s.tl:.1f}", f"{s.ne:.3f}", str(s.n_episodes))
    return table


@app.command()
@error_handler
def gen_scenes(
    config: Optional[str] = ConfigOption,
    overrides: Optional[List[str]] = SetOption,
    seed: Optional[int] = SeedOption,
):
    """
    Generate train, unseen-layout and unseen-room scenes and the manifest.

    Example:
        nolo gen-scenes --config exp.json
    """
    cfg = _load(config, overrides, [f"seed={seed}"] if seed is not None else None)
    container = _container(cfg)
    result = container.scene_generation_use_case().execute(cfg.scenes, cfg.seed)
    _write_effective_config(container, cfg)
    counts = ", ".join(f"{k}={v}" for k, v in result.scenes_by_split.items())
    console.print(f"[green]✓[/green] Generated {len(result.manifest.scenes)} scenes ({counts}) -> {result.manifest_path}")


@app.command()
@error_handler
def collect(
    config: Optional[str] = ConfigOption,
    overrides: Optional[List[str]] = SetOption,
    seed: Optional[int] = SeedOption,
    scene: Optional[List[str]] = typer.Option(None, "--scene", help="Restrict to these scene ids"),
):
    """
    Roam every scene once and render its goal images.

    Example:
        nolo collect --config exp.json
    """
    cfg = _load(config, overrides, [f"seed={seed}"] if seed is not None else None)
    container = _container(cfg)
    result = container.collection_use_case().execute(
        cfg.scenes,
        cfg.seed,
        width=cfg.model.frame_width,
        height=cfg.model.frame_height,
        threads=settings.threads,
        scene_ids=scene or None
    )
    _write_effective_config(container, cfg)
    console.print(
        f"[green]✓[/green] Collected {result.videos} videos, "
        f"{result.goal_sets} goal sets ({result.goal_images} images)"
    )


@app.command()
@error_handler
def label(
    config: Optional[str] = ConfigOption,
    overrides: Optional[List[str]] = SetOption,
    seed: Optional[int] = SeedOption,
    variant: Variant = typer.Option(Variant.FULL, "--variant", help="matching_decoder selects the keypoint decoder"),
    calibrate: bool = typer.Option(False, "--calibrate", help="Fit tau_x/tau_y on a held-out roamer video first"),
):
    """
    Decode pseudo-actions for every collected video.

    Example:
        nolo label --config exp.json --calibrate
    """
    cfg = _load(config, overrides, [f"seed={seed}"] if seed is not None else None)
    container = _container(cfg)
    kind = DecoderKind.MATCHING if variant is Variant.MATCHING_DECODER else DecoderKind.FLOW
    calibration = None
    if calibrate:
        calibration = {
            "plan": cfg.scenes,
            "seed": cfg.seed,
            "width": cfg.model.frame_width,
            "height": cfg.model.frame_height,
        }
    result = container.labeling_use_case().execute(
        cfg.decoder.to_params(kind),
        threads=settings.threads,
        calibration=calibration
    )
    _write_effective_config(container, cfg)
    accuracy = f", mean accuracy {result.mean_accuracy:.4f}" if result.mean_accuracy is not None else ""
    console.print(
        f"[green]✓[/green] Labeled {result.labeled} videos with the {result.decoder} decoder "
        f"(tau_x={result.tau_x}, tau_y={result.tau_y}){accuracy}"
    )


@app.command()
@error_handler
def train(
    config: Optional[str] = ConfigOption,
    overrides: Optional[List[str]] = SetOption,
    seed: Optional[int] = SeedOption,
    variant: Variant = typer.Option(Variant.FULL, "--variant", help="Ablation to train"),
    out: Optional[str] = typer.Option(None, "--out", "-o", help="Run directory (default runs/<variant>/seed_<seed>)"),
):
    """
    Train the policy on the labeled training split.

    Example:
        nolo train --config exp.json --set train.ablation.no_temporal=true
    """
    if variant is Variant.RANDOM:
        raise ValueError("--variant random has nothing to train")
    extra = []
    if variant in _ABLATION_OVERRIDES:
        extra.append(_ABLATION_OVERRIDES[variant])
    if seed is not None:
        extra += [f"train.seed={seed}", f"model.seed={seed}"]
    cfg = _load(config, overrides, extra)
    container = _container(cfg)
    result = container.training_use_case().execute(cfg, out_dir=out)
    final = f", final loss {result.final_losses.total:.4f}" if result.final_losses else ""
    console.print(f"[green]✓[/green] Trained {result.steps} steps{final} -> {result.checkpoint_path}")


@app.command("eval")
@error_handler
def eval_command(
    config: Optional[str] = ConfigOption,
    overrides: Optional[List[str]] = SetOption,
    seed: Optional[int] = SeedOption,
    variant: Optional[Variant] = typer.Option(None, "--variant", help="Variant to evaluate (default: suite.variants)"),
    split: Optional[Split] = typer.Option(None, "--split", help="Restrict to one split"),
    checkpoint: Optional[str] = typer.Option(None, "--checkpoint", help="Explicit checkpoint path"),
    out: Optional[str] = typer.Option(None, "--out", "-o", help="Result directory (default results/<variant>)"),
):
    """
    Run the navigation suite and write per-seed result tables.

    Example:
        nolo eval --config exp.json --variant no_context --split unseen_room
    """
    cfg = _load(config, overrides)
    container = _container(cfg)
    variants = [variant] if variant is not None else cfg.suite.variants
    use_case = container.evaluation_use_case()
    for v in variants:
        result = use_case.execute(
            cfg,
            v,
            seeds=[seed] if seed is not None else None,
            splits=[split] if split is not None else None,
            threads=settings.threads,
            checkpoint=checkpoint,
            out_dir=out
        )
        rows = [(name, "all", s) for name, s in sorted(result.split_summaries.items())]
        console.print(_metrics_table(f"{v.value}", rows))
        console.print(f"[green]✓[/green] Evaluated {v.value}: {len(result.rows)} scene rows -> {', '.join(result.results_paths)}")


@app.command()
@error_handler
def report(
    config: Optional[str] = ConfigOption,
    overrides: Optional[List[str]] = SetOption,
    out: Optional[str] = typer.Option(None, "--out", "-o", help="Directory for report.csv and report.md"),
):
    """
    Merge per-seed results into report.csv and report.md.

    Example:
        nolo report --config exp.json
    """
    cfg = _load(config, overrides)
    container = _container(cfg)
    result = container.report_use_case().execute(out_dir=out)
    for warning in result.warnings:
        console.print(f"[yellow]⚠ {warning}[/yellow]")
    console.print(f"[green]✓[/green] Report with {result.rows} rows -> {result.markdown_path}")


@app.command()
@error_handler
def dump_embeddings(
    config: Optional[str] = ConfigOption,
    overrides: Optional[List[str]] = SetOption,
    seed: Optional[int] = SeedOption,
    scene: str = typer.Option(..., "--scene", help="Scene whose context video is embedded"),
    variant: Variant = typer.Option(Variant.FULL, "--variant", help="Run whose checkpoint is used"),
    checkpoint: Optional[str] = typer.Option(None, "--checkpoint", help="Explicit checkpoint path"),
    out: str = typer.Option("embeddings.csv", "--out", "-o", help="Output CSV"),
):
    """
    Write per-frame embeddings of a context video as CSV.

    Example:
        nolo dump-embeddings --config exp.json --scene ulayout_0
    """
    cfg = _load(config, overrides)
    container = _container(cfg)
    if checkpoint is None:
        checkpoint = container.evaluation_use_case().checkpoint_for(variant, seed if seed is not None else cfg.train.seed)
    result = container.embedding_dump_use_case().execute(scene, checkpoint, cfg.model, out_path=out)
    console.print(f"[green]✓[/green] Wrote {result.rows} embeddings of dim {result.dim} -> {result.path}")


def run_command(argv: Optional[List[str]] = None) -> int:
    """Run one subcommand and return its exit status."""
    try:
        code = app(args=argv, prog_name="nolo", standalone_mode=False)
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.exceptions.Abort:
        return EXIT_VALIDATION
    except click.ClickException as e:
        e.show()
        return EXIT_VALIDATION
    return code if isinstance(code, int) else 0


def main():
    sys.exit(run_command())


if __name__ == "__main__":
    main()
