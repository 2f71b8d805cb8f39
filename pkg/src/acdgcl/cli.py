"""Command-line interface for acdgcl."""

from __future__ import annotations

import logging
import sys
from pathlib import Path
from typing import NoReturn

import click
import numpy as np
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from acdgcl import __version__
from acdgcl.advtrain import EpochMetrics, train
from acdgcl.config import DATA_DIR_ENV, ProbeConfig, TrainConfig, load_config, resolve_data_dir
from acdgcl.errors import AcdgclError
from acdgcl.evaluation import (
    ABLATION_FILE,
    EvalReport,
    evaluate_checkpoint,
    parse_axis,
    parse_values,
    run_ablation,
    run_robustness_sweep,
)
from acdgcl.graphdata import GraphDataset, parse_tu_dataset, resolve_dataset_dir
from acdgcl.model import load_checkpoint
from acdgcl.objective import check_loss_gradients

console = Console()
error_console = Console(stderr=True)

data_option = click.option(
    "--data",
    "-d",
    type=click.Path(path_type=Path),
    envvar=DATA_DIR_ENV,
    help=f"TU dataset directory (default: ${DATA_DIR_ENV})",
)
config_option = click.option(
    "--config",
    "-c",
    "config_path",
    type=click.Path(path_type=Path),
    help="Training configuration (JSON or TOML)",
)


def fail(message: str) -> NoReturn:
    error_console.print(f"[red]Error:[/red] {message}")
    sys.exit(1)


def setup_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=error_console, show_path=False)],
        force=True,
    )


def load_dataset(data: Path | None) -> GraphDataset:
    return parse_tu_dataset(resolve_dataset_dir(resolve_data_dir(data)))


def print_report(title: str, report: EvalReport) -> None:
    """Print an evaluation summary table."""
    table = Table(title=title, show_header=True, header_style="bold")
    table.add_column("Mean", justify="right", style="green")
    table.add_column("Std (folds)", justify="right")
    table.add_column("Std (seeds)", justify="right")
    table.add_column("Seeds", justify="right")
    table.add_column("Folds", justify="right")
    table.add_row(
        f"{report.mean:.4f}",
        f"{report.std:.4f}",
        f"{report.seed_std:.4f}",
        str(len(report.seeds)),
        str(report.folds),
    )
    console.print(table)


@click.group()
@click.version_option(__version__, prog_name="acdgcl")
@click.option("--verbose", "-v", is_flag=True, help="Debug logging")
def cli(verbose: bool) -> None:
    """ACDGCL - adversarial disentangled graph contrastive learning."""
    setup_logging(verbose)


@cli.command("train")
@data_option
@config_option
@click.option("--out", "-o", type=click.Path(path_type=Path), required=True, help="Output directory")
@click.option("--seed", type=int, default=None, help="Override the configured seed")
def train_cmd(data: Path | None, config_path: Path | None, out: Path, seed: int | None) -> None:
    """Train a model and write its checkpoint and metrics."""
    try:
        config = load_config(config_path)
        if seed is not None:
            config = config.with_overrides(seed=seed)
        dataset = load_dataset(data)
        console.print(
            f"[bold]Training on {dataset.name}[/bold] "
            f"({len(dataset)} graphs, {config.epochs} epochs, seed {config.seed})"
        )

        def show(row: EpochMetrics) -> None:
            console.print(
                f"  epoch {row.epoch:3d}  l_inv {row.l_inv:.4f}  l_recon {row.l_recon:.4f}  "
                f"l_adv {row.l_adv:.4f}  [bold]total {row.total:.4f}[/bold]"
            )

        result = train(config, dataset, out_dir=out, callback=show)
    except AcdgclError as e:
        fail(str(e))
    console.print(f"[green]Checkpoint:[/green] {result.checkpoint_path}")
    console.print(f"[green]Metrics:[/green] {result.metrics_path}")


@cli.command("eval")
@data_option
@click.option(
    "--checkpoint", type=click.Path(path_type=Path), required=True, help="Checkpoint file"
)
@click.option("--folds", type=int, default=None, help="Cross-validation folds (default 10)")
@click.option("--seeds", type=int, default=None, help="Number of split seeds (default 5)")
@config_option
@click.option("--out", "-o", type=click.Path(path_type=Path), required=True, help="Output CSV")
def eval_cmd(
    data: Path | None,
    checkpoint: Path,
    folds: int | None,
    seeds: int | None,
    config_path: Path | None,
    out: Path,
) -> None:
    """Linear-probe a trained checkpoint with k-fold cross-validation."""
    try:
        saved = load_checkpoint(checkpoint)
        params = saved.to_params()
        probe = load_config(config_path).probe if config_path else saved.train_config().probe
        updates: dict[str, object] = {}
        if folds is not None:
            updates["folds"] = folds
        if seeds is not None:
            updates["seeds"] = list(range(seeds))
        probe = ProbeConfig.model_validate({**probe.model_dump(), **updates})
        dataset = load_dataset(data)
        report = evaluate_checkpoint(params, dataset, probe, saved.config)
        write_report(out, report)
    except AcdgclError as e:
        fail(str(e))
    except ValueError as e:
        fail(f"invalid probe settings: {e}")
    print_report(f"{dataset.name} linear probe", report)
    console.print(f"[green]Wrote[/green] {out} and {out.with_suffix('.json')}")


def write_report(out: Path, report: EvalReport) -> None:
    """Per-fold CSV plus the full report as JSON next to it."""
    lines = ["seed,fold,accuracy"]
    for i, seed in enumerate(report.seeds):
        for fold in range(report.folds):
            accuracy = report.fold_accuracies[i * report.folds + fold]
            lines.append(f"{seed},{fold},{accuracy!r}")
    try:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text("\n".join(lines) + "\n", encoding="utf-8")
        out.with_suffix(".json").write_text(report.model_dump_json(indent=2) + "\n", encoding="utf-8")
    except OSError as e:
        raise AcdgclError(f"cannot write {out}: {e}") from None


@cli.command()
@data_option
@config_option
@click.option("--out", "-o", type=click.Path(path_type=Path), required=True, help="Output directory")
@click.option("--train-seeds", type=str, default=None, help="Comma-separated training seeds")
def ablate(data: Path | None, config_path: Path | None, out: Path, train_seeds: str | None) -> None:
    """Train and probe the full model and its three ablations."""
    try:
        config = load_config(config_path)
        seeds = [int(s) for s in train_seeds.split(",")] if train_seeds else None
        dataset = load_dataset(data)
        results = run_ablation(config, dataset, out_dir=out, train_seeds=seeds)
    except AcdgclError as e:
        fail(str(e))
    except ValueError as e:
        fail(f"invalid ablation settings: {e}")

    table = Table(title=f"{dataset.name} ablation", show_header=True, header_style="bold")
    table.add_column("Variant", style="cyan")
    table.add_column("Mean", justify="right", style="green")
    table.add_column("Std (folds)", justify="right")
    table.add_column("Std (seeds)", justify="right")
    for r in results:
        table.add_row(r.variant, f"{r.report.mean:.4f}", f"{r.report.std:.4f}", f"{r.report.seed_std:.4f}")
    console.print(table)
    console.print(f"[green]Wrote[/green] {out / ABLATION_FILE}")


@cli.command()
@click.option("--axis", required=True, help="aug_ratio, epsilon, attack_steps, edge_perturb or attribute_mask")
@click.option("--values", "values_text", required=True, help="Comma-separated values")
@data_option
@config_option
@click.option("--seeds", type=int, default=None, help="Number of probe split seeds")
@click.option("--reevaluate", is_flag=True, help="Train once; vary only the evaluation inputs")
@click.option("--out", "-o", type=click.Path(path_type=Path), required=True, help="Output CSV")
def sweep(
    axis: str,
    values_text: str,
    data: Path | None,
    config_path: Path | None,
    seeds: int | None,
    reevaluate: bool,
    out: Path,
) -> None:
    """Probe accuracy across values of one robustness axis."""
    try:
        sweep_axis = parse_axis(axis)
        values = parse_values(values_text)
        config = load_config(config_path)
        if seeds is not None:
            config = with_probe_seeds(config, seeds)
        dataset = load_dataset(data)
        rows = run_robustness_sweep(
            config, dataset, sweep_axis, values, reevaluate=reevaluate, out_path=out
        )
    except AcdgclError as e:
        fail(str(e))
    except ValueError as e:
        fail(f"invalid probe settings: {e}")

    table = Table(title=f"{dataset.name} sweep over {sweep_axis.value}", header_style="bold")
    table.add_column("Value", justify="right", style="cyan")
    table.add_column("Mean", justify="right", style="green")
    table.add_column("Std (folds)", justify="right")
    for row in rows:
        table.add_row(f"{row.value:g}", f"{row.report.mean:.4f}", f"{row.report.std:.4f}")
    console.print(table)
    console.print(f"[green]Wrote[/green] {out}")


def with_probe_seeds(config: TrainConfig, seeds: int) -> TrainConfig:
    probe = config.probe.model_dump()
    probe["seeds"] = list(range(seeds))
    return config.with_overrides(probe=probe)


@cli.command()
@click.option("--tol", type=float, default=1e-5, show_default=True, help="Relative error tolerance")
@click.option("--samples", type=int, default=100, show_default=True, help="Coordinates per term")
@click.option("--seed", type=int, default=0, show_default=True, help="Fixture and sampling seed")
def gradcheck(tol: float, samples: int, seed: int) -> None:
    """Verify loss gradients against central finite differences."""
    try:
        reports = check_loss_gradients(tol=tol, samples=samples, seed=seed)
    except AcdgclError as e:
        fail(str(e))

    table = Table(show_header=True, header_style="bold")
    table.add_column("Term", style="cyan")
    table.add_column("Coordinates", justify="right")
    table.add_column("Max rel. error", justify="right")
    table.add_column("Result")
    for term, report in reports.items():
        status = "[green]pass[/green]" if report.passed else "[red]FAIL[/red]"
        table.add_row(term, str(report.coordinates), f"{report.max_rel_error:.2e}", status)
    console.print(table)
    if not all(r.passed for r in reports.values()):
        fail(f"gradient check failed at tolerance {tol:g}")


@cli.command()
@data_option
def info(data: Path | None) -> None:
    """Show dataset statistics."""
    try:
        dataset = load_dataset(data)
    except AcdgclError as e:
        fail(str(e))

    nodes = np.array([g.num_nodes for g in dataset.graphs])
    edges = np.array([g.num_edges for g in dataset.graphs])
    counts = np.bincount(dataset.labels, minlength=dataset.num_graph_classes)
    table = Table(title=dataset.name, show_header=False)
    table.add_column("Field", style="bold")
    table.add_column("Value", justify="right")
    table.add_row("Graphs", str(len(dataset)))
    table.add_row("Graph classes", str(dataset.num_graph_classes))
    table.add_row("Class counts", ", ".join(str(int(c)) for c in counts))
    table.add_row("Node-label classes", str(dataset.num_node_label_classes))
    table.add_row("Mean nodes", f"{nodes.mean():.2f}")
    table.add_row("Mean edges", f"{edges.mean():.2f}")
    console.print(table)


def main() -> None:
    """Main entry point for the CLI."""
    cli()


if __name__ == "__main__":
    main()
