"""Command line: train a predictor, emit predictions for external scoring."""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .training import TrainConfig, predict as run_predict, train as run_train, write_log


@click.group()
def main():
    """Neural reflex predictors over phoneme exchange files."""


@main.command()
@click.argument("train_tsv", type=click.Path(exists=True, dir_okay=False))
@click.option("--model", type=click.Choice(["gru", "transformer"]), default="gru", show_default=True)
@click.option("--epochs", default=50, show_default=True, type=int)
@click.option("--batch-size", default=1024, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--dev", "dev_tsv", type=click.Path(exists=True, dir_okay=False), help="held-out file for perplexity")
@click.option("-o", "--checkpoint", required=True, type=click.Path(dir_okay=False))
@click.option("--log", "log_path", type=click.Path(dir_okay=False), help="write the JSONL training log here")
def train(train_tsv, model, epochs, batch_size, seed, dev_tsv, checkpoint, log_path):
    """Train on an exchange file and save a checkpoint."""
    config = TrainConfig(model=model, epochs=epochs, batch_size=batch_size, seed=seed)
    try:
        log = run_train(train_tsv, config, checkpoint, dev_path=dev_tsv)
    except ValueError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    if log_path:
        write_log(log, log_path)
    last = log[-1]
    summary = f"trained {model} for {epochs} epochs; final loss {last.get('train_loss', 0.0):.4f}"
    if "dev_perplexity" in last:
        summary += f"; dev perplexity {last['dev_perplexity']:.4f}"
    click.echo(summary, err=True)


@main.command("predict")
@click.argument("checkpoint", type=click.Path(exists=True, dir_okay=False))
@click.argument("test_tsv", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False))
def predict_cmd(checkpoint, test_tsv, output):
    """Greedy-decode predictions for an exchange file."""
    try:
        count = run_predict(checkpoint, test_tsv, output)
    except ValueError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    click.echo(f"wrote {count} predictions to {output}", err=True)


if __name__ == "__main__":
    main()
