import json
import logging

import click

from ..exceptions import ValidationError
from ..helpers import write_bytes
from ..metrics import per_class_sensitivity
from ..nn import evaluate, load_checkpoint
from ..nn.train import check_compatible
from ._config import report_errors, resolve_output
from ._inputs import dataset_options, load_dataset

logger = logging.getLogger(__name__)


@click.command("eval")
@click.option(
    "--checkpoint",
    required=True,
    type=click.Path(exists=True, dir_okay=False),
    help="checkpoint.json written by train.",
)
@dataset_options()
@click.option("--json", "as_json", is_flag=True, default=False, help="Print the report as JSON.")
@click.option("-o", "--output", help="Also write the JSON report to this file.")
@click.option("--threads", type=int, default=1, show_default=True, help="Threads for inference.")
@report_errors
def eval_cmd(checkpoint, data, idx_images, idx_labels, as_json, output, threads):
    """Accuracy, confusion matrix and per-class sensitivity of a checkpoint.

    The feature scaler stored in the checkpoint is applied to the data first.
    """
    model, scaler = load_checkpoint(checkpoint)
    dataset = load_dataset(data, idx_images, idx_labels, num_classes=model.num_classes)
    if not dataset.has_true_labels:
        raise ValidationError("evaluation needs a known true label on every row")
    check_compatible(model.arch, dataset, "evaluation data")
    if scaler is not None:
        dataset = scaler.apply(dataset)

    acc, cm = evaluate(model, dataset, threads)
    sens, support = per_class_sensitivity(cm)
    report = {
        "checkpoint": checkpoint,
        "samples": len(dataset),
        "accuracy": acc,
        "confusion": cm.counts.tolist(),
        "sensitivity": sens.tolist(),
        "support": support.tolist(),
    }
    text = json.dumps(report, indent=2) + "\n"
    if output:
        write_bytes(resolve_output(output), text.encode("utf-8"))

    if as_json:
        click.echo(text, nl=False)
        return
    click.echo(f"samples:  {len(dataset)}")
    click.echo(f"accuracy: {acc:.6f}")
    click.echo("confusion (rows true, columns predicted):")
    width = max(len(str(cm.counts.max())), 3)
    for row in cm.counts:
        click.echo("  " + " ".join(f"{v:>{width}d}" for v in row))
    click.echo("sensitivity:")
    for c, (value, has) in enumerate(zip(sens, support)):
        click.echo(f"  class {c}: {value:.4f}" + ("" if has else " (no samples)"))
