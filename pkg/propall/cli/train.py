import logging
import os

import click

from ..datasets import FeatureScaler, PllDataset
from ..enums import NoiseConstruction, NormalizeMode, OptimizerKind
from ..metrics import write_history_csv, write_history_jsonl
from ..nn import ArchitectureSpec, TrainConfig, save_checkpoint, train as train_model
from ._config import OUTPUT_DIR_ENV, SEED, report_errors
from ._inputs import dataset_options, load_dataset
from .manifest import RunManifest

logger = logging.getLogger(__name__)

NOISE_OPTION = click.option(
    "--noise",
    type=click.Choice(["on", "off"]),
    default="on",
    show_default=True,
    help="Gumbel-difference logit noise; off sets the peak lambda to 0.",
)

TRAINING_OPTIONS = [
    click.option("--arch", help="Layer widths, e.g. 784,300,301,302,303,10 (default: linear model d,k)."),
    click.option("--bn/--no-bn", default=False, show_default=True, help="Batch norm before each hidden ReLU."),
    click.option("--lr", type=float, default=0.05, show_default=True, help="Learning rate."),
    click.option("--momentum", type=float, default=0.9, show_default=True),
    click.option("--wd", type=float, default=1e-6, show_default=True, help="Weight decay (coupled)."),
    click.option("--batch", type=int, default=256, show_default=True, help="Mini-batch size."),
    click.option("--epochs", type=int, default=500, show_default=True),
    click.option(
        "--optimizer",
        type=click.Choice([o.value for o in OptimizerKind]),
        default="sgd",
        show_default=True,
    ),
    NOISE_OPTION,
    click.option("--peak-lambda", type=float, default=1.0, show_default=True),
    click.option("--plateau", type=float, default=0.8, show_default=True, help="Fraction of steps at the peak lambda."),
    click.option(
        "--noise-construction",
        type=click.Choice([c.value for c in NoiseConstruction]),
        default="logistic",
        show_default=True,
    ),
    click.option(
        "--normalize",
        type=click.Choice([m.value for m in NormalizeMode]),
        default="none",
        show_default=True,
        help="Feature normalisation fitted on the training data.",
    ),
    click.option("--eval-every", type=int, default=100, show_default=True, help="History record interval (iterations)."),
    click.option("--threads", type=int, default=1, show_default=True, help="Threads for eval-mode inference."),
    click.option(
        "-o",
        "--output-dir",
        envvar=OUTPUT_DIR_ENV,
        default="runs",
        show_default=True,
        type=click.Path(file_okay=False),
    ),
]


def training_options(noise_switch: bool = True):
    """Dataset, test-set and hyperparameter options shared by train and ablate."""
    options = TRAINING_OPTIONS if noise_switch else [o for o in TRAINING_OPTIONS if o is not NOISE_OPTION]

    def decorator(f):
        for option in reversed(options):
            f = option(f)
        return dataset_options("test-")(dataset_options()(f))

    return decorator


def build_config(
    dataset: PllDataset,
    seed: int,
    *,
    arch,
    bn,
    lr,
    momentum,
    wd,
    batch,
    epochs,
    optimizer,
    peak_lambda,
    plateau,
    noise_construction,
    eval_every,
    threads,
    noise="on",
    **_,
) -> TrainConfig:
    """TrainConfig from the resolved command options; without --arch the model is linear."""
    if arch:
        spec = ArchitectureSpec.parse(arch, bn)
    else:
        spec = ArchitectureSpec((dataset.dim, dataset.num_classes), bn)
    return TrainConfig(
        architecture=spec,
        epochs=epochs,
        batch_size=batch,
        learning_rate=lr,
        momentum=momentum,
        weight_decay=wd,
        plateau_fraction=plateau,
        peak_lambda=peak_lambda if noise == "on" else 0.0,
        noise_construction=NoiseConstruction(noise_construction),
        optimizer=OptimizerKind(optimizer),
        seed=seed,
        eval_every=eval_every,
        threads=threads,
    )


def load_training_data(params: dict) -> tuple[PllDataset, PllDataset | None, FeatureScaler]:
    dataset = load_dataset(params["data"], params["idx_images"], params["idx_labels"])
    test_set = load_dataset(
        params["test_data"],
        params["test_idx_images"],
        params["test_idx_labels"],
        required=False,
        what="test data",
        num_classes=dataset.num_classes,
    )
    scaler = FeatureScaler.fit(dataset.features, NormalizeMode(params["normalize"]))
    dataset = scaler.apply(dataset)
    if test_set is not None:
        test_set = scaler.apply(test_set)
    return dataset, test_set, scaler


def input_files(params: dict) -> list[str]:
    keys = ("data", "idx_images", "idx_labels", "test_data", "test_idx_images", "test_idx_labels")
    return [params[k] for k in keys if params.get(k)]


@click.command()
@training_options()
@click.option("--seed", type=SEED, default=0, show_default=True)
@click.pass_context
@report_errors
def train(ctx, seed, output_dir, **options):
    """Train an MLP with the candidate-set loss.

    \b
    Writes into OUTPUT_DIR:
    * manifest.json   resolved options, input digests, version (written first)
    * checkpoint.json model parameters and feature scaler
    * history.jsonl   one record per evaluation point
    * history.csv     the same records, wide, for plotting
    """
    os.makedirs(output_dir, exist_ok=True)
    RunManifest.build("train", ctx.params, input_files(ctx.params)).write(os.path.join(output_dir, "manifest.json"))

    dataset, test_set, scaler = load_training_data(ctx.params)
    config = build_config(dataset, seed, **options)
    model, history = train_model(dataset, config, test_set)

    save_checkpoint(model, os.path.join(output_dir, "checkpoint.json"), scaler)
    write_history_jsonl(history, os.path.join(output_dir, "history.jsonl"))
    write_history_csv(history, os.path.join(output_dir, "history.csv"))

    last = history.last
    if last is not None:
        click.echo(f"iteration {last.iteration}: train loss {last.train_loss:.6f}")
        if last.train_accuracy is not None:
            click.echo(f"train accuracy {last.train_accuracy:.4f}")
        if last.test_accuracy is not None:
            click.echo(f"test accuracy {last.test_accuracy:.4f}")
    click.echo(f"outputs written to {output_dir}")
