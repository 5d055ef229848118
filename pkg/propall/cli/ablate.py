import csv
import io
import json
import logging
import os

import click

from ..helpers import parse_int_list, write_bytes
from ..metrics import aggregate_runs, format_mean_std
from ..nn import train as train_model
from ._config import MAX_SEED, report_errors
from .manifest import RunManifest
from .train import build_config, input_files, load_training_data, training_options

logger = logging.getLogger(__name__)

ARMS = ("off", "on")


@click.command()
@training_options(noise_switch=False)
@click.option("--seeds", default="1,2,3", show_default=True, help="Seed list, e.g. 1,2,3 or 1-5.")
@click.pass_context
@report_errors
def ablate(ctx, seeds, output_dir, **options):
    """Train with and without logit noise over several seeds.

    Both arms share every other option. Final test accuracy is reported as
    mean (std)% per arm; the runs are written to OUTPUT_DIR/ablation.json
    and OUTPUT_DIR/ablation.csv.
    """
    seed_list = parse_int_list(seeds)
    if not seed_list:
        raise click.BadParameter("needs at least one seed", param_hint="--seeds")
    if not all(0 <= seed <= MAX_SEED for seed in seed_list):
        raise click.BadParameter(f"seeds must lie in 0..{MAX_SEED}", param_hint="--seeds")
    if not (options["test_data"] or options["test_idx_images"]):
        raise click.UsageError("ablate reports test accuracy and needs --test-data or --test-idx-images")

    os.makedirs(output_dir, exist_ok=True)
    RunManifest.build("ablate", ctx.params, input_files(ctx.params)).write(os.path.join(output_dir, "manifest.json"))
    dataset, test_set, _ = load_training_data(ctx.params)

    results: dict[str, list[float]] = {arm: [] for arm in ARMS}
    for arm in ARMS:
        for seed in seed_list:
            config = build_config(dataset, seed, **{**options, "noise": arm})
            _, history = train_model(dataset, config, test_set)
            acc = history.last.test_accuracy
            logger.info("noise %s seed %d: test accuracy %.4f", arm, seed, acc)
            results[arm].append(acc)

    summary = {}
    for arm in ARMS:
        mean, std = aggregate_runs(results[arm])
        summary[arm] = {"seeds": list(seed_list), "accuracies": results[arm], "mean": mean, "std": std}
        click.echo(f"noise {arm:>3}: {format_mean_std(results[arm])}")
    write_bytes(
        os.path.join(output_dir, "ablation.json"),
        (json.dumps(summary, indent=2, sort_keys=True) + "\n").encode("utf-8"),
    )

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["noise", "seed", "test_accuracy"])
    for arm in ARMS:
        for seed, acc in zip(seed_list, results[arm]):
            writer.writerow([arm, seed, repr(acc)])
    write_bytes(os.path.join(output_dir, "ablation.csv"), buf.getvalue().encode("utf-8"))
