import logging

import click
import numpy as np

from ..datasets import (
    CorruptionSpec,
    average_candidate_count,
    corrupt as corrupt_labels,
    normalize_features,
    save_pll_csv,
    select_classes,
    subsample,
)
from ..enums import CorruptionMode, NormalizeMode
from ..exceptions import FormatError, ValidationError
from ..helpers import parse_int_list
from ._config import SEED, report_errors, resolve_output
from ._inputs import dataset_options, load_dataset
from .manifest import RunManifest

logger = logging.getLogger(__name__)

MODE_PARAMS = {
    CorruptionMode.fixed: "extra",
    CorruptionMode.bernoulli: "q",
    CorruptionMode.instance: "scores",
}


def _load_scores(path: str) -> np.ndarray:
    try:
        return np.atleast_2d(np.loadtxt(path, delimiter=",", dtype=np.float64))
    except ValueError as e:
        raise FormatError(f"score matrix {path}: {e}") from e


@click.command()
@dataset_options()
@click.option(
    "--mode",
    type=click.Choice([m.value for m in CorruptionMode]),
    required=True,
    help="Candidate-set generator.",
)
@click.option("--extra", type=int, help="Distractors per instance (--mode fixed).")
@click.option("--q", type=float, help="Per-label flip probability (--mode bernoulli).")
@click.option(
    "--scores",
    type=click.Path(exists=True, dir_okay=False),
    help="CSV n x k flip-score matrix (--mode instance), rows aligned with the output rows.",
)
@click.option("--classes", help="Keep only these true classes and relabel them, e.g. 5-9.")
@click.option("--subset", type=int, help="Seeded random subset of this many rows.")
@click.option(
    "--normalize",
    type=click.Choice([m.value for m in NormalizeMode]),
    default="none",
    show_default=True,
    help="Feature normalisation applied before writing.",
)
@click.option("--seed", type=SEED, default=0, show_default=True)
@click.option("-o", "--output", required=True, help="PLL-CSV file to write (.gz compresses).")
@click.pass_context
@report_errors
def corrupt(ctx, data, idx_images, idx_labels, mode, extra, q, scores, classes, subset, normalize, seed, output):
    """Build candidate sets around known true labels and write PLL-CSV.

    \b
    * fixed: true label plus exactly EXTRA uniformly drawn distractors
    * bernoulli: every other label joins independently with probability Q
    * instance: label j joins with probability clamp(SCORES[i][j], 0, 1)
    * complementary: every label except one uniformly drawn wrong label
    * none: singleton sets (ordinary labels)

    A manifest is written next to the output as OUTPUT.manifest.json.
    """
    mode = CorruptionMode(mode)
    given = {"extra": extra is not None, "q": q is not None, "scores": scores is not None}
    for name, present in given.items():
        if present and MODE_PARAMS.get(mode) != name:
            raise click.UsageError(f"--{name} conflicts with --mode {mode.value}")
    if mode in MODE_PARAMS and not given[MODE_PARAMS[mode]]:
        raise click.UsageError(f"--mode {mode.value} needs --{MODE_PARAMS[mode]}")

    output = resolve_output(output)
    RunManifest.build("corrupt", ctx.params, [data, idx_images, idx_labels, scores]).write(output + ".manifest.json")

    dataset = load_dataset(data, idx_images, idx_labels)
    if not dataset.has_true_labels:
        raise ValidationError("corruption needs a known true label on every row")
    if classes:
        dataset = select_classes(dataset, parse_int_list(classes))
    if subset is not None:
        dataset = subsample(dataset, subset, seed)

    spec = CorruptionSpec(
        mode,
        seed=seed,
        extra_count=extra,
        flip_prob=q,
        scores=_load_scores(scores) if scores else None,
    )
    candidates = corrupt_labels(dataset.true_labels, dataset.num_classes, spec)
    dataset.candidates = candidates
    dataset.corruption = spec.describe()
    dataset.validate()
    dataset = normalize_features(dataset, NormalizeMode(normalize))

    save_pll_csv(dataset, output)
    click.echo(
        f"wrote {len(dataset)} rows, k={dataset.num_classes}, corruption={dataset.corruption}, "
        f"avg |S|={average_candidate_count(dataset):.4f} to {output}"
    )
