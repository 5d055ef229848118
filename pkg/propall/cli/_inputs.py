import logging

import click

from ..datasets import PllDataset, load_idx_dataset, load_pll_csv

logger = logging.getLogger(__name__)


def dataset_options(prefix: str = ""):
    """``--<prefix>data`` or the ``--<prefix>idx-images``/``--<prefix>idx-labels`` pair."""
    what = "test " if prefix else ""

    def decorator(f):
        f = click.option(
            f"--{prefix}idx-labels",
            type=click.Path(exists=True, dir_okay=False),
            help=f"IDX label file of the {what}data (with --{prefix}idx-images).",
        )(f)
        f = click.option(
            f"--{prefix}idx-images",
            type=click.Path(exists=True, dir_okay=False),
            help=f"IDX image file of the {what}data.",
        )(f)
        f = click.option(
            f"--{prefix}data",
            type=click.Path(exists=True, dir_okay=False),
            help=f"PLL-CSV file of the {what}data.",
        )(f)
        return f

    return decorator


def load_dataset(
    data: str | None,
    idx_images: str | None,
    idx_labels: str | None,
    required: bool = True,
    what: str = "data",
    num_classes: int | None = None,
) -> PllDataset | None:
    if data and (idx_images or idx_labels):
        raise click.UsageError(f"give the {what} either as PLL-CSV or as an IDX pair, not both")
    if bool(idx_images) != bool(idx_labels):
        raise click.UsageError(f"IDX {what} needs both an image and a label file")
    if data:
        logger.info("loading %s from %s", what, data)
        return load_pll_csv(data)
    if idx_images:
        logger.info("loading %s from %s and %s", what, idx_images, idx_labels)
        return load_idx_dataset(idx_images, idx_labels, num_classes)
    if required:
        raise click.UsageError(f"no {what} given")
    return None
