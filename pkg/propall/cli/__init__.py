# -*- coding: utf-8 -*-
#
# Copyright 2024 ProPaLL Developers
#
# Licensed under the Apache License, Version 2.0, <LICENSE-APACHE or
# http://apache.org/licenses/LICENSE-2.0> or the MIT license <LICENSE-MIT or
# http://opensource.org/licenses/MIT>, at your option. This file may not be
# copied, modified, or distributed except according to those terms.

import click

from .. import __version__
from . import ablate, corrupt, eval, gradcheck, train
from ._config import configure_logging, read_config_file


@click.group()
@click.option(
    "--config",
    "config_path",
    envvar="PROPALL_CONFIG",
    type=click.Path(exists=True, dir_okay=False),
    help="key = value file supplying option defaults; flags still win.",
)
@click.option(
    "--log-level",
    envvar="PROPALL_LOG_LEVEL",
    default="WARNING",
    show_default=True,
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
)
@click.pass_context
def propall_cli(ctx, config_path, log_level):
    configure_logging(log_level)
    if config_path:
        ctx.default_map = read_config_file(config_path, propall_cli)


propall_cli.add_command(corrupt.corrupt)
propall_cli.add_command(train.train)
propall_cli.add_command(eval.eval_cmd)
propall_cli.add_command(gradcheck.gradcheck)
propall_cli.add_command(ablate.ablate)


@click.command()
def version():
    """Version of the propall library and tool."""
    click.echo(__version__)


propall_cli.add_command(version)
