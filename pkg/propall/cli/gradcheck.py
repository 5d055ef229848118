import logging
import sys

import click

from .. import oracles
from ._config import EXIT_ORACLE_FAILURE, SEED

logger = logging.getLogger(__name__)


@click.command()
@click.option("--k", "max_k", type=int, default=12, show_default=True, help="Largest class count for the event-sum suite.")
@click.option("--trials", type=int, default=500, show_default=True, help="Random (p, S) pairs per k.")
@click.option("--grad-trials", type=int, default=1000, show_default=True, help="Random cases per gradient suite.")
@click.option("--singleton-trials", type=int, default=10_000, show_default=True)
@click.option("--fd-step", type=float, default=1e-5, show_default=True, help="Central-difference step.")
@click.option("--seed", type=SEED, default=0, show_default=True)
@click.option("--disable-stable-branch", is_flag=True, default=False, hidden=True)
def gradcheck(max_k, trials, grad_trials, singleton_trials, fd_step, seed, disable_stable_branch):
    """Check the loss kernels against brute-force and high-precision references.

    \b
    * event-sum: closed form against enumeration of all 2^k outcomes
    * gradient: analytic gradient against central differences, logits in
      [-30, 30] and [-60, 60]
    * stable-branch continuity around the -10 threshold, plus deep-negative
      spot checks
    * singleton reduction to binary cross-entropy

    Exits with code 4 when any suite fails.
    """
    if max_k < 2 or max_k > 24:
        raise click.BadParameter("must lie in 2..24", param_hint="--k")
    results = [
        oracles.event_sum_suite(max_k=max_k, trials=trials, seed=seed),
        oracles.gradient_suite(trials=grad_trials, logit_range=30.0, seed=seed, step=fd_step, tolerance=1e-5),
        oracles.gradient_suite(trials=grad_trials, logit_range=60.0, seed=seed + 1, step=fd_step, tolerance=1e-4),
        oracles.stable_branch_suite(stable=not disable_stable_branch),
        oracles.singleton_suite(trials=singleton_trials, seed=seed),
    ]
    for result in results:
        click.echo(result.describe())

    failed = [r.name for r in results if not r.passed]
    if failed:
        click.echo(f"{len(failed)} of {len(results)} suites failed: {', '.join(failed)}", err=True)
        sys.exit(EXIT_ORACLE_FAILURE)
    click.echo(f"all {len(results)} suites passed")
