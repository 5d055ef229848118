import functools
import logging
import os
import sys

import click

from ..exceptions import ProPaLLError

EXIT_VALIDATION = 3
EXIT_ORACLE_FAILURE = 4

OUTPUT_DIR_ENV = "PROPALL_OUTPUT_DIR"

MAX_SEED = 2**64 - 1
SEED = click.IntRange(0, MAX_SEED)


class ValidationFailed(click.ClickException):
    """Input or configuration rejected by the library."""

    exit_code = EXIT_VALIDATION


def report_errors(f):
    """Turn library errors into ``ValidationFailed`` (exit code 3)."""

    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except ProPaLLError as e:
            raise ValidationFailed(f"{type(e).__name__}: {e}") from e

    return wrapper


def read_config_file(path: str, group: click.Group) -> dict[str, dict[str, str]]:
    """Parse a flat ``key = value`` file into a click ``default_map``.

    ``lr = 0.05`` applies to every subcommand with an ``lr`` option,
    ``train.lr = 0.05`` to ``train`` only. Later lines win.
    """
    params = {
        name: {p.name for p in cmd.params if p.name}
        for name, cmd in group.commands.items()
    }
    default_map: dict[str, dict[str, str]] = {name: {} for name in params}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise click.UsageError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            key = key.replace("-", "_")
            if "." in key:
                command, key = key.split(".", 1)
                command = command.replace("_", "-")
                if command not in params or key not in params[command]:
                    raise click.UsageError(f"{path}:{lineno}: no option {key!r} on command {command!r}")
                default_map[command][key] = value
                continue
            targets = [name for name, names in params.items() if key in names]
            if not targets:
                raise click.UsageError(f"{path}:{lineno}: no command has an option {key!r}")
            for name in targets:
                default_map[name][key] = value
    return {name: values for name, values in default_map.items() if values}


def configure_logging(level: str) -> None:
    logging.basicConfig(
        level=getattr(logging, level.upper()),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def resolve_output(path: str) -> str:
    """Relative output paths land under ``$PROPALL_OUTPUT_DIR`` when it is set."""
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not os.path.isabs(path):
        return os.path.join(base, path)
    return path
