import enum
import json
import os
from dataclasses import asdict, dataclass
from typing import Any

from .. import __version__
from ..helpers import file_digest, write_bytes


@dataclass
class RunManifest:
    """What a command was run with: resolved options, seed, input digests, version.

    Written before any work starts and free of timestamps, so identical
    invocations produce identical manifests.
    """

    command: str
    config: dict[str, Any]
    seed: int | None
    inputs: dict[str, str]
    version: str

    @classmethod
    def build(cls, command: str, params: dict[str, Any], input_paths: list[str]) -> "RunManifest":
        config = {key: _plain(value) for key, value in sorted(params.items())}
        seed = params.get("seed")
        inputs = {path: file_digest(path) for path in input_paths if path}
        return cls(command, config, seed, inputs, __version__)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"

    def write(self, path: str) -> None:
        write_bytes(path, self.to_json().encode("utf-8"))

    def changed_inputs(self) -> list[str]:
        """Inputs whose current digest differs from the recorded one (or that vanished)."""
        changed = []
        for path, digest in self.inputs.items():
            if not os.path.exists(path) or file_digest(path) != digest:
                changed.append(path)
        return changed

    @classmethod
    def read(cls, path: str) -> "RunManifest":
        with open(path, encoding="utf-8") as fh:
            return cls(**json.load(fh))


def _plain(value: Any) -> Any:
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if value is None or isinstance(value, (bool, int, float, str)):
        return value
    return str(value)
