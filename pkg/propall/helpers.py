# -*- coding: utf-8 -*-
#
# Copyright 2024 ProPaLL Developers
#
# Licensed under the Apache License, Version 2.0, <LICENSE-APACHE or
# http://apache.org/licenses/LICENSE-2.0> or the MIT license <LICENSE-MIT or
# http://opensource.org/licenses/MIT>, at your option. This file may not be
# copied, modified, or distributed except according to those terms.

import gzip
import hashlib
import io
import os

from .exceptions import ValidationError

GZIP_MAGIC = b"\x1f\x8b"


def read_bytes(path: str | os.PathLike) -> bytes:
    """Read a whole file, transparently inflating gzip content.

    Compression is detected from the magic bytes, not the file name.
    """
    with open(path, "rb") as fh:
        raw = fh.read()
    if raw[:2] == GZIP_MAGIC:
        return gzip.decompress(raw)
    return raw


def write_bytes(path: str | os.PathLike, data: bytes) -> None:
    """Write ``data``; paths ending in ``.gz`` are gzip-compressed with mtime 0."""
    if os.fspath(path).endswith(".gz"):
        buf = io.BytesIO()
        with gzip.GzipFile(fileobj=buf, mode="wb", mtime=0) as gz:
            gz.write(data)
        data = buf.getvalue()
    with open(path, "wb") as fh:
        fh.write(data)


def file_digest(path: str | os.PathLike) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def format_float(value: float) -> str:
    # shortest string that parses back to the same double
    return repr(float(value))


def parse_int_list(text: str) -> tuple[int, ...]:
    """Parse ``"784,300,10"`` (ranges such as ``"5-9"`` allowed)."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            if "-" in part[1:]:
                # first character may be a sign
                head, hi = part[1:].split("-", 1)
                out.extend(range(int(part[0] + head), int(hi) + 1))
            else:
                out.append(int(part))
        except ValueError:
            raise ValidationError(f"not an integer list: {text!r}") from None
    return tuple(out)
