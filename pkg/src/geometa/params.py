"""Text serialization of learned (U, V, B) parameters.

Layout::

    geometa-params 1
    {"d": ..., "source_x": ..., ...}      <- one-line JSON header
    U
    <d rows of d floats>
    V
    ...
    B
    ...

Floats are written with 17 significant digits so a reload is exact.
"""

from __future__ import annotations

import json
import os
from typing import Any

import numpy as np

from .errors import DataError, ManifoldError
from .manifold import ProductPoint

MAGIC = "geometa-params"
VERSION = 1


def format_params(point: ProductPoint, header: dict[str, Any]) -> str:
    head = {"format_version": VERSION, "d": point.dim, **header}
    lines = [f"{MAGIC} {VERSION}", json.dumps(head, sort_keys=True)]
    for name, mat in (("U", point.u), ("V", point.v), ("B", point.b)):
        lines.append(name)
        lines.extend(" ".join(f"{x:.17g}" for x in row) for row in mat)
    return "\n".join(lines) + "\n"


def parse_params(text: str, source: str = "<params>") -> tuple[ProductPoint, dict[str, Any]]:
    lines = text.splitlines()
    if not lines or lines[0].split() != [MAGIC, str(VERSION)]:
        raise DataError(f"{source}: not a {MAGIC} v{VERSION} file")
    try:
        header = json.loads(lines[1])
        d = int(header["d"])
    except (IndexError, ValueError, KeyError, TypeError):
        raise DataError(f"{source}: malformed header") from None
    if d < 1 or len(lines) != 2 + 3 * (d + 1):
        raise DataError(f"{source}: expected three {d}x{d} matrices")

    mats = {}
    pos = 2
    for name in ("U", "V", "B"):
        if lines[pos].strip() != name:
            raise DataError(f"{source}: expected section {name!r}, found {lines[pos]!r}")
        try:
            mat = np.array([[float(v) for v in line.split()] for line in lines[pos + 1:pos + 1 + d]])
        except ValueError:
            raise DataError(f"{source}: unparseable number in {name}") from None
        if mat.shape != (d, d):
            raise DataError(f"{source}: {name} is not {d}x{d}")
        mats[name] = mat
        pos += d + 1
    try:
        point = ProductPoint(mats["U"], mats["V"], mats["B"])
    except ManifoldError as exc:
        raise DataError(f"{source}: infeasible parameters ({exc})") from None
    return point, header


def save_params(path: str | os.PathLike, point: ProductPoint, header: dict[str, Any]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_params(point, header))


def load_params(path: str | os.PathLike) -> tuple[ProductPoint, dict[str, Any]]:
    with open(path, encoding="utf-8") as fh:
        return parse_params(fh.read(), str(path))
