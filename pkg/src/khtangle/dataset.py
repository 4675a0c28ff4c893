"""Shipped tangles and transcribed reference tables."""

from __future__ import annotations

import os
from fractions import Fraction
from pathlib import Path
from typing import Optional, Union

from .diagram import SuturedTangle, load_tangle

DATA_DIR = Path(__file__).with_name("data")

TANGLES = ("unknot", "trefoil", "figure8-h1", "figure8-h2", "torus-5-1", "torus-8-19")


def data_dir(override: Optional[Union[str, Path]] = None) -> Path:
    if override is not None:
        return Path(override)
    env = os.environ.get("KHTANGLE_DATA")
    return Path(env) if env else DATA_DIR


def tangle_path(name: str, root: Optional[Union[str, Path]] = None) -> Path:
    return data_dir(root) / f"{name}.tangle.json"


def load(name: str, root: Optional[Union[str, Path]] = None) -> SuturedTangle:
    return load_tangle(tangle_path(name, root))


def golden_path(name: str, root: Optional[Union[str, Path]] = None) -> Path:
    return data_dir(root) / "golden" / f"{name}.tsv"


def read_grid(path: Union[str, Path]) -> dict[tuple[int, int], int]:
    """Grid TSV (first row: column u values, first column: row labels) to {(u, row): dim}."""
    lines = [ln.rstrip("\n") for ln in Path(path).read_text().splitlines() if ln.strip()]
    header = lines[0].split("\t")[1:]
    cols = [int(x) for x in header]
    out = {}
    for ln in lines[1:]:
        cells = ln.split("\t")
        row = int(cells[0])
        for u, c in zip(cols, cells[1:]):
            if c not in (".", "0"):
                out[(u, row)] = int(c)
    return out


def read_rows(path: Union[str, Path]) -> list[tuple]:
    """Plain TSV with a header line; numbers parsed as Fractions when they contain '/'."""
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    out = []
    for ln in lines[1:]:
        out.append(tuple(Fraction(x) if "/" in x else int(x) for x in ln.split("\t")))
    return out
