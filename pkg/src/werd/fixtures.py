"""Paths to the bundled example data (Buckwalter ASCII, terminal-safe).

One hypothesis/reference segment pair plus a three-pair variant table that
rewrites the hypothesis toward the reference; used by the docs and the tests.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path


def fixture_path(name: str) -> Path:
    with resources.as_file(resources.files("werd").joinpath("data", name)) as p:
        return Path(p)


SAMPLE_HYP = fixture_path("sample_hyp.tsv")
SAMPLE_REF = fixture_path("sample_ref.tsv")
SAMPLE_TABLE = fixture_path("sample_variants.tsv")
