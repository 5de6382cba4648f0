"""Shared fixtures: the standard space suite and a CLI runner."""
from __future__ import annotations

import contextlib
import io
import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))  # make `oracles` importable

# ten trees (n <= 60) and five median graphs (products, n <= 60)
SUITE_TREES = [
    "path:8",
    "path:33",
    "star:9",
    "regular:2,4",
    "regular:3,3",
    "random:20,seed=1",
    "random:40,seed=2",
    "random:60,seed=3",
    "bushy:trivalent_tree,3",
    "bushy:tripod_thickened,4",
]
SUITE_GRAPHS = [
    "product:path:4|path:4",
    "product:path:3|path:3|path:3",
    "product:path:5|star:4",
    "product:star:3|star:3",
    "product:path:2|path:29",
]
SUITE = SUITE_TREES + SUITE_GRAPHS


@pytest.fixture(scope="session")
def suite_spaces():
    from medianlab.specs import space_from_spec

    return {spec: space_from_spec(spec) for spec in SUITE}


def run_cli(argv: list[str]) -> tuple[int, str]:
    """Invoke the CLI in-process, returning (exit code, captured stdout)."""
    from medianlab.cli import main

    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(list(argv))
    return code, buf.getvalue()


@pytest.fixture()
def cli():
    return run_cli
