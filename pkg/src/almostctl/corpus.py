"""Locating and loading the shipped object corpus."""

from __future__ import annotations

import os
from pathlib import Path

from .ground import DEFAULT_RING, RingSpec
from .objfile import ObjectTable, parse_objects

ENV_VAR = "ALMOSTCTL_CORPUS"


def default_corpus_dir() -> Path:
    return Path(__file__).resolve().parent / "corpus"


def corpus_dir(explicit: str | os.PathLike | None = None) -> Path:
    if explicit:
        return Path(explicit)
    env = os.environ.get(ENV_VAR)
    return Path(env) if env else default_corpus_dir()


def load_corpus(ring: RingSpec = DEFAULT_RING, path=None) -> ObjectTable:
    return parse_objects(corpus_dir(path), ring)
