"""Attack-trace search for cyber-physical plant models."""

import json
from pathlib import Path

from ._cpdy import (
    ReplayMismatch,
    ResourceError,
    SpecError,
    analyze,
    derivable,
    normalize_term,
    print_spec,
    validate,
)
from . import _cpdy

__all__ = [
    "ReplayMismatch",
    "ResourceError",
    "SpecError",
    "analyze",
    "check",
    "derivable",
    "normalize_term",
    "print_spec",
    "render",
    "replay",
    "validate",
]


def _source(spec):
    if isinstance(spec, Path):
        return spec.read_text()
    return spec


def check(spec, profile="cpdy", bound=64, workers=1):
    """Verdict as a dict; `spec` is DSL text or a Path."""
    return json.loads(_cpdy.check_json(_source(spec), profile, bound, workers))


def render(spec, profile="cpdy", bound=64):
    return _cpdy.check_text(_source(spec), profile, bound)


def replay(spec, verdict):
    """True if `verdict` (a dict from check) re-executes; raises ReplayMismatch otherwise."""
    return _cpdy.replay_json(_source(spec), json.dumps(verdict))
