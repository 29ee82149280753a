"""Reachability checking for dynamic parametric processes."""

import json

from ._dpp import (
    DppError,
    FragmentMismatch,
    NotFlat,
    ParseError,
    Process,
    ResourceExceeded,
    ValidationError,
    encode_sat,
    flatten,
    levels,
    load,
    oracle,
    parse,
)
from ._dpp import check_json as _check_json

__all__ = [
    "DppError",
    "FragmentMismatch",
    "NotFlat",
    "ParseError",
    "Process",
    "ResourceExceeded",
    "ValidationError",
    "check",
    "encode_sat",
    "flatten",
    "levels",
    "load",
    "oracle",
    "parse",
]


def check(process, algorithm="auto", *, validate=True, strict=False, max_levels=64, emit_witness=False):
    """Decide reachability of the target value; returns the JSON report as a dict."""
    return json.loads(_check_json(process, algorithm, validate, strict, max_levels, emit_witness))
