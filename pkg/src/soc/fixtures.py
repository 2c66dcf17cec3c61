"""Embedded example inputs, stored in the same JSON shape the CLI reads."""
from __future__ import annotations

import copy

import numpy as np

from .algebra import algebra_to_json, block_algebra, nogo_witness_pair, trivial_algebra
from .operad import operad_to_json, trivial_operad

_ALPHA = [[0, 1], [0, 0]]
_BETA = [[0, 0], [1, 0]]


def _block():
    z = np.zeros((2, 2))
    return algebra_to_json(block_algebra(z, _ALPHA, _BETA, z), "matrix_block")


def _broken_operad():
    d = operad_to_json(trivial_operad())
    d["units"]["*"] = [{"label": "id", "coeff": [2.0, 0.0]}]
    d["name"] = "broken"
    return d


def _builders():
    a, b = nogo_witness_pair()
    return {
        "block": _block(),
        "trivial": algebra_to_json(trivial_algebra(np.diag([1.0, 2.0])), "trivial"),
        "nogo-a": algebra_to_json(a, "nogo"),
        "nogo-b": algebra_to_json(b, "nogo"),
        "two-cycle": {
            "vertices": ["1", "2"],
            "edges": [{"from": "1", "to": "2", "weight": [2.0, 0.0], "label": "alpha"},
                      {"from": "2", "to": "1", "weight": [3.0, 0.0], "label": "beta"}],
        },
        "triangle": {
            "vertices": ["1", "2", "3"],
            "edges": [{"from": "1", "to": "2", "weight": [2.0, 0.0]},
                      {"from": "2", "to": "3", "weight": [3.0, 0.0]},
                      {"from": "3", "to": "1", "weight": [5.0, 0.0]}],
        },
        "broken-operad": _broken_operad(),
    }


_CACHE: dict = {}


def fixture(name: str) -> dict:
    if not _CACHE:
        _CACHE.update(_builders())
    if name not in _CACHE:
        raise KeyError(f"unknown fixture {name!r}; choose from {sorted(_CACHE)}")
    return copy.deepcopy(_CACHE[name])


def fixture_names() -> list:
    if not _CACHE:
        _CACHE.update(_builders())
    return sorted(_CACHE)
