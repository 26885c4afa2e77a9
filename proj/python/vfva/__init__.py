"""Exact formal calculus and finite vertex-structure checks."""

import json

from . import _core
from ._core import VfvaError

__all__ = ["VfvaError", "binom", "borcherds", "check_structure", "prove_identity", "run"]


def binom(n, k):
    return _core.binom(n, k)


def borcherds(k, unital=True):
    return json.loads(_core.borcherds(k, unital))


def check_structure(config, window=None, m_max=None):
    if not isinstance(config, str):
        config = json.dumps(config)
    return json.loads(_core.check_structure(config, window, m_max))


def prove_identity(which):
    return json.loads(_core.prove_identity(which))


def run(command, inputs=(), seed=0, count=100):
    return json.loads(_core.run(command, list(inputs), seed, count))
