import pathlib

import numpy as np
import pytest

from polyhiggs import hyperpolygon as hp

DATA = pathlib.Path(__file__).resolve().parent.parent / "data"


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def example_path():
    return DATA / "example_n4.json"


@pytest.fixture
def invalid_path():
    return DATA / "invalid_n4.json"


@pytest.fixture
def example_rep(example_path):
    rep, beta = hp.load_json(example_path)
    return rep, hp.BetaWeights(tuple(beta))


def generic_beta(rng, n):
    """Weights bounded away from every stability wall."""
    while True:
        b = rng.uniform(0.2, 1.5, size=n)
        walls = [
            abs(sum(s * bi for s, bi in zip(signs, b)))
            for signs in _sign_patterns(n)
        ]
        if min(walls) > 1e-3:
            return b


def _sign_patterns(n):
    for mask in range(2**n):
        yield [1 if mask >> i & 1 else -1 for i in range(n)]
