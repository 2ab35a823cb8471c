"""Shared fixtures.

Every Groebner basis computed during the tests is re-verified against the
naive S-polynomial reduction oracle unless a test opts out explicitly.
"""

import os
import random

import pytest

from detcomp import groebner


@pytest.fixture(autouse=True)
def verify_all_bases():
    old = groebner.VERIFY_BASES
    groebner.VERIFY_BASES = True
    yield
    groebner.VERIFY_BASES = old


@pytest.fixture
def rng():
    return random.Random(20260819)


def stretch_enabled() -> bool:
    return os.environ.get("DETCOMP_STRETCH", "") == "1"


stretch = pytest.mark.skipif(
    not stretch_enabled(),
    reason="long-running check; set DETCOMP_STRETCH=1 to include it",
)
