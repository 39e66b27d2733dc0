import numpy as np
import pytest
from hypothesis import settings

from aqolab.corpus import verification_corpus

settings.register_profile("ci", max_examples=50, deadline=None)
settings.load_profile("ci")


@pytest.fixture(scope="session")
def corpus():
    return verification_corpus()


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(1234)
