"""Pytest configuration and shared fixtures."""
import os
import tempfile

import numpy as np
import pytest


@pytest.fixture
def temp_db():
    """Temporary sqlite file for the form store."""
    fd, path = tempfile.mkstemp(suffix='.db')
    os.close(fd)
    yield path
    if os.path.exists(path):
        os.unlink(path)


@pytest.fixture
def rng():
    """Seeded generator so random scenarios are reproducible."""
    return np.random.default_rng(20240601)


@pytest.fixture
def context():
    """Scratch dict carrying values between given/when/then steps."""
    return {}
