"""Shared fixtures for homoconn tests."""

import os
import sys

import numpy as np
import pytest
from httpx import ASGITransport, AsyncClient

# Tests directory on the path for `helpers`
sys.path.insert(0, os.path.dirname(__file__))

from homoconn.lie_core import reductive_split


@pytest.fixture(params=["asyncio"])
def anyio_backend(request):
    """Run async tests with asyncio only (trio is not installed)."""
    return request.param


@pytest.fixture
def rng():
    """Seeded generator so every test draws the same samples."""
    return np.random.default_rng(2024)


@pytest.fixture(scope="session")
def s3_split():
    return reductive_split(1)


@pytest.fixture(scope="session")
def s5_split():
    return reductive_split(2)


@pytest.fixture(scope="session")
def s7_split():
    return reductive_split(3)


@pytest.fixture(scope="session")
def s9_split():
    return reductive_split(4)


def _create_test_app():
    """Create the FastAPI app exactly as served."""
    from homoconn.app import create_app

    return create_app()


@pytest.fixture
def test_app():
    return _create_test_app()


@pytest.fixture
async def async_client(test_app):
    """Async HTTP client wired to the test app."""
    transport = ASGITransport(app=test_app)
    async with AsyncClient(transport=transport, base_url="http://test") as client:
        yield client
