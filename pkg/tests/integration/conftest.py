"""
Fixtures for command-line integration tests.
"""

import logging

import pytest


@pytest.fixture(autouse=True)
def restore_logging():
    """The CLI reinstalls root handlers on captured streams; put the originals back."""
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)
