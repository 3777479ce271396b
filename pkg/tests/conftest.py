import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from flagcert.enumeration import enumerate_flags
from flagcert.graphs import EMPTY_TYPE


@pytest.fixture(scope="session")
def zero_bases():
    """0-flag bases for sizes 1..7, shared across the suite."""
    return {n: enumerate_flags(EMPTY_TYPE, n) for n in range(1, 8)}
