import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cursedeq import games
from cursedeq.partition import coarsest_valid_partition


@pytest.fixture(scope="session")
def paper():
    """All bundled paper games with their coarse partitions."""
    out = {}
    for name, maker in games.EXAMPLE_GAMES.items():
        tree = maker()
        out[name] = (tree, coarsest_valid_partition(tree))
    return out
