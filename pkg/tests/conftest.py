import os

import pytest

from dedm import lfun
from dedm.fields import build_field

CACHE_DIR = os.path.join(os.path.dirname(os.path.dirname(__file__)),
                         ".zero-cache")

# deep enough for theorem3/splitting at T=10^4 (needs zeros to 2T + W)
ZERO_DEPTH = 20100.0


@pytest.fixture(scope="session")
def F4():
    return build_field(-4)


@pytest.fixture(scope="session")
def zero_tables(F4):
    """(zeta, Lchi) component zero tables, loaded from the on-disk cache
    or computed once per session."""
    return lfun.ensure_zero_cache(F4, ZERO_DEPTH, CACHE_DIR)


@pytest.fixture(scope="session")
def zeros_merged(zero_tables):
    return lfun.merge_tables(*zero_tables)
