import pytest

from boundary_lacunas.atlas import census
from boundary_lacunas.families import parse_class

PLANAR_CLASSES = (
    [parse_class(f, k, s) for f in "BC" for k in range(2, 8) for s in "+-"]
    + [parse_class("F4", None, s) for s in "+-"]
)


@pytest.fixture(scope="session")
def censuses():
    """Census for every planar class, seed 1."""
    return {cls.label: census(cls, seed=1) for cls in PLANAR_CLASSES}
