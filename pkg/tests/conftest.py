import pytest

from exactsic.exact import QuadField
from exactsic.exact.tower import TowerSpec


@pytest.fixture(scope="session")
def tower53():
    """The degree-24 tower over Q(sqrt(53)) used by the d=52 dataset,
    built by hand so the exact-arithmetic tests do not depend on the
    dataset loader."""
    K = QuadField(53)
    a = K.sqrt_gen()
    T = TowerSpec(K).extend("t1", [(3 * a - 23) / 2, 0])
    c0 = T.element(a + 1) - ((10 * a + 68) / 13) * T.gen("t1")
    T = T.extend("t2", [c0, 0])
    T = T.extend("t3", [T.element(25 * a - 27), T.from_rational(-78), T.zero()])
    T = T.extend("xi", [T.element(K.element(2) + a), T.zero()])
    return T
