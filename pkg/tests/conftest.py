import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

from mcbrot.algebra import Multicomplex

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

finite = st.floats(min_value=-10, max_value=10, allow_nan=False, allow_infinity=False)


@st.composite
def multicomplex(draw, order, bound=10.0):
    vals = st.floats(min_value=-bound, max_value=bound, allow_nan=False, allow_infinity=False)
    coeffs = draw(st.lists(vals, min_size=1 << order, max_size=1 << order))
    return Multicomplex(order, coeffs)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
