import numpy as np
import pytest
from hypothesis import settings, strategies as st

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@st.composite
def ball_point(draw, dim, max_norm=0.95):
    parts = draw(st.lists(st.floats(-1, 1), min_size=2 * dim, max_size=2 * dim))
    v = np.array(parts[:dim]) + 1j * np.array(parts[dim:])
    r = draw(st.floats(0, max_norm))
    n = np.linalg.norm(v)
    return v * (r / n) if n > 1e-6 else np.zeros(dim, dtype=complex)


@st.composite
def unit_vector(draw, dim):
    parts = draw(st.lists(st.floats(-1, 1), min_size=2 * dim, max_size=2 * dim))
    v = np.array(parts[:dim]) + 1j * np.array(parts[dim:])
    n = np.linalg.norm(v)
    if n < 1e-3:
        v = np.zeros(dim, dtype=complex)
        v[0] = 1.0
        return v
    return v / n


dims = st.sampled_from([1, 2, 3, 8])
