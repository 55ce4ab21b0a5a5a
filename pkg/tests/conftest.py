import random

import pytest
from hypothesis import strategies as st

from noonsim.fock import FockState


@st.composite
def sparse_states(draw, num_modes=None, max_photons=12, max_terms=8):
    """Random sparse states, not normalized, with at most ``max_photons`` per term."""
    m = draw(st.integers(1, 4)) if num_modes is None else num_modes
    per_mode = max_photons // m
    occ = st.tuples(*[st.integers(0, per_mode)] * m)
    part = st.floats(-2.0, 2.0, allow_nan=False)
    amp = st.builds(complex, part, part).filter(lambda z: abs(z) > 1e-3)
    terms = draw(st.dictionaries(occ, amp, min_size=1, max_size=max_terms))
    return FockState(m, terms)


def random_state(num_modes, total_photons, rng, n_terms=6):
    """Normalized random state with fixed total photon number."""
    terms = {}
    for _ in range(n_terms):
        cuts = sorted(rng.randint(0, total_photons) for _ in range(num_modes - 1))
        parts = [b - a for a, b in zip([0] + cuts, cuts + [total_photons])]
        terms[tuple(parts)] = complex(rng.gauss(0, 1), rng.gauss(0, 1))
    return FockState(num_modes, terms).normalized()


@pytest.fixture
def pyrng():
    return random.Random(20021022)
