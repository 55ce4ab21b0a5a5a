"""Exact simulation and yield analysis of recursive photon-number cat-state (NOON) factories.

Submodules:

* :mod:`noonsim.fock` - sparse multimode Fock states
* :mod:`noonsim.optics` - beam splitters, phase shifters, photon counting
* :mod:`noonsim.catfactory` - cat constructors and the doubling merge
* :mod:`noonsim.analytics` - exact closed forms and asymptotics
* :mod:`noonsim.protocol` - Monte Carlo of the memory-pooled factory
* :mod:`noonsim.cli` - batch command line
"""

from .analytics import exact_naive_p, exact_p_tn, expected_pool_sequence, m1_estimate, yield_estimate
from .catfactory import apply_tn, make_cat, make_cat1_from_photon, make_cat2_hom, naive_cascade
from .fock import FockState, basis_state, fidelity, inner_product, norm_sq, vacuum
from .optics import apply_beam_splitter, apply_phase_shift, measure_branches, project_vacuum
from .protocol import ProtocolConfig, aggregate, run_many, run_protocol

__version__ = "0.1.0"

__all__ = [
    "FockState",
    "ProtocolConfig",
    "aggregate",
    "apply_beam_splitter",
    "apply_phase_shift",
    "apply_tn",
    "basis_state",
    "exact_naive_p",
    "exact_p_tn",
    "expected_pool_sequence",
    "fidelity",
    "inner_product",
    "m1_estimate",
    "make_cat",
    "make_cat1_from_photon",
    "make_cat2_hom",
    "measure_branches",
    "naive_cascade",
    "norm_sq",
    "project_vacuum",
    "run_many",
    "run_protocol",
    "vacuum",
    "yield_estimate",
]
