"""Cat-state constructors, the photon-number doubling merge, and the memoryless cascade.

Mode layout is fixed: a merge acts on modes ``(a, b, c, d) = (0, 1, 2, 3)``
where ``(a, b)`` hold the first input cat and ``(c, d)`` the second. Modes
``c`` and ``d`` are the heralding modes; they are measured and left at zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import analytics
from .fock import (
    FockState,
    basis_state,
    fidelity,
    norm_sq,
    require_normalized,
    tensor,
)
from .optics import (
    apply_beam_splitter,
    apply_phase_shift,
    lossy_no_click_accept,
    measure_branches,
    project_vacuum,
)

__all__ = [
    "A",
    "B",
    "C",
    "D",
    "CascadeResult",
    "CatSpec",
    "TnOutcome",
    "apply_tn",
    "make_cat",
    "make_cat1_from_photon",
    "make_cat2_hom",
    "merge_lossy_accept",
    "merge_input_state",
    "naive_cascade",
    "naive_cascade_batch",
    "tn_branch_spectrum",
]

A, B, C, D = 0, 1, 2, 3
HERALD_MODES = (C, D)


@dataclass(frozen=True)
class CatSpec:
    n: int

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise ValueError(f"cat photon number must be a positive integer, got {self.n!r}")


@dataclass(frozen=True)
class TnOutcome:
    """Result of one merge of two 2-mode states.

    ``output_state`` is the normalized 2-mode state on ``(a, b)`` after a
    successful herald, or ``None`` if success is impossible.
    ``intermediate_state`` is the 4-mode state right before detection.
    """

    n_in: int
    success_prob: float
    output_state: FockState | None
    fidelity_to_target: float
    intermediate_state: FockState
    heralded_component: FockState


def _as_cat_spec(spec) -> CatSpec:
    return spec if isinstance(spec, CatSpec) else CatSpec(spec)


def make_cat(spec: CatSpec | int) -> FockState:
    """``(|n,0> + |0,n>)/sqrt(2)``."""
    n = _as_cat_spec(spec).n
    amp = 1 / math.sqrt(2)
    return FockState(2, {(n, 0): amp, (0, n): amp})


def make_cat1_from_photon() -> FockState:
    """One photon through the 50:50 splitter, then a -pi/2 phase on mode b to remove the ``i``."""
    state = apply_beam_splitter(basis_state((1, 0)), 0, 1)
    return apply_phase_shift(state, 1, -math.pi / 2)


def make_cat2_hom() -> FockState:
    """Two-photon cat from ``|1,1>`` via Hong-Ou-Mandel bunching.

    The splitter yields ``i(|2,0> + |0,2>)/sqrt(2)``; the global ``i`` is
    removed so the result equals :func:`make_cat` ``(2)`` exactly.
    """
    state = apply_beam_splitter(basis_state((1, 1)), 0, 1)
    return state.scaled(-1j)


def merge_input_state(left: FockState, right: FockState, n: int) -> FockState:
    """The 4-mode state right before photon counting on ``(c, d)``.

    Phase ``pi/n`` on ``d``, then splitters on ``(a, c)`` and ``(b, d)``.
    """
    state = tensor(left, right)
    state = apply_phase_shift(state, D, math.pi / n)
    state = apply_beam_splitter(state, A, C)
    return apply_beam_splitter(state, B, D)


def _restrict_to_ab(state: FockState) -> FockState:
    return FockState(2, {occ[:2]: amp for occ, amp in state.terms.items()}, state.prune_tolerance)


def apply_tn(left: FockState, right: FockState, n: int) -> TnOutcome:
    """Merge two 2-mode states into one with twice the photons, heralded on ``(c, d)`` vacuum.

    Inputs need not be exact cats; fidelity of the output to the ideal
    ``2n``-photon cat is reported either way.
    """
    if left.num_modes != 2 or right.num_modes != 2:
        raise ValueError("merge inputs must be 2-mode states")
    _as_cat_spec(n)
    require_normalized(left)
    require_normalized(right)

    intermediate = merge_input_state(left, right, n)
    prob, post = project_vacuum(intermediate, HERALD_MODES)
    heralded = FockState(
        4,
        {occ: amp for occ, amp in intermediate.terms.items() if occ[C] == 0 and occ[D] == 0},
    )
    if prob == 0:
        return TnOutcome(n, 0.0, None, 0.0, intermediate, heralded)
    output = apply_phase_shift(_restrict_to_ab(post), B, math.pi / (2 * n))
    fid = fidelity(make_cat(2 * n), output)
    return TnOutcome(n, prob, output, fid, intermediate, heralded)


def tn_branch_spectrum(n: int) -> dict[int, float]:
    """Distribution of the total photon count on ``(c, d)`` when merging two exact ``n``-cats."""
    intermediate = merge_input_state(make_cat(n), make_cat(n), n)
    spectrum: dict[int, float] = {}
    for branch in measure_branches(intermediate, HERALD_MODES):
        spectrum[branch.total] = spectrum.get(branch.total, 0.0) + branch.weight
    return dict(sorted(spectrum.items()))


def merge_lossy_accept(n: int, eta: float):
    """No-click acceptance of a merge of exact ``n``-cats with detector efficiency ``eta``."""
    intermediate = merge_input_state(make_cat(n), make_cat(n), n)
    return lossy_no_click_accept(intermediate, HERALD_MODES, eta)


@dataclass(frozen=True)
class CascadeResult:
    success: bool
    attempts: int
    singles: int
    failed_level: int | None = None


def _check_cascade_target(target_n: int) -> None:
    if not analytics.is_power_of_two(target_n) or target_n < 2:
        raise ValueError(f"cascade target must be a power of two >= 2, got {target_n!r}")


def _level_probs(target_n: int) -> list[tuple[int, float]]:
    levels = []
    n = 1
    while n < target_n:
        levels.append((n, float(analytics.exact_p_tn(n))))
        n *= 2
    return levels


def naive_cascade(target_n: int, rng: np.random.Generator) -> CascadeResult:
    """One all-or-nothing binary tree of merges from ``target_n`` single-photon cats.

    Every merge at a level runs in parallel; the first level with a failure
    ends the attempt. Merges are drawn as Bernoulli trials with the exact
    per-level success probability.
    """
    _check_cascade_target(target_n)
    attempts = 0
    for n, p in _level_probs(target_n):
        k = target_n // (2 * n)
        attempts += k
        if not bool(np.all(rng.random(k) < p)):
            return CascadeResult(False, attempts, target_n, n)
    return CascadeResult(True, attempts, target_n)


def naive_cascade_batch(target_n: int, runs: int, rng: np.random.Generator) -> np.ndarray:
    """Success flags of ``runs`` independent cascades, vectorized over runs."""
    _check_cascade_target(target_n)
    if runs < 1:
        raise ValueError("runs must be positive")
    alive = np.ones(runs, dtype=bool)
    for n, p in _level_probs(target_n):
        k = target_n // (2 * n)
        alive &= np.all(rng.random((runs, k)) < p, axis=1)
    return alive


def heralded_norm_identity(outcome: TnOutcome) -> float:
    """Squared norm of the unnormalized heralded component; equals ``success_prob``."""
    return norm_sq(outcome.heralded_component)

