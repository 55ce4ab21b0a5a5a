"""Linear-optical elements and photon-counting measurements on :class:`FockState`.

Beam-splitter convention: on annihilation operators the 50:50 splitter acts as
``a -> (a - i b)/sqrt(2)``, ``b -> (-i a + b)/sqrt(2)``. States transform through
the induced creation-operator map

    a* -> (a* + i b*)/sqrt(2),    b* -> (i a* + b*)/sqrt(2)

which is what :func:`apply_beam_splitter` implements.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable

from .fock import (
    FockState,
    Occupation,
    _check_mode,
    prune,
    require_normalized,
)

__all__ = [
    "DetectionBranch",
    "LossyAcceptResult",
    "apply_beam_splitter",
    "apply_phase_shift",
    "lossy_no_click_accept",
    "measure_branches",
    "project_vacuum",
]


@dataclass(frozen=True)
class DetectionBranch:
    """One outcome of a photon-counting measurement.

    ``post_state`` keeps the measured modes in place with occupation 0.
    """

    detected: Occupation
    weight: float
    post_state: FockState

    @property
    def total(self) -> int:
        return sum(self.detected)

    def to_dict(self) -> dict:
        return {
            "detected": list(self.detected),
            "weight": self.weight,
            "post_state": self.post_state.to_dict(),
        }


@dataclass(frozen=True)
class LossyAcceptResult:
    """No-click acceptance probability split by how many photons were actually absorbed.

    ``corrupt_weights[j]`` is the probability that ``j > 0`` photons hit the
    detectors and none of them registered.
    """

    accept_prob: float
    true_weight: float
    corrupt_weights: dict[int, float] = field(default_factory=dict)
    eta: float = 1.0

    @property
    def false_accept_fraction(self) -> float:
        if self.accept_prob == 0:
            return 0.0
        return math.fsum(self.corrupt_weights.values()) / self.accept_prob

    def to_dict(self) -> dict:
        return {
            "accept_prob": self.accept_prob,
            "true_weight": self.true_weight,
            "corrupt_weights": {str(k): v for k, v in sorted(self.corrupt_weights.items())},
            "eta": self.eta,
            "false_accept_fraction": self.false_accept_fraction,
        }


@lru_cache(maxsize=4096)
def _splitter_table(ni: int, nj: int) -> tuple[tuple[int, complex], ...]:
    """Output amplitudes of ``|ni, nj>`` through the splitter, as ``(p, amp)`` for ``|p, n-p>``."""
    n = ni + nj
    # exact Gaussian-integer accumulation; cancellations here are large for big n
    re = [0] * (n + 1)
    im = [0] * (n + 1)
    for k in range(ni + 1):
        ck = math.comb(ni, k)
        for l in range(nj + 1):
            # (a*+ib*)^ni contributes a*^k (i b*)^(ni-k); (ia*+b*)^nj contributes (i a*)^l b*^(nj-l)
            c = ck * math.comb(nj, l)
            q = (ni - k + l) % 4
            if q == 0:
                re[k + l] += c
            elif q == 1:
                im[k + l] += c
            elif q == 2:
                re[k + l] -= c
            else:
                im[k + l] -= c
    norm_in = math.factorial(ni) * math.factorial(nj)
    out = []
    for p in range(n + 1):
        if re[p] == 0 and im[p] == 0:
            continue
        scale = math.sqrt(math.factorial(p) * math.factorial(n - p) / norm_in) / 2 ** (n / 2)
        out.append((p, complex(re[p] * scale, im[p] * scale)))
    return tuple(out)


def apply_beam_splitter(state: FockState, i: int, j: int) -> FockState:
    """50:50 beam splitter between modes ``i`` and ``j`` (``i`` plays the role of ``a``)."""
    _check_mode(state, i)
    _check_mode(state, j)
    if i == j:
        raise ValueError("beam splitter needs two distinct modes")
    out: dict[Occupation, complex] = {}
    for occ, amp in state.terms.items():
        base = list(occ)
        n = occ[i] + occ[j]
        for p, c in _splitter_table(occ[i], occ[j]):
            base[i] = p
            base[j] = n - p
            key = tuple(base)
            out[key] = out.get(key, 0j) + amp * c
    return prune(FockState._trusted(state.num_modes, out, state.prune_tolerance))


def apply_phase_shift(state: FockState, i: int, theta: float) -> FockState:
    """Multiply each term by ``exp(i*theta*n_i)``."""
    _check_mode(state, i)
    out = {occ: amp * cmath.exp(1j * theta * occ[i]) for occ, amp in state.terms.items()}
    return prune(FockState._trusted(state.num_modes, out, state.prune_tolerance))


def _validated_modes(state: FockState, modes: Iterable[int]) -> tuple[int, ...]:
    modes = tuple(modes)
    if len(set(modes)) != len(modes):
        raise ValueError(f"modes must be distinct, got {modes}")
    for m in modes:
        _check_mode(state, m)
    return modes


def measure_branches(state: FockState, modes: Iterable[int]) -> list[DetectionBranch]:
    """Photon-number-resolving measurement of ``modes``.

    Returns every outcome with nonzero weight, ordered by detected tuple.
    """
    modes = _validated_modes(state, modes)
    require_normalized(state)
    grouped: dict[Occupation, dict[Occupation, complex]] = {}
    for occ, amp in state.terms.items():
        detected = tuple(occ[m] for m in modes)
        rest = list(occ)
        for m in modes:
            rest[m] = 0
        grouped.setdefault(detected, {})[tuple(rest)] = amp
    branches = []
    for detected in sorted(grouped):
        terms = grouped[detected]
        weight = math.fsum(abs(a) ** 2 for a in terms.values())
        scale = 1 / math.sqrt(weight)
        post = FockState._trusted(
            state.num_modes, {k: a * scale for k, a in terms.items()}, state.prune_tolerance
        )
        branches.append(DetectionBranch(detected, weight, post))
    return branches


def project_vacuum(state: FockState, modes: Iterable[int]) -> tuple[float, FockState]:
    """Post-select on zero photons in every listed mode.

    Returns ``(probability, normalized post-selected state)``; the state is
    empty when the probability is zero.
    """
    modes = _validated_modes(state, modes)
    require_normalized(state)
    kept = {occ: amp for occ, amp in state.terms.items() if all(occ[m] == 0 for m in modes)}
    prob = math.fsum(abs(a) ** 2 for a in kept.values())
    if prob == 0:
        return 0.0, FockState._trusted(state.num_modes, {}, state.prune_tolerance)
    scale = 1 / math.sqrt(prob)
    post = FockState._trusted(
        state.num_modes, {k: a * scale for k, a in kept.items()}, state.prune_tolerance
    )
    return prob, post


def lossy_no_click_accept(state: FockState, modes: Iterable[int], eta: float) -> LossyAcceptResult:
    """Probability that inefficient detectors on ``modes`` all stay silent.

    Each absorbed photon is missed independently with probability ``1 - eta``,
    so a branch with ``j`` photons in total is accepted with ``(1 - eta)**j``.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    by_total: dict[int, list[float]] = {}
    for branch in measure_branches(state, modes):
        by_total.setdefault(branch.total, []).append(branch.weight)
    miss = 1.0 - eta
    true_weight = math.fsum(by_total.get(0, []))
    corrupt = {}
    for j, weights in sorted(by_total.items()):
        if j == 0:
            continue
        w = math.fsum(weights) * miss**j
        if w > 0:
            corrupt[j] = w
    accept = true_weight + math.fsum(corrupt.values())
    return LossyAcceptResult(accept, true_weight, corrupt, eta)
