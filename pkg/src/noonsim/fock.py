"""Sparse multimode bosonic Fock states.

A :class:`FockState` is a finite superposition of occupation-number basis
vectors ``|n_0, n_1, ..., n_{m-1}>`` stored as a hashed map from occupation
tuples to complex amplitudes. Nothing is ever densified, so a 4-mode state
carrying a few hundred photons costs only as many entries as it has nonzero
amplitudes.

All functions here are pure: they return new states and never mutate their
arguments.
"""

from __future__ import annotations

import json
import math
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

__all__ = [
    "DEFAULT_PRUNE_TOLERANCE",
    "FockState",
    "NormalizationError",
    "apply_creation",
    "basis_state",
    "empty",
    "fidelity",
    "inner_product",
    "norm_sq",
    "photon_number_distribution",
    "prune",
    "require_normalized",
    "superpose",
    "tensor",
    "vacuum",
]

DEFAULT_PRUNE_TOLERANCE = 1e-13

# relative slack allowed when an operation requires a normalized input
NORMALIZATION_TOLERANCE = 1e-9

Occupation = tuple[int, ...]


class NormalizationError(ValueError):
    """Raised when an operation requiring a normalized state receives one that is not."""


class FockState:
    """Immutable sparse superposition of Fock basis states.

    Args:
        num_modes: number of bosonic modes.
        terms: mapping from occupation tuples to amplitudes. Entries whose
            magnitude is below ``prune_tolerance`` are dropped.
        prune_tolerance: amplitude magnitude under which terms are discarded.
    """

    __slots__ = ("_num_modes", "_terms", "_prune_tolerance")

    def __init__(
        self,
        num_modes: int,
        terms: Mapping[Sequence[int], complex] | None = None,
        prune_tolerance: float = DEFAULT_PRUNE_TOLERANCE,
    ) -> None:
        if num_modes < 1:
            raise ValueError(f"num_modes must be >= 1, got {num_modes}")
        if prune_tolerance < 0:
            raise ValueError("prune_tolerance must be non-negative")
        clean: dict[Occupation, complex] = {}
        for occ, amp in (terms or {}).items():
            key = tuple(int(k) for k in occ)
            if len(key) != num_modes:
                raise ValueError(f"occupation {key} does not have {num_modes} modes")
            if any(k < 0 for k in key):
                raise ValueError(f"negative occupation in {key}")
            amp = complex(amp)
            if not (math.isfinite(amp.real) and math.isfinite(amp.imag)):
                raise ValueError(f"non-finite amplitude for {key}")
            if abs(amp) >= prune_tolerance and amp != 0:
                clean[key] = amp
        self._num_modes = int(num_modes)
        self._terms = clean
        self._prune_tolerance = float(prune_tolerance)

    @classmethod
    def _trusted(cls, num_modes: int, terms: dict, prune_tolerance: float) -> "FockState":
        # skips validation; callers guarantee keys/amplitudes are well formed and pruned
        obj = cls.__new__(cls)
        obj._num_modes = num_modes
        obj._terms = terms
        obj._prune_tolerance = prune_tolerance
        return obj

    @property
    def num_modes(self) -> int:
        return self._num_modes

    @property
    def terms(self) -> Mapping[Occupation, complex]:
        return MappingProxyType(self._terms)

    @property
    def prune_tolerance(self) -> float:
        return self._prune_tolerance

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms.items())

    def __getitem__(self, occ: Sequence[int]) -> complex:
        return self._terms.get(tuple(occ), 0j)

    def __repr__(self) -> str:
        shown = ", ".join(f"{occ}: {amp:.6g}" for occ, amp in sorted(self._terms.items())[:6])
        more = ", ..." if len(self._terms) > 6 else ""
        return f"FockState({self._num_modes} modes, {{{shown}{more}}})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FockState):
            return NotImplemented
        return self._num_modes == other._num_modes and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self._num_modes, frozenset(self._terms.items())))

    def photon_numbers(self) -> set[int]:
        """Total photon numbers present in the support."""
        return {sum(occ) for occ in self._terms}

    def is_close(self, other: "FockState", atol: float = 1e-12) -> bool:
        """Termwise comparison with absolute tolerance on each amplitude."""
        if self._num_modes != other._num_modes:
            return False
        keys = self._terms.keys() | other._terms.keys()
        return all(abs(self[k] - other[k]) <= atol for k in keys)

    def scaled(self, factor: complex) -> "FockState":
        return superpose(self, factor, empty(self._num_modes), 0)

    def normalized(self) -> "FockState":
        n = norm_sq(self)
        if n == 0:
            raise ValueError("cannot normalize the zero state")
        return self.scaled(1 / math.sqrt(n))

    def to_dict(self) -> dict:
        """JSON-ready dict with terms in lexicographic occupation order."""
        return {
            "num_modes": self._num_modes,
            "terms": [
                {"occ": list(occ), "re": amp.real, "im": amp.imag}
                for occ, amp in sorted(self._terms.items())
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: Mapping, prune_tolerance: float = DEFAULT_PRUNE_TOLERANCE) -> "FockState":
        terms = {tuple(t["occ"]): complex(t["re"], t["im"]) for t in data["terms"]}
        return cls(int(data["num_modes"]), terms, prune_tolerance)

    @classmethod
    def from_json(cls, text: str, prune_tolerance: float = DEFAULT_PRUNE_TOLERANCE) -> "FockState":
        return cls.from_dict(json.loads(text), prune_tolerance)


def _check_mode(state: FockState, mode: int) -> None:
    if not 0 <= mode < state.num_modes:
        raise IndexError(f"mode {mode} out of range for a {state.num_modes}-mode state")


def _check_same_modes(s1: FockState, s2: FockState) -> None:
    if s1.num_modes != s2.num_modes:
        raise ValueError(f"mode-count mismatch: {s1.num_modes} vs {s2.num_modes}")


def require_normalized(state: FockState, tol: float = NORMALIZATION_TOLERANCE) -> None:
    """Raise :class:`NormalizationError` unless ``norm_sq(state)`` is 1 within ``tol``."""
    n = norm_sq(state)
    if abs(n - 1.0) > tol:
        raise NormalizationError(f"state is not normalized (norm_sq = {n!r})")


def empty(num_modes: int, prune_tolerance: float = DEFAULT_PRUNE_TOLERANCE) -> FockState:
    """The zero vector on ``num_modes`` modes."""
    return FockState(num_modes, {}, prune_tolerance)


def vacuum(num_modes: int) -> FockState:
    """``|0, ..., 0>`` on ``num_modes`` modes."""
    if num_modes < 1:
        raise ValueError(f"num_modes must be >= 1, got {num_modes}")
    return FockState(num_modes, {(0,) * num_modes: 1.0})


def basis_state(occupation: Sequence[int], amplitude: complex = 1.0) -> FockState:
    """Single occupation-number basis vector, e.g. ``basis_state((2, 0))`` is ``|2,0>``."""
    return FockState(len(occupation), {tuple(occupation): amplitude})


def prune(state: FockState, tolerance: float | None = None) -> FockState:
    """Drop terms whose amplitude magnitude is below ``tolerance``."""
    tol = state.prune_tolerance if tolerance is None else tolerance
    kept = {occ: amp for occ, amp in state.terms.items() if abs(amp) >= tol}
    return FockState._trusted(state.num_modes, kept, state.prune_tolerance)


def apply_creation(state: FockState, mode: int, power: int = 1) -> FockState:
    """Apply ``(a_mode^dagger)^power``.

    Each term ``|..., n, ...>`` picks up ``sqrt((n+power)!/n!)`` and moves to
    ``|..., n+power, ...>``. The result is not normalized.
    """
    _check_mode(state, mode)
    if power < 1:
        raise ValueError(f"power must be a positive integer, got {power}")
    out: dict[Occupation, complex] = {}
    for occ, amp in state.terms.items():
        n = occ[mode]
        factor = math.sqrt(math.factorial(n + power) / math.factorial(n))
        new = occ[:mode] + (n + power,) + occ[mode + 1 :]
        out[new] = amp * factor
    return prune(FockState._trusted(state.num_modes, out, state.prune_tolerance))


def superpose(s1: FockState, c1: complex, s2: FockState, c2: complex) -> FockState:
    """Linear combination ``c1*s1 + c2*s2``; cancelled terms are pruned."""
    _check_same_modes(s1, s2)
    out: dict[Occupation, complex] = {}
    if c1 != 0:
        for occ, amp in s1.terms.items():
            out[occ] = c1 * amp
    if c2 != 0:
        for occ, amp in s2.terms.items():
            out[occ] = out.get(occ, 0j) + c2 * amp
    tol = min(s1.prune_tolerance, s2.prune_tolerance)
    return prune(FockState._trusted(s1.num_modes, out, tol))


def tensor(s1: FockState, s2: FockState) -> FockState:
    """Tensor product; the modes of ``s2`` are appended after those of ``s1``."""
    out = {o1 + o2: a1 * a2 for o1, a1 in s1.terms.items() for o2, a2 in s2.terms.items()}
    tol = min(s1.prune_tolerance, s2.prune_tolerance)
    return prune(FockState._trusted(s1.num_modes + s2.num_modes, out, tol))


def inner_product(s1: FockState, s2: FockState) -> complex:
    """``<s1|s2>``, antilinear in the first argument."""
    _check_same_modes(s1, s2)
    small, large, conj_small = (s1, s2, True) if len(s1) <= len(s2) else (s2, s1, False)
    total = 0j
    for occ, amp in small.terms.items():
        other = large.terms.get(occ)
        if other is not None:
            total += amp.conjugate() * other if conj_small else other.conjugate() * amp
    return total


def norm_sq(state: FockState) -> float:
    return math.fsum(abs(a) ** 2 for a in state.terms.values())


def fidelity(target: FockState, state: FockState) -> float:
    """``|<target|state>|^2``; insensitive to global phase."""
    return abs(inner_product(target, state)) ** 2


def photon_number_distribution(
    state: FockState, modes: Iterable[int]
) -> dict[Occupation, float]:
    """Joint photon-count distribution over the listed modes.

    Returns a map from occupation tuples (ordered as ``modes``) to probability.
    The input must be normalized; an unnormalized state raises
    :class:`NormalizationError` rather than being silently rescaled.
    """
    modes = tuple(modes)
    if len(set(modes)) != len(modes):
        raise ValueError(f"modes must be distinct, got {modes}")
    for m in modes:
        _check_mode(state, m)
    require_normalized(state)
    buckets: dict[Occupation, list[float]] = {}
    for occ, amp in state.terms.items():
        buckets.setdefault(tuple(occ[m] for m in modes), []).append(abs(amp) ** 2)
    return {k: math.fsum(v) for k, v in sorted(buckets.items())}

