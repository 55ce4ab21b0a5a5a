"""Exact closed forms and asymptotics for the recursive cat-state factory.

Every probability is built from big-integer factorials and returned as a
reduced :class:`fractions.Fraction`; floats are derived from these, never the
other way round.

Notation: ``p_tn(n)`` is the success probability of merging two ``n``-photon
cats into one ``2n``-photon cat; ``p_naive(N)`` is the all-or-nothing yield of
a memoryless binary tree of merges ending in an ``N``-photon cat; ``M_n`` is the
expected number of ``n``-photon cats the memory-pooled protocol must hold to
end with a prescribed number of target cats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

__all__ = [
    "ExactProbability",
    "ScalingReport",
    "baseline_scaling",
    "detection_spectrum",
    "exact_naive_p",
    "exact_naive_p_recurrence",
    "exact_p_tn",
    "expected_pool_sequence",
    "false_accept_fraction",
    "format_rational",
    "is_power_of_two",
    "lossy_accept_prob",
    "leak_prob_one",
    "leak_prob_two",
    "m1_estimate",
    "m1_exact",
    "merge_monomials",
    "naive_asymptotic",
    "parse_rational",
    "scaling_report",
    "stirling_p_tn",
    "total_detection_spectrum",
    "yield_estimate",
]

ExactProbability = Fraction

BASELINE_CONSTANTS = {
    "kok": math.sqrt(2) * math.e,
    "fiurasek": math.e,
}


@dataclass(frozen=True)
class ScalingReport:
    n: int
    exact: Fraction
    asymptotic: float

    @property
    def relative_error(self) -> float:
        return abs(self.asymptotic / float(self.exact) - 1.0)


def is_power_of_two(n: int) -> bool:
    return isinstance(n, int) and n >= 1 and n & (n - 1) == 0


def _require_positive(n: int) -> None:
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"photon number must be a positive integer, got {n!r}")


def _require_power_of_two(n: int) -> None:
    if not is_power_of_two(n):
        raise ValueError(f"{n!r} is not a power of two")


def format_rational(q: Fraction) -> str:
    """``"num/den"`` even for integers, so the column format never changes."""
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text: str) -> Fraction:
    num, den = text.split("/")
    return Fraction(int(num), int(den))


def exact_p_tn(n: int) -> Fraction:
    """``(2n)! / (2^(2n+1) (n!)^2)``."""
    _require_positive(n)
    return Fraction(math.factorial(2 * n), 2 ** (2 * n + 1) * math.factorial(n) ** 2)


def stirling_p_tn(n: int) -> float:
    """Leading-order approximation ``1/sqrt(4 pi n)`` of :func:`exact_p_tn`."""
    _require_positive(n)
    return 1.0 / math.sqrt(4 * math.pi * n)


def scaling_report(n: int) -> ScalingReport:
    return ScalingReport(n, exact_p_tn(n), stirling_p_tn(n))


def exact_naive_p(n: int) -> Fraction:
    """Closed form ``2 n! / (2n)^n`` of the memoryless cascade yield."""
    _require_power_of_two(n)
    return Fraction(2 * math.factorial(n), (2 * n) ** n)


def exact_naive_p_recurrence(n: int) -> Fraction:
    """Same quantity from ``p(2m) = p(m)^2 p_tn(m)`` with ``p(1) = 1``."""
    _require_power_of_two(n)
    p = Fraction(1)
    m = 1
    while m < n:
        p = p * p * exact_p_tn(m)
        m *= 2
    return p


def naive_asymptotic(n: int) -> float:
    """``sqrt(8 pi n) (2e)^(-n)``."""
    _require_positive(n)
    return math.sqrt(8 * math.pi * n) * math.exp(-n * math.log(2 * math.e))


def expected_pool_sequence(target_n: int, m_target: float = 1) -> list[tuple[int, float]]:
    """Back-solve ``M_2n = (M_n / 2) p_tn(n)`` from the target level down to level 1.

    Returns ``[(1, M_1), (2, M_2), ..., (target_n, m_target)]``. When
    ``m_target`` is a ``Fraction`` or an ``int`` the counts stay exact.
    """
    _require_power_of_two(target_n)
    if m_target <= 0:
        raise ValueError("m_target must be positive")
    m = m_target if isinstance(m_target, float) else Fraction(m_target)
    seq = [(target_n, m)]
    level = target_n
    while level > 1:
        level //= 2
        m = 2 * m / exact_p_tn(level)
        seq.append((level, m))
    return seq[::-1]


def m1_exact(target_n: int, m_target: float = 1):
    """``M_1`` from the exact recurrence."""
    return expected_pool_sequence(target_n, m_target)[0][1]


def m1_estimate(target_n: int, m_target: float = 1.0) -> float:
    """Asymptotic ``M_1 ~ (4 sqrt(pi))^log2(N) N^((log2(N) - 1)/4) M_N``."""
    _require_power_of_two(target_n)
    k = math.log2(target_n)
    return (4 * math.sqrt(math.pi)) ** k * target_n ** ((k - 1) / 4) * m_target


def yield_estimate(target_n: int) -> float:
    """Asymptotic yield ``(4 sqrt(pi))^(-log2 N) N^((1 - log2 N)/4)``, the reciprocal of :func:`m1_estimate`."""
    _require_power_of_two(target_n)
    k = math.log2(target_n)
    return (4 * math.sqrt(math.pi)) ** (-k) * target_n ** ((1 - k) / 4)


def leak_prob_one(n: int) -> Fraction:
    """``2n / 2^(2n)``: one photon in total reaches the two heralding detectors."""
    _require_positive(n)
    return Fraction(2 * n, 2 ** (2 * n))


def leak_prob_two(n: int) -> Fraction:
    """``(2n-2)! / (2^(2n+1) ((n-1)!)^2)``.

    This is the probability of exactly two photons landing in *one* given
    heralding mode with the other empty, i.e. the detection pattern ``(2, 0)``
    (equivalently ``(0, 2)``). The pattern ``(1, 1)`` never occurs, so the
    total two-photon leak is twice this value; see :func:`total_detection_spectrum`.
    """
    _require_positive(n)
    return Fraction(math.factorial(2 * n - 2), 2 ** (2 * n + 1) * math.factorial(n - 1) ** 2)


def _gauss_add(acc: dict, key, c: int, q: int) -> None:
    re, im = acc.get(key, (0, 0))
    q %= 4
    if q == 0:
        re += c
    elif q == 1:
        im += c
    elif q == 2:
        re -= c
    else:
        im -= c
    acc[key] = (re, im)


@lru_cache(maxsize=64)
def merge_monomials(n: int) -> dict[tuple[int, int, int, int], tuple[int, int]]:
    """Exact expansion of the merge circuit's 4-mode output before detection.

    The state is ``K [(a*+ic*)^n + (b*+id*)^n][(ia*+c*)^n - (ib*+d*)^n]|0>``
    with ``K = 1/(2^(n+1) n!)``. Returns the Gaussian-integer coefficient
    ``(re, im)`` of each monomial ``a*^p b*^q c*^r d*^s`` keyed by ``(p, q, r, s)``;
    multiply by ``K sqrt(p! q! r! s!)`` to get the Fock amplitude.
    """
    _require_positive(n)
    binom = [math.comb(n, k) for k in range(n + 1)]
    acc: dict = {}
    # (a+ic)^n (ia+c)^n: a^(k+l) c^(2n-k-l) with weight C(n,k)C(n,l) i^(n-k+l)
    for k in range(n + 1):
        for l in range(n + 1):
            c = binom[k] * binom[l]
            q = n - k + l
            _gauss_add(acc, (k + l, 0, 2 * n - k - l, 0), c, q)
            # -(b+id)^n (ib+d)^n is the same polynomial in (b, d) with a sign flip
            _gauss_add(acc, (0, k + l, 0, 2 * n - k - l), c, q + 2)
    # (b+id)^n (ia+c)^n - (a+ic)^n (ib+d)^n on a^p c^(n-p) b^q d^(n-q):
    # C(n,p) C(n,q) (i^(n-q+p) - i^(n-p+q))
    for p in range(n + 1):
        for q in range(n + 1):
            c = binom[p] * binom[q]
            key = (p, q, n - p, n - q)
            _gauss_add(acc, key, c, n - q + p)
            _gauss_add(acc, key, c, n - p + q + 2)
    return {k: v for k, v in acc.items() if v != (0, 0)}


@lru_cache(maxsize=64)
def _detection_spectrum(n: int) -> tuple[tuple[tuple[int, int], Fraction], ...]:
    denom = (2 ** (n + 1) * math.factorial(n)) ** 2
    out: dict[tuple[int, int], int] = {}
    for (p, q, r, s), (re, im) in merge_monomials(n).items():
        w = (re * re + im * im) * (
            math.factorial(p) * math.factorial(q) * math.factorial(r) * math.factorial(s)
        )
        out[(r, s)] = out.get((r, s), 0) + w
    return tuple((k, Fraction(v, denom)) for k, v in sorted(out.items()))


def detection_spectrum(n: int) -> dict[tuple[int, int], Fraction]:
    """Exact joint distribution of photon counts ``(c, d)`` at the heralding detectors."""
    _require_positive(n)
    return dict(_detection_spectrum(n))


def total_detection_spectrum(n: int) -> dict[int, Fraction]:
    """Exact distribution of the total photon count at the heralding detectors.

    Entry 0 equals :func:`exact_p_tn`, entry 1 equals :func:`leak_prob_one`
    and entry 2 equals ``2 * leak_prob_two``.
    """
    out: dict[int, Fraction] = {}
    for (r, s), w in detection_spectrum(n).items():
        out[r + s] = out.get(r + s, Fraction(0)) + w
    return dict(sorted(out.items()))


def _check_eta(eta: float) -> None:
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")


def _leak_split(n: int, eta: float) -> tuple[float, float]:
    _require_positive(n)
    _check_eta(eta)
    spectrum = total_detection_spectrum(n)
    miss = 1.0 - eta
    leaked = math.fsum(float(w) * miss**j for j, w in spectrum.items() if j > 0)
    return float(spectrum[0]), leaked


def lossy_accept_prob(n: int, eta: float) -> tuple[float, float]:
    """``(p_true, p_accept)`` for one merge attempt with detector efficiency ``eta``.

    ``p_accept = sum_j p_j (1 - eta)^j`` over the full detection spectrum and
    ``p_true`` is its ``j = 0`` part.
    """
    p_true, leaked = _leak_split(n, eta)
    return p_true, p_true + leaked


def false_accept_fraction(n: int, eta: float) -> float:
    """Fraction of accepted merges in which photons were absorbed but missed.

    Uses the exact detection spectrum, so the ``j = 1`` term is kept. For large
    ``n`` the result approaches ``(1 - eta)^2 * p_2 / p_tn`` with ``p_2`` the
    total two-photon leak.
    """
    p_true, leaked = _leak_split(n, eta)
    return leaked / (p_true + leaked)


def baseline_scaling(n: int, scheme: str) -> float:
    """``c^(-n)`` yield of earlier photon-by-photon schemes (``kok``: c = sqrt(2) e, ``fiurasek``: c = e)."""
    try:
        c = BASELINE_CONSTANTS[scheme]
    except KeyError:
        raise ValueError(f"unknown scheme {scheme!r}; expected one of {sorted(BASELINE_CONSTANTS)}") from None
    _require_positive(n)
    if n % 2:
        raise ValueError(f"baseline scalings are defined for even n, got {n}")
    return c ** (-n)
