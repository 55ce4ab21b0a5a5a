import cmath
import math

import pytest

from conftest import random_state
from noonsim.catfactory import make_cat
from noonsim.fock import FockState, NormalizationError, basis_state, norm_sq, vacuum
from noonsim.optics import (
    apply_beam_splitter,
    apply_phase_shift,
    lossy_no_click_accept,
    measure_branches,
    project_vacuum,
)

from oracles import merge_state_amplitudes, splitter_amplitude

R2 = 1 / math.sqrt(2)


def merge_state(n):
    return FockState(4, merge_state_amplitudes(n))


class TestBeamSplitter:
    def test_single_photon(self):
        out = apply_beam_splitter(basis_state((1, 0)), 0, 1)
        assert dict(out.terms) == pytest.approx({(1, 0): R2, (0, 1): 1j * R2})

    def test_hong_ou_mandel(self):
        out = apply_beam_splitter(basis_state((1, 1)), 0, 1)
        assert dict(out.terms) == pytest.approx({(2, 0): 1j * R2, (0, 2): 1j * R2})
        assert out[(1, 1)] == 0

    @pytest.mark.parametrize("n_in", [(2, 0), (1, 2), (3, 3), (4, 1), (0, 5), (2, 4)])
    def test_matches_permanent_oracle(self, n_in):
        out = apply_beam_splitter(basis_state(n_in), 0, 1)
        total = sum(n_in)
        for p in range(total + 1):
            expected = splitter_amplitude(n_in, (p, total - p))
            assert abs(out[(p, total - p)] - expected) <= 1e-12

    def test_norm_preserved_10_photons(self, pyrng):
        s = random_state(4, 10, pyrng)
        out = apply_beam_splitter(s, 1, 3)
        assert norm_sq(out) == pytest.approx(1, abs=1e-12)

    @pytest.mark.parametrize("photons", [1, 5, 9, 16])
    def test_unitarity_and_conservation(self, pyrng, photons):
        for _ in range(5):
            s = random_state(3, photons, pyrng)
            for i, j in [(0, 1), (2, 0), (1, 2)]:
                out = apply_beam_splitter(s, i, j)
                assert norm_sq(out) == pytest.approx(norm_sq(s), rel=1e-12)
                assert out.photon_numbers() == {photons}

    def test_twice_is_phase_i_per_photon(self):
        for occ in [(1, 0), (0, 1), (2, 1), (3, 2), (0, 4)]:
            s = basis_state(occ)
            twice = apply_beam_splitter(apply_beam_splitter(s, 0, 1), 0, 1)
            # a* -> i b*, b* -> i a*: modes swap, phase i per photon
            swapped = basis_state((occ[1], occ[0]), 1j ** sum(occ))
            assert twice.is_close(swapped, atol=1e-12)

    def test_errors(self):
        with pytest.raises(ValueError):
            apply_beam_splitter(vacuum(2), 1, 1)
        with pytest.raises(IndexError):
            apply_beam_splitter(vacuum(2), 0, 2)


class TestPhaseShift:
    def test_zero_is_identity(self):
        s = make_cat(3)
        assert apply_phase_shift(s, 1, 0.0) == s

    def test_pi_over_n(self):
        out = apply_phase_shift(basis_state((0, 3)), 1, math.pi / 3)
        assert out[(0, 3)] == pytest.approx(-1)

    def test_cat2_quarter_turn(self):
        out = apply_phase_shift(make_cat(2), 1, math.pi / 4)
        assert dict(out.terms) == pytest.approx({(2, 0): R2, (0, 2): 1j * R2})

    def test_unitary(self, pyrng):
        s = random_state(2, 16, pyrng)
        out = apply_phase_shift(s, 0, 0.37)
        assert norm_sq(out) == pytest.approx(1, abs=1e-12)
        assert out.photon_numbers() == {16}
        for occ, amp in s:
            assert out[occ] == pytest.approx(amp * cmath.exp(0.37j * occ[0]))

    def test_bad_mode(self):
        with pytest.raises(IndexError):
            apply_phase_shift(vacuum(1), 1, 0.1)


class TestMeasurement:
    def test_project_vacuum_examples(self):
        p, post = project_vacuum(vacuum(4), [2, 3])
        assert p == 1 and post == vacuum(4)
        p, post = project_vacuum(basis_state((1, 0)), [0])
        assert p == 0 and len(post) == 0
        p, _ = project_vacuum(merge_state(2), [2, 3])
        assert p == pytest.approx(3 / 16, abs=1e-15)

    def test_project_vacuum_flags_unnormalized(self):
        with pytest.raises(NormalizationError):
            project_vacuum(basis_state((0, 0), 0.5), [0])

    def test_branches_cat1(self):
        branches = measure_branches(make_cat(1), [0])
        assert [b.detected for b in branches] == [(0,), (1,)]
        assert [b.weight for b in branches] == pytest.approx([0.5, 0.5])
        assert branches[0].post_state.is_close(basis_state((0, 1)))
        assert branches[1].post_state.is_close(basis_state((0, 0)))

    def test_branches_merge_state_n1(self):
        branches = measure_branches(merge_state(1), [2, 3])
        by_total = {}
        for b in branches:
            by_total[b.total] = by_total.get(b.total, 0) + b.weight
        # polynomial expansion by hand at n = 1: herald 1/4, one photon 1/2, two photons 1/4
        assert by_total == pytest.approx({0: 0.25, 1: 0.5, 2: 0.25}, abs=1e-12)
        assert all(norm_sq(b.post_state) == pytest.approx(1) for b in branches)

    def test_vacuum_single_branch(self):
        branches = measure_branches(vacuum(3), [0, 2])
        assert len(branches) == 1 and branches[0].weight == 1

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_completeness_and_consistency(self, n):
        s = merge_state(n)
        branches = measure_branches(s, [2, 3])
        assert math.fsum(b.weight for b in branches) == pytest.approx(1, abs=1e-10)
        zero = [b for b in branches if b.detected == (0, 0)][0]
        p, post = project_vacuum(s, [2, 3])
        assert abs(zero.weight - p) <= 1e-12
        assert zero.post_state.is_close(post, atol=1e-12)

    def test_branch_serialization(self):
        d = measure_branches(make_cat(1), [0])[0].to_dict()
        assert set(d) == {"detected", "weight", "post_state"}


class TestLossyAccept:
    def test_perfect_detectors(self, pyrng):
        s = random_state(4, 6, pyrng)
        res = lossy_no_click_accept(s, [2, 3], 1.0)
        p, _ = project_vacuum(s, [2, 3])
        assert res.accept_prob == pytest.approx(p, abs=1e-15)
        assert res.corrupt_weights == {}

    def test_blind_detectors(self, pyrng):
        s = random_state(4, 6, pyrng)
        assert lossy_no_click_accept(s, [2, 3], 0.0).accept_prob == pytest.approx(1, abs=1e-12)

    def test_merge_state_n2_eta_09(self):
        res = lossy_no_click_accept(merge_state(2), [2, 3], 0.9)
        # spectrum of the n = 2 merge state: {0: 3/16, 1: 1/4, 2: 1/8, 3: 1/4, 4: 3/16}
        expected = 3 / 16 + 0.1 * (1 / 4) + 0.01 * (1 / 8) + 0.001 * (1 / 4) + 0.0001 * (3 / 16)
        assert res.accept_prob == pytest.approx(expected, abs=1e-14)
        assert res.true_weight == pytest.approx(3 / 16, abs=1e-15)
        assert res.corrupt_weights[1] == pytest.approx(0.1 * 0.25, abs=1e-15)
        assert res.accept_prob == pytest.approx(res.true_weight + sum(res.corrupt_weights.values()), abs=1e-12)

    def test_monotone_in_eta(self, pyrng):
        for _ in range(5):
            s = random_state(4, 8, pyrng)
            probs = [lossy_no_click_accept(s, [2, 3], e).accept_prob for e in (0, 0.25, 0.5, 0.75, 1)]
            assert all(a >= b - 1e-15 for a, b in zip(probs, probs[1:]))

    def test_eta_range(self):
        with pytest.raises(ValueError):
            lossy_no_click_accept(vacuum(2), [0], 1.5)
