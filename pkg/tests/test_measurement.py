"""
Unit tests for ideal and lossy photon-number detection.
"""
import math

import pytest

from circuits import build_named
from elements import apply_element
from fock_core import Ensemble, PureState, ZeroProbabilityError, equal_up_to_phase, noon_state, tensor_product
from measurement import (
    DetectorSpec, MeasurementError, detect_lossy, lossy_click_probabilities, outcome_distribution,
    post_select_ideal
)


def before_detectors(circuit):
    state = circuit.input_state
    for element in circuit.elements:
        if isinstance(element, DetectorSpec):
            break
        state = apply_element(state, element)
    return state


@pytest.fixture
def mixed_state():
    return PureState({(2, 1, 0): 0.5, (1, 1, 1): 0.5j, (0, 2, 1): -0.5, (3, 0, 0): 0.5})


class TestPostSelectIdeal:
    """Test projective post-selection."""

    def test_four_port_heralding(self, tol):
        """Test the (1, 1) herald of the |2,2> scheme: probability 1/16"""
        state = before_detectors(build_named('fig2'))
        conditional, p2 = post_select_ideal(state, 2, 1)
        conditional, p3 = post_select_ideal(conditional, 2, 1)
        assert p2 * p3 == pytest.approx(1 / 16.0, abs=tol)
        assert conditional.mode_count == 2
        assert conditional.photon_numbers() == [2]

    def test_vacuum_mode(self, tol):
        """Test that an empty mode gives probability 1 and is removed"""
        state = tensor_product(noon_state(2), PureState.vacuum(1))
        conditional, p = post_select_ideal(state, 2, 0)
        assert p == pytest.approx(1.0, abs=tol)
        assert equal_up_to_phase(conditional, noon_state(2))

    def test_impossible_count(self):
        """Test that asking for more photons than present signals zero probability"""
        with pytest.raises(ZeroProbabilityError):
            post_select_ideal(PureState({(1, 0): 0.6, (0, 1): 0.8}), 0, 2)

    def test_completeness(self, mixed_state, tol):
        """Test that probabilities over all counts sum to one"""
        total = 0.0
        for k in range(4):
            try:
                total += post_select_ideal(mixed_state, 1, k)[1]
            except ZeroProbabilityError:
                pass
        assert total == pytest.approx(1.0, abs=tol)

    def test_output_normalized(self, mixed_state, tol):
        """Test that the conditional state has unit norm"""
        conditional, _ = post_select_ideal(mixed_state, 2, 0)
        assert conditional.squared_norm() == pytest.approx(1.0, abs=tol)


class TestDetectLossy:
    """Test the lossy-detector POVM."""

    def test_ideal_limit(self, mixed_state):
        """Test that eta2 = 1 reproduces post-selection exactly"""
        for k in (0, 1):
            ideal_state, ideal_p = post_select_ideal(mixed_state, 1, k)
            rho, p = detect_lossy(Ensemble.from_state(mixed_state), 1, k, 1.0)
            assert p == ideal_p
            assert rho.weights == [1.0]
            assert rho.states[0] == ideal_state
            assert rho.labels == [(k,)]

    def test_two_photons_one_click(self, tol):
        """Test C(2,1) eta2 (1 - eta2) for a single two-photon mode"""
        _, p = detect_lossy(PureState.from_ket((2,)), 0, 1, 0.88)
        assert p == pytest.approx(2 * 0.88 * 0.12, abs=tol)

    def test_labels_record_arrivals(self):
        """Test that every branch is tagged with its arrival number"""
        rho, _ = detect_lossy(Ensemble.from_state(PureState({(1, 1): 0.6, (3, 0): 0.8})), 0, 1, 0.5)
        assert sorted(rho.labels) == [(1,), (3,)]
        assert all(state.mode_count == 1 for state in rho.states)

    def test_completeness(self, mixed_state, tol):
        """Test that click probabilities sum to one"""
        total = 0.0
        for k in range(4):
            try:
                total += detect_lossy(mixed_state, 0, k, 0.7)[1]
            except ZeroProbabilityError:
                pass
        assert total == pytest.approx(1.0, abs=tol)

    def test_no_dark_counts(self):
        """Test that more clicks than photons is impossible"""
        with pytest.raises(ZeroProbabilityError):
            detect_lossy(PureState.from_ket((1, 0)), 0, 2, 0.9)

    def test_efficiency_range(self):
        """Test that eta2 outside [0, 1] raises"""
        with pytest.raises(MeasurementError):
            detect_lossy(PureState.from_ket((1,)), 0, 1, 1.2)
        with pytest.raises(MeasurementError):
            DetectorSpec(0, 1, eta2=-0.1)

    def test_click_distribution(self, mixed_state, tol):
        """Test that the reported click distribution matches the conditioning probabilities"""
        clicks = lossy_click_probabilities(mixed_state, 0, 0.6)
        assert sum(clicks.values()) == pytest.approx(1.0, abs=tol)
        for k, p in clicks.items():
            assert detect_lossy(mixed_state, 0, k, 0.6)[1] == pytest.approx(p, abs=tol)


class TestOutcomeDistribution:
    """Test joint count distributions."""

    def test_empty_modes(self, mixed_state):
        """Test that no modes give the trivial distribution"""
        assert outcome_distribution(mixed_state, []) == {(): 1.0}

    def test_four_port_table(self, tol):
        """Test that the |2,2> scheme's pattern table sums to one with (1,1) at 1/16"""
        state = before_detectors(build_named('fig2'))
        table = outcome_distribution(state, [2, 3])
        assert sum(table.values()) == pytest.approx(1.0, abs=tol)
        assert table[(1, 1)] == pytest.approx(1 / 16.0, abs=tol)
        assert all(sum(pattern) <= 4 for pattern in table)

    def test_matches_sequential_post_selection(self, mixed_state, tol):
        """Test that each entry is the joint post-selection probability"""
        for (n0, n2), p in outcome_distribution(mixed_state, [0, 2]).items():
            conditional, p0 = post_select_ideal(mixed_state, 0, n0)
            _, p2 = post_select_ideal(conditional, 1, n2)
            assert p0 * p2 == pytest.approx(p, abs=tol)

    def test_duplicate_modes(self, mixed_state):
        """Test that modes must be distinct"""
        with pytest.raises(MeasurementError):
            outcome_distribution(mixed_state, [1, 1])


class TestConditionalWeights:
    """Test the lossy conditional weights against the binomial model."""

    def test_weight_form(self, tol):
        """Test weight(n, m) = n m eta^4 (1 - eta2)^(n + m - 2) P(n, m) / click probability"""
        eta2 = 0.7
        state = before_detectors(build_named('fig2_33'))
        arrivals = outcome_distribution(state, [2, 3])
        rho, p = detect_lossy(Ensemble.from_state(state), 2, 1, eta2)
        rho, p2 = detect_lossy(rho, 2, 1, eta2)
        weights = dict(zip(rho.labels, rho.weights))
        for (n, m), weight in weights.items():
            expected = n * m * eta2 ** 2 * (1 - eta2) ** (n + m - 2) * arrivals[(n, m)] / (p * p2)
            assert weight == pytest.approx(expected, abs=tol)
        assert math.fsum(weights.values()) == pytest.approx(1.0, abs=tol)
