"""
Photon-number measurements: ideal post-selection and the lossy-detector POVM.

A lossy detector of efficiency eta2 is an ideal counter behind a beam splitter of
transmissivity eta2; k clicks from n arriving photons happen with binomial
probability C(n, k) eta2^k (1 - eta2)^(n - k). Detected modes are consumed, and
all n arriving photons leave the circuit whatever the reported count.
"""
from collections import namedtuple, defaultdict
import logging
import math

from fock_core import Ensemble, PureState, ZeroProbabilityError, normalize


class MeasurementError(ValueError):
    """Raised for invalid detector parameters."""


class DetectorSpec(namedtuple('DetectorSpec', ['mode', 'clicks', 'eta2'])):

    """Photon-number detector on `mode` conditioned on `clicks` reported photons."""

    __slots__ = ()

    def __new__(cls, mode, clicks, eta2=1.0):
        mode, clicks, eta2 = int(mode), int(clicks), float(eta2)
        if mode < 0:
            raise MeasurementError('detector mode must be nonnegative, got {}'.format(mode))
        if clicks < 0:
            raise MeasurementError('click count must be nonnegative, got {}'.format(clicks))
        _check_efficiency(eta2)
        return super(DetectorSpec, cls).__new__(cls, mode, clicks, eta2)

    @property
    def modes(self):
        return (self.mode,)

    @property
    def ideal(self):
        return self.eta2 == 1.0


def _check_efficiency(eta2):
    if not 0.0 <= eta2 <= 1.0:
        raise MeasurementError('efficiency eta2 must lie in [0, 1], got {}'.format(eta2))


def _check_position(state, mode):
    if not 0 <= mode < state.mode_count:
        raise MeasurementError('mode {} out of range for {} modes'.format(mode, state.mode_count))


def _project(state, mode):
    """Splits a state by occupation of `mode`: {n: unnormalized remainder with the mode removed}."""
    _check_position(state, mode)
    parts = defaultdict(dict)
    for ket, amplitude in state.items():
        remainder = ket[:mode] + ket[mode + 1:]
        parts[ket[mode]][remainder] = amplitude
    return {n: PureState(amplitudes, state.mode_count - 1) for n, amplitudes in parts.items()}


def click_weight(n, k, eta2):
    """Probability of k clicks when n photons arrive at a detector of efficiency eta2."""
    if k > n:
        return 0.0
    return math.comb(n, k) * eta2 ** k * (1.0 - eta2) ** (n - k)


def post_select_ideal(state, mode, k):
    """
    Conditions on exactly k photons in `mode` and consumes the mode.

    Args:
        state: PureState, unit norm.
        mode: Position of the measured mode.
        k: Required photon count.

    Returns:
        Tuple (normalized conditional PureState without the mode, probability).

    Raises:
        ZeroProbabilityError: no ket has k photons in `mode`.
    """
    parts = _project(state, mode)
    if k not in parts or len(parts[k]) == 0:
        raise ZeroProbabilityError(
            'post-selecting {} photons in mode {} is impossible for this state'.format(k, mode))

    kept = parts[k]
    probability = kept.squared_norm()
    conditional, _ = normalize(kept)
    logging.debug('post-selected k={} on mode {}: probability {}'.format(k, mode, probability))
    return conditional, probability


def detect_lossy(rho, mode, k, eta2):
    """
    Lossy photon-number detection reporting k clicks.

    Every branch splits by arrival number n >= k; each conditional branch is
    weighted by C(n, k) eta2^k (1 - eta2)^(n - k) times its arrival probability,
    and its label is extended with n.

    Args:
        rho: Ensemble (or a single PureState), normalized.
        mode: Position of the measured mode.
        k: Reported click count.
        eta2: Detector efficiency in [0, 1]. eta2 = 1 reproduces post_select_ideal.

    Returns:
        Tuple (normalized Ensemble without the mode, probability of k clicks).

    Raises:
        ZeroProbabilityError: k clicks can never be reported.
    """
    _check_efficiency(eta2)
    if isinstance(rho, PureState):
        rho = Ensemble.from_state(rho)

    branches, labels = [], []
    for (weight, state), label in zip(rho.branches, rho.labels):
        parts = _project(state, mode)
        for n in sorted(parts):
            part = parts[n]
            if n < k or len(part) == 0:
                continue
            branch_weight = weight * click_weight(n, k, eta2) * part.squared_norm()
            if branch_weight <= 0.0:
                continue
            conditional, _ = normalize(part)
            branches.append((branch_weight, conditional))
            labels.append((label or ()) + (n,))

    if not branches:
        raise ZeroProbabilityError(
            '{} clicks on mode {} at eta2={} is impossible for this state'.format(k, mode, eta2))

    conditioned = Ensemble(branches, labels)
    probability = conditioned.total_weight()
    logging.debug('lossy detection k={} eta2={} on mode {}: probability {}, {} branches'.format(
        k, eta2, mode, probability, len(branches)))
    return conditioned.normalized(), probability


def outcome_distribution(state, modes):
    """
    Joint photon-count distribution of the given modes.

    Args:
        state: PureState.
        modes: Sequence of distinct mode positions.

    Returns:
        Dict mapping count tuples (in the order of `modes`) to probabilities summing to 1.
    """
    modes = list(modes)
    if len(set(modes)) != len(modes):
        raise MeasurementError('modes must be distinct, got {}'.format(modes))
    for mode in modes:
        _check_position(state, mode)
    if not modes:
        return {(): 1.0}

    total = state.squared_norm()
    if total == 0.0:
        raise ZeroProbabilityError('outcome distribution of the zero state')
    weights = defaultdict(list)
    for ket, amplitude in state.items():
        weights[tuple(ket[m] for m in modes)].append(abs(amplitude) ** 2)
    return {pattern: math.fsum(w) / total for pattern, w in sorted(weights.items())}


def lossy_click_probabilities(state, mode, eta2):
    """
    Distribution of reported clicks on one mode for a detector of efficiency eta2.

    Returns:
        Dict mapping click count k to probability; sums to 1.
    """
    _check_efficiency(eta2)
    arrivals = outcome_distribution(state, [mode])
    clicks = defaultdict(list)
    for (n,), p_n in arrivals.items():
        for k in range(n + 1):
            weight = click_weight(n, k, eta2) * p_n
            if weight > 0.0:
                clicks[k].append(weight)
    return {k: math.fsum(w) for k, w in sorted(clicks.items())}
