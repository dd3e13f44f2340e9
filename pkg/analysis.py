from __future__ import print_function
from collections import namedtuple
import logging
import math

import numpy as np
from scipy.optimize import minimize_scalar

from circuits import CircuitError, build_named, run_circuit
from elements import apply_phase_shifter
from fock_core import DimensionError, PureState, fidelity, noon_state, tensor_product


LADDER_FAMILIES = ('odd', 'even')

LossyRow = namedtuple('LossyRow', ['arrival', 'state', 'weight'])
LossyReport = namedtuple('LossyReport', ['rows', 'fidelity', 'raw_fidelity', 'eta2', 'click_probability'])
SweepPoint = namedtuple('SweepPoint', ['eta2', 'fidelity', 'click_probability'])
FringeFit = namedtuple('FringeFit', ['offset', 'cosine', 'sine', 'visibility', 'residual'])
LadderPoint = namedtuple('LadderPoint', ['order', 'probability', 'fidelity', 'input_state'])


def _best_alignment(rho, target, grid_points=360):
    """
    maximizes fidelity over a phase shifter on the target's last mode;
    returns (fidelity, angle)
    """
    if target.mode_count == 0:
        return fidelity(rho, target), 0.0

    mode = target.mode_count - 1

    def infidelity(theta):
        return -fidelity(rho, apply_phase_shifter(target, mode, theta))

    grid = np.linspace(0.0, 2 * np.pi, grid_points, endpoint=False)
    values = [infidelity(theta) for theta in grid]
    start = grid[int(np.argmin(values))]
    step = grid[1] - grid[0]
    result = minimize_scalar(
        infidelity, bounds=(start - step, start + step), method='bounded', options={'xatol': 1e-12})

    if result.fun <= min(values):
        return -result.fun, float(result.x)
    return -min(values), float(start)


def aligned_fidelity(rho, target):
    """
    fidelity with the target after the best relative phase between its modes
    """
    return _best_alignment(rho, target)[0]


def _target_for(circuit, target):
    target = target if target is not None else circuit.target
    if target is None:
        raise CircuitError('no target state given and the circuit declares none')
    return target


def lossy_table(circuit, eta2, target=None):
    """
    Conditional states of a two-detector scheme under detector inefficiency.

    Args:
        circuit: Circuit with exactly two detectors.
        eta2: Detector efficiency in (0, 1].
        target: Target state; the circuit's target when omitted.

    Returns:
        LossyReport with one row per arrival pattern of nonzero weight, sorted by pattern.
    """
    if len(circuit.detectors) != 2:
        raise CircuitError('lossy table needs exactly two detectors, got {}'.format(len(circuit.detectors)))
    if not 0.0 < eta2 <= 1.0:
        raise CircuitError('eta2 must lie in (0, 1], got {}'.format(eta2))
    target = _target_for(circuit, target)

    result = run_circuit(circuit.with_efficiency(eta2))
    rows = sorted((
        LossyRow(tuple(label), state, weight)
        for (weight, state), label in zip(result.output.branches, result.per_branch_labels)
    ), key=lambda row: row.arrival)
    raw = fidelity(result.output, target)
    aligned = max(aligned_fidelity(result.output, target), raw)
    logging.info('lossy table at eta2={}: {} rows, fidelity {} (raw {})'.format(eta2, len(rows), aligned, raw))
    return LossyReport(rows, aligned, raw, eta2, result.probability)


def eta_sweep(circuit, eta2_values, target=None):
    """
    lossy_table fidelity and click probability at each efficiency
    """
    points = []
    for eta2 in eta2_values:
        report = lossy_table(circuit, eta2, target)
        points.append(SweepPoint(eta2, report.fidelity, report.click_probability))
    return points


def _absorbed(state, order):
    """amplitudes of e^order |state> up to the factor 2^(-order/2)"""
    out = {}
    for (na, nb), a in state.items():
        for j in range(max(0, order - nb), min(na, order) + 1):
            ket = (na - j, nb - order + j)
            factor = math.comb(order, j) * math.sqrt(
                math.factorial(na) * math.factorial(nb) / float(math.factorial(ket[0]) * math.factorial(ket[1])))
            out[ket] = out.get(ket, 0j) + a * factor
    return out


def deposition_pattern(state, phi_grid, order=None):
    """
    N-photon absorption rate <(e^dag)^N e^N> with e = (a + b)/sqrt(2), after a phase
    shifter phi on mode 1.

    For |n_a, n_b> with n_a + n_b = N, e^N leaves only the vacuum, with amplitude
    2^(-N/2) N! / sqrt(n_a! n_b!). Kets with fewer than N photons absorb nothing.

    Args:
        state: Two-mode state.
        phi_grid: Iterable of phases.
        order: Absorber order N. Defaults to the state's photon number, which must
            then be definite.

    Returns:
        List of (phi, intensity) pairs.
    """
    if state.mode_count != 2:
        raise DimensionError('deposition needs a two-mode state, got {} modes'.format(state.mode_count))
    if order is None:
        numbers = state.photon_numbers()
        if len(numbers) != 1:
            raise ValueError('deposition needs a definite photon number, got {}'.format(numbers))
        order = numbers[0]

    pattern = []
    for phi in phi_grid:
        absorbed = _absorbed(apply_phase_shifter(state, 1, phi), order)
        intensity = math.fsum(abs(a) ** 2 for a in absorbed.values()) / 2 ** order
        pattern.append((float(phi), intensity))
    return pattern


def mixture_deposition_pattern(rho, phi_grid, order=None):
    """
    Weight-averaged deposition pattern of an Ensemble.

    Args:
        rho: Ensemble of two-mode branches.
        phi_grid: Iterable of phases.
        order: Absorber order; defaults to the largest photon number of any branch.

    Returns:
        List of (phi, intensity) pairs.
    """
    rho = rho.normalized()
    if order is None:
        order = max(n for state in rho.states for n in state.photon_numbers())
    phi_grid = list(phi_grid)
    total = np.zeros(len(phi_grid))
    for weight, state in rho.branches:
        total += weight * np.array([value for _, value in deposition_pattern(state, phi_grid, order)])
    return [(float(phi), float(value)) for phi, value in zip(phi_grid, total)]


def fit_fringe(pattern, n):
    """
    least-squares fit of a + b cos(n phi) + c sin(n phi) to a deposition pattern
    """
    phi, intensity = np.array(pattern, dtype=float).T
    design = np.stack([np.ones_like(phi), np.cos(n * phi), np.sin(n * phi)], axis=1)
    (a, b, c), _, _, _ = np.linalg.lstsq(design, intensity, rcond=None)
    scale = np.linalg.norm(intensity)
    residual = np.linalg.norm(intensity - design.dot([a, b, c])) / scale if scale else 0.0
    visibility = math.hypot(b, c) / a if a else 0.0
    return FringeFit(float(a), float(b), float(c), float(visibility), float(residual))


def ladder_circuit(family, order):
    """
    odd: |2N+1,2N+1> through the pi/2 scheme; even: |2N,2N> (x) (|2,0> - |0,2>)/sqrt(2)
    through the plain scheme; both heralded on (2N-1, 2N-1)
    """
    if order < 1:
        raise ValueError('ladder order must be at least 1, got {}'.format(order))
    clicks = (2 * order - 1, 2 * order - 1)
    target = noon_state(4, sign=-1)
    if family == 'odd':
        state = PureState.from_ket((2 * order + 1, 2 * order + 1))
        return build_named('fig2_33', input_state=state, clicks=clicks, target=target)
    elif family == 'even':
        state = tensor_product(PureState.from_ket((2 * order, 2 * order)), noon_state(2, sign=-1))
        return build_named('fig2', input_state=state, clicks=clicks, target=target)
    raise ValueError('unknown ladder family {!r}, expected one of {}'.format(family, LADDER_FAMILIES))


def ladder(family, orders):
    """
    heralding probability and NOON fidelity along a generalization ladder
    """
    points = []
    for order in orders:
        circuit = ladder_circuit(family, order)
        result = run_circuit(circuit)
        points.append(LadderPoint(order, result.probability, aligned_fidelity(result.output, circuit.target),
                                  circuit.input_state))
        logging.info('{} ladder order {}: probability {}'.format(family, order, result.probability))
    return points
