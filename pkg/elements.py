"""
Linear-optical elements acting on sparse Fock states.

A beam splitter is applied by substituting each input creation operator with its
image under the 2x2 pair matrix and re-expanding the product binomially, one input
ket at a time, so sparse states stay sparse.
"""
from collections import namedtuple, defaultdict
import math

import numpy as np

from fock_core import PureState
from linalg_utils import BEAM_SPLITTER, embed_pair, phase_matrix


class ElementError(ValueError):
    """Raised for invalid element mode indices."""


class BeamSplitter(namedtuple('BeamSplitter', ['mode_i', 'mode_j'])):

    """50:50 beam splitter on two distinct modes, fixed to the BEAM_SPLITTER convention."""

    __slots__ = ()

    def __new__(cls, mode_i, mode_j):
        mode_i, mode_j = int(mode_i), int(mode_j)
        if mode_i == mode_j:
            raise ElementError('beam splitter needs two distinct modes, got {} and {}'.format(mode_i, mode_j))
        if min(mode_i, mode_j) < 0:
            raise ElementError('mode indices must be nonnegative, got {} and {}'.format(mode_i, mode_j))
        return super(BeamSplitter, cls).__new__(cls, mode_i, mode_j)

    @property
    def modes(self):
        return (self.mode_i, self.mode_j)


class PhaseShifter(namedtuple('PhaseShifter', ['mode', 'phi'])):

    """Multiplies an n-photon component of `mode` by exp(i n phi)."""

    __slots__ = ()

    def __new__(cls, mode, phi):
        mode = int(mode)
        if mode < 0:
            raise ElementError('mode index must be nonnegative, got {}'.format(mode))
        return super(PhaseShifter, cls).__new__(cls, mode, float(phi))

    @property
    def modes(self):
        return (self.mode,)


def _check_mode(mode, mode_count):
    if not 0 <= mode < mode_count:
        raise ElementError('mode {} out of range for {} modes'.format(mode, mode_count))


def _binomial_images(n, first, second):
    """Coefficients of (first*x + second*y)^n as {power of x: coefficient}."""
    return {
        p: math.comb(n, p) * first ** p * second ** (n - p)
        for p in range(n + 1)
    }


def apply_pair_unitary(state, i, j, matrix):
    """
    Applies an arbitrary 2x2 single-photon transformation to modes (i, j) of a state.

    Input creation operators are substituted as
    a_i^dag -> matrix[0, 0] a_i^dag + matrix[1, 0] a_j^dag and
    a_j^dag -> matrix[0, 1] a_i^dag + matrix[1, 1] a_j^dag.

    Args:
        state: PureState.
        i: Position of the first mode in the state's kets.
        j: Position of the second mode.
        matrix: Array of shape [2, 2].

    Returns:
        PureState with the same mode count. Photon number in {i, j} is conserved per ket.
    """
    if i == j:
        raise ElementError('pair transformation needs two distinct modes, got {} twice'.format(i))
    _check_mode(i, state.mode_count)
    _check_mode(j, state.mode_count)
    u = np.asarray(matrix, dtype=complex)

    out = defaultdict(complex)
    for ket, amplitude in state.items():
        n, m = ket[i], ket[j]
        images_i = _binomial_images(n, u[0, 0], u[1, 0])
        images_j = _binomial_images(m, u[0, 1], u[1, 1])
        scale = amplitude / math.sqrt(math.factorial(n) * math.factorial(m))

        for p, c_p in images_i.items():
            for q, c_q in images_j.items():
                coefficient = c_p * c_q
                if coefficient == 0:
                    continue
                r = p + q
                s = n + m - r
                target = list(ket)
                target[i], target[j] = r, s
                out[tuple(target)] += scale * coefficient * math.sqrt(math.factorial(r) * math.factorial(s))

    return PureState(out, state.mode_count)


def apply_beam_splitter(state, i, j):
    """Applies the 50:50 beam splitter to modes (i, j)."""
    return apply_pair_unitary(state, i, j, BEAM_SPLITTER)


def apply_phase_shifter(state, mode, phi):
    """Multiplies each ket with n photons in `mode` by exp(i n phi)."""
    _check_mode(mode, state.mode_count)
    return PureState(
        {ket: amplitude * np.exp(1j * ket[mode] * phi) for ket, amplitude in state.items()},
        state.mode_count
    )


def apply_element(state, element, positions=None):
    """
    Applies a beam splitter or phase shifter.

    Args:
        state: PureState.
        element: BeamSplitter or PhaseShifter, indexed by circuit mode.
        positions: Optional mapping from circuit mode index to position in the state's
            kets (used once detectors have consumed modes). Identity when omitted.

    Returns:
        PureState.
    """
    def position(mode):
        if positions is None:
            return mode
        if mode not in positions:
            raise ElementError('mode {} has already been consumed by a detector'.format(mode))
        return positions[mode]

    if isinstance(element, BeamSplitter):
        return apply_beam_splitter(state, position(element.mode_i), position(element.mode_j))
    elif isinstance(element, PhaseShifter):
        return apply_phase_shifter(state, position(element.mode), element.phi)
    else:
        raise ElementError('not a linear element: {!r}'.format(element))


def element_matrix(element, mode_count):
    """Single-photon M x M transformation of one linear element."""
    for mode in element.modes:
        _check_mode(mode, mode_count)
    if isinstance(element, BeamSplitter):
        return embed_pair(BEAM_SPLITTER, element.mode_i, element.mode_j, mode_count)
    return phase_matrix(element.mode, element.phi, mode_count)


def mode_transfer_matrix(circuit):
    """
    Composed single-photon transformation of a circuit's linear elements.

    Entry [k, j] is the amplitude for a photon entering mode j to leave in mode k.
    Detectors are ignored.

    Args:
        circuit: Circuit (or any object with `mode_count` and `elements`).

    Returns:
        Complex array of shape [M, M].
    """
    total = np.eye(circuit.mode_count, dtype=complex)
    for element in circuit.elements:
        if isinstance(element, (BeamSplitter, PhaseShifter)):
            total = element_matrix(element, circuit.mode_count).dot(total)
    return total
