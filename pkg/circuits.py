from __future__ import print_function
import logging
import math

from base_engine import BaseEngine
from elements import BeamSplitter, PhaseShifter, apply_element
from fock_core import (
    Ensemble, PureState, noon_state, tensor_product, PRUNE_THRESHOLD
)
from linalg_utils import format_angle
from measurement import DetectorSpec, detect_lossy, post_select_ideal


NAMED_CIRCUITS = ('hom', 'fig2', 'fig2_33', 'fig2_ancilla')


class CircuitError(ValueError):

    """Semantic error in a circuit: bad mode index, reuse of a consumed mode, dimension mismatch.

    Args:
        message: Reason.
        line: Source line of the offending statement, when the circuit came from a file.
    """

    def __init__(self, message, line=None):
        super(CircuitError, self).__init__(message)
        self.message = message
        self.line = line


def _rescaled(state, what, line=None):
    norm = state.norm()
    if norm == 0.0:
        raise CircuitError('{} state is zero'.format(what), line=line)
    if abs(norm - 1.0) > 1e-12:
        state = state.scaled(1.0 / norm)
    return state


class Circuit(object):

    """Ordered list of beam splitters, phase shifters and detectors over M modes.

    Mode indices are absolute: a detector consumes its mode, later elements keep
    referring to the remaining modes by their original index, and output kets list
    the remaining modes in ascending index order. Input and target are rescaled to
    unit norm.

    Args:
        mode_count: M.
        elements: Sequence of BeamSplitter, PhaseShifter and DetectorSpec.
        input_state: PureState over M modes.
        target: Optional PureState over the modes left after all detectors.
        name: Optional label for logs and reports.
        element_lines: Optional source line per element, used in error messages.
        target_line: Optional source line of the target statement.
    """

    def __init__(self, mode_count, elements, input_state, target=None, name=None,
                 element_lines=None, target_line=None):
        if mode_count < 1:
            raise CircuitError('a circuit needs at least one mode, got {}'.format(mode_count))
        self.mode_count = int(mode_count)
        self.elements = tuple(elements)
        self.name = name
        self.element_lines = tuple(element_lines) if element_lines is not None else (None,) * len(self.elements)

        if input_state.mode_count != self.mode_count:
            raise CircuitError('input state has {} modes, circuit declares {}'.format(
                input_state.mode_count, self.mode_count))
        self.input_state = _rescaled(input_state, 'input')

        consumed = set()
        for element, line in zip(self.elements, self.element_lines):
            if not isinstance(element, (BeamSplitter, PhaseShifter, DetectorSpec)):
                raise CircuitError('unknown element {!r}'.format(element), line=line)
            for mode in element.modes:
                if mode >= self.mode_count:
                    raise CircuitError('mode {} out of range for {} modes'.format(mode, self.mode_count), line=line)
                if mode in consumed:
                    raise CircuitError('mode {} has already been consumed by a detector'.format(mode), line=line)
            if isinstance(element, DetectorSpec):
                consumed.add(element.mode)

        self.remaining_modes = tuple(m for m in range(self.mode_count) if m not in consumed)
        if target is not None:
            if target.mode_count != len(self.remaining_modes):
                raise CircuitError('target has {} modes, {} remain after detection'.format(
                    target.mode_count, len(self.remaining_modes)), line=target_line)
            target = _rescaled(target, 'target', line=target_line)
        self.target = target

    @property
    def detectors(self):
        return [e for e in self.elements if isinstance(e, DetectorSpec)]

    @property
    def photon_number(self):
        numbers = self.input_state.photon_numbers()
        return max(numbers) if numbers else 0

    def with_efficiency(self, eta2):
        """Copy with every detector's efficiency set to eta2."""
        elements = [
            DetectorSpec(e.mode, e.clicks, eta2) if isinstance(e, DetectorSpec) else e
            for e in self.elements
        ]
        return Circuit(self.mode_count, elements, self.input_state, self.target, self.name)

    def __repr__(self):
        return 'Circuit(name={!r}, modes={}, elements={})'.format(self.name, self.mode_count, len(self.elements))


class SparseEngine(BaseEngine):

    """Executes circuits on sparse Fock states, one ensemble branch at a time."""

    def prepare(self, state):
        return Ensemble.from_state(state, label=())

    def _prune(self, state):
        if self.prune_threshold == PRUNE_THRESHOLD:
            return state
        return PureState(state.amplitudes, state.mode_count, prune_threshold=self.prune_threshold)

    def apply_element(self, register, element, positions):
        return Ensemble(
            [(w, self._prune(apply_element(s, element, positions))) for w, s in register.branches],
            register.labels
        )

    def detect(self, register, position, detector):
        if detector.ideal and len(register) == 1:
            conditional, probability = post_select_ideal(register.states[0], position, detector.clicks)
            label = (register.labels[0] or ()) + (detector.clicks,)
            return Ensemble.from_state(conditional, label=label), probability
        return detect_lossy(register, position, detector.clicks, detector.eta2)

    def finish(self, register):
        return register


def run_circuit(circuit, **kwargs):
    """Runs a circuit on the sparse engine; keyword arguments configure the engine."""
    return SparseEngine(**kwargs).run(circuit)


def fig2_elements(clicks=(1, 1), eta2=1.0, arm_phase=None):
    """
    Elements of the two-stage interferometer with heralding detectors on modes 2 and 3.

    Modes 0, 1 carry the input and output paths; 2, 3 are the intermediate arms. The
    fixed phase shifters absorb the mirror phases; the linear part composes to
    rows (0, s, 1/2, -i/2), (s, 0, -i/2, 1/2), (1/2, -i/2, i s, 0), (-i/2, 1/2, 0, i s)
    with s = 1/sqrt(2).

    Args:
        clicks: Required counts on modes (2, 3).
        eta2: Efficiency of both detectors.
        arm_phase: Optional PhaseShifter inserted right after the first splitter.
    """
    elements = [BeamSplitter(0, 1)]
    if arm_phase is not None:
        elements.append(arm_phase)
    elements += [
        PhaseShifter(2, math.pi),
        PhaseShifter(3, math.pi),
        BeamSplitter(0, 2),
        BeamSplitter(1, 3),
        PhaseShifter(2, math.pi / 2),
        PhaseShifter(3, math.pi / 2),
        DetectorSpec(2, clicks[0], eta2),
        DetectorSpec(3, clicks[1], eta2),
        BeamSplitter(0, 1),
        PhaseShifter(0, -math.pi / 2),
        PhaseShifter(1, -math.pi / 2),
    ]
    return elements


def _default_input(name):
    if name == 'hom':
        return PureState.from_ket((1, 1))
    if name == 'fig2':
        return PureState.from_ket((2, 2, 0, 0))
    if name == 'fig2_33':
        return PureState.from_ket((3, 3, 0, 0))
    return tensor_product(PureState.from_ket((2, 2)), noon_state(2))


def build_named(name, input_state=None, extra_phase=None, eta2=1.0, clicks=(1, 1), target=None):
    """
    Builds one of the named schemes.

    hom: a single beam splitter on |1,1>.
    fig2: the two-stage interferometer, |2,2> input, heralding (1, 1).
    fig2_33: fig2 with a pi/2 shifter on arm 1 after the first splitter, |3,3> input.
    fig2_ancilla: fig2 with a pi/4 shifter on arm 0 after the first splitter, fed with
        |2,2> on modes (0, 1) and (|2,0> + |0,2>)/sqrt(2) on modes (2, 3).

    Args:
        name: One of NAMED_CIRCUITS.
        input_state: Optional input. Two-mode inputs to the four-mode schemes are padded
            with vacuum on modes 2 and 3.
        extra_phase: Optional phase shifter appended on output mode 1.
        eta2: Detector efficiency.
        clicks: Heralding counts on modes (2, 3).
        target: Optional target. With the default input, the scheme's NOON output
            (rotated by extra_phase) is used.

    Returns:
        Circuit.
    """
    if name not in NAMED_CIRCUITS:
        raise CircuitError('unknown circuit {!r}, expected one of {}'.format(name, ', '.join(NAMED_CIRCUITS)))

    default_input = input_state is None
    if default_input:
        input_state = _default_input(name)

    if name == 'hom':
        mode_count, elements = 2, [BeamSplitter(0, 1)]
        noon_photons, noon_phase = 2, 0.0
    else:
        mode_count = 4
        if input_state.mode_count == 2:
            input_state = tensor_product(input_state, PureState.vacuum(2))
        arm_phase = None
        if name == 'fig2_33':
            arm_phase = PhaseShifter(1, math.pi / 2)
        elif name == 'fig2_ancilla':
            arm_phase = PhaseShifter(0, math.pi / 4)
        elements = fig2_elements(clicks, eta2, arm_phase)
        noon_photons, noon_phase = (2, 0.0) if name == 'fig2' else (4, math.pi)

    if extra_phase is not None:
        elements.append(PhaseShifter(1, extra_phase))
        noon_phase += noon_photons * extra_phase

    if target is None and default_input:
        target = noon_state(noon_photons, relative_phase=noon_phase)

    logging.info('built {} with {} elements'.format(name, len(elements)))
    return Circuit(mode_count, elements, input_state, target, name=name)


def format_number(value):
    return repr(float(value))


def format_state(state):
    """Writes a state as a circuit-file state expression, e.g. 0.7071067811865475*|2,0> - 0.7071067811865475*|0,2>."""
    terms = []
    for ket, amplitude in state.items():
        ket_text = '|{}>'.format(','.join(str(n) for n in ket))
        if abs(amplitude.imag) < 1e-15:
            sign = '-' if amplitude.real < 0 else '+'
            coefficient = format_number(abs(amplitude.real))
        else:
            sign = '+'
            coefficient = '({}{}{}i)'.format(
                format_number(amplitude.real),
                '-' if amplitude.imag < 0 else '+',
                format_number(abs(amplitude.imag))
            )
        terms.append((sign, '{}*{}'.format(coefficient, ket_text)))

    if not terms:
        raise CircuitError('cannot write the zero state')
    first_sign, first = terms[0]
    text = ('-' if first_sign == '-' else '') + first
    for sign, term in terms[1:]:
        text += ' {} {}'.format(sign, term)
    return text


def dump_circuit(circuit):
    """Writes a circuit in the circuit-file language; parse_circuit reads it back."""
    lines = []
    if circuit.name:
        lines.append('# {}'.format(circuit.name))
    lines.append('modes {}'.format(circuit.mode_count))
    lines.append('in {}'.format(format_state(circuit.input_state)))
    for element in circuit.elements:
        if isinstance(element, BeamSplitter):
            lines.append('bs {} {}'.format(element.mode_i, element.mode_j))
        elif isinstance(element, PhaseShifter):
            lines.append('ps {} {}'.format(element.mode, format_angle(element.phi)))
        else:
            line = 'det {} {}'.format(element.mode, element.clicks)
            if not element.ideal:
                line += ' eta2={}'.format(format_number(element.eta2))
            lines.append(line)
    if circuit.target is not None:
        lines.append('target {}'.format(format_state(circuit.target)))
    return '\n'.join(lines) + '\n'
