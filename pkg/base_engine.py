from __future__ import print_function
from collections import namedtuple
from datetime import datetime
import logging
import os
import pprint as pp
import sys

from elements import BeamSplitter, PhaseShifter, ElementError
from fock_core import fidelity
from measurement import DetectorSpec


class RunResult(namedtuple('RunResult', ['probability', 'output', 'per_branch_labels', 'fidelity', 'modes'])):

    """Outcome of one circuit execution.

    Fields:
        probability: Joint probability of every detector condition (product over detector stages).
        output: Normalized Ensemble on the undetected modes.
        per_branch_labels: Arrival pattern of each output branch (one entry per detector).
        fidelity: Fidelity of the output with the circuit target, or None without a target.
        modes: Circuit indices of the undetected modes, in ket order.
    """

    __slots__ = ()

    @property
    def state(self):
        """The output state when the run produced a single pure branch."""
        if len(self.output) != 1:
            raise ValueError('output is a mixture of {} branches'.format(len(self.output)))
        return self.output.states[0]


class BaseEngine(object):

    """Interface containing the element loop shared by circuit simulators.

    Subclassing engines implement prepare(), apply_element(), detect() and finish(), which
    define how a state register is represented and transformed. The loop here walks the
    circuit's elements strictly in listed order, keeps track of which circuit modes are
    still live once detectors consume them, and multiplies the stage probabilities.

    Args:
        prune_threshold: Amplitudes below this magnitude are dropped after every stage.
        logging_level: Level used when the engine logs its stages.
        name: Label used in log lines.
    """

    def __init__(self, prune_threshold=1e-12, logging_level=logging.DEBUG, name=None):
        self.prune_threshold = prune_threshold
        self.logging_level = logging_level
        self.name = name or self.__class__.__name__
        logging.info('\nnew engine with parameters:\n{}'.format(pp.pformat(self.__dict__)))

    def prepare(self, state):
        raise NotImplementedError('subclass must implement this')

    def apply_element(self, register, element, positions):
        raise NotImplementedError('subclass must implement this')

    def detect(self, register, position, detector):
        raise NotImplementedError('subclass must implement this')

    def finish(self, register):
        raise NotImplementedError('subclass must implement this')

    def run(self, circuit):
        """
        Executes a circuit.

        Args:
            circuit: Circuit.

        Returns:
            RunResult.

        Raises:
            ZeroProbabilityError: a detector condition is impossible.
        """
        logging.info('[[{}]] running {} ({} modes, {} elements)'.format(
            self.name, circuit.name or 'circuit', circuit.mode_count, len(circuit.elements)))

        live = list(range(circuit.mode_count))
        register = self.prepare(circuit.input_state)
        probability = 1.0

        for step, element in enumerate(circuit.elements):
            positions = {mode: position for position, mode in enumerate(live)}

            if isinstance(element, DetectorSpec):
                if element.mode not in positions:
                    raise ElementError('mode {} has already been consumed by a detector'.format(element.mode))
                register, stage_probability = self.detect(register, positions[element.mode], element)
                probability *= stage_probability
                live.remove(element.mode)
                logging.log(self.logging_level, '[[step {:>3}]] {!r}: stage probability {}'.format(
                    step, element, stage_probability))
            elif isinstance(element, (BeamSplitter, PhaseShifter)):
                register = self.apply_element(register, element, positions)
                logging.log(self.logging_level, '[[step {:>3}]] {!r}'.format(step, element))
            else:
                raise ElementError('unknown element {!r}'.format(element))

        output = self.finish(register)
        value = fidelity(output, circuit.target) if circuit.target is not None else None
        logging.info('[[{}]] probability {}, {} branches, fidelity {}'.format(
            self.name, probability, len(output), value))
        return RunResult(probability, output, output.labels, value, tuple(live))


def init_logging(level=logging.WARNING, log_dir=None):
    """
    Configures the root logger: a stderr stream handler, plus a dated log file
    when `log_dir` is given.
    """
    handlers = [logging.StreamHandler(sys.stderr)]
    if log_dir is not None:
        if not os.path.isdir(log_dir):
            os.makedirs(log_dir)
        date_str = datetime.now().strftime('%Y-%m-%d_%H-%M')
        log_file = 'log_{}.txt'.format(date_str)
        handlers.append(logging.FileHandler(os.path.join(log_dir, log_file)))

    logging.basicConfig(
        level=level,
        format='[[%(asctime)s]] %(message)s',
        datefmt='%m/%d/%Y %I:%M:%S %p',
        handlers=handlers,
        force=True
    )
