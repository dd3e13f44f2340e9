"""Circuit file parser.

One statement per line, `#` starts a comment:

    modes 4
    in |3,3,0,0>
    bs 0 1
    ps 1 pi/2
    det 2 1 eta2=0.88
    target 0.7071*|4,0> - 0.7071*|0,4>

`modes` comes first; `in` may repeat (the states are tensored in order); a detector
consumes its mode for every later line. State expressions are rescaled to unit norm.
"""
import io
import math
import os

import pyparsing as pp

from circuits import Circuit, CircuitError
from elements import BeamSplitter, PhaseShifter, ElementError
from fock_core import DimensionError, PureState, tensor_product
from measurement import DetectorSpec, MeasurementError


class ParseError(ValueError):

    """Syntax error in a circuit file.

    Args:
        line: 1-based line number.
        column: 1-based column.
        reason: Human-readable description.
        source: File name used in the message.
    """

    def __init__(self, line, column, reason, source='<string>'):
        self.line = line
        self.column = column
        self.reason = reason
        self.source = source
        super(ParseError, self).__init__('{}:{}:{}: {}'.format(source, line, column, reason))


integer = pp.Word(pp.nums)
integer.set_parse_action(lambda tokens: int(tokens[0]))
real = pp.pyparsing_common.fnumber
sign = pp.one_of('+ -')


def _pi_angle(s, loc, tokens):
    denominator = int(tokens.get('den') or 1)
    if denominator == 0:
        raise pp.ParseFatalException(s, loc, 'zero denominator in angle')
    value = math.pi * int(tokens.get('num') or 1) / denominator
    return -value if tokens.get('neg') else value


pi_angle = pp.Regex(r'(?P<neg>-)?(?P<num>\d+)?pi(?:/(?P<den>\d+))?')
pi_angle.set_parse_action(_pi_angle)
angle = pi_angle | real

ket = pp.Suppress('|') + pp.Group(pp.DelimitedList(integer))('occupations') + pp.Suppress('>')
complex_coeff = (
    pp.Suppress('(') + real('re') + sign('im_sign') + real('im') + pp.Suppress('i') + pp.Suppress(')')
)
coeff = complex_coeff | real('re')
term = pp.Group(pp.Opt(coeff + pp.Suppress('*')) + ket)
state_expr = pp.Group(pp.Opt(sign) + term + pp.ZeroOrMore(sign + term))

modes_stmt = pp.Keyword('modes')('kind') + integer('count')
in_stmt = pp.Keyword('in')('kind') + state_expr('state')
bs_stmt = pp.Keyword('bs')('kind') + integer('i') + integer('j')
ps_stmt = pp.Keyword('ps')('kind') + integer('mode') + angle('phi')
det_stmt = (
    pp.Keyword('det')('kind') + integer('mode') + integer('clicks')
    + pp.Opt(pp.Suppress(pp.Keyword('eta2')) + pp.Suppress('=') + real('eta2'))
)
target_stmt = pp.Keyword('target')('kind') + state_expr('state')

statement = modes_stmt | in_stmt | bs_stmt | ps_stmt | det_stmt | target_stmt


def _state_from_tokens(tokens, line):
    amplitudes = {}
    mode_count = None
    pending = 1.0
    for token in tokens:
        if isinstance(token, str):
            pending = -1.0 if token == '-' else 1.0
            continue
        occupations = tuple(token['occupations'])
        coefficient = complex(token.get('re', 1.0), 0.0)
        if 'im' in token:
            imag = token['im'] if token['im_sign'] == '+' else -token['im']
            coefficient = complex(token['re'], imag)
        if mode_count is None:
            mode_count = len(occupations)
        elif len(occupations) != mode_count:
            raise CircuitError('ket {} has {} modes, expected {}'.format(
                occupations, len(occupations), mode_count), line=line)
        amplitudes[occupations] = amplitudes.get(occupations, 0j) + pending * coefficient
        pending = 1.0

    state = PureState(amplitudes, mode_count)
    norm = state.norm()
    if norm == 0.0:
        raise CircuitError('state expression sums to zero', line=line)
    return state.scaled(1.0 / norm)


def parse_statements(text, source='<string>'):
    """Yields (line number, parse results) for every non-blank line."""
    for number, raw in enumerate(text.splitlines(), 1):
        line = raw.split('#', 1)[0]
        if not line.strip():
            continue
        try:
            yield number, statement.parse_string(line, parse_all=True)
        except pp.ParseBaseException as e:
            raise ParseError(number, e.column, e.msg, source)


def parse_circuit(text, source='<string>', name=None):
    """
    Parses circuit-file text.

    Args:
        text: Circuit program.
        source: File name for error messages.
        name: Circuit name; defaults to the source's base name.

    Returns:
        Circuit.

    Raises:
        ParseError: syntax error.
        CircuitError: semantic error (mode out of range, consumed mode, dimension mismatch).
    """
    if name is None and source != '<string>':
        name = os.path.splitext(os.path.basename(source))[0]

    mode_count = None
    inputs = []
    elements, element_lines = [], []
    target, target_line = None, None

    for number, tokens in parse_statements(text, source):
        kind = tokens['kind']
        if kind == 'modes':
            if mode_count is not None:
                raise CircuitError('modes declared twice', line=number)
            if elements or inputs or target is not None:
                raise CircuitError('modes must be the first statement', line=number)
            if tokens['count'] < 1:
                raise CircuitError('a circuit needs at least one mode', line=number)
            mode_count = tokens['count']
            continue
        if mode_count is None:
            raise CircuitError('{} before modes declaration'.format(kind), line=number)

        try:
            if kind == 'in':
                inputs.append((number, _state_from_tokens(tokens['state'], number)))
            elif kind == 'target':
                if target is not None:
                    raise CircuitError('target declared twice', line=number)
                target, target_line = _state_from_tokens(tokens['state'], number), number
            elif kind == 'bs':
                elements.append(BeamSplitter(tokens['i'], tokens['j']))
                element_lines.append(number)
            elif kind == 'ps':
                elements.append(PhaseShifter(tokens['mode'], tokens['phi']))
                element_lines.append(number)
            else:
                elements.append(DetectorSpec(tokens['mode'], tokens['clicks'], tokens.get('eta2', 1.0)))
                element_lines.append(number)
        except (ElementError, MeasurementError, DimensionError) as e:
            raise CircuitError(str(e), line=number)

    if mode_count is None:
        raise CircuitError('missing modes declaration')
    if not inputs:
        raise CircuitError('missing input state (no in line)')

    input_state = inputs[0][1]
    for _, state in inputs[1:]:
        input_state = tensor_product(input_state, state)
    if input_state.mode_count != mode_count:
        raise CircuitError('input states span {} modes, circuit declares {}'.format(
            input_state.mode_count, mode_count), line=inputs[-1][0])

    return Circuit(mode_count, elements, input_state, target, name=name,
                   element_lines=element_lines, target_line=target_line)


def load_circuit(path):
    with io.open(path, 'rb') as f:
        data = f.read()
    try:
        text = data.decode('utf-8')
    except UnicodeDecodeError as e:
        line_start = data.rfind(b'\n', 0, e.start) + 1
        raise ParseError(data.count(b'\n', 0, e.start) + 1, e.start - line_start + 1, 'invalid UTF-8', path)
    return parse_circuit(text, source=path)
