"""
Tests for the circuit-file parser.
"""
import math

import pytest

from circuit_parser import ParseError, load_circuit, parse_circuit
from circuits import CircuitError, run_circuit
from elements import BeamSplitter, PhaseShifter
from fock_core import equal_up_to_phase
from measurement import DetectorSpec

HOM = """
# single splitter
modes 2
in |1,1>
bs 0 1
target |2,0> + |0,2>
"""


class TestStatements:
    """Test the statement grammar."""

    def test_minimal_circuit(self, tol):
        """Test that the two-photon interference file parses and runs"""
        circuit = parse_circuit(HOM)
        assert circuit.mode_count == 2
        assert circuit.elements == (BeamSplitter(0, 1),)
        assert circuit.input_state.kets() == [(1, 1)]
        assert run_circuit(circuit).fidelity == pytest.approx(1.0, abs=tol)

    def test_pi_angles(self):
        """Test multiples and fractions of pi"""
        circuit = parse_circuit('modes 1\nin |1>\nps 0 pi\nps 0 -pi/2\nps 0 3pi/4\nps 0 0.25\n')
        assert [e.phi for e in circuit.elements] == [math.pi, -math.pi / 2, 3 * math.pi / 4, 0.25]

    def test_detector_efficiency(self):
        """Test the optional eta2 on detector lines"""
        circuit = parse_circuit('modes 3\nin |1,1,0>\ndet 2 0\ndet 1 1 eta2=0.88\n')
        assert circuit.elements == (DetectorSpec(2, 0, 1.0), DetectorSpec(1, 1, 0.88))
        assert circuit.remaining_modes == (0,)

    def test_comments_and_blank_lines(self):
        """Test that comments and blank lines are ignored"""
        circuit = parse_circuit('\n# header\nmodes 2   # two modes\n\nin |1,0>\n')
        assert circuit.elements == ()

    def test_name_from_source(self, sample_path):
        """Test that loaded circuits are named after their file"""
        assert load_circuit(sample_path('hom.qc')).name == 'hom'


class TestStateExpressions:
    """Test state expressions in in and target lines."""

    def test_signed_sum(self, inv_sqrt2, tol):
        """Test that a signed sum is normalized"""
        circuit = parse_circuit('modes 2\nin |2,0> - |0,2>\n')
        assert circuit.input_state[(2, 0)] == pytest.approx(inv_sqrt2, abs=tol)
        assert circuit.input_state[(0, 2)] == pytest.approx(-inv_sqrt2, abs=tol)

    def test_leading_sign_and_coefficients(self, tol):
        """Test real coefficients and a leading minus"""
        circuit = parse_circuit('modes 2\nin -0.6*|1,0> + 0.8*|0,1>\n')
        assert circuit.input_state[(1, 0)] == pytest.approx(-0.6, abs=tol)
        assert circuit.input_state[(0, 1)] == pytest.approx(0.8, abs=tol)

    def test_complex_coefficient(self, inv_sqrt2, tol):
        """Test a parenthesized complex coefficient"""
        circuit = parse_circuit('modes 2\nin (0-1i)*|1,0> + |0,1>\n')
        assert circuit.input_state[(1, 0)] == pytest.approx(-1j * inv_sqrt2, abs=tol)
        assert circuit.input_state[(0, 1)] == pytest.approx(inv_sqrt2, abs=tol)

    def test_repeated_ket_accumulates(self, tol):
        """Test that a ket listed twice has its coefficients summed"""
        circuit = parse_circuit('modes 1\nin |1> + |1>\n')
        assert circuit.input_state[(1,)] == pytest.approx(1.0, abs=tol)

    def test_multiple_inputs_tensored(self, inv_sqrt2, tol):
        """Test that repeated in lines are tensored in order"""
        circuit = parse_circuit('modes 4\nin |2,2>\nin |2,0> + |0,2>\n')
        assert circuit.input_state.kets() == [(2, 2, 0, 2), (2, 2, 2, 0)]
        assert circuit.input_state[(2, 2, 2, 0)] == pytest.approx(inv_sqrt2, abs=tol)

    def test_zero_expression(self):
        """Test that a sum cancelling to zero is rejected"""
        with pytest.raises(CircuitError) as e:
            parse_circuit('modes 1\nin |1> - |1>\n')
        assert e.value.line == 2

    def test_ragged_kets(self):
        """Test that kets within one expression share a length"""
        with pytest.raises(CircuitError):
            parse_circuit('modes 2\nin |1,0> + |0,1,0>\n')


class TestErrors:
    """Test error reporting."""

    def test_syntax_error_location(self):
        """Test that syntax errors carry line and column"""
        with pytest.raises(ParseError) as e:
            parse_circuit('modes 2\nin |1,1>\nbs 0 x\n', source='bad.qc')
        assert e.value.line == 3
        assert e.value.column >= 1
        assert str(e.value).startswith('bad.qc:3:')

    def test_unknown_statement(self):
        """Test that an unknown keyword is a syntax error"""
        with pytest.raises(ParseError) as e:
            parse_circuit('modes 2\nin |1,1>\nmirror 0\n')
        assert e.value.line == 3

    @pytest.mark.parametrize('literal', ['pi/0', '-3pi/0'])
    def test_zero_denominator(self, literal):
        """Test that an angle over zero is a syntax error at the angle"""
        with pytest.raises(ParseError) as e:
            parse_circuit('modes 2\nin |1,1>\nps 0 {}\n'.format(literal))
        assert e.value.line == 3
        assert e.value.column == 6
        assert 'zero denominator' in e.value.reason

    def test_invalid_utf8(self, tmp_path):
        """Test that undecodable bytes are a syntax error with their position"""
        path = tmp_path / 'bytes.qc'
        path.write_bytes(b'modes 2\n# \xff\xfe\nin |1,1>\n')
        with pytest.raises(ParseError) as e:
            load_circuit(str(path))
        assert (e.value.line, e.value.column) == (2, 3)
        assert e.value.reason == 'invalid UTF-8'

    def test_same_mode_beam_splitter(self):
        """Test that bs 0 0 is a semantic error on its line"""
        with pytest.raises(CircuitError) as e:
            parse_circuit('modes 2\nin |1,1>\nbs 0 0\n')
        assert e.value.line == 3

    def test_mode_out_of_range(self):
        """Test that an element past the declared modes reports its line"""
        with pytest.raises(CircuitError) as e:
            parse_circuit('modes 2\nin |1,1>\nbs 0 1\nps 2 pi\n')
        assert e.value.line == 4

    def test_consumed_mode(self):
        """Test that using a detected mode reports its line"""
        with pytest.raises(CircuitError) as e:
            parse_circuit('modes 3\nin |1,1,0>\ndet 2 0\nbs 1 2\n')
        assert e.value.line == 4

    def test_modes_first(self):
        """Test that modes must precede everything else"""
        with pytest.raises(CircuitError):
            parse_circuit('in |1,1>\nmodes 2\n')
        with pytest.raises(CircuitError):
            parse_circuit('modes 2\nmodes 2\nin |1,1>\n')

    def test_missing_input(self):
        """Test that a circuit needs an in line"""
        with pytest.raises(CircuitError):
            parse_circuit('modes 2\nbs 0 1\n')

    def test_missing_modes(self):
        """Test that an empty file has no modes declaration"""
        with pytest.raises(CircuitError):
            parse_circuit('# nothing\n')

    def test_input_dimension(self):
        """Test that the input must span the declared modes"""
        with pytest.raises(CircuitError) as e:
            parse_circuit('modes 3\nin |1,1>\n')
        assert e.value.line == 2

    def test_target_dimension(self):
        """Test that the target must match the modes left after detection"""
        with pytest.raises(CircuitError) as e:
            parse_circuit('modes 3\nin |1,1,0>\ndet 2 0\ntarget |1,1,0>\n')
        assert e.value.line == 4


class TestSampleCircuits:
    """Test the bundled circuit files."""

    def test_three_three(self, sample_path, noon4_minus, tol, state_tol):
        """Test the |3,3> scheme from its file"""
        circuit = load_circuit(sample_path('fig2_33.qc'))
        assert circuit.elements[1] == PhaseShifter(1, math.pi / 2)
        result = run_circuit(circuit)
        assert result.probability == pytest.approx(3 / 64.0, abs=tol)
        assert equal_up_to_phase(result.state, noon4_minus, atol=state_tol)
        assert result.fidelity == pytest.approx(1.0, abs=1e-10)

    def test_three_three_plus(self, sample_path, noon4_plus, state_tol):
        """Test that the extra quarter phase gives the plus NOON state"""
        result = run_circuit(load_circuit(sample_path('fig2_33_noon.qc')))
        assert equal_up_to_phase(result.state, noon4_plus, atol=state_tol)
        assert result.fidelity == pytest.approx(1.0, abs=1e-10)

    @pytest.mark.parametrize('name,probability', [
        ('hom.qc', 1.0),
        ('fig2_22.qc', 1 / 16.0),
        ('fig2_ancilla.qc', 3 / 64.0),
        ('fig2_55.qc', 75 / 4096.0),
        ('fig2_ancilla_44.qc', 27 / 4096.0),
        ('empty.qc', 1.0),
    ])
    def test_probabilities(self, sample_path, name, probability, tol):
        """Test the heralding probability of every bundled file"""
        result = run_circuit(load_circuit(sample_path(name)))
        assert result.probability == pytest.approx(probability, abs=tol)
        if result.fidelity is not None:
            assert result.fidelity == pytest.approx(1.0, abs=1e-9)
