"""
Reference implementations used to cross-check the sparse engine.

Two independent routes: symbolic expansion of creation-operator polynomials with
sympy, and dense state vectors over the truncated basis of every occupation vector
with at most N photons, stepped through element unitaries built with scipy.
Neither route calls the sparse element or measurement code.
"""
from collections import namedtuple, defaultdict
import logging
import math

import numpy as np
import scipy.linalg
from scipy.special import comb
import sympy

from base_engine import BaseEngine
from circuits import Circuit
from elements import BeamSplitter, PhaseShifter
from fock_core import Ensemble, PureState, ZeroProbabilityError, normalize


DENSE_MAX_PHOTONS = 10
DENSE_MAX_MODES = 6
ZERO_COEFFICIENT = 1e-13

# exact single-pair beam splitter: reflected mode picks up pi, transmitted pi/2
BEAM_SPLITTER_EXACT = sympy.Matrix([[-1, sympy.I], [sympy.I, -1]]) / sympy.sqrt(2)


class OracleError(ValueError):
    """Raised when the dense size guard is exceeded or a substitution matrix is unusable."""


class OpPolynomial(object):

    """Polynomial in commuting per-mode creation operators, applied to the vacuum.

    Args:
        terms: Mapping from exponent vectors to complex coefficients.
        mode_count: M. Inferred from the exponent vectors when omitted.
    """

    def __init__(self, terms, mode_count=None):
        cleaned = {}
        for exponents, coefficient in dict(terms).items():
            exponents = tuple(int(e) for e in exponents)
            if any(e < 0 for e in exponents):
                raise ValueError('exponents must be nonnegative, got {}'.format(exponents))
            if mode_count is None:
                mode_count = len(exponents)
            if len(exponents) != mode_count:
                raise ValueError('exponent vector {} does not have {} modes'.format(exponents, mode_count))
            coefficient = complex(coefficient)
            if abs(coefficient) > ZERO_COEFFICIENT:
                cleaned[exponents] = coefficient
        if mode_count is None:
            raise ValueError('mode_count is required for an empty polynomial')
        self.mode_count = mode_count
        self.terms = cleaned

    @classmethod
    def monomial(cls, exponents, coefficient=1.0):
        return cls({tuple(exponents): coefficient})

    @classmethod
    def from_state(cls, state):
        """Inverse of polynomial_to_state: coefficient = amplitude / sqrt(prod n_i!)."""
        return cls(
            {ket: amplitude / math.sqrt(_factorial_product(ket)) for ket, amplitude in state.items()},
            state.mode_count
        )

    def degrees(self):
        return sorted(set(sum(e) for e in self.terms))

    def __add__(self, other):
        terms = dict(self.terms)
        for exponents, coefficient in other.terms.items():
            terms[exponents] = terms.get(exponents, 0j) + coefficient
        return OpPolynomial(terms, self.mode_count)

    def __sub__(self, other):
        return self + other * -1.0

    def __mul__(self, other):
        if not isinstance(other, OpPolynomial):
            return OpPolynomial({e: c * other for e, c in self.terms.items()}, self.mode_count)
        terms = defaultdict(complex)
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                terms[tuple(a + b for a, b in zip(e1, e2))] += c1 * c2
        return OpPolynomial(terms, self.mode_count)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, OpPolynomial) and self.mode_count == other.mode_count and self.terms == other.terms

    __hash__ = None

    def __repr__(self):
        if not self.terms:
            return '0'
        parts = []
        for exponents in sorted(self.terms):
            factors = ['(a{}^dag)^{}'.format(i, e) for i, e in enumerate(exponents) if e]
            parts.append('({:.6g}){}'.format(self.terms[exponents], ''.join(factors) or '1'))
        return ' + '.join(parts)


def _factorial_product(occupations):
    return math.prod(math.factorial(n) for n in occupations)


def _as_sympy_matrix(mode_map):
    if isinstance(mode_map, sympy.MatrixBase):
        return mode_map
    array = np.asarray(mode_map, dtype=complex)
    if array.ndim != 2:
        raise OracleError('substitution map must be a matrix, got shape {}'.format(array.shape))
    return sympy.Matrix(array.tolist())


def substitute(poly, mode_map):
    """
    Replaces every creation operator by its image and re-expands.

    a_j^dag -> sum_k mode_map[k, j] a_k^dag, so column j of `mode_map` is the image of mode j.

    Args:
        poly: OpPolynomial over M modes.
        mode_map: M x M unitary, as a numpy array or an exact sympy Matrix.

    Returns:
        OpPolynomial; the total degree of every term is preserved.

    Raises:
        OracleError: the matrix is not square, does not match M, or is not unitary within 1e-9.
    """
    matrix = _as_sympy_matrix(mode_map)
    rows, cols = matrix.shape
    if rows != cols:
        raise OracleError('substitution map must be square, got {}x{}'.format(rows, cols))
    if rows != poly.mode_count:
        raise OracleError('substitution map is {}x{} for a {}-mode polynomial'.format(rows, cols, poly.mode_count))
    numeric = np.array(matrix.evalf(), dtype=complex)
    if not np.allclose(numeric.conj().T.dot(numeric), np.eye(rows), atol=1e-9):
        raise OracleError('substitution map is not unitary')

    generators = sympy.symbols('a0:{}'.format(poly.mode_count)) if poly.mode_count else ()
    images = [sum((matrix[k, j] * generators[k] for k in range(rows)), sympy.Integer(0)) for j in range(cols)]

    expression = sympy.Integer(0)
    for exponents, coefficient in sorted(poly.terms.items()):
        product = _to_sympy(coefficient)
        for image, power in zip(images, exponents):
            product *= image ** power
        expression += product

    expression = sympy.expand(expression)
    if not generators:
        return OpPolynomial({(): complex(expression)}, 0)
    terms = {
        exponents: complex(coefficient)
        for exponents, coefficient in sympy.Poly(expression, *generators).terms()
    }
    return OpPolynomial(terms, poly.mode_count)


def _to_sympy(value):
    """Integral parts stay exact, the rest become Floats."""
    real, imag = [
        sympy.Integer(int(part)) if float(part).is_integer() else sympy.Float(part)
        for part in (value.real, value.imag)
    ]
    return real + sympy.I * imag


def polynomial_to_state(poly):
    """
    Applies a creation-operator polynomial to the vacuum.

    Each exponent vector (n_1..n_M) becomes |n_1..n_M> with amplitude
    coefficient * sqrt(prod n_i!). Not normalized.
    """
    return PureState(
        {exponents: c * math.sqrt(_factorial_product(exponents)) for exponents, c in poly.terms.items()},
        poly.mode_count
    )


def element_matrix_exact(element, mode_count):
    """Single-photon transformation of one element as a sympy Matrix."""
    matrix = sympy.eye(mode_count)
    if isinstance(element, BeamSplitter):
        modes = [element.mode_i, element.mode_j]
        for r in range(2):
            for c in range(2):
                matrix[modes[r], modes[c]] = BEAM_SPLITTER_EXACT[r, c]
    else:
        phase = sympy.nsimplify(element.phi / math.pi, tolerance=1e-12, rational=True)
        matrix[element.mode, element.mode] = sympy.exp(sympy.I * sympy.pi * phase)
    return matrix


def prefix_circuit(circuit):
    """The linear elements before the first detector, as a detector-free circuit."""
    elements = []
    for element in circuit.elements:
        if not isinstance(element, (BeamSplitter, PhaseShifter)):
            break
        elements.append(element)
    return Circuit(circuit.mode_count, elements, circuit.input_state, name='{} (prefix)'.format(circuit.name))


def symbolic_prefix_state(circuit):
    """State just before the first detector, by substituting the input polynomial once."""
    prefix = prefix_circuit(circuit)
    matrix = sympy.eye(circuit.mode_count)
    for element in prefix.elements:
        matrix = element_matrix_exact(element, circuit.mode_count) * matrix
    return polynomial_to_state(substitute(OpPolynomial.from_state(circuit.input_state), matrix))


def truncated_basis(mode_count, max_photons):
    """All occupation vectors over `mode_count` modes with at most `max_photons` photons, lexicographic."""
    if mode_count == 0:
        return [()]
    basis = []
    for n in range(max_photons + 1):
        for rest in truncated_basis(mode_count - 1, max_photons - n):
            basis.append((n,) + rest)
    return basis


class DenseRegister(object):

    """Dense branch vectors over the truncated basis of the live modes."""

    def __init__(self, mode_count, max_photons, branches):
        self.mode_count = mode_count
        self.max_photons = max_photons
        self.basis = truncated_basis(mode_count, max_photons)
        self.index = {ket: i for i, ket in enumerate(self.basis)}
        self.branches = branches


def _pair_generator(matrix, max_photons):
    """
    Dense two-mode unitary on the basis {(p, q): p + q <= max_photons}, as expm of
    sum_{k,l} L[k, l] c_k^dag c_l with L = logm(matrix).
    """
    local = truncated_basis(2, max_photons)
    index = {ket: i for i, ket in enumerate(local)}
    log = scipy.linalg.logm(np.array(sympy.Matrix(matrix).evalf(), dtype=complex))
    generator = np.zeros((len(local), len(local)), dtype=complex)
    for column, ket in enumerate(local):
        for l in range(2):
            if ket[l] == 0:
                continue
            lowered = list(ket)
            lowered[l] -= 1
            for k in range(2):
                raised = list(lowered)
                raised[k] += 1
                generator[index[tuple(raised)], column] += log[k, l] * math.sqrt(ket[l] * raised[k])
    return local, index, scipy.linalg.expm(generator)


class DenseEngine(BaseEngine):

    """Runs circuits on dense vectors over the truncated Fock basis.

    Args:
        max_photons: Size guard on the input photon number.
        max_modes: Size guard on the mode count.
    """

    def __init__(self, max_photons=DENSE_MAX_PHOTONS, max_modes=DENSE_MAX_MODES, **kwargs):
        self.max_photons = max_photons
        self.max_modes = max_modes
        self._pair_cache = {}
        super(DenseEngine, self).__init__(**kwargs)

    def run(self, circuit):
        photons = circuit.photon_number
        if photons > self.max_photons or circuit.mode_count > self.max_modes:
            raise OracleError('dense reference limited to {} photons and {} modes, got {} and {}'.format(
                self.max_photons, self.max_modes, photons, circuit.mode_count))
        self._photons = photons
        return super(DenseEngine, self).run(circuit)

    def _pruned(self, vector):
        vector = vector.copy()
        vector[np.abs(vector) < self.prune_threshold] = 0.0
        return vector

    def prepare(self, state):
        register = DenseRegister(state.mode_count, self._photons, [])
        vector = np.zeros(len(register.basis), dtype=complex)
        for ket, amplitude in state.items():
            vector[register.index[ket]] = amplitude
        register.branches = [(1.0, vector, ())]
        return register

    def _pair_unitary(self, key, matrix):
        key = (key, self._photons)
        if key not in self._pair_cache:
            self._pair_cache[key] = _pair_generator(matrix, self._photons)
        return self._pair_cache[key]

    def apply_element(self, register, element, positions):
        if isinstance(element, PhaseShifter):
            position = positions[element.mode]
            phases = np.exp(1j * element.phi * np.array([ket[position] for ket in register.basis]))
            register.branches = [(w, self._pruned(v * phases), label) for w, v, label in register.branches]
            return register

        i, j = positions[element.mode_i], positions[element.mode_j]
        _, local_index, unitary = self._pair_unitary('bs', BEAM_SPLITTER_EXACT)

        groups = defaultdict(list)
        for position, ket in enumerate(register.basis):
            rest = tuple(n for m, n in enumerate(ket) if m not in (i, j))
            groups[rest].append(position)

        branches = []
        for weight, vector, label in register.branches:
            out = np.zeros_like(vector)
            for members in groups.values():
                local = [local_index[(register.basis[p][i], register.basis[p][j])] for p in members]
                out[members] = unitary[np.ix_(local, local)].dot(vector[members])
            branches.append((weight, self._pruned(out), label))
        register.branches = branches
        return register

    def detect(self, register, position, detector):
        reduced = DenseRegister(register.mode_count - 1, register.max_photons, [])
        occupations = np.array([ket[position] for ket in register.basis])
        targets = np.array([
            reduced.index[ket[:position] + ket[position + 1:]] for ket in register.basis
        ])

        branches = []
        for weight, vector, label in register.branches:
            for n in range(detector.clicks, register.max_photons + 1):
                mask = occupations == n
                part = np.zeros(len(reduced.basis), dtype=complex)
                part[targets[mask]] = vector[mask]
                arrival = float(np.vdot(part, part).real)
                click = comb(n, detector.clicks, exact=True) * detector.eta2 ** detector.clicks \
                    * (1.0 - detector.eta2) ** (n - detector.clicks)
                branch_weight = weight * click * arrival
                if branch_weight <= 0.0:
                    continue
                branches.append((branch_weight, part / math.sqrt(arrival), label + (n,)))

        total = math.fsum(w for w, _, _ in branches)
        if total <= 0.0:
            raise ZeroProbabilityError('{} clicks on mode {} is impossible for this state'.format(
                detector.clicks, detector.mode))
        reduced.branches = [(w / total, v, label) for w, v, label in branches]
        return reduced, total

    def finish(self, register):
        branches, labels = [], []
        for weight, vector, label in register.branches:
            amplitudes = {register.basis[i]: vector[i] for i in np.flatnonzero(vector)}
            branches.append((weight, PureState(amplitudes, register.mode_count)))
            labels.append(label)
        return Ensemble(branches, labels)


def dense_reference_run(circuit, **kwargs):
    """Runs a circuit on the dense engine; same contract as run_circuit."""
    return DenseEngine(**kwargs).run(circuit)


OracleDiff = namedtuple('OracleDiff', ['probability_delta', 'weight_delta', 'state_delta', 'symbolic_delta', 'matches'])


def _state_distance(a, b):
    a, _ = normalize(a)
    b, _ = normalize(b)
    kets = set(a.kets()) | set(b.kets())
    return max(abs(a[k] - b[k]) for k in kets) if kets else 0.0


def compare_results(sparse, dense, probability_atol=1e-12, state_atol=1e-10, symbolic=None):
    """
    Diffs two RunResults branch by branch (matched on arrival labels).

    Args:
        sparse: RunResult of run_circuit.
        dense: RunResult of dense_reference_run.
        probability_atol: Tolerance on the joint probability and branch weights.
        state_atol: Tolerance on canonical-phase amplitudes.
        symbolic: Optional (sparse pre-detection state, symbolic pre-detection state) pair.

    Returns:
        OracleDiff.
    """
    probability_delta = abs(sparse.probability - dense.probability)
    sparse_branches = dict(zip(sparse.per_branch_labels, sparse.output.branches))
    dense_branches = dict(zip(dense.per_branch_labels, dense.output.branches))

    weight_delta, state_delta = 0.0, 0.0
    if set(sparse_branches) != set(dense_branches):
        logging.warning('branch labels differ: {} vs {}'.format(sorted(sparse_branches), sorted(dense_branches)))
        weight_delta, state_delta = float('inf'), float('inf')
    else:
        for label, (weight, state) in sparse_branches.items():
            other_weight, other_state = dense_branches[label]
            weight_delta = max(weight_delta, abs(weight - other_weight))
            state_delta = max(state_delta, _state_distance(state, other_state))

    symbolic_delta = None
    if symbolic is not None:
        symbolic_delta = _state_distance(*symbolic)

    matches = (
        probability_delta <= probability_atol
        and weight_delta <= probability_atol
        and state_delta <= state_atol
        and (symbolic_delta is None or symbolic_delta <= state_atol)
    )
    logging.info('oracle diff: probability {}, weights {}, states {}, symbolic {}'.format(
        probability_delta, weight_delta, state_delta, symbolic_delta))
    return OracleDiff(probability_delta, weight_delta, state_delta, symbolic_delta, matches)
