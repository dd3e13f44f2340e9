"""
Sparse photon-number (Fock) states over a fixed number of optical modes.

States are finite mappings from occupation vectors to complex amplitudes. Every
object in this module is immutable after construction.
"""
from collections import defaultdict
import math

import numpy as np


PRUNE_THRESHOLD = 1e-12
PHASE_THRESHOLD = 1e-9


class DimensionError(ValueError):
    """Raised when two states (or a state and an index) disagree on the mode count."""


class ZeroProbabilityError(Exception):
    """Raised when a post-selection can never succeed (the conditioned state is zero)."""


class FockKet(tuple):

    """Occupation-number vector |n_1, ..., n_M>.

    A tuple subclass, so kets hash and compare like plain tuples and sort
    lexicographically.
    """

    def __new__(cls, occupations):
        occupations = tuple(occupations)
        for n in occupations:
            if isinstance(n, bool) or int(n) != n or n < 0:
                raise ValueError('occupations must be nonnegative integers, got {}'.format(occupations))
        return super(FockKet, cls).__new__(cls, (int(n) for n in occupations))

    @property
    def mode_count(self):
        return len(self)

    @property
    def total(self):
        return sum(self)

    def __repr__(self):
        return '|{}>'.format(','.join(str(n) for n in self))


class PureState(object):

    """Sparse state vector: a mapping FockKet -> complex amplitude over `mode_count` modes.

    Amplitudes with magnitude below `prune_threshold` are dropped on construction, so
    destructive interference leaves an exact structural zero.

    Args:
        amplitudes: Mapping (or iterable of pairs) from occupation tuples to amplitudes.
        mode_count: Number of modes. Inferred from the kets when omitted.
        prune_threshold: Magnitude below which amplitudes are discarded.
    """

    def __init__(self, amplitudes=None, mode_count=None, prune_threshold=PRUNE_THRESHOLD):
        items = amplitudes.items() if hasattr(amplitudes, 'items') else (amplitudes or ())
        summed = defaultdict(complex)
        for ket, amplitude in items:
            ket = FockKet(ket)
            if mode_count is None:
                mode_count = len(ket)
            if len(ket) != mode_count:
                raise DimensionError(
                    'ket {!r} has {} modes, state has {}'.format(ket, len(ket), mode_count))
            summed[ket] += complex(amplitude)

        if mode_count is None:
            raise DimensionError('mode_count is required for an empty state')
        self._mode_count = int(mode_count)
        self._amplitudes = {
            ket: amplitude for ket, amplitude in summed.items() if abs(amplitude) >= prune_threshold
        }

    @classmethod
    def from_ket(cls, occupations, amplitude=1.0):
        occupations = tuple(occupations)
        return cls({occupations: amplitude}, len(occupations))

    @classmethod
    def vacuum(cls, mode_count):
        return cls.from_ket((0,) * mode_count)

    @property
    def mode_count(self):
        return self._mode_count

    @property
    def amplitudes(self):
        return dict(self._amplitudes)

    def kets(self):
        return sorted(self._amplitudes)

    def items(self):
        return [(ket, self._amplitudes[ket]) for ket in sorted(self._amplitudes)]

    def __getitem__(self, ket):
        return self._amplitudes.get(tuple(ket), 0j)

    def __len__(self):
        return len(self._amplitudes)

    def __iter__(self):
        return iter(self.kets())

    def squared_norm(self):
        return math.fsum(abs(a) ** 2 for a in self._amplitudes.values())

    def norm(self):
        return math.sqrt(self.squared_norm())

    def photon_numbers(self):
        return sorted(set(ket.total for ket in self._amplitudes))

    def scaled(self, factor):
        return PureState(
            {ket: factor * a for ket, a in self._amplitudes.items()}, self._mode_count)

    def __add__(self, other):
        _check_modes(self, other)
        summed = dict(self._amplitudes)
        for ket, a in other._amplitudes.items():
            summed[ket] = summed.get(ket, 0j) + a
        return PureState(summed, self._mode_count)

    def __sub__(self, other):
        return self + other.scaled(-1.0)

    def __eq__(self, other):
        if not isinstance(other, PureState):
            return NotImplemented
        return self._mode_count == other._mode_count and self._amplitudes == other._amplitudes

    def __ne__(self, other):
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    __hash__ = None

    def __repr__(self):
        if not self._amplitudes:
            return 'PureState(0, modes={})'.format(self._mode_count)
        return ' + '.join(
            '({:.6g}){!r}'.format(a, ket) for ket, a in self.items())


class Ensemble(object):

    """Weighted list of pure branches: a mixed state stored without a density matrix.

    Args:
        branches: Iterable of (weight, PureState) pairs.
        labels: Optional outcome tag per branch (e.g. arrival pattern tuples).
    """

    def __init__(self, branches, labels=None):
        branches = [(float(w), s) for w, s in branches]
        if not branches:
            raise ValueError('an ensemble needs at least one branch')
        for w, _ in branches:
            if w < 0:
                raise ValueError('branch weights must be nonnegative, got {}'.format(w))
        mode_counts = set(s.mode_count for _, s in branches)
        if len(mode_counts) != 1:
            raise DimensionError('branch mode counts differ: {}'.format(sorted(mode_counts)))
        if labels is None:
            labels = [None] * len(branches)
        labels = list(labels)
        if len(labels) != len(branches):
            raise ValueError('got {} labels for {} branches'.format(len(labels), len(branches)))

        self._branches = tuple(branches)
        self._labels = tuple(labels)

    @classmethod
    def from_state(cls, state, label=None):
        return cls([(1.0, state)], [label])

    @classmethod
    def mixture(cls, parts):
        """Convex combination of ensembles given as (probability, Ensemble) pairs."""
        branches, labels = [], []
        for p, ensemble in parts:
            for (w, state), label in zip(ensemble.branches, ensemble.labels):
                branches.append((p * w, state))
                labels.append(label)
        return cls(branches, labels)

    @property
    def branches(self):
        return list(self._branches)

    @property
    def labels(self):
        return list(self._labels)

    @property
    def weights(self):
        return [w for w, _ in self._branches]

    @property
    def states(self):
        return [s for _, s in self._branches]

    @property
    def mode_count(self):
        return self._branches[0][1].mode_count

    def total_weight(self):
        return math.fsum(self.weights)

    def normalized(self):
        total = self.total_weight()
        if total <= 0:
            raise ZeroProbabilityError('ensemble has zero total weight')
        return Ensemble([(w / total, s) for w, s in self._branches], self._labels)

    def __len__(self):
        return len(self._branches)

    def __repr__(self):
        return 'Ensemble({})'.format(', '.join(
            '{}: {:.6g}'.format(label, w) for (w, _), label in zip(self._branches, self._labels)))


def _check_modes(a, b):
    if a.mode_count != b.mode_count:
        raise DimensionError('mode counts differ: {} vs {}'.format(a.mode_count, b.mode_count))


def canonical_phase(state, threshold=PHASE_THRESHOLD):
    """Rotates the global phase so the lexicographically smallest significant amplitude is real and positive."""
    for ket, amplitude in state.items():
        magnitude = abs(amplitude)
        if magnitude > threshold:
            rotation = amplitude.conjugate() / magnitude
            rotated = {k: a * rotation for k, a in state.items()}
            rotated[ket] = complex(magnitude, 0.0)
            return PureState(rotated, state.mode_count)
    return state


def normalize(state):
    """
    Rescales a state to unit norm and fixes its global phase.

    Args:
        state: PureState with at least one nonzero amplitude.

    Returns:
        Tuple (normalized PureState in canonical phase, original norm).

    Raises:
        ZeroProbabilityError: the state is zero, i.e. an upstream post-selection was impossible.
    """
    norm = state.norm()
    if norm == 0.0:
        raise ZeroProbabilityError('cannot normalize the zero state (impossible post-selection)')
    return canonical_phase(state.scaled(1.0 / norm)), norm


def inner_product(a, b):
    """<a|b>, conjugate-linear in the first argument."""
    _check_modes(a, b)
    small, large = (a, b) if len(a) <= len(b) else (b, a)
    total = 0j
    for ket in small.kets():
        other = large[ket]
        if other:
            total += a[ket].conjugate() * b[ket]
    return total


def tensor_product(a, b):
    """|a> (x) |b>: mode counts add, amplitudes multiply."""
    amplitudes = {}
    for ket_a, amp_a in a.items():
        for ket_b, amp_b in b.items():
            amplitudes[ket_a + ket_b] = amp_a * amp_b
    return PureState(amplitudes, a.mode_count + b.mode_count)


def fidelity(rho, target):
    """
    Fidelity <target|rho|target> of an ensemble with a pure target.

    Args:
        rho: Ensemble, normalized.
        target: PureState, normalized.

    Returns:
        Sum over branches of weight * |<target|branch>|^2.
    """
    if isinstance(rho, PureState):
        rho = Ensemble.from_state(rho)
    if rho.mode_count != target.mode_count:
        raise DimensionError(
            'ensemble has {} modes, target has {}'.format(rho.mode_count, target.mode_count))
    value = math.fsum(w * abs(inner_product(target, s)) ** 2 for w, s in rho.branches)
    return float(np.clip(value, 0.0, 1.0))


def equal_up_to_phase(a, b, atol=1e-10):
    """True when the normalized states differ only by a global phase."""
    if a.mode_count != b.mode_count:
        return False
    a, _ = normalize(a)
    b, _ = normalize(b)
    kets = set(a.kets()) | set(b.kets())
    return all(abs(a[k] - b[k]) <= atol for k in kets)


def noon_state(n, sign=1, relative_phase=None):
    """(|n,0> + e^{i theta}|0,n>)/sqrt(2); theta is pi for sign=-1 unless relative_phase is given."""
    if n < 1:
        raise ValueError('a NOON state needs at least one photon')
    if relative_phase is None:
        factor = complex(sign)
    else:
        factor = complex(np.exp(1j * relative_phase))
    return PureState({(n, 0): 1 / math.sqrt(2), (0, n): factor / math.sqrt(2)}, 2)
