from fractions import Fraction
import math

import numpy as np


# reflected mode picks up pi, transmitted mode pi/2
BEAM_SPLITTER = np.array([[-1.0, 1.0j], [1.0j, -1.0]]) / np.sqrt(2)


def embed_pair(matrix, i, j, mode_count):
    """
    Embeds a 2x2 single-photon transformation acting on modes (i, j) into
    an M x M identity.

    Args:
        matrix: Array of shape [2, 2]; column 0 is the image of mode i, column 1 of mode j.
        i: First mode index.
        j: Second mode index.
        mode_count: M.

    Returns:
        Complex array of shape [mode_count, mode_count].
    """
    full = np.eye(mode_count, dtype=complex)
    full[np.ix_([i, j], [i, j])] = matrix
    return full


def phase_matrix(mode, phi, mode_count):
    """Single-photon transformation of a phase shifter: identity with exp(i phi) at (mode, mode)."""
    full = np.eye(mode_count, dtype=complex)
    full[mode, mode] = np.exp(1j * phi)
    return full


def is_unitary(matrix, atol=1e-9):
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        return False
    return np.allclose(matrix.conj().T.dot(matrix), np.eye(matrix.shape[0]), atol=atol)


def pi_fraction(phi, max_denominator=64, atol=1e-12):
    """
    Returns phi / pi as a Fraction when phi is a small rational multiple of pi, else None.
    """
    ratio = Fraction(phi / math.pi).limit_denominator(max_denominator)
    if abs(float(ratio) * math.pi - phi) > atol:
        return None
    return ratio


def format_angle(phi):
    """Formats an angle as a pi-fraction literal when exact (pi/2, -3pi/4, 0), else as a float."""
    ratio = pi_fraction(phi)
    if ratio is None:
        return repr(float(phi))
    if ratio == 0:
        return '0'
    sign = '-' if ratio < 0 else ''
    numerator, denominator = abs(ratio.numerator), ratio.denominator
    text = '{}{}pi'.format(sign, numerator if numerator != 1 else '')
    if denominator != 1:
        text += '/{}'.format(denominator)
    return text
