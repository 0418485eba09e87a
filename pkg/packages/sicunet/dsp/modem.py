"""Gray-mapped QPSK symbol mapping and hard decisions."""

from __future__ import annotations

import numpy as np
import numpy.typing as npt

from .types import BitArray, ComplexArray
from .validators import validate_bits

_INV_SQRT2 = 1.0 / np.sqrt(2.0)


def qpsk_modulate(bits: npt.ArrayLike) -> ComplexArray:
    """Map bit pairs onto unit-energy Gray-coded QPSK symbols.

    The first bit of each pair selects the sign of Q and the second bit the
    sign of I, giving 00 → (+1+j)/√2, 01 → (−1+j)/√2, 11 → (−1−j)/√2 and
    10 → (+1−j)/√2.
    """

    pairs = validate_bits(bits).reshape(-1, 2)
    in_phase = 1.0 - 2.0 * pairs[:, 1]
    quadrature = 1.0 - 2.0 * pairs[:, 0]
    return (in_phase + 1j * quadrature) * _INV_SQRT2


def qpsk_hard_decision(symbols: npt.ArrayLike) -> BitArray:
    """Invert :func:`qpsk_modulate` by quadrant; zero components decide as positive."""

    values = np.asarray(symbols, dtype=np.complex128).reshape(-1)
    bits = np.empty(values.size * 2, dtype=np.uint8)
    bits[0::2] = values.imag < 0
    bits[1::2] = values.real < 0
    return bits
