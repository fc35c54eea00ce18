"""Named operators used throughout the analyses, plus random sampling helpers."""
import math

import numpy as np
from scipy.stats import unitary_group

from .exceptions import ParseError
from .linalg import UnitaryOperator

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
PAULIS = (X, Y, Z)


def phase_gate(theta):
    """S_theta = |0><0| + e^{i theta} |1><1|."""
    return np.diag([1, np.exp(1j * theta)]).astype(complex)


def shift(d, power=1):
    """Generalized X: |i> -> |i + 1 mod d>."""
    return np.linalg.matrix_power(np.roll(np.eye(d, dtype=complex), 1, axis=0), power % d)


def clock(d, power=1):
    """Generalized Z: |i> -> omega^i |i>."""
    omega = np.exp(2j * np.pi / d)
    return np.diag(omega ** (np.arange(d) * (power % d)))


def fourier(d):
    omega = np.exp(2j * np.pi / d)
    return np.array([[omega ** (j * k) for k in range(d)] for j in range(d)]) / np.sqrt(d)


def controlled(unitaries, basis=None):
    """C_{u_k} = sum_k |k><k| (x) u_k, with ``basis`` columns as |k> (default computational)."""
    unitaries = [np.asarray(u, dtype=complex) for u in unitaries]
    d_a = len(unitaries)
    basis = np.eye(d_a, dtype=complex) if basis is None else np.asarray(basis, dtype=complex)
    return sum(np.kron(np.outer(basis[:, k], basis[:, k].conj()), u)
               for k, u in enumerate(unitaries))


def cnot():
    return UnitaryOperator(controlled([I2, X]), (2, 2))


def cz():
    return UnitaryOperator(controlled([I2, Z]), (2, 2))


def cphase(theta):
    """C_{S_theta} = |0><0| (x) I + |1><1| (x) S_theta."""
    return UnitaryOperator(controlled([I2, phase_gate(theta)]), (2, 2))


def controlled_shift(d):
    """sum_k |k><k| (x) X^k on d x d; CNOT for d = 2."""
    return UnitaryOperator(controlled([shift(d, k) for k in range(d)]), (d, d))


def swap(d=2):
    matrix = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            matrix[j * d + i, i * d + j] = 1
    return UnitaryOperator(matrix, (d, d))


def u_ex():
    """|00> -> |00>, |01> <-> |10>, |11> -> -|11>."""
    matrix = np.array([[1, 0, 0, 0],
                       [0, 0, 1, 0],
                       [0, 1, 0, 0],
                       [0, 0, 0, -1]], dtype=complex)
    return UnitaryOperator(matrix, (2, 2))


def identity(dims=(2, 2)):
    return UnitaryOperator(np.eye(math.prod(dims), dtype=complex), tuple(dims))


def haar_unitary(d, rng):
    return unitary_group.rvs(d, random_state=rng)


def random_local(rng):
    """u (x) v with Haar-random single-qubit factors."""
    return np.kron(haar_unitary(2, rng), haar_unitary(2, rng))


BUILTIN_GATES = {
    'identity': identity,
    'cnot': cnot,
    'cz': cz,
    'swap': swap,
    'u-ex': u_ex,
}


def builtin_gate(name):
    """Resolve ``cnot``, ``swap``, ``u-ex``, ``cz``, ``identity`` or ``cphase:<theta>``."""
    if name.startswith('cphase:'):
        try:
            theta = float(name.split(':', 1)[1])
        except ValueError as exc:
            raise ParseError(f"Bad angle in {name!r}") from exc
        return cphase(theta)
    try:
        return BUILTIN_GATES[name]()
    except KeyError:
        raise ParseError(
            f"Unknown gate {name!r}; expected one of {sorted(BUILTIN_GATES)} or cphase:<theta>"
        ) from None
