"""Dense complex linear algebra over tensor-product spaces.

Subsystem index 0 is the leftmost tensor factor, i.e. the most significant
digit of a computational-basis label, so ``|i>_A |j>_B`` sits at row
``i * d_B + j``.
"""
import math
from dataclasses import dataclass
from functools import reduce

import numpy as np
from scipy import linalg as sla

from .conf import resolve_tol
from .exceptions import DimensionMismatchError, OperatorValidationError, UsageError


def _frozen(array):
    array = np.array(array, dtype=complex, copy=True)
    array.flags.writeable = False
    return array


def _check_dims(dims, size):
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 2 for d in dims):
        raise UsageError(f"Subsystem dimensions must be >= 2, got {dims}")
    if math.prod(dims) != size:
        raise DimensionMismatchError(f"dims {dims} do not multiply to {size}")
    return dims


# =========================
# VALUE TYPES
# =========================

@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: np.ndarray
    dims: tuple

    def __post_init__(self):
        amplitudes = _frozen(self.amplitudes).reshape(-1)
        object.__setattr__(self, 'amplitudes', amplitudes)
        object.__setattr__(self, 'dims', _check_dims(self.dims, amplitudes.size))
        norm = np.linalg.norm(amplitudes)
        if abs(norm ** 2 - 1) > resolve_tol(None, 'NORM_TOL'):
            raise OperatorValidationError(
                f"State is not normalized (|psi|^2 = {norm ** 2:.3e})", code='not_normalized')

    @classmethod
    def normalized(cls, amplitudes, dims):
        vector = np.asarray(amplitudes, dtype=complex).reshape(-1)
        norm = np.linalg.norm(vector)
        if norm == 0:
            raise OperatorValidationError("Cannot normalize the zero vector", code='zero_vector')
        return cls(vector / norm, dims)

    @property
    def dimension(self):
        return self.amplitudes.size

    def density(self):
        return DensityOperator(np.outer(self.amplitudes, self.amplitudes.conj()), self.dims)


@dataclass(frozen=True, eq=False)
class DensityOperator:
    matrix: np.ndarray
    dims: tuple

    def __post_init__(self):
        matrix = _frozen(self.matrix)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DimensionMismatchError(f"Density matrix must be square, got {matrix.shape}")
        object.__setattr__(self, 'matrix', matrix)
        object.__setattr__(self, 'dims', _check_dims(self.dims, matrix.shape[0]))
        tol = resolve_tol(None, 'NORM_TOL')
        if np.max(np.abs(matrix - matrix.conj().T)) > tol:
            raise OperatorValidationError("Density matrix is not Hermitian", code='not_hermitian')
        if abs(np.trace(matrix) - 1) > tol:
            raise OperatorValidationError(
                f"Density matrix has trace {np.trace(matrix).real:.6g}", code='bad_trace')
        if np.min(np.linalg.eigvalsh(matrix)) < -1e-10:
            raise OperatorValidationError("Density matrix is not positive", code='not_positive')

    @classmethod
    def from_matrix(cls, matrix, dims):
        """Hermitize and trace-normalize ``matrix`` before validation."""
        matrix = np.asarray(matrix, dtype=complex)
        matrix = (matrix + matrix.conj().T) / 2
        return cls(matrix / np.trace(matrix).real, dims)


@dataclass(frozen=True, eq=False)
class UnitaryOperator:
    matrix: np.ndarray
    dims: tuple

    def __post_init__(self):
        matrix = _frozen(self.matrix)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DimensionMismatchError(f"Operator must be square, got {matrix.shape}")
        object.__setattr__(self, 'matrix', matrix)
        object.__setattr__(self, 'dims', _check_dims(self.dims, matrix.shape[0]))
        error = unitarity_error(matrix)
        if error > resolve_tol(None, 'OPERATOR_TOL'):
            raise OperatorValidationError(
                f"Operator is not unitary (|U^dag U - I| = {error:.3e})", code='not_unitary')


def as_matrix(op):
    return op.matrix if isinstance(op, (UnitaryOperator, DensityOperator)) else np.asarray(op, dtype=complex)


def unitarity_error(matrix):
    matrix = np.asarray(matrix, dtype=complex)
    return np.linalg.norm(matrix.conj().T @ matrix - np.eye(matrix.shape[0]), 2)


def is_unitary(matrix, tol=None):
    return unitarity_error(matrix) <= resolve_tol(tol, 'OPERATOR_TOL')


# =========================
# TENSOR STRUCTURE
# =========================

def tensor(a, b):
    """Kronecker product; subsystem order and dims are concatenated."""
    if isinstance(a, PureState) and isinstance(b, PureState):
        return PureState(np.kron(a.amplitudes, b.amplitudes), a.dims + b.dims)
    if isinstance(a, DensityOperator) and isinstance(b, DensityOperator):
        return DensityOperator.from_matrix(np.kron(a.matrix, b.matrix), a.dims + b.dims)
    if isinstance(a, UnitaryOperator) and isinstance(b, UnitaryOperator):
        return UnitaryOperator(np.kron(a.matrix, b.matrix), a.dims + b.dims)
    if isinstance(a, (PureState, DensityOperator, UnitaryOperator)) or \
            isinstance(b, (PureState, DensityOperator, UnitaryOperator)):
        raise UsageError(f"Cannot tensor {type(a).__name__} with {type(b).__name__}")
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def tensor_all(*items):
    return reduce(tensor, items)


def embed_operator(op, targets, dims):
    """Lift ``op`` acting on subsystems ``targets`` (in that order) to the full space."""
    op = as_matrix(op)
    dims = tuple(dims)
    targets = tuple(targets)
    n = len(dims)
    if len(set(targets)) != len(targets) or any(not 0 <= t < n for t in targets):
        raise UsageError(f"Invalid target subsystems {targets} for dims {dims}")
    d_target = math.prod(dims[t] for t in targets)
    if op.shape != (d_target, d_target):
        raise DimensionMismatchError(
            f"Operator of shape {op.shape} does not act on subsystems {targets} of {dims}")
    rest = [i for i in range(n) if i not in targets]
    order = list(targets) + rest
    full = np.kron(op, np.eye(math.prod(dims[i] for i in rest)))
    tensor_form = full.reshape([dims[i] for i in order] * 2)
    inverse = np.argsort(order)
    perm = list(inverse) + [n + i for i in inverse]
    total = math.prod(dims)
    return tensor_form.transpose(perm).reshape(total, total)


def realigned_svd(matrix, dims):
    """SVD of the realigned d_A^2 x d_B^2 matrix, in which a (x) b becomes vec(a) vec(b)^T."""
    d_a, d_b = dims
    matrix = np.asarray(matrix, dtype=complex)
    realigned = matrix.reshape(d_a, d_b, d_a, d_b).transpose(0, 2, 1, 3).reshape(d_a * d_a, d_b * d_b)
    return np.linalg.svd(realigned)


def relative_phase(matrix, product):
    """g with matrix ~ g * product, read off at the largest entry of ``product``."""
    pivot = np.unravel_index(np.argmax(np.abs(product)), product.shape)
    return matrix[pivot] / product[pivot]


def apply(op, state, targets=None):
    """Apply a unitary (or any square operator) to ``state`` on ``targets``."""
    if targets is None:
        matrix = as_matrix(op)
        if matrix.shape[0] != state.dimension:
            raise DimensionMismatchError(
                f"Operator of size {matrix.shape[0]} cannot act on a state of dims {state.dims}")
    else:
        matrix = embed_operator(op, targets, state.dims)
    return PureState.normalized(matrix @ state.amplitudes, state.dims)


def permute_subsystems(state, order):
    """Reorder subsystems so that new subsystem ``k`` is old subsystem ``order[k]``."""
    order = tuple(order)
    if sorted(order) != list(range(len(state.dims))):
        raise UsageError(f"{order} is not a permutation of the subsystems of {state.dims}")
    dims = tuple(state.dims[i] for i in order)
    amplitudes = state.amplitudes.reshape(state.dims).transpose(order).reshape(-1)
    return PureState(amplitudes, dims)


def _keep_indices(keep, n):
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise UsageError("partial_trace needs at least one subsystem to keep")
    if keep[0] < 0 or keep[-1] >= n:
        raise UsageError(f"Subsystem indices {keep} out of range for {n} subsystems")
    return keep


def partial_trace(rho, keep):
    """Reduced state on the ``keep`` subsystems (returned in ascending index order)."""
    if isinstance(rho, PureState):
        return _reduced_from_pure(rho, keep)
    dims = rho.dims
    n = len(dims)
    keep = _keep_indices(keep, n)
    rest = [i for i in range(n) if i not in keep]
    d_keep = math.prod(dims[i] for i in keep)
    d_rest = math.prod(dims[i] for i in rest)
    order = keep + rest
    tensor_form = rho.matrix.reshape(dims * 2).transpose(order + [n + i for i in order])
    blocks = tensor_form.reshape(d_keep, d_rest, d_keep, d_rest)
    reduced = np.einsum('ijkj->ik', blocks)
    return DensityOperator.from_matrix(reduced, tuple(dims[i] for i in keep))


def _reduced_from_pure(state, keep):
    dims = state.dims
    n = len(dims)
    keep = _keep_indices(keep, n)
    rest = [i for i in range(n) if i not in keep]
    d_keep = math.prod(dims[i] for i in keep)
    matrix = state.amplitudes.reshape(dims).transpose(keep + rest).reshape(d_keep, -1)
    return DensityOperator.from_matrix(matrix @ matrix.conj().T, tuple(dims[i] for i in keep))


# =========================
# DISTANCES
# =========================

def distance_up_to_global_phase(u, v):
    """min over phi of the operator norm of ``U - e^{i phi} V``.

    With W = V^dag U the problem reduces to the smallest arc covering the
    eigenphases of W: if it has length L, the distance is 2 sin(L / 4).
    """
    u, v = as_matrix(u), as_matrix(v)
    if u.shape != v.shape:
        raise DimensionMismatchError(f"Shape mismatch: {u.shape} vs {v.shape}")
    phases = np.sort(np.mod(np.angle(np.linalg.eigvals(v.conj().T @ u)), 2 * np.pi))
    gaps = np.diff(np.concatenate([phases, [phases[0] + 2 * np.pi]]))
    arc = 2 * np.pi - np.max(gaps)
    return float(2 * np.sin(arc / 4))


def fidelity(state, target):
    """Squared overlap for a pure target, Uhlmann fidelity when both are mixed."""
    if isinstance(target, PureState):
        if isinstance(state, PureState):
            return float(abs(np.vdot(target.amplitudes, state.amplitudes)) ** 2)
        return float(np.real(target.amplitudes.conj() @ state.matrix @ target.amplitudes))
    if isinstance(state, PureState):
        return fidelity(target, state)
    root = sla.sqrtm(state.matrix)
    return float(np.real(np.trace(sla.sqrtm(root @ target.matrix @ root))) ** 2)


# =========================
# STATE FACTORIES
# =========================

def basis_state(index, dims):
    dims = tuple(dims)
    vector = np.zeros(math.prod(dims), dtype=complex)
    vector[index] = 1
    return PureState(vector, dims)


def maximally_entangled(d):
    """|Phi_d> = sum_i |ii> / sqrt(d) on d x d."""
    return PureState(np.eye(d, dtype=complex).reshape(-1) / np.sqrt(d), (d, d))


def tomographic_states(d):
    """|i>, (|i>+|j>)/sqrt2, (|i>+i|j>)/sqrt2: d^2 states spanning the operators on C^d."""
    states = [basis_state(i, (d,)) for i in range(d)]
    for i in range(d):
        for j in range(i + 1, d):
            for phase in (1, 1j):
                vector = np.zeros(d, dtype=complex)
                vector[i], vector[j] = 1, phase
                states.append(PureState.normalized(vector, (d,)))
    return states


def haar_random_state(d, rng):
    vector = rng.normal(size=d) + 1j * rng.normal(size=d)
    return PureState.normalized(vector, (d,))
