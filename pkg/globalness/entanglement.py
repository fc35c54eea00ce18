"""Schmidt decomposition, entropy of entanglement and majorization (pure bipartite states)."""
import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import entropy as shannon_entropy

from .exceptions import DimensionMismatchError, OperatorValidationError, UsageError
from .linalg import apply, as_matrix, tensor


# Squared coefficients below this are treated as exact zeros (0 log 0 := 0).
CLAMP = 1e-12


@dataclass(frozen=True)
class Bipartition:
    left: tuple
    right: tuple

    @classmethod
    def split(cls, left, n):
        """``left`` subsystems against the rest of an ``n``-subsystem state."""
        left = tuple(sorted(set(int(i) for i in left)))
        return cls(left, tuple(i for i in range(n) if i not in left))

    def validate(self, n):
        if not self.left or not self.right:
            raise UsageError(f"Both sides of the cut must be nonempty: {self.left} | {self.right}")
        everything = sorted(self.left + self.right)
        if everything != list(range(n)):
            raise UsageError(f"Cut {self.left} | {self.right} does not partition {n} subsystems")


def _as_cut(cut, n):
    if cut is None:
        cut = Bipartition((0,), tuple(range(1, n)))
    elif not isinstance(cut, Bipartition):
        cut = Bipartition.split(cut, n)
    cut.validate(n)
    return cut


@dataclass(frozen=True, eq=False)
class SchmidtData:
    coefficients: np.ndarray
    basis_A: np.ndarray
    basis_B: np.ndarray
    cut: Bipartition

    @property
    def probabilities(self):
        return self.coefficients ** 2

    @property
    def schmidt_number(self):
        return int(np.sum(self.coefficients > 1e-10))

    def reconstruct(self):
        """sum_i lambda_i |a_i> (x) |b_i>, in (left, right) subsystem order."""
        return np.einsum('i,ai,bi->ab', self.coefficients, self.basis_A, self.basis_B).reshape(-1)


def schmidt_decompose(psi, cut=None):
    """SVD of the amplitude matrix reshaped across ``cut`` (default: first subsystem | rest)."""
    n = len(psi.dims)
    cut = _as_cut(cut, n)
    d_left = math.prod(psi.dims[i] for i in cut.left)
    matrix = psi.amplitudes.reshape(psi.dims).transpose(cut.left + cut.right).reshape(d_left, -1)
    left, values, right = np.linalg.svd(matrix)
    rank = len(values)
    return SchmidtData(
        coefficients=values,
        basis_A=left[:, :rank],
        basis_B=right[:rank, :].T,
        cut=cut,
    )


def schmidt_number(psi, cut=None):
    return schmidt_decompose(psi, cut).schmidt_number


def weights_entropy(probabilities, axis=-1):
    """Shannon entropy in bits of Schmidt weights along ``axis``; weights below CLAMP count as zero."""
    probabilities = np.asarray(probabilities, dtype=float)
    values = shannon_entropy(np.where(probabilities < CLAMP, 0.0, probabilities), base=2, axis=axis)
    return float(values) if np.ndim(values) == 0 else values


def entanglement_entropy(psi, cut=None):
    """Entropy of entanglement in ebits: -sum lambda_i^2 log2 lambda_i^2."""
    return weights_entropy(schmidt_decompose(psi, cut).probabilities)


def _spectrum(coefficients, name):
    values = np.asarray(coefficients, dtype=float).reshape(-1)
    if np.any(values < 0):
        raise OperatorValidationError(f"{name} has negative Schmidt coefficients", code='negative')
    total = np.sum(values ** 2)
    if abs(total - 1) > 1e-9:
        raise OperatorValidationError(
            f"{name} is not normalized (sum of squares = {total:.12g})", code='not_normalized')
    return np.sort(values ** 2)[::-1]


def majorization_convertible(lam, mu, slack=1e-10):
    """True iff lam^2 is majorized by mu^2, i.e. the lam-state converts to the mu-state by LOCC."""
    p, q = _spectrum(lam, 'lam'), _spectrum(mu, 'mu')
    size = max(p.size, q.size)
    p = np.pad(p, (0, size - p.size))
    q = np.pad(q, (0, size - q.size))
    return bool(np.all(np.cumsum(p) <= np.cumsum(q) + slack))


def locc_convertible(psi, phi, cut=None):
    """Whether |psi> can be turned into |phi> by LOCC across ``cut``."""
    return majorization_convertible(
        schmidt_decompose(psi, cut).coefficients, schmidt_decompose(phi, cut).coefficients)


def entanglement_cost_known_state(u, psi_a, psi_b):
    """Entanglement of U (psi_A (x) psi_B) across A:B."""
    matrix = as_matrix(u)
    product = tensor(psi_a, psi_b)
    if matrix.shape[0] != product.dimension:
        raise DimensionMismatchError(
            f"Operator of size {matrix.shape[0]} does not act on inputs {psi_a.dims} (x) {psi_b.dims}")
    output = apply(matrix, product)
    n_a = len(psi_a.dims)
    return entanglement_entropy(output, Bipartition.split(range(n_a), len(output.dims)))


def entanglement_cost_known_set(u, inputs):
    """Largest known-state cost over ``inputs`` (pairs of psi_A, psi_B)."""
    inputs = list(inputs)
    if not inputs:
        raise UsageError("At least one known input pair is required")
    return max(entanglement_cost_known_state(u, a, b) for a, b in inputs)

