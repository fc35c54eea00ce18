"""Whether pieces of quantum information stay localized, and the order this induces on unitaries."""
import numpy as np

from .cartan import is_lu_equiv_controlled_unitary
from .choices import DelocalizationOrder
from .exceptions import DimensionMismatchError, OperatorValidationError, UsageError
from .linalg import UnitaryOperator, partial_trace, realigned_svd, relative_phase


def is_piece_localized(frame, site, tol=1e-9):
    """True iff every frame state is |i'>_site (x) |xi> with one shared |xi> elsewhere."""
    frame = list(frame)
    if not frame:
        raise UsageError("A piece needs at least one frame state")
    dims = frame[0].dims
    if any(state.dims != dims for state in frame):
        raise DimensionMismatchError("Frame states live on different spaces")
    if not 0 <= site < len(dims):
        raise UsageError(f"Site {site} out of range for dims {dims}")
    gram = np.array([[np.vdot(a.amplitudes, b.amplitudes) for b in frame] for a in frame])
    if np.linalg.norm(gram - np.eye(len(frame)), 2) > tol:
        raise OperatorValidationError("Frame states are not orthonormal", code='not_orthonormal')
    rest = [i for i in range(len(dims)) if i != site]
    if not rest:
        return True
    reduced = [partial_trace(state, rest).matrix for state in frame]
    reference = reduced[0]
    if abs(np.trace(reference @ reference).real - 1) > tol:
        return False
    return all(np.linalg.norm(rho - reference, 2) < tol for rho in reduced[1:])


def _operator(u):
    if not isinstance(u, UnitaryOperator):
        raise UsageError("Expected a UnitaryOperator with bipartite dims")
    if len(u.dims) != 2:
        raise UsageError(f"Expected a bipartite operator, got dims {u.dims}")
    return u


def delocalizes_two_pieces(u, tol=1e-9):
    """True unless U is a product of local unitaries up to global phase."""
    u = _operator(u)
    _, values, _ = realigned_svd(u.matrix, u.dims)
    return bool(values[1] / values[0] > tol)


def local_factors(u, tol=1e-9):
    """(phase, u_A, u_B) with U = phase * (u_A (x) u_B); usage error for nonlocal U."""
    u = _operator(u)
    d_a, d_b = u.dims
    left, values, right = realigned_svd(u.matrix, u.dims)
    if values[1] / values[0] > tol:
        raise UsageError("Operator is not a product of local unitaries")
    a = left[:, 0].reshape(d_a, d_a)
    b = right[0, :].reshape(d_b, d_b)
    a = a / np.sqrt(np.trace(a.conj().T @ a).real / d_a)
    b = b / np.sqrt(np.trace(b.conj().T @ b).real / d_b)
    return complex(relative_phase(u.matrix, np.kron(a, b))), a, b


def compare_delocalization_power(u, v, tol=None):
    """Order by LOCC one-piece relocalizability: the relocalizable one delocalizes less."""
    u, v = _operator(u), _operator(v)
    if u.dims != (2, 2) or v.dims != (2, 2):
        return DelocalizationOrder.INCOMPARABLE
    u_ok, _ = is_lu_equiv_controlled_unitary(u, tol)
    v_ok, _ = is_lu_equiv_controlled_unitary(v, tol)
    if u_ok == v_ok:
        return DelocalizationOrder.EQUAL
    return DelocalizationOrder.LESS if u_ok else DelocalizationOrder.GREATER
