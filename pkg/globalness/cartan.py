"""Two-qubit Cartan (KAK) decomposition and the globalness classes it induces.

Any U on 2 x 2 is written

    U = e^{i phi} (u_A (x) u_B) exp[i (gx XX + gy YY + gz ZZ)] (v_A (x) v_B)

with the coefficient triple canonicalized to pi/4 >= gx >= gy >= |gz|, and
gz >= 0 whenever gx = pi/4.
"""
import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg as sla

from .choices import GlobalnessKind
from .conf import resolve_tol
from .exceptions import DimensionMismatchError, OperatorValidationError, UsageError
from .gates import H, I2, PAULIS, phase_gate
from .linalg import UnitaryOperator, as_matrix, distance_up_to_global_phase, realigned_svd, relative_phase

logger = logging.getLogger(__name__)

MAGIC = np.array([[1, 0, 0, 1j],
                  [0, 1j, 1, 0],
                  [0, 1j, -1, 0],
                  [1, 0, 0, -1j]], dtype=complex) / np.sqrt(2)

# Row k holds the +-1 eigenvalues of P_k (x) P_k on the magic basis columns,
# so the diagonal phases theta_j = sum_k g_k * SIGNS[k, j] (+ global phase).
SIGNS = np.array([np.real(np.diag(MAGIC.conj().T @ np.kron(p, p) @ MAGIC)) for p in PAULIS])


@dataclass(frozen=True, eq=False)
class KakDecomposition:
    u_A: np.ndarray
    u_B: np.ndarray
    v_A: np.ndarray
    v_B: np.ndarray
    gamma: tuple
    global_phase: float

    def matrix(self):
        return reconstruct(self)

    def summary(self):
        return {
            'gamma': [float(g) for g in self.gamma],
            'gamma_over_pi': [float(g / np.pi) for g in self.gamma],
            'global_phase': float(self.global_phase),
        }


@dataclass(frozen=True)
class GlobalnessClass:
    kind: str
    cartan_number: int

    @property
    def relocalizable_two_piece(self):
        return self.cartan_number <= 1


def interaction(gamma):
    """exp[i (gx XX + gy YY + gz ZZ)]."""
    generator = sum(g * np.kron(p, p) for g, p in zip(gamma, PAULIS))
    return sla.expm(1j * generator)


def reconstruct(dec):
    left = np.kron(dec.u_A, dec.u_B)
    right = np.kron(dec.v_A, dec.v_B)
    return np.exp(1j * dec.global_phase) * left @ interaction(dec.gamma) @ right


# =========================
# LOCAL FACTORS
# =========================

def kron_factor(matrix):
    """Split ``matrix`` ~ g * (a (x) b) with a, b in SU(2).

    Uses the rank-one rearrangement: reshaping a (x) b so that each factor
    becomes a vector turns the Kronecker product into an outer product,
    whose leading singular pair recovers both factors.
    """
    matrix = np.asarray(matrix, dtype=complex)
    left, values, right = realigned_svd(matrix, (2, 2))
    a = np.sqrt(values[0]) * left[:, 0].reshape(2, 2)
    b = np.sqrt(values[0]) * right[0, :].reshape(2, 2)
    a = a / np.sqrt(np.linalg.det(a))
    b = b / np.sqrt(np.linalg.det(b))
    return relative_phase(matrix, np.kron(a, b)), a, b


def _simultaneous_orthogonal_eigvecs(symmetric_unitary):
    """Real orthogonal O diagonalizing the complex symmetric unitary M = A + iB.

    A and B are real symmetric and commute, so a generic real combination of
    them has an eigenbasis shared by both, degenerate subspaces included.
    """
    real, imag = symmetric_unitary.real, symmetric_unitary.imag
    for weight in (0.5772156649, 1.4142135623, 2.7182818284, 0.3183098861):
        _, basis = sla.eigh(real + weight * imag)
        rotated = basis.T @ symmetric_unitary @ basis
        if np.max(np.abs(rotated - np.diag(np.diag(rotated)))) < 1e-9:
            return basis
    raise OperatorValidationError(
        "Failed to diagonalize U_m^T U_m with a real orthogonal basis", code='not_diagonalizable')


def _magic_factor(orthogonal):
    """Local unitaries a, b with M O M^dag = g (a (x) b) for O in SO(4)."""
    return kron_factor(MAGIC @ orthogonal @ MAGIC.conj().T)


# =========================
# CANONICALIZATION
# =========================

class _Canonicalizer:
    """Moves gamma into the chamber while tracking the compensating local unitaries.

    Each move rewrites exp(i g.PP) as L exp(i g'.PP) R with single-qubit
    L = l_A (x) l_B and R = r_A (x) r_B, so the original operator equals
    phase * (l_A (x) l_B) exp(i g'.PP) (r_A (x) r_B) at every step.
    """

    # i*P_k anticommutes with the other two Paulis, flipping their signs.
    FLIPPERS = tuple(1j * p for p in PAULIS)
    # Entry k swaps the two axes other than k.
    SWAPPERS = (
        np.array([[1, -1j], [1j, -1]]) * 1j * np.sqrt(0.5),
        np.array([[1, 1], [1, -1]]) * 1j * np.sqrt(0.5),
        np.array([[0, 1 - 1j], [1 + 1j, 0]]) * 1j * np.sqrt(0.5),
    )

    def __init__(self, gamma, atol):
        self.v = list(gamma)
        self.atol = atol
        self.phase = complex(1)
        self.left = [I2, I2]
        self.right = [I2, I2]

    def shift(self, k, step):
        # exp(i pi/2 PP) = i PP
        self.v[k] += step * np.pi / 2
        self.phase *= 1j ** step
        flip = np.linalg.matrix_power(self.FLIPPERS[k], step % 4)
        self.right = [flip @ self.right[0], flip @ self.right[1]]

    def negate(self, k1, k2):
        self.v[k1] *= -1
        self.v[k2] *= -1
        self.phase *= -1
        s = self.FLIPPERS[3 - k1 - k2]
        self.left[1] = self.left[1] @ s
        self.right[1] = s @ self.right[1]

    def swap(self, k1, k2):
        self.v[k1], self.v[k2] = self.v[k2], self.v[k1]
        s = self.SWAPPERS[3 - k1 - k2]
        self.left = [self.left[0] @ s, self.left[1] @ s]
        self.right = [s @ self.right[0], s @ self.right[1]]

    def into_range(self, k):
        while self.v[k] <= -np.pi / 4:
            self.shift(k, +1)
        while self.v[k] > np.pi / 4:
            self.shift(k, -1)

    def sort(self):
        if abs(self.v[0]) < abs(self.v[1]):
            self.swap(0, 1)
        if abs(self.v[1]) < abs(self.v[2]):
            self.swap(1, 2)
        if abs(self.v[0]) < abs(self.v[1]):
            self.swap(0, 1)

    def run(self):
        for k in range(3):
            self.into_range(k)
        self.sort()
        if self.v[0] < 0:
            self.negate(0, 2)
        if self.v[1] < 0:
            self.negate(1, 2)
        self.into_range(2)
        if self.v[0] > np.pi / 4 - self.atol and self.v[2] < 0:
            # local Z conjugation: (pi/4, y, -z) ~ (pi/4, y, z)
            self.shift(0, -1)
            self.negate(0, 2)
        # snap tiny negative zeros so gz >= 0 on the boundary reads cleanly
        self.v = [0.0 if abs(g) < 1e-15 else g for g in self.v]
        return self


# =========================
# DECOMPOSITION
# =========================

def _as_two_qubit(u):
    if isinstance(u, UnitaryOperator):
        if u.dims != (2, 2):
            raise UsageError(f"KAK needs a 2 x 2 operator, got dims {u.dims}")
        return u.matrix
    matrix = np.asarray(u, dtype=complex)
    if matrix.shape != (4, 4):
        raise DimensionMismatchError(f"KAK needs a 4x4 matrix, got {matrix.shape}")
    return UnitaryOperator(matrix, (2, 2)).matrix


def kak_decompose(u):
    """Cartan decomposition of a two-qubit unitary (magic-basis diagonalization)."""
    matrix = _as_two_qubit(u)
    u_magic = MAGIC.conj().T @ matrix @ MAGIC
    # u_magic = K1 D K2 with K1, K2 in SO(4)  =>  u_magic^T u_magic = K2^T D^2 K2
    basis = _simultaneous_orthogonal_eigvecs(u_magic.T @ u_magic)
    if np.linalg.det(basis) < 0:
        basis[:, 0] *= -1
    squared = np.diag(basis.T @ u_magic.T @ u_magic @ basis)
    diagonal = np.sqrt(squared)
    k1 = u_magic @ basis @ np.diag(1 / diagonal)
    if np.linalg.det(k1.real) < 0:
        diagonal[0] *= -1
        k1[:, 0] *= -1
    k1 = k1.real

    g_left, a1, a0 = _magic_factor(k1)
    g_right, b1, b0 = _magic_factor(basis.T)
    angles = np.angle(diagonal)
    w = np.mean(angles)
    raw_gamma = SIGNS @ angles / 4

    canon = _Canonicalizer(raw_gamma, resolve_tol(None, 'CHAMBER_TOL')).run()
    phase = np.exp(1j * w) * g_left * g_right * canon.phase
    dec = KakDecomposition(
        u_A=a1 @ canon.left[0],
        u_B=a0 @ canon.left[1],
        v_A=canon.right[0] @ b1,
        v_B=canon.right[1] @ b0,
        gamma=tuple(float(g) for g in canon.v),
        global_phase=float(np.mod(np.angle(phase), 2 * np.pi)),
    )
    logger.debug("KAK gamma/pi = %s", np.round(np.array(dec.gamma) / np.pi, 12))
    error = np.linalg.norm(reconstruct(dec) - matrix, 2)
    if error > 1e-8:
        logger.warning("KAK reconstruction error %.3e exceeds 1e-8", error)
    return dec


def cartan_number(dec, tol=None):
    tol = resolve_tol(tol, 'CARTAN_ZERO_TOL')
    return int(sum(abs(g) > tol for g in dec.gamma))


def classify(dec, tol=None):
    number = cartan_number(dec, tol)
    chamber_tol = resolve_tol(None, 'CHAMBER_TOL')
    if number == 0:
        kind = GlobalnessKind.LOCAL
    elif number == 1:
        kind = GlobalnessKind.CONTROLLED_UNITARY
    elif all(abs(g - np.pi / 4) < chamber_tol for g in dec.gamma):
        kind = GlobalnessKind.SWAP
    else:
        kind = GlobalnessKind.GENERAL_GLOBAL
    return GlobalnessClass(kind=str(kind), cartan_number=number)


def is_lu_equiv_controlled_unitary(u, tol=None):
    """Relocalizable with both inputs unknown iff the Cartan number is at most 1."""
    label = classify(kak_decompose(u), tol)
    return label.cartan_number <= 1, label


# =========================
# INVARIANTS
# =========================

def makhlin_invariants(u):
    """(G1, G2) of the local-equivalence class, from m = U_B^T U_B in the magic basis."""
    matrix = as_matrix(u)
    u_magic = MAGIC.conj().T @ matrix @ MAGIC
    m = u_magic.T @ u_magic
    det = np.linalg.det(matrix)
    trace = np.trace(m)
    g1 = trace ** 2 / (16 * det)
    g2 = (trace ** 2 - np.trace(m @ m)) / (4 * det)
    return complex(g1), float(g2.real)


def invariants_consistent(u, dec, tol=1e-8):
    """Cross-check: U and the bare interaction exp(i gamma.PP) share Makhlin invariants."""
    g1, g2 = makhlin_invariants(u)
    h1, h2 = makhlin_invariants(interaction(dec.gamma))
    consistent = abs(g1 - h1) < tol and abs(g2 - h2) < tol
    if not consistent:
        logger.warning("Makhlin invariants disagree: (%s, %s) vs (%s, %s)", g1, g2, h1, h2)
    return consistent


# =========================
# CONTROLLED FORM
# =========================

def controlled_form(u, tol=None):
    """Rewrite a Cartan-number <= 1 unitary as (a (x) b) C_{S_{4 gx}} (c (x) d).

    exp(i g XX) = (H (x) H) exp(i g ZZ) (H (x) H) and
    exp(i g ZZ) = e^{i g} (S_{-2g} (x) S_{-2g}) C_{S_{4g}}.
    """
    from .builders import ControlledUnitary

    dec = kak_decompose(u)
    if cartan_number(dec, tol) > 1:
        raise UsageError("Operator is not locally equivalent to a controlled-unitary")
    g = dec.gamma[0]
    outer = H @ phase_gate(-2 * g)
    return ControlledUnitary(
        unitaries=(I2, phase_gate(4 * g)),
        local_after=(np.exp(1j * (dec.global_phase + g)) * dec.u_A @ outer, dec.u_B @ outer),
        local_before=(H @ dec.v_A, H @ dec.v_B),
    )


def check_against(u, dec, tol=1e-8):
    """True when ``dec`` reproduces ``u`` up to global phase within ``tol``."""
    return distance_up_to_global_phase(reconstruct(dec), as_matrix(u)) < tol

