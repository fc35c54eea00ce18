"""Constructions of the LOCC protocols analyzed in this app."""
from dataclasses import dataclass

import numpy as np

from .choices import Party
from .exceptions import DimensionMismatchError, OperatorValidationError, ParseError, UsageError
from .gates import H, I2, X, Z, clock, controlled, fourier, phase_gate, shift, swap
from .linalg import UnitaryOperator, as_matrix, is_unitary, maximally_entangled, tensor
from .protocols import Instrument, Layout, Leaf, LocalOperation, ProtocolNode, ProtocolTree, Subsystem


@dataclass(frozen=True, eq=False)
class ControlledUnitary:
    """(a (x) b) . sum_k |k><k| (x) u_k . (c (x) d).

    ``basis`` holds the |k> as columns (computational when omitted);
    ``local_after`` is (a, b) and ``local_before`` is (c, d).
    """
    unitaries: tuple
    basis: np.ndarray = None
    local_after: tuple = None
    local_before: tuple = None

    def __post_init__(self):
        unitaries = tuple(as_matrix(u) for u in self.unitaries)
        if not unitaries:
            raise UsageError("A controlled-unitary needs at least one branch")
        d_a, d_b = len(unitaries), unitaries[0].shape[0]
        if any(u.shape != (d_b, d_b) for u in unitaries):
            raise DimensionMismatchError("Controlled branches must share one dimension")
        if not all(is_unitary(u) for u in unitaries):
            raise OperatorValidationError("Every controlled branch must be unitary", code='not_unitary')
        basis = np.eye(d_a, dtype=complex) if self.basis is None else as_matrix(self.basis)
        if basis.shape != (d_a, d_a):
            raise DimensionMismatchError(f"Basis of shape {basis.shape} for {d_a} branches")
        if np.linalg.norm(basis.conj().T @ basis - np.eye(d_a), 2) > 1e-10:
            raise OperatorValidationError("Control basis is not orthonormal", code='not_orthonormal')
        object.__setattr__(self, 'unitaries', unitaries)
        object.__setattr__(self, 'basis', basis)
        for name in ('local_after', 'local_before'):
            pair = getattr(self, name)
            pair = (np.eye(d_a), np.eye(d_b)) if pair is None else tuple(as_matrix(m) for m in pair)
            if pair[0].shape != (d_a, d_a) or pair[1].shape != (d_b, d_b):
                raise DimensionMismatchError(f"{name} factors do not match dims ({d_a}, {d_b})")
            if not all(is_unitary(m) for m in pair):
                raise OperatorValidationError(f"{name} factors must be unitary", code='not_unitary')
            object.__setattr__(self, name, pair)

    @property
    def dims(self):
        return len(self.unitaries), self.unitaries[0].shape[0]

    def matrix(self):
        a, b = self.local_after
        c, d = self.local_before
        core = controlled(self.unitaries, self.basis)
        return UnitaryOperator(np.kron(a, b) @ core @ np.kron(c, d), self.dims)


def _two_party_layout(d_a, d_b, *extra):
    return Layout((Subsystem('A', d_a, Party.ALICE), Subsystem('B', d_b, Party.BOB)) + extra)


def build_relocalization_protocol(descriptor, name='relocalization'):
    """Alice measures {|k><k| a^dag}, Bob undoes (b u_k d) on B.

    After U = (a (x) b) C (c (x) d) acts on psi_A (x) psi_B, outcome k leaves
    B in b u_k d |psi_B>.
    """
    d_a, d_b = descriptor.dims
    a, b = descriptor.local_after
    _, d = descriptor.local_before
    projectors = [np.outer(descriptor.basis[:, k], descriptor.basis[:, k].conj()) @ a.conj().T
                  for k in range(d_a)]
    instrument = Instrument(Party.ALICE, ('A',), projectors, label='alice-control-measurement')
    children = {
        k: Leaf(corrections=(LocalOperation(Party.BOB, ('B',), (b @ u @ d).conj().T),), output=('B',))
        for k, u in enumerate(descriptor.unitaries)
    }
    return ProtocolTree(_two_party_layout(d_a, d_b), ProtocolNode(instrument, children), name=name)


def build_identity_protocol(dims=(2, 2), output=('B',), name='identity'):
    """Alice applies the trivial instrument {I}; nothing else happens."""
    instrument = Instrument(Party.ALICE, ('A',), (np.eye(dims[0]),), label='identity')
    root = ProtocolNode(instrument, {0: Leaf(output=tuple(output))})
    return ProtocolTree(_two_party_layout(*dims), root, name=name)


def bell_basis(d):
    """|Phi_jk> = (X^j Z^k (x) I)|Phi_d>, indexed j * d + k."""
    phi = maximally_entangled(d).amplitudes
    return [np.kron(pauli_pair(d, j, k), np.eye(d)) @ phi for j in range(d) for k in range(d)]


def pauli_pair(d, j, k):
    return shift(d, j) @ clock(d, k)


def build_teleportation_protocol(d=2, name=None):
    """Alice Bell-measures (A, A_r); Bob applies X^j Z^k on B."""
    layout = Layout((
        Subsystem('A', d, Party.ALICE),
        Subsystem('A_r', d, Party.ALICE),
        Subsystem('B', d, Party.BOB),
    ))
    projectors = [np.outer(v, v.conj()) for v in bell_basis(d)]
    instrument = Instrument(Party.ALICE, ('A', 'A_r'), projectors, label='bell-measurement')
    children = {
        j * d + k: Leaf((LocalOperation(Party.BOB, ('B',), pauli_pair(d, j, k)),), output=('B',))
        for j in range(d) for k in range(d)
    }
    return ProtocolTree(layout, ProtocolNode(instrument, children),
                        resource=maximally_entangled(d), resource_systems=('A_r', 'B'),
                        name=name or f'teleport-d{d}')


def build_one_bit_teleportation_protocol(d=2, name=None):
    """Relocation after the controlled shift with Bob's input fixed to |0>.

    sum_k psi_k |k>|k> measured by Alice in the Fourier basis leaves
    Z^{-m} psi on B.
    """
    basis = fourier(d)
    projectors = [np.outer(basis[:, m], basis[:, m].conj()) for m in range(d)]
    instrument = Instrument(Party.ALICE, ('A',), projectors, label='fourier-measurement')
    children = {
        m: Leaf((LocalOperation(Party.BOB, ('B',), clock(d, m)),), output=('B',))
        for m in range(d)
    }
    return ProtocolTree(_two_party_layout(d, d), ProtocolNode(instrument, children),
                        name=name or f'controlled-shift-one-bit-teleportation-d{d}')


def build_ea_implementation_protocol(u, name='ea-controlled-unitary'):
    """C_u on (A, B) from one shared Bell pair on (A_r, B_r).

    Alice copies A into A_r with a CNOT and reads A_r (outcome m). Bob undoes
    X^m on B_r, applies u from B_r onto B and reads B_r in the X basis
    (outcome s). Alice finishes with Z^s on A.
    """
    u = as_matrix(u)
    if u.shape != (2, 2):
        raise DimensionMismatchError(f"EA construction is for a 2 x 2 u, got {u.shape}")
    if not is_unitary(u):
        raise OperatorValidationError("u must be unitary", code='not_unitary')
    layout = Layout((
        Subsystem('A', 2, Party.ALICE),
        Subsystem('B', 2, Party.BOB),
        Subsystem('A_r', 2, Party.ALICE),
        Subsystem('B_r', 2, Party.BOB),
    ))
    cnot = controlled([I2, X])
    zero_one = [np.diag([1, 0]).astype(complex), np.diag([0, 1]).astype(complex)]
    plus_minus = [np.outer(H[:, s], H[:, s].conj()) for s in range(2)]
    alice_ops = [np.kron(I2, p) @ cnot for p in zero_one]
    controlled_u = controlled([I2, u])

    def bob_node(m):
        flip = np.linalg.matrix_power(X, m)
        ops = [np.kron(p, I2) @ controlled_u @ np.kron(flip, I2) for p in plus_minus]
        children = {
            s: Leaf((LocalOperation(Party.ALICE, ('A',), np.linalg.matrix_power(Z, s)),), output=('A', 'B'))
            for s in range(2)
        }
        return ProtocolNode(Instrument(Party.BOB, ('B_r', 'B'), ops, label=f'bob-measurement|{m}'), children)

    root = ProtocolNode(
        Instrument(Party.ALICE, ('A', 'A_r'), alice_ops, label='alice-measurement'),
        {m: bob_node(m) for m in range(2)},
    )
    return ProtocolTree(layout, root, resource=maximally_entangled(2),
                        resource_systems=('A_r', 'B_r'), name=name)


def build_swap_teleportation_protocol(name='swap-teleport-twice'):
    """U_SWAP from two Bell pairs: each party teleports its qubit to the other.

    The received qubit is corrected and swapped locally into the party's
    own input slot.
    """
    layout = Layout((
        Subsystem('A', 2, Party.ALICE),
        Subsystem('B', 2, Party.BOB),
        Subsystem('A_r1', 2, Party.ALICE),
        Subsystem('B_r1', 2, Party.BOB),
        Subsystem('A_r2', 2, Party.ALICE),
        Subsystem('B_r2', 2, Party.BOB),
    ))
    projectors = [np.outer(v, v.conj()) for v in bell_basis(2)]
    local_swap = swap(2).matrix

    def leaf(alice_outcome, bob_outcome):
        to_bob = local_swap @ np.kron(pauli_pair(2, *divmod(alice_outcome, 2)), I2)
        to_alice = local_swap @ np.kron(pauli_pair(2, *divmod(bob_outcome, 2)), I2)
        return Leaf((
            LocalOperation(Party.BOB, ('B_r1', 'B'), to_bob),
            LocalOperation(Party.ALICE, ('A_r2', 'A'), to_alice),
        ), output=('A', 'B'))

    def bob_node(alice_outcome):
        instrument = Instrument(Party.BOB, ('B', 'B_r2'), projectors, label=f'bob-bell|{alice_outcome}')
        return ProtocolNode(instrument, {r: leaf(alice_outcome, r) for r in range(4)})

    root = ProtocolNode(
        Instrument(Party.ALICE, ('A', 'A_r1'), projectors, label='alice-bell'),
        {r: bob_node(r) for r in range(4)},
    )
    pairs = tensor(maximally_entangled(2), maximally_entangled(2))
    return ProtocolTree(layout, root, resource=pairs,
                        resource_systems=('A_r1', 'B_r1', 'A_r2', 'B_r2'), name=name)


# =========================
# NAMED PROTOCOLS
# =========================

def _angle(name):
    try:
        return float(name.split(':', 1)[1])
    except ValueError as exc:
        raise ParseError(f"Bad angle in {name!r}") from exc


BUILTIN_PROTOCOLS = {
    'cnot-relocalization': lambda: build_relocalization_protocol(
        ControlledUnitary((I2, X)), name='cnot-relocalization'),
    'u-ex-one-piece': lambda: build_relocalization_protocol(
        ControlledUnitary((I2, X), local_after=(H, I2)), name='u-ex-one-piece'),
    'cnot-one-bit-teleportation': lambda: build_one_bit_teleportation_protocol(
        2, name='cnot-one-bit-teleportation'),
    'swap-identity': lambda: build_identity_protocol((2, 2), ('B',), name='swap-identity'),
    'ea-cnot': lambda: build_ea_implementation_protocol(X, name='ea-cnot'),
    'swap-teleport-twice': build_swap_teleportation_protocol,
}


def builtin_protocol(name):
    """Resolve a named protocol, including ``cphase-relocalization:<theta>``,
    ``ea-cphase:<theta>`` and ``teleport-d<d>``."""
    if name.startswith('cphase-relocalization:'):
        return build_relocalization_protocol(ControlledUnitary((I2, phase_gate(_angle(name)))), name=name)
    if name.startswith('ea-cphase:'):
        return build_ea_implementation_protocol(phase_gate(_angle(name)), name=name)
    if name.startswith('teleport-d'):
        try:
            d = int(name[len('teleport-d'):])
        except ValueError as exc:
            raise ParseError(f"Bad dimension in {name!r}") from exc
        if d < 2:
            raise UsageError(f"Teleportation needs d >= 2, got {d}")
        return build_teleportation_protocol(d)
    try:
        return BUILTIN_PROTOCOLS[name]()
    except KeyError:
        raise ParseError(
            f"Unknown protocol {name!r}; expected one of {sorted(BUILTIN_PROTOCOLS)}, "
            "cphase-relocalization:<theta>, ea-cphase:<theta> or teleport-d<d>"
        ) from None
