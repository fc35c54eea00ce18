"""Finite LOCC protocols as measurement trees, and their exhaustive execution.

A protocol runs on a fixed layout of named subsystems, each owned by Alice
or Bob. Every tree node is one party's instrument on some of its own
subsystems; children are indexed by outcome. Leaves carry final local
corrections and the subsystems that make up the protocol's output.

Along every branch the operators each party applies multiply into that
party's accumulated operator, latest on the left.
"""
import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .choices import Party
from .conf import resolve_tol
from .entanglement import Bipartition, entanglement_entropy
from .exceptions import DimensionMismatchError, OperatorValidationError, UsageError
from .linalg import (
    DensityOperator, PureState, as_matrix, embed_operator, is_unitary, partial_trace,
    permute_subsystems, tensor_all,
)

logger = logging.getLogger(__name__)

# Branches reached with smaller probability are not enumerated.
PRUNE = 1e-14


def _party(value):
    """Plain "A" / "B" string for a party given as a value or a Party member."""
    try:
        return Party(value).value
    except ValueError:
        raise UsageError(f"Unknown party {value!r}; expected A or B") from None


# =========================
# LAYOUT
# =========================

@dataclass(frozen=True)
class Subsystem:
    name: str
    dim: int
    party: str

    def __post_init__(self):
        object.__setattr__(self, 'party', _party(self.party))
        object.__setattr__(self, 'dim', int(self.dim))


@dataclass(frozen=True)
class Layout:
    subsystems: tuple

    def __post_init__(self):
        subsystems = tuple(self.subsystems)
        object.__setattr__(self, 'subsystems', subsystems)
        names = [s.name for s in subsystems]
        if len(set(names)) != len(names):
            raise UsageError(f"Duplicate subsystem names in {names}")
        for s in subsystems:
            if s.dim < 2:
                raise UsageError(f"Subsystem {s.name!r} has dimension {s.dim}")

    @property
    def names(self):
        return tuple(s.name for s in self.subsystems)

    @property
    def dims(self):
        return tuple(s.dim for s in self.subsystems)

    def index(self, name):
        try:
            return self.names.index(name)
        except ValueError:
            raise UsageError(f"Unknown subsystem {name!r}; layout has {self.names}") from None

    def indices(self, names):
        return tuple(self.index(n) for n in names)

    def dim(self, name):
        return self.subsystems[self.index(name)].dim

    def party_of(self, name):
        return self.subsystems[self.index(name)].party

    def party_indices(self, party):
        return tuple(i for i, s in enumerate(self.subsystems) if s.party == party)

    def party_dims(self, party):
        return tuple(self.subsystems[i].dim for i in self.party_indices(party))

    def party_dimension(self, party):
        return math.prod(self.party_dims(party))

    def ordered(self, names):
        """``names`` sorted by layout position."""
        return tuple(sorted(names, key=self.index))

    def local_operator(self, party, systems, matrix):
        """Lift ``matrix`` on ``systems`` to the whole local space of ``party``."""
        for name in systems:
            if self.party_of(name) != party:
                raise UsageError(f"Party {party} cannot act on {name!r}, which belongs to "
                                 f"{self.party_of(name)}")
        own = self.party_indices(party)
        targets = tuple(own.index(self.index(n)) for n in systems)
        return embed_operator(matrix, targets, self.party_dims(party))

    def joint_operator(self, acc_A, acc_B):
        """acc_A (x) acc_B on the full layout."""
        order = self.party_indices(Party.ALICE) + self.party_indices(Party.BOB)
        return embed_operator(np.kron(acc_A, acc_B), order, self.dims)

    def extended(self, *subsystems):
        return Layout(self.subsystems + tuple(subsystems))


# =========================
# TREE
# =========================

@dataclass(frozen=True, eq=False)
class Instrument:
    party: str
    systems: tuple
    operators: tuple
    label: str = ''

    def __post_init__(self):
        object.__setattr__(self, 'party', _party(self.party))
        object.__setattr__(self, 'systems', tuple(self.systems))
        object.__setattr__(self, 'operators', tuple(as_matrix(m) for m in self.operators))
        if not self.operators:
            raise UsageError(f"Instrument {self.label!r} has no operators")

    def completeness_error(self):
        d = self.operators[0].shape[1]
        total = sum(m.conj().T @ m for m in self.operators)
        return float(np.linalg.norm(total - np.eye(d), 2))


@dataclass(frozen=True, eq=False)
class LocalOperation:
    party: str
    systems: tuple
    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'party', _party(self.party))
        object.__setattr__(self, 'systems', tuple(self.systems))
        object.__setattr__(self, 'matrix', as_matrix(self.matrix))
        if not is_unitary(self.matrix):
            raise OperatorValidationError(
                f"Correction on {self.systems} is not unitary", code='not_unitary')


@dataclass(frozen=True, eq=False)
class Leaf:
    corrections: tuple = ()
    output: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, 'corrections', tuple(self.corrections))
        object.__setattr__(self, 'output', tuple(self.output))


@dataclass(frozen=True, eq=False)
class ProtocolNode:
    instrument: Instrument
    children: dict = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class ProtocolTree:
    layout: Layout
    root: object
    resource: PureState = None
    resource_systems: tuple = ()
    name: str = ''

    def __post_init__(self):
        object.__setattr__(self, 'resource_systems', tuple(self.resource_systems))
        if self.resource is not None:
            dims = tuple(self.layout.dim(n) for n in self.resource_systems)
            if dims != self.resource.dims:
                raise DimensionMismatchError(
                    f"Resource dims {self.resource.dims} do not match {self.resource_systems} {dims}")
        self._validate(self.root)

    def _validate(self, node):
        if isinstance(node, Leaf):
            for op in node.corrections:
                self.layout.local_operator(op.party, op.systems, op.matrix)
            if not node.output:
                raise UsageError("Every leaf must declare its output subsystems")
            self.layout.indices(node.output)
            return
        instrument = node.instrument
        for m in instrument.operators:
            self.layout.local_operator(instrument.party, instrument.systems, m)
        outcomes = set(range(len(instrument.operators)))
        missing = outcomes - set(node.children)
        if missing:
            raise UsageError(f"Node {instrument.label!r} has no child for outcomes {sorted(missing)}")
        extra = set(node.children) - outcomes
        if extra:
            raise UsageError(f"Node {instrument.label!r} has children for unknown outcomes {sorted(extra)}")
        for child in node.children.values():
            self._validate(child)

    def nodes(self):
        stack = [self.root]
        while stack:
            node = stack.pop()
            if isinstance(node, ProtocolNode):
                yield node
                stack.extend(node.children.values())

    def leaves(self):
        return [leaf for _, _, leaf in iter_branches(self)]

    def outputs(self):
        """The distinct declared outputs, each in layout order."""
        return {self.layout.ordered(leaf.output) for leaf in self.leaves()}

    def check_completeness(self, tol=None):
        tol = resolve_tol(tol, 'OPERATOR_TOL')
        for node in self.nodes():
            error = node.instrument.completeness_error()
            if error > tol:
                raise OperatorValidationError(
                    f"Instrument {node.instrument.label or '<unlabelled>'!r} violates completeness "
                    f"(|sum M^dag M - I| = {error:.3e})", code='incomplete')

    def resource_ebits(self):
        """Entanglement of the resource across Alice's and Bob's resource subsystems."""
        if self.resource is None:
            return 0.0
        alice = [i for i, n in enumerate(self.resource_systems)
                 if self.layout.party_of(n) == Party.ALICE]
        if not alice or len(alice) == len(self.resource_systems):
            return 0.0
        cut = Bipartition.split(alice, len(self.resource_systems))
        return entanglement_entropy(self.resource, cut)

    def with_subsystems(self, *subsystems):
        return replace(self, layout=self.layout.extended(*subsystems))

    def prepare(self, parts):
        """Initial state from ``(names, PureState)`` parts plus the resource, in layout order."""
        parts = list(parts)
        if self.resource is not None:
            parts.append((self.resource_systems, self.resource))
        names = [n for part_names, _ in parts for n in part_names]
        if sorted(self.layout.indices(names)) != list(range(len(self.layout.names))):
            raise UsageError(f"Inputs {names} do not cover the layout {self.layout.names}")
        for part_names, state in parts:
            dims = tuple(self.layout.dim(n) for n in part_names)
            if dims != state.dims:
                raise DimensionMismatchError(f"State of dims {state.dims} placed on {part_names} {dims}")
        joint = tensor_all(*[state for _, state in parts])
        positions = self.layout.indices(names)
        return permute_subsystems(joint, tuple(int(i) for i in np.argsort(positions)))


def iter_branches(tree):
    """Structural walk: yields ``(outcomes, steps, leaf)`` where steps are (party, systems, matrix)."""
    def walk(node, outcomes, steps):
        if isinstance(node, Leaf):
            corrections = [(op.party, op.systems, op.matrix) for op in node.corrections]
            yield outcomes, steps + corrections, node
            return
        instrument = node.instrument
        for r, child in sorted(node.children.items()):
            step = (instrument.party, instrument.systems, instrument.operators[r])
            yield from walk(child, outcomes + (r,), steps + [step])

    yield from walk(tree.root, (), [])


# =========================
# EXECUTION
# =========================

@dataclass(frozen=True, eq=False)
class BranchRecord:
    outcomes: tuple
    acc_A: np.ndarray
    acc_B: np.ndarray
    probability: float
    state: object
    post_state: object
    output: tuple


@dataclass(frozen=True, eq=False)
class _Evolution:
    """Unnormalized state plus both accumulators along one path of the tree."""
    layout: Layout
    pure: bool
    value: np.ndarray
    acc: dict

    @classmethod
    def start(cls, layout, state):
        pure = isinstance(state, PureState)
        acc = {party: np.eye(layout.party_dimension(party), dtype=complex) for party in Party.values}
        return cls(layout, pure, state.amplitudes if pure else state.matrix, acc)

    def step(self, party, systems, matrix):
        party = _party(party)
        local = self.layout.local_operator(party, systems, matrix)
        other = Party.BOB if party == Party.ALICE else Party.ALICE
        identity = np.eye(self.layout.party_dimension(other), dtype=complex)
        if party == Party.ALICE:
            full = self.layout.joint_operator(local, identity)
        else:
            full = self.layout.joint_operator(identity, local)
        value = full @ self.value if self.pure else full @ self.value @ full.conj().T
        return replace(self, value=value, acc={**self.acc, party: local @ self.acc[party]})

    @property
    def probability(self):
        if self.pure:
            return float(np.vdot(self.value, self.value).real)
        return float(np.trace(self.value).real)

    def normalized(self):
        if self.pure:
            return PureState.normalized(self.value, self.layout.dims)
        return DensityOperator.from_matrix(self.value, self.layout.dims)


def _restrict(state, layout, output):
    keep = layout.indices(output)
    if len(keep) == len(layout.names):
        return state
    return partial_trace(state, keep)


def run_protocol(initial, tree):
    """Enumerate every branch with nonzero probability, step by step."""
    layout = tree.layout
    if initial.dims != layout.dims:
        raise DimensionMismatchError(f"Initial state dims {initial.dims} do not match layout {layout.dims}")
    tree.check_completeness()
    records = []

    def visit(node, evolution, outcomes):
        if evolution.probability < PRUNE:
            logger.debug("pruned branch %s (p = %.2e)", outcomes, evolution.probability)
            return
        if isinstance(node, Leaf):
            for op in node.corrections:
                evolution = evolution.step(op.party, op.systems, op.matrix)
            state = evolution.normalized()
            output = layout.ordered(node.output)
            records.append(BranchRecord(
                outcomes=outcomes,
                acc_A=evolution.acc[Party.ALICE.value],
                acc_B=evolution.acc[Party.BOB.value],
                probability=evolution.probability,
                state=state,
                post_state=_restrict(state, layout, output),
                output=output,
            ))
            return
        instrument = node.instrument
        for r, child in sorted(node.children.items()):
            visit(child, evolution.step(instrument.party, instrument.systems, instrument.operators[r]),
                  outcomes + (r,))

    visit(tree.root, _Evolution.start(layout, initial), ())
    total = sum(record.probability for record in records)
    if abs(total - 1) > 1e-9:
        logger.warning("Branch probabilities of %r sum to %.12f", tree.name, total)
    logger.debug("%s: %d branches", tree.name or 'protocol', len(records))
    return records


# =========================
# STRUCTURAL CHECKS
# =========================

@dataclass(frozen=True)
class UnitarityCheck:
    outcomes: tuple
    is_proportional_unitary: bool
    c: float = None


def accumulated_operator(tree, steps, party):
    party = _party(party)
    acc = np.eye(tree.layout.party_dimension(party), dtype=complex)
    for step_party, systems, matrix in steps:
        if step_party == party:
            acc = tree.layout.local_operator(party, systems, matrix) @ acc
    return acc


def check_accumulated_unitarity(tree, party, tol=1e-9):
    """Per branch: is the party's accumulated operator c times a unitary?"""
    checks = []
    for outcomes, steps, _ in iter_branches(tree):
        acc = accumulated_operator(tree, steps, party)
        gram = acc.conj().T @ acc
        scale = np.trace(gram).real / gram.shape[0]
        proportional = np.linalg.norm(gram - scale * np.eye(gram.shape[0]), 2) < tol
        checks.append(UnitarityCheck(
            outcomes=outcomes,
            is_proportional_unitary=bool(proportional),
            c=float(np.sqrt(scale)) if proportional else None,
        ))
    return checks


def check_bob_accumulated_unitarity(tree, tol=1e-9):
    return check_accumulated_unitarity(tree, Party.BOB, tol)


def with_final_measurement(tree, party, systems, operators, label='final'):
    """Append one more instrument after every leaf's corrections; outputs are unchanged."""
    def rebuild(node):
        if isinstance(node, ProtocolNode):
            children = {r: rebuild(child) for r, child in node.children.items()}
            return ProtocolNode(node.instrument, children)
        instrument = Instrument(party, systems, operators, label)
        tail = ProtocolNode(instrument, {r: Leaf((), node.output) for r in range(len(operators))})
        for i, op in reversed(list(enumerate(node.corrections))):
            step = Instrument(op.party, op.systems, (op.matrix,), f"{label}:correction{i}")
            tail = ProtocolNode(step, {0: tail})
        return tail

    return replace(tree, root=rebuild(tree.root))
