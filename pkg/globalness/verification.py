"""Task contracts checked branch by branch over tomographically complete inputs.

A contract quantified over all unknown input states is linear in the input
density operator, so it holds everywhere once it holds on a family of
states spanning the operator space. Optional Haar-random inputs are added
on top as spot checks.
"""
import itertools
import logging
from dataclasses import dataclass, field, replace

import numpy as np

from .choices import Party, RelocalizationMode, Task
from .conf import resolve_tol
from .exceptions import DimensionMismatchError, UsageError
from .linalg import (
    DensityOperator, apply, as_matrix, fidelity, haar_random_state, maximally_entangled, partial_trace,
    tensor, tomographic_states,
)
from .protocols import Subsystem, run_protocol

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TaskVerdict:
    task: str
    success: bool
    worst_infidelity: float
    per_branch: list = field(default_factory=list)
    resource_ebits: float = 0.0
    inputs_checked: int = 0

    def to_dict(self):
        return {
            'task': self.task,
            'success': self.success,
            'worst_infidelity': float(f"{self.worst_infidelity:.6e}"),
            'resource_ebits': round(float(self.resource_ebits), 12),
            'inputs_checked': self.inputs_checked,
            'per_branch': [
                {'outcomes': list(outcomes), 'fidelity': round(float(f), 12)}
                for outcomes, f in self.per_branch
            ],
        }


def _input_family(d, random_inputs, rng):
    states = tomographic_states(d)
    states += [haar_random_state(d, rng) for _ in range(random_inputs)]
    return states


def _require_output(tree, expected):
    outputs = tree.outputs()
    if outputs != {tuple(expected)}:
        raise UsageError(f"Protocol {tree.name!r} outputs {sorted(outputs)}, task needs {tuple(expected)}")


def _unitary_on(tree, u, systems):
    matrix = as_matrix(u)
    dims = tuple(tree.layout.dim(n) for n in systems)
    if matrix.shape[0] != np.prod(dims):
        raise DimensionMismatchError(
            f"Operator of size {matrix.shape[0]} does not act on {systems} with dims {dims}")
    return matrix


def _judge(task, tree, cases, tol):
    """Run every ``(parts, before, target)`` case and reduce to the worst branch.

    ``before`` is an optional (matrix, systems) applied ahead of the protocol.
    """
    tol = resolve_tol(tol, 'FIDELITY_TOL')
    worst_by_branch = {}
    checked = 0
    for parts, before, target in cases:
        initial = tree.prepare(parts)
        if before is not None:
            matrix, systems = before
            initial = apply(matrix, initial, tree.layout.indices(systems))
        for record in run_protocol(initial, tree):
            f = fidelity(record.post_state, target)
            worst_by_branch[record.outcomes] = min(f, worst_by_branch.get(record.outcomes, 1.0))
        checked += 1
    per_branch = sorted(worst_by_branch.items())
    worst = 1.0 - min((f for _, f in per_branch), default=0.0)
    worst = max(worst, 0.0)
    verdict = TaskVerdict(
        task=str(task),
        success=bool(per_branch) and worst < tol,
        worst_infidelity=worst,
        per_branch=per_branch,
        resource_ebits=tree.resource_ebits(),
        inputs_checked=checked,
    )
    logger.info("%s on %r: success=%s worst infidelity %.3e over %d inputs",
                verdict.task, tree.name, verdict.success, worst, checked)
    return verdict


def verify_one_piece_relocalization(tree, u, mode=RelocalizationMode.TWO_PIECE, xi_A=None,
                                    tol=None, random_inputs=0, seed=0):
    """After U, does every branch hand back psi_B at B?

    ``two_piece`` ranges over unknown psi_A as well; ``one_piece`` fixes
    Alice's input to ``xi_A``.
    """
    _require_output(tree, ('B',))
    matrix = _unitary_on(tree, u, ('A', 'B'))
    rng = np.random.default_rng(seed)
    d_a, d_b = tree.layout.dim('A'), tree.layout.dim('B')
    if mode == RelocalizationMode.ONE_PIECE:
        if xi_A is None:
            raise UsageError("one_piece mode needs Alice's fixed input xi_A")
        alice_inputs = [xi_A]
        task = Task.RELOCALIZE_ONE_PIECE
    elif mode == RelocalizationMode.TWO_PIECE:
        alice_inputs = tomographic_states(d_a)
        task = Task.RELOCALIZE_TWO_PIECE
    else:
        raise UsageError(f"Unknown relocalization mode {mode!r}")
    pairs = list(itertools.product(alice_inputs, tomographic_states(d_b)))
    for _ in range(random_inputs):
        psi_a = xi_A if mode == RelocalizationMode.ONE_PIECE else haar_random_state(d_a, rng)
        pairs.append((psi_a, haar_random_state(d_b, rng)))
    cases = (([(('A',), psi_a), (('B',), psi_b)], (matrix, ('A', 'B')), psi_b) for psi_a, psi_b in pairs)
    return _judge(task, tree, cases, tol)


def verify_one_piece_relocation(tree, u, fixed_B=None, tol=None, random_inputs=0, seed=0):
    """After U, does every branch move psi_A into B?"""
    _require_output(tree, ('B',))
    matrix = _unitary_on(tree, u, ('A', 'B'))
    d_a, d_b = tree.layout.dim('A'), tree.layout.dim('B')
    if d_a != d_b:
        raise DimensionMismatchError(f"Relocation needs equal local dimensions, got {d_a} and {d_b}")
    rng = np.random.default_rng(seed)
    bob_inputs = [fixed_B] if fixed_B is not None else tomographic_states(d_b)
    pairs = list(itertools.product(tomographic_states(d_a), bob_inputs))
    for _ in range(random_inputs):
        psi_b = fixed_B if fixed_B is not None else haar_random_state(d_b, rng)
        pairs.append((haar_random_state(d_a, rng), psi_b))
    cases = (([(('A',), psi_a), (('B',), psi_b)], (matrix, ('A', 'B')), psi_a) for psi_a, psi_b in pairs)
    return _judge(Task.RELOCATE, tree, cases, tol)


def verify_ea_implementation(tree, u, resource=None, tol=None, random_inputs=0, seed=0):
    """Does the protocol, fed the resource, output U(psi_A (x) psi_B) on (A, B) in every branch?"""
    _require_output(tree, ('A', 'B'))
    if resource is not None:
        tree = replace(tree, resource=resource)
    if tree.resource is None:
        raise UsageError(f"Protocol {tree.name!r} declares no resource state")
    matrix = _unitary_on(tree, u, ('A', 'B'))
    rng = np.random.default_rng(seed)
    d_a, d_b = tree.layout.dim('A'), tree.layout.dim('B')
    pairs = list(itertools.product(tomographic_states(d_a), tomographic_states(d_b)))
    pairs += [(haar_random_state(d_a, rng), haar_random_state(d_b, rng)) for _ in range(random_inputs)]

    def cases():
        for psi_a, psi_b in pairs:
            target = apply(matrix, tensor(psi_a, psi_b))
            yield [(('A',), psi_a), (('B',), psi_b)], None, target

    return _judge(Task.EA_IMPLEMENT, tree, cases(), tol)


def verify_teleportation(tree, resource=None, tol=None, random_inputs=0, seed=0):
    """Does every branch reproduce Alice's unknown psi on B?"""
    _require_output(tree, ('B',))
    if resource is not None:
        tree = replace(tree, resource=resource)
    d = tree.layout.dim('A')
    if tree.layout.dim('B') != d:
        raise DimensionMismatchError("Teleportation needs equal dimensions on A and B")
    rng = np.random.default_rng(seed)
    cases = (([(('A',), psi)], None, psi) for psi in _input_family(d, random_inputs, rng))
    return _judge(Task.TELEPORT, tree, cases, tol)


# =========================
# ENTANGLED-INPUT PROBE
# =========================

@dataclass(frozen=True)
class ProbeResult:
    worst_fidelity: float
    per_branch: list
    witnessed: bool


def relocation_entanglement_probe(tree, u, threshold=1e-3):
    """Feed half of |Phi>_{aA} as Alice's input and see whether a:B ends up maximally entangled.

    A protocol that relocated every input would leave a and B in |Phi>_{aB}
    on every branch; ``witnessed`` is true when some branch falls short by
    more than ``threshold`` for some tomographic input of Bob.
    """
    _require_output(tree, ('B',))
    d_a, d_b = tree.layout.dim('A'), tree.layout.dim('B')
    if d_a != d_b:
        raise DimensionMismatchError(f"Probe needs equal local dimensions, got {d_a} and {d_b}")
    matrix = _unitary_on(tree, u, ('A', 'B'))
    probed = tree.with_subsystems(Subsystem('a', d_a, Party.ALICE))
    layout = probed.layout
    target = maximally_entangled(d_a)
    worst_by_branch = {}
    for psi_b in tomographic_states(d_b):
        initial = probed.prepare([(('a', 'A'), maximally_entangled(d_a)), (('B',), psi_b)])
        initial = apply(matrix, initial, layout.indices(('A', 'B')))
        for record in run_protocol(initial, probed):
            # layout order puts B before a
            reduced = partial_trace(record.state, layout.indices(('B', 'a')))
            swapped = reduced.matrix.reshape(d_b, d_a, d_b, d_a).transpose(1, 0, 3, 2).reshape(d_a * d_b, -1)
            f = fidelity(DensityOperator.from_matrix(swapped, (d_a, d_b)), target)
            worst_by_branch[record.outcomes] = min(f, worst_by_branch.get(record.outcomes, 1.0))
    per_branch = sorted(worst_by_branch.items())
    worst = min(f for _, f in per_branch)
    logger.info("probe on %r: worst a:B fidelity %.6f", tree.name, worst)
    return ProbeResult(worst_fidelity=worst, per_branch=per_branch, witnessed=worst < 1 - threshold)
