import numpy as np
from django.test import SimpleTestCase

from globalness.builders import (
    ControlledUnitary, build_ea_implementation_protocol, build_one_bit_teleportation_protocol,
    build_relocalization_protocol, build_teleportation_protocol, builtin_protocol,
)
from globalness.choices import RelocalizationMode, Task
from globalness.exceptions import DimensionMismatchError, UsageError
from globalness.gates import H, I2, cnot, controlled, controlled_shift, haar_unitary, swap, u_ex
from globalness.linalg import PureState, apply, basis_state, tensor, tomographic_states
from globalness.verification import (
    relocation_entanglement_probe, verify_ea_implementation, verify_one_piece_relocalization,
    verify_one_piece_relocation, verify_teleportation,
)

PLUS = PureState.normalized([1, 1], (2,))


def random_controlled(rng, d_a, d_b):
    return ControlledUnitary(tuple(haar_unitary(d_b, rng) for _ in range(d_a)), basis=haar_unitary(d_a, rng))


class RelocalizationTests(SimpleTestCase):
    def test_cnot_two_piece(self):
        verdict = verify_one_piece_relocalization(builtin_protocol('cnot-relocalization'), cnot())
        self.assertTrue(verdict.success)
        self.assertEqual(verdict.task, Task.RELOCALIZE_TWO_PIECE)
        self.assertEqual(verdict.inputs_checked, 16)
        self.assertEqual(verdict.resource_ebits, 0.0)

    def test_random_controlled_unitaries_on_qubits(self):
        rng = np.random.default_rng(100)
        for _ in range(100):
            descriptor = random_controlled(rng, 2, 2)
            verdict = verify_one_piece_relocalization(build_relocalization_protocol(descriptor), descriptor.matrix())
            self.assertTrue(verdict.success, verdict.worst_infidelity)
            self.assertLess(verdict.worst_infidelity, 1e-9)

    def test_random_controlled_unitaries_on_qutrits(self):
        rng = np.random.default_rng(101)
        for _ in range(20):
            descriptor = random_controlled(rng, 3, 3)
            verdict = verify_one_piece_relocalization(build_relocalization_protocol(descriptor), descriptor.matrix())
            self.assertTrue(verdict.success, verdict.worst_infidelity)

    def test_trivial_controlled_unitary(self):
        descriptor = ControlledUnitary((I2, I2))
        verdict = verify_one_piece_relocalization(build_relocalization_protocol(descriptor), descriptor.matrix())
        self.assertTrue(verdict.success)

    def test_u_ex_agrees_with_dressed_cnot_on_plus(self):
        dressed = np.kron(H, I2) @ cnot().matrix
        for psi in tomographic_states(2):
            state = tensor(PLUS, psi)
            gap = np.linalg.norm(apply(u_ex(), state).amplitudes - apply(dressed, state).amplitudes)
            self.assertLess(gap, 1e-10)

    def test_u_ex_one_piece_with_plus(self):
        verdict = verify_one_piece_relocalization(
            builtin_protocol('u-ex-one-piece'), u_ex(), RelocalizationMode.ONE_PIECE, xi_A=PLUS)
        self.assertTrue(verdict.success)
        self.assertEqual(verdict.task, Task.RELOCALIZE_ONE_PIECE)

    def test_u_ex_is_not_relocalized_for_every_alice_input(self):
        verdict = verify_one_piece_relocalization(builtin_protocol('u-ex-one-piece'), u_ex())
        self.assertFalse(verdict.success)

    def test_swap_one_piece_fails(self):
        for name in ('u-ex-one-piece', 'swap-identity', 'cnot-relocalization'):
            for xi in (PLUS, basis_state(0, (2,))):
                verdict = verify_one_piece_relocalization(
                    builtin_protocol(name), swap(), RelocalizationMode.ONE_PIECE, xi_A=xi)
                self.assertFalse(verdict.success, name)

    def test_one_piece_needs_xi(self):
        with self.assertRaises(UsageError):
            verify_one_piece_relocalization(builtin_protocol('u-ex-one-piece'), u_ex(), RelocalizationMode.ONE_PIECE)

    def test_random_inputs_are_counted(self):
        verdict = verify_one_piece_relocalization(builtin_protocol('cnot-relocalization'), cnot(), random_inputs=5)
        self.assertEqual(verdict.inputs_checked, 21)
        self.assertTrue(verdict.success)

    def test_output_must_be_bob(self):
        with self.assertRaises(UsageError):
            verify_one_piece_relocalization(builtin_protocol('ea-cnot'), cnot())

    def test_dimension_mismatch(self):
        with self.assertRaises(DimensionMismatchError):
            verify_one_piece_relocalization(builtin_protocol('teleport-d3'), cnot())


class RelocationTests(SimpleTestCase):
    def test_one_bit_teleportation_with_bob_fixed(self):
        verdict = verify_one_piece_relocation(
            builtin_protocol('cnot-one-bit-teleportation'), cnot(), fixed_B=basis_state(0, (2,)))
        self.assertTrue(verdict.success)
        self.assertEqual(verdict.task, Task.RELOCATE)

    def test_qutrit_controlled_shift_relocates_with_bob_fixed(self):
        verdict = verify_one_piece_relocation(
            build_one_bit_teleportation_protocol(3), controlled_shift(3), fixed_B=basis_state(0, (3,)))
        self.assertTrue(verdict.success)
        self.assertLess(verdict.worst_infidelity, 1e-10)
        self.assertEqual(len(verdict.per_branch), 3)

    def test_swap_already_relocates(self):
        self.assertTrue(verify_one_piece_relocation(builtin_protocol('swap-identity'), swap()).success)

    def test_cnot_relocalization_tree_does_not_relocate(self):
        self.assertFalse(verify_one_piece_relocation(builtin_protocol('cnot-relocalization'), cnot()).success)

    def test_random_controlled_unitaries_fail_and_the_probe_sees_it(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            u = haar_unitary(2, rng)
            descriptor = ControlledUnitary((I2, u))
            tree = build_relocalization_protocol(descriptor)
            self.assertFalse(verify_one_piece_relocation(tree, descriptor.matrix()).success)
            probe = relocation_entanglement_probe(tree, descriptor.matrix())
            self.assertTrue(probe.witnessed)
            self.assertLess(probe.worst_fidelity, 1 - 1e-3)

    def test_probe_is_quiet_when_the_piece_moves(self):
        probe = relocation_entanglement_probe(builtin_protocol('swap-identity'), swap())
        self.assertFalse(probe.witnessed)
        self.assertAlmostEqual(probe.worst_fidelity, 1.0, places=9)

    def test_unequal_dimensions(self):
        descriptor = ControlledUnitary((np.eye(3),) * 2)
        with self.assertRaises(DimensionMismatchError):
            verify_one_piece_relocation(build_relocalization_protocol(descriptor), descriptor.matrix())


class EntanglementAssistedTests(SimpleTestCase):
    def test_cnot_from_one_bell_pair(self):
        verdict = verify_ea_implementation(builtin_protocol('ea-cnot'), cnot())
        self.assertTrue(verdict.success)
        self.assertEqual(verdict.task, Task.EA_IMPLEMENT)
        self.assertAlmostEqual(verdict.resource_ebits, 1.0, places=12)

    def test_random_controlled_unitaries(self):
        rng = np.random.default_rng(50)
        for _ in range(50):
            u = haar_unitary(2, rng)
            verdict = verify_ea_implementation(build_ea_implementation_protocol(u), controlled([I2, u]))
            self.assertLess(verdict.worst_infidelity, 1e-9)
            self.assertAlmostEqual(verdict.resource_ebits, 1.0, places=12)

    def test_identity_branch(self):
        verdict = verify_ea_implementation(build_ea_implementation_protocol(I2), np.eye(4))
        self.assertTrue(verdict.success)

    def test_wrong_target_fails(self):
        verdict = verify_ea_implementation(builtin_protocol('ea-cphase:0.8'), cnot())
        self.assertFalse(verdict.success)

    def test_product_resource_breaks_the_protocol(self):
        verdict = verify_ea_implementation(builtin_protocol('ea-cnot'), cnot(), resource=basis_state(0, (2, 2)))
        self.assertFalse(verdict.success)
        self.assertAlmostEqual(verdict.resource_ebits, 0.0, places=12)

    def test_swap_from_two_bell_pairs(self):
        verdict = verify_ea_implementation(builtin_protocol('swap-teleport-twice'), swap())
        self.assertTrue(verdict.success)
        self.assertAlmostEqual(verdict.resource_ebits, 2.0, places=12)

    def test_needs_a_resource(self):
        with self.assertRaises(UsageError):
            verify_ea_implementation(builtin_protocol('cnot-relocalization'), cnot())


class TeleportationTests(SimpleTestCase):
    def test_qubit_and_qutrit(self):
        for d in (2, 3):
            verdict = verify_teleportation(build_teleportation_protocol(d))
            self.assertLess(verdict.worst_infidelity, 1e-10)
            self.assertEqual(len(verdict.per_branch), d * d)
            self.assertAlmostEqual(verdict.resource_ebits, np.log2(d), places=12)

    def test_haar_spot_checks_after_the_complete_set(self):
        verdict = verify_teleportation(build_teleportation_protocol(2), random_inputs=100, seed=3)
        self.assertTrue(verdict.success)
        self.assertEqual(verdict.inputs_checked, 104)

    def test_every_branch_is_exact(self):
        tree = build_teleportation_protocol(2)
        verdict = verify_teleportation(tree)
        for _, f in verdict.per_branch:
            self.assertAlmostEqual(f, 1.0, places=10)

    def test_weaker_resource_fails(self):
        partial = PureState.normalized([np.sqrt(0.9), 0, 0, np.sqrt(0.1)], (2, 2))
        verdict = verify_teleportation(build_teleportation_protocol(2), resource=partial)
        self.assertFalse(verdict.success)
        self.assertLess(verdict.resource_ebits, 1.0)

    def test_verdict_serializes(self):
        data = verify_teleportation(build_teleportation_protocol(2)).to_dict()
        self.assertEqual(data['task'], Task.TELEPORT)
        self.assertTrue(data['success'])
        self.assertEqual(len(data['per_branch']), 4)
        self.assertEqual(data['resource_ebits'], 1.0)

