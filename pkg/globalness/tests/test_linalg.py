import numpy as np
from django.test import SimpleTestCase, override_settings
from numpy.testing import assert_allclose

from globalness.conf import get_setting, resolve_tol
from globalness.exceptions import DimensionMismatchError, OperatorValidationError, UsageError
from globalness.gates import I2, X, Z, cnot, haar_unitary
from globalness.linalg import (
    DensityOperator, PureState, UnitaryOperator, apply, basis_state, distance_up_to_global_phase,
    embed_operator, fidelity, haar_random_state, maximally_entangled, partial_trace, permute_subsystems,
    realigned_svd, tensor, tomographic_states,
)


class StateTypesTests(SimpleTestCase):
    def test_unnormalized_state_is_rejected(self):
        with self.assertRaises(OperatorValidationError) as ctx:
            PureState([1, 1], (2,))
        self.assertEqual(ctx.exception.code, 'not_normalized')

    def test_normalized_constructor_rescales(self):
        state = PureState.normalized([3, 4j], (2,))
        assert_allclose(state.amplitudes, [0.6, 0.8j])

    def test_amplitudes_are_read_only(self):
        state = basis_state(0, (2,))
        with self.assertRaises(ValueError):
            state.amplitudes[0] = 0

    def test_dims_must_multiply_to_size(self):
        with self.assertRaises(DimensionMismatchError):
            PureState.normalized([1, 0, 0], (2,))

    def test_non_unitary_operator_is_rejected(self):
        with self.assertRaises(OperatorValidationError) as ctx:
            UnitaryOperator(np.diag([1, 2]), (2,))
        self.assertEqual(ctx.exception.code, 'not_unitary')

    def test_density_operator_from_pure_state(self):
        rho = maximally_entangled(2).density()
        assert_allclose(np.trace(rho.matrix @ rho.matrix), 1.0, atol=1e-12)
        self.assertEqual(rho.dims, (2, 2))

    def test_negative_density_operator_is_rejected(self):
        with self.assertRaises(OperatorValidationError):
            DensityOperator(np.diag([1.5, -0.5]), (2,))


class TensorStructureTests(SimpleTestCase):
    def test_tensor_concatenates_dims(self):
        joint = tensor(basis_state(1, (2,)), basis_state(2, (3,)))
        self.assertEqual(joint.dims, (2, 3))
        self.assertEqual(int(np.argmax(np.abs(joint.amplitudes))), 1 * 3 + 2)

    def test_tensor_of_mixed_types_is_a_usage_error(self):
        with self.assertRaises(UsageError):
            tensor(basis_state(0, (2,)), cnot())

    def test_embed_on_second_subsystem(self):
        assert_allclose(embed_operator(X, (1,), (2, 2)), np.kron(I2, X))

    def test_embed_respects_target_order(self):
        reversed_cnot = embed_operator(cnot().matrix, (1, 0), (2, 2))
        expected = np.kron(I2, np.diag([1, 0])) + np.kron(X, np.diag([0, 1]))
        assert_allclose(reversed_cnot, expected)

    def test_embed_rejects_repeated_targets(self):
        with self.assertRaises(UsageError):
            embed_operator(np.eye(4), (0, 0), (2, 2))

    def test_apply_cnot_makes_bell_state(self):
        plus = PureState.normalized([1, 1], (2,))
        out = apply(cnot(), tensor(plus, basis_state(0, (2,))))
        assert_allclose(out.amplitudes, maximally_entangled(2).amplitudes, atol=1e-12)

    def test_permute_subsystems(self):
        state = tensor(basis_state(0, (2,)), basis_state(2, (3,)))
        swapped = permute_subsystems(state, (1, 0))
        self.assertEqual(swapped.dims, (3, 2))
        self.assertEqual(int(np.argmax(np.abs(swapped.amplitudes))), 2 * 2 + 0)

    def test_trace_of_a_tensor_product_factorizes(self):
        rng = np.random.default_rng(12)
        for _ in range(20):
            a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            b = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
            self.assertAlmostEqual(np.trace(tensor(a, b)), np.trace(a) * np.trace(b), places=10)

    def test_tensor_is_associative(self):
        rng = np.random.default_rng(13)
        a, b, c = (haar_random_state(d, rng) for d in (2, 3, 2))
        left, right = tensor(tensor(a, b), c), tensor(a, tensor(b, c))
        self.assertEqual(left.dims, (2, 3, 2))
        self.assertEqual(left.dims, right.dims)
        assert_allclose(left.amplitudes, right.amplitudes, atol=1e-14)

    def test_realigned_product_has_rank_one(self):
        rng = np.random.default_rng(20)
        a, b = haar_unitary(2, rng), haar_unitary(3, rng)
        _, values, _ = realigned_svd(np.kron(a, b), (2, 3))
        assert_allclose(values, [np.sqrt(6), 0, 0, 0], atol=1e-10)
        self.assertGreater(realigned_svd(cnot().matrix, (2, 2))[1][1], 0.5)


class PartialTraceTests(SimpleTestCase):
    def test_bell_pair_reduces_to_maximally_mixed(self):
        reduced = partial_trace(maximally_entangled(2), [0])
        assert_allclose(reduced.matrix, np.eye(2) / 2, atol=1e-12)

    def test_product_state_keeps_its_factor(self):
        plus = PureState.normalized([1, 1], (2,))
        reduced = partial_trace(tensor(basis_state(0, (2,)), plus).density(), [1])
        assert_allclose(reduced.matrix, np.full((2, 2), 0.5), atol=1e-12)

    def test_keep_nothing_is_a_usage_error(self):
        with self.assertRaises(UsageError):
            partial_trace(maximally_entangled(2), [])

    def test_out_of_range_is_a_usage_error(self):
        with self.assertRaises(UsageError):
            partial_trace(maximally_entangled(2), [2])

    def test_local_unitaries_commute_with_the_partial_trace(self):
        rng = np.random.default_rng(14)
        for _ in range(20):
            g = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
            rho = DensityOperator.from_matrix(g @ g.conj().T, (2, 3))
            u, v = haar_unitary(2, rng), haar_unitary(3, rng)
            w = np.kron(u, v)
            moved = DensityOperator.from_matrix(w @ rho.matrix @ w.conj().T, (2, 3))
            expected = u @ partial_trace(rho, [0]).matrix @ u.conj().T
            assert_allclose(partial_trace(moved, [0]).matrix, expected, atol=1e-10)


class DistanceTests(SimpleTestCase):
    def test_global_phase_is_ignored(self):
        u = haar_unitary(4, np.random.default_rng(3))
        self.assertLess(distance_up_to_global_phase(np.exp(0.7j) * u, u), 1e-12)

    def test_identity_against_x(self):
        # eigenphases of X are 0 and pi, so the best phase leaves sqrt(2)
        self.assertAlmostEqual(distance_up_to_global_phase(I2, X), np.sqrt(2), places=12)

    def test_identity_against_z_matches_grid_scan(self):
        phases = np.linspace(0, 2 * np.pi, 20001)
        scan = min(np.linalg.norm(I2 - np.exp(1j * p) * Z, 2) for p in phases)
        self.assertAlmostEqual(distance_up_to_global_phase(I2, Z), scan, places=6)

    def test_shape_mismatch(self):
        with self.assertRaises(DimensionMismatchError):
            distance_up_to_global_phase(I2, np.eye(4))

    def test_symmetry_and_triangle_inequality(self):
        rng = np.random.default_rng(15)
        for _ in range(200):
            u, v, w = (haar_unitary(3, rng) for _ in range(3))
            self.assertAlmostEqual(
                distance_up_to_global_phase(u, v), distance_up_to_global_phase(v, u), places=10)
            self.assertLessEqual(
                distance_up_to_global_phase(u, w),
                distance_up_to_global_phase(u, v) + distance_up_to_global_phase(v, w) + 1e-10)


class FidelityTests(SimpleTestCase):
    def test_orthogonal_states(self):
        self.assertEqual(fidelity(basis_state(0, (2,)), basis_state(1, (2,))), 0.0)

    def test_mixed_against_pure(self):
        rho = DensityOperator(np.eye(2) / 2, (2,))
        self.assertAlmostEqual(fidelity(rho, basis_state(0, (2,))), 0.5)

    def test_uhlmann_fidelity_of_identical_states(self):
        rho = DensityOperator(np.diag([0.7, 0.3]), (2,))
        self.assertAlmostEqual(fidelity(rho, rho), 1.0, places=10)


class StateFactoryTests(SimpleTestCase):
    def test_tomographic_states_span_operator_space(self):
        for d in (2, 3):
            states = tomographic_states(d)
            self.assertEqual(len(states), d * d)
            projectors = np.array([np.outer(s.amplitudes, s.amplitudes.conj()).reshape(-1) for s in states])
            self.assertEqual(np.linalg.matrix_rank(projectors), d * d)

    def test_haar_random_state_is_normalized(self):
        state = haar_random_state(5, np.random.default_rng(0))
        self.assertAlmostEqual(np.linalg.norm(state.amplitudes), 1.0)


class ConfTests(SimpleTestCase):
    @override_settings(GLOBALNESS={'RESTARTS': 3})
    def test_settings_override_defaults(self):
        self.assertEqual(get_setting('RESTARTS'), 3)
        self.assertEqual(get_setting('SEED'), 0)

    def test_unknown_setting(self):
        with self.assertRaises(KeyError):
            get_setting('NOPE')

    def test_explicit_tolerance_wins(self):
        self.assertEqual(resolve_tol(0.5, 'OPERATOR_TOL'), 0.5)
