import json
import os
import tempfile
from io import StringIO

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from globalness.builders import builtin_protocol
from globalness.choices import GlobalnessKind, Task
from globalness.reports import AnalysisReport
from globalness.serializers import dump_json, protocol_to_dict


def run(*args):
    out = StringIO()
    call_command(*args, stdout=out)
    return out.getvalue()


class AnalyzeCommandTests(SimpleTestCase):
    def test_cnot_report(self):
        report = json.loads(run('analyze', 'cnot', '--json', '--restarts', '16'))
        self.assertEqual(report['globalness_class']['kind'], GlobalnessKind.CONTROLLED_UNITARY)
        self.assertTrue(report['relocalizable_two_piece'])
        self.assertAlmostEqual(report['entangling_power']['value'], 1.0, delta=1e-3)
        self.assertEqual(report['entangling_power']['bound'], 'lower bound (numerical)')
        self.assertEqual(report['schema'], 1)
        self.assertTrue(report['verdicts'][0]['success'])
        self.assertEqual(report['verdicts'][0]['task'], Task.RELOCALIZE_TWO_PIECE)

    def test_same_seed_gives_identical_json(self):
        first = run('analyze', 'cphase:0.7', '--json', '--seed', '5', '--restarts', '4')
        second = run('analyze', 'cphase:0.7', '--json', '--seed', '5', '--restarts', '4')
        self.assertEqual(first, second)

    def test_report_reads_back(self):
        data = json.loads(run('analyze', 'swap', '--json', '--restarts', '4'))
        report = AnalysisReport.from_dict(data)
        self.assertEqual(json.loads(report.to_json()), data)
        self.assertFalse(report.relocalizable_two_piece)
        self.assertEqual(report.globalness_class['kind'], GlobalnessKind.SWAP)

    def test_u_ex(self):
        report = json.loads(run('analyze', 'u-ex', '--json', '--restarts', '4'))
        self.assertEqual(report['globalness_class']['cartan_number'], 2)
        self.assertFalse(report['relocalizable_two_piece'])
        self.assertEqual(report['verdicts'], [])

    def test_identity_text_report(self):
        text = run('analyze', 'identity', '--restarts', '4')
        self.assertIn('class: Local (cartan number 0)', text)
        self.assertIn('entangling power: 0.000000 ebit', text)

    def test_unknown_gate_is_a_parse_error(self):
        with self.assertRaises(CommandError) as ctx:
            run('analyze', 'toffoli')
        self.assertEqual(ctx.exception.returncode, 2)

    def test_non_unitary_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'm.json')
            dump_json({'dims': [2, 2], 'data': [[1, 0]] * 16}, path)
            with self.assertRaises(CommandError) as ctx:
                run('analyze', path)
        self.assertEqual(ctx.exception.returncode, 3)

    def test_unreadable_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            with self.assertRaises(CommandError) as ctx:
                run('analyze', os.path.join(tmp, 'missing.json'))
        self.assertEqual(ctx.exception.returncode, 2)


class VerifyCommandTests(SimpleTestCase):
    def test_cnot_relocalization(self):
        text = run('verify', '--protocol', 'builtin:cnot-relocalization', '--unitary', 'cnot',
                   '--task', 'relocalize2')
        self.assertIn('Relocalize2Piece: success', text)

    def test_relocation_fails_with_exit_one(self):
        with self.assertRaises(CommandError) as ctx:
            run('verify', '--protocol', 'builtin:cnot-relocalization', '--unitary', 'cnot', '--task', 'relocate')
        self.assertEqual(ctx.exception.returncode, 1)

    def test_relocation_with_bob_fixed(self):
        text = run('verify', '--protocol', 'builtin:cnot-one-bit-teleportation', '--unitary', 'cnot',
                   '--task', 'relocate', '--fixed-b', 'zero')
        self.assertIn('Relocate: success', text)

    def test_u_ex_one_piece(self):
        data = json.loads(run('verify', '--protocol', 'builtin:u-ex-one-piece', '--unitary', 'u-ex',
                              '--task', 'relocalize1', '--xi', 'plus', '--json'))
        self.assertTrue(data['success'])
        self.assertEqual(data['inputs_checked'], 4)

    def test_teleportation_consumes_one_ebit(self):
        text = run('verify', '--protocol', 'builtin:teleport-d2', '--task', 'teleport')
        self.assertIn('Teleport: success', text)
        self.assertIn('resource 1.000000 ebit', text)

    def test_ea_implementation_from_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'ea.json')
            dump_json(protocol_to_dict(builtin_protocol('ea-cnot')), path)
            data = json.loads(run('verify', '--protocol', path, '--unitary', 'cnot',
                                  '--task', 'ea-implement', '--json'))
        self.assertTrue(data['success'])
        self.assertEqual(data['resource_ebits'], 1.0)

    def test_dimension_mismatch(self):
        with self.assertRaises(CommandError) as ctx:
            run('verify', '--protocol', 'builtin:teleport-d3', '--unitary', 'cnot', '--task', 'relocalize2')
        self.assertEqual(ctx.exception.returncode, 4)

    def test_unitary_is_required(self):
        with self.assertRaises(CommandError) as ctx:
            run('verify', '--protocol', 'builtin:cnot-relocalization', '--task', 'relocalize2')
        self.assertEqual(ctx.exception.returncode, 2)

    def test_unknown_builtin_protocol(self):
        with self.assertRaises(CommandError) as ctx:
            run('verify', '--protocol', 'builtin:nope', '--task', 'teleport')
        self.assertEqual(ctx.exception.returncode, 2)

    def test_malformed_protocol_files_exit_with_two(self):
        broken = protocol_to_dict(builtin_protocol('cnot-relocalization'))
        broken['root']['children']['5'] = broken['root']['children']['0']
        bad_dim = protocol_to_dict(builtin_protocol('cnot-relocalization'))
        bad_dim['layout'][0]['dim'] = 'two'
        with tempfile.TemporaryDirectory() as tmp:
            for index, data in enumerate((broken, bad_dim)):
                path = os.path.join(tmp, f'protocol{index}.json')
                dump_json(data, path)
                with self.assertRaises(CommandError) as ctx:
                    run('verify', '--protocol', path, '--unitary', 'cnot', '--task', 'relocalize2')
                self.assertEqual(ctx.exception.returncode, 2)


class DemoCommandTests(SimpleTestCase):
    def test_u_ex(self):
        text = run('demo', 'u-ex')
        self.assertIn('cartan number 2', text)
        self.assertIn('one-piece relocalization with xi_A = |+>: success', text)

    def test_swap_cost(self):
        text = run('demo', 'swap-cost')
        self.assertIn('after 2.000000 ebit', text)
        self.assertIn('success with 2.000000 ebit', text)

    def test_majorization(self):
        text = run('demo', 'majorization')
        self.assertIn('Bell pair -> product: partial sums', text)
        self.assertIn('product -> Bell pair: partial sums [1.0, 1.0] vs [0.5, 1.0] -> not convertible', text)

    def test_ea_cnot(self):
        self.assertIn('implements CNOT deterministically: yes', run('demo', 'ea-cnot'))

    def test_continuity(self):
        text = run('demo', 'continuity', '--restarts', '2')
        self.assertEqual(text.count(GlobalnessKind.CONTROLLED_UNITARY), 6)
        self.assertIn(GlobalnessKind.LOCAL, text)

    def test_unknown_demo(self):
        with self.assertRaises(CommandError) as ctx:
            run('demo', 'teleport-everything')
        self.assertEqual(ctx.exception.returncode, 2)
