from django.core.management.base import BaseCommand, CommandError

from globalness.choices import RelocalizationMode
from globalness.exceptions import UsageError
from globalness.serializers import dump_json
from globalness.verification import (
    verify_ea_implementation, verify_one_piece_relocalization, verify_one_piece_relocation,
    verify_teleportation,
)

from ._common import STATE_NAMES, command_errors, load_protocol_source, load_unitary, named_state

TASKS = ('relocalize2', 'relocalize1', 'relocate', 'ea-implement', 'teleport')


class Command(BaseCommand):
    help = "Check an LOCC protocol against a task contract on tomographically complete inputs."

    def add_arguments(self, parser):
        parser.add_argument('--protocol', required=True, help="builtin:<name> or a JSON protocol file")
        parser.add_argument('--unitary', help="Builtin gate or JSON matrix file (not needed for teleport)")
        parser.add_argument('--task', required=True, choices=TASKS)
        parser.add_argument('--xi', choices=STATE_NAMES, default='plus',
                            help="Alice's fixed input for relocalize1")
        parser.add_argument('--fixed-b', choices=STATE_NAMES, default=None,
                            help="Bob's fixed input for relocate")
        parser.add_argument('--random-inputs', type=int, default=0,
                            help="Haar-random spot checks on top of the tomographic inputs")
        parser.add_argument('--seed', type=int, default=0)
        parser.add_argument('--tol', type=float, default=None)
        parser.add_argument('--json', action='store_true')

    def handle(self, *args, **options):
        with command_errors():
            verdict = self._verify(options)
        if options['json']:
            self.stdout.write(dump_json(verdict.to_dict()), ending='')
        else:
            self.stdout.write(
                f"{verdict.task}: {'success' if verdict.success else 'failure'}\n"
                f"worst infidelity {verdict.worst_infidelity:.3e} over {verdict.inputs_checked} inputs, "
                f"{len(verdict.per_branch)} branches\n"
                f"resource {verdict.resource_ebits:.6f} ebit"
            )
        if not verdict.success:
            raise CommandError(f"{verdict.task} contract not met", returncode=1)

    def _verify(self, options):
        task = options['task']
        tree = load_protocol_source(options['protocol'])
        common = {'tol': options['tol'], 'random_inputs': options['random_inputs'], 'seed': options['seed']}
        if task == 'teleport':
            return verify_teleportation(tree, **common)
        if not options['unitary']:
            raise UsageError(f"--unitary is required for {task}")
        u = load_unitary(options['unitary'])
        if task == 'relocalize2':
            return verify_one_piece_relocalization(tree, u, RelocalizationMode.TWO_PIECE, **common)
        if task == 'relocalize1':
            xi = named_state(options['xi'], tree.layout.dim('A'))
            return verify_one_piece_relocalization(tree, u, RelocalizationMode.ONE_PIECE, xi_A=xi, **common)
        if task == 'relocate':
            fixed = named_state(options['fixed_b'], tree.layout.dim('B')) if options['fixed_b'] else None
            return verify_one_piece_relocation(tree, u, fixed_B=fixed, **common)
        return verify_ea_implementation(tree, u, **common)
