import logging

from django.core.management.base import BaseCommand

from globalness.entangling_power import OptimizerSettings
from globalness.reports import analyze, render_text

from ._common import command_errors, load_unitary

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = "Classify a bipartite unitary: Cartan coefficients, globalness class, entangling power."

    def add_arguments(self, parser):
        parser.add_argument('source', help="Builtin gate (cnot, cz, swap, u-ex, identity, cphase:<theta>) "
                                           "or a JSON matrix file")
        parser.add_argument('--json', action='store_true', help="Print the report as JSON")
        parser.add_argument('--seed', type=int, default=None)
        parser.add_argument('--tol', type=float, default=None, help="Zero tolerance for Cartan coefficients")
        parser.add_argument('--restarts', type=int, default=None)
        parser.add_argument('--ancilla', action='store_true', help="Allow ancillas in the entangling power")

    def handle(self, *args, **options):
        with command_errors():
            u = load_unitary(options['source'])
            cfg = OptimizerSettings.from_settings(restarts=options['restarts'], seed=options['seed'])
            logger.info("analyzing %s with %d restarts", options['source'], cfg.restarts)
            report = analyze(u, options['source'], cfg, ancilla=options['ancilla'], tol=options['tol'])
        if options['json']:
            self.stdout.write(report.to_json(), ending='')
        else:
            self.stdout.write(render_text(report))
