import numpy as np
from django.core.management.base import BaseCommand, CommandError

from globalness.builders import builtin_protocol
from globalness.cartan import classify, kak_decompose
from globalness.choices import RelocalizationMode
from globalness.entanglement import Bipartition, entanglement_entropy, majorization_convertible
from globalness.entangling_power import OptimizerSettings, entangling_power
from globalness.gates import H, I2, cnot, cphase, swap, u_ex
from globalness.linalg import PureState, apply, maximally_entangled, tensor, tomographic_states
from globalness.verification import verify_ea_implementation, verify_one_piece_relocalization

from ._common import EXIT_PARSE, command_errors


class Command(BaseCommand):
    help = "Walk through one worked scenario: u-ex, swap-cost, majorization, ea-cnot or continuity."

    def add_arguments(self, parser):
        parser.add_argument('name')
        parser.add_argument('--restarts', type=int, default=8,
                            help="Optimizer restarts for the continuity demo")

    def handle(self, *args, **options):
        demos = {
            'u-ex': self.u_ex,
            'swap-cost': self.swap_cost,
            'majorization': self.majorization,
            'ea-cnot': self.ea_cnot,
            'continuity': self.continuity,
        }
        name = options['name']
        if name not in demos:
            raise CommandError(f"Unknown demo {name!r}; choose from {', '.join(demos)}", returncode=EXIT_PARSE)
        with command_errors():
            demos[name](options)

    def say(self, line=''):
        self.stdout.write(line)

    def u_ex(self, options):
        u = u_ex()
        dec = kak_decompose(u)
        label = classify(dec)
        self.say(f"U_ex cartan coefficients / pi: {np.round(np.array(dec.gamma) / np.pi, 9).tolist()}")
        self.say(f"class {label.kind}, cartan number {label.cartan_number}: "
                 "not relocalizable when both inputs are unknown")
        plus = PureState.normalized([1, 1], (2,))
        rewritten = np.kron(H, I2) @ cnot().matrix
        worst = 0.0
        for psi in tomographic_states(2):
            state = tensor(plus, psi).amplitudes
            gap = np.linalg.norm(u.matrix @ state - rewritten @ state)
            worst = max(worst, gap)
            self.say(f"  psi = {np.round(psi.amplitudes, 4).tolist()}: |U_ex(+,psi) - (H x I)CX(+,psi)| = {gap:.2e}")
        self.say(f"largest gap {worst:.2e}")
        verdict = verify_one_piece_relocalization(
            builtin_protocol('u-ex-one-piece'), u, RelocalizationMode.ONE_PIECE, xi_A=plus)
        self.say(f"one-piece relocalization with xi_A = |+>: "
                 f"{'success' if verdict.success else 'failure'} "
                 f"(worst infidelity {verdict.worst_infidelity:.2e})")

    def swap_cost(self, options):
        self.say("Inputs are halves of |Phi>_aA and |Phi>_Bb; the cut is (a, A) : (B, b).")
        state = tensor(maximally_entangled(2), maximally_entangled(2))
        cut = Bipartition.split((0, 1), 4)
        before = entanglement_entropy(state, cut)
        after = entanglement_entropy(apply(swap(), state, (1, 2)), cut)
        self.say(f"entanglement before swap {before:.6f} ebit, after {after:.6f} ebit")
        self.say("LOCC cannot raise entanglement, so any implementation consumes at least "
                 f"{after - before:.6f} ebit")
        verdict = verify_ea_implementation(builtin_protocol('swap-teleport-twice'), swap())
        self.say(f"teleporting both qubits: {'success' if verdict.success else 'failure'} "
                 f"with {verdict.resource_ebits:.6f} ebit over {len(verdict.per_branch)} branches")

    def majorization(self, options):
        samples = [
            ('Bell pair -> product', [np.sqrt(0.5), np.sqrt(0.5)], [1.0, 0.0]),
            ('product -> Bell pair', [1.0, 0.0], [np.sqrt(0.5), np.sqrt(0.5)]),
            ('(.5,.25,.25) -> (.4,.4,.2)', np.sqrt([0.5, 0.25, 0.25]), np.sqrt([0.4, 0.4, 0.2])),
            ('(.4,.4,.2) -> (.5,.25,.25)', np.sqrt([0.4, 0.4, 0.2]), np.sqrt([0.5, 0.25, 0.25])),
            ('(.6,.3,.1) -> (.7,.2,.1)', np.sqrt([0.6, 0.3, 0.1]), np.sqrt([0.7, 0.2, 0.1])),
        ]
        for title, lam, mu in samples:
            p, q = np.sort(np.square(lam))[::-1], np.sort(np.square(mu))[::-1]
            verdict = majorization_convertible(lam, mu)
            self.say(f"{title}: partial sums {np.round(np.cumsum(p), 4).tolist()} vs "
                     f"{np.round(np.cumsum(q), 4).tolist()} -> {'convertible' if verdict else 'not convertible'}")

    def ea_cnot(self, options):
        verdict = verify_ea_implementation(builtin_protocol('ea-cnot'), cnot())
        self.say(f"resource {verdict.resource_ebits:.6f} ebit, {verdict.inputs_checked} inputs")
        for outcomes, fidelity in verdict.per_branch:
            self.say(f"  outcomes {list(outcomes)}: worst fidelity {fidelity:.12f}")
        self.say(f"implements CNOT deterministically: {'yes' if verdict.success else 'no'}")

    def continuity(self, options):
        cfg = OptimizerSettings.from_settings(restarts=options['restarts'])
        self.say("theta/pi   entangling power   class")
        for fraction in (1.0, 0.5, 0.25, 1 / 16, 1 / 64, 1 / 256, 0.0):
            u = cphase(fraction * np.pi)
            power = entangling_power(u, cfg=cfg)
            label = classify(kak_decompose(u))
            self.say(f"{fraction:<10.6f} {power.value:<18.9f} {label.kind}")
        self.say("Entangling power vanishes continuously while every theta > 0 stays in the same class.")
