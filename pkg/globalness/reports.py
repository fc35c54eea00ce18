"""The analysis report the ``analyze`` command prints: one dict per section, schema-versioned."""
import logging
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .builders import build_relocalization_protocol
from .cartan import classify, controlled_form, invariants_consistent, kak_decompose, makhlin_invariants
from .choices import RelocalizationMode
from .entangling_power import entangling_power
from .exceptions import ParseError
from .serializers import dump_json
from .verification import verify_one_piece_relocalization

logger = logging.getLogger(__name__)

SCHEMA = 1


@dataclass(frozen=True)
class AnalysisReport:
    input: str
    dims: list
    entangling_power: dict
    kak: dict = None
    globalness_class: dict = None
    makhlin: dict = None
    relocalizable_two_piece: bool = None
    verdicts: list = field(default_factory=list)
    version: str = __version__
    seed: int = 0
    schema: int = SCHEMA

    def to_dict(self):
        return asdict(self)

    def to_json(self):
        return dump_json(self.to_dict())

    @classmethod
    def from_dict(cls, data):
        if data.get('schema') != SCHEMA:
            raise ParseError(f"Unsupported report schema {data.get('schema')!r}")
        try:
            report = cls(**data)
        except TypeError as exc:
            raise ParseError(f"Malformed report: {exc}") from exc
        klass = report.globalness_class
        if klass is not None and report.relocalizable_two_piece != (klass['cartan_number'] <= 1):
            raise ParseError("relocalizable_two_piece disagrees with the Cartan number")
        return report


def _rounded(value):
    return round(float(value), 12)


def analyze(u, descriptor, cfg, ancilla=False, tol=None):
    """Every applicable analysis of ``u``; the Cartan sections need a two-qubit operator."""
    power = entangling_power(u, ancilla=ancilla, cfg=cfg)
    sections = {}
    if u.dims == (2, 2):
        dec = kak_decompose(u)
        label = classify(dec, tol)
        g1, g2 = makhlin_invariants(u)
        sections = {
            'kak': dec.summary(),
            'globalness_class': {'kind': label.kind, 'cartan_number': label.cartan_number},
            'makhlin': {
                'G1': [_rounded(g1.real), _rounded(g1.imag)],
                'G2': _rounded(g2),
                'consistent': invariants_consistent(u, dec),
            },
            'relocalizable_two_piece': label.relocalizable_two_piece,
        }
        if label.relocalizable_two_piece:
            tree = build_relocalization_protocol(controlled_form(u, tol), name='controlled-form-relocalization')
            verdict = verify_one_piece_relocalization(tree, u, RelocalizationMode.TWO_PIECE)
            sections['verdicts'] = [verdict.to_dict()]
    else:
        logger.info("dims %s: Cartan analysis skipped", u.dims)
    return AnalysisReport(
        input=descriptor,
        dims=list(u.dims),
        entangling_power={**power.summary(), 'argmax_state': _state_summary(power.argmax_state)},
        seed=cfg.seed,
        **sections,
    )


def _state_summary(state):
    return [[_rounded(z.real), _rounded(z.imag)] for z in np.asarray(state.amplitudes)]


def render_text(report):
    lines = [f"input: {report.input} (dims {report.dims})"]
    if report.kak is not None:
        gx, gy, gz = report.kak['gamma_over_pi']
        lines.append(f"cartan coefficients / pi: ({gx:.6f}, {gy:.6f}, {gz:.6f})")
        lines.append(f"class: {report.globalness_class['kind']} "
                     f"(cartan number {report.globalness_class['cartan_number']})")
        lines.append(f"relocalizable (two pieces): {'yes' if report.relocalizable_two_piece else 'no'}")
    power = report.entangling_power
    lines.append(f"entangling power: {power['value']:.6f} ebit, {power['bound']}"
                 f"{' with ancillas' if power['ancilla_assisted'] else ''}")
    for verdict in report.verdicts:
        lines.append(f"{verdict['task']}: {'success' if verdict['success'] else 'failure'} "
                     f"(worst infidelity {verdict['worst_infidelity']:.3e})")
    lines.append(f"seed {report.seed}, version {report.version}")
    return '\n'.join(lines)
