"""JSON encodings of operators, states and protocol trees.

Matrices and states are ``{"dims": [d1, ...], "data": [[re, im], ...]}``
with matrices flattened row-major. Floats are written with ``repr`` so
every double reads back bit-exactly.
"""
import json
import math

import numpy as np

from .exceptions import ParseError, UsageError
from .linalg import PureState, UnitaryOperator
from .protocols import Instrument, Layout, Leaf, LocalOperation, ProtocolNode, ProtocolTree, Subsystem

SCHEMA = 1


def load_json(path):
    try:
        with open(path, encoding='utf-8') as handle:
            return json.load(handle)
    except OSError as exc:
        raise ParseError(f"Cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc.msg} (line {exc.lineno})") from exc


def dump_json(obj, path=None):
    text = json.dumps(obj, indent=2, sort_keys=True) + '\n'
    if path is not None:
        with open(path, 'w', encoding='utf-8') as handle:
            handle.write(text)
    return text


# =========================
# MATRICES AND STATES
# =========================

def _pairs(array):
    return [[float(z.real), float(z.imag)] for z in np.asarray(array, dtype=complex).reshape(-1)]


def _complex_entries(data):
    if not isinstance(data, list):
        raise ParseError("'data' must be a list of [re, im] pairs")
    values = []
    for entry in data:
        if not isinstance(entry, list) or len(entry) != 2 or \
                not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in entry):
            raise ParseError(f"Bad entry {entry!r}; expected [re, im]")
        if not all(math.isfinite(x) for x in entry):
            raise ParseError(f"Non-finite entry {entry!r}")
        values.append(complex(entry[0], entry[1]))
    return np.array(values, dtype=complex)


def _dims(obj):
    if not isinstance(obj, dict) or 'dims' not in obj or 'data' not in obj:
        raise ParseError("Expected an object with 'dims' and 'data'")
    dims = obj['dims']
    if not isinstance(dims, list) or not dims or not all(isinstance(d, int) and d >= 1 for d in dims):
        raise ParseError(f"Bad dims {dims!r}")
    return tuple(dims)


def matrix_to_dict(matrix, dims):
    return {'dims': list(dims), 'data': _pairs(matrix)}


def matrix_from_dict(obj):
    """Raw ``(array, dims)``; no unitarity check."""
    dims = _dims(obj)
    values = _complex_entries(obj['data'])
    size = math.prod(dims)
    if values.size != size * size:
        raise ParseError(f"dims {list(dims)} need {size * size} entries, got {values.size}")
    return values.reshape(size, size), dims


def operator_to_dict(op):
    return matrix_to_dict(op.matrix, op.dims)


def operator_from_dict(obj):
    matrix, dims = matrix_from_dict(obj)
    return UnitaryOperator(matrix, dims)


def state_to_dict(state):
    return {'dims': list(state.dims), 'data': _pairs(state.amplitudes)}


def state_from_dict(obj):
    dims = _dims(obj)
    values = _complex_entries(obj['data'])
    if values.size != math.prod(dims):
        raise ParseError(f"dims {list(dims)} need {math.prod(dims)} amplitudes, got {values.size}")
    return PureState(values, dims)


def load_operator(path):
    return operator_from_dict(load_json(path))


# =========================
# PROTOCOLS
# =========================

class _MatrixTable:
    def __init__(self):
        self.entries = []

    def add(self, matrix, dims):
        self.entries.append(matrix_to_dict(matrix, dims))
        return len(self.entries) - 1


def protocol_to_dict(tree):
    table = _MatrixTable()
    layout = tree.layout

    def dims_of(systems):
        return [layout.dim(n) for n in systems]

    def encode(node):
        if isinstance(node, Leaf):
            return {
                'corrections': [
                    {'party': op.party, 'systems': list(op.systems),
                     'matrix': table.add(op.matrix, dims_of(op.systems))}
                    for op in node.corrections
                ],
                'output': list(node.output),
            }
        instrument = node.instrument
        return {
            'party': instrument.party,
            'systems': list(instrument.systems),
            'label': instrument.label,
            'instrument': [table.add(m, dims_of(instrument.systems)) for m in instrument.operators],
            'children': {str(r): encode(child) for r, child in sorted(node.children.items())},
        }

    root = encode(tree.root)
    return {
        'schema': SCHEMA,
        'name': tree.name,
        'layout': [{'name': s.name, 'dim': s.dim, 'party': s.party} for s in layout.subsystems],
        'matrices': table.entries,
        'root': root,
        'resource': state_to_dict(tree.resource) if tree.resource is not None else None,
        'resource_systems': list(tree.resource_systems),
    }


def _outcome(key):
    try:
        return int(key)
    except ValueError:
        raise ParseError(f"Outcome keys must be integers, got {key!r}") from None


def protocol_from_dict(obj):
    if not isinstance(obj, dict):
        raise ParseError("A protocol must be a JSON object")
    if obj.get('schema') != SCHEMA:
        raise ParseError(f"Unsupported protocol schema {obj.get('schema')!r}; expected {SCHEMA}")
    try:
        layout = Layout(tuple(Subsystem(s['name'], s['dim'], s['party']) for s in obj['layout']))
        matrices = [matrix_from_dict(m)[0] for m in obj['matrices']]

        def matrix(ref):
            if not isinstance(ref, int) or not 0 <= ref < len(matrices):
                raise ParseError(f"Bad matrix reference {ref!r}")
            return matrices[ref]

        def decode(node):
            if 'instrument' not in node:
                corrections = tuple(
                    LocalOperation(op['party'], tuple(op['systems']), matrix(op['matrix']))
                    for op in node.get('corrections', [])
                )
                return Leaf(corrections, tuple(node['output']))
            instrument = Instrument(node['party'], tuple(node['systems']),
                                    tuple(matrix(ref) for ref in node['instrument']),
                                    node.get('label', ''))
            children = {_outcome(r): decode(child) for r, child in node['children'].items()}
            return ProtocolNode(instrument, children)

        root = decode(obj['root'])
        resource = state_from_dict(obj['resource']) if obj.get('resource') is not None else None
        return ProtocolTree(layout, root, resource, tuple(obj.get('resource_systems', ())),
                            obj.get('name', ''))
    except (ParseError, UsageError):
        raise
    except (KeyError, TypeError, AttributeError, ValueError) as exc:
        raise ParseError(f"Malformed protocol: {exc!r}") from exc


def load_protocol(path):
    return protocol_from_dict(load_json(path))
