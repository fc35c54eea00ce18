import os
from contextlib import contextmanager

import numpy as np
from django.core.management.base import CommandError

from globalness.builders import builtin_protocol
from globalness.exceptions import DimensionMismatchError, OperatorValidationError, ParseError, UsageError
from globalness.gates import builtin_gate
from globalness.linalg import PureState
from globalness.serializers import load_operator, load_protocol

# Stable exit codes: 2 parse/usage, 3 validation, 4 dimension.
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_DIMENSION = 4


@contextmanager
def command_errors():
    try:
        yield
    except DimensionMismatchError as exc:
        raise CommandError(str(exc), returncode=EXIT_DIMENSION) from exc
    except OperatorValidationError as exc:
        raise CommandError(str(exc), returncode=EXIT_VALIDATION) from exc
    except (ParseError, UsageError) as exc:
        raise CommandError(str(exc), returncode=EXIT_PARSE) from exc


def load_unitary(source):
    """A JSON file path, or a builtin gate name."""
    if source.endswith('.json') or os.path.sep in source or os.path.exists(source):
        return load_operator(source)
    return builtin_gate(source)


def load_protocol_source(source):
    """``builtin:<name>`` or a JSON file path."""
    if source.startswith('builtin:'):
        return builtin_protocol(source[len('builtin:'):])
    return load_protocol(source)


def named_state(name, d=2):
    vector = np.zeros(d, dtype=complex)
    if name == 'zero':
        vector[0] = 1
    elif name == 'one':
        vector[1] = 1
    elif name == 'plus':
        vector[:] = 1
    elif name == 'minus':
        vector[0], vector[1] = 1, -1
    elif name == 'plus-i':
        vector[0], vector[1] = 1, 1j
    else:
        raise ParseError(f"Unknown state {name!r}; expected zero, one, plus, minus or plus-i")
    return PureState.normalized(vector, (d,))


STATE_NAMES = ('zero', 'one', 'plus', 'minus', 'plus-i')
