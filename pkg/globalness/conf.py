"""Numeric defaults, read from ``settings.GLOBALNESS`` when Django is configured."""
from django.conf import settings

DEFAULTS = {
    'OPERATOR_TOL': 1e-10,
    'NORM_TOL': 1e-12,
    'FIDELITY_TOL': 1e-9,
    'CARTAN_ZERO_TOL': 1e-9,
    'CHAMBER_TOL': 1e-8,
    'RESTARTS': 64,
    'SEED': 0,
    'STEP_TOL': 1e-6,
    'MAX_ITERS': 4000,
}


def get_setting(name):
    if name not in DEFAULTS:
        raise KeyError(f"Unknown globalness setting: {name}")
    overrides = getattr(settings, 'GLOBALNESS', {}) if settings.configured else {}
    return overrides.get(name, DEFAULTS[name])


def resolve_tol(value, name):
    """Return ``value`` unless it is None, in which case the configured default."""
    return get_setting(name) if value is None else float(value)
