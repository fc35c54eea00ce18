from pathlib import Path
import os

BASE_DIR = Path(__file__).resolve().parent.parent

# ===============================
# SECURITY
# ===============================
# Django refuses to start without one; nothing here is signed or served.
SECRET_KEY = os.environ.get('SECRET_KEY', 'globalness-local-only-key')

DEBUG = os.environ.get('DEBUG', 'False') == 'True'

ALLOWED_HOSTS = []

# ===============================
# APPLICATIONS
# ===============================
INSTALLED_APPS = [
    'globalness',
]

# No databases: every analysis is a pure computation over its inputs.
DATABASES = {}

# ===============================
# INTERNATIONALIZATION
# ===============================
LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = False
USE_TZ = True

# ===============================
# NUMERICS
# ===============================
# Each entry can be overridden from the environment, e.g.
# GLOBALNESS_RESTARTS=16 python manage.py analyze cnot
GLOBALNESS = {
    # operator identities (unitarity, completeness)
    'OPERATOR_TOL': float(os.environ.get('GLOBALNESS_OPERATOR_TOL', '1e-10')),
    # state norms, Schmidt sums
    'NORM_TOL': float(os.environ.get('GLOBALNESS_NORM_TOL', '1e-12')),
    # task contracts: a branch passes when fidelity >= 1 - FIDELITY_TOL
    'FIDELITY_TOL': float(os.environ.get('GLOBALNESS_FIDELITY_TOL', '1e-9')),
    'CARTAN_ZERO_TOL': float(os.environ.get('GLOBALNESS_CARTAN_ZERO_TOL', '1e-9')),
    'CHAMBER_TOL': float(os.environ.get('GLOBALNESS_CHAMBER_TOL', '1e-8')),
    # entangling-power optimizer
    'RESTARTS': int(os.environ.get('GLOBALNESS_RESTARTS', '64')),
    'SEED': int(os.environ.get('GLOBALNESS_SEED', '0')),
    'STEP_TOL': float(os.environ.get('GLOBALNESS_STEP_TOL', '1e-6')),
    'MAX_ITERS': int(os.environ.get('GLOBALNESS_MAX_ITERS', '4000')),
}

# ===============================
# LOGGING
# ===============================
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '{levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'plain',
        },
    },
    'loggers': {
        'globalness': {
            'handlers': ['console'],
            'level': os.environ.get('GLOBALNESS_LOG_LEVEL', 'WARNING'),
            'propagate': False,
        },
    },
}

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'
