import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'GlobalnessLab.settings')
django.setup()
