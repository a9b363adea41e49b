from django.conf import settings

DEFAULTS = {
    'CFL': 0.5,
    'PV_LADDER_BASE_CELLS': 4,
    'PV_LADDER_LEVELS': 4,
    'PV_IMAGE_SHELLS': 16,
    'PV_LADDER_REFINE': 4,
    'SCAN_POINTS': 256,
    'BISECTION_RTOL': 1e-4,
    'BOUNDARY_MASS_TOL': 1e-8,
    'ACTIVE_MODE_RTOL': 1e-12,
    'JENSEN_SLACK': 1e-9,
    'ZETA_SPLIT': 32.0,
    'CSV_DIGITS': 17,
    'RESULTS_DIR': 'results',
}


def mixlog_setting(name):
    """Read a numerical default, falling back to DEFAULTS outside a configured project."""
    if name not in DEFAULTS:
        raise KeyError(f"Unknown MIXLOG setting: {name}")
    if settings.configured:
        return getattr(settings, 'MIXLOG', {}).get(name, DEFAULTS[name])
    return DEFAULTS[name]
