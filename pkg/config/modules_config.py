"""
FiltraLab - Task Configuration
Registry of every subcommand plus the tunable defaults shared by the engines
"""

import os

TOOL_NAME = 'filtralab'
TOOL_VERSION = '1.0.0'

# Task Registry
AVAILABLE_TASKS = {
    'hilbert': {
        'name': 'Hilbert Function',
        'description': 'Table of lengths H(n) = colength of F(n) over a window',
        'version': '1.0',
        'needs': 'filtration',
        'enabled': True
    },
    'coeffs': {
        'name': 'Hilbert Coefficients',
        'description': 'Fit P(n) in the binomial basis and report e_0..e_d',
        'version': '1.0',
        'needs': 'filtration',
        'enabled': True
    },
    'mixed': {
        'name': 'Mixed Coefficients',
        'description': 'Fit the multi-graded polynomial and report every e_alpha',
        'version': '1.0',
        'needs': 'filtration',
        'enabled': True
    },
    'defect': {
        'name': 'Defect Table',
        'description': 'chi(n) = P(n) - H(n) over a window',
        'version': '1.0',
        'needs': 'filtration',
        'enabled': True
    },
    'postulation': {
        'name': 'Postulation Number',
        'description': 'Largest n with P(n) != H(n)',
        'version': '1.0',
        'needs': 'filtration',
        'enabled': True
    },
    'rr': {
        'name': 'Ratliff-Rush Closure',
        'description': 'Stabilized colon chain for one graded piece',
        'version': '1.0',
        'needs': 'ideal',
        'enabled': True
    },
    'intclosure': {
        'name': 'Integral Closure',
        'description': 'Newton polyhedron closure of I^n',
        'version': '1.0',
        'needs': 'ideal',
        'enabled': True
    },
    'cohomology': {
        'name': 'Dimension-Two Cohomology Table',
        'description': 'h1 and h2 lengths of the extended Rees algebra, d = 2',
        'version': '1.0',
        'needs': 'filtration',
        'enabled': True
    },
    'reduction': {
        'name': 'Reduction Number',
        'description': 'Check J F(n) = F(n+1) and report r_J',
        'version': '1.0',
        'needs': 'filtration',
        'enabled': True
    },
    'verify': {
        'name': 'Theorem Checkers',
        'description': 'Run one named checker and report a verdict',
        'version': '1.0',
        'needs': 'filtration',
        'enabled': True
    },
    'expect': {
        'name': 'Expected Values',
        'description': 'Compare a computed quantity against a recorded value',
        'version': '1.0',
        'needs': 'filtration',
        'enabled': True
    },
}

# Checker names accepted by `verify`
THEOREM_CHECKERS = (
    'northcott',
    'huneke-ooishi',
    'sally',
    'nonneg',
    'cohomology',
    'itoh-e2',
    'mgho',
    'e2zero-multi',
    'itoh-e3',
)

DEFAULTS = {
    'rr_kmax': 32,          # longest colon chain tried before giving up
    'rr_window': 2,         # consecutive equal links that count as stable
    'fit_margin': 4,        # verification points past the solving grid, floored at 2(d+1)
    'fit_base': 1,          # first index of the solving grid
    'fit_max_base': 16,     # last base tried before FitError
    'reduction_window': 8,
    'itoh_window': 4,
    'jobs': 1,
}

# Environment overrides, FILTRALAB_KMAX kept as the short documented name
ENV_OVERRIDES = {
    'rr_kmax': 'FILTRALAB_KMAX',
}

# Command-line flags for the current run (set once by the CLI, and again in each worker)
RUNTIME_OVERRIDES = {}


def apply_overrides(**settings):
    """Replace the command-line values; None entries are dropped"""
    RUNTIME_OVERRIDES.clear()
    RUNTIME_OVERRIDES.update({k: int(v) for k, v in settings.items() if v is not None})


def get_setting(name, override=None):
    """
    Resolve a tunable: explicit override, command line, environment, default

    Args:
        name: Key of DEFAULTS
        override: Value passed by the caller (None when absent)

    Returns:
        int
    """
    if override is not None:
        return int(override)
    if name in RUNTIME_OVERRIDES:
        return RUNTIME_OVERRIDES[name]
    env_name = ENV_OVERRIDES.get(name, f"FILTRALAB_{name.upper()}")
    raw = os.environ.get(env_name)
    if raw is not None and raw.strip():
        return int(raw)
    return DEFAULTS[name]


def get_enabled_tasks():
    """Return list of enabled task keys"""
    return [key for key, config in AVAILABLE_TASKS.items() if config['enabled']]


def get_task_table():
    """Return list of (key, name, description) tuples for enabled tasks"""
    return [(key, AVAILABLE_TASKS[key]['name'], AVAILABLE_TASKS[key]['description'])
            for key in get_enabled_tasks()]
