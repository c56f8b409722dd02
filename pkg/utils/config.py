"""
Configuration loading.

config.yaml is optional: every key has a default here, and a partial file
only overrides the keys it names.
"""

import copy
import numbers
import os
from fractions import Fraction

import yaml

from utils.errors import InvalidSpec

PROJECT_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
DEFAULT_CONFIG_PATH = os.path.join(PROJECT_ROOT, 'config.yaml')

DEFAULTS = {
    'graph': {
        'iso_limit': 12,
        'max_vertices': 65536,
        'images_limit': 9,
    },
    'solver': {
        'budget': 20_000_000,
        'symmetry': True,
        'max_vertices': 64,
    },
    'lagrangian': {
        'restarts': 64,
        'tol': 1e-10,
        'max_iter': 100_000,
        'upper_check_restarts': 100,
    },
    'stability': {
        'q_max_n': 2000,
        'exact_dist_max_n': 9,
        'law_alphas': ['1/10', '1/4', '2/5'],
        'law_ladder': [60, 120, 240],
        'min_decay_exponent': 0.8,
        'lipschitz_flips': 10_000,
        'lipschitz_n': 300,
        'separation_alpha': '1/10',
        'separation_beta': '2/5',
        'separation_n': 240,
        'separation_tolerance': 0.2,
        'exact_separation_n': 9,
        'pigeonhole_alphas': ['1/10', '1/5', '3/10', '2/5'],
        'pigeonhole_n': 120,
        'freeness_ladder': [12, 18, 24, 30],
    },
    'certify': {
        'seed': 20260101,
        'out_dir': 'certificates',
        'parallel': False,
        'sweep_max_dim': 3,
        'sweep_max_forms': 4,
        'lift_samples': 8,
    },
}

_cache = {}
_active_path = None


def _merge(base, override):
    merged = copy.deepcopy(base)
    for key, value in (override or {}).items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_config(config_path=None):
    """Load config.yaml (or the given path) merged over DEFAULTS."""
    path = config_path or _active_path or DEFAULT_CONFIG_PATH
    if path in _cache:
        return _cache[path]
    loaded = {}
    if os.path.isfile(path):
        with open(path) as f:
            loaded = yaml.safe_load(f) or {}
    elif config_path is not None:
        raise FileNotFoundError(f"Config not found: {config_path}")
    config = _merge(DEFAULTS, loaded)
    _cache[path] = config
    return config


def use_config(config_path):
    """Make config_path the file every later section() call reads."""
    global _active_path
    if config_path is not None and not os.path.isfile(config_path):
        raise FileNotFoundError(f"Config not found: {config_path}")
    _active_path = config_path


def section(name, config_path=None):
    return load_config(config_path)[name]


def parse_fraction(value):
    """Accept 'p/q' strings, ints and Fractions; floats are refused."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool) or not isinstance(value, (numbers.Rational, str)):
        raise InvalidSpec(f"expected an exact rational such as '1/4', got {value!r}")
    try:
        return Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError):
        raise InvalidSpec(f"not a rational number: {value!r}")
