import numpy as np


def fit_decay_exponent(ns, deviations):
    """
    Fit |deviation| ~ C * n^(-e) over a ladder and return e.

    Args:
        ns: ladder of sizes
        deviations: matching absolute deviations (exact rationals or floats)

    Returns:
        dict with 'exponent' (None when fewer than two nonzero points),
        'nonzero_points' and 'exact' (True when every deviation is zero)
    """
    points = [(float(n), abs(float(d))) for n, d in zip(ns, deviations) if d != 0]
    exact = len(points) == 0
    if len(points) < 2:
        return {'exponent': None, 'nonzero_points': len(points), 'exact': exact}

    log_n = np.log([p[0] for p in points])
    log_d = np.log([p[1] for p in points])
    slope, _ = np.polyfit(log_n, log_d, 1)
    return {'exponent': float(-slope), 'nonzero_points': len(points), 'exact': False}


def is_non_increasing(values):
    return all(b <= a for a, b in zip(values, values[1:]))


def quadratic_constants(ns, differences):
    """
    Constants C_n = |difference| / n^2 for an O(n^2) error term.

    Returns:
        dict with the per-n constants, their max, and whether the sequence
        is stable (the largest n never needs a larger constant than the max
        seen earlier by more than a factor of 2)
    """
    constants = [abs(float(d)) / float(n) ** 2 for n, d in zip(ns, differences)]
    if not constants:
        return {'constants': [], 'max': 0.0, 'stable': True}
    head = max(constants[:-1]) if len(constants) > 1 else constants[0]
    stable = constants[-1] <= 2.0 * head + 1e-12
    return {'constants': constants, 'max': float(max(constants)), 'stable': bool(stable)}


def relative_error(value, target):
    """|value - target| / |target| as float (target must be nonzero)."""
    return abs(float(value) - float(target)) / abs(float(target))
