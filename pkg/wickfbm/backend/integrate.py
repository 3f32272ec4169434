"""Adaptive quadrature."""

import scipy.integrate


def quad(func, lower, upper, /, **kwargs):
    value, _error = scipy.integrate.quad(func, lower, upper, **kwargs)
    return float(value)
