"""Parity-aware series differentiation on uniform midpoint grids.

Samples live at x_j = (j + 1/2) * L / m on [0, L].  Functions that vanish at
both endpoints with vanishing even derivatives (odd about both poles) are
represented in the sine basis sin(k pi x / L), k = 1..m; even functions in the
cosine basis cos(k pi x / L), k = 0..m-1.  Differentiating in these bases is
spectrally accurate for smooth closed-manifold profiles, including at the
first and last cells where one-sided finite differences degrade.
"""

import numpy as np
from scipy import fft


def sine_coefficients(values):
    """Coefficients b[k-1] of sum_k b_k sin(k pi x / L), k = 1..m."""
    m = len(values)
    b = fft.dst(values, type=2) / m
    b[-1] *= 0.5
    return b


def sine_values(b):
    """Evaluate a sine series at the midpoints (inverse of sine_coefficients)."""
    x = b / 2.0
    x[-1] = b[-1]
    return fft.dst(x, type=3)


def sine_derivative(b, length):
    """First derivative of a sine series at the midpoints.

    The Nyquist mode k = m has identically zero cosine samples at midpoints
    and drops out.
    """
    m = len(b)
    k = np.arange(1, m)
    x = np.zeros(m)
    x[1:] = b[:-1] * (k * np.pi / length) / 2.0
    return fft.dct(x, type=3)


def sine_second_derivative(b, length):
    """Second derivative of a sine series at the midpoints."""
    m = len(b)
    k = np.arange(1, m + 1)
    return sine_values(-b * (k * np.pi / length) ** 2)


def sine_values_at_faces(b, length):
    """Evaluate a sine series at the m+1 cell faces x = f * L / m.

    Endpoint values are exactly zero by parity.
    """
    m = len(b)
    out = np.zeros(m + 1)
    if m > 1:
        out[1:-1] = fft.dst(b[:-1] / 2.0, type=1)
    return out


def cosine_coefficients(values):
    """Coefficients a[k] of sum_k a_k cos(k pi x / L), k = 0..m-1."""
    m = len(values)
    a = fft.dct(values, type=2) / m
    a[0] *= 0.5
    return a


def cosine_values(a):
    """Evaluate a cosine series at the midpoints (inverse of cosine_coefficients)."""
    x = a / 2.0
    x[0] = a[0]
    return fft.dct(x, type=3)


def cosine_derivative(a, length):
    """First derivative of a cosine series at the midpoints."""
    m = len(a)
    k = np.arange(1, m)
    d = np.zeros(m)
    d[:-1] = -a[1:] * (k * np.pi / length)
    x = d / 2.0
    x[-1] = d[-1]
    return fft.dst(x, type=3)
