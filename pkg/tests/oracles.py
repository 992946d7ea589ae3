"""Reference implementations the production code is tested against.

Deliberately naive: a transform computed straight from its definition in
O(N^2), and gradients by central finite differences. Slow but obviously
correct, and sharing no code with the implementations under test.
"""

import cmath

import numpy as np

from pdmkit.rul import loss_and_grads


def naive_dft(x):
    """Direct O(N^2) discrete Fourier transform."""
    n = len(x)
    return [
        sum(x[t] * cmath.exp(-2j * cmath.pi * j * t / n) for t in range(n))
        for j in range(n)
    ]


def naive_one_sided_power(x):
    """One-sided bin powers |X_j|^2 / N with interior bins doubled."""
    n = len(x)
    bins = naive_dft(x)
    powers = [abs(b) ** 2 / n for b in bins[: n // 2 + 1]]
    for j in range(1, n // 2):
        powers[j] *= 2.0
    return np.asarray(powers)


def finite_diff_grads(model, sequences, targets, eps=1e-5):
    """Central-difference gradients of the training loss, parameter by parameter."""
    grads = {}
    for name, arr in model.params():
        flat = arr.ravel()
        g = np.zeros(flat.shape[0])
        for idx in range(flat.shape[0]):
            orig = flat[idx]
            flat[idx] = orig + eps
            hi = loss_and_grads(model, sequences, targets)[0]
            flat[idx] = orig - eps
            lo = loss_and_grads(model, sequences, targets)[0]
            flat[idx] = orig
            g[idx] = (hi - lo) / (2.0 * eps)
        grads[name] = g.reshape(arr.shape)
    return grads
