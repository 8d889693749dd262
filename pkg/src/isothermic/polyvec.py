"""Polynomials in a real spectral parameter with vector coefficients.

A polynomial of degree N is an ndarray of shape ``(..., N+1, 5)`` holding
ascending coefficients; real polynomials are ndarrays of shape ``(..., K)``.
All helpers broadcast over leading axes, so a whole grid of polynomials can
be processed in one call.
"""

from __future__ import annotations

from math import comb

import numpy as np

from .minkowski import SIGNATURE
from .tolerances import tol


def mp_eval(coeffs, lam):
    """Horner evaluation; returns shape (..., 5)."""
    c = np.asarray(coeffs, dtype=float)
    out = c[..., -1, :].copy()
    for k in range(c.shape[-2] - 2, -1, -1):
        out = out * lam + c[..., k, :]
    return out


def mp_inner_vec(coeffs, X):
    """Real polynomial <P(lam), X>; coefficients shape (..., K)."""
    c = np.asarray(coeffs, dtype=float)
    return (c * (np.asarray(X, dtype=float) * SIGNATURE)).sum(axis=-1)


def mp_inner_poly(c1, c2):
    """Real polynomial <P(lam), R(lam)> of two coefficient arrays (no broadcasting
    over the polynomial axis; leading axes must match)."""
    c1 = np.asarray(c1, dtype=float)
    c2 = np.asarray(c2, dtype=float)
    k1, k2 = c1.shape[-2], c2.shape[-2]
    out = np.zeros(np.broadcast_shapes(c1.shape[:-2], c2.shape[:-2]) + (k1 + k2 - 1,))
    for a in range(k1):
        for b in range(k2):
            out[..., a + b] += (c1[..., a, :] * c2[..., b, :] * SIGNATURE).sum(axis=-1)
    return out


def mp_norm_poly(coeffs):
    """Real polynomial |P(lam)|^2."""
    return mp_inner_poly(coeffs, coeffs)


def rp_eval(p, lam):
    p = np.asarray(p, dtype=float)
    out = p[..., -1].copy()
    for k in range(p.shape[-1] - 2, -1, -1):
        out = out * lam + p[..., k]
    return out


def mp_scale_poly(coeffs, p):
    """Multiply a vector polynomial by a real polynomial."""
    c = np.asarray(coeffs, dtype=float)
    p = np.asarray(p, dtype=float)
    out = np.zeros(c.shape[:-2] + (c.shape[-2] + len(p) - 1, 5))
    for a in range(len(p)):
        out[..., a : a + c.shape[-2], :] += p[a] * c
    return out


def mp_divide_linear(coeffs, mu):
    """Synthetic division by (lam - mu): returns (quotient, remainder vector).

    The remainder equals P(mu)."""
    c = np.asarray(coeffs, dtype=float)
    k = c.shape[-2]
    if k < 2:
        raise ValueError("cannot divide a constant polynomial by (lam - mu)")
    q = np.zeros(c.shape[:-2] + (k - 1, 5))
    carry = c[..., k - 1, :]
    for j in range(k - 2, -1, -1):
        q[..., j, :] = carry
        carry = c[..., j, :] + mu * carry
    return q, carry


def mp_divide_one_minus(coeffs, a):
    """Division by (1 - a*lam): returns (quotient, remainder vector).

    Exact division leaves a zero remainder, which happens iff P(1/a) = 0.
    """
    if a == 0.0:
        raise ZeroDivisionError("divisor degenerates to the constant 1")
    c = np.asarray(coeffs, dtype=float)
    k = c.shape[-2]
    q = np.zeros(c.shape[:-2] + (max(k - 1, 1), 5))
    carry = np.zeros(c.shape[:-2] + (5,))
    for j in range(k - 1):
        carry = c[..., j, :] + a * carry
        q[..., j, :] = carry
    remainder = c[..., k - 1, :] + a * carry if k > 1 else c[..., 0, :]
    return q, remainder


def mp_shift(coeffs, mu):
    """Reparametrize lam -> lam + mu (binomial recombination)."""
    c = np.asarray(coeffs, dtype=float)
    k = c.shape[-2]
    out = np.zeros_like(c)
    for j in range(k):
        for i in range(j + 1):
            out[..., i, :] += comb(j, i) * (mu ** (j - i)) * c[..., j, :]
    return out


def mp_scale_arg(coeffs, alpha):
    """Reparametrize lam -> alpha * lam."""
    c = np.asarray(coeffs, dtype=float)
    powers = alpha ** np.arange(c.shape[-2])
    return c * powers[:, None]


def mp_apply(matrix, coeffs):
    """Apply a 5x5 matrix to every coefficient."""
    c = np.asarray(coeffs, dtype=float)
    return np.einsum("ij,...kj->...ki", np.asarray(matrix, dtype=float), c)


def mp_max_coeff(coeffs):
    """Largest coefficient norm, for tolerance scaling."""
    c = np.asarray(coeffs, dtype=float)
    return float(np.sqrt((c * c).sum(axis=-1)).max()) if c.size else 0.0


def mp_trim(coeffs, scale=None):
    """Drop trailing coefficient blocks that vanish within tolerance."""
    c = np.asarray(coeffs, dtype=float)
    if scale is None:
        scale = 1.0 + mp_max_coeff(c)
    k = c.shape[-2]
    while k > 1:
        top = float(np.sqrt((c[..., k - 1, :] ** 2).sum(axis=-1)).max())
        if top > tol(scale):
            break
        k -= 1
    return c[..., :k, :].copy()
