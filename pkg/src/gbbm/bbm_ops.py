"""Equation-specific Fourier multipliers for the regularized long-wave model.

Everything here is diagonal in frequency: the dispersive symbol
theta(xi) = xi / (1 + xi^2), the linear group exp(-i t theta), the mild
vector field -phi(u + u^p) with phi = i*theta, and the resonance mismatch of
a p-fold interaction.  theta is odd and bounded by 1/2, so all operations map
real fields to real fields and the system is non-stiff.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .spectral_core import SpectralField, power


def theta(xi):
    """Dispersive symbol xi / (1 + xi^2); odd, |theta| <= 1/2."""
    xi = np.asarray(xi, dtype=float)
    out = xi / (1.0 + xi * xi)
    return out if out.ndim else float(out)


def apply_phi(f: SpectralField) -> SpectralField:
    """Apply (1 - dxx)^(-1) dx, i.e. multiply mode n by i*theta(n/ell)."""
    return SpectralField(f.domain, f.coeff * (1j * theta(f.domain.frequencies())))


def semigroup(f: SpectralField, t: float) -> SpectralField:
    """Free evolution: phase rotation exp(-i t theta) of each mode."""
    phase = np.exp(-1j * t * theta(f.domain.frequencies()))
    return SpectralField(f.domain, f.coeff * phase)


def semigroup_phases(domain, t: float) -> np.ndarray:
    """The multiplier of semigroup(., t) as a bare array, for hot loops."""
    return np.exp(-1j * t * theta(domain.frequencies()))


def vector_field(u: SpectralField, p: int) -> SpectralField:
    """Right side of the mild form u_t = -phi(u + u^p)."""
    return -1.0 * apply_phi(u + power(u, p))


def linear_vector_field(u: SpectralField) -> SpectralField:
    """Nonlinearity-disabled right side u_t = -phi(u) (test hook)."""
    return -1.0 * apply_phi(u)


def resonance(inputs: Sequence[float], output: float) -> float:
    """Phase mismatch sum_j theta(xi_j) - theta(xi_out) of an interaction.

    Only the magnitude enters any estimate; the sign convention is fixed as
    inputs minus output.
    """
    return float(sum(theta(x) for x in inputs) - theta(output))
