"""Fourier-side representation of real periodic fields.

A field lives on a circle of circumference 2*pi*ell and is stored as a dense
vector of Fourier coefficients on the mode band {-K, ..., K}.  The transform
convention is

    fhat(n) = (2*pi*ell)^(-1/2) * integral exp(-i*(n/ell)*x) f(x) dx,

which at ell=1 is the usual torus convention.  Large ell emulates the real
line: frequencies n/ell fill a grid of spacing 1/ell and frequency sums carry
the measure 1/ell so they converge to line integrals.

Pointwise products are evaluated on oversampled physical grids (transform,
multiply, transform back); the grid is always chosen large enough that the
band-limited result is exact, while the domain's declared pad_factor is the
contract that gates which powers a caller may request.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.fft import fft, ifft, next_fast_len

from .errors import AliasError, DomainError, RangeError, SymmetryError

_CONJ_TOL = 1e-12


@dataclass(frozen=True)
class DomainSpec:
    """Mode cutoff K, circle scale ell, and physical-grid oversampling."""

    K: int
    ell: float = 1.0
    pad_factor: float = 2.0

    def __post_init__(self):
        if self.K < 1:
            raise RangeError(f"K must be >= 1, got {self.K}")
        if self.ell <= 0:
            raise RangeError(f"ell must be positive, got {self.ell}")
        if self.pad_factor < 1:
            raise RangeError(f"pad_factor must be >= 1, got {self.pad_factor}")

    @property
    def n_modes(self) -> int:
        return 2 * self.K + 1

    @property
    def grid_capacity(self) -> int:
        """Largest physical grid the declared pad_factor pays for."""
        return int(math.floor(self.pad_factor * self.n_modes + 1e-9))

    def frequencies(self) -> np.ndarray:
        """Physical frequencies n/ell for n = -K..K."""
        return np.arange(-self.K, self.K + 1, dtype=float) / self.ell


class SpectralField:
    """Real-valued field stored as Hermitian-symmetric coefficients.

    Immutable after construction; the coefficient array is index-offset so
    that coeff[K + n] is the amplitude of mode n.
    """

    __slots__ = ("domain", "coeff")

    def __init__(self, domain: DomainSpec, coeff: np.ndarray):
        coeff = np.asarray(coeff, dtype=np.complex128)
        if coeff.shape != (domain.n_modes,):
            raise RangeError(
                f"coefficient vector must have length {domain.n_modes}"
            )
        coeff = coeff.copy()
        coeff.flags.writeable = False
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "coeff", coeff)

    def __setattr__(self, name, value):
        raise AttributeError("SpectralField is immutable")

    def coefficient(self, n: int) -> complex:
        K = self.domain.K
        if abs(n) > K:
            return 0.0 + 0.0j
        return complex(self.coeff[K + n])

    def band(self) -> int:
        """Largest |n| with a nonzero coefficient (0 for the zero field)."""
        nz = np.nonzero(self.coeff)[0]
        if nz.size == 0:
            return 0
        K = self.domain.K
        return int(max(abs(nz[0] - K), abs(nz[-1] - K)))

    def is_zero(self) -> bool:
        return not np.any(self.coeff)

    def __add__(self, other: "SpectralField") -> "SpectralField":
        _check_same_domain(self, other)
        return SpectralField(self.domain, self.coeff + other.coeff)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        _check_same_domain(self, other)
        return SpectralField(self.domain, self.coeff - other.coeff)

    def __mul__(self, scalar: float) -> "SpectralField":
        return SpectralField(self.domain, self.coeff * float(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "SpectralField":
        return SpectralField(self.domain, -self.coeff)


def _check_same_domain(f: SpectralField, g: SpectralField):
    if f.domain != g.domain:
        raise DomainError(f"domain mismatch: {f.domain} vs {g.domain}")


def zero_field(domain: DomainSpec) -> SpectralField:
    return SpectralField(domain, np.zeros(domain.n_modes, dtype=np.complex128))


def make_field(domain: DomainSpec, modes: Sequence[tuple]) -> SpectralField:
    """Build a real field from (mode, amplitude) pairs.

    Unlisted negative partners are auto-filled by conjugation; if both n and
    -n are supplied the amplitudes must already be conjugate.
    """
    K = domain.K
    coeff = np.zeros(domain.n_modes, dtype=np.complex128)
    listed = set()
    for n, a in modes:
        n = int(n)
        if abs(n) > K:
            raise RangeError(f"mode {n} outside band |n| <= {K}")
        if n in listed:
            raise SymmetryError(f"mode {n} listed twice")
        coeff[K + n] = a
        listed.add(n)
    for n in sorted(listed):
        if n == 0:
            if abs(coeff[K].imag) > _CONJ_TOL * max(1.0, abs(coeff[K])):
                raise SymmetryError("mode 0 amplitude must be real")
            coeff[K] = coeff[K].real
        elif -n in listed:
            a, b = coeff[K + n], coeff[K - n]
            if abs(b - np.conj(a)) > _CONJ_TOL * max(1.0, abs(a)):
                raise SymmetryError(
                    f"modes {n} and {-n} are not conjugate: {a} vs {b}"
                )
        else:
            coeff[K - n] = np.conj(coeff[K + n])
    return SpectralField(domain, coeff)


def sobolev_norm(f: SpectralField, s: float) -> float:
    """H^s norm: weighted l^2 sum with weight <n/ell>^s and measure 1/ell."""
    xi = f.domain.frequencies()
    w = (1.0 + xi * xi) ** s
    return math.sqrt(float(np.sum(w * np.abs(f.coeff) ** 2)) / f.domain.ell)


def project_split(f: SpectralField, N: int) -> tuple:
    """Split f into (low, high) across the strict cutoff |n| < N."""
    N = int(N)
    if N < 1:
        raise RangeError(f"cutoff must be >= 1, got {N}")
    K = f.domain.K
    low = np.zeros_like(f.coeff)
    lo, hi = max(0, K - N + 1), min(2 * K, K + N - 1)
    low[lo : hi + 1] = f.coeff[lo : hi + 1]
    high = f.coeff - low
    return SpectralField(f.domain, low), SpectralField(f.domain, high)


def to_values(f: SpectralField, n_points: int) -> np.ndarray:
    """Physical samples of f on a uniform grid of n_points >= 2K+1 points."""
    K = f.domain.K
    if n_points < f.domain.n_modes:
        raise RangeError("grid must resolve the full mode band")
    spec = np.zeros(n_points, dtype=np.complex128)
    spec[: K + 1] = f.coeff[K:]
    spec[n_points - K :] = f.coeff[:K]
    scale = n_points / math.sqrt(2.0 * math.pi * f.domain.ell)
    return np.real(ifft(spec) * scale)


def from_values(values: np.ndarray, domain: DomainSpec) -> SpectralField:
    """Band-limit physical samples back to {-K..K} coefficients."""
    n_points = len(values)
    K = domain.K
    spec = fft(values) * (math.sqrt(2.0 * math.pi * domain.ell) / n_points)
    coeff = np.empty(domain.n_modes, dtype=np.complex128)
    coeff[K:] = spec[: K + 1]
    coeff[:K] = spec[n_points - K :]
    # real input guarantees Hermitian symmetry up to roundoff; enforce exactly
    coeff = 0.5 * (coeff + np.conj(coeff[::-1]))
    return SpectralField(domain, coeff)


def _product_grid(domain: DomainSpec, total_band: int) -> int:
    protected = min(total_band, domain.K)
    need = total_band + protected + 1
    return next_fast_len(max(need, domain.n_modes))


def product(f: SpectralField, g: SpectralField) -> SpectralField:
    """Pointwise product, band-limited to {-K..K}.

    Always alias-free: the working grid is sized from the operands' populated
    bands.  Content of the true product beyond K is truncated; the caller is
    responsible for keeping headroom when that matters.
    """
    _check_same_domain(f, g)
    if f.is_zero() or g.is_zero():
        return zero_field(f.domain)
    M = _product_grid(f.domain, f.band() + g.band())
    vals = to_values(f, M) * to_values(g, M)
    return from_values(vals, f.domain)


def product_many(fields: Sequence[SpectralField]) -> SpectralField:
    """Alias-free p-fold product on a single oversampled grid.

    Unlike chained binary products this never truncates intermediates, and it
    enforces the domain's declared padding contract.
    """
    if not fields:
        raise RangeError("need at least one field")
    domain = fields[0].domain
    for g in fields[1:]:
        _check_same_domain(fields[0], g)
    bands = [g.band() for g in fields]
    if any(g.is_zero() for g in fields):
        return zero_field(domain)
    total = sum(bands)
    need = total + min(total, domain.K) + 1
    if need > domain.grid_capacity:
        raise AliasError(
            f"{len(fields)}-fold product needs {need} grid points, "
            f"pad_factor {domain.pad_factor} pays for {domain.grid_capacity}"
        )
    M = _product_grid(domain, total)
    vals = to_values(fields[0], M)
    for g in fields[1:]:
        vals = vals * to_values(g, M)
    return from_values(vals, domain)


def power(f: SpectralField, p: int) -> SpectralField:
    """Alias-free p-th pointwise power."""
    p = int(p)
    if p < 1:
        raise RangeError(f"power must be >= 1, got {p}")
    if p == 1 or f.is_zero():
        return f
    domain = f.domain
    B = f.band()
    need = p * B + min(p * B, domain.K) + 1
    if need > domain.grid_capacity:
        raise AliasError(
            f"power {p} of a band-{B} field needs {need} grid points, "
            f"pad_factor {domain.pad_factor} pays for {domain.grid_capacity}"
        )
    M = _product_grid(domain, p * B)
    vals = to_values(f, M) ** p
    return from_values(vals, domain)


def mean_integral(f: SpectralField) -> float:
    """The quadrature functional int f dx / ell (mode-0 readout)."""
    d = f.domain
    return math.sqrt(2.0 * math.pi * d.ell) * float(f.coeff[d.K].real) / d.ell


def field_to_json(f: SpectralField) -> str:
    """Serialize as {K, ell, modes: [[n, re, im], ...]} with n >= 0 only."""
    K = f.domain.K
    modes = []
    for n in range(K + 1):
        c = f.coeff[K + n]
        if c != 0:
            modes.append([n, c.real, c.imag])
    payload = {
        "K": K,
        "ell": f.domain.ell,
        "pad_factor": f.domain.pad_factor,
        "modes": modes,
    }
    return json.dumps(payload)


def field_from_json(text: str) -> SpectralField:
    payload = json.loads(text)
    domain = DomainSpec(
        K=int(payload["K"]),
        ell=float(payload["ell"]),
        pad_factor=float(payload.get("pad_factor", 2.0)),
    )
    K = domain.K
    coeff = np.zeros(domain.n_modes, dtype=np.complex128)
    for n, re, im in payload["modes"]:
        n = int(n)
        coeff[K + n] = complex(re, im)
        if n > 0:
            coeff[K - n] = complex(re, -im)
    return SpectralField(domain, coeff)
