"""Local solvers, conserved quantities, and the high-low global continuation.

Two independent routes to the local solution are provided: a Picard fixed
point of the Duhamel map on a sampled time grid, and classical RK4 marching
on the mild vector field.  The high-low solver splits rough data at a cutoff
chosen from the local-time heuristic, evolves the rough part under the full
equation and the regular part under the perturbed equation, and monitors the
predicted exponential H^1 envelope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from .bbm_ops import (
    apply_phi,
    linear_vector_field,
    semigroup,
    semigroup_phases,
    theta,
    vector_field,
)
from .errors import (
    BlowupError,
    ContractionError,
    ConvergenceError,
    GronwallViolation,
    UnsupportedError,
)
from .rng import Xoshiro256
from .spectral_core import (
    DomainSpec,
    SpectralField,
    mean_integral,
    power,
    project_split,
    sobolev_norm,
    zero_field,
)


@dataclass
class SolverConfig:
    p: int = 3
    s: float = 0.5
    dt: float = 1e-3
    picard_tol: float = 1e-10
    max_iter: int = 40
    c_contraction: float = 1.0
    c_local: float = 1.0

    def __post_init__(self):
        if self.p < 2:
            raise UnsupportedError(f"p must be >= 2, got {self.p}")
        if self.dt <= 0 or self.picard_tol <= 0 or self.max_iter < 2:
            raise UnsupportedError("dt, picard_tol must be positive; max_iter >= 2")


@dataclass
class Trajectory:
    times: List[float]
    states: List[SpectralField]
    energy_series: List[float]
    hamiltonian_series: List[float]
    iterate_distances: Optional[List[float]] = None

    def state_at(self, t: float, atol: float = 1e-9) -> SpectralField:
        for ti, u in zip(self.times, self.states):
            if abs(ti - t) <= atol:
                return u
        raise KeyError(f"no recorded state at t={t}")

    def to_csv(self, path, s: float):
        """Write t, energy, hamiltonian, hs_norm, h1_norm rows."""
        with open(path, "w", newline="") as fh:
            fh.write("t,energy,hamiltonian,hs_norm,h1_norm\n")
            for t, u, e, m in zip(
                self.times, self.states, self.energy_series, self.hamiltonian_series
            ):
                fh.write(
                    f"{t:.17g},{e:.17g},{m:.17g},"
                    f"{sobolev_norm(u, s):.17g},{sobolev_norm(u, 1.0):.17g}\n"
                )


@dataclass
class HighLowState:
    cutoff_N: int
    v_traj: Trajectory
    w_traj: Trajectory
    L_const: float
    bound_series: List[float]
    restart_times: List[float] = field(default_factory=list)
    u_hamiltonian_series: List[float] = field(default_factory=list)
    lp_bound_max: float = 0.0

    def u_state(self, i: int) -> SpectralField:
        return self.v_traj.states[i] + self.w_traj.states[i]


def energy(f: SpectralField) -> float:
    """Quadratic invariant (1/2) int (u^2 + u_x^2); equals H^1 norm^2 / 2."""
    xi = f.domain.frequencies()
    return 0.5 * float(np.sum((1.0 + xi * xi) * np.abs(f.coeff) ** 2)) / f.domain.ell


def hamiltonian(f: SpectralField, p: int) -> float:
    """(1/2) int u^2 + 1/(p+1) int u^(p+1), via alias-free quadrature."""
    l2_sq = float(np.sum(np.abs(f.coeff) ** 2)) / f.domain.ell
    return 0.5 * l2_sq + mean_integral(power(f, p + 1)) / (p + 1)


def lp_power_integral(f: SpectralField, q: int) -> float:
    """int u^q via the mode-0 coefficient of the alias-free power."""
    return mean_integral(power(f, q))


def local_time(R: float, p: int, c_local: float) -> float:
    """Local-existence heuristic c * R^-(p-1); infinite for zero data."""
    if R < 0 or c_local <= 0:
        raise UnsupportedError("R must be >= 0 and c_local > 0")
    if R == 0:
        return math.inf
    return c_local * R ** (-(p - 1))


def gronwall_L(u0_norm: float, p: int) -> float:
    """Closed-form Gronwall rate from the data norm, for p in {3, 5}."""
    r = float(u0_norm)
    if r < 0:
        raise UnsupportedError("norm must be nonnegative")
    if p == 3:
        return r * (r**2 + r**4) ** 0.25
    if p == 5:
        base = r**2 + r**6
        return r * base**0.5 + r**2 * base ** (1.0 / 3.0) + r**3 * base ** (1.0 / 6.0)
    raise UnsupportedError(f"Gronwall rate implemented for p in {{3, 5}}, got {p}")


def _quadrature_weights(i: int, h: float) -> np.ndarray:
    """Weights for int_0^{t_i} on nodes 0..i of a uniform grid.

    Composite Simpson for even i; Simpson plus a 3/8 tail for odd i >= 3;
    trapezoid for the single-panel case i = 1.
    """
    w = np.zeros(i + 1)
    if i == 0:
        return w
    if i == 1:
        w[:2] = h / 2.0
        return w
    if i % 2 == 0:
        w[0] = w[i] = h / 3.0
        w[1:i:2] = 4.0 * h / 3.0
        w[2:i:2] = 2.0 * h / 3.0
        return w
    m = i - 3
    if m > 0:
        w[0] += h / 3.0
        w[m] += h / 3.0
        w[1:m:2] += 4.0 * h / 3.0
        w[2:m:2] += 2.0 * h / 3.0
    w[m] += 3.0 * h / 8.0
    w[m + 1] += 9.0 * h / 8.0
    w[m + 2] += 9.0 * h / 8.0
    w[i] += 3.0 * h / 8.0
    return w


def picard_solve(
    u0: SpectralField, cfg: SolverConfig, T: float, n_time_samples: int
) -> Trajectory:
    """Iterate the Duhamel map to its fixed point on a sampled time grid.

    The caller is responsible for the contraction precondition
    c_contraction * T * p * (2R)^(p-1) <= 1/2 with R the H^s norm of u0;
    expansion is detected and reported either way.
    """
    if n_time_samples < 2:
        raise UnsupportedError("need at least two time samples")
    n = int(n_time_samples)
    h = T / (n - 1)
    times = [i * h for i in range(n)]
    domain = u0.domain
    xi = domain.frequencies()
    phi_mult = 1j * theta(xi)
    # phase(d) multiplies by S(d*h)
    phases = np.exp(-1j * np.outer(np.arange(n) * h, theta(xi)))
    weights = [_quadrature_weights(i, h) for i in range(n)]
    hs_weight = (1.0 + xi * xi) ** cfg.s / domain.ell

    def hs_dist(a, b):
        d = a - b
        return math.sqrt(float(np.sum(hs_weight * np.abs(d) ** 2)))

    free = [u0.coeff * phases[i] for i in range(n)]
    cur = [c.copy() for c in free]
    distances: List[float] = []
    increases = 0
    converged = False
    for _ in range(cfg.max_iter):
        integrand = [
            phi_mult * power(SpectralField(domain, c), cfg.p).coeff for c in cur
        ]
        new = []
        for i in range(n):
            acc = free[i].copy()
            w = weights[i]
            for j in range(i + 1):
                if w[j] != 0.0:
                    acc -= w[j] * phases[i - j] * integrand[j]
            new.append(acc)
        d = max(hs_dist(a, b) for a, b in zip(new, cur))
        cur = new
        if distances and d > distances[-1] and d > cfg.picard_tol:
            increases += 1
            if increases >= 2:
                raise ContractionError(
                    f"iterate distances expanding: {distances[-1]:.3g} -> {d:.3g}"
                )
        else:
            increases = 0
        distances.append(d)
        if d < cfg.picard_tol:
            converged = True
            break
    if not converged:
        raise ConvergenceError(
            f"no fixed point within {cfg.max_iter} sweeps (last d={distances[-1]:.3g})"
        )
    states = [SpectralField(domain, c) for c in cur]
    return Trajectory(
        times=times,
        states=states,
        energy_series=[energy(u) for u in states],
        hamiltonian_series=[hamiltonian(u, cfg.p) for u in states],
        iterate_distances=distances,
    )


def _rk4_step(u: SpectralField, rhs: Callable, dt: float) -> SpectralField:
    k1 = rhs(u)
    k2 = rhs(u + (0.5 * dt) * k1)
    k3 = rhs(u + (0.5 * dt) * k2)
    k4 = rhs(u + dt * k3)
    return u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _time_grid(T: float, dt: float) -> List[float]:
    n_full = int(math.floor(T / dt + 1e-12))
    steps = [dt] * n_full
    rem = T - n_full * dt
    if rem > 1e-12 * max(1.0, T):
        steps.append(rem)
    return steps


def rk4_solve(
    u0: SpectralField, cfg: SolverConfig, T: float, linear_only: bool = False
) -> Trajectory:
    """Classical 4th-order marching on the mild vector field."""
    if cfg.dt > T:
        raise UnsupportedError("dt must not exceed T")
    if linear_only:
        rhs = linear_vector_field
    else:
        rhs = lambda u: vector_field(u, cfg.p)
    u = u0
    t = 0.0
    times = [0.0]
    states = [u0]
    energies = [energy(u0)]
    hams = [hamiltonian(u0, cfg.p)]
    for step in _time_grid(T, cfg.dt):
        u = _rk4_step(u, rhs, step)
        t += step
        if not np.all(np.isfinite(u.coeff)):
            raise BlowupError(t)
        times.append(t)
        states.append(u)
        energies.append(energy(u))
        hams.append(hamiltonian(u, cfg.p))
    return Trajectory(times, states, energies, hams)


def highlow_global_solve(
    u0: SpectralField, cfg: SolverConfig, T: float, bound_ceiling: float = 1.5
) -> HighLowState:
    """High-low continuation: rough part under the full flow, regular part
    under the perturbed flow, with Gronwall envelope monitoring.

    The pair (v, w) is advanced as one coupled RK4 system so the v seen by
    w's stage evaluations is stage-consistent; restarts of the w-solve are
    bookkeeping boundaries where the local-time heuristic is re-evaluated.
    """
    p, s = cfg.p, cfg.s
    if p not in (3, 5):
        raise UnsupportedError(f"high-low continuation supports p in {{3, 5}}, got {p}")
    if p == 3 and s < 0.25:
        raise UnsupportedError("p=3 requires s >= 1/4")
    if p == 5 and s <= 0.5:
        raise UnsupportedError("p=5 requires s > 1/2")

    # least cutoff making the rough tail small enough for lifespan T
    K = u0.domain.K
    N = 1
    while True:
        w, v = project_split(u0, N)
        if sobolev_norm(v, s) ** (p - 1) <= cfg.c_local / T or N > K:
            break
        N += 1

    L = gronwall_L(sobolev_norm(u0, s), p)
    w0_h1 = sobolev_norm(w, 1.0)
    m0 = hamiltonian(u0, p)

    def full_rhs(vv):
        return vector_field(vv, p)

    def perturbed_rhs(ww, vv):
        return -1.0 * apply_phi(ww + power(ww + vv, p) - power(vv, p))

    def record(t, vv, ww):
        times.append(t)
        v_states.append(vv)
        w_states.append(ww)
        uu = vv + ww
        u_ham.append(hamiltonian(uu, p))
        bound = bound_ceiling * w0_h1 * math.exp(L * t)
        bounds.append(bound)
        w_h1 = sobolev_norm(ww, 1.0)
        if w_h1 > bound + 1e-12:
            raise GronwallViolation(t, w_h1, bound)
        nonlocal lp_max
        if m0 > 0:
            lp_max = max(lp_max, lp_power_integral(uu, p + 1) / (p + 1) / m0)

    times: List[float] = []
    v_states: List[SpectralField] = []
    w_states: List[SpectralField] = []
    u_ham: List[float] = []
    bounds: List[float] = []
    restart_times: List[float] = [0.0]
    lp_max = 0.0

    record(0.0, v, w)
    t = 0.0
    floor = T / 1024.0
    while t < T - 1e-12 * max(1.0, T):
        R_seg = sobolev_norm(w, 1.0) + sobolev_norm(v, s)
        seg = min(local_time(R_seg, p, cfg.c_local), T - t)
        seg = max(seg, floor, cfg.dt)
        seg = min(seg, T - t)
        for step in _time_grid(seg, cfg.dt):
            k1v = full_rhs(v)
            k1w = perturbed_rhs(w, v)
            k2v = full_rhs(v + (0.5 * step) * k1v)
            k2w = perturbed_rhs(w + (0.5 * step) * k1w, v + (0.5 * step) * k1v)
            k3v = full_rhs(v + (0.5 * step) * k2v)
            k3w = perturbed_rhs(w + (0.5 * step) * k2w, v + (0.5 * step) * k2v)
            k4v = full_rhs(v + step * k3v)
            k4w = perturbed_rhs(w + step * k3w, v + step * k3v)
            v = v + (step / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
            w = w + (step / 6.0) * (k1w + 2.0 * k2w + 2.0 * k3w + k4w)
            t += step
            if not (np.all(np.isfinite(v.coeff)) and np.all(np.isfinite(w.coeff))):
                raise BlowupError(t)
            record(t, v, w)
        restart_times.append(t)

    cfg_p = cfg.p
    v_traj = Trajectory(
        times=list(times),
        states=v_states,
        energy_series=[energy(x) for x in v_states],
        hamiltonian_series=[hamiltonian(x, cfg_p) for x in v_states],
    )
    w_traj = Trajectory(
        times=list(times),
        states=w_states,
        energy_series=[energy(x) for x in w_states],
        hamiltonian_series=[hamiltonian(x, cfg_p) for x in w_states],
    )
    return HighLowState(
        cutoff_N=N,
        v_traj=v_traj,
        w_traj=w_traj,
        L_const=L,
        bound_series=bounds,
        restart_times=restart_times,
        u_hamiltonian_series=u_ham,
        lp_bound_max=lp_max,
    )


def rough_field(
    domain: DomainSpec,
    s: float,
    seed: int,
    eps: float = 0.01,
    target_norm: float = 1.0,
) -> SpectralField:
    """Generic H^s data just above regularity s: coefficients <n>^(-s-1/2-eps)
    with seeded random phases, Hermitian-symmetrized and normalized."""
    rng = Xoshiro256(seed)
    K = domain.K
    coeff = np.zeros(domain.n_modes, dtype=np.complex128)
    decay = -(s + 0.5 + eps)
    for n in range(1, K + 1):
        phase = 2.0 * math.pi * rng.uniform()
        a = (1.0 + n * n) ** (decay / 2.0) * complex(math.cos(phase), math.sin(phase))
        coeff[K + n] = a
        coeff[K - n] = np.conj(a)
    f = SpectralField(domain, coeff)
    norm = sobolev_norm(f, s)
    if norm == 0.0:
        return f
    return (target_norm / norm) * f


def calibrate_contraction_constant(
    domain: DomainSpec, p: int, s: float, seed: int = 1, n_samples: int = 16
) -> float:
    """Measured multilinear constant sup ||phi(u^p)||_Hs / ||u||_Hs^p over a
    seeded sample of rough fields, with a 2x safety factor."""
    best = 0.0
    for k in range(n_samples):
        u = rough_field(domain, s, seed + k, target_norm=1.0)
        val = sobolev_norm(apply_phi(power(u, p)), s)
        best = max(best, val)
    return 2.0 * best
