"""Configuration-driven experiment runner.

Commands:

    gbbm validate <config.json>
    gbbm run <config.json> [--output-dir DIR] [--threads K]

A config is a single JSON object; every run is reproducible from it alone.
Exit codes: 0 success, 1 experiment-level assertion failure (e.g. a violated
conservation tolerance), 2 config error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__
from .errors import GbbmError, GronwallViolation
from .estimates import (
    illposed_sweep,
    multilinear_ratio,
    obstruction_to_csv,
    sweep_to_csv,
    torus_family,
    line_family,
)
from .solver import (
    SolverConfig,
    Trajectory,
    highlow_global_solve,
    rk4_solve,
    rough_field,
)
from .spectral_core import DomainSpec, make_field, sobolev_norm

COMMANDS = ("simulate", "sweep-multilinear", "illposed", "highlow", "conservation")


class ConfigError(Exception):
    pass


def _require(cfg, key, kind=None):
    if key not in cfg:
        raise ConfigError(f"missing config key: {key}")
    val = cfg[key]
    if kind is not None and not isinstance(val, kind):
        raise ConfigError(f"config key {key} has wrong type: {type(val).__name__}")
    return val


def load_config(path: str) -> dict:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        cfg = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    command = _require(cfg, "command", str)
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}; expected one of {COMMANDS}")
    _require(cfg, "seed", int)
    return cfg


def _domain_from(cfg) -> DomainSpec:
    d = _require(cfg, "domain", dict)
    return DomainSpec(
        K=int(_require(d, "K")),
        ell=float(d.get("ell", 1.0)),
        pad_factor=float(d.get("pad_factor", 2.0)),
    )


def _solver_from(cfg) -> SolverConfig:
    s = cfg.get("solver", {})
    return SolverConfig(
        p=int(s.get("p", 3)),
        s=float(s.get("s", 0.5)),
        dt=float(s.get("dt", 1e-3)),
        picard_tol=float(s.get("picard_tol", 1e-10)),
        max_iter=int(s.get("max_iter", 40)),
        c_contraction=float(s.get("c_contraction", 1.0)),
        c_local=float(s.get("c_local", 1.0)),
    )


def _initial_field(cfg, domain, scfg):
    params = cfg.get("params", {})
    init = params.get("initial", {"kind": "rough"})
    kind = init.get("kind", "rough")
    if kind == "rough":
        return rough_field(
            domain,
            float(init.get("s", scfg.s)),
            int(cfg["seed"]),
            target_norm=float(init.get("target_norm", 1.0)),
        )
    if kind == "modes":
        modes = [(int(n), complex(re, im)) for n, re, im in init["modes"]]
        return make_field(domain, modes)
    if kind == "zero":
        return make_field(domain, [])
    raise ConfigError(f"unknown initial data kind {kind!r}")


def validate_config(cfg) -> list:
    """Feasibility findings; empty list means runnable."""
    findings = []
    command = cfg["command"]
    try:
        domain = _domain_from(cfg) if "domain" in cfg else None
        scfg = _solver_from(cfg)
    except (ConfigError, GbbmError) as exc:
        return [str(exc)]
    params = cfg.get("params", {})
    p = scfg.p
    if command in ("simulate", "conservation", "highlow"):
        if domain is None:
            findings.append("domain section required")
        else:
            # conserved-quantity tracking needs the (p+1)-th power
            min_pad = (p + 2) / 2.0
            if domain.pad_factor < min_pad:
                findings.append(
                    f"AliasError forecast: pad_factor {domain.pad_factor} < "
                    f"{min_pad} needed for the (p+1)-power quadrature"
                )
        if "T" not in params:
            findings.append("params.T required")
    if command in ("sweep-multilinear", "illposed"):
        n_list = params.get("N_list")
        if not n_list:
            findings.append("params.N_list required")
        elif command == "sweep-multilinear" and len(set(n_list)) < 3:
            findings.append("params.N_list needs at least three distinct values for the slope fit")
        elif params.get("kind", "torus") == "torus" and domain is not None:
            need = 2 * (p - 1) * max(n_list)
            if domain.K < need:
                findings.append(f"infeasible: K {domain.K} < 2(p-1)max(N) = {need}")
        if domain is not None and domain.pad_factor < (p + 1) / 2.0:
            findings.append(
                f"AliasError forecast: pad_factor {domain.pad_factor} < {(p + 1) / 2.0}"
            )
    if command == "illposed":
        t = params.get("t", 0.5)
        if not 0 < t <= math.pi / 3 + 1e-12:
            findings.append(f"t={t} outside (0, pi/3]")
    if command == "highlow":
        if p not in (3, 5):
            findings.append(f"highlow requires p in {{3,5}}, got {p}")
        elif p == 3 and scfg.s < 0.25:
            findings.append("p=3 highlow requires s >= 1/4")
        elif p == 5 and scfg.s <= 0.5:
            findings.append("p=5 highlow requires s > 1/2")
    if command == "simulate" and params.get("method") == "picard":
        if domain is not None:
            try:
                u0 = _initial_field(cfg, domain, scfg)
                R = sobolev_norm(u0, scfg.s)
                lhs = scfg.c_contraction * params.get("T", 1.0) * p * (2 * R) ** (p - 1)
                if lhs > 0.5:
                    findings.append(
                        f"contraction precondition fails: C*T*p*(2R)^(p-1) = {lhs:.3g} > 0.5"
                    )
            except (GbbmError, ConfigError, KeyError) as exc:
                findings.append(str(exc))
    return findings


def _run_simulate(cfg, outdir, threads):
    domain = _domain_from(cfg)
    scfg = _solver_from(cfg)
    params = cfg.get("params", {})
    T = float(_require(params, "T"))
    u0 = _initial_field(cfg, domain, scfg)
    if params.get("method") == "picard":
        from .solver import picard_solve

        traj = picard_solve(u0, scfg, T, int(params.get("n_time_samples", 33)))
    else:
        traj = rk4_solve(u0, scfg, T)
    traj.to_csv(outdir / "trajectory.csv", scfg.s)
    return 0


def _run_conservation(cfg, outdir, threads):
    domain = _domain_from(cfg)
    scfg = _solver_from(cfg)
    params = cfg.get("params", {})
    T = float(_require(params, "T"))
    tol = float(params.get("tolerance", 1e-6))
    u0 = _initial_field(cfg, domain, scfg)
    traj = rk4_solve(u0, scfg, T)
    traj.to_csv(outdir / "trajectory.csv", scfg.s)
    e0, m0 = traj.energy_series[0], traj.hamiltonian_series[0]
    drift_e = max(abs(e - e0) for e in traj.energy_series)
    drift_m = max(abs(m - m0) for m in traj.hamiltonian_series)
    rel_e = drift_e / e0 if e0 else drift_e
    rel_m = drift_m / abs(m0) if m0 else drift_m
    summary = {"energy_drift_rel": rel_e, "hamiltonian_drift_rel": rel_m, "tolerance": tol}
    (outdir / "conservation.json").write_text(json.dumps(summary, indent=2))
    if max(rel_e, rel_m) > tol:
        print(f"conservation drift {max(rel_e, rel_m):.3g} exceeds tolerance {tol}", file=sys.stderr)
        return 1
    return 0


def _run_sweep(cfg, outdir, threads):
    domain = cfg.get("domain")
    scfg = _solver_from(cfg)
    params = cfg.get("params", {})
    n_list = [int(n) for n in _require(params, "N_list")]
    s_list = [float(s) for s in params.get("s_list", [scfg.s])]
    kind = params.get("kind", "torus")
    ell_list = [float(e) for e in params.get("ell_list", [64.0])]
    p = scfg.p

    def fields_for(N, ell):
        if kind == "torus":
            return torus_family(N, p, K=2 * (p - 1) * N)
        dom = DomainSpec(K=int(2 * (p - 1) * N * ell), ell=ell, pad_factor=(p + 1) / 2.0)
        return line_family(N, p, dom)

    configs = [(s, ell) for s in s_list for ell in (ell_list if kind == "line" else [1.0])]
    for s, ell in configs:
        def one(N):
            return multilinear_ratio(fields_for(N, ell), s, N=N)

        if threads and threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                records = list(pool.map(one, n_list))
        else:
            records = [one(N) for N in n_list]
        tag = f"p{p}_s{s:g}" + (f"_ell{ell:g}" if kind == "line" else "")
        sweep_to_csv(records, outdir / f"sweep_{tag}.csv")
    return 0


def _run_illposed(cfg, outdir, threads):
    scfg = _solver_from(cfg)
    params = cfg.get("params", {})
    n_list = [int(n) for n in _require(params, "N_list")]
    s_list = [float(s) for s in params.get("s_list", [scfg.s])]
    t = float(params.get("t", 0.5))
    kind = params.get("kind", "torus")
    ell = float(params.get("ell", 64.0))
    n_quad = int(params.get("n_quad", 16))
    for s in s_list:
        records = illposed_sweep(scfg.p, s, t, n_list, kind, ell=ell, n_quad=n_quad)
        tag = f"p{scfg.p}_s{s:g}" + (f"_ell{ell:g}" if kind == "line" else "")
        obstruction_to_csv(records, outdir / f"obstruction_{tag}.csv")
    return 0


def _run_highlow(cfg, outdir, threads):
    domain = _domain_from(cfg)
    scfg = _solver_from(cfg)
    params = cfg.get("params", {})
    T = float(_require(params, "T"))
    u0 = _initial_field(cfg, domain, scfg)
    state = highlow_global_solve(u0, scfg, T)
    state.v_traj.to_csv(outdir / "rough_part.csv", scfg.s)
    state.w_traj.to_csv(outdir / "regular_part.csv", scfg.s)
    with open(outdir / "bound.csv", "w", newline="") as fh:
        fh.write("t,w_h1,bound,u_hamiltonian\n")
        for t, w, b, m in zip(
            state.w_traj.times,
            state.w_traj.states,
            state.bound_series,
            state.u_hamiltonian_series,
        ):
            fh.write(f"{t:.17g},{sobolev_norm(w, 1.0):.17g},{b:.17g},{m:.17g}\n")
    summary = {
        "cutoff_N": state.cutoff_N,
        "L_const": state.L_const,
        "lp_bound_max": state.lp_bound_max,
        "restarts": len(state.restart_times) - 1,
    }
    (outdir / "highlow.json").write_text(json.dumps(summary, indent=2))
    return 0


_RUNNERS = {
    "simulate": _run_simulate,
    "conservation": _run_conservation,
    "sweep-multilinear": _run_sweep,
    "illposed": _run_illposed,
    "highlow": _run_highlow,
}


def cmd_validate(args) -> int:
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    findings = validate_config(cfg)
    if findings:
        for f in findings:
            print(f"infeasible: {f}")
        return 1
    print("ok")
    return 0


def cmd_run(args) -> int:
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    findings = validate_config(cfg)
    if findings:
        for f in findings:
            print(f"error: {f}", file=sys.stderr)
        return 2
    outdir = Path(args.output_dir or cfg.get("output_dir", "."))
    outdir.mkdir(parents=True, exist_ok=True)
    start = time.time()
    try:
        status = _RUNNERS[cfg["command"]](cfg, outdir, args.threads)
    except GronwallViolation as exc:
        print(f"experiment failure: {exc}", file=sys.stderr)
        status = 1
    except GbbmError as exc:
        print(f"experiment failure: {exc}", file=sys.stderr)
        status = 1
    manifest = {
        "config": cfg,
        "tool_version": __version__,
        "wall_time_s": time.time() - start,
    }
    (outdir / "manifest.json").write_text(json.dumps(manifest, indent=2))
    return status


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="gbbm", description=__doc__)
    sub = parser.add_subparsers(dest="cmd", required=True)
    pv = sub.add_parser("validate", help="check a config for feasibility")
    pv.add_argument("config")
    pv.set_defaults(func=cmd_validate)
    pr = sub.add_parser("run", help="execute an experiment config")
    pr.add_argument("config")
    pr.add_argument("--output-dir", default=None)
    pr.add_argument("--threads", type=int, default=0, help="0 = auto (serial)")
    pr.set_defaults(func=cmd_run)
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
