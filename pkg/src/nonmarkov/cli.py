"""Command-line front end.

Subcommands::

    nonmarkov run --config scenario.json [--out traj.csv] [--t0 R] [--t1 R] [--dt R] [--sweep KEY=v1,v2,...]
    nonmarkov analyze-map map.json [--samples N] [--seed S] [--out report.json]
    nonmarkov canonical [--config scenario.json] --t1 R --t2 R [--samples N] [--seed S] [--out report.json]

Exit codes: 0 success, 2 invalid configuration or input, 3 numerical
refusal (singular time).
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import canonical as canon
from .core import as_density_matrix, bloch_to_density
from .maps import (
    BForm,
    a_to_b,
    check_a_properties,
    in_compatibility_domain,
    is_completely_positive,
    map_from_json,
    pseudo_inverse_a,
    to_aform,
)
from .master import (
    Trajectory,
    collision_simulate,
    depolarizing_lindblad,
    integrate_lindblad,
    integrate_nonmarkovian,
    integrate_truncated,
)
from .open_system import TotalDynamics, reduced_aform, reduced_state, swap_dynamics

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

SCENARIOS = ("swap-qubit", "collision", "lindblad", "truncated", "custom")


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# configuration


def parse_matrix(obj, n: int | None = None) -> np.ndarray:
    """Matrix from JSON: nested rows, or a flat row-major list (needs ``n``).

    Entries are real numbers or ``[re, im]`` pairs.
    """
    def entry(e):
        if isinstance(e, (int, float)):
            return complex(e)
        if isinstance(e, (list, tuple)) and len(e) == 2 and all(isinstance(x, (int, float)) for x in e):
            return complex(e[0], e[1])
        raise ConfigError(f"bad matrix entry {e!r}")

    if not isinstance(obj, list) or not obj:
        raise ConfigError("matrix must be a non-empty list")
    if all(isinstance(row, list) and len(row) == len(obj) for row in obj):
        m = np.array([[entry(e) for e in row] for row in obj])
    else:
        flat = np.array([entry(e) for e in obj])
        size = n if n is not None else math.isqrt(flat.size)
        if size * size != flat.size:
            raise ConfigError(f"flat matrix with {flat.size} entries is not square")
        m = flat.reshape(size, size)
    if n is not None and m.shape != (n, n):
        raise ConfigError(f"expected a {n}x{n} matrix, got {m.shape}")
    return m


@dataclass
class ScenarioConfig:
    scenario: str = "swap-qubit"
    hamiltonian: np.ndarray | None = None
    tau: np.ndarray | None = None
    h_local: np.ndarray | None = None
    d_s: int = 2
    d_e: int = 2
    t0: float = 0.0
    t1: float = 1.0
    dt: float = 1e-3
    bloch: tuple = (1.0, 0.0, 0.0)
    rho: np.ndarray | None = None
    method: str = "map"
    T: float | None = None
    N: int | None = None
    gamma: float | None = None
    out: str | None = None

    def dynamics(self) -> TotalDynamics:
        if self.hamiltonian is None and self.scenario == "custom":
            raise ConfigError("custom scenario needs a 'hamiltonian'")
        try:
            if self.hamiltonian is None:
                td = swap_dynamics(self.t0)
                return td if self.h_local is None else replace(td, h_local=self.h_local)
            tau = np.eye(self.d_e) / self.d_e if self.tau is None else self.tau
            return TotalDynamics(self.hamiltonian, tau, self.t0, self.d_s, self.d_e, self.h_local)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def initial_state(self) -> np.ndarray:
        try:
            if self.rho is not None:
                return as_density_matrix(self.rho)
            if self.d_s != 2:
                raise ConfigError("non-qubit systems need an explicit 'rho'")
            return as_density_matrix(bloch_to_density(self.bloch))
        except ValueError as exc:
            raise ConfigError(f"invalid initial state: {exc}") from exc

    def validate(self) -> "ScenarioConfig":
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}; expected one of {', '.join(SCENARIOS)}")
        if self.method not in ("map", "master"):
            raise ConfigError("method must be 'map' or 'master'")
        if self.scenario == "collision":
            if self.T is None or self.N is None:
                raise ConfigError("collision scenario needs 'T' and 'N'")
            if self.N < 0 or self.T <= 0:
                raise ConfigError("collision needs T > 0 and N >= 0")
        else:
            if not self.t1 > self.t0:
                raise ConfigError("time grid needs t1 > t0")
            if not self.dt > 0:
                raise ConfigError("dt must be positive")
        if self.scenario == "lindblad" and (self.gamma is None or self.gamma < 0):
            raise ConfigError("lindblad scenario needs a non-negative 'gamma'")
        if self.scenario == "truncated" and self.d_s != 2:
            raise ConfigError("truncated scenario is defined for a qubit")
        return self


_SCALARS = {"t0": float, "t1": float, "dt": float, "T": float, "N": int, "gamma": float}


def config_from_dict(data: dict, base_dir: Path | None = None) -> ScenarioConfig:
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a JSON object")
    cfg = ScenarioConfig()
    try:
        cfg.scenario = str(data.get("scenario", cfg.scenario))
        cfg.d_s = int(data.get("dS", cfg.d_s))
        cfg.d_e = int(data.get("dE", cfg.d_e))
        n = cfg.d_s * cfg.d_e
        if "hamiltonian" in data:
            cfg.hamiltonian = parse_matrix(data["hamiltonian"], n)
        if "tau" in data:
            cfg.tau = parse_matrix(data["tau"], cfg.d_e)
        if "h_local" in data:
            cfg.h_local = parse_matrix(data["h_local"], cfg.d_s)
        if "rho" in data:
            cfg.rho = parse_matrix(data["rho"], cfg.d_s)
        if "bloch" in data:
            cfg.bloch = tuple(float(x) for x in data["bloch"])
            if len(cfg.bloch) != 3:
                raise ConfigError("'bloch' needs three components")
        for key, conv in _SCALARS.items():
            if data.get(key) is not None:
                setattr(cfg, key, conv(data[key]))
        cfg.method = str(data.get("method", cfg.method))
        if data.get("out") is not None:
            out = Path(data["out"])
            cfg.out = str(out if out.is_absolute() or base_dir is None else base_dir / out)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"invalid configuration value: {exc}") from exc
    return cfg


def load_config(path) -> ScenarioConfig:
    p = Path(path)
    try:
        data = json.loads(p.read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {p}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {p}: {exc}") from None
    return config_from_dict(data, p.parent)


# ---------------------------------------------------------------------------
# run


def simulate(cfg: ScenarioConfig) -> Trajectory:
    """Trajectory for a validated configuration."""
    cfg.validate()
    eta0 = cfg.initial_state()
    if cfg.scenario == "truncated":
        return integrate_truncated(eta0, cfg.t0, cfg.t1, cfg.dt)
    if cfg.scenario == "lindblad":
        model = depolarizing_lindblad(cfg.gamma)
        if cfg.h_local is not None:
            model = replace(model, h=cfg.h_local)
        return integrate_lindblad(model, eta0, cfg.t0, cfg.t1, cfg.dt)
    td = cfg.dynamics()
    if cfg.scenario == "collision":
        single = reduced_aform(td, td.t0 + cfg.T)
        traj = collision_simulate(single, cfg.N, eta0, cfg.T)
        return Trajectory(traj.times + cfg.t0, traj.states)
    if cfg.method == "master":
        return integrate_nonmarkovian(td, eta0, cfg.t0, cfg.t1, cfg.dt)
    n = max(1, math.ceil((cfg.t1 - cfg.t0) / cfg.dt - 1e-9))
    times = np.linspace(cfg.t0, cfg.t1, n + 1)
    return Trajectory(times, [reduced_state(td, eta0, t) for t in times])


def summarize(traj: Trajectory) -> dict:
    summary = {
        "steps": len(traj) - 1,
        "final_t": float(traj.times[-1]),
        "max_trace_error": float(np.max(np.abs(traj.traces - 1))),
        "min_eigenvalue": float(np.min(traj.min_eig)),
        "final_purity": float(traj.purity[-1]),
    }
    if traj.states.shape[1] == 2:
        a = traj.bloch[-1]
        summary["final_bloch"] = [float(x) for x in a]
        summary["final_bloch_norm"] = float(np.linalg.norm(a))
    return summary


def _format_summary(summary: dict, prefix: str = "") -> str:
    lines = []
    for k, v in summary.items():
        if isinstance(v, float):
            v = f"{v:.12g}"
        elif isinstance(v, list):
            v = "(" + ", ".join(f"{x:.12g}" for x in v) + ")"
        lines.append(f"{prefix}{k}: {v}")
    return "\n".join(lines)


def parse_sweep(spec: str) -> tuple[str, list]:
    if "=" not in spec:
        raise ConfigError("--sweep expects KEY=v1,v2,...")
    key, values = spec.split("=", 1)
    key = key.strip()
    if key in _SCALARS:
        conv = _SCALARS[key]
        try:
            vals = [conv(v) for v in values.split(",") if v.strip()]
        except ValueError as exc:
            raise ConfigError(f"bad sweep value: {exc}") from None
    elif key == "bloch":
        try:
            vals = [tuple(float(x) for x in v.split(":")) for v in values.split(",") if v.strip()]
        except ValueError as exc:
            raise ConfigError(f"bad sweep value: {exc}") from None
        if any(len(v) != 3 for v in vals):
            raise ConfigError("bloch sweep values are a1:a2:a3")
    else:
        raise ConfigError(f"cannot sweep over {key!r}")
    if not vals:
        raise ConfigError("empty sweep")
    return key, vals


def _sweep_path(out: str, i: int) -> str:
    p = Path(out)
    return str(p.with_name(f"{p.stem}_{i}{p.suffix}"))


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    for key in ("t0", "t1", "dt"):
        if getattr(args, key) is not None:
            setattr(cfg, key, getattr(args, key))
    if args.out is not None:
        cfg.out = args.out
    if cfg.out is None:
        raise ConfigError("no output path (use --out or 'out' in the config)")
    cfg.validate()
    if args.sweep is None:
        jobs = [(cfg, cfg.out)]
    else:
        key, vals = parse_sweep(args.sweep)
        jobs = []
        for i, v in enumerate(vals):
            c = replace(cfg, **{key: v}).validate()
            jobs.append((c, _sweep_path(cfg.out, i)))
    with ThreadPoolExecutor() as pool:
        trajs = list(pool.map(lambda job: simulate(job[0]), jobs))
    for i, ((c, path), traj) in enumerate(zip(jobs, trajs)):
        traj.to_csv(path)
        prefix = "" if args.sweep is None else f"[{i}] "
        print(f"{prefix}scenario: {c.scenario}")
        print(f"{prefix}output: {path}")
        print(_format_summary(summarize(traj), prefix))
    return EXIT_OK


# ---------------------------------------------------------------------------
# analyze-map


def analyze_map(m, samples: int = 500, seed: int = 0) -> dict:
    a = to_aform(m)
    props = check_a_properties(a, samples, seed)
    b = m if isinstance(m, BForm) else a_to_b(a)
    hermitian = bool(np.max(np.abs(b.matrix - b.matrix.conj().T)) <= 1e-9)
    if hermitian:
        spectrum = [float(x) for x in np.sort(np.linalg.eigvalsh(0.5 * (b.matrix + b.matrix.conj().T)))[::-1]]
        cp = is_completely_positive(b)
    else:
        spectrum, cp = None, False
    pinv = pseudo_inverse_a(a)
    return {
        "dim": a.dim,
        "trace_preserving": props.trace_preserving,
        "hermiticity_preserving": props.hermiticity_preserving,
        "positive_on_samples": props.positive_on_samples,
        "worst_sampled_min_eigenvalue": props.worst_min_eigenvalue,
        "samples": samples,
        "seed": seed,
        "choi_spectrum": spectrum,
        "completely_positive": cp,
        "pseudo_inverse_rank": pinv.rank,
        "singular_values": [float(s) for s in pinv.singular_values],
    }


def _format_report(report: dict) -> str:
    lines = []
    for k, v in report.items():
        if isinstance(v, list):
            v = "(" + ", ".join(f"{x:.12g}" for x in v) + ")"
        elif isinstance(v, float):
            v = f"{v:.12g}"
        lines.append(f"{k}: {v}")
    return "\n".join(lines)


def _dump_json(report: dict, path) -> None:
    Path(path).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")


def cmd_analyze(args) -> int:
    p = Path(args.map)
    try:
        m = map_from_json(json.loads(p.read_text()))
    except FileNotFoundError:
        raise ConfigError(f"map file not found: {p}") from None
    except (json.JSONDecodeError, ValueError, TypeError, IndexError) as exc:
        raise ConfigError(f"malformed map JSON: {exc}") from None
    report = analyze_map(m, args.samples, args.seed)
    print(_format_report(report))
    if args.out:
        _dump_json(report, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# canonical


def _fibonacci_sphere(n: int) -> np.ndarray:
    k = np.arange(n) + 0.5
    z = 1 - 2 * k / n
    phi = math.pi * (1 + math.sqrt(5)) * k
    r = np.sqrt(1 - z * z)
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def compatibility_radius(td: TotalDynamics, t: float, n_directions: int = 200, iters: int = 40) -> float | None:
    """Radius of the largest Bloch ball around the origin inside the compatibility domain at ``t``."""
    if td.d_s != 2:
        return None
    fwd = reduced_aform(td, t)
    if not in_compatibility_domain(fwd, np.eye(2) / 2):
        return 0.0
    radius = 1.0
    for n in _fibonacci_sphere(n_directions):
        if in_compatibility_domain(fwd, bloch_to_density(radius * n)):
            continue
        lo, hi = 0.0, radius
        for _ in range(iters):
            mid = 0.5 * (lo + hi)
            if in_compatibility_domain(fwd, bloch_to_density(mid * n)):
                lo = mid
            else:
                hi = mid
        radius = lo
    return radius


def canonical_report(td: TotalDynamics, t1: float, t2: float, samples: int = 200, seed: int = 0) -> dict:
    cm = canon.canonical_map(td, t1, t2)
    b = cm.b
    spectrum = np.sort(np.linalg.eigvalsh(0.5 * (b.matrix + b.matrix.conj().T)))[::-1]
    rng = np.random.default_rng(seed)
    lo, hi = min(t1, t2), max(t1, t2)
    for _ in range(100):
        s = float(rng.uniform(lo - 1.0, hi + 1.0))
        try:
            via = canon.compose_canonical(canon.canonical_map(td, s, t2), canon.canonical_map(td, t1, s))
            break
        except canon.SingularTimeError:
            continue
    else:
        raise canon.SingularTimeError(s, 0.0, math.inf)
    residual = float(np.max(np.abs(via.a.matrix - cm.a.matrix)))
    return {
        "t0": td.t0,
        "t1": float(t1),
        "t2": float(t2),
        "choi_spectrum": [float(x) for x in spectrum],
        "completely_positive": bool(spectrum[-1] >= -1e-9),
        "group_intermediate_time": s,
        "group_law_residual": residual,
        "compatibility_radius_t1": compatibility_radius(td, t1, samples),
    }


def cmd_canonical(args) -> int:
    cfg = load_config(args.config) if args.config else ScenarioConfig()
    if args.t0 is not None:
        cfg.t0 = args.t0
    if args.t1 is None or args.t2 is None:
        raise ConfigError("canonical needs --t1 and --t2")
    report = canonical_report(cfg.dynamics(), args.t1, args.t2, args.samples, args.seed)
    print(_format_report(report))
    if args.out:
        _dump_json(report, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nonmarkov", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate a scenario and write a trajectory CSV")
    run.add_argument("--config", required=True)
    run.add_argument("--out")
    run.add_argument("--t0", type=float)
    run.add_argument("--t1", type=float)
    run.add_argument("--dt", type=float)
    run.add_argument("--sweep", help="KEY=v1,v2,... over t0, t1, dt, T, N, gamma or bloch (a1:a2:a3)")
    run.set_defaults(func=cmd_run)

    an = sub.add_parser("analyze-map", help="report properties of a map given as JSON")
    an.add_argument("map")
    an.add_argument("--samples", type=int, default=500)
    an.add_argument("--seed", type=int, default=0)
    an.add_argument("--out")
    an.set_defaults(func=cmd_analyze)

    ca = sub.add_parser("canonical", help="canonical map between two times")
    ca.add_argument("--config")
    ca.add_argument("--t0", type=float)
    ca.add_argument("--t1", type=float)
    ca.add_argument("--t2", type=float)
    ca.add_argument("--samples", type=int, default=200, help="directions for the domain-radius estimate")
    ca.add_argument("--seed", type=int, default=0)
    ca.add_argument("--out")
    ca.set_defaults(func=cmd_canonical)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except canon.SingularTimeError as exc:
        print(f"numerical refusal: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
