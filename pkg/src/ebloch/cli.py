"""Config-driven command-line front end.

Subcommands: simulate, fixed-point, verify-algebra, canonical, bench.
One sectioned key-value config file per run (INI syntax, documented in the
README), deterministic CSV output (17 significant digits, atomic writes),
seeded randomness recorded in output headers.  Exit codes: 0 success,
1 validation error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import configparser
import json
import os
import sys
import tempfile
from dataclasses import dataclass

import numpy as np

from . import bench as bench_mod
from .canonical import canonical_experiment
from .dissipators import RhsSpec
from .linalg import as_matrix
from .propagate import PropagationError, propagate
from .stationary import FixedPointError, fixed_point, gibbs_state
from .systems import (
    BathModel,
    LadderSystem,
    TransitionSpec,
    TwoLevelSystem,
    build_oscillator,
    build_two_level_hamiltonian,
    jump_operators,
    verify_jump_algebra,
)

SUBCOMMANDS = ("simulate", "fixed-point", "verify-algebra", "canonical", "bench")

_REQUIRED = object()


class ConfigError(ValueError):
    """Carries every validation problem found in a config, not just the first."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass
class ScenarioConfig:
    """Validated run description assembled from one config file."""

    system: TwoLevelSystem | LadderSystem
    system_kind: str
    dissipator_kind: str
    include_unitary: bool
    gamma_pd: float
    bath_T: float | None
    initial: tuple
    t_final: float | None
    dt: float | None
    method: str
    record_every: int
    out_path: str | None
    what: str
    verify_draws: int
    bench_applications: int
    bench_chunks: int
    canonical_T0: float | None


def _fmt(x) -> str:
    return format(float(x), ".17g")


def format_matrix_text(M) -> str:
    """State-matrix file format: one row per line, entries as re+imi pairs."""
    M = as_matrix(M)
    lines = []
    for row in M:
        lines.append(" ".join(f"{z.real:.17g}{z.imag:+.17g}i" for z in row))
    return "\n".join(lines) + "\n"


def parse_matrix_text(text: str) -> np.ndarray:
    """Inverse of :func:`format_matrix_text`."""
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            rows.append([complex(tok.replace("i", "j")) for tok in line.split()])
        except ValueError as exc:
            raise ValueError(f"state file line {lineno}: {exc}") from None
    if not rows:
        raise ValueError("state file contains no matrix rows")
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("state file rows do not form a square matrix")
    M = np.array(rows, dtype=complex)
    if not np.all(np.isfinite(M.view(float))):
        raise ValueError("state file contains non-finite entries")
    return M


class _Reader:
    """configparser access that accumulates errors instead of raising."""

    def __init__(self, cp: configparser.ConfigParser):
        self.cp = cp
        self.errors: list[str] = []

    def get(self, section, key, cast=str, default=_REQUIRED, choices=None):
        if not self.cp.has_option(section, key):
            if default is _REQUIRED:
                self.errors.append(f"[{section}] missing required key '{key}'")
                return None
            return default
        raw = self.cp.get(section, key).strip()
        try:
            value = cast(raw)
        except (TypeError, ValueError):
            kind = getattr(cast, "__name__", str(cast)).lstrip("_")
            self.errors.append(f"[{section}] {key} = {raw!r}: not a valid {kind}")
            return None
        if choices is not None and value not in choices:
            self.errors.append(
                f"[{section}] {key} = {raw!r}: must be one of {', '.join(map(str, choices))}"
            )
            return None
        return value


def _bool(raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def _floats(raw: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in raw.replace(",", " ").split())


def _transitions(raw: str) -> tuple[tuple[int, int, float, float], ...]:
    out = []
    for item in raw.split(";"):
        item = item.strip()
        if not item:
            continue
        parts = item.split(":")
        if len(parts) != 4:
            raise ValueError(f"transition {item!r} is not i:j:gamma_p:gamma_m")
        out.append((int(parts[0]), int(parts[1]), float(parts[2]), float(parts[3])))
    if not out:
        raise ValueError("empty transition list")
    return tuple(out)


def _build_system(r: _Reader):
    """Returns (system, system_kind, gamma_pd, bath_T) or Nones on error."""
    kind = r.get("system", "type", choices=("two_level", "oscillator", "explicit"))
    if kind is None:
        return None, None, 0.0, None
    gamma_pd = 0.0
    bath_T = None
    system = None
    if kind == "two_level":
        E = r.get("system", "E", float)
        eps = r.get("system", "eps", _floats)
        gamma_pd = r.get("system", "gamma_pd", float, default=0.0)
        has_rates = r.cp.has_option("system", "gamma_p") or r.cp.has_option("system", "gamma_m")
        if has_rates:
            gp = r.get("system", "gamma_p", float, default=0.0)
            gm = r.get("system", "gamma_m", float, default=0.0)
        else:
            gamma = r.get("system", "gamma", float)
            bath_T = r.get("system", "bath_T", float)
            gp = gm = None
        if None in (E, eps) or r.errors:
            return None, kind, gamma_pd, bath_T
        try:
            if gp is None:
                gp, gm = _thermal_two_level_rates(gamma, bath_T, E)
            system = TwoLevelSystem(E=E, eps=eps, gamma_p=gp, gamma_m=gm,
                                    gamma_pd=abs(gamma_pd))
        except (TypeError, ValueError) as exc:
            r.errors.append(f"[system] {exc}")
    elif kind == "oscillator":
        N = r.get("system", "N", int)
        spacing = r.get("system", "spacing", float)
        rule = r.get("system", "coupling_rule", str, default="harmonic",
                     choices=("harmonic", "constant", "table"))
        gamma = r.get("system", "gamma", float, default=1.0)
        bath_T = r.get("system", "bath_T", float)
        table = r.get("system", "gamma_table", _floats, default=None)
        if rule == "table" and table is None:
            r.errors.append("[system] coupling_rule = table needs gamma_table")
        if r.errors or None in (N, spacing, bath_T):
            return None, kind, gamma_pd, bath_T
        coupling = table if rule == "table" else rule
        try:
            system = build_oscillator(N, spacing, coupling,
                                      BathModel(gamma=gamma, T=bath_T), gamma=gamma)
        except (TypeError, ValueError) as exc:
            r.errors.append(f"[system] {exc}")
    else:
        energies = r.get("system", "energies", _floats)
        trans = r.get("system", "transitions", _transitions)
        if r.errors or None in (energies, trans):
            return None, kind, gamma_pd, bath_T
        try:
            specs = tuple(
                TransitionSpec(i=i, j=j, gamma_p=gp, gamma_m=gm,
                               E_t=energies[j] - energies[i])
                for i, j, gp, gm in trans
            )
            system = LadderSystem(N=len(energies), energies=energies, transitions=specs)
        except (TypeError, ValueError, IndexError) as exc:
            r.errors.append(f"[system] {exc}")
    return system, kind, gamma_pd, bath_T


def _thermal_two_level_rates(gamma, T, E):
    from .systems import rates_from_bath

    return rates_from_bath(BathModel(gamma=gamma, T=T), E)


def parse_config(text: str) -> ScenarioConfig:
    """Parse and validate a config document.

    Raises :class:`ConfigError` carrying every problem found; syntax errors
    from the INI layer keep their line numbers.
    """
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError([f"syntax error: {exc}"]) from None
    r = _Reader(cp)
    if not cp.has_section("system"):
        raise ConfigError(["missing required section [system]"])

    system, system_kind, gamma_pd, bath_T = _build_system(r)

    default_kind = "ebe2" if system_kind == "two_level" else "eben"
    dissipator_kind = r.get("dissipator", "kind", str, default=default_kind,
                            choices=("gkls", "ebe2", "eben")) if cp.has_section("dissipator") \
        else default_kind
    include_unitary = r.get("dissipator", "include_unitary", _bool, default=True) \
        if cp.has_section("dissipator") else True
    if cp.has_section("dissipator") and cp.has_option("dissipator", "gamma_pd"):
        gamma_pd = r.get("dissipator", "gamma_pd", float, default=gamma_pd)

    initial = ("gibbs", None)
    if cp.has_section("initial"):
        itype = r.get("initial", "type", str, default="gibbs",
                      choices=("gibbs", "level", "file"))
        if itype == "gibbs":
            initial = ("gibbs", r.get("initial", "T", float))
        elif itype == "level":
            initial = ("level", r.get("initial", "index", int))
        elif itype == "file":
            path = r.get("initial", "path", str)
            if path is not None and not os.path.exists(path):
                r.errors.append(f"[initial] state file does not exist: {path}")
            initial = ("file", path)

    t_final = r.get("integration", "t_final", float, default=None) \
        if cp.has_section("integration") else None
    dt = r.get("integration", "dt", float, default=None) \
        if cp.has_section("integration") else None
    method = r.get("integration", "method", str, default="expm",
                   choices=("expm", "rk4")) if cp.has_section("integration") else "expm"
    record_every = r.get("integration", "record_every", int, default=1) \
        if cp.has_section("integration") else 1

    out_path = r.get("output", "path", str, default=None) if cp.has_section("output") else None
    what = r.get("output", "what", str, default="all",
                 choices=("populations", "coherences", "diagnostics", "all")) \
        if cp.has_section("output") else "all"

    verify_draws = r.get("verify", "num_draws", int, default=1000) \
        if cp.has_section("verify") else 1000
    bench_applications = r.get("bench", "applications", int, default=100000) \
        if cp.has_section("bench") else 100000
    bench_chunks = r.get("bench", "chunks", int, default=5) \
        if cp.has_section("bench") else 5
    canonical_T0 = r.get("canonical", "T0", float, default=None) \
        if cp.has_section("canonical") else None

    if system is not None and dissipator_kind == "ebe2" and isinstance(system, LadderSystem):
        r.errors.append("[dissipator] kind = ebe2 requires a two_level system")
    if system is not None and dissipator_kind == "eben" and isinstance(system, TwoLevelSystem):
        r.errors.append("[dissipator] kind = eben requires an oscillator or explicit system")
    if record_every is not None and record_every < 1:
        r.errors.append("[integration] record_every must be >= 1")
    for name, val in (("t_final", t_final), ("dt", dt)):
        if val is not None and val <= 0:
            r.errors.append(f"[integration] {name} must be positive")

    if r.errors:
        raise ConfigError(r.errors)
    return ScenarioConfig(
        system=system,
        system_kind=system_kind,
        dissipator_kind=dissipator_kind,
        include_unitary=include_unitary,
        gamma_pd=gamma_pd,
        bath_T=bath_T,
        initial=initial,
        t_final=t_final,
        dt=dt,
        method=method,
        record_every=record_every,
        out_path=out_path,
        what=what,
        verify_draws=verify_draws,
        bench_applications=bench_applications,
        bench_chunks=bench_chunks,
        canonical_T0=canonical_T0,
    )


def rhs_spec(cfg: ScenarioConfig) -> RhsSpec:
    if isinstance(cfg.system, TwoLevelSystem):
        return RhsSpec.for_two_level(cfg.system, cfg.dissipator_kind,
                                     cfg.include_unitary, gamma_pd=cfg.gamma_pd)
    return RhsSpec.for_ladder(cfg.system, cfg.dissipator_kind,
                              cfg.include_unitary, gamma_pd=cfg.gamma_pd)


def initial_state(cfg: ScenarioConfig, H: np.ndarray) -> np.ndarray:
    kind, arg = cfg.initial
    dim = H.shape[0]
    if kind == "gibbs":
        T = arg if arg is not None else cfg.bath_T
        if T is None:
            raise ConfigError(["[initial] gibbs initial state needs T (or a system bath_T)"])
        return gibbs_state(H, T)
    if kind == "level":
        if not (0 <= arg < dim):
            raise ConfigError([f"[initial] level index {arg} out of range for dim {dim}"])
        rho = np.zeros((dim, dim), dtype=complex)
        rho[arg, arg] = 1.0
        return rho
    with open(arg, "r", encoding="utf-8") as fh:
        rho = parse_matrix_text(fh.read())
    if rho.shape != (dim, dim):
        raise ConfigError([f"[initial] state file is {rho.shape}, system dim is {dim}"])
    return rho


def _write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(path) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv(header: list[str], rows: list[list[str]], comments: list[str] = ()) -> str:
    lines = [f"# {c}" for c in comments]
    lines.append(",".join(header))
    lines.extend(",".join(row) for row in rows)
    return "\n".join(lines) + "\n"


def _out(out_dir: str, cfg_path: str | None, default: str) -> str:
    return os.path.join(out_dir, cfg_path if cfg_path else default)


def run_simulate(cfg: ScenarioConfig, seed: int, out_dir: str) -> list[str]:
    if cfg.t_final is None or cfg.dt is None:
        raise ConfigError(["[integration] simulate needs t_final and dt"])
    spec = rhs_spec(cfg)
    rho0 = initial_state(cfg, spec.hamiltonian)
    traj = propagate(spec, rho0, cfg.t_final, cfg.dt, cfg.method, cfg.record_every)
    dim = spec.dim
    header = ["t"]
    if cfg.what in ("populations", "all"):
        header += [f"p_{i}" for i in range(dim)]
    pairs = [(i, j) for i in range(dim) for j in range(i + 1, dim)]
    if cfg.what in ("coherences", "all"):
        header += [f"abs_rho_{i}_{j}" for i, j in pairs]
    if cfg.what in ("diagnostics", "all"):
        header += ["trace_dev", "min_eig"]
    if cfg.what == "diagnostics":
        header += ["herm_dev", "top_pop"]
    rows = []
    for k, t in enumerate(traj.times):
        state = traj.states[k]
        row = [_fmt(t)]
        if cfg.what in ("populations", "all"):
            row += [_fmt(state[i, i].real) for i in range(dim)]
        if cfg.what in ("coherences", "all"):
            row += [_fmt(abs(state[i, j])) for i, j in pairs]
        if cfg.what in ("diagnostics", "all"):
            row += [_fmt(traj.trace_dev[k]), _fmt(traj.min_eig[k])]
        if cfg.what == "diagnostics":
            row += [_fmt(traj.herm_dev[k]), _fmt(traj.top_pop[k])]
        rows.append(row)
    comments = [f"warning: {w}" for w in traj.warnings]
    path = _out(out_dir, cfg.out_path, "trajectory.csv")
    _write_atomic(path, _csv(header, rows, comments))
    return [path]


def run_fixed_point(cfg: ScenarioConfig, seed: int, out_dir: str) -> list[str]:
    spec = rhs_spec(cfg)
    report = fixed_point(spec, bath_T=cfg.bath_T)
    header = ["residual", "gibbs_distance", "spectral_gap", "commutator_norm",
              "multiplicity"]
    row = [_fmt(report.residual), _fmt(report.gibbs_distance),
           _fmt(report.spectral_gap), _fmt(report.commutator_norm),
           str(report.multiplicity)]
    path = _out(out_dir, cfg.out_path, "fixed_point.csv")
    _write_atomic(path, _csv(header, [row]))
    state_path = os.path.splitext(path)[0] + ".state.txt"
    _write_atomic(state_path, format_matrix_text(report.rho_stationary))
    return [path, state_path]


def run_verify_algebra(cfg: ScenarioConfig, seed: int, out_dir: str) -> list[str]:
    rng = np.random.default_rng(seed)
    header = ["draw", "E", "eps_x", "eps_y", "eps_z", "sq_p", "sq_m", "comm",
              "anti", "triple_p", "triple_m", "eigenop", "max_residual", "passed"]
    rows = []
    worst = 0.0
    for k in range(cfg.verify_draws):
        E = float(rng.uniform(0.2, 5.0))
        v = rng.standard_normal(3)
        v /= np.linalg.norm(v)
        H = build_two_level_hamiltonian(E, v)
        rep = verify_jump_algebra(jump_operators(H), H, E)
        worst = max(worst, rep.max_residual)
        res = rep.residuals()
        rows.append(
            [str(k), _fmt(E), _fmt(v[0]), _fmt(v[1]), _fmt(v[2])]
            + [_fmt(res[name]) for name in ("sq_p", "sq_m", "comm", "anti",
                                            "triple_p", "triple_m", "eigenop")]
            + [_fmt(rep.max_residual), str(rep.passed).lower()]
        )
    path = _out(out_dir, cfg.out_path, "verify_algebra.csv")
    _write_atomic(path, _csv(header, rows, [f"seed={seed}", f"max_residual={_fmt(worst)}"]))
    return [path]


def run_canonical(cfg: ScenarioConfig, seed: int, out_dir: str) -> list[str]:
    if not isinstance(cfg.system, LadderSystem):
        raise ConfigError(["canonical needs an oscillator or explicit ladder system"])
    if cfg.canonical_T0 is None:
        raise ConfigError(["[canonical] missing required key 'T0'"])
    if cfg.t_final is None or cfg.dt is None:
        raise ConfigError(["[integration] canonical needs t_final and dt"])
    diag = canonical_experiment(cfg.system, cfg.canonical_T0, cfg.t_final, cfg.dt,
                                record_every=cfg.record_every)
    header = ["t", "mean_ratio", "a", "delta", "max_nonuniformity", "lna_ode",
              "truncation_leak", "clean"]
    rows = []
    for k, t in enumerate(diag.times):
        rows.append([
            _fmt(t), _fmt(diag.mean_ratio[k]), _fmt(diag.a_series[k]),
            _fmt(diag.delta_series[k]), _fmt(diag.max_nonuniformity[k]),
            _fmt(diag.lna_ode[k]), _fmt(diag.truncation_leak[k]),
            str(bool(diag.clean[k])).lower(),
        ])
    path = _out(out_dir, cfg.out_path, "canonical.csv")
    _write_atomic(path, _csv(header, rows, [f"ode_mismatch={_fmt(diag.ode_mismatch)}"]))
    return [path]


def run_bench(cfg: ScenarioConfig, seed: int, out_dir: str) -> list[str]:
    rng = np.random.default_rng(seed)
    rows_data = bench_mod.run_bench(cfg.system, cfg.bench_applications,
                                    cfg.bench_chunks, rng)
    by_kernel = {row.kernel: row for row in rows_data}
    gkls_ns = by_kernel["gkls"].ns_per_apply
    checksums = {row.checksum for row in rows_data}
    n_dev = min(cfg.bench_applications, 20000)
    dev = bench_mod.max_deviation(
        cfg.system, bench_mod.random_states(rows_data[0].dim, n_dev,
                                            np.random.default_rng(seed)))
    header = ["kernel", "dim", "transitions", "applications", "chunks",
              "ns_per_apply", "ratio_to_gkls", "checksum"]
    rows = []
    for row in rows_data:
        rows.append([
            row.kernel, str(row.dim), str(row.transitions), str(row.applications),
            str(row.chunks), _fmt(row.ns_per_apply), _fmt(row.ns_per_apply / gkls_ns),
            row.checksum,
        ])
    path = _out(out_dir, cfg.out_path, "bench.csv")
    _write_atomic(path, _csv(header, rows, [
        f"seed={seed}",
        f"checksums_match={str(len(checksums) == 1).lower()}",
        f"max_deviation={_fmt(dev)} over {n_dev} inputs",
    ]))
    if len(checksums) != 1:
        raise RuntimeError(
            f"kernel checksums disagree: {sorted(checksums)}; "
            "timing table written but the equivalence gate failed"
        )
    return [path]


_RUNNERS = {
    "simulate": run_simulate,
    "fixed-point": run_fixed_point,
    "verify-algebra": run_verify_algebra,
    "canonical": run_canonical,
    "bench": run_bench,
}


def _fail(kind: str, messages, code: int) -> int:
    record = {"error": kind, "messages": [str(m) for m in messages]}
    print(json.dumps(record), file=sys.stderr)
    return code


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="ebloch",
        description="Master-equation scenarios from a sectioned key-value config",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to the scenario config")
        p.add_argument("--seed", type=int, default=0, help="PRNG seed (default 0)")
        p.add_argument("--out", default=".", help="output directory (default .)")
    args = parser.parse_args(argv)

    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        return _fail("validation", [f"cannot read config: {exc}"], 1)
    try:
        cfg = parse_config(text)
    except ConfigError as exc:
        return _fail("validation", exc.errors, 1)

    try:
        paths = _RUNNERS[args.subcommand](cfg, args.seed, args.out)
    except ConfigError as exc:
        return _fail("validation", exc.errors, 1)
    except (ValueError, TypeError) as exc:
        return _fail("validation", [exc], 1)
    except (PropagationError, FixedPointError, RuntimeError, FloatingPointError,
            np.linalg.LinAlgError) as exc:
        return _fail("numerical", [exc], 2)
    for path in paths:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
