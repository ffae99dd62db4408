"""Time evolution under any RhsSpec: fixed-step RK4, exact superoperator
exponential, trajectory recording and physicality monitoring.

Design choices made here: Hermiticity is enforced by symmetrization after
every RK4 step, but the trace is never renormalized and eigenvalues are
never clipped; drift and negativity are diagnostics, not noise to hide.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .dissipators import RhsSpec, master_rhs
from .linalg import devectorize, herm_part, is_hermitian, is_psd, vectorize

MAX_SUPEROP_DIM = 64
MIN_EIG_WARN = -1e-8
TOP_POP_WARN = 1e-6


class PropagationError(RuntimeError):
    """Numerical failure during time evolution (NaN/Inf or divergence)."""


@dataclass
class Trajectory:
    """Recorded time grid, density-matrix snapshots and per-step diagnostics."""

    times: np.ndarray
    states: list
    trace_dev: np.ndarray
    herm_dev: np.ndarray
    min_eig: np.ndarray
    top_pop: np.ndarray
    warnings: list = field(default_factory=list)

    def populations(self) -> np.ndarray:
        """(n_times, dim) array of diagonal entries (real parts)."""
        return np.array([np.diag(s).real for s in self.states])


def step_rk4(spec: RhsSpec, rho, dt: float) -> np.ndarray:
    """One classical RK4 step of d(rho)/dt = master_rhs(rho), followed by
    symmetrization rho <- (rho + rho^dag)/2.  Aborts on NaN/Inf."""
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    k1 = master_rhs(rho, spec)
    k2 = master_rhs(rho + (0.5 * dt) * k1, spec)
    k3 = master_rhs(rho + (0.5 * dt) * k2, spec)
    k4 = master_rhs(rho + dt * k3, spec)
    out = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    out = herm_part(out)
    if not np.all(np.isfinite(out.view(float))):
        raise PropagationError("NaN/Inf encountered in RK4 step")
    return out


def build_superoperator(spec: RhsSpec) -> np.ndarray:
    """Matrix S of the linear map rho -> master_rhs(rho) in the
    column-stacking convention: vectorize(master_rhs(rho)) = S @ vectorize(rho).

    Built by applying the right-hand side to the dim^2 matrix units; guarded
    at dim <= 64.  When the spec carries a nonzero gamma_pd (and the check is
    cheap) the spectrum is inspected and a warning is raised if the generator
    has amplifying modes.
    """
    dim = spec.dim
    if dim > MAX_SUPEROP_DIM:
        raise ValueError(f"superoperator guard: dim={dim} exceeds {MAX_SUPEROP_DIM}")
    S = np.zeros((dim * dim, dim * dim), dtype=complex)
    unit = np.zeros((dim, dim), dtype=complex)
    for b in range(dim):
        for a in range(dim):
            unit[a, b] = 1.0
            S[:, a + b * dim] = vectorize(master_rhs(unit, spec))
            unit[a, b] = 0.0
    if spec.gamma_pd != 0.0 and dim <= 16:
        max_re = float(np.linalg.eigvals(S).real.max())
        if max_re > 1e-10:
            warnings.warn(
                f"assembled generator has amplifying modes (max Re lambda = "
                f"{max_re:.3e}); check the sign of gamma_pd",
                stacklevel=2,
            )
    return S


def _validate_state(rho: np.ndarray) -> None:
    if not is_hermitian(rho, 1e-10):
        raise ValueError("initial state is not Hermitian within 1e-10")
    if abs(rho.trace() - 1.0) > 1e-9:
        raise ValueError(f"initial state trace {rho.trace():.3e} is not 1 within 1e-9")
    if not is_psd(rho, 1e-8):
        raise ValueError("initial state is not positive semidefinite within -1e-8")


def _diagnose(rho: np.ndarray, top_index: int | None):
    trace_dev = abs(rho.trace() - 1.0)
    herm_dev = float(np.abs(rho - rho.conj().T).max())
    min_eig = float(np.linalg.eigvalsh(herm_part(rho)).min())
    top = float(rho[top_index, top_index].real) if top_index is not None else np.nan
    return float(trace_dev), herm_dev, min_eig, top


def propagate(
    spec: RhsSpec,
    rho0,
    t_final: float,
    dt: float,
    method: str = "expm",
    record_every: int = 1,
) -> Trajectory:
    """Propagate rho0 to t_final and record every ``record_every``-th step.

    ``method='expm'`` applies the exact flow devectorize(e^(S t) vectorize(rho)),
    stepping from one recorded time to the next; ``method='rk4'`` takes
    fixed steps of size dt.  The trajectory always contains t=0 and t_final.
    Raises :class:`PropagationError` on NaN/Inf or when the right-hand-side
    norm grows beyond 1e6 times its initial value.
    """
    raw = np.asarray(rho0, dtype=complex)
    _validate_state(raw)
    rho = herm_part(raw)
    if method not in ("rk4", "expm"):
        raise ValueError(f"method must be 'rk4' or 'expm', got {method!r}")
    if dt <= 0.0 or t_final <= 0.0:
        raise ValueError("t_final and dt must be positive")
    if record_every < 1:
        raise ValueError("record_every must be >= 1")
    n_steps = max(1, int(round(t_final / dt)))
    record_idx = list(range(0, n_steps + 1, record_every))
    if record_idx[-1] != n_steps:
        record_idx.append(n_steps)

    top_index = spec.ladder.top_level if spec.ladder is not None else None
    rhs0_norm = float(np.linalg.norm(master_rhs(rho, spec)))
    # starting at (or round-off close to) a fixed point makes relative rhs
    # growth meaningless; the state-norm cap still catches divergence there
    growth_cap = 1e6 * rhs0_norm if rhs0_norm > 1e-12 else np.inf
    state_cap = 1e6 * max(1.0, float(np.abs(rho).max()))

    times, states = [], []
    diag_rows = []

    def record(k: int, state: np.ndarray) -> None:
        times.append(k * dt)
        states.append(state.copy())
        diag_rows.append(_diagnose(state, top_index))
        rhs_norm = float(np.linalg.norm(master_rhs(state, spec)))
        if not np.isfinite(rhs_norm) or rhs_norm > growth_cap \
                or float(np.abs(state).max()) > state_cap:
            raise PropagationError(
                f"step instability at t={k * dt:.6g}: rhs norm {rhs_norm:.3e} "
                f"(initial {rhs0_norm:.3e}), state norm {np.abs(state).max():.3e}"
            )

    record(0, rho)
    if method == "rk4":
        next_rec = 1
        for k in range(1, n_steps + 1):
            rho = step_rk4(spec, rho, dt)
            if k == record_idx[next_rec]:
                record(k, rho)
                next_rec += 1
    else:
        S = build_superoperator(spec)
        props = {}
        v = vectorize(rho)
        for prev, k in zip(record_idx, record_idx[1:]):
            gap = k - prev
            if gap not in props:
                props[gap] = scipy.linalg.expm(S * (gap * dt))
            v = props[gap] @ v
            if not np.all(np.isfinite(v.view(float))):
                raise PropagationError(f"NaN/Inf encountered at t={k * dt:.6g}")
            record(k, devectorize(v, spec.dim))

    diag = np.array(diag_rows, dtype=float)
    traj = Trajectory(
        times=np.array(times),
        states=states,
        trace_dev=diag[:, 0],
        herm_dev=diag[:, 1],
        min_eig=diag[:, 2],
        top_pop=diag[:, 3],
    )
    worst_eig = traj.min_eig.min()
    if worst_eig < MIN_EIG_WARN:
        traj.warnings.append(
            f"positivity violated: min eigenvalue {worst_eig:.3e} < {MIN_EIG_WARN:.0e}"
        )
    if top_index is not None and np.nanmax(traj.top_pop) > TOP_POP_WARN:
        traj.warnings.append(
            f"truncation leak: top-level population reached "
            f"{np.nanmax(traj.top_pop):.3e} > {TOP_POP_WARN:.0e}"
        )
    return traj
