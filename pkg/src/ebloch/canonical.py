"""Canonical-invariance diagnostics for thermalizing ladders.

A generalized Gibbs state on an equally spaced ladder has one free parameter,
the level ratio a = p_{i+1}/p_i.  These tools measure how uniform the ratio
profile ln(p_{i+1}/p_i) stays during relaxation, extract a(t) and the bath
mismatch delta(t), and compare the full dynamics against the reduced
one-variable thermalization equation

    d ln a / dt = gamma_0 (a (1 - f) + f / a - 1),

which carries an explicit overall rate gamma_0 (the reduced equation is a
rate equation; we read its bare form as the gamma_0 = 1 time unit).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dissipators import RhsSpec
from .propagate import propagate
from .stationary import gibbs_state
from .systems import BathModel, LadderSystem, TwoLevelSystem, fermi

POPULATION_FLOOR = 1e-14
LEAK_TOL = 1e-6


@dataclass
class CanonicalDiagnostics:
    """Per-recorded-time canonical-form diagnostics of a ladder trajectory.

    ``ratio_profiles[k, i] = ln(p_{i+1}/p_i)`` at time k, NaN where either
    population sits below the floor.  ``max_nonuniformity`` is the largest
    deviation of the profile from its mean; ``a_series`` exponentiates the
    mean; ``delta_series`` measures the mismatch from the bath Gibbs ratio.
    ``lna_ode`` is the independently integrated one-variable thermalization
    equation started from a(0) = exp(-E/T0), and ``ode_mismatch`` the largest
    |ln a_ODE - mean ratio| inside the clean window (truncation leak below
    ``LEAK_TOL``).
    """

    times: np.ndarray
    ratio_profiles: np.ndarray
    max_nonuniformity: np.ndarray
    a_series: np.ndarray
    delta_series: np.ndarray
    mean_ratio: np.ndarray
    lna_ode: np.ndarray
    truncation_leak: np.ndarray
    clean: np.ndarray
    ode_mismatch: float


def ratio_profile(p, floor: float = POPULATION_FLOOR) -> np.ndarray:
    """Vector of log level ratios ln(p_{i+1}/p_i).

    Entries where either population lies below ``floor`` are NaN (absent):
    the tail of a truncated ladder would otherwise inject log-of-zero
    artifacts.  Requires a normalized probability vector; populations below
    -1e-12 are rejected.
    """
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size < 2:
        raise ValueError("p must be a probability vector with at least two entries")
    if p.min() < -1e-12:
        raise ValueError(f"negative population {p.min():.3e} beyond -1e-12")
    if abs(p.sum() - 1.0) > 1e-9:
        raise ValueError(f"populations must sum to 1 within 1e-9, got {p.sum()}")
    out = np.full(p.size - 1, np.nan)
    ok = (p[:-1] >= floor) & (p[1:] >= floor)
    out[ok] = np.log(p[1:][ok] / p[:-1][ok])
    return out


def delta_parameter(a: float, bath: BathModel, E: float) -> float:
    """Mismatch delta with a = (f/(1-f)) e^delta, i.e. delta = ln(a(1-f)/f).

    Zero exactly when a equals the bath Gibbs ratio exp(-E/T).
    """
    if not (a > 0.0):
        raise ValueError(f"a must be positive, got {a}")
    f = fermi(E, bath.T)
    return float(math.log(a) + math.log1p(-f) - math.log(f))


def invariance_condition(gammas) -> tuple[bool, np.ndarray]:
    """Check gamma_{i+1} - gamma_i = gamma_0 for every i.

    This is the condition under which a generalized Gibbs state stays of
    Gibbs form throughout thermalization; the harmonic rule (i+1)*gamma
    satisfies it, a constant rule does not.  Returns (holds, defects) with
    defect_i = gamma_{i+1} - gamma_i - gamma_0.
    """
    g = np.asarray(gammas, dtype=float)
    if g.size < 2:
        raise ValueError("need at least two couplings")
    if not (g[0] > 0.0):
        raise ValueError("gamma_0 must be positive")
    defects = g[1:] - g[:-1] - g[0]
    return bool(np.all(np.abs(defects) <= 1e-12 * g[0])), defects


def thermalization_ode_rhs(a: float, bath: BathModel, E: float, gamma0: float) -> float:
    """d ln a / dt = gamma0 (a(1-f) + f/a - 1).

    Zero exactly at a = f/(1-f) = exp(-E/T); for 0 < a < 1 the sign drives
    a toward that bath value.
    """
    if not (a > 0.0):
        raise ValueError(f"a must be positive, got {a}")
    if not (gamma0 > 0.0):
        raise ValueError(f"gamma0 must be positive, got {gamma0}")
    f = fermi(E, bath.T)
    return float(gamma0 * (a * (1.0 - f) + f / a - 1.0))


def lambda_ode_rhs(lam: float, sys: TwoLevelSystem) -> float:
    """Two-level Gibbs-form dynamics: d lambda/dt = -(gp+gm) lambda + (gp-gm).

    lambda parametrizes rho = 1/2 + lambda H/E; the fixed point
    lambda* = (gp-gm)/(gp+gm) reproduces the analytic stationary state.
    """
    return -sys.gamma_sum * lam + sys.gamma_diff


def _thermal_ladder_parameters(sys: LadderSystem) -> tuple[float, float, float]:
    """(E, f, gamma0) of an equally spaced single-bath ladder; raises if the
    transitions are not the full nearest-neighbour chain with one shared
    Fermi factor."""
    expected = {(i, i + 1) for i in range(sys.N - 1)}
    actual = {(t.i, t.j) for t in sys.transitions}
    if actual != expected:
        raise ValueError("canonical experiment needs the full nearest-neighbour ladder")
    by_lower = {t.i: t for t in sys.transitions}
    ordered = [by_lower[i] for i in range(sys.N - 1)]
    E = ordered[0].E_t
    fs = []
    for t in ordered:
        if abs(t.E_t - E) > 1e-9 * max(1.0, E):
            raise ValueError("canonical experiment needs equal level spacing")
        if t.gamma_sum <= 0.0:
            raise ValueError("every transition needs a positive total rate")
        fs.append(t.gamma_p / t.gamma_sum)
    f = fs[0]
    if any(abs(x - f) > 1e-9 for x in fs):
        raise ValueError("canonical experiment needs one bath temperature for all rungs")
    if not (0.0 < f < 0.5):
        raise ValueError("bath must have a finite positive temperature (f in (0, 1/2))")
    return E, f, ordered[0].gamma_sum


def canonical_experiment(
    sys: LadderSystem,
    T0: float,
    t_final: float,
    dt: float,
    record_every: int = 10,
    floor: float = POPULATION_FLOOR,
    leak_tol: float = LEAK_TOL,
) -> CanonicalDiagnostics:
    """Quench a ladder from Gibbs(T0) and track the canonical form.

    The state is propagated with fixed-step RK4: the entrywise-local update
    keeps exponentially small tail populations accurate in relative terms,
    which log-ratio profiles need (a dense exponential carries absolute
    round-off at the matrix norm scale and would pollute them).  Alongside,
    the one-variable thermalization equation is integrated from
    a(0) = exp(-E/T0) on the same grid and compared inside the clean window.
    """
    E, f, gamma0 = _thermal_ladder_parameters(sys)
    T_bath = E / math.log((1.0 - f) / f)
    bath = BathModel(gamma=gamma0, T=T_bath)
    rho0 = gibbs_state(sys.hamiltonian, T0)
    spec = RhsSpec.for_ladder(sys, "eben")
    traj = propagate(spec, rho0, t_final, dt, method="rk4", record_every=record_every)

    pops = traj.populations()
    n_rec = pops.shape[0]
    profiles = np.full((n_rec, sys.N - 1), np.nan)
    nonunif = np.full(n_rec, np.nan)
    mean_ratio = np.full(n_rec, np.nan)
    for k in range(n_rec):
        r = ratio_profile(np.clip(pops[k], 0.0, None) / pops[k].sum(), floor)
        profiles[k] = r
        valid = ~np.isnan(r)
        if valid.any():
            m = r[valid].mean()
            mean_ratio[k] = m
            nonunif[k] = np.abs(r[valid] - m).max()
    a_series = np.exp(mean_ratio)
    delta_series = np.array(
        [delta_parameter(a, bath, E) if np.isfinite(a) else np.nan for a in a_series]
    )

    # One-variable oracle on the same fixed grid (scalar RK4).
    n_steps = max(1, int(round(t_final / dt)))
    rec = {int(round(t / dt)): None for t in traj.times}
    lna = -E / T0
    rec_vals = {}
    if 0 in rec:
        rec_vals[0] = lna

    def ode(y: float) -> float:
        return thermalization_ode_rhs(math.exp(y), bath, E, gamma0)

    for k in range(1, n_steps + 1):
        k1 = ode(lna)
        k2 = ode(lna + 0.5 * dt * k1)
        k3 = ode(lna + 0.5 * dt * k2)
        k4 = ode(lna + dt * k3)
        lna += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if k in rec:
            rec_vals[k] = lna
    lna_ode = np.array([rec_vals[int(round(t / dt))] for t in traj.times])

    leak = traj.top_pop
    clean = (leak < leak_tol) & np.isfinite(mean_ratio)
    mism = np.abs(lna_ode - mean_ratio)[clean]
    ode_mismatch = float(mism.max()) if mism.size else math.nan
    return CanonicalDiagnostics(
        times=traj.times,
        ratio_profiles=profiles,
        max_nonuniformity=nonunif,
        a_series=a_series,
        delta_series=delta_series,
        mean_ratio=mean_ratio,
        lna_ode=lna_ode,
        truncation_leak=leak,
        clean=clean,
        ode_mismatch=ode_mismatch,
    )
