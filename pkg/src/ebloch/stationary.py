"""Fixed points of the dynamics, analytic and numerical, and Gibbs comparison."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dissipators import RhsSpec, master_rhs
from .linalg import (
    as_matrix,
    commutator,
    devectorize,
    herm_part,
    hermitian_eig,
    trace_distance,
)
from .propagate import build_superoperator
from .systems import TwoLevelSystem

ZERO_EIG_TOL = 1e-10


class FixedPointError(RuntimeError):
    """The spec has no usable stationary direction."""


@dataclass
class FixedPointReport:
    """Numerical fixed point plus the quality measures attached to it.

    ``gibbs_distance`` is NaN when no bath temperature applies (non-thermal
    rates).  ``spectral_gap`` is the slowest decaying rate, -max(Re lambda)
    over eigenvalues with strictly negative real part (purely oscillatory
    modes are excluded).  ``commutator_norm`` reports ||[H, rho]||_F:
    commutation with the Hamiltonian is verified after the fact, never
    imposed.
    """

    rho_stationary: np.ndarray
    residual: float
    gibbs_distance: float
    spectral_gap: float
    commutator_norm: float
    multiplicity: int


def gibbs_state(H, T: float) -> np.ndarray:
    """exp(-H/T) / Tr exp(-H/T); T may be inf (maximally mixed state)."""
    M = as_matrix(H)
    if not (T > 0.0):
        raise ValueError(f"T must be a positive temperature, got {T}")
    w, V = hermitian_eig(M)
    x = -(w - w.min()) / T if np.isfinite(T) else np.zeros_like(w)
    p = np.exp(x)
    p /= p.sum()
    return (V * p) @ V.conj().T


def two_level_stationary_analytic(sys: TwoLevelSystem) -> np.ndarray:
    """Closed-form stationary state 1/2 + ((gp-gm)/(gp+gm)) H/E.

    Coincides with the Gibbs state exactly when gp/gm = exp(-E/T).
    """
    if sys.gamma_sum <= 0.0:
        raise ValueError("gamma_p + gamma_m must be positive for a stationary state")
    lam = sys.gamma_diff / sys.gamma_sum
    return 0.5 * np.eye(2, dtype=complex) + (lam / sys.E) * sys.hamiltonian


def effective_temperature(spec: RhsSpec) -> float | None:
    """Bath temperature implied by the spec's rates, when one exists.

    Returns the T with gamma_p/gamma_m = exp(-E/T) if the rates of every
    transition agree on it (to 1e-9 relative); inf for gamma_p = gamma_m;
    None for inverted or inconsistent rates.
    """
    pairs = []
    if spec.two_level is not None:
        s = spec.two_level
        pairs.append((s.E, s.gamma_p, s.gamma_m))
    elif spec.ladder is not None:
        for t in spec.ladder.transitions:
            pairs.append((t.E_t, t.gamma_p, t.gamma_m))
    if not pairs:
        return None
    temps = []
    for E, gp, gm in pairs:
        if gp <= 0.0 or gm <= 0.0:
            return None
        if gp == gm:
            temps.append(math.inf)
        elif gp < gm:
            temps.append(E / math.log(gm / gp))
        else:
            return None
    if all(math.isinf(t) for t in temps):
        return math.inf
    if any(math.isinf(t) for t in temps):
        return None
    t0 = temps[0]
    if any(abs(t - t0) > 1e-9 * abs(t0) for t in temps):
        return None
    return t0


def fixed_point(spec: RhsSpec, bath_T: float | None = None) -> FixedPointReport:
    """Stationary state from the null space of the superoperator.

    The full spectrum of S is computed (desk-scale dimensions); the
    stationary state is the trace-normalized Hermitian part of the
    eigenvector with eigenvalue nearest zero.  ``multiplicity`` counts the
    eigenvalues within 1e-10 of zero; when it exceeds one (disconnected
    transition graphs) the reported state is the near-null direction with
    the largest trace.  Raises :class:`FixedPointError` when no eigenvalue
    lies within 1e-6 of zero.
    """
    S = build_superoperator(spec)
    eigvals, eigvecs = np.linalg.eig(S)
    absvals = np.abs(eigvals)
    nearest = float(absvals.min())
    if nearest > 1e-6:
        raise FixedPointError(
            f"no eigenvalue within 1e-6 of zero (closest: {nearest:.3e}); "
            "the spec has no stationary state"
        )
    multiplicity = int(np.sum(absvals <= ZERO_EIG_TOL))
    candidate_cut = max(ZERO_EIG_TOL, nearest)
    candidates = np.flatnonzero(absvals <= candidate_cut)
    traces = [abs(devectorize(eigvecs[:, k], spec.dim).trace()) for k in candidates]
    best = candidates[int(np.argmax(traces))]
    rho = herm_part(devectorize(eigvecs[:, best], spec.dim))
    tr = rho.trace().real
    if abs(tr) < 1e-10:
        raise FixedPointError("stationary direction has (near-)zero trace")
    rho = rho / tr

    residual = float(np.linalg.norm(master_rhs(rho, spec)))
    # purely oscillatory modes (undamped cross-block coherences on ladders)
    # carry Re lambda = 0 and do not bound relaxation: the gap is the slowest
    # actually-decaying rate
    decaying = eigvals.real < -ZERO_EIG_TOL
    spectral_gap = float(-eigvals[decaying].real.max()) if decaying.any() else math.nan
    if bath_T is None:
        bath_T = effective_temperature(spec)
    if bath_T is not None:
        gibbs_distance = trace_distance(rho, gibbs_state(spec.hamiltonian, bath_T))
    else:
        gibbs_distance = math.nan
    return FixedPointReport(
        rho_stationary=rho,
        residual=residual,
        gibbs_distance=float(gibbs_distance),
        spectral_gap=spectral_gap,
        commutator_norm=float(np.linalg.norm(commutator(spec.hamiltonian, rho))),
        multiplicity=multiplicity,
    )
