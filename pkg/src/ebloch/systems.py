"""System builders: two-level systems, canonically scaled jump operators,
thermal baths, and N-level ladders with per-transition exchange rates.

The jump-operator scaling is constructive: building sigma_p from unit
eigenvectors already pins the free overall scale so that
``[sigma_p, sigma_m] = 2H/E`` and ``{sigma_p, sigma_m} = 1`` hold without
any a-posteriori rescaling.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Sequence

import numpy as np
from scipy.special import expit

from .linalg import (
    anticommutator,
    as_matrix,
    commutator,
    dag,
    hermitian_eig,
    is_traceless,
)

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


def _check_rate(name: str, value: float) -> None:
    if not (np.isfinite(value) and value >= 0.0):
        raise ValueError(f"{name} must be a finite non-negative rate, got {value}")


def _unit_bloch_vector(eps) -> tuple[float, float, float]:
    v = np.asarray(eps, dtype=float)
    if v.shape != (3,):
        raise ValueError(f"eps must be a real 3-vector, got shape {v.shape}")
    n = float(np.linalg.norm(v))
    if n == 0.0:
        raise ValueError("eps must be a nonzero direction")
    if abs(n - 1.0) > 1e-9:
        raise ValueError(f"eps must be unit length within 1e-9, |eps| = {n}")
    v = v / n
    return (float(v[0]), float(v[1]), float(v[2]))


@dataclass(frozen=True)
class TwoLevelSystem:
    """Two-level system: gap E, Bloch axis eps, exchange rates and dephasing.

    ``gamma_p`` is the upward (energy-gaining) rate, ``gamma_m`` the downward
    one.  ``gamma_pd`` is the non-negative pure-dephasing magnitude; the sign
    with which the double-commutator term enters an assembled equation is
    owned by :class:`ebloch.dissipators.RhsSpec`.
    """

    E: float
    eps: tuple[float, float, float]
    gamma_p: float = 0.0
    gamma_m: float = 0.0
    gamma_pd: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.E) and self.E > 0.0):
            raise ValueError(f"E must be a positive energy gap, got {self.E}")
        object.__setattr__(self, "eps", _unit_bloch_vector(self.eps))
        _check_rate("gamma_p", self.gamma_p)
        _check_rate("gamma_m", self.gamma_m)
        _check_rate("gamma_pd", self.gamma_pd)

    @cached_property
    def hamiltonian(self) -> np.ndarray:
        return build_two_level_hamiltonian(self.E, self.eps)

    @property
    def gamma_sum(self) -> float:
        return self.gamma_p + self.gamma_m

    @property
    def gamma_diff(self) -> float:
        return self.gamma_p - self.gamma_m


@dataclass(frozen=True, eq=False)
class JumpOperatorPair:
    """Canonically scaled raising/lowering pair, sigma_m = sigma_p^dagger."""

    sigma_p: np.ndarray
    sigma_m: np.ndarray

    def __post_init__(self):
        sp = as_matrix(self.sigma_p)
        sm = as_matrix(self.sigma_m)
        if sp.shape != (2, 2) or sm.shape != (2, 2):
            raise ValueError("jump operators must be 2x2")
        object.__setattr__(self, "sigma_p", sp)
        object.__setattr__(self, "sigma_m", sm)


@dataclass(frozen=True)
class BathModel:
    """Thermal bath: coupling strength gamma >= 0 and temperature T > 0."""

    gamma: float
    T: float

    def __post_init__(self):
        _check_rate("gamma", self.gamma)
        if not (np.isfinite(self.T) and self.T > 0.0):
            raise ValueError(f"T must be a positive temperature, got {self.T}")


@dataclass(frozen=True)
class TransitionSpec:
    """One population-exchange channel between levels i (lower) and j (upper)."""

    i: int
    j: int
    gamma_p: float
    gamma_m: float
    E_t: float

    def __post_init__(self):
        if self.i < 0 or self.j < 0 or self.i == self.j:
            raise ValueError(f"invalid transition indices ({self.i}, {self.j})")
        _check_rate("gamma_p", self.gamma_p)
        _check_rate("gamma_m", self.gamma_m)
        if not (np.isfinite(self.E_t) and self.E_t > 0.0):
            raise ValueError(f"E_t must be positive, got {self.E_t}")

    @property
    def gamma_sum(self) -> float:
        return self.gamma_p + self.gamma_m


@dataclass(frozen=True)
class LadderSystem:
    """N-level diagonal Hamiltonian plus explicit pairwise transitions.

    Energies need not be monotone; each transition only requires a positive
    gap ``E_t = energies[j] - energies[i]``.  Detailed balance is a property
    of how the rates were constructed (see :func:`build_oscillator`), not an
    invariant, so non-thermal rate sets can be explored.
    """

    N: int
    energies: tuple[float, ...]
    transitions: tuple[TransitionSpec, ...]

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("a ladder needs at least two levels")
        energies = tuple(float(e) for e in self.energies)
        if len(energies) != self.N:
            raise ValueError(f"expected {self.N} energies, got {len(energies)}")
        object.__setattr__(self, "energies", energies)
        transitions = tuple(self.transitions)
        seen = set()
        for t in transitions:
            if t.i >= self.N or t.j >= self.N:
                raise ValueError(f"transition ({t.i}, {t.j}) out of range for N={self.N}")
            pair = (min(t.i, t.j), max(t.i, t.j))
            if pair in seen:
                raise ValueError(f"duplicate transition pair {pair}")
            seen.add(pair)
            gap = energies[t.j] - energies[t.i]
            if abs(gap - t.E_t) > 1e-9 * max(1.0, abs(t.E_t)):
                raise ValueError(
                    f"transition ({t.i}, {t.j}): E_t={t.E_t} does not match "
                    f"energy difference {gap}"
                )
        object.__setattr__(self, "transitions", transitions)

    @cached_property
    def hamiltonian(self) -> np.ndarray:
        return np.diag(np.asarray(self.energies, dtype=complex))

    @cached_property
    def transition_arrays(self) -> tuple[np.ndarray, ...]:
        """(ii, jj, gamma_p, gamma_m) as flat arrays, in transition order."""
        ii = np.array([t.i for t in self.transitions], dtype=np.intp)
        jj = np.array([t.j for t in self.transitions], dtype=np.intp)
        gp = np.array([t.gamma_p for t in self.transitions], dtype=float)
        gm = np.array([t.gamma_m for t in self.transitions], dtype=float)
        return ii, jj, gp, gm

    @property
    def top_level(self) -> int:
        return self.N - 1


@dataclass(frozen=True)
class AlgebraReport:
    """Frobenius residuals of the seven jump-operator identities."""

    sq_p: float
    sq_m: float
    comm: float
    anti: float
    triple_p: float
    triple_m: float
    eigenop: float
    tol: float = 1e-12

    @property
    def max_residual(self) -> float:
        return max(self.residuals().values())

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tol

    def residuals(self) -> dict[str, float]:
        return {
            "sq_p": self.sq_p,
            "sq_m": self.sq_m,
            "comm": self.comm,
            "anti": self.anti,
            "triple_p": self.triple_p,
            "triple_m": self.triple_m,
            "eigenop": self.eigenop,
        }


def build_two_level_hamiltonian(E: float, eps) -> np.ndarray:
    """(E/2)(eps_x sx + eps_y sy + eps_z sz): traceless Hermitian, gap E."""
    if not (np.isfinite(E) and E > 0.0):
        raise ValueError(f"E must be a positive energy gap, got {E}")
    ex, ey, ez = _unit_bloch_vector(eps)
    return 0.5 * E * (ex * SIGMA_X + ey * SIGMA_Y + ez * SIGMA_Z)


def jump_operators(H) -> JumpOperatorPair:
    """Canonical raising/lowering pair for a traceless 2x2 Hamiltonian.

    sigma_p = |s1><s0| built from the unit-normalized eigenvectors under the
    :func:`ebloch.linalg.hermitian_eig` phase convention.  The unit
    normalization is what selects the single representative out of the scaling
    freedom: the pair then satisfies all algebra identities checked by
    :func:`verify_jump_algebra`, in particular ``[H, sigma_p] = E sigma_p``.
    """
    M = as_matrix(H)
    if M.shape != (2, 2):
        raise ValueError("jump operators are defined for 2x2 Hamiltonians")
    if not is_traceless(M, 1e-10):
        raise ValueError("Hamiltonian must be traceless within 1e-10")
    w, V = hermitian_eig(M)
    if w[1] - w[0] <= 1e-12:
        raise ValueError("Hamiltonian is degenerate: no unique transition pair")
    sigma_p = np.outer(V[:, 1], V[:, 0].conj())
    return JumpOperatorPair(sigma_p, dag(sigma_p))


def verify_jump_algebra(pair: JumpOperatorPair, H, E: float, tol: float = 1e-12) -> AlgebraReport:
    """Residuals of the seven identities the canonical pair must satisfy.

    sq_p/sq_m: sigma^2 = 0; comm: [sigma_p, sigma_m] = 2H/E;
    anti: {sigma_p, sigma_m} = 1; triple_p/m: sigma sigma' sigma = sigma;
    eigenop: [H, sigma_p] = E sigma_p.  Residuals are reported even when they
    fail; ``passed`` requires all of them <= tol.
    """
    M = as_matrix(H)
    sp, sm = pair.sigma_p, pair.sigma_m
    if M.shape != sp.shape:
        raise ValueError("Hamiltonian and jump operators have mismatched dimensions")
    norm = np.linalg.norm
    return AlgebraReport(
        sq_p=float(norm(sp @ sp)),
        sq_m=float(norm(sm @ sm)),
        comm=float(norm(commutator(sp, sm) - 2.0 * M / E)),
        anti=float(norm(anticommutator(sp, sm) - np.eye(2))),
        triple_p=float(norm(sp @ sm @ sp - sp)),
        triple_m=float(norm(sm @ sp @ sm - sm)),
        eigenop=float(norm(commutator(M, sp) - E * sp)),
        tol=tol,
    )


def fermi(E: float, T: float) -> float:
    """Fermi factor 1/(exp(E/T) + 1), overflow-safe for large |E/T|."""
    if not (np.isfinite(T) and T > 0.0):
        raise ValueError(f"T must be a positive temperature, got {T}")
    return float(expit(-E / T))


def rates_from_bath(bath: BathModel, E: float) -> tuple[float, float]:
    """Thermal exchange rates (gamma_p, gamma_m) = gamma * (f(E), 1 - f(E)).

    The sum is exactly ``gamma`` and the ratio gamma_p/gamma_m equals
    exp(-E/T) to round-off (detailed balance).
    """
    if not (np.isfinite(E) and E > 0.0):
        raise ValueError(f"E must be a positive energy gap, got {E}")
    gamma_p = bath.gamma * fermi(E, bath.T)
    return gamma_p, bath.gamma - gamma_p


COUPLING_RULES: dict[str, Callable[[int, float], float]] = {
    "harmonic": lambda i, gamma: (i + 1) * gamma,
    "constant": lambda i, gamma: gamma,
}


def build_oscillator(
    N: int,
    E: float,
    coupling: str | Sequence[float],
    bath: BathModel,
    gamma: float = 1.0,
) -> LadderSystem:
    """Equally spaced N-level ladder with nearest-neighbour thermal transitions.

    ``coupling`` selects gamma_i for the transition between levels i and i+1:
    'harmonic' gives (i+1)*gamma, 'constant' gives gamma, and an explicit
    sequence of N-1 values is used as-is.  Per-transition rates follow
    :func:`rates_from_bath`, so detailed balance holds on every rung.
    """
    if not isinstance(N, int) or N < 2:
        raise ValueError(f"N must be an integer >= 2, got {N}")
    if not (np.isfinite(E) and E > 0.0):
        raise ValueError(f"E must be a positive level spacing, got {E}")
    if isinstance(coupling, str):
        try:
            rule = COUPLING_RULES[coupling]
        except KeyError:
            raise ValueError(
                f"unknown coupling rule {coupling!r}; use "
                f"{sorted(COUPLING_RULES)} or an explicit table"
            ) from None
        gammas = [rule(i, gamma) for i in range(N - 1)]
    else:
        gammas = [float(g) for g in coupling]
        if len(gammas) != N - 1:
            raise ValueError(f"coupling table needs {N - 1} entries, got {len(gammas)}")
    for i, g in enumerate(gammas):
        if not (np.isfinite(g) and g >= 0.0):
            raise ValueError(f"coupling gamma_{i} must be non-negative, got {g}")
    energies = tuple(i * E for i in range(N))
    transitions = []
    for i, g in enumerate(gammas):
        gp, gm = rates_from_bath(BathModel(g, bath.T), E)
        transitions.append(TransitionSpec(i=i, j=i + 1, gamma_p=gp, gamma_m=gm, E_t=E))
    return LadderSystem(N=N, energies=energies, transitions=tuple(transitions))


def transition_projector(
    t: TransitionSpec,
    N: int,
    energies: Sequence[float] | None = None,
):
    """Rank-2 projector machinery for one transition.

    Returns ``(I_t, H_t, project)`` where ``I_t`` projects onto levels
    (i, j), ``H_t`` is the Hamiltonian restricted to that block, and
    ``project(rho)`` keeps exactly the four block entries of ``rho``.
    Without explicit energies the block Hamiltonian is centred,
    diag(-E_t/2, +E_t/2); block offsets cancel in every generated term, so
    the two choices produce identical dynamics.
    """
    if t.i >= N or t.j >= N:
        raise ValueError(f"transition ({t.i}, {t.j}) out of range for N={N}")
    I_t = np.zeros((N, N), dtype=complex)
    I_t[t.i, t.i] = 1.0
    I_t[t.j, t.j] = 1.0
    H_t = np.zeros((N, N), dtype=complex)
    if energies is None:
        H_t[t.i, t.i] = -0.5 * t.E_t
        H_t[t.j, t.j] = 0.5 * t.E_t
    else:
        H_t[t.i, t.i] = energies[t.i]
        H_t[t.j, t.j] = energies[t.j]

    idx = np.array([t.i, t.j], dtype=np.intp)

    def project(rho) -> np.ndarray:
        M = as_matrix(rho)
        if M.shape != (N, N):
            raise ValueError(f"expected a {N}x{N} matrix, got {M.shape}")
        out = np.zeros_like(M)
        out[np.ix_(idx, idx)] = M[np.ix_(idx, idx)]
        return out

    return I_t, H_t, project
