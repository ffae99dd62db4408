"""Right-hand-side generators for the master equation.

Two independent routes to the same dissipative map exist on purpose:

* :func:`gkls_dissipator` works through explicit jump operators;
* :func:`ebe_two_level` / :func:`ebe_multi_level` work through the
  elemental-Bloch decomposition (mixing toward equal populations, energy
  relaxation, dephasing) with no jump operators at all.

For a canonically scaled two-level pair the two routes coincide as linear
maps, which the test suite checks numerically instead of trusting either
implementation.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .linalg import as_matrix
from .systems import LadderSystem, TwoLevelSystem, jump_operators

KINDS = ("gkls", "ebe2", "eben")

_EYE2 = np.eye(2, dtype=complex)


@dataclass(frozen=True, eq=False)
class RhsSpec:
    """Everything needed to evaluate d(rho)/dt.

    ``gamma_pd`` is the signed coefficient with which the double commutator
    [H, [H, rho]] is added to the assembled equation.  It is applied exactly
    as written; a damping term therefore needs a negative value (for a
    diagonal H the double commutator multiplies each coherence by the squared
    gap, so a positive coefficient amplifies them).  Amplifying generators
    are flagged by the superoperator spectrum check in
    :mod:`ebloch.propagate` rather than forbidden.
    """

    hamiltonian: np.ndarray
    kind: str
    two_level: TwoLevelSystem | None = None
    ladder: LadderSystem | None = None
    jumps: tuple = ()
    include_unitary: bool = True
    gamma_pd: float = 0.0

    def __post_init__(self):
        H = as_matrix(self.hamiltonian)
        object.__setattr__(self, "hamiltonian", H)
        if self.kind not in KINDS:
            raise ValueError(f"dissipator kind must be one of {KINDS}, got {self.kind!r}")
        if self.kind == "ebe2":
            if self.two_level is None:
                raise ValueError("kind 'ebe2' needs a TwoLevelSystem payload")
            if H.shape != (2, 2):
                raise ValueError("kind 'ebe2' needs a 2x2 Hamiltonian")
        if self.kind == "eben":
            if self.ladder is None:
                raise ValueError("kind 'eben' needs a LadderSystem payload")
            if H.shape != (self.ladder.N, self.ladder.N):
                raise ValueError("Hamiltonian dimension does not match the ladder")
        jumps = []
        for L, gamma in self.jumps:
            L = as_matrix(L)
            if L.shape != H.shape:
                raise ValueError("jump operator dimension does not match the Hamiltonian")
            gamma = float(gamma)
            if not (np.isfinite(gamma) and gamma >= 0.0):
                raise ValueError(f"jump rates must be non-negative, got {gamma}")
            jumps.append((L, gamma))
        if self.kind == "gkls" and not jumps and (self.two_level or self.ladder):
            raise ValueError("kind 'gkls' with a system payload needs an explicit jump list")
        object.__setattr__(self, "jumps", tuple(jumps))
        if not np.isfinite(self.gamma_pd):
            raise ValueError("gamma_pd must be finite")

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]

    @cached_property
    def jump_terms(self) -> tuple:
        """Per-jump (gamma, L, L^dag, L^dag L), precomputed once; any real
        jump-operator solver would hoist these out of the propagation loop."""
        terms = []
        for L, gamma in self.jumps:
            Ld = L.conj().T
            terms.append((gamma, L, Ld, Ld @ L))
        return tuple(terms)

    @classmethod
    def for_two_level(
        cls,
        sys: TwoLevelSystem,
        kind: str = "ebe2",
        include_unitary: bool = True,
        gamma_pd: float | None = None,
    ) -> "RhsSpec":
        """EBE2 spec, or its GKLS twin built from the canonical jump pair.

        ``gamma_pd=None`` takes the system's non-negative magnitude as
        written; pass an explicit signed value to choose the damping sign.
        """
        H = sys.hamiltonian
        if gamma_pd is None:
            gamma_pd = sys.gamma_pd
        if kind == "ebe2":
            return cls(H, "ebe2", two_level=sys, include_unitary=include_unitary,
                       gamma_pd=gamma_pd)
        if kind == "gkls":
            pair = jump_operators(H)
            jumps = ((pair.sigma_p, sys.gamma_p), (pair.sigma_m, sys.gamma_m))
            return cls(H, "gkls", two_level=sys, jumps=jumps,
                       include_unitary=include_unitary, gamma_pd=gamma_pd)
        raise ValueError(f"two-level specs support kinds 'ebe2' and 'gkls', got {kind!r}")

    @classmethod
    def for_ladder(
        cls,
        sys: LadderSystem,
        kind: str = "eben",
        include_unitary: bool = True,
        gamma_pd: float = 0.0,
    ) -> "RhsSpec":
        """EBEN spec, or the pairwise-GKLS alternative for comparisons.

        The two coincide on populations and on states confined to a single
        transition block, but treat coherences between a block and outside
        levels differently; the GKLS twin is exposed exactly so that this
        difference can be measured.
        """
        H = sys.hamiltonian
        if kind == "eben":
            return cls(H, "eben", ladder=sys, include_unitary=include_unitary,
                       gamma_pd=gamma_pd)
        if kind == "gkls":
            return cls(H, "gkls", ladder=sys, jumps=ladder_jump_list(sys),
                       include_unitary=include_unitary, gamma_pd=gamma_pd)
        raise ValueError(f"ladder specs support kinds 'eben' and 'gkls', got {kind!r}")

    @classmethod
    def closed(cls, H, include_unitary: bool = True) -> "RhsSpec":
        """Unitary evolution only (empty jump list)."""
        return cls(as_matrix(H), "gkls", include_unitary=include_unitary)


def gkls_dissipator(rho, jumps) -> np.ndarray:
    """Standard dissipator sum_j gamma_j (L rho L^dag - (1/2){L^dag L, rho})."""
    M = as_matrix(rho)
    out = np.zeros_like(M)
    for L, gamma in jumps:
        L = as_matrix(L)
        if L.shape != M.shape:
            raise ValueError("jump operator dimension does not match rho")
        if gamma < 0.0:
            raise ValueError(f"jump rates must be non-negative, got {gamma}")
        Ld = L.conj().T
        LdL = Ld @ L
        out += gamma * (L @ M @ Ld - 0.5 * (LdL @ M + M @ LdL))
    return out


def ebe_two_level(rho, sys: TwoLevelSystem) -> np.ndarray:
    """Two-level elemental-Bloch dissipator (no unitary part, no jumps).

    -(gp+gm)(rho - Tr rho * 1/2) + (gp-gm)(H/E) Tr rho
    + (gp+gm)[H, [H, rho]]/(2 E^2)

    On unit-trace states the Tr rho factors reduce to the familiar constant
    terms; keeping them makes the map linear, so it has a well-defined
    superoperator matrix and extends the unit-trace form uniquely.
    """
    M = as_matrix(rho)
    if M.shape != (2, 2):
        raise ValueError(f"expected a 2x2 density matrix, got {M.shape}")
    H = sys.hamiltonian
    gsum = sys.gamma_sum
    gdiff = sys.gamma_diff
    tr = M[0, 0] + M[1, 1]
    inner = H @ M - M @ H
    dbl = H @ inner - inner @ H
    out = (-gsum) * M
    out += (0.5 * gsum * tr) * _EYE2
    out += (gdiff * tr / sys.E) * H
    out += (gsum / (2.0 * sys.E * sys.E)) * dbl
    return out


def ebe_multi_level(rho, sys: LadderSystem) -> np.ndarray:
    """Multi-level elemental-Bloch dissipator: one block term per transition.

    Per transition t on levels (i, j) with partial projector I_t, partial
    Hamiltonian H_t = I_t H I_t and partial state rho_t = I_t rho I_t:

        -(gp+gm)(rho_t - Tr rho_t * I_t/2)
        + (gp-gm)((H_t - Tr H_t * I_t/2)/E_t) Tr rho_t
        + (gp+gm)[H_t, [H_t, rho_t]]/(2 E_t^2)

    For the diagonal ladder Hamiltonian these three terms collapse exactly
    (E_t cancels) to a population current gp*rho_ii - gm*rho_jj between the
    two diagonal entries plus damping of the block coherence at (gp+gm)/2,
    which is what is evaluated below.  Contributions are accumulated in
    transition index order.  Coherences between levels that share no
    transition are left untouched.
    """
    M = as_matrix(rho)
    if M.shape != (sys.N, sys.N):
        raise ValueError(f"expected a {sys.N}x{sys.N} density matrix, got {M.shape}")
    ii, jj, gp, gm = sys.transition_arrays
    out = np.zeros_like(M)
    if ii.size == 0:
        return out
    gsum = gp + gm
    flow = gp * M[ii, ii] - gm * M[jj, jj]
    np.add.at(out, (ii, ii), -flow)
    np.add.at(out, (jj, jj), flow)
    np.add.at(out, (ii, jj), -0.5 * gsum * M[ii, jj])
    np.add.at(out, (jj, ii), -0.5 * gsum * M[jj, ii])
    return out


def double_commutator(H, rho) -> np.ndarray:
    """[H, [H, rho]]."""
    H = as_matrix(H)
    M = as_matrix(rho)
    inner = H @ M - M @ H
    return H @ inner - inner @ H


def pure_dephasing(rho, H, gamma: float) -> np.ndarray:
    """Pure-dephasing generator Gamma [H, [H, rho]], Gamma >= 0.

    Vanishes on anything commuting with H and is traceless.  This is the raw
    operator; the sign with which it enters an assembled equation is chosen
    via ``RhsSpec.gamma_pd``.
    """
    if gamma < 0.0:
        raise ValueError(f"gamma must be non-negative, got {gamma}")
    return gamma * double_commutator(H, rho)


def ladder_jump_list(sys: LadderSystem) -> tuple:
    """Pairwise-GKLS jump list for a ladder: per transition, the embedded
    block raising/lowering operators |j><i| and |i><j| with their rates."""
    jumps = []
    for t in sys.transitions:
        up = np.zeros((sys.N, sys.N), dtype=complex)
        up[t.j, t.i] = 1.0
        down = np.zeros((sys.N, sys.N), dtype=complex)
        down[t.i, t.j] = 1.0
        jumps.append((up, t.gamma_p))
        jumps.append((down, t.gamma_m))
    return tuple(jumps)


def master_rhs(rho, spec: RhsSpec) -> np.ndarray:
    """Assembled right-hand side: -i[H, rho] + dissipator + gamma_pd [H,[H,rho]].

    Linear in rho; for Hermitian unit-trace input the output is Hermitian and
    traceless to round-off.
    """
    M = as_matrix(rho)
    H = spec.hamiltonian
    if M.shape != H.shape:
        raise ValueError(f"rho has shape {M.shape}, spec dimension is {H.shape}")
    if spec.kind == "ebe2":
        out = ebe_two_level(M, spec.two_level)
    elif spec.kind == "eben":
        out = ebe_multi_level(M, spec.ladder)
    else:
        out = np.zeros_like(M)
        for gamma, L, Ld, LdL in spec.jump_terms:
            out += gamma * (L @ M @ Ld - 0.5 * (LdL @ M + M @ LdL))
    if spec.include_unitary:
        out += -1j * (H @ M - M @ H)
    if spec.gamma_pd != 0.0:
        out += spec.gamma_pd * double_commutator(H, M)
    return out
