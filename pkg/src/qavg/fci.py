"""Exact diagonalization of the two-orbital dimer.

The Fock space over the four spin-orbitals (p-up, d-up, p-down, d-down) is
16-dimensional and splits into particle-number/spin sectors of dimension at
most four, so everything is diagonalized exactly per sector.  This module
supplies the ground state, the one-electron density matrix and its natural
orbitals, the deterministic excited-state preparation angles, and the
brute-force transition amplitudes that serve as the oracle for every
distribution produced elsewhere in the package.

Spin-orbital mode order: 0 = p-up, 1 = d-up, 2 = p-down, 3 = d-down.
A basis state is the bitmask of occupied modes, with creation operators
applied in ascending mode order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import DimerParams, ELECTRON, HOLE, _normalize_sector

N_MODES = 4
DIM = 1 << N_MODES

ORBITALS = ("p", "d")

# Up-spin modes for (p, d); down-spin modes follow two places later.
MODE_UP = {"p": 0, "d": 1}
MODE_DOWN = {"p": 2, "d": 3}

# Sector bases (ascending bitmasks) used for the qubit mapping:
#   electron sector (n_e=3, Sz=+1/2): |0> = p-up d-up p-down, |1> = p-up d-up d-down
#   hole sector     (n_e=1, Sz=-1/2): |0> = p-down,           |1> = d-down
ELECTRON_SECTOR = (3, 1)
HOLE_SECTOR = (1, -1)
GS_SECTOR = (2, 0)

_SECTOR_KEY = {ELECTRON: ELECTRON_SECTOR, HOLE: HOLE_SECTOR}


def _sector_of(mask: int) -> tuple[int, int]:
    n_up = ((mask >> 0) & 1) + ((mask >> 1) & 1)
    n_dn = ((mask >> 2) & 1) + ((mask >> 3) & 1)
    return (n_up + n_dn, n_up - n_dn)


def sector_masks() -> dict[tuple[int, int], list[int]]:
    """Bitmask basis of every (n_electrons, 2*Sz) sector, ascending."""
    out: dict[tuple[int, int], list[int]] = {}
    for mask in range(DIM):
        out.setdefault(_sector_of(mask), []).append(mask)
    return out


def _parity_below(mask: int, mode: int) -> int:
    return 1 - 2 * (bin(mask & ((1 << mode) - 1)).count("1") & 1)


def apply_creation(vec: np.ndarray, mode: int) -> np.ndarray:
    out = np.zeros_like(vec)
    bit = 1 << mode
    for mask in range(DIM):
        if vec[mask] == 0.0 or (mask & bit):
            continue
        out[mask | bit] += _parity_below(mask, mode) * vec[mask]
    return out


def apply_annihilation(vec: np.ndarray, mode: int) -> np.ndarray:
    out = np.zeros_like(vec)
    bit = 1 << mode
    for mask in range(DIM):
        if vec[mask] == 0.0 or not (mask & bit):
            continue
        out[mask & ~bit] += _parity_below(mask, mode) * vec[mask]
    return out


def build_hamiltonian(d: DimerParams) -> np.ndarray:
    """Dense 16x16 dimer Hamiltonian in the bitmask basis."""
    h = np.zeros((DIM, DIM))
    eps = {
        0: d.eps_p - d.delta_mu,
        1: d.eps_d - d.delta_mu,
        2: d.eps_p - d.delta_mu,
        3: d.eps_d - d.delta_mu,
    }
    for mask in range(DIM):
        diag = sum(eps[m] for m in range(N_MODES) if mask & (1 << m))
        if (mask & 0b0101) == 0b0101:
            diag += d.u_p
        if (mask & 0b1010) == 0b1010:
            diag += d.u_d
        h[mask, mask] = diag
    # hopping a+_d a_p + h.c. per spin
    for p_mode, d_mode in ((0, 1), (2, 3)):
        for mask in range(DIM):
            basis = np.zeros(DIM)
            basis[mask] = 1.0
            moved = apply_creation(apply_annihilation(basis, p_mode), d_mode)
            h[:, mask] += d.t_pd * moved
            moved = apply_creation(apply_annihilation(basis, d_mode), p_mode)
            h[:, mask] += d.t_pd * moved
    return h


def _fix_sign(vec: np.ndarray) -> np.ndarray:
    i = int(np.argmax(np.abs(vec)))
    return -vec if vec[i] < 0 else vec


@dataclass(frozen=True)
class GroundState:
    """Lowest eigenstate of the dimer over all sectors.

    ``amplitudes`` is the 4-vector over the ordered (n_e=2, Sz=0) basis
    (p-up p-down, d-up p-down, p-up d-down, d-up d-down); it is None when
    the global minimum falls outside that sector.
    """

    energy: float
    sector: tuple[int, int]
    vector: np.ndarray  # full 16-component embedding
    amplitudes: np.ndarray | None

    @property
    def in_half_filled_sector(self) -> bool:
        return self.sector == GS_SECTOR


def sector_spectra(d: DimerParams) -> dict[tuple[int, int], tuple[np.ndarray, np.ndarray]]:
    """Eigenvalues and eigenvectors (columns) of every sector block."""
    h = build_hamiltonian(d)
    out = {}
    for sector, masks in sector_masks().items():
        block = h[np.ix_(masks, masks)]
        vals, vecs = np.linalg.eigh(block)
        out[sector] = (vals, vecs)
    return out


def ground_state(d: DimerParams) -> GroundState:
    """Global ground state; sign fixed so the largest amplitude is positive."""
    spectra = sector_spectra(d)
    best_sector = min(spectra, key=lambda s: spectra[s][0][0])
    energy = float(spectra[best_sector][0][0])
    vec_block = _fix_sign(spectra[best_sector][1][:, 0])
    masks = sector_masks()[best_sector]
    full = np.zeros(DIM)
    full[masks] = vec_block
    amplitudes = vec_block.copy() if best_sector == GS_SECTOR else None
    return GroundState(energy=energy, sector=best_sector, vector=full,
                       amplitudes=amplitudes)


def density_matrix(gs: GroundState) -> np.ndarray:
    """One-electron density matrix of the up-spin sector (2x2 over p, d).

    The unpolarized ground state makes the down-spin matrix identical.
    """
    gamma = np.zeros((2, 2))
    for i, kp in enumerate(ORBITALS):
        for j, k in enumerate(ORBITALS):
            moved = apply_creation(apply_annihilation(gs.vector, MODE_UP[k]),
                                   MODE_UP[kp])
            gamma[i, j] = float(gs.vector @ moved)
    return gamma


@dataclass(frozen=True)
class NOBasis:
    """Natural orbitals: eigenvectors of the density matrix.

    ``coeffs[:, nu]`` is the coefficient vector of the nu-th natural orbital
    over (p, d); occupancies are sorted ascending, so nu = 0 is the less
    occupied one.
    """

    coeffs: np.ndarray       # (2 orbitals, 2 NOs)
    occupancies: np.ndarray  # (2,)


def natural_orbitals(gamma: np.ndarray) -> NOBasis:
    gamma = np.asarray(gamma, dtype=float)
    if not np.allclose(gamma, gamma.T, atol=1e-12):
        raise ValueError("density matrix must be symmetric")
    occ, vecs = np.linalg.eigh(gamma)
    if abs(occ[0] - occ[1]) < 1e-14:
        # Degenerate occupancies leave the NOs non-unique; order the
        # eigenvectors lexicographically for determinism.
        cols = sorted(range(2), key=lambda c: tuple(np.round(vecs[:, c], 12)))
        vecs = vecs[:, cols]
        occ = occ[cols]
    for nu in range(2):
        col = vecs[:, nu]
        nz = np.nonzero(np.abs(col) > 1e-12)[0][0]
        if col[nz] < 0:
            vecs[:, nu] = -col
    return NOBasis(coeffs=vecs, occupancies=occ)


def _excited_vector(gs: GroundState, xi: str, kappa: str) -> tuple[np.ndarray, list[int]]:
    """Unnormalized excited state and the masks of its two-dimensional sector."""
    if xi == ELECTRON:
        vec = apply_creation(gs.vector, MODE_UP[kappa])
    else:
        vec = apply_annihilation(gs.vector, MODE_UP[kappa])
    masks = sector_masks()[_SECTOR_KEY[xi]]
    return vec, masks


def prep_angle(gs: GroundState, xi: str, kappa: str) -> float:
    """Rotation half-angle: Ry(2*angle)|0> prepares the normalized excited state."""
    xi = _normalize_sector(xi)
    vec, masks = _excited_vector(gs, xi, kappa)
    comp = vec[masks]
    norm = np.linalg.norm(comp)
    if norm < 1e-12:
        raise ValueError(f"zero-norm excited state for ({xi}, {kappa})")
    comp = _fix_sign(comp / norm)
    return float(math.atan2(comp[1], comp[0]))


def excitation_prep_angles(gs: GroundState) -> tuple[float, float]:
    """(eta, zeta): angles preparing the p- and d-electron excited states.

    The hole preparations reuse the same two angles swapped.
    """
    return (prep_angle(gs, ELECTRON, "p"), prep_angle(gs, ELECTRON, "d"))


@dataclass(frozen=True)
class ExcitationTable:
    """Exact sector data feeding the sampling oracle and the fit model.

    Axis conventions: ``energies[lam]``, ``probs[kappa, lam]``,
    ``b_tilde[nu, lam]``, ``d_coefs[kappa, nu]``, ``s_matrix[kappa, nu, nu']``,
    ``norms[kappa]`` with kappa ordered (p, d).
    """

    xi: str
    energies: np.ndarray
    probs: np.ndarray
    b_tilde: np.ndarray
    d_coefs: np.ndarray
    s_matrix: np.ndarray
    norms: np.ndarray
    occupancies: np.ndarray
    no_coeffs: np.ndarray
    oracle_theta: float


def sector_hamiltonian(d: DimerParams, xi: str) -> np.ndarray:
    """2x2 Hamiltonian block of the electron or hole sector."""
    xi = _normalize_sector(xi)
    masks = sector_masks()[_SECTOR_KEY[xi]]
    h = build_hamiltonian(d)
    return h[np.ix_(masks, masks)]


def excitation_table(gs: GroundState, d: DimerParams, xi: str) -> ExcitationTable:
    """Diagonalize one excitation sector and tabulate exact amplitudes."""
    xi = _normalize_sector(xi)
    block = sector_hamiltonian(d, xi)
    energies, vecs = np.linalg.eigh(block)
    for lam in range(2):
        vecs[:, lam] = _fix_sign(vecs[:, lam])

    masks = sector_masks()[_SECTOR_KEY[xi]]
    amp = np.zeros((2, 2))  # (sector basis index, kappa)
    for j, kappa in enumerate(ORBITALS):
        vec, _ = _excited_vector(gs, xi, kappa)
        amp[:, j] = vec[masks]
    norms = np.sum(amp**2, axis=0)

    # b[lam, kappa] = <Psi_lam| O_kappa |gs>
    b = vecs.T @ amp
    probs = np.zeros((2, 2))
    for j in range(2):
        if norms[j] > 1e-15:
            probs[j, :] = b[:, j] ** 2 / norms[j]

    nos = natural_orbitals(density_matrix(gs))
    occ = nos.occupancies
    weight = (1.0 - occ) if xi == ELECTRON else occ
    d_coefs = nos.coeffs * np.sqrt(np.clip(weight, 0.0, None))[None, :]

    b_tilde = np.zeros((2, 2))
    for nu in range(2):
        den = math.sqrt(weight[nu]) if weight[nu] > 1e-12 else 0.0
        if den > 0.0:
            b_tilde[nu, :] = (nos.coeffs[:, nu] @ b.T) / den

    s_matrix = np.zeros((2, 2, 2))
    for j in range(2):
        if norms[j] > 1e-15:
            s_matrix[j] = np.outer(d_coefs[j, :], d_coefs[j, :]) / norms[j]

    bt = b_tilde.copy()
    if np.linalg.det(bt) < 0:
        bt[:, 1] = -bt[:, 1]
    oracle_theta = math.atan2(bt[0, 1], bt[0, 0]) % math.pi

    return ExcitationTable(
        xi=xi,
        energies=energies,
        probs=probs,
        b_tilde=b_tilde,
        d_coefs=d_coefs,
        s_matrix=s_matrix,
        norms=norms,
        occupancies=occ,
        no_coeffs=nos.coeffs,
        oracle_theta=oracle_theta,
    )


def transition_matrix(gs: GroundState, d: DimerParams, xi: str) -> np.ndarray:
    """b[lam, kappa] amplitude matrix, for the sum-rule checks."""
    xi = _normalize_sector(xi)
    block = sector_hamiltonian(d, xi)
    _, vecs = np.linalg.eigh(block)
    masks = sector_masks()[_SECTOR_KEY[xi]]
    amp = np.zeros((2, 2))
    for j, kappa in enumerate(ORBITALS):
        vec, _ = _excited_vector(gs, xi, kappa)
        amp[:, j] = vec[masks]
    return vecs.T @ amp
