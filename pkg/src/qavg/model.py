"""Two-orbital dimer model built from Wannier-orbital data.

The five localized orbitals (two CO-derived p-type, three Fe-derived d-type)
are averaged class-wise into an effective p-d dimer with on-site repulsion.
The dimer's one-electron-added and one-electron-removed sectors are both
two-dimensional, so each maps onto a single-qubit Hamiltonian
``h0*I + hx*X + hz*Z``.

All energies are double-precision eV throughout.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources

P_LABELS = ("pa", "pb")
D_LABELS = ("d0", "d1", "d2")
ALL_LABELS = P_LABELS + D_LABELS

ELECTRON = "e"
HOLE = "h"
SECTORS = (ELECTRON, HOLE)

DEFAULT_DELTA_MU = 1.5


class InputError(ValueError):
    """Malformed or incomplete input data."""


def _normalize_sector(sector: str) -> str:
    aliases = {"e": ELECTRON, "electron": ELECTRON, "h": HOLE, "hole": HOLE}
    try:
        return aliases[sector.lower()]
    except KeyError:
        raise InputError(f"unknown excitation sector {sector!r}") from None


@dataclass(frozen=True)
class WannierSet:
    """Orbital energies, transfer integrals, and on-site repulsions (eV)."""

    orbital_energies: dict[str, float]
    transfers: dict[tuple[str, str], float]
    bare_repulsion: dict[str, float]
    screened_repulsion: dict[str, float]

    def __post_init__(self):
        for name, mapping in (
            ("orbital_energies", self.orbital_energies),
            ("bare_repulsion", self.bare_repulsion),
            ("screened_repulsion", self.screened_repulsion),
        ):
            missing = [lb for lb in ALL_LABELS if lb not in mapping]
            if missing:
                raise InputError(f"{name} missing labels {missing}")
        for (a, b), v in list(self.transfers.items()):
            if a not in ALL_LABELS or b not in ALL_LABELS:
                raise InputError(f"transfer references unknown label {(a, b)}")
            w = self.transfers.get((b, a), v)
            if abs(w - v) > 1e-12:
                raise InputError(f"transfers not symmetric at {(a, b)}")
        for name, mapping in (
            ("bare_repulsion", self.bare_repulsion),
            ("screened_repulsion", self.screened_repulsion),
        ):
            for lb, v in mapping.items():
                if v <= 0:
                    raise InputError(f"{name}[{lb}] must be positive, got {v}")

    def transfer(self, a: str, b: str) -> float:
        if (a, b) in self.transfers:
            return self.transfers[(a, b)]
        return self.transfers[(b, a)]

    @classmethod
    def from_dict(cls, payload: dict) -> "WannierSet":
        transfers = {}
        for a, b, v in payload["transfers"]:
            transfers[(a, b)] = float(v)
            transfers[(b, a)] = float(v)
        return cls(
            orbital_energies={k: float(v) for k, v in payload["orbital_energies"].items()},
            transfers=transfers,
            bare_repulsion={k: float(v) for k, v in payload["bare_repulsion"].items()},
            screened_repulsion={k: float(v) for k, v in payload["screened_repulsion"].items()},
        )

    @classmethod
    def from_file(cls, path) -> "WannierSet":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def bundled_wannier() -> WannierSet:
    """The Wannier parameter set shipped with the package."""
    text = resources.files("qavg.data").joinpath("wannier.json").read_text()
    return WannierSet.from_dict(json.loads(text))


@dataclass(frozen=True)
class DimerParams:
    """Effective p-d dimer parameters, eV.

    ``delta_mu`` is the chemical-potential shift applied to every orbital
    energy so the global ground state is a two-electron state.
    """

    eps_p: float
    eps_d: float
    t_pd: float
    u_p: float
    u_d: float
    delta_mu: float = DEFAULT_DELTA_MU

    def __post_init__(self):
        if self.u_p <= 0 or self.u_d <= 0:
            raise InputError("on-site repulsions must be positive")


def reference_dimer(delta_mu: float = DEFAULT_DELTA_MU) -> DimerParams:
    """Rounded reference dimer parameters used for the golden results."""
    return DimerParams(eps_p=1.021, eps_d=0.292, t_pd=-0.195, u_p=1.96, u_d=2.22,
                       delta_mu=delta_mu)


def average_wannier(w: WannierSet, delta_mu: float = DEFAULT_DELTA_MU) -> DimerParams:
    """Collapse the five-orbital data onto the two-orbital dimer.

    Orbital energies and screened repulsions are averaged within each class;
    the hopping is the mean of the six p-d transfer integrals.
    """
    eps_p = sum(w.orbital_energies[lb] for lb in P_LABELS) / len(P_LABELS)
    eps_d = sum(w.orbital_energies[lb] for lb in D_LABELS) / len(D_LABELS)
    pd = [w.transfer(a, b) for a in P_LABELS for b in D_LABELS]
    t_pd = sum(pd) / len(pd)
    u_p = sum(w.screened_repulsion[lb] for lb in P_LABELS) / len(P_LABELS)
    u_d = sum(w.screened_repulsion[lb] for lb in D_LABELS) / len(D_LABELS)
    return DimerParams(eps_p=eps_p, eps_d=eps_d, t_pd=t_pd, u_p=u_p, u_d=u_d,
                       delta_mu=delta_mu)


@dataclass(frozen=True)
class QubitHamiltonian:
    """Single-qubit Hamiltonian ``h0*I + hx*X + hz*Z`` for one excitation sector."""

    h0: float
    hx: float
    hz: float
    sector: str

    def matrix(self):
        import numpy as np

        return np.array(
            [[self.h0 + self.hz, self.hx], [self.hx, self.h0 - self.hz]],
            dtype=float,
        )


def qubit_hamiltonian(d: DimerParams, sector: str) -> QubitHamiltonian:
    """Reduce the dimer to the single-qubit Hamiltonian of one sector.

    The electron sector is the two-dimensional (n_e=3, S_z=+1/2) space, the
    hole sector the (n_e=1, S_z=-1/2) space; in both, basis state |0> holds
    the extra weight on the p orbital.
    """
    sector = _normalize_sector(sector)
    if sector == ELECTRON:
        diag0 = 2 * d.eps_p + d.eps_d - 3 * d.delta_mu + d.u_p
        diag1 = d.eps_p + 2 * d.eps_d - 3 * d.delta_mu + d.u_d
    else:
        diag0 = d.eps_p - d.delta_mu
        diag1 = d.eps_d - d.delta_mu
    return QubitHamiltonian(
        h0=0.5 * (diag0 + diag1),
        hx=d.t_pd,
        hz=0.5 * (diag0 - diag1),
        sector=sector,
    )


def eigenvalues(h: QubitHamiltonian) -> tuple[float, float]:
    """Analytic spectrum ``h0 -/+ sqrt(hx^2 + hz^2)``, sorted ascending."""
    r = math.hypot(h.hx, h.hz)
    return (h.h0 - r, h.h0 + r)
