"""Pure-NumPy statevector kernels (fallback for the compiled extension).

All functions mutate ``psi`` in place.  Basis convention: bit q of the
amplitude index is the computational value of qubit q.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def apply_1q(psi: np.ndarray, m: np.ndarray, q: int, n: int) -> None:
    arr = psi.reshape(-1, 2, 1 << q)
    a0 = arr[:, 0, :].copy()
    a1 = arr[:, 1, :]
    arr[:, 0, :] = m[0, 0] * a0 + m[0, 1] * a1
    arr[:, 1, :] = m[1, 0] * a0 + m[1, 1] * a1


def apply_2q(psi: np.ndarray, m: np.ndarray, q_hi: int, q_lo: int, n: int) -> None:
    idx = np.arange(psi.size)
    hi = 1 << q_hi
    lo = 1 << q_lo
    base = idx[(idx & hi == 0) & (idx & lo == 0)]
    block = np.stack([psi[base], psi[base + lo], psi[base + hi], psi[base + hi + lo]])
    out = m @ block
    psi[base] = out[0]
    psi[base + lo] = out[1]
    psi[base + hi] = out[2]
    psi[base + hi + lo] = out[3]


def prob_one(psi: np.ndarray, q: int, n: int) -> float:
    arr = psi.reshape(-1, 2, 1 << q)
    return float(np.sum(np.abs(arr[:, 1, :]) ** 2))


def project(psi: np.ndarray, q: int, outcome: int, scale: float, n: int) -> None:
    arr = psi.reshape(-1, 2, 1 << q)
    arr[:, 1 - outcome, :] = 0.0
    psi *= scale
