"""Vernier-averaged fitting of QPE histograms.

A trial model with three parameters per excitation sector (one mixing angle
and two pole energies) is matched against the measured histograms for every
origin shift at once; averaging over the shifts washes out the spectral
leakage that plagues single-grid cost landscapes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize

from .circuits import QpeSettings
from .fci import ExcitationTable, ORBITALS
from .model import InputError, _normalize_sector
from .simulator import Circuit, NoiseModel, NOISELESS, run_shot

TWO_PI = 2.0 * math.pi


def qpe_kernel(eps: float, settings: QpeSettings, s: int) -> np.ndarray:
    """Probability profile a single eigenvalue imprints on the N-point grid.

    Closed form of the squared geometric sum; the removable singularity at
    on-grid energies evaluates to 1.
    """
    n_val = settings.n_val
    x = (eps - settings.e_orig(s)) * settings.t0 - np.arange(n_val)
    den = np.sin(np.pi * x / n_val)
    singular = np.abs(den) < 1e-12
    safe = np.where(singular, 1.0, den)
    vals = np.sin(np.pi * x) ** 2 / (n_val**2 * safe**2)
    return np.where(singular, 1.0, vals)


@dataclass(frozen=True)
class TrialParams:
    """Fit parameters of one sector: mixing angle (rad) and pole energies (eV)."""

    theta: float
    eps0: float
    eps1: float
    xi: str


def canonicalize(lam: TrialParams) -> TrialParams:
    """Fold the relabeling symmetry: theta modulo pi, energies ascending."""
    theta = lam.theta % math.pi
    if lam.eps0 > lam.eps1:
        return replace(lam, theta=(theta - math.pi / 2) % math.pi,
                       eps0=lam.eps1, eps1=lam.eps0)
    return replace(lam, theta=theta)


def excitation_probs(theta: float, s_matrix: np.ndarray) -> np.ndarray:
    """Trial weights of the two excited states, shape (kappa, lam).

    Quadratic forms of the orthonormal trial amplitudes; each row sums to 1
    by the normalization of the S coefficients.
    """
    c, s = math.cos(theta), math.sin(theta)
    cross = s_matrix[:, 0, 1] + s_matrix[:, 1, 0]
    p0 = s_matrix[:, 0, 0] * c * c - cross * c * s + s_matrix[:, 1, 1] * s * s
    p1 = s_matrix[:, 0, 0] * s * s + cross * c * s + s_matrix[:, 1, 1] * c * c
    probs = np.stack([p0, p1], axis=1)
    if np.any(probs < -1e-9) or np.any(probs > 1.0 + 1e-9):
        raise RuntimeError("trial excitation probability left [0, 1]; "
                           "S coefficients are inconsistent")
    return np.clip(probs, 0.0, 1.0)


def trial_distribution(lam: TrialParams, kappa: str, table: ExcitationTable,
                       settings: QpeSettings, s: int) -> np.ndarray:
    """Model distribution: excitation weights convolved with the kernel."""
    probs = excitation_probs(lam.theta, table.s_matrix)[ORBITALS.index(kappa)]
    return (probs[0] * qpe_kernel(lam.eps0, settings, s)
            + probs[1] * qpe_kernel(lam.eps1, settings, s))


def l1_distance(ha: np.ndarray, hb: np.ndarray) -> float:
    ha = np.asarray(ha, dtype=float)
    hb = np.asarray(hb, dtype=float)
    if ha.shape != hb.shape:
        raise InputError("distributions must have equal length")
    for v in (ha, hb):
        if abs(v.sum() - 1.0) > 1e-6:
            raise InputError("distributions must be normalized")
    return 0.5 * float(np.abs(ha - hb).sum())


def _infidelity(p: np.ndarray, f: np.ndarray) -> float:
    return 1.0 - float(np.sqrt(np.clip(p, 0, None) * np.clip(f, 0, None)).sum()) ** 2


def _neg_log_likelihood(p: np.ndarray, f: np.ndarray) -> float:
    return -float(np.sum(f * np.log(np.clip(p, 1e-300, None))))


DISCREPANCIES = {
    "l1": l1_distance,
    "infidelity": _infidelity,
    "nll": _neg_log_likelihood,
}


@dataclass(frozen=True, eq=False)
class Histogram:
    """Normalized QPE outcome counts for one (variant, xi, kappa, shift)."""

    variant: str
    xi: str
    kappa: str
    s: int
    settings: QpeSettings
    shots_submitted: int
    shots_accepted: int
    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=float)
        if counts.ndim != 1 or counts.size != self.settings.n_val:
            raise InputError("counts must have one entry per grid point")
        if np.any(counts < 0):
            raise InputError("counts must be non-negative")
        object.__setattr__(self, "counts", counts)

    @property
    def frequencies(self) -> np.ndarray:
        total = self.counts.sum()
        if total <= 0:
            raise InputError("histogram holds no accepted shots")
        return self.counts / total

    def to_dict(self) -> dict:
        return {
            "variant": self.variant,
            "xi": self.xi,
            "kappa": self.kappa,
            "shift": self.s,
            "settings": {
                "n_qft": self.settings.n_qft,
                "t0": self.settings.t0,
                "e_o": self.settings.e_o,
                "n_settings": self.settings.n_settings,
            },
            "shots_submitted": self.shots_submitted,
            "shots_accepted": self.shots_accepted,
            "counts": [float(c) for c in self.counts],
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "Histogram":
        return cls(
            variant=payload["variant"],
            xi=payload["xi"],
            kappa=payload["kappa"],
            s=int(payload["shift"]),
            settings=QpeSettings(**payload["settings"]),
            shots_submitted=int(payload["shots_submitted"]),
            shots_accepted=int(payload["shots_accepted"]),
            counts=np.asarray(payload["counts"], dtype=float),
        )


def sample_histogram(circuit: Circuit, *, variant: str, xi: str, kappa: str,
                     s: int, settings: QpeSettings, shots: int,
                     noise: NoiseModel = NOISELESS, seed: int = 0) -> Histogram:
    """Accumulate shots into a histogram; discarded shots are submitted but
    not counted.  Each shot draws from its own seed-indexed substream."""
    counts = np.zeros(settings.n_val)
    accepted = 0
    for i in range(shots):
        outcome = run_shot(circuit, noise,
                           rng=np.random.default_rng((seed, s, i)))
        if outcome.accepted:
            counts[circuit.result_value(outcome.bits)] += 1
            accepted += 1
    return Histogram(variant=variant, xi=xi, kappa=kappa, s=s,
                     settings=settings, shots_submitted=shots,
                     shots_accepted=accepted, counts=counts)


def histogram_from_distribution(dist: np.ndarray, *, variant: str, xi: str,
                                kappa: str, s: int,
                                settings: QpeSettings) -> Histogram:
    """Wrap an exact distribution as an infinite-shot histogram."""
    return Histogram(variant=variant, xi=xi, kappa=kappa, s=s,
                     settings=settings, shots_submitted=0, shots_accepted=0,
                     counts=np.asarray(dist, dtype=float))


def _grouped(histograms, xi: str) -> dict[tuple[int, str], Histogram]:
    xi = _normalize_sector(xi)
    grouped: dict[tuple[int, str], Histogram] = {}
    for hist in histograms:
        if _normalize_sector(hist.xi) != xi:
            raise InputError(f"histogram for sector {hist.xi!r} passed to "
                             f"a {xi!r} fit")
        key = (hist.s, hist.kappa)
        if key in grouped:
            raise InputError(f"duplicate histogram for {key}")
        grouped[key] = hist
    shifts = {s for s, _ in grouped}
    for s in shifts:
        for kappa in ORBITALS:
            if (s, kappa) not in grouped:
                raise InputError(f"missing histogram for shift {s}, "
                                 f"orbital {kappa!r}")
    if not grouped:
        raise InputError("no histograms supplied")
    return grouped


def cost(lam: TrialParams, histograms, table: ExcitationTable,
         measure: str = "l1") -> float:
    """Discrepancy between the trial model and the data, averaged over every
    (shift, orbital) pair present.  Passing a single shift gives the
    single-reference cost."""
    grouped = _grouped(histograms, lam.xi)
    disc = DISCREPANCIES[measure]
    total = 0.0
    for (s, kappa), hist in grouped.items():
        model = trial_distribution(lam, kappa, table, hist.settings, s)
        total += disc(model, hist.frequencies)
    return total / len(grouped)


@dataclass(frozen=True)
class OptimizeConfig:
    restarts: int = 300
    max_iter: int = 500
    cost_tol: float = 1e-8
    measure: str = "l1"


@dataclass(frozen=True)
class FitResult:
    params: TrialParams
    cost: float
    restarts: int
    best_cost: float
    median_cost: float
    avg_l1_reference: float | None = None

    def to_dict(self) -> dict:
        return {
            "xi": self.params.xi,
            "theta": self.params.theta,
            "eps0": self.params.eps0,
            "eps1": self.params.eps1,
            "cost": self.cost,
            "restarts": self.restarts,
            "best_cost": self.best_cost,
            "median_cost": self.median_cost,
            "avg_l1_reference": self.avg_l1_reference,
        }


def average_l1_to_reference(histograms, reference: dict) -> float:
    """Mean L1 distance between histograms and reference distributions keyed
    by (shift, orbital)."""
    vals = [l1_distance(h.frequencies, reference[(h.s, h.kappa)])
            for h in histograms]
    return float(np.mean(vals))


def optimize(histograms, xi: str, table: ExcitationTable,
             config: OptimizeConfig = OptimizeConfig(), seed: int = 0,
             reference: dict | None = None) -> FitResult:
    """Multi-restart Nelder-Mead minimization of the averaged cost.

    Starts are uniform over theta in [0, pi) and one energy period above the
    base origin; the winning minimum is wrapped into that box and
    canonicalized.  Restarts that fail to evaluate are dropped.
    """
    xi = _normalize_sector(xi)
    grouped = _grouped(histograms, xi)
    settings = next(iter(grouped.values())).settings
    period = settings.period
    lo = settings.e_o

    def objective(x) -> float:
        lam = TrialParams(theta=x[0], eps0=x[1], eps1=x[2], xi=xi)
        return cost(lam, histograms, table, measure=config.measure)

    rng = np.random.default_rng(seed)
    starts = np.column_stack([
        rng.uniform(0.0, math.pi, config.restarts),
        rng.uniform(lo, lo + period, config.restarts),
        rng.uniform(lo, lo + period, config.restarts),
    ])

    finished: list[tuple[float, np.ndarray]] = []
    for x0 in starts:
        try:
            res = minimize(objective, x0, method="Nelder-Mead",
                           options={"fatol": config.cost_tol, "xatol": 1e-8,
                                    "maxiter": config.max_iter,
                                    "maxfev": 4 * config.max_iter})
        except (ValueError, RuntimeError, FloatingPointError):
            continue
        finished.append((float(res.fun), res.x))
    if not finished:
        raise RuntimeError("every optimizer restart failed")

    costs = np.array([c for c, _ in finished])
    best_cost, best_x = min(finished, key=lambda t: t[0])
    lam = TrialParams(
        theta=best_x[0],
        eps0=lo + (best_x[1] - lo) % period,
        eps1=lo + (best_x[2] - lo) % period,
        xi=xi,
    )
    lam = canonicalize(lam)
    avg_ref = (average_l1_to_reference(histograms, reference)
               if reference is not None else None)
    return FitResult(params=lam, cost=best_cost, restarts=len(finished),
                     best_cost=best_cost, median_cost=float(np.median(costs)),
                     avg_l1_reference=avg_ref)


@dataclass(frozen=True)
class LandscapePlane:
    """Two-parameter slice of the cost: fix one of theta/eps0/eps1."""

    fixed: str
    value: float

    def __post_init__(self):
        if self.fixed not in ("theta", "eps0", "eps1"):
            raise InputError(f"unknown parameter {self.fixed!r}")

    @property
    def axes(self) -> tuple[str, str]:
        return {
            "theta": ("eps0", "eps1"),
            "eps1": ("theta", "eps0"),
            "eps0": ("theta", "eps1"),
        }[self.fixed]


@dataclass(frozen=True, eq=False)
class LandscapeResult:
    plane: LandscapePlane
    xs: np.ndarray
    ys: np.ndarray
    grid: np.ndarray  # grid[i, j] = cost at (xs[i], ys[j])
    local_minima: int


def count_strict_minima(grid: np.ndarray) -> int:
    """Strict local minima under 8-neighbor comparison on the torus."""
    is_min = np.ones_like(grid, dtype=bool)
    for dx in (-1, 0, 1):
        for dy in (-1, 0, 1):
            if dx == 0 and dy == 0:
                continue
            is_min &= grid < np.roll(grid, (dx, dy), axis=(0, 1))
    return int(is_min.sum())


def _axis_values(name: str, settings: QpeSettings, resolution: int) -> np.ndarray:
    if name == "theta":
        return np.linspace(0.0, math.pi, resolution, endpoint=False)
    return settings.e_o + np.linspace(0.0, settings.period, resolution,
                                      endpoint=False)


def landscape_scan(histograms, xi: str, table: ExcitationTable,
                   plane: LandscapePlane, resolution: int = 200,
                   measure: str = "l1") -> LandscapeResult:
    """Dense cost evaluation over one parameter plane.

    Both axes are periodic (pi for the angle, one grid period for the
    energies), so minima on the boundary are counted once.
    """
    xi = _normalize_sector(xi)
    grouped = _grouped(histograms, xi)
    settings = next(iter(grouped.values())).settings
    keys = sorted(grouped)
    freqs = np.stack([grouped[key].frequencies for key in keys])  # (pairs, N)
    kidx = np.array([ORBITALS.index(k) for _, k in keys])
    shifts = [s for s, _ in keys]

    def kernels_for(eps_values: np.ndarray) -> np.ndarray:
        # (n_eps, pairs, N)
        return np.stack([
            np.stack([qpe_kernel(e, settings, s) for s in shifts])
            for e in eps_values
        ])

    ax_x, ax_y = plane.axes
    xs = _axis_values(ax_x, settings, resolution)
    ys = _axis_values(ax_y, settings, resolution)
    disc = DISCREPANCIES[measure]

    if plane.fixed == "theta":
        probs = excitation_probs(plane.value, table.s_matrix)[kidx]  # (pairs, 2)
        k0 = kernels_for(xs)
        k1 = kernels_for(ys)
        model = (probs[None, None, :, 0, None] * k0[:, None, :, :]
                 + probs[None, None, :, 1, None] * k1[None, :, :, :])
        grid = 0.5 * np.abs(model - freqs[None, None]).sum(axis=3).mean(axis=2)
        if measure != "l1":
            grid = np.array([[np.mean([disc(model[i, j, p], freqs[p])
                                       for p in range(len(keys))])
                              for j in range(resolution)]
                             for i in range(resolution)])
    else:
        probs = np.stack([excitation_probs(t, table.s_matrix) for t in xs])
        probs = probs[:, kidx, :]  # (n_theta, pairs, 2)
        k_var = kernels_for(ys)
        fixed_eps = plane.value
        k_fix = kernels_for(np.array([fixed_eps]))[0]  # (pairs, N)
        if plane.fixed == "eps1":
            model = (probs[:, None, :, 0, None] * k_var[None, :, :, :]
                     + probs[:, None, :, 1, None] * k_fix[None, None, :, :])
        else:
            model = (probs[:, None, :, 0, None] * k_fix[None, None, :, :]
                     + probs[:, None, :, 1, None] * k_var[None, :, :, :])
        grid = 0.5 * np.abs(model - freqs[None, None]).sum(axis=3).mean(axis=2)
        if measure != "l1":
            grid = np.array([[np.mean([disc(model[i, j, p], freqs[p])
                                       for p in range(len(keys))])
                              for j in range(resolution)]
                             for i in range(resolution)])

    return LandscapeResult(plane=plane, xs=xs, ys=ys, grid=grid,
                           local_minima=count_strict_minima(grid))
