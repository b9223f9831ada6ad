"""Monte Carlo engine for the sampled consensus dynamics, survival-curve
estimation, and decay-rate fitting.

Each sample path runs on its own RNG stream, ``default_rng(seed ^ path_index)``,
and exceedance counts are aggregated as exact integers, so results are
identical for any degree of parallelism, including sequential execution.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .adn_model import (
    ModelParams,
    Snapshot,
    TieBreakRule,
    generate_fastswitch_snapshot,
    generate_snapshot,
    generate_sparse_snapshot,
    snapshot_laplacian,
)
from .graph_core import expm_sym


@dataclass(frozen=True, eq=False)
class SurvivalCurve:
    """Estimated P(sup over k >= K of squared off-consensus norm >= eps),
    indexed by K = 0..k_max. Non-increasing in K by construction."""

    eps: float
    probs: np.ndarray
    paths: int
    fitted_rate: float | None = None


@dataclass(frozen=True)
class DecayFit:
    rate: float
    slope: float
    r_squared: float
    n_points: int
    window: tuple


def project_off_consensus(z) -> np.ndarray:
    """Orthogonal projection onto the complement of the consensus line:
    subtract the mean from every coordinate."""
    z = np.asarray(z, dtype=np.float64)
    return z - z.mean()


def off_consensus_sq(z) -> float:
    """Squared norm of the off-consensus component (the disagreement)."""
    d = project_off_consensus(z)
    return float(d @ d)


def step(z, s: Snapshot, dt: float) -> np.ndarray:
    """One sampling period of the consensus flow: apply the heat kernel of
    the snapshot's Laplacian over dt.

    A single-star snapshot uses the closed-form kernel restricted to the
    m+1 touched coordinates (two scalar sums, O(m) work); multi-star
    snapshots go through the dense symmetric exponential. Snapshots with no
    events leave the state unchanged.
    """
    if not (dt > 0.0):
        raise ValueError(f"step needs dt > 0, got {dt}")
    z = np.asarray(z, dtype=np.float64)
    if len(s.events) == 0:
        return z.copy()
    if len(s.events) == 1:
        e = s.events[0]
        m = e.m
        x = math.exp(-(m + 1) * dt)
        y = math.exp(-dt)
        edge = (1.0 - x) / (m + 1)
        w = (m + x - (m + 1) * y) / (m * (m + 1))
        c = e.center - 1
        idx = np.array(e.neighbors, dtype=np.intp) - 1
        zc = z[c]
        tot = float(z[idx].sum())
        out = z.copy()
        out[c] = (m * x + 1.0) / (m + 1) * zc + edge * tot
        out[idx] = edge * zc + y * z[idx] + w * tot
        return out
    E = expm_sym(snapshot_laplacian(s), dt)
    return E @ z


def _path_norms(p, model, rule, z0, k_max, rng):
    z = z0.copy()
    cur = off_consensus_sq(z)
    norms = np.empty(k_max + 1)
    norms[0] = cur
    dt = p.dt
    for k in range(k_max):
        if model == "sparse":
            s = generate_sparse_snapshot(p, rng)
        elif model == "fastswitch":
            s = generate_fastswitch_snapshot(p, rule, rng)
        else:
            s = generate_snapshot(p, rng)
        if s.events:
            z = step(z, s, dt)
            cur = off_consensus_sq(z)
        norms[k + 1] = cur
    return norms


def _count_exceed(p, model, rule, z0, k_max, eps, seed, lo, hi):
    """Exceedance counts over paths lo..hi-1: for each K, how many paths
    have suffix-max squared disagreement >= eps."""
    counts = np.zeros(k_max + 1, dtype=np.int64)
    for idx in range(lo, hi):
        rng = np.random.default_rng(seed ^ idx)
        norms = _path_norms(p, model, rule, z0, k_max, rng)
        suffix = np.maximum.accumulate(norms[::-1])[::-1]
        counts += suffix >= eps
    return counts


def _count_exceed_args(args):
    return _count_exceed(*args)


def run_paths(
    p: ModelParams,
    model: str,
    rule: TieBreakRule,
    z0,
    k_max: int,
    n_paths: int,
    eps: float,
    seed: int,
    n_jobs: int = 1,
) -> SurvivalCurve:
    """Estimate the survival curve from n_paths independent sample paths.

    Per path: simulate k_max steps from z0, record the squared disagreement
    at every step, take suffix maxima with one backward sweep, and mark for
    each K whether the suffix max reaches eps. probs[K] is the marked
    fraction. Deterministic given the seed for any n_jobs.
    """
    if model not in ("full", "sparse", "fastswitch"):
        raise ValueError(f"unknown model tag {model!r}")
    if k_max < 1 or n_paths < 1:
        raise ValueError(f"need k_max >= 1 and n_paths >= 1, got {k_max}, {n_paths}")
    if not (eps > 0):
        raise ValueError(f"threshold must be > 0, got {eps}")
    if not (p.dt > 0):
        raise ValueError("simulation needs a positive sampling period")
    if model == "sparse":
        p.require_sparse()
    z0 = np.asarray(z0, dtype=np.float64)
    if z0.shape != (p.n,) or not np.isfinite(z0).all():
        raise ValueError(f"initial state must be {p.n} finite values")
    seed = int(seed)
    if not (0 <= seed < 2**64):
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")

    if n_jobs <= 1:
        counts = _count_exceed(p, model, rule, z0, k_max, eps, seed, 0, n_paths)
    else:
        q, r = divmod(n_paths, n_jobs)
        bounds, lo = [], 0
        for j in range(n_jobs):
            hi = lo + q + (1 if j < r else 0)
            if hi > lo:
                bounds.append((lo, hi))
            lo = hi
        jobs = [(p, model, rule, z0, k_max, eps, seed, lo, hi) for lo, hi in bounds]
        with ProcessPoolExecutor(max_workers=len(jobs)) as ex:
            parts = list(ex.map(_count_exceed_args, jobs))
        counts = np.sum(parts, axis=0)
    probs = counts / float(n_paths)
    return SurvivalCurve(eps=eps, probs=probs, paths=n_paths)


def fit_decay_stats(curve: SurvivalCurve, window: tuple | None = None) -> DecayFit:
    """Least-squares geometric fit of the survival curve inside a
    probability window.

    Keeps the K with p_lo < probs[K] < p_hi (dropping the saturated head
    and the noise floor), fits log probs against K, and reports e**slope
    plus the fit's R^2. Default window: (10/paths, 0.95).
    """
    if window is None:
        window = (10.0 / curve.paths, 0.95)
    p_lo, p_hi = window
    probs = np.asarray(curve.probs)
    ks = np.nonzero((probs > p_lo) & (probs < p_hi))[0]
    if len(ks) < 5:
        raise ValueError(
            f"only {len(ks)} curve points fall strictly inside ({p_lo}, {p_hi}); "
            "need at least 5 for a decay fit"
        )
    y = np.log(probs[ks])
    slope, intercept = np.polyfit(ks, y, 1)
    resid = y - (slope * ks + intercept)
    ss_res = float(resid @ resid)
    dy = y - y.mean()
    ss_tot = float(dy @ dy)
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return DecayFit(
        rate=float(np.exp(slope)),
        slope=float(slope),
        r_squared=r2,
        n_points=len(ks),
        window=(float(p_lo), float(p_hi)),
    )


def fit_decay_rate(curve: SurvivalCurve, window: tuple | None = None) -> float:
    """Fitted geometric decay rate of the survival curve (see fit_decay_stats)."""
    return fit_decay_stats(curve, window).rate
