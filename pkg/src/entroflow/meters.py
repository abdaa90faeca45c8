"""Entropy / Fisher-information functionals and identity residuals.

Along the flow u_t = (a(u) u_x)_x the entropy integral dissipates the
Fisher functional, and the Fisher functional dissipates the square of the
derivative of u^{-1/2} d_x Sigma(u).  Both statements are exact for
classical solutions; here they are verified as residuals that must vanish
at second order under simultaneous grid/time refinement.
"""

from dataclasses import dataclass

import numpy as np

from .errors import UsageError
from .fields import Field, central_diff, integrate, require_positive_field


@dataclass(frozen=True)
class MeterRecord:
    """The four functionals evaluated on one snapshot."""

    entropy: float          # int H(u)
    fisher_sigma: float     # int |d_x Sigma(u)|^2
    fisher_st: float        # int u |d_x Lambda(u)|^2
    dissipation: float      # int u a(u) |d_x(u^{-1/2} d_x Sigma(u))|^2


@dataclass
class ResidualSeries:
    """Per-interval residuals of the two flow identities."""

    r_entropy: list
    r_fisher: list
    h: float
    dt: float


@dataclass
class MonotonicityReport:
    passed: bool
    worst_violation: float
    tolerance_scale: float


def measure(u, model):
    """Evaluate all four functionals on a positive field."""
    require_positive_field(u)
    grid = u.grid
    h = grid.h
    vals = u.values
    a_vals = np.asarray(model.a(vals), dtype=float)

    entropy = integrate(Field(grid, np.asarray(model.entropy_density(vals))))

    sig = np.asarray(model.sigma(vals), dtype=float)
    dsig = central_diff(sig, 0, h)
    fisher_sigma = integrate(Field(grid, dsig**2))

    lam = np.asarray(model.lam(vals), dtype=float)
    dlam = central_diff(lam, 0, h)
    fisher_st = integrate(Field(grid, vals * dlam**2))

    # inner field u^{-1/2} d_x Sigma(u) is gradient-like: odd mirror
    inner = dsig / np.sqrt(vals)
    dinner = central_diff(inner, 0, h, odd=True)
    dissipation = integrate(Field(grid, vals * a_vals * dinner**2))

    return MeterRecord(entropy, fisher_sigma, fisher_st, dissipation)


def measure_trajectory(traj, model):
    """Attach a MeterRecord per snapshot; returns the list."""
    traj.meters = [measure(u, model) for u in traj.fields]
    return traj.meters


def _require_uniform(traj, min_snapshots):
    if len(traj.times) < min_snapshots:
        raise UsageError("need at least %d snapshots" % min_snapshots)
    if not traj.uniform_spacing():
        raise UsageError("snapshot spacing must be uniform")


def identity_residuals(traj, model):
    """Centered-in-time residuals of the entropy and Fisher identities.

    Per recording interval,
        R1 = d(int H)/dt + mean fisher_sigma,
        R2 = (1/2) d(fisher_sigma)/dt + mean dissipation,
    with the time difference centered at the interval midpoint, so both
    residuals are O(dt_record^2) + O(h^2) + O(dt).
    """
    _require_uniform(traj, 3)
    meters = traj.meters or measure_trajectory(traj, model)
    dt = traj.record_dt
    r1, r2 = [], []
    for lo, hi in zip(meters, meters[1:]):
        r1.append((hi.entropy - lo.entropy) / dt + 0.5 * (lo.fisher_sigma + hi.fisher_sigma))
        r2.append(
            0.5 * (hi.fisher_sigma - lo.fisher_sigma) / dt
            + 0.5 * (lo.dissipation + hi.dissipation)
        )
    return ResidualSeries(r1, r2, h=traj.fields[0].grid.h, dt=dt)


def monotone_tolerance(h, dt):
    """Scale of the acceptable per-interval monotonicity violation."""
    return 10.0 * (h * h + dt)


def monotonicity_report(series, h, dt):
    """Check a functional series is non-increasing within tolerance.

    Each increment must satisfy delta <= 10 (h^2 + dt) |value|; the
    violation must vanish under refinement, which the tests encode.
    """
    scale = monotone_tolerance(h, dt)
    worst = 0.0
    ok = True
    for lo, hi in zip(series, series[1:]):
        tol = scale * max(abs(lo), abs(hi), 1e-30)
        excess = (hi - lo) - tol
        worst = max(worst, excess)
        if excess > 0.0:
            ok = False
    return MonotonicityReport(ok, worst, scale)


def convexity_check(traj, model=None):
    """Second time differences of the entropy integral are >= -tol."""
    _require_uniform(traj, 4)
    meters = traj.meters
    if meters is None or not meters:
        if model is None:
            raise UsageError("trajectory has no meters and no model was given")
        meters = measure_trajectory(traj, model)
    ent = [m.entropy for m in meters]
    h = traj.fields[0].grid.h
    dt = traj.record_dt
    scale = monotone_tolerance(h, dt) * max(max(abs(e) for e in ent), 1e-30)
    second = [b - 2.0 * m + a for a, m, b in zip(ent, ent[1:], ent[2:])]
    worst = min(second) if second else 0.0
    return MonotonicityReport(worst >= -scale, max(0.0, -worst - scale), scale)


def meters_to_rows(traj):
    """CSV rows t, entropy, fisher_sigma, fisher_st, dissipation[, r1, r2]."""
    if not traj.meters:
        raise UsageError("measure the trajectory first")
    rows = []
    for t, m in zip(traj.times, traj.meters):
        rows.append((t, m.entropy, m.fisher_sigma, m.fisher_st, m.dissipation))
    return rows
