"""Explicit conservative time-stepping for u_t = (a(u) u_x)_x on (0,1).

Conservative flux form with zero boundary fluxes keeps the discrete mass
bit-exact; positivity is enforced by aborting the run rather than
clamping, since clamping would silently break every identity this
package exists to verify.
"""

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import ModelError, PositivityLossError, StabilityError, UsageError
from .fields import Field, Grid

DEFAULT_SAFETY = 0.4
DEFAULT_FLOOR = 1e-8


@dataclass
class FlowConfig:
    model: object
    grid: Grid
    t_end: float
    safety: float = DEFAULT_SAFETY
    positivity_floor: float = DEFAULT_FLOOR
    record_every: int = 1

    def __post_init__(self):
        if self.t_end <= 0.0:
            raise UsageError("t_end must be positive")
        if not (0.0 < self.safety <= 1.0):
            raise UsageError("safety must lie in (0, 1]")
        if self.positivity_floor <= 0.0:
            raise UsageError("positivity floor must be positive")
        if self.grid.dim != 1:
            raise UsageError("flows are one-dimensional")
        if self.record_every < 1:
            raise UsageError("record_every must be >= 1")


@dataclass
class Trajectory:
    """Time-ordered snapshots of a run, with per-snapshot meters.

    Immutable by convention once returned from a run; meters are attached
    afterwards by the measuring code.
    """

    times: list
    fields: list
    dt: float
    meters: list = dc_field(default_factory=list)

    def __post_init__(self):
        if len(self.times) != len(self.fields):
            raise UsageError("snapshot count must match time count")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise UsageError("times must be strictly increasing")

    @property
    def record_dt(self):
        return self.times[1] - self.times[0]

    def uniform_spacing(self, rtol=1e-9):
        dts = np.diff(self.times)
        return bool(np.all(np.abs(dts - dts[0]) <= rtol * dts[0]))


def stable_dt(u, model, safety=DEFAULT_SAFETY):
    """safety * h^2 / (2 max a(u)): the explicit-scheme stability guard."""
    a_vals = np.asarray(model.a(u.values), dtype=float)
    if not np.all(np.isfinite(a_vals)):
        raise ModelError("coefficient evaluated non-finite on the state")
    h = u.grid.h
    return safety * h * h / (2.0 * float(a_vals.max()))


def _face_flux(u_vals, model, h):
    """a at the arithmetic-mean face state times the face difference."""
    mid = 0.5 * (u_vals[1:] + u_vals[:-1])
    return np.asarray(model.a(mid), dtype=float) * np.diff(u_vals) / h


def step(u, model, dt, floor=DEFAULT_FLOOR):
    """One conservative explicit Euler step; aborts on positivity loss."""
    h = u.grid.h
    flux = _face_flux(u.values, model, h)
    div = np.zeros_like(u.values)
    div[:-1] += flux
    div[1:] -= flux
    new_vals = u.values + (dt / h) * div
    if new_vals.min() < floor:
        raise PositivityLossError(
            "state dropped below the positivity floor", last_time=None
        )
    return Field(u.grid, new_vals)


def run(u0, config):
    """Guarded explicit run to t_end with uniformly spaced snapshots.

    The step size is fixed from the initial state, rounded so that t_end
    is a whole number of recording intervals; every step re-checks the
    safety-1 stability bound and aborts if the fixed dt violates it.
    """
    if u0.min() <= config.positivity_floor:
        raise PositivityLossError("initial state below floor", last_time=0.0)
    dt0 = stable_dt(u0, config.model, config.safety)
    block = config.record_every
    n_steps = max(block, block * math.ceil(config.t_end / (dt0 * block)))
    dt = config.t_end / n_steps

    times = [0.0]
    snaps = [u0.copy()]
    u = u0
    t = 0.0
    for k in range(1, n_steps + 1):
        if dt > stable_dt(u, config.model, 1.0):
            raise StabilityError(
                "fixed step exceeds the stability bound", last_time=t,
                trajectory=Trajectory(times, snaps, dt),
            )
        try:
            u = step(u, config.model, dt, config.positivity_floor)
        except PositivityLossError:
            raise PositivityLossError(
                "positivity lost at t=%g" % t, last_time=t,
                trajectory=Trajectory(times, snaps, dt),
            )
        t = k * dt
        if k % block == 0:
            times.append(t)
            snaps.append(u.copy())
    return Trajectory(times, snaps, dt)


def initial_cosine(grid, mean=1.0, amplitude=0.5, mode=1):
    """Preset initial datum mean * (1 + amplitude cos(mode pi x)), mass-exact.

    The discrete midpoint sum of cos(k pi x) over symmetric cell centers
    vanishes, so the discrete mass equals ``mean`` exactly.
    """
    x = grid.axis_centers()
    vals = 1.0 + amplitude * np.cos(mode * np.pi * x)
    vals *= mean / (np.mean(vals))
    return Field(grid, vals)
