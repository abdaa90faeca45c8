"""1D quasilinear chemotaxis system with nonlinear diffusion and sensitivity.

    u_t = (D(u) u_x - S(u) v_x)_x,   v_t = v_xx - v + u,   zero flux,

with D(u) = (1+u)^(-p) and S(u) = u (1+u)^(-q).  The module time-steps the
system conservatively and instruments it with the classical Lyapunov
functional, the Fisher-type functional/dissipation pair, the S(u)=u
special-case identities, and the a-priori estimate monitors that together
constitute desk-scale evidence for global existence at (p,q)=(2,1).

In every functional, v_t is evaluated from the equation (v_xx - v + u),
never by time differencing: this keeps the dissipation terms pointwise
consistent with the identities being checked.
"""

import math
from dataclasses import dataclass

import numpy as np

from .coeff_models import KSModel
from .errors import (
    ConfigError,
    PositivityLossError,
    StabilityError,
    UsageError,
)
from .fields import Field, Grid, central_diff, integrate, second_diff

DEFAULT_SAFETY = 0.4
DEFAULT_FLOOR = 1e-8
DEFAULT_CEILING = 1e6
_V_NEG_TOL = -1e-14


@dataclass(frozen=True)
class KSParams:
    p: float
    q: float

    def model(self):
        return KSModel(self.p, self.q)

    def check_strict(self):
        """Hypotheses of the entropy-production estimates: p-q=1, q in (1/2,1]."""
        if abs(self.p - self.q - 1.0) > 1e-12:
            raise ConfigError(
                "strict mode requires the critical line p - q = 1, got "
                "p=%g, q=%g" % (self.p, self.q)
            )
        if not (0.5 < self.q <= 1.0):
            raise ConfigError(
                "strict mode requires q in (1/2, 1], got q=%g" % self.q
            )


@dataclass
class KSState:
    u: Field
    v: Field
    time: float = 0.0

    def __post_init__(self):
        if self.u.grid != self.v.grid:
            raise UsageError("u and v must share a grid")
        if self.u.grid.dim != 1:
            raise UsageError("the chemotaxis solver is one-dimensional")


@dataclass
class KSConfig:
    params: KSParams
    grid: Grid
    t_end: float
    mass: float = 1.0
    amplitude: float = 0.5
    safety: float = DEFAULT_SAFETY
    positivity_floor: float = DEFAULT_FLOOR
    ceiling: float = DEFAULT_CEILING
    record_every: int = 1
    strict: bool = False

    def __post_init__(self):
        if self.t_end <= 0.0 or self.mass <= 0.0:
            raise ConfigError("t_end and mass must be positive")
        if not (0.0 < self.safety <= 1.0):
            raise ConfigError("safety must lie in (0, 1]")
        if self.strict:
            self.params.check_strict()


@dataclass
class KSTrajectory:
    times: list
    states: list
    vt_accum: list  # cumulative int_0^t int |v_t|^2 at each snapshot
    dt: float

    @property
    def record_dt(self):
        return self.times[1] - self.times[0]

    def uniform_spacing(self, rtol=1e-9):
        dts = np.diff(self.times)
        return bool(np.all(np.abs(dts - dts[0]) <= rtol * dts[0]))


@dataclass
class KSMonitor:
    """One row of the a-priori estimate monitors."""

    time: float
    mass: float
    lyap_classical: float
    lyap_F: float
    dissipation_D: float
    ep_estimate: float
    lp_norm: float
    log_bound: float
    vt_accum: float
    v_l2: float
    v_l4: float
    dv_l2: float
    dv_l4: float


# ---------------------------------------------------------------------------
# Stepping


def v_time_derivative(state):
    """v_xx - v + u with the mirror second difference."""
    h = state.v.grid.h
    return second_diff(state.v.values, 0, h) - state.v.values + state.u.values


def ks_stable_dt(state, params, safety=DEFAULT_SAFETY):
    """Diffusive guard for both equations plus an advective guard."""
    model = params.model()
    h = state.u.grid.h
    u = state.u.values
    diff_coeff = max(float(np.max(model.D(u))), 1.0)
    dt_diff = safety * h * h / (2.0 * diff_coeff)
    dv = central_diff(state.v.values, 0, h)
    adv = float(np.max(np.abs(model.S(u) * dv)))
    dt_adv = safety * h / (adv + 1e-14)
    return min(dt_diff, dt_adv)


def ks_step(state, params, dt, floor=DEFAULT_FLOOR):
    """One conservative explicit step; aborts on positivity loss.

    The u flux at each interior face combines a diffusive and an advective
    part, both with coefficients at the arithmetic-mean face state; the
    boundary fluxes vanish, so the discrete u-mass telescopes exactly.
    """
    model = params.model()
    grid = state.u.grid
    h = grid.h
    u = state.u.values
    v = state.v.values
    mid = 0.5 * (u[1:] + u[:-1])
    flux = np.asarray(model.D(mid)) * np.diff(u) / h
    flux -= np.asarray(model.S(mid)) * np.diff(v) / h
    div = np.zeros_like(u)
    div[:-1] += flux
    div[1:] -= flux
    u_new = u + (dt / h) * div
    v_new = v + dt * v_time_derivative(state)
    if u_new.min() < floor:
        raise PositivityLossError("cell density lost positivity", last_time=state.time)
    if v_new.min() < _V_NEG_TOL:
        raise PositivityLossError(
            "chemoattractant went negative", last_time=state.time
        )
    return KSState(Field(grid, u_new), Field(grid, np.maximum(v_new, 0.0)),
                   state.time + dt)


def cosine_initial_state(grid, mass, amplitude=0.5):
    """Preset u0 = M (1 + amplitude cos(pi x)) / normalizer, v0 = M."""
    x = grid.axis_centers()
    u_vals = 1.0 + amplitude * np.cos(np.pi * x)
    u_vals *= mass / np.mean(u_vals)
    return KSState(Field(grid, u_vals), Field(grid, np.full(grid.shape, mass)), 0.0)


def run_ks(config, state0=None):
    """Guarded run to t_end with uniformly spaced snapshots.

    Raises PositivityLossError / StabilityError carrying the trajectory
    built so far (the numerical blow-up indicators); otherwise returns a
    complete KSTrajectory.
    """
    state = state0 if state0 is not None else cosine_initial_state(
        config.grid, config.mass, config.amplitude
    )
    dt0 = ks_stable_dt(state, config.params, config.safety)
    block = config.record_every
    n_steps = max(block, block * math.ceil(config.t_end / (dt0 * block)))
    dt = config.t_end / n_steps

    times = [0.0]
    states = [state]
    accum = 0.0
    vt_accum = [0.0]
    grid = state.u.grid
    for k in range(1, n_steps + 1):
        if dt > ks_stable_dt(state, config.params, 1.0):
            raise StabilityError(
                "fixed step exceeds the stability bound",
                last_time=state.time,
                trajectory=KSTrajectory(times, states, vt_accum, dt),
            )
        vt = v_time_derivative(state)
        accum += dt * integrate(Field(grid, vt * vt))
        try:
            state = ks_step(state, config.params, dt, config.positivity_floor)
        except PositivityLossError as err:
            raise PositivityLossError(
                str(err),
                last_time=err.last_time,
                trajectory=KSTrajectory(times, states, vt_accum, dt),
            )
        if state.u.max() > config.ceiling:
            raise StabilityError(
                "density exceeded the blow-up suspicion ceiling",
                last_time=state.time,
                trajectory=KSTrajectory(times, states, vt_accum, dt),
            )
        if k % block == 0:
            times.append(k * dt)
            states.append(state)
            vt_accum.append(accum)
    return KSTrajectory(times, states, vt_accum, dt)


# ---------------------------------------------------------------------------
# Functionals


def classical_lyapunov(state, params):
    """int G(u) - int u v + (1/2) ||v||_H1^2."""
    model = params.model()
    grid = state.u.grid
    u = state.u.values
    v = state.v.values
    g_term = integrate(Field(grid, np.asarray(model.G(u), dtype=float)))
    uv = integrate(Field(grid, u * v))
    dv = central_diff(v, 0, grid.h)
    h1 = integrate(Field(grid, v * v + dv * dv))
    return g_term - uv + 0.5 * h1


def lyapunov_dissipation(state, params):
    """(int |v_t|^2, int S(u) |D/S u_x - v_x|^2)."""
    model = params.model()
    grid = state.u.grid
    h = grid.h
    u = state.u.values
    vt = v_time_derivative(state)
    vt_sq = integrate(Field(grid, vt * vt))
    du = central_diff(u, 0, h)
    dv = central_diff(state.v.values, 0, h)
    drift = np.asarray(model.ratio(u)) * du - dv
    s_term = integrate(Field(grid, np.asarray(model.S(u)) * drift**2))
    return vt_sq, s_term


def functional_F_and_D(state, params):
    """The Fisher-type pair: F = (1/2) int D^2/S |u_x|^2 - int Psi(u) and
    the nonnegative dissipation D built on the drift D/S u_x - v_x."""
    model = params.model()
    grid = state.u.grid
    h = grid.h
    u = state.u.values
    v = state.v.values
    D = np.asarray(model.D(u), dtype=float)
    S = np.asarray(model.S(u), dtype=float)
    du = central_diff(u, 0, h)
    grad_term = 0.5 * integrate(Field(grid, D * D / S * du * du))
    psi_term = integrate(Field(grid, np.asarray(model.psi(u), dtype=float)))
    F = grad_term - psi_term

    vt = v_time_derivative(state)
    flux_field = np.asarray(model.ratio(u)) * du  # gradient-like: odd mirror
    bracket = (
        central_diff(flux_field, 0, h, odd=True)
        - second_diff(v, 0, h)
        + 0.5 * (v + vt)
    )
    Dfun = integrate(Field(grid, S * D * bracket**2))
    return F, Dfun


def _entro_prod_sources(state, params):
    """Right-hand side of the entropy-production identity."""
    model = params.model()
    grid = state.u.grid
    h = grid.h
    u = state.u.values
    v = state.v.values
    D = np.asarray(model.D(u), dtype=float)
    S = np.asarray(model.S(u), dtype=float)
    vt = v_time_derivative(state)
    quarter = integrate(Field(grid, S * D * (v + vt) ** 2 / 4.0))
    du = central_diff(u, 0, h)
    dv = central_diff(v, 0, h)
    drift = np.asarray(model.ratio(u)) * du - dv
    s2 = np.asarray(model.S_second(u), dtype=float)
    curvature = integrate(
        Field(grid, drift * D * D * s2 / (2.0 * S) * du**3)
    )
    return quarter, curvature


def _interval_residuals(traj, value_fn, source_fn):
    """Centered d(value)/dt plus the midpoint mean of the sources."""
    if len(traj.times) < 3:
        raise UsageError("need at least 3 snapshots")
    if not traj.uniform_spacing():
        raise UsageError("snapshot spacing must be uniform")
    dt = traj.record_dt
    values = [value_fn(s) for s in traj.states]
    sources = [source_fn(s) for s in traj.states]
    out = []
    for k in range(len(values) - 1):
        dval = (values[k + 1] - values[k]) / dt
        mean_src = 0.5 * (sources[k] + sources[k + 1])
        out.append(dval + mean_src)
    return out


def lyapunov_identity_residual(traj, params):
    """Residual of d/dt L + int |v_t|^2 + int S |D/S u_x - v_x|^2 = 0."""

    def src(state):
        vt_sq, s_term = lyapunov_dissipation(state, params)
        return vt_sq + s_term

    return _interval_residuals(
        traj, lambda s: classical_lyapunov(s, params), src
    )


def entro_prod_residual(traj, params):
    """Residual of d/dt F + D = quarter-term + curvature-term."""

    def value(state):
        return functional_F_and_D(state, params)[0]

    def src(state):
        Dfun = functional_F_and_D(state, params)[1]
        quarter, curvature = _entro_prod_sources(state, params)
        return Dfun - quarter - curvature

    return _interval_residuals(traj, value, src)


# ---------------------------------------------------------------------------
# S(u) = u special case, (p, q) = (p, 0)


def _check_s1(params):
    if abs(params.q) > 1e-12:
        raise UsageError("the S(u)=u identities require q = 0")


def _s1_pieces(state, params):
    model = params.model()
    grid = state.u.grid
    h = grid.h
    u = state.u.values
    v = state.v.values
    D = np.asarray(model.D(u), dtype=float)
    du = central_diff(u, 0, h)
    A = 0.5 * integrate(Field(grid, D * D / u * du * du))
    flux_field = D / u * du
    dflux = central_diff(flux_field, 0, h, odd=True)
    B = integrate(Field(grid, u * D * dflux**2))
    vxx = second_diff(v, 0, h)
    C = integrate(Field(grid, u * D * vxx * dflux))
    vt = v_time_derivative(state)
    bracket = dflux - vxx + 0.5 * (v + vt)
    G = integrate(Field(grid, u * D * bracket**2))
    quarter = integrate(Field(grid, u * D * (v + vt) ** 2 / 4.0))
    # int_1^u D(s) ds in closed form for D = (1+s)^(-p)
    p = params.p
    if abs(p - 1.0) <= 1e-12:
        d_primitive = np.log((1.0 + u) / 2.0)
    else:
        d_primitive = ((1.0 + u) ** (1.0 - p) - 2.0 ** (1.0 - p)) / (1.0 - p)
    F_s1 = A - integrate(Field(grid, u * d_primitive))
    return A, B, C, F_s1, G, quarter


def s1_functional_identity(traj, params):
    """Residuals of the two S(u)=u identities.

    Returns (lemma_series, remark_series): the first checks
    d/dt A + B = C with A the weighted gradient energy, the second checks
    d/dt F + G = quarter-term.
    """
    _check_s1(params)
    pieces = [_s1_pieces(s, params) for s in traj.states]
    if len(pieces) < 3:
        raise UsageError("need at least 3 snapshots")
    if not traj.uniform_spacing():
        raise UsageError("snapshot spacing must be uniform")
    dt = traj.record_dt
    lemma, remark = [], []
    for k in range(len(pieces) - 1):
        A0, B0, C0, F0, G0, q0 = pieces[k]
        A1, B1, C1, F1, G1, q1 = pieces[k + 1]
        lemma.append((A1 - A0) / dt + 0.5 * (B0 + B1) - 0.5 * (C0 + C1))
        remark.append((F1 - F0) / dt + 0.5 * (G0 + G1) - 0.5 * (q0 + q1))
    return lemma, remark


def s1_nonneg_dissipation(state, params):
    """The square-integrand G of the remark identity (bit-exactly >= 0)."""
    _check_s1(params)
    return _s1_pieces(state, params)[4]


# ---------------------------------------------------------------------------
# A-priori estimate monitors


def _lp(vals, grid, r):
    return integrate(Field(grid, np.abs(vals) ** r)) ** (1.0 / r)


def measure_monitors(traj, params, strict=True, fisher=True):
    """KSMonitor series along a trajectory.

    With strict=True the (p, q) hypotheses of the estimates are enforced;
    free mode evaluates whatever is well defined and reports it.
    fisher=False skips the Fisher-type pair (whose Psi primitive needs
    nested quadrature off the critical line) and reports nan for it.
    """
    if strict:
        params.check_strict()
    out = []
    for t, state, acc in zip(traj.times, traj.states, traj.vt_accum):
        grid = state.u.grid
        h = grid.h
        u = state.u.values
        v = state.v.values
        du = central_diff(u, 0, h)
        dv = central_diff(v, 0, h)
        if fisher:
            F, Dfun = functional_F_and_D(state, params)
        else:
            F = Dfun = float("nan")
        out.append(
            KSMonitor(
                time=t,
                mass=integrate(state.u),
                lyap_classical=classical_lyapunov(state, params),
                lyap_F=F,
                dissipation_D=Dfun,
                ep_estimate=integrate(
                    Field(grid, du**2 / (u * (1.0 + u) ** (params.p + 1.0)))
                ),
                lp_norm=integrate(Field(grid, u**params.p)),
                log_bound=float(np.max(np.abs(np.log1p(u)))),
                vt_accum=acc,
                v_l2=_lp(v, grid, 2.0),
                v_l4=_lp(v, grid, 4.0),
                dv_l2=_lp(dv, grid, 2.0),
                dv_l4=_lp(dv, grid, 4.0),
            )
        )
    return out


def lp_inequality_residuals(traj, params):
    """Per-interval slack of the discrete L^p differential inequality.

    Nonpositive entries mean the inequality holds on that interval; the
    tolerance for a verdict is left to the caller.
    """
    p = params.p
    if len(traj.times) < 2:
        raise UsageError("need at least 2 snapshots")
    dt = traj.record_dt

    def pieces(state):
        grid = state.u.grid
        u = state.u.values
        du = central_diff(u, 0, grid.h)
        vt = v_time_derivative(state)
        lp = integrate(Field(grid, u**p))
        grad = integrate(Field(grid, u ** (p - 2.0) * (1.0 + u) ** (-p) * du**2))
        usq = integrate(Field(grid, u * u))
        vtsq = integrate(Field(grid, vt * vt))
        return lp, grad, usq, vtsq

    vals = [pieces(s) for s in traj.states]
    c = p * (p - 1.0)
    out = []
    for k in range(len(vals) - 1):
        lp0, g0, us0, vt0 = vals[k]
        lp1, g1, us1, vt1 = vals[k + 1]
        lhs = (lp1 - lp0) / dt + c * 0.5 * (g0 + g1)
        rhs = 1.5 * c * 0.5 * (us0 + us1) + 0.5 * c * 0.5 * (vt0 + vt1)
        out.append(lhs - rhs)
    return out
