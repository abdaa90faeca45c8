"""Catalog of diffusion nonlinearities a(s) and their primitive functionals.

Each model evaluates the primitives

    Lambda(s) = int_1^s a(t)/t dt        (log-type potential)
    H(s)      = int_1^s Lambda(t) dt     (entropy density)
    Sigma(s)  = int_1^s a(t)/sqrt(t) dt  (Fisher coordinate)
    F(s)      = int_0^s a(t) dt          (flux primitive)

in closed form where one exists and by adaptive Simpson quadrature
otherwise.  The lower integration limit is 1 for Lambda, H, Sigma (and for
the chemotaxis primitives G, Psi) and 0 for F; no re-normalization is
applied.

Models are immutable after construction and safe to share across workers.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ModelError
from .quadrature import adaptive_simpson

# Log-spaced probe grid used for structural checks at construction time.
_PROBE = np.geomspace(1e-6, 1e6, 61)


@dataclass(frozen=True)
class Primitives:
    """Values of the four primitive functionals at one state."""

    lam: float
    entropy_density: float
    sigma: float
    flux_primitive: float


def _require_positive(s):
    arr = np.asarray(s, dtype=float)
    if np.any(arr <= 0.0) or not np.all(np.isfinite(arr)):
        raise DomainError("state must be positive and finite, got %r" % (s,))
    return arr


class CoeffModel:
    """Base class: a positive C^1 diffusion coefficient a(s) on (0, inf)."""

    family = "custom"

    # -- coefficient -----------------------------------------------------

    def a(self, s):
        raise NotImplementedError

    def a_prime(self, s):
        raise NotImplementedError

    # -- primitives (quadrature fallbacks; subclasses override with
    #    closed forms where available) ----------------------------------

    def lam(self, s):
        return self._vectorize(self._lam_quad, s)

    def entropy_density(self, s):
        return self._vectorize(self._entropy_quad, s)

    def sigma(self, s):
        return self._vectorize(self._sigma_quad, s)

    def flux_primitive(self, s):
        return self._vectorize(self._flux_quad, s)

    # -- quadrature paths, also used for closed-form cross-checks --------

    def _lam_quad(self, s):
        return adaptive_simpson(lambda t: self.a(t) / t, 1.0, s)

    def _entropy_quad(self, s):
        # Integration by parts: int_1^s Lambda = s Lambda(s) - int_1^s a,
        # which avoids nesting one adaptive quadrature inside another.
        return s * self._lam_quad(s) - adaptive_simpson(lambda t: self.a(t), 1.0, s)

    def _sigma_quad(self, s):
        return adaptive_simpson(lambda t: self.a(t) / math.sqrt(t), 1.0, s)

    def _flux_quad(self, s):
        # Substituting t = x^2 regularizes integrable power singularities of
        # a at 0 up to t^(-1/2); the lower limit is nudged off 0 so the
        # 0 * inf endpoint never gets evaluated (bias < 1e-12 * max a).
        return adaptive_simpson(
            lambda x: 2.0 * x * self.a(x * x), 1e-12, math.sqrt(s)
        )

    def primitives_by_quadrature(self, s):
        """Quadrature-only evaluation, independent of any closed form."""
        s = float(_require_positive(s))
        return Primitives(
            lam=self._lam_quad(s),
            entropy_density=self._entropy_quad(s),
            sigma=self._sigma_quad(s),
            flux_primitive=self._flux_quad(s),
        )

    @staticmethod
    def _vectorize(fn, s):
        arr = _require_positive(s)
        if arr.ndim == 0:
            return fn(float(arr))
        out = np.empty(arr.shape)
        flat = arr.ravel()
        res = out.ravel()
        for i in range(flat.size):
            res[i] = fn(float(flat[i]))
        return out

    def _check_positive_coefficient(self):
        vals = np.asarray(self.a(_PROBE), dtype=float)
        if np.any(vals <= 0.0) or not np.all(np.isfinite(vals)):
            raise ModelError(
                "coefficient must be positive on (0, inf); "
                "violated on the probe grid for %s" % self
            )


class Linear(CoeffModel):
    """a(s) = 1: the linear heat equation."""

    family = "linear"

    def __repr__(self):
        return "Linear()"

    def a(self, s):
        return np.ones_like(np.asarray(s, dtype=float))

    def a_prime(self, s):
        return np.zeros_like(np.asarray(s, dtype=float))

    def lam(self, s):
        return np.log(_require_positive(s))

    def entropy_density(self, s):
        s = _require_positive(s)
        return s * np.log(s) - s + 1.0

    def sigma(self, s):
        return 2.0 * (np.sqrt(_require_positive(s)) - 1.0)

    def flux_primitive(self, s):
        return np.asarray(s, dtype=float) + 0.0


class PowerLaw(CoeffModel):
    """a(s) = m s^(m-1), m > 0 (porous-medium / fast-diffusion scale)."""

    family = "power_law"

    def __init__(self, m):
        if m <= 0.0:
            raise ModelError("PowerLaw requires m > 0 for a positive coefficient")
        self.m = float(m)
        self._check_positive_coefficient()

    def __repr__(self):
        return "PowerLaw(m=%g)" % self.m

    def a(self, s):
        return self.m * np.asarray(s, dtype=float) ** (self.m - 1.0)

    def a_prime(self, s):
        return self.m * (self.m - 1.0) * np.asarray(s, dtype=float) ** (self.m - 2.0)

    def lam(self, s):
        s = _require_positive(s)
        m = self.m
        if m == 1.0:
            return np.log(s)
        return m * (s ** (m - 1.0) - 1.0) / (m - 1.0)

    def entropy_density(self, s):
        s = _require_positive(s)
        m = self.m
        if m == 1.0:
            return s * np.log(s) - s + 1.0
        return (s**m - 1.0) / (m - 1.0) - m * (s - 1.0) / (m - 1.0)

    def sigma(self, s):
        s = _require_positive(s)
        m = self.m
        if m == 0.5:
            return 0.5 * np.log(s)
        return m * (s ** (m - 0.5) - 1.0) / (m - 0.5)

    def flux_primitive(self, s):
        return np.asarray(s, dtype=float) ** self.m


class ShiftedPowerLaw(CoeffModel):
    """a(s) = m (1+s)^(m-1), m > 0: non-degenerate at s = 0."""

    family = "shifted_power_law"

    def __init__(self, m):
        if m <= 0.0:
            raise ModelError("ShiftedPowerLaw requires m > 0")
        self.m = float(m)
        self._check_positive_coefficient()

    def __repr__(self):
        return "ShiftedPowerLaw(m=%g)" % self.m

    def a(self, s):
        return self.m * (1.0 + np.asarray(s, dtype=float)) ** (self.m - 1.0)

    def a_prime(self, s):
        return (
            self.m
            * (self.m - 1.0)
            * (1.0 + np.asarray(s, dtype=float)) ** (self.m - 2.0)
        )

    # Lambda, H, Sigma keep the quadrature path; only F closes.

    def flux_primitive(self, s):
        s = _require_positive(s)
        return (1.0 + s) ** self.m - 1.0


class TabulatedModel(CoeffModel):
    """Custom model built from a (s, a(s)[, a'(s)]) table.

    The coefficient is interpolated monotone-cubically; a missing a' column
    is filled from the interpolant's derivative.  A supplied a' column is
    cross-checked against centrally differenced a at load: relative
    mismatch above 1e-4 rejects the model.  Evaluation outside the table
    range is a domain error.
    """

    family = "custom"

    _APRIME_RTOL = 1e-4

    def __init__(self, s_knots, a_knots, a_prime_knots=None):
        from scipy.interpolate import PchipInterpolator

        s_knots = np.asarray(s_knots, dtype=float)
        a_knots = np.asarray(a_knots, dtype=float)
        if s_knots.ndim != 1 or s_knots.size < 4:
            raise ModelError("table needs at least 4 knots")
        if np.any(np.diff(s_knots) <= 0.0):
            raise ModelError("table knots must be strictly increasing")
        if np.any(s_knots <= 0.0):
            raise ModelError("table knots must be positive")
        if np.any(a_knots <= 0.0):
            raise ModelError("tabulated coefficient must be positive")
        self.s_knots = s_knots
        self.a_knots = a_knots
        self._interp = PchipInterpolator(s_knots, a_knots)
        if a_prime_knots is None:
            self.a_prime_knots = self._interp.derivative()(s_knots)
        else:
            a_prime_knots = np.asarray(a_prime_knots, dtype=float)
            diffed = np.gradient(a_knots, s_knots)
            scale = np.maximum(np.abs(a_prime_knots), np.abs(diffed))
            scale = np.maximum(scale, 1e-30)
            # Endpoints of np.gradient are one-sided and first order;
            # check the interior knots only.
            mismatch = np.abs(a_prime_knots - diffed)[1:-1] / scale[1:-1]
            if np.max(mismatch) > self._APRIME_RTOL:
                raise ModelError(
                    "tabulated a' disagrees with differenced a "
                    "(max relative mismatch %.3g)" % np.max(mismatch)
                )
            self.a_prime_knots = a_prime_knots
        self._interp_prime = PchipInterpolator(s_knots, self.a_prime_knots)

    @classmethod
    def from_csv(cls, path):
        rows = []
        with open(path, newline="") as fh:
            for row in csv.reader(fh):
                if not row or row[0].lstrip().startswith("#"):
                    continue
                try:
                    rows.append([float(c) for c in row])
                except ValueError:
                    continue  # header line
        if not rows:
            raise ModelError("no numeric rows in table %s" % path)
        cols = list(zip(*rows))
        if len(cols) == 2:
            return cls(cols[0], cols[1])
        if len(cols) == 3:
            return cls(cols[0], cols[1], cols[2])
        raise ModelError("table must have 2 or 3 columns, got %d" % len(cols))

    def __repr__(self):
        return "TabulatedModel(%d knots on [%g, %g])" % (
            self.s_knots.size,
            self.s_knots[0],
            self.s_knots[-1],
        )

    def _clip_check(self, s):
        s = _require_positive(s)
        if np.any(s < self.s_knots[0]) or np.any(s > self.s_knots[-1]):
            raise DomainError("state outside tabulated range")
        return s

    def a(self, s):
        vals = self._interp(self._clip_check(s))
        if np.any(np.asarray(vals) <= 0.0):
            raise ModelError("interpolated coefficient is nonpositive")
        return vals

    def a_prime(self, s):
        return self._interp_prime(self._clip_check(s))


class PrimitiveCache:
    """Opt-in memoization of the primitives on a sorted knot set.

    Values are precomputed at the knots and interpolated monotone-cubically
    in between.  Intended for hot loops over quadrature-backed models; the
    default everywhere else is direct evaluation.  Concurrent reads are
    safe once constructed.
    """

    def __init__(self, model, knots):
        from scipy.interpolate import PchipInterpolator

        knots = np.sort(np.asarray(knots, dtype=float))
        if knots.size < 4:
            raise ModelError("cache needs at least 4 knots")
        _require_positive(knots)
        self.model = model
        self.knots = knots
        self._lam = PchipInterpolator(knots, model.lam(knots))
        self._entropy = PchipInterpolator(knots, model.entropy_density(knots))
        self._sigma = PchipInterpolator(knots, model.sigma(knots))
        self._flux = PchipInterpolator(knots, model.flux_primitive(knots))

    def _check(self, s):
        s = _require_positive(s)
        if np.any(s < self.knots[0]) or np.any(s > self.knots[-1]):
            raise DomainError("state outside cached knot range")
        return s

    def lam(self, s):
        return self._lam(self._check(s))

    def entropy_density(self, s):
        return self._entropy(self._check(s))

    def sigma(self, s):
        return self._sigma(self._check(s))

    def flux_primitive(self, s):
        return self._flux(self._check(s))


# ---------------------------------------------------------------------------
# Spec-level operations


def eval_coefficient(model, s):
    """a(s) for a positive scalar state."""
    s = float(_require_positive(s))
    val = float(model.a(s))
    if not math.isfinite(val) or val <= 0.0:
        raise ModelError("coefficient evaluated nonpositive at s=%g" % s)
    return val


def eval_primitives(model, s):
    """All four primitive functionals at a positive scalar state."""
    s = float(_require_positive(s))
    return Primitives(
        lam=float(model.lam(s)),
        entropy_density=float(model.entropy_density(s)),
        sigma=float(model.sigma(s)),
        flux_primitive=float(model.flux_primitive(s)),
    )


def model_from_spec(spec):
    """Build a model from a config-file block.

    Recognized keys: family in {linear, power_law, shifted_power_law,
    custom}; ``m`` for the power families; ``table`` path for custom.
    """
    family = spec.get("family")
    if family == "linear":
        return Linear()
    if family == "power_law":
        return PowerLaw(spec["m"])
    if family == "shifted_power_law":
        return ShiftedPowerLaw(spec["m"])
    if family == "custom":
        return TabulatedModel.from_csv(spec["table"])
    raise ModelError("unknown model family %r" % (family,))


# ---------------------------------------------------------------------------
# Keller-Segel coefficient pair D(s) = (1+s)^(-p), S(s) = s (1+s)^(-q)


@dataclass(frozen=True)
class KSCoeffs:
    """Chemotaxis coefficients and their primitives at one state."""

    p: float
    q: float
    diffusion: float
    sensitivity: float
    ratio_primitive: float
    double_primitive: float
    psi: float
    sigma_ds: float


class KSModel:
    """Vectorized evaluation of the chemotaxis coefficient pair.

    On the critical line p - q = 1 the ratio D/S collapses to
    1/(tau (1+tau)) and the primitives close; elsewhere they fall back to
    (nested) adaptive quadrature.
    """

    _CRIT_TOL = 1e-12

    def __init__(self, p, q):
        self.p = float(p)
        self.q = float(q)

    @property
    def critical(self):
        return abs(self.p - self.q - 1.0) <= self._CRIT_TOL

    def D(self, s):
        return (1.0 + np.asarray(s, dtype=float)) ** (-self.p)

    def S(self, s):
        s = np.asarray(s, dtype=float)
        return s * (1.0 + s) ** (-self.q)

    def S_prime(self, s):
        s = np.asarray(s, dtype=float)
        q = self.q
        return (1.0 + s) ** (-q - 1.0) * (1.0 + s - q * s)

    def S_second(self, s):
        s = np.asarray(s, dtype=float)
        q = self.q
        return (1.0 + s) ** (-q - 2.0) * (q * (q - 1.0) * s - 2.0 * q)

    def ratio(self, s):
        """D(s)/S(s); requires s > 0."""
        s = _require_positive(s)
        return (1.0 + s) ** (self.q - self.p) / s

    def ratio_primitive(self, s):
        """int_1^s D/S; closed form log(2s/(1+s)) on the critical line."""
        s = _require_positive(s)
        if self.critical:
            return np.log(2.0 * s / (1.0 + s))
        return CoeffModel._vectorize(
            lambda x: adaptive_simpson(lambda t: float(self.ratio(t)), 1.0, x), s
        )

    def G(self, s):
        """Double primitive int_1^s int_1^sigma D/S."""
        s = _require_positive(s)
        if self.critical:
            return (
                s * np.log(2.0 * s) - (1.0 + s) * np.log(1.0 + s) + math.log(2.0)
            )
        return CoeffModel._vectorize(
            lambda x: adaptive_simpson(
                lambda sig: float(self.ratio_primitive(sig)), 1.0, x, tol=1e-11
            ),
            s,
        )

    def _psi_inner(self, r):
        """int_1^r tau D S'/S dtau + r D(r), the integrand defining Psi."""

        def g(t):
            return float(t * self.D(t) * self.S_prime(t) / self.S(t))

        return adaptive_simpson(g, 1.0, r) + float(r * self.D(r))

    def psi(self, s):
        """Psi(s): double primitive from the entropy-production identity."""
        s = np.asarray(s, dtype=float)
        if np.any(s < 0.0):
            raise DomainError("Psi requires a nonnegative state")
        if self.critical:
            return self._psi_critical(s)
        return CoeffModel._vectorize(
            lambda x: adaptive_simpson(self._psi_inner, 1.0, x, tol=1e-11),
            np.maximum(s, 1e-300),
        )

    def _psi_critical(self, s):
        # On p - q = 1 the inner integrand is
        #   (1+t)^(-p-1) (1 + (2-p) t) = (2-p)(1+t)^(-p) + (p-1)(1+t)^(-p-1)
        # so both layers integrate in closed form.
        p = self.p
        w = 1.0 + s

        def I(alpha, x):  # int_1^s (1+r)^alpha dr, elementwise
            if alpha == -1.0:
                return np.log(x) - math.log(2.0)
            return (x ** (alpha + 1.0) - 2.0 ** (alpha + 1.0)) / (alpha + 1.0)

        # r D(r) = (1+r)^(1-p) - (1+r)^(-p)
        rD = I(1.0 - p, w) - I(-p, w)
        if p == 1.0:
            # inner(r) reduces to log((1+r)/2)
            outer_log = w * (np.log(w) - 1.0) - 2.0 * (math.log(2.0) - 1.0)
            return outer_log - math.log(2.0) * (s - 1.0) + rD
        # inner(r) = c1 ((1+r)^(1-p) - 2^(1-p)) + c2 ((1+r)^(-p) - 2^(-p))
        c1 = (2.0 - p) / (1.0 - p)
        c2 = -(p - 1.0) / p
        const = -(c1 * 2.0 ** (1.0 - p) + c2 * 2.0 ** (-p))
        outer_inner = c1 * I(1.0 - p, w) + c2 * I(-p, w) + const * (s - 1.0)
        return outer_inner + rD

    def sigma_ds(self, s):
        """int_1^s D/sqrt(S), the Fisher coordinate for the pair."""
        s = _require_positive(s)

        def g(t):
            return float(self.D(t) / math.sqrt(self.S(t)))

        return CoeffModel._vectorize(
            lambda x: adaptive_simpson(g, 1.0, x), s
        )


def eval_ks(p, q, s):
    """All chemotaxis coefficient values and primitives at one state.

    s = 0 is allowed for the pointwise coefficients but not for the
    primitives with singular integrands (ratio_primitive, G, sigma_ds).
    """
    model = KSModel(p, q)
    s = float(s)
    if s < 0.0:
        raise DomainError("state must be nonnegative")
    if s == 0.0:
        raise DomainError(
            "s = 0 not admissible for ratio_primitive / G / sigma_ds"
        )
    return KSCoeffs(
        p=float(p),
        q=float(q),
        diffusion=float(model.D(s)),
        sensitivity=float(model.S(s)),
        ratio_primitive=float(model.ratio_primitive(s)),
        double_primitive=float(model.G(s)),
        psi=float(model.psi(s)),
        sigma_ds=float(model.sigma_ds(s)),
    )
