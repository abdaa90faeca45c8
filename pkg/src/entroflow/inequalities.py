"""Numerical verification of the two dissipation-term inequalities.

For positive Neumann fields f and positive coefficients a, the quartic
gradient integral is bounded by (1+sqrt(n))^2 times the dissipation
integral, and (when a >= lambda > 0) the squared Hessian of Sigma(f) is
bounded by (4+(1+sqrt(n))^2)/(2 lambda) times the same integral.  The
checks evaluate both sides with one canonical discretization and report
the observed ratio; a seeded sampler searches cosine test functions for
the worst ratio.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import HypothesisError, UsageError
from .fields import (
    Field,
    TestFunctionSpec,
    build_test_function,
    frobenius_sq,
    grad_magnitude_sq,
    gradient_of_vector,
    integrate,
    neumann_gradient,
    neumann_hessian,
    require_positive_field,
)

_TINY = 1e-30


@dataclass(frozen=True)
class IneqReport:
    lhs: float
    rhs_integral: float
    constant: float
    ratio: float
    passed: bool


@dataclass
class SearchSummary:
    n: int
    cells: int
    trials: int
    seed: int
    tol: float
    max_bernis: float
    max_fisher: float
    argmax_bernis: TestFunctionSpec
    argmax_fisher: TestFunctionSpec
    all_passed: bool
    rows: list  # (trial, c0, bernis_ratio, fisher_ratio, lam)


def default_tol(grid):
    """Discretization budget for the inequality verdicts."""
    return 50.0 * grid.h**2


def bernis_constant(n):
    return (1.0 + math.sqrt(n)) ** 2


def fisher_constant(n, lam):
    return (4.0 + (1.0 + math.sqrt(n)) ** 2) / (2.0 * lam)


def dissipation_rhs(f, model):
    """int f a(f) |grad(f^{-1/2} grad Sigma(f))|^2, the canonical rhs.

    The matrix field is formed by differentiating the vector field
    f^{-1/2} grad Sigma(f) componentwise with mirror ghosts (odd across
    the component's own axis).  Used identically on both sides of every
    check.
    """
    vals = f.values
    a_vals = np.asarray(model.a(vals), dtype=float)
    sig = Field(f.grid, np.asarray(model.sigma(vals), dtype=float))
    grad_sig = neumann_gradient(sig)
    inv_sqrt = 1.0 / np.sqrt(vals)
    w = [Field(f.grid, inv_sqrt * g.values) for g in grad_sig]
    matrix = gradient_of_vector(w)
    integrand = vals * a_vals * frobenius_sq(matrix).values
    return integrate(Field(f.grid, integrand))


def _make_report(lhs, rhs, constant, tol):
    if rhs <= _TINY and lhs <= _TINY:
        return IneqReport(lhs, rhs, constant, 0.0, True)
    ratio = lhs / rhs if rhs > _TINY else math.inf
    return IneqReport(lhs, rhs, constant, ratio, lhs <= constant * rhs * (1.0 + tol))


def bernis_check(f, model, tol=None):
    """Quartic-gradient bound with constant (1+sqrt(n))^2."""
    require_positive_field(f)
    if tol is None:
        tol = default_tol(f.grid)
    vals = f.values
    a_vals = np.asarray(model.a(vals), dtype=float)
    grad = neumann_gradient(f)
    grad_sq = grad_magnitude_sq(grad).values
    lhs = integrate(Field(f.grid, a_vals**3 / vals**3 * grad_sq**2))
    rhs = dissipation_rhs(f, model)
    return _make_report(lhs, rhs, bernis_constant(f.grid.dim), tol)


def fisher_ineq_check(f, model, lam, tol=None):
    """Hessian-of-Sigma bound with constant (4+(1+sqrt(n))^2)/(2 lambda)."""
    require_positive_field(f)
    if lam <= 0.0:
        raise UsageError("lambda must be positive")
    if tol is None:
        tol = default_tol(f.grid)
    a_range = np.asarray(model.a(np.linspace(f.min(), f.max(), 64)), dtype=float)
    if a_range.min() < lam * (1.0 - 1e-12):
        raise HypothesisError(
            "coefficient drops below lambda=%g on the field range (min a = %g)"
            % (lam, a_range.min())
        )
    sig = Field(f.grid, np.asarray(model.sigma(f.values), dtype=float))
    lhs = integrate(frobenius_sq(neumann_hessian(sig)))
    rhs = dissipation_rhs(f, model)
    return _make_report(lhs, rhs, fisher_constant(f.grid.dim, lam), tol)


def cmkm_ratio(f):
    """int |D^2 sqrt(f)|^2 / int f |D^2 log f|^2.

    No explicit constant is available for this linear-case inequality, so
    only the observed ratio is reported; 0 when both integrals vanish.
    """
    require_positive_field(f)
    sqrt_f = Field(f.grid, np.sqrt(f.values))
    log_f = Field(f.grid, np.log(f.values))
    num = integrate(frobenius_sq(neumann_hessian(sqrt_f)))
    den = integrate(
        Field(f.grid, f.values * frobenius_sq(neumann_hessian(log_f)).values)
    )
    if num <= _TINY and den <= _TINY:
        return 0.0
    return num / den


def sample_spec(rng, dim, max_modes=4):
    """Draw one positive cosine spec; total coefficient mass <= 0.9 c0."""
    c0 = float(rng.uniform(1.0, 5.0))
    modes = [int(rng.integers(1, max_modes + 1)) for _ in range(dim)]
    total = sum(modes)
    bound = 0.9 * c0 / total
    coeffs = tuple(
        tuple(float(rng.uniform(-bound, bound)) for _ in range(m)) for m in modes
    )
    return TestFunctionSpec(offset=c0, cosine_coeffs=coeffs)


def worst_ratio_search(n, model, trials, seed, cells=64, tol=None):
    """Seeded sampling of test functions; reports the worst observed ratios.

    Deterministic for a given (seed, grid, model): trial index, not
    arrival order, fixes the sample.
    """
    from .fields import Grid

    if trials < 1:
        raise UsageError("need at least one trial")
    grid = Grid(dim=n, cells=cells)
    if tol is None:
        tol = default_tol(grid)
    rng = np.random.default_rng(seed)
    max_b = -math.inf
    max_f = -math.inf
    arg_b = arg_f = None
    rows = []
    all_passed = True
    for trial in range(trials):
        spec = sample_spec(rng, n)
        f = build_test_function(grid, spec)
        lam = float(np.asarray(model.a(np.linspace(f.min(), f.max(), 64))).min())
        rb = bernis_check(f, model, tol)
        rf = fisher_ineq_check(f, model, lam, tol)
        all_passed = all_passed and rb.passed and rf.passed
        if rb.ratio > max_b:
            max_b, arg_b = rb.ratio, spec
        if rf.ratio > max_f:
            max_f, arg_f = rf.ratio, spec
        rows.append((trial, spec.offset, rb.ratio, rf.ratio, lam))
    return SearchSummary(
        n=n,
        cells=cells,
        trials=trials,
        seed=seed,
        tol=tol,
        max_bernis=max_b,
        max_fisher=max_f,
        argmax_bernis=arg_b,
        argmax_fisher=arg_f,
        all_passed=all_passed,
        rows=rows,
    )
