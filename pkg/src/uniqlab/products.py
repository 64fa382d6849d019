"""Symmetric canonical products, indicator estimates, and zero counting.

The canonical product Pi(z) = prod (1 - z^2/gamma_n^2) is evaluated by
summing log-factors over a stored prefix, then adding the first-order tail
correction -z^2 * S2 with S2 = sum_{n > n_trunc} gamma_n^{-2}.  For
|w| <= 1/2 the remainder per factor obeys |log(1-w) + w| <= |w|^2, so the
total error after correction is certified by |z|^4 * S4 with
S4 = sum_{n > n_trunc} gamma_n^{-4}.  Both tail sums are the exact suffix
over stored zeros plus a polygamma remainder that is exact for linear
tails gamma_n = n/Delta (the empirical tail density supplies Delta).  The
|w| <= 1/2 requirement gives the validity radius gamma_{n_trunc}/sqrt(2).

Evaluation stays in the log domain throughout: on rays the product grows
like e^{pi Delta r |sin theta|}, which overflows doubles long before the
radii the slope fits need.
"""

import math
import re
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.special import polygamma

from . import _kernels
from .errors import (HypothesisViolationError, ParameterError, RadiusError)

#: rays used for asymptotic fits must keep this angular distance from the
#: real axis; the exceptional disks of the asymptotic sit at the (real) zeros
THETA_MIN = 0.1


# ---------------------------------------------------------------------------
# zero sets and product models

@dataclass(frozen=True)
class ZeroSet:
    """Strictly increasing positive zeros, optionally with known density."""

    gammas: np.ndarray
    known_density: Optional[float] = None

    def __post_init__(self):
        g = np.asarray(self.gammas, dtype=float)
        object.__setattr__(self, "gammas", g)
        if g.ndim != 1 or g.size == 0:
            raise ParameterError("zero set must be a nonempty 1-d array")
        if g[0] <= 0.0:
            raise ParameterError("zeros must be positive")
        if np.any(np.diff(g) <= 0.0):
            raise ParameterError("zeros must be strictly increasing")
        if self.known_density is not None and g.size >= 16:
            emp = g.size / g[-1]
            if abs(emp / self.known_density - 1.0) > 0.1:
                raise ParameterError(
                    f"empirical density n/gamma_n = {emp:g} is not within 10% "
                    f"of declared density {self.known_density:g}")

    @property
    def count(self) -> int:
        return self.gammas.size

    def empirical_density(self) -> float:
        return self.gammas.size / float(self.gammas[-1])


def linear_zeros(spacing: float, count: int) -> ZeroSet:
    """gamma_n = spacing * n; density Delta = 1/spacing."""
    if spacing <= 0 or count < 1:
        raise ParameterError("spacing must be positive and count >= 1")
    return ZeroSet(spacing * np.arange(1.0, count + 1.0),
                   known_density=1.0 / spacing)


@dataclass(frozen=True)
class ProductModel:
    """Truncated canonical product with certified tail sums."""

    zeros: ZeroSet
    n_trunc: int
    s2_tail: float
    s4_tail: float
    r_max: float

    def certified_radius(self, log_tol: float = 0.05) -> float:
        """Largest |z| whose tail-error certificate stays below log_tol.

        The bound |z|^4 S4 grows steeply toward r_max; quantities that
        need small absolute log error (node derivatives, envelope fits)
        should stay inside this radius rather than r_max.
        """
        if self.s4_tail == 0.0:
            return self.r_max
        return min(self.r_max, (log_tol / self.s4_tail) ** 0.25)


def make_product_model(zeros: ZeroSet, n_trunc: Optional[int] = None) -> ProductModel:
    g = zeros.gammas
    if n_trunc is None:
        n_trunc = g.size
    if not 1 <= n_trunc <= g.size:
        raise ParameterError(f"n_trunc must be in [1, {g.size}], got {n_trunc}")
    # suffix over stored zeros is exact; the polygamma remainder extends the
    # sums past the stored prefix using the empirical tail density
    dhat = zeros.empirical_density()
    s2 = float(np.sum(g[n_trunc:] ** -2.0)) + dhat ** 2 * float(polygamma(1, g.size + 1))
    s4 = float(np.sum(g[n_trunc:] ** -4.0)) + dhat ** 4 * float(polygamma(3, g.size + 1)) / 6.0
    return ProductModel(zeros, int(n_trunc), s2, s4, float(g[n_trunc - 1] / math.sqrt(2.0)))


def sized_product_model(density: float, r_max: float,
                        log_err_target: float = 1e-3) -> ProductModel:
    """Linear-zero model sized so the tail error at radius r_max is certified.

    Solves r_max^4 * S4 <= log_err_target with S4 ~ Delta^4/(3 n^3) for the
    truncation index; stores a 25% suffix on top for the exact tail sums.
    """
    rd = r_max * density
    n_trunc = int(1.2 * rd * (rd / (3.0 * log_err_target)) ** (1.0 / 3.0)) + 100
    n_trunc = max(n_trunc, int(math.ceil(r_max * density * math.sqrt(2.0))) + 8)
    stored = n_trunc + max(2000, n_trunc // 4)
    return make_product_model(linear_zeros(1.0 / density, stored), n_trunc)


@dataclass(frozen=True)
class ProductValue:
    value: complex
    log_abs_err_bound: float


def _check_radius(model: ProductModel, z: complex) -> None:
    if abs(z) > model.r_max:
        raise RadiusError(
            f"|z| = {abs(z):g} exceeds certified radius {model.r_max:g} "
            f"(n_trunc = {model.n_trunc})")


def product_log_eval(model: ProductModel, zs) -> tuple:
    """Log of the tail-corrected product at each z, with error bounds.

    Returns (log_values, bounds); exp of a log value is the product.  A z
    exactly at a zero yields -inf real part.  Raises RadiusError outside
    the certified radius.
    """
    zs_arr = np.atleast_1d(np.asarray(zs, dtype=complex))
    radii = np.abs(zs_arr)
    if np.any(radii > model.r_max):
        _check_radius(model, zs_arr[np.argmax(radii)])
    g2 = model.zeros.gammas[: model.n_trunc] ** 2
    logs = _kernels.log_factor_sums(g2, zs_arr)
    logs = logs - zs_arr * zs_arr * model.s2_tail
    bounds = radii ** 4 * model.s4_tail
    if np.isscalar(zs) or np.asarray(zs).ndim == 0:
        return complex(logs[0]), float(bounds[0])
    return logs, bounds


def product_eval(model: ProductModel, z: complex) -> ProductValue:
    """Tail-corrected product value at z with certified log-error bound."""
    log_val, bound = product_log_eval(model, complex(z))
    if log_val.real == -math.inf:
        return ProductValue(0.0 + 0.0j, float(bound))
    return ProductValue(complex(np.exp(log_val)), float(bound))


def product_log_asymptote(delta: float, r: float, theta: float) -> float:
    """Reference main term Delta pi r |sin theta| of log|Pi| on a ray."""
    if delta <= 0:
        raise ParameterError("delta must be positive")
    return delta * math.pi * r * abs(math.sin(theta))


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    rel_dev: float
    theta: float
    delta: float


def _fold_angle(theta: float) -> float:
    """Angular distance from the ray theta to the real axis."""
    t = abs(theta) % math.pi
    return min(t, math.pi - t)


def asymptotic_slope_fit(model: ProductModel, theta: float, r_grid) -> SlopeFit:
    """Least-squares growth rate of log|Pi(r e^{i theta})| against r.

    The o(r) defect of the asymptotic behaves like -log r for sine-type
    products, so log r is included as a nuisance regressor; the returned
    slope is the r-coefficient.  Rays must stay THETA_MIN away from the
    real axis, where the exceptional disks around the zeros live.
    """
    if _fold_angle(theta) < THETA_MIN:
        raise ParameterError(
            f"ray theta = {theta:g} is within {THETA_MIN} rad of the real axis")
    r = np.asarray(r_grid, dtype=float)
    if r.size < 8:
        raise ParameterError("need at least 8 radii for a stable fit")
    zs = r * np.exp(1j * theta)
    logs, _ = product_log_eval(model, zs)
    design = np.column_stack([np.ones_like(r), r, np.log(r)])
    coef, *_ = np.linalg.lstsq(design, logs.real, rcond=None)
    slope = float(coef[1])
    delta = (model.zeros.known_density if model.zeros.known_density is not None
             else model.zeros.empirical_density())
    target = delta * math.pi * abs(math.sin(theta))
    return SlopeFit(slope, abs(slope - target) / target, theta, delta)


# ---------------------------------------------------------------------------
# function handles and the built-in registry

@dataclass(frozen=True)
class FunctionHandle:
    """Deterministic complex evaluator with growth metadata.

    ``log_abs`` is optional but lets ray probes run far past the overflow
    radius of the plain evaluator.
    """

    name: str
    evaluator: Callable
    rho: float
    log_abs: Optional[Callable] = None
    zero_density: Optional[float] = None

    def log_abs_at(self, z: complex) -> float:
        if self.log_abs is not None:
            return float(self.log_abs(z))
        v = abs(self.evaluator(z))
        return math.log(v) if v > 0.0 else -math.inf

    def metadata(self) -> dict:
        return {"name": self.name, "rho": self.rho,
                "zero_density": self.zero_density}


def log_abs_sin(w: complex) -> float:
    """Overflow-safe log|sin w|; |sin w|^2 = sin^2(Re w) + sinh^2(Im w)."""
    u, v = w.real, w.imag
    av = abs(v)
    if av < 20.0:
        return 0.5 * math.log(math.sinh(v) ** 2 + math.sin(u) ** 2)
    return av - math.log(2.0)


def _gaussian() -> FunctionHandle:
    return FunctionHandle(
        "gaussian",
        evaluator=lambda z: np.exp(-np.pi * z * z),
        rho=2.0,
        log_abs=lambda z: -math.pi * (z * z).real if isinstance(z, complex)
        else -math.pi * (complex(z) ** 2).real,
    )


def _sinc() -> FunctionHandle:
    def ev(z):
        z = complex(z)
        return 1.0 + 0.0j if z == 0 else np.sin(np.pi * z) / (np.pi * z)

    def la(z):
        z = complex(z)
        if z == 0:
            return 0.0
        return log_abs_sin(np.pi * z) - math.log(abs(np.pi * z))

    return FunctionHandle("sinc", ev, rho=1.0, log_abs=la, zero_density=1.0)


def _sine_decay(b: float, d: float) -> FunctionHandle:
    def ev(z):
        z = complex(z)
        return np.sin(2.0 * np.pi * b * z) * np.exp(-np.pi * d * z)

    def la(z):
        z = complex(z)
        return log_abs_sin(2.0 * np.pi * b * z) - math.pi * d * z.real

    return FunctionHandle(f"sine_decay({b:g},{d:g})", ev, rho=1.0,
                          log_abs=la, zero_density=2.0 * b)


def _constant(c: float) -> FunctionHandle:
    return FunctionHandle(f"constant({c:g})", lambda z: complex(c), rho=1.0,
                          log_abs=lambda z: math.log(abs(c)) if c != 0 else -math.inf)


_SINE_DECAY_RE = re.compile(r"sine_decay\(\s*([^,\s]+)\s*,\s*([^)\s]+)\s*\)")
_CONSTANT_RE = re.compile(r"constant\(\s*([^)\s]+)\s*\)")


def get_function(name: str) -> FunctionHandle:
    """Look up a built-in test function by its registry name."""
    if name == "gaussian":
        return _gaussian()
    if name == "sinc":
        return _sinc()
    m = _SINE_DECAY_RE.fullmatch(name)
    if m:
        return _sine_decay(float(m.group(1)), float(m.group(2)))
    m = _CONSTANT_RE.fullmatch(name)
    if m:
        return _constant(float(m.group(1)))
    raise ParameterError(f"unknown function registry name {name!r}")


# ---------------------------------------------------------------------------
# indicator estimation

@dataclass(frozen=True)
class IndicatorReport:
    rho: float
    theta_grid: np.ndarray
    h_estimates: np.ndarray
    fit_residuals: np.ndarray
    kappa: float
    diagnostics: list = field(default_factory=list)


def indicator_estimate(f: FunctionHandle, rho: float, theta_grid,
                       r_grid) -> IndicatorReport:
    """Estimate the indicator h(theta) = limsup log|f(r e^{i theta})| / r^rho.

    Per ray, the surrogate is the median of log|f|/r^rho over the top
    quartile of radii -- robust against the oscillation of log|f| near
    zeros.  Radii where the evaluator overflows are dropped and recorded as
    per-ray diagnostics, not failures.  kappa is assembled from the rays
    closest to 0 and pi.
    """
    if rho <= 0:
        raise ParameterError("rho must be positive")
    theta = np.asarray(theta_grid, dtype=float)
    r = np.sort(np.asarray(r_grid, dtype=float))
    if r.size < 4:
        raise ParameterError("need at least 4 radii")
    h = np.empty(theta.size)
    res = np.empty(theta.size)
    diagnostics = []
    for i, th in enumerate(theta):
        vals = np.array([f.log_abs_at(rr * np.exp(1j * th)) for rr in r])
        ok = np.isfinite(vals)
        dropped = int((~ok).sum())
        if dropped:
            diagnostics.append({"theta": float(th), "dropped": dropped})
        rv, vv = r[ok], vals[ok] / r[ok] ** rho
        if rv.size == 0:
            h[i], res[i] = np.nan, np.nan
            continue
        top = max(1, rv.size // 4)
        sel = vv[-top:]
        h[i] = float(np.median(sel))
        res[i] = float(sel.max() - sel.min())
    i0 = int(np.argmin(np.abs(theta)))
    ipi = int(np.argmin(np.abs(np.abs(theta) - math.pi)))
    kappa = min(-h[i0], -h[ipi]) / (2.0 * math.pi)
    return IndicatorReport(rho, theta, h, res, float(kappa), diagnostics)


def kappa_estimate_bound_check(report: IndicatorReport, p: float, q: float,
                               kappa_hat: float) -> np.ndarray:
    """Margins of h(theta) <= 2 pi |sin theta|^p / (p (q kappa_hat)^{p/q}).

    Nonnegative margins (up to fit tolerance) on every ray mean the
    indicator is consistent with the stated frequency-side decay.
    """
    if kappa_hat <= 0:
        raise ParameterError("kappa_hat must be positive")
    bound = (2.0 * math.pi * np.abs(np.sin(report.theta_grid)) ** p
             / (p * (q * kappa_hat) ** (p / q)))
    return bound - report.h_estimates


def indicator_report_to_rows(report: IndicatorReport) -> list:
    return [(float(t), float(h), float(r))
            for t, h, r in zip(report.theta_grid, report.h_estimates,
                               report.fit_residuals)]


# ---------------------------------------------------------------------------
# Jensen zero-counting decay check

def zero_count_in_disk(gamma: ZeroSet, x: float, t: float) -> int:
    """Exact number of zeros in the closed interval [x - t, x + t]."""
    if t <= 0:
        raise ParameterError("radius t must be positive")
    g = gamma.gammas
    return int(np.searchsorted(g, x + t, side="right")
               - np.searchsorted(g, x - t, side="left"))


@dataclass(frozen=True)
class JensenReport:
    empirical_rate: float
    bound: float
    passed: bool
    c_gamma: float
    c_growth_log: float
    n_fit_points: int


def jensen_decay_check(F: FunctionHandle, gamma: ZeroSet, a: float,
                       delta: float, phi: float, x_grid,
                       fit_tol: float = 0.1) -> JensenReport:
    """Verify the sector decay rate limsup log|F(x)|/x <= -2 a delta sin phi.

    Spot-checks both lemma hypotheses first: the window counting bound
    |Gamma cap [u, v]| >= a(1+delta)(v-u) - C and sector growth
    |F| <= C e^{a pi |Im z|}; a failing spot-check raises
    HypothesisViolationError with diagnostics.  The empirical rate is a
    least-squares slope of log|F| over the upper half of the grid,
    excluding points within 0.05 mean gaps of a zero.
    """
    if a <= 0 or delta < 0 or not 0 < phi < math.pi / 2:
        raise ParameterError("need a > 0, delta >= 0, 0 < phi < pi/2")
    x = np.sort(np.asarray(x_grid, dtype=float))
    if x[0] <= 0:
        raise ParameterError("x grid must be positive")
    g = gamma.gammas

    # counting hypothesis: rate over long windows and worst deficit;
    # windows stay inside the stored zero coverage
    rate_req = a * (1.0 + delta)
    x_hi = float(x[-1])
    cover = min(x_hi, float(g[-1]))
    lengths = np.linspace(cover / 8.0, cover, 12)
    offsets = np.linspace(0.0, cover / 2.0, 5)
    counts, lens, deficit = [], [], 0.0
    for u in offsets:
        for ln in lengths:
            if u + ln > cover:
                continue
            c = zero_count_in_disk(gamma, u + ln / 2.0, ln / 2.0)
            counts.append(c)
            lens.append(ln)
            deficit = max(deficit, rate_req * ln - c)
    slope = float(np.polyfit(lens, counts, 1)[0])
    if slope < rate_req * 0.95:
        raise HypothesisViolationError(
            "zero-counting rate below a(1+delta)",
            {"required_rate": rate_req, "fitted_rate": slope})

    # growth hypothesis on a sector grid, in the log domain
    rr = np.linspace(max(1.0, x[0]), x_hi, 24)
    th = np.linspace(-phi, phi, 9)
    ratios = np.empty((rr.size, th.size))
    for i, r0 in enumerate(rr):
        for j, t0 in enumerate(th):
            z = r0 * np.exp(1j * t0)
            ratios[i, j] = F.log_abs_at(z) - a * math.pi * abs(z.imag)
    per_r = ratios.max(axis=1)
    growth_trend = float(np.polyfit(rr, per_r, 1)[0])
    if growth_trend > 0.01:
        raise HypothesisViolationError(
            "sector growth exceeds e^{a pi |Im z|}",
            {"log_ratio_slope": growth_trend, "max_log_ratio": float(per_r.max())})

    # empirical decay rate on the real axis
    mean_gap = float(np.mean(np.diff(g)))
    dist = np.abs(g[np.searchsorted(g, x).clip(0, g.size - 1)] - x)
    dist = np.minimum(dist, np.abs(g[(np.searchsorted(g, x) - 1).clip(0, g.size - 1)] - x))
    keep = dist > 0.05 * mean_gap
    xs = x[keep]
    xs = xs[xs >= 0.5 * x_hi]
    logF = np.array([F.log_abs_at(complex(xx)) for xx in xs])
    rate = float(np.polyfit(xs, logF, 1)[0])
    bound = -2.0 * a * delta * math.sin(phi)
    return JensenReport(rate, bound, rate <= bound + fit_tol,
                        float(deficit), float(per_r.max()), int(xs.size))
