"""Sampling sequences, density functionals, and criticality algebra.

A pair of real sequences is classified by the tail behavior of the gap
functionals |x_j|^{p-1}(x_{j+1} - x_j).  The true classification compares
limsup/liminf of these functionals against 1/2 after the exponent pairing
alpha^{1/p} beta^{1/q}; on finite data we use tail max/min beyond a caller
supplied ``tail_start`` as the computable surrogate.  Enlarging
``tail_start`` can only shrink the reported tail sup (refinement
monotonicity), which is the correctness contract of the surrogate.
"""

import csv
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConjugacyError, ParameterError, TooFewPointsError

CONJUGACY_TOL = 1e-12
#: verdict margin separating genuine boundary cases from float noise
DEFAULT_MARGIN = 1e-6


def conjugate_exponent(p: float) -> float:
    if p <= 1.0:
        raise ParameterError(f"p must exceed 1, got {p}")
    return p / (p - 1.0)


def check_conjugate(p: float, q: float) -> None:
    if p <= 1.0 or q <= 1.0:
        raise ConjugacyError(f"exponents must exceed 1, got p={p}, q={q}")
    if abs(1.0 / p + 1.0 / q - 1.0) > CONJUGACY_TOL:
        raise ConjugacyError(f"1/p + 1/q = {1.0/p + 1.0/q!r}, not 1 within {CONJUGACY_TOL}")


# ---------------------------------------------------------------------------
# domain types

@dataclass(frozen=True)
class GeneratorInfo:
    kind: str
    p: float
    alpha: float
    j_max: int
    shift: float = 0.0


@dataclass(frozen=True)
class SampleSequence:
    """An ordered real sampling set with optional generator metadata."""

    points: np.ndarray
    side: str = "two-sided"  # or "positive"
    generator: Optional[GeneratorInfo] = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        object.__setattr__(self, "points", pts)
        if pts.ndim != 1 or pts.size < 2:
            raise ParameterError("a sample sequence needs at least two points")
        if np.any(np.diff(pts) <= 0):
            raise ParameterError("points must be strictly increasing")
        if self.side not in ("two-sided", "positive"):
            raise ParameterError(f"unknown side {self.side!r}")
        if self.side == "positive" and pts[0] <= 0:
            raise ParameterError("positive sequence contains a nonpositive point")

    def side_moduli(self, sign: int) -> np.ndarray:
        """Moduli of the points on one side, ordered outward from the origin."""
        if sign > 0:
            return self.points[self.points > 0]
        return -self.points[self.points < 0][::-1]

    def min_gap(self) -> float:
        return float(np.min(np.diff(self.points)))


@dataclass(frozen=True)
class PairSpec:
    """A (Lambda, M, p, q) configuration with weight parameters a, b, K."""

    lam: SampleSequence
    mu: SampleSequence
    p: float
    q: Optional[float] = None
    a: float = 1.0
    b: float = 1.0
    K: float = 0.0

    def __post_init__(self):
        q = self.q if self.q is not None else conjugate_exponent(self.p)
        object.__setattr__(self, "q", q)
        check_conjugate(self.p, q)
        if self.a <= 0 or self.b <= 0:
            raise ParameterError("a and b must be positive")
        if self.K < 0:
            raise ParameterError("K must be nonnegative")


@dataclass(frozen=True)
class DensityEstimate:
    """Finite-data surrogate for the limsup/liminf gap functionals.

    ``alpha_plus`` / ``alpha_minus`` are the tail maxima of
    |x_j|^{p-1}(x_{j+1}-x_j) on the positive/negative side (limsup
    surrogates); ``inf_plus`` / ``inf_minus`` are the tail minima.
    """

    alpha_plus: float
    alpha_minus: float
    inf_plus: float
    inf_minus: float
    tail_start: int
    window: int
    exponent: float

    @property
    def sup(self) -> float:
        return max(self.alpha_plus, self.alpha_minus)

    @property
    def inf(self) -> float:
        return min(self.inf_plus, self.inf_minus)


@dataclass(frozen=True)
class CriticalityVerdict:
    kind: str  # supercritical | subcritical | indeterminate
    product_value: float
    margin: float


# ---------------------------------------------------------------------------
# operations

def make_power_lattice(p: float, alpha: float, j_max: int,
                       shift: float = 0.0) -> SampleSequence:
    """Two-sided lattice lambda_j = sign(j) ((p alpha |j|)^{1/p} + shift).

    The constant p*alpha makes the gap functional |x|^{p-1} dx/dj converge
    to ``alpha``, so the generated pair density is the requested one.
    """
    if p <= 1.0:
        raise ParameterError(f"p must exceed 1, got {p}")
    if alpha <= 0.0:
        raise ParameterError(f"alpha must be positive, got {alpha}")
    if j_max < 2:
        raise ParameterError(f"j_max must be at least 2, got {j_max}")
    j = np.arange(1, j_max + 1, dtype=float)
    pos = (p * alpha * j) ** (1.0 / p) + shift
    pts = np.concatenate([-pos[::-1], pos])
    gen = GeneratorInfo("power_lattice", p, alpha, j_max, shift)
    return SampleSequence(pts, side="two-sided", generator=gen)


def _side_functionals(moduli: np.ndarray, exponent: float, outer_weight: bool):
    gaps = np.diff(moduli)
    if outer_weight:
        return moduli[1:] ** (exponent - 1.0) * gaps
    return moduli[:-1] ** (exponent - 1.0) * gaps


def density_functional(seq: SampleSequence, p: float,
                       tail_start: int = 0) -> DensityEstimate:
    """Tail max/min of |x_j|^{p-1}(x_{j+1}-x_j) per side beyond tail_start.

    On the positive side index j runs outward and the gap is weighted by
    its inner endpoint; on the negative side (j -> -infinity) the paper's
    indexing weights the outer endpoint.  Both converge to the same limit
    for regular sequences.
    """
    if tail_start < 0:
        raise ParameterError("tail_start must be nonnegative")
    sides = []
    for sign, outer in ((1, False), (-1, True)):
        if sign < 0 and seq.side == "positive":
            continue
        m = seq.side_moduli(sign)
        if m.size < tail_start + 2:
            raise TooFewPointsError(
                f"side {sign:+d} has {m.size} points, need {tail_start + 2}")
        f = _side_functionals(m, p, outer)[tail_start:]
        sides.append((float(f.max()), float(f.min()), f.size))
    if len(sides) == 1:
        sides.append(sides[0])
    (sup_p, inf_p, w_p), (sup_m, inf_m, w_m) = sides
    return DensityEstimate(alpha_plus=sup_p, alpha_minus=sup_m,
                           inf_plus=inf_p, inf_minus=inf_m,
                           tail_start=tail_start, window=min(w_p, w_m),
                           exponent=p)


def _check_estimate_exponent(est: DensityEstimate, expected: float, name: str):
    if abs(est.exponent - expected) > CONJUGACY_TOL:
        raise ParameterError(
            f"{name} estimate was computed with exponent {est.exponent}, "
            f"spec requires {expected}")


def classify_pair(spec: PairSpec, est_lambda: DensityEstimate,
                  est_mu: DensityEstimate,
                  margin: float = DEFAULT_MARGIN) -> CriticalityVerdict:
    """Supercritical / subcritical / indeterminate verdict for a pair.

    Supercritical when sup-product < 1/2 - margin, subcritical when the
    inf-product > 1/2 + margin.  Exactly critical data is reported
    indeterminate; neither regime of the classification applies there.
    """
    _check_estimate_exponent(est_lambda, spec.p, "lambda")
    _check_estimate_exponent(est_mu, spec.q, "mu")
    sup_prod = est_lambda.sup ** (1.0 / spec.p) * est_mu.sup ** (1.0 / spec.q)
    inf_prod = est_lambda.inf ** (1.0 / spec.p) * est_mu.inf ** (1.0 / spec.q)
    if sup_prod < 0.5 - margin:
        return CriticalityVerdict("supercritical", sup_prod, margin)
    if inf_prod > 0.5 + margin:
        return CriticalityVerdict("subcritical", inf_prod, margin)
    return CriticalityVerdict("indeterminate", sup_prod, margin)


@dataclass(frozen=True)
class BeurlingConditionReport:
    lhs_lambda: float
    bound_lambda: float
    lhs_mu: float
    bound_mu: float
    passed: bool


def beurling_condition_check(spec: PairSpec, est_lambda: DensityEstimate,
                             est_mu: DensityEstimate) -> BeurlingConditionReport:
    """Check the density condition alpha < (b/a)^{1/q}/2, beta < (a/b)^{1/p}/2.

    The two bounds multiply (with exponents 1/p, 1/q) to exactly 1/2 for
    any positive a, b, so passing the check certifies the pair is
    supercritical for the weights (a, b).
    """
    _check_estimate_exponent(est_lambda, spec.p, "lambda")
    _check_estimate_exponent(est_mu, spec.q, "mu")
    bound_lambda = 0.5 * (spec.b / spec.a) ** (1.0 / spec.q)
    bound_mu = 0.5 * (spec.a / spec.b) ** (1.0 / spec.p)
    lhs_lambda = est_lambda.sup
    lhs_mu = est_mu.sup
    passed = lhs_lambda < bound_lambda and lhs_mu < bound_mu
    return BeurlingConditionReport(lhs_lambda, bound_lambda, lhs_mu, bound_mu, passed)


def morgan_threshold(p: float, q: float) -> float:
    """|cos(r pi / 2)|^{1/r} with r = min(p, q); the Morgan-regime constant."""
    check_conjugate(p, q)
    r = min(p, q)
    return abs(math.cos(r * math.pi / 2.0)) ** (1.0 / r)


@dataclass(frozen=True)
class TrigInequalityReport:
    theta: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    margin: np.ndarray

    @property
    def min_margin(self) -> float:
        return float(self.margin.min())


def trig_inequality_check(p: float, theta_grid) -> TrigInequalityReport:
    """Evaluate (1/p) tan(p t) vs sin(t) / cos(p t)^{1/p} on interior angles.

    Every angle must lie strictly inside (0, pi/(2p)); the inequality is
    strict there and the margin tends to 0 like t^3 as t -> 0.
    """
    if p <= 1.0:
        raise ParameterError(f"p must exceed 1, got {p}")
    theta = np.asarray(theta_grid, dtype=float)
    hi = math.pi / (2.0 * p)
    if np.any(theta <= 0.0) or np.any(theta >= hi):
        raise ParameterError(f"angles must lie strictly inside (0, {hi:g})")
    lhs = np.tan(p * theta) / p
    rhs = np.sin(theta) / np.cos(p * theta) ** (1.0 / p)
    return TrigInequalityReport(theta, lhs, rhs, lhs - rhs)


def eta_substitution_check(alpha: float, kappa_hat: float,
                           p: float, q: float) -> float:
    """Relative residual of the eta-substitution identity.

    With eta = q kappa_hat (2 alpha)^{1-q}, the combination
    (2 alpha)^{-1} eta - eta^p / (p (q kappa_hat)^{p/q}) collapses to
    (2 alpha)^{-q} kappa_hat; returns |lhs - rhs| / rhs.
    """
    if alpha <= 0 or kappa_hat <= 0:
        raise ParameterError("alpha and kappa_hat must be positive")
    check_conjugate(p, q)
    eta = q * kappa_hat * (2.0 * alpha) ** (1.0 - q)
    lhs = eta / (2.0 * alpha) - eta ** p / (p * (q * kappa_hat) ** (p / q))
    rhs = (2.0 * alpha) ** (-q) * kappa_hat
    return abs(lhs - rhs) / abs(rhs)


@dataclass(frozen=True)
class CriticalityAlgebraResult:
    lhs_holds: bool
    rhs_holds: bool
    equivalent: bool
    lhs_value: float
    rhs_value: float


def criticality_algebra_check(alpha: float, beta: float,
                              p: float, q: float) -> CriticalityAlgebraResult:
    """Compare (2 alpha)^q (2 beta)^p > 1 with 2 alpha^{1/p} beta^{1/q} > 1.

    The first is the (pq)-th power of the second, so the predicates agree;
    the exponent pairing (alpha with q, beta with p) is deliberate.
    """
    if alpha <= 0 or beta <= 0:
        raise ParameterError("alpha and beta must be positive")
    check_conjugate(p, q)
    lhs_value = (2.0 * alpha) ** q * (2.0 * beta) ** p
    rhs_value = 2.0 * alpha ** (1.0 / p) * beta ** (1.0 / q)
    lhs_holds = lhs_value > 1.0
    rhs_holds = rhs_value > 1.0
    return CriticalityAlgebraResult(lhs_holds, rhs_holds,
                                    lhs_holds == rhs_holds,
                                    lhs_value, rhs_value)


# ---------------------------------------------------------------------------
# serialization

def sequence_index(seq: SampleSequence) -> np.ndarray:
    """Paper-style index j for each point (skipping 0 for two-sided sets)."""
    if seq.side == "positive":
        return np.arange(1, seq.points.size + 1)
    n_neg = int(np.sum(seq.points < 0))
    n_pos = seq.points.size - n_neg
    return np.concatenate([np.arange(-n_neg, 0), np.arange(1, n_pos + 1)])


def sequence_to_csv(seq: SampleSequence, path: str) -> None:
    idx = sequence_index(seq)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["j", "lambda_j"])
        for j, x in zip(idx, seq.points):
            writer.writerow([int(j), repr(float(x))])


def generator_record(seq: SampleSequence) -> dict:
    if seq.generator is None:
        raise ParameterError("sequence carries no generator metadata")
    g = seq.generator
    return {"kind": g.kind, "p": g.p, "alpha": g.alpha,
            "j_max": g.j_max, "shift": g.shift}


def sequence_from_generator(record: dict) -> SampleSequence:
    if record.get("kind") != "power_lattice":
        raise ParameterError(f"unknown generator kind {record.get('kind')!r}")
    return make_power_lattice(record["p"], record["alpha"],
                              int(record["j_max"]), record.get("shift", 0.0))
