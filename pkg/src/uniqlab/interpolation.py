"""Uniform subsequence selection and the Beurling-type interpolant.

Given a node set T' with exactly m points in every length-L block beyond
some start index, the interpolant

    g(z) = sum_k (1+z)^K / (1+t_k)^K * Pi(z) / (Pi'(t_k) (z - t_k)) * eta_k

matches bounded data eta on T', where Pi is the symmetric canonical
product with zeros +-t_k.  Each cardinal factor equals the shifted product
B_{t_k}(z - t_k), which is how terms are evaluated within
NEAR_NODE_RADIUS of their node (the direct quotient loses all precision
there; the B form has a finite limit).

The series is truncated at ``n_terms``; terms decay like
(1 + t_k)^{K0 - K}, summable since the weight exponent K is chosen above
max(K0, N0) + 2, and the magnitude of the last block of terms is kept as
the truncation diagnostic.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .errors import (GridTouchesZeroError, InfeasibleParametersError,
                     NodeError, ParameterError, WindowEmptyError)
from .products import ProductModel, ZeroSet, make_product_model, product_log_eval

NEAR_NODE_RADIUS = 1e-8


# ---------------------------------------------------------------------------
# selection

@dataclass(frozen=True)
class UniformSelection:
    """m points per length-L block, one from each slot window of width h."""

    t_prime: np.ndarray
    L: float
    m_per_interval: int
    h: float
    ell: float
    start_n: int

    def separation(self) -> float:
        return float(np.min(np.diff(self.t_prime)))

    def block_counts(self) -> np.ndarray:
        edges = np.arange(self.start_n, self.start_n + self.n_blocks + 1) * self.L
        return np.histogram(self.t_prime, bins=edges)[0]

    @property
    def n_blocks(self) -> int:
        return self.t_prime.size // self.m_per_interval

    def validate(self) -> None:
        if np.any(self.block_counts() != self.m_per_interval):
            raise ParameterError("a block does not hold exactly m points")
        if self.separation() < self.ell - self.h - 1e-12:
            raise ParameterError("selected points violate the separation bound")


def select_uniform_subsequence(T, L: float, m_per_interval: int, h: float,
                               start_n: int = 0) -> UniformSelection:
    """Pick the first point of T in each window [nL + s*ell, nL + s*ell + h].

    Blocks that fail before any point was selected advance the reported
    ``start_n`` (finitely many exceptional intervals near the origin);
    an empty window after selection has begun is a hard error naming the
    violating (n, s).  Windows are disjoint because h < ell, which also
    forces separation >= ell - h.
    """
    t = np.asarray(T, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise ParameterError("T must be a nonempty 1-d array")
    if np.any(np.diff(t) <= 0) or t[0] <= 0:
        raise ParameterError("T must be strictly increasing and positive")
    if L <= 0 or m_per_interval < 1:
        raise ParameterError("need L > 0 and m_per_interval >= 1")
    ell = L / m_per_interval
    if not 0 < h < ell:
        raise InfeasibleParametersError(
            f"window width h = {h:g} must lie in (0, ell = {ell:g})")

    selected = []
    n = start_n
    eff_start = start_n
    t_max = t[-1]
    while (n * L + (m_per_interval - 1) * ell + h) <= t_max:
        block = []
        for s in range(m_per_interval):
            lo = n * L + s * ell
            hi = lo + h
            i = int(np.searchsorted(t, lo, side="left"))
            if i >= t.size or t[i] > hi:
                if not selected:
                    eff_start = n + 1
                    block = None
                    break
                raise WindowEmptyError(n, s, lo, hi)
            block.append(t[i])
        if block is not None:
            selected.extend(block)
        n += 1
    if not selected:
        raise ParameterError("no complete block could be selected from T")
    sel = UniformSelection(np.asarray(selected), L, m_per_interval, h, ell, eff_start)
    sel.validate()
    return sel


# ---------------------------------------------------------------------------
# shifted Beurling products

def _b_log_many(nodes: np.ndarray, s2_tail: float, idx: int, ws) -> np.ndarray:
    """log B_{t_idx}(w) over all +-nodes except t_idx, tail-corrected.

    Pairing the omitted factors (gamma - t')(-gamma - t') shows the tail of
    B at argument w equals the product tail at z = t' + w, so the
    correction is exp(-(w^2 + 2 t' w) S2).
    """
    tk = nodes[idx]
    roots = np.concatenate([nodes, -nodes]) - tk
    roots = roots[np.abs(roots) > 1e-300]
    ws_arr = np.atleast_1d(np.asarray(ws, dtype=complex))
    out = np.empty(ws_arr.shape, dtype=complex)
    for j, w in enumerate(ws_arr.ravel()):
        out.ravel()[j] = _kernels.shifted_log_sum(roots, w) - (w * w + 2.0 * tk * w) * s2_tail
    return out


def shifted_beurling_product(selection: UniformSelection, t_prime_idx: int,
                             z: complex, n_trunc: Optional[int] = None) -> complex:
    """B_{t'}(z) = prod over +-T' minus {t'} of (1 - z/(gamma - t')).

    ``n_trunc`` limits the nodes used per side (default: all stored).
    """
    nodes = selection.t_prime
    if not 0 <= t_prime_idx < nodes.size:
        raise ParameterError(f"node index {t_prime_idx} out of range")
    if n_trunc is not None:
        if n_trunc < nodes.size and n_trunc < 1000:
            raise ParameterError("truncation below 1000 terms per side")
        nodes = nodes[:n_trunc]
        if t_prime_idx >= nodes.size:
            raise ParameterError("node index outside truncated set")
    model = make_product_model(ZeroSet(nodes))
    return complex(np.exp(_b_log_many(nodes, model.s2_tail, t_prime_idx, z)[0]))


@dataclass(frozen=True)
class BeurlingGrowthReport:
    max_ratio: float
    exponent_fit: float
    nu: float
    poly_exponent: int


def beurling_growth_diagnostic(selection: UniformSelection, t_prime_idx: int,
                               nu: float, r_grid=None) -> BeurlingGrowthReport:
    """Grid maximum of |B| (1+|z|)^{-5m} e^{-pi nu |Im z|} plus an N0 fit.

    ``nu`` must exceed m/L.  The exponent fit regresses
    log|B| - pi nu |Im z| on log(1+|z|) along an off-axis ray, estimating
    the polynomial growth exponent N0 of the shifted product.
    """
    m = selection.m_per_interval
    if nu <= m / selection.L:
        raise ParameterError(f"nu must exceed m/L = {m / selection.L:g}")
    nodes = selection.t_prime
    model = make_product_model(ZeroSet(nodes))
    tk = nodes[t_prime_idx]
    r_cert = model.certified_radius() - tk
    if r_cert < 4.0:
        raise ParameterError(
            "node too close to the certified radius for a growth diagnostic")
    if r_grid is None:
        r_grid = np.linspace(2.0, min(80.0, 0.8 * r_cert), 30)
    r = np.asarray(r_grid, dtype=float)
    angles = np.array([0.15, 0.5, 1.0, 1.45])
    zs = (r[:, None] * np.exp(1j * angles[None, :])).ravel()
    logb = _b_log_many(nodes, model.s2_tail, t_prime_idx, zs).real
    ratio = (logb - 5.0 * m * np.log1p(np.abs(zs)) - math.pi * nu * np.abs(zs.imag))
    # N0: polynomial envelope of |B| on the real axis, sampled between the
    # shifted zeros where the exponential factor is 1 and |B| peaks locally;
    # arguments stay inside the certified radius of the underlying product
    sym = np.sort(np.concatenate([nodes, -nodes]) - tk)
    mids = 0.5 * (sym[:-1] + sym[1:])
    mids = mids[(mids > 0.5) & (mids + tk < model.certified_radius())]
    if mids.size < 8:
        raise ParameterError(
            "too few certified midpoints for the N0 fit; store more nodes")
    logs = _b_log_many(nodes, model.s2_tail, t_prime_idx, mids.astype(complex)).real
    n0 = float(np.polyfit(np.log1p(mids), logs, 1)[0])
    return BeurlingGrowthReport(float(np.exp(ratio.max())), n0, nu, 5 * m)


# ---------------------------------------------------------------------------
# derivative of the product at its nodes

@dataclass(frozen=True)
class DerivativeAtNode:
    value: float
    log_abs_err_bound: float


def product_derivative_at_node(product: ProductModel, t_k: float) -> DerivativeAtNode:
    """Pi'(t_k) = (-2/t_k) prod_{n != k} (1 - t_k^2/t_n^2), tail-corrected.

    ``t_k`` must match a stored zero; the error bound is the same
    second-order tail certificate as for product evaluation.
    """
    g = product.zeros.gammas
    k = int(np.searchsorted(g, t_k))
    cand = [i for i in (k - 1, k, k + 1) if 0 <= i < g.size]
    k = min(cand, key=lambda i: abs(g[i] - t_k))
    if abs(g[k] - t_k) > 1e-9 * max(1.0, abs(t_k)):
        raise NodeError(f"{t_k!r} is not a zero of the model")
    if k >= product.n_trunc:
        raise NodeError("node lies beyond the truncation index")
    tk = g[k]
    g2 = g[: product.n_trunc] ** 2
    f = 1.0 - (tk * tk) / g2
    f[k] = 1.0
    logabs = float(np.log(np.abs(f)).sum()) - tk * tk * product.s2_tail
    sign = -1.0 if k % 2 else 1.0  # k factors below t_k are negative
    value = (-2.0 / tk) * sign * math.exp(logabs)
    return DerivativeAtNode(value, (tk ** 4) * product.s4_tail)


@dataclass(frozen=True)
class EnvelopeFit:
    K0_fit: float
    C_fit: float
    violations: int


def derivative_lower_bound_fit(t_nodes: np.ndarray, d_pi: np.ndarray) -> EnvelopeFit:
    """Fit |Pi'(t_k)| >= C (1 + t_k)^{-K0} as a lower envelope.

    The line is fitted through the lower convex minorant of
    (log(1 + t_k), log|Pi'(t_k)|) and then shifted down so that no node
    violates it; K0_fit is the negated slope.
    """
    t = np.asarray(t_nodes, dtype=float)
    y = np.log(np.abs(np.asarray(d_pi, dtype=float)))
    if t.size < 20:
        raise ParameterError("need at least 20 nodes for the envelope fit")
    x = np.log1p(t)
    if x.max() - x.min() < 1e-12:
        raise ParameterError("degenerate fit: all nodes coincide")
    order = np.argsort(x)
    hull = []
    for i in order:  # monotone chain, lower side
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (x[i] - x1) >= (y[i] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append((x[i], y[i]))
    hx = np.array([p[0] for p in hull])
    hy = np.array([p[1] for p in hull])
    if hx.size >= 2:
        slope, intercept = np.polyfit(hx, hy, 1)
    else:
        slope, intercept = 0.0, hy[0]
    intercept = float(np.min(y - slope * x))  # shift down to clear every node
    violations = int(np.sum(y < slope * x + intercept - 1e-9))
    return EnvelopeFit(float(-slope), float(math.exp(intercept)), violations)


# ---------------------------------------------------------------------------
# the interpolant

@dataclass(frozen=True)
class InterpolantModel:
    selection: UniformSelection
    eta: np.ndarray
    K: int
    product: ProductModel
    d_pi: np.ndarray
    n_terms: int
    K0_fit: float
    N0_fit: float
    cardinal_weights: np.ndarray  # eta_k / ((1+t_k)^K Pi'(t_k)), first n_terms

    @property
    def nodes(self) -> np.ndarray:
        return self.selection.t_prime


def make_interpolant(selection: UniformSelection, eta, K: Optional[int] = None,
                     n_terms: int = 500) -> InterpolantModel:
    """Build the interpolant model: product, node derivatives, weight exponent.

    When K is not supplied it is set to ceil(max(K0, N0)) + 3, one more
    than the required K > max(K0, N0) + 2 so an integer margin remains.
    """
    nodes = selection.t_prime
    eta = np.asarray(eta, dtype=complex)
    if eta.size < nodes.size:
        raise ParameterError("eta must supply a datum for every node")
    eta = eta[: nodes.size]
    product = make_product_model(ZeroSet(nodes))
    # series terms need node derivatives whose tail correction is at least
    # percent-level reliable; the envelope fit needs tighter certification
    n_usable = int(np.searchsorted(nodes, product.certified_radius(log_tol=1.0)))
    n_cert = int(np.searchsorted(nodes, product.certified_radius(log_tol=0.05)))
    if n_terms > n_usable:
        raise ParameterError(
            f"n_terms = {n_terms} exceeds the {n_usable} nodes with reliable "
            f"derivatives; store more nodes beyond the series range")
    if n_cert < 20:
        raise ParameterError(
            "fewer than 20 nodes carry a tight derivative certificate; "
            "store more nodes")
    head = nodes[:n_usable]
    logabs, signs = _kernels.node_derivative_logs(nodes ** 2)
    logabs = logabs[:n_usable] - head ** 2 * product.s2_tail
    d_pi = (-2.0 / head) * signs[:n_usable] * np.exp(logabs)
    if np.any(d_pi == 0.0) or not np.all(np.isfinite(d_pi)):
        raise ParameterError("a node derivative vanished or overflowed")
    env = derivative_lower_bound_fit(nodes[:n_cert], d_pi[:n_cert])
    # B growth diagnostics need headroom between the node and the certified
    # radius, so N0 is sampled from the inner half of the certified prefix
    sample = sorted({0, n_cert // 4, n_cert // 2})
    n0 = max(beurling_growth_diagnostic(selection, i,
                                        1.2 * selection.m_per_interval / selection.L
                                        ).exponent_fit
             for i in sample)
    if K is None:
        K = int(math.ceil(max(env.K0_fit, n0))) + 3
    if K <= max(env.K0_fit, n0) + 2:
        raise ParameterError(
            f"K = {K} must exceed max(K0, N0) + 2 = {max(env.K0_fit, n0) + 2:g}")
    weights = eta[:n_terms] / ((1.0 + nodes[:n_terms]) ** K * d_pi[:n_terms])
    return InterpolantModel(selection, eta, int(K), product, d_pi,
                            int(n_terms), env.K0_fit, float(n0), weights)


def interpolant_eval_many(model: InterpolantModel, zs) -> np.ndarray:
    """Truncated series value at each z, with the B-form near nodes."""
    zs_arr = np.atleast_1d(np.asarray(zs, dtype=complex))
    t = model.nodes[: model.n_terms]
    log_pi, _ = product_log_eval(model.product, zs_arr)
    out = np.empty(zs_arr.shape, dtype=complex)
    flat = zs_arr.ravel()
    log_pi = np.atleast_1d(log_pi).ravel()
    for j, z in enumerate(flat):
        dist = np.abs(z - t)
        near = dist < NEAR_NODE_RADIUS
        wk = model.cardinal_weights
        if near.any():
            wk = wk.copy()
            wk[near] = 0.0
        pi_z = 0.0 if log_pi[j].real == -math.inf else np.exp(log_pi[j])
        total = (1.0 + z) ** model.K * pi_z * _kernels.cardinal_sums(t, wk, np.array([z]))[0]
        for k in np.nonzero(near)[0]:
            tk = t[k]
            b = _b_log_many(model.nodes, model.product.s2_tail, int(k), z - tk)[0]
            total += (model.eta[k] * (1.0 + z) ** model.K
                      / (1.0 + tk) ** model.K * np.exp(b))
        out.ravel()[j] = total
    return out


def interpolant_eval(model: InterpolantModel, z: complex) -> complex:
    return complex(interpolant_eval_many(model, complex(z))[0])


def truncation_diagnostic(model: InterpolantModel, z: complex) -> float:
    """Largest term magnitude in the last block of the truncated series."""
    z = complex(z)
    m = model.selection.m_per_interval
    t = model.nodes[: model.n_terms]
    lo = max(0, model.n_terms - m)
    log_pi, _ = product_log_eval(model.product, z)
    pi_z = 0.0 if log_pi.real == -math.inf else np.exp(log_pi)
    terms = np.abs((1.0 + z) ** model.K * pi_z
                   * model.cardinal_weights[lo:] / (z - t[lo:]))
    return float(terms.max())


@dataclass(frozen=True)
class InterpolationReport:
    max_residual: float
    residuals: np.ndarray
    passed: bool


def verify_interpolation(model: InterpolantModel, tol: float = 1e-6,
                         n_check: int = 20) -> InterpolationReport:
    """Max |g(t_k) - eta_k| over the first n_check nodes."""
    n_check = min(n_check, model.n_terms)
    nodes = model.nodes[:n_check]
    vals = interpolant_eval_many(model, nodes.astype(complex))
    res = np.abs(vals - model.eta[:n_check])
    return InterpolationReport(float(res.max()), res, bool(res.max() <= tol))


@dataclass(frozen=True)
class GrowthReport:
    sector_ratio_max: float
    sector_trend: float
    real_exponent_fit: float
    exponent_cap: float


def verify_growth_bounds(model: InterpolantModel, sector_grid,
                         real_grid) -> GrowthReport:
    """Empirical constants of the sector and real-line growth bounds.

    sector_ratio_max is the grid maximum of |g| delta / ((1+r)^K |Pi|),
    the constant C of the sector bound; its log-log trend in r should be
    flat.  real_exponent_fit is the power of (1+|x|) carried by |g| on the
    real axis, capped by K + N0 + 1.
    """
    zs = np.asarray(sector_grid, dtype=complex)
    xs = np.asarray(real_grid, dtype=float)
    sym = np.concatenate([model.nodes, -model.nodes])
    delta_min = 0.05 * (model.selection.ell - model.selection.h)
    for pts in (zs, xs.astype(complex)):
        d = np.abs(pts[:, None] - sym[None, :]).min(axis=1)
        if np.any(d < delta_min):
            raise GridTouchesZeroError(
                f"grid point within {delta_min:g} of a product zero")
    # ratio via the cardinal sum S: g = (1+z)^K Pi(z) S, so the Pi factor
    # cancels and no overflow can occur
    t = model.nodes[: model.n_terms]
    ratios = np.empty(zs.size)
    for j, z in enumerate(zs):
        s = _kernels.cardinal_sums(t, model.cardinal_weights, np.array([z]))[0]
        delta = float(np.abs(z - sym).min())
        ratios[j] = (abs(s) * delta
                     * (abs(1.0 + z) / (1.0 + abs(z))) ** model.K)
    r = np.abs(zs)
    trend = float(np.polyfit(np.log(r), np.log(ratios + 1e-300), 1)[0])
    gx = np.abs(interpolant_eval_many(model, xs.astype(complex)))
    exp_fit = float(np.polyfit(np.log1p(xs), np.log(gx + 1e-300), 1)[0])
    cap = model.K + model.N0_fit + 1.0
    return GrowthReport(float(ratios.max()), trend, exp_fit, cap)


# ---------------------------------------------------------------------------
# serialization

def interpolant_to_json_obj(model: InterpolantModel) -> dict:
    sel = model.selection
    return {
        "selection": {"L": sel.L, "m_per_interval": sel.m_per_interval,
                      "h": sel.h, "start_n": sel.start_n},
        "K": model.K,
        "n_terms": model.n_terms,
        "K0_fit": model.K0_fit,
        "N0_fit": model.N0_fit,
        "nodes": [float(t) for t in model.nodes],
        "eta_re": [float(e.real) for e in model.eta],
        "eta_im": [float(e.imag) for e in model.eta],
    }
