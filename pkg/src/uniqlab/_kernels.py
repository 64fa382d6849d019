"""Hot numeric kernels with numba and pure-numpy implementations.

Every kernel exists in two variants: a ``*_numpy`` fallback written with
vectorized numpy, and (when numba is importable) an ``@njit`` loop version.
The module-level aliases without suffix point at the selected variant.
Selection: numba is used when available unless the environment variable
``UNIQLAB_NO_NUMBA`` is set to a truthy value (``1``, ``true``, ``yes``).

Both variants compute the same quantities; they may differ in the last few
ulps because summation order differs.  ``benchmarks/bench_kernels.py``
compares the two paths for speed and agreement.
"""

import os

import numpy as np

_FLAG = os.environ.get("UNIQLAB_NO_NUMBA", "").strip().lower()
NUMBA_DISABLED = _FLAG in {"1", "true", "yes", "on"}

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - exercised via the env flag instead
    NUMBA_AVAILABLE = False

NUMBA_ENABLED = NUMBA_AVAILABLE and not NUMBA_DISABLED


# ---------------------------------------------------------------------------
# canonical product: sum of log(1 - z^2 / gamma_n^2) over a stored prefix

def log_factor_sums_numpy(g2, zs):
    """Sum of log(1 - z^2/gamma_n^2) over all stored gamma^2, per z.

    Parameters
    ----------
    g2 : float array, squared zeros (positive, increasing)
    zs : complex array of evaluation points

    Returns
    -------
    complex array, one log-sum per entry of ``zs``.  A z hitting a zero
    exactly yields -inf real part (the product vanishes).
    """
    g2c = g2.astype(complex)
    out = np.empty(zs.shape, dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        for j, z in enumerate(zs.ravel()):
            out.ravel()[j] = np.log1p(-(z * z) / g2c).sum()
    return out


def shifted_log_sum_numpy(roots, w):
    """Sum of log(1 - w/root) over real nonzero roots, complex branch."""
    with np.errstate(divide="ignore", invalid="ignore"):
        return complex(np.log((1.0 - w / roots).astype(complex)).sum())


def cardinal_sums_numpy(t, wk, zs):
    """Weighted Cauchy-kernel sums sum_k wk_k / (z - t_k), per z.

    Zero-weight terms are skipped, so callers can mask near-node terms by
    zeroing their weights and a z exactly on a masked node stays finite.
    """
    out = np.empty(zs.shape, dtype=complex)
    live = wk != 0.0
    t_live, w_live = t[live], wk[live]
    for j, z in enumerate(zs.ravel()):
        out.ravel()[j] = (w_live / (z - t_live)).sum()
    return out


def node_derivative_logs_numpy(g2):
    """Per node k: sum over n != k of log|1 - g2_k/g2_n|, plus sign parity.

    Used for the derivative of the symmetric canonical product at its own
    zeros; the factor count below t_k fixes the sign, returned as +-1.
    """
    n = g2.size
    logabs = np.empty(n)
    signs = np.empty(n)
    for k in range(n):
        f = 1.0 - g2[k] / g2
        f[k] = 1.0
        logabs[k] = np.log(np.abs(f)).sum()
        signs[k] = -1.0 if k % 2 else 1.0
    return logabs, signs


def hermite_rows_numpy(x, n_max):
    """Rows n = 0..n_max of the FT-adapted Hermite functions at points x.

    h_0(x) = 2^{1/4} e^{-pi x^2}; the three-term recurrence
    h_{n+1} = 2 sqrt(pi/(n+1)) x h_n - sqrt(n/(n+1)) h_{n-1}
    keeps every function at unit L^2 norm under f^(xi) = int f e^{-2 pi i x xi}.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1, x.size))
    out[0] = 2.0 ** 0.25 * np.exp(-np.pi * x * x)
    if n_max >= 1:
        out[1] = 2.0 * np.sqrt(np.pi) * x * out[0]
    for n in range(1, n_max):
        out[n + 1] = (2.0 * np.sqrt(np.pi / (n + 1.0)) * x * out[n]
                      - np.sqrt(n / (n + 1.0)) * out[n - 1])
    return out


if NUMBA_ENABLED:

    @njit(cache=True)
    def _log_factor_sums_nb(g2, zs):
        out = np.empty(zs.size, dtype=np.complex128)
        for j in range(zs.size):
            z2 = zs[j] * zs[j]
            acc = 0.0 + 0.0j
            for i in range(g2.size):
                acc += np.log(1.0 - z2 / g2[i])
            out[j] = acc
        return out

    @njit(cache=True)
    def _shifted_log_sum_nb(roots, w):
        acc = 0.0 + 0.0j
        for i in range(roots.size):
            acc += np.log(1.0 - w / roots[i])
        return acc

    @njit(cache=True)
    def _cardinal_sums_nb(t, wk, zs):
        out = np.empty(zs.size, dtype=np.complex128)
        for j in range(zs.size):
            acc = 0.0 + 0.0j
            for k in range(t.size):
                if wk[k] != 0.0:
                    acc += wk[k] / (zs[j] - t[k])
            out[j] = acc
        return out

    @njit(cache=True)
    def _node_derivative_logs_nb(g2):
        n = g2.size
        logabs = np.empty(n)
        signs = np.empty(n)
        for k in range(n):
            acc = 0.0
            for m in range(n):
                if m != k:
                    acc += np.log(np.abs(1.0 - g2[k] / g2[m]))
            logabs[k] = acc
            signs[k] = -1.0 if k % 2 else 1.0
        return logabs, signs

    @njit(cache=True)
    def _hermite_rows_nb(x, n_max):
        out = np.empty((n_max + 1, x.size))
        for j in range(x.size):
            out[0, j] = 2.0 ** 0.25 * np.exp(-np.pi * x[j] * x[j])
        if n_max >= 1:
            for j in range(x.size):
                out[1, j] = 2.0 * np.sqrt(np.pi) * x[j] * out[0, j]
        for n in range(1, n_max):
            a = 2.0 * np.sqrt(np.pi / (n + 1.0))
            b = np.sqrt(n / (n + 1.0))
            for j in range(x.size):
                out[n + 1, j] = a * x[j] * out[n, j] - b * out[n - 1, j]
        return out

    def log_factor_sums(g2, zs):
        zs = np.ascontiguousarray(zs, dtype=complex)
        res = _log_factor_sums_nb(np.ascontiguousarray(g2, dtype=float),
                                  zs.ravel())
        return res.reshape(zs.shape)

    def shifted_log_sum(roots, w):
        return complex(_shifted_log_sum_nb(
            np.ascontiguousarray(roots, dtype=float), complex(w)))

    def cardinal_sums(t, wk, zs):
        zs = np.ascontiguousarray(zs, dtype=complex)
        res = _cardinal_sums_nb(np.ascontiguousarray(t, dtype=float),
                                np.ascontiguousarray(wk, dtype=complex),
                                zs.ravel())
        return res.reshape(zs.shape)

    def hermite_rows(x, n_max):
        return _hermite_rows_nb(np.ascontiguousarray(x, dtype=float), n_max)

    def node_derivative_logs(g2):
        return _node_derivative_logs_nb(np.ascontiguousarray(g2, dtype=float))

else:
    log_factor_sums = log_factor_sums_numpy
    shifted_log_sum = shifted_log_sum_numpy
    cardinal_sums = cardinal_sums_numpy
    hermite_rows = hermite_rows_numpy
    node_derivative_logs = node_derivative_logs_numpy
