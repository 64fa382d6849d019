"""The numba and numpy kernel paths must agree to rounding."""

import os
import subprocess
import sys

import numpy as np
from numpy.testing import assert_allclose

from uniqlab import _kernels


def test_log_factor_sums_paths_agree():
    rng = np.random.default_rng(0)
    g2 = np.arange(1.0, 5001.0) ** 2
    zs = rng.uniform(-8, 8, 40) + 1j * rng.uniform(-8, 8, 40)
    a = _kernels.log_factor_sums(g2, zs)
    b = _kernels.log_factor_sums_numpy(g2, zs)
    assert_allclose(a, b, rtol=1e-10, atol=1e-10)


def test_shifted_log_sum_paths_agree():
    rng = np.random.default_rng(1)
    roots = np.sort(rng.uniform(1.0, 500.0, 2000))
    w = 3.0 - 2.0j
    assert_allclose(_kernels.shifted_log_sum(roots, w),
                    _kernels.shifted_log_sum_numpy(roots, w), rtol=1e-11)


def test_cardinal_sums_paths_agree_and_skip_zero_weights():
    rng = np.random.default_rng(2)
    t = np.arange(1.0, 301.0)
    wk = rng.normal(size=300) + 1j * rng.normal(size=300)
    wk[7] = 0.0
    zs = np.array([0.3 + 0.1j, 8.0 + 0.0j, t[7] + 0.0j])  # z on a masked node
    a = _kernels.cardinal_sums(t, wk, zs)
    b = _kernels.cardinal_sums_numpy(t, wk, zs)
    assert np.all(np.isfinite(a))
    assert_allclose(a, b, rtol=1e-11)


def test_hermite_rows_paths_agree():
    x = np.linspace(-6, 6, 301)
    assert_allclose(_kernels.hermite_rows(x, 30),
                    _kernels.hermite_rows_numpy(x, 30), rtol=1e-12, atol=1e-300)


def test_node_derivative_logs_paths_agree():
    g2 = (2.0 * np.arange(1.0, 201.0)) ** 2
    la, sa = _kernels.node_derivative_logs(g2)
    lb, sb = _kernels.node_derivative_logs_numpy(g2)
    assert_allclose(la, lb, rtol=1e-11)
    assert_allclose(sa, sb)


def test_env_flag_selects_numpy_fallback():
    code = ("import uniqlab._kernels as k; "
            "assert not k.NUMBA_ENABLED; "
            "assert k.log_factor_sums is k.log_factor_sums_numpy")
    env = dict(os.environ, UNIQLAB_NO_NUMBA="1")
    subprocess.run([sys.executable, "-c", code], check=True, env=env)
