"""Config-driven experiment runner.

Each module operation is exposed as a subcommand.  Parameters come from a
JSON config file (``--config``) merged over per-command defaults; seed,
output path, and format can be set from the command line.  Output tables
embed a hash of the resolved config, and re-running the same config
reproduces files byte for byte.
"""

import argparse
import json
import math
import sys

import numpy as np

from . import interpolation as interp
from . import pairs, products, uniqueness
from .errors import UniqlabError
from .serialize import ARTIFACT_VERSION, ResultTable, config_hash, emit

COMMANDS = ("classify", "product", "slope", "indicator", "jensen",
            "interpolate", "scan", "hardy", "transfer", "morgan", "identities")

DEFAULTS = {
    "classify": {"p": 2.0, "alpha": 0.4, "beta": 0.4, "j_max": 10000,
                 "tail_start": 100, "a": 1.0, "b": 1.0},
    "product": {"spacing": 1.0, "count": 10000, "n_trunc": None,
                "points": [[0.5, 0.0], [0.0, 1.0]]},
    "slope": {"delta": 1.0, "theta": math.pi / 2, "r_min": 50.0,
              "r_max": 200.0, "n_r": 64},
    "indicator": {"function": "gaussian", "rho": 2.0, "n_theta": 32,
                  "r_min": 2.0, "r_max": 12.0, "n_r": 24},
    "jensen": {"b": 1.0, "d": 1.0, "a": 1.0, "delta": 1.0,
               "phi": math.pi / 4, "x_min": 5.0, "x_max": 80.0, "n_x": 1200},
    "interpolate": {"t_spacing": 1.0, "t_count": 6000, "L": 2.0, "m": 1,
                    "h": 1.5, "eta": "ones", "n_terms": 500, "K": None,
                    "n_check": 20},
    "scan": {"p": 2.0, "alpha_min": 0.3, "alpha_max": 0.7, "n_alpha": 10,
             "N": 40, "R": None},
    "hardy": {"m": 2, "N": 2, "alpha": 0.4, "R": 8.0},
    "transfer": {"hermite_n": 2, "size": 8, "alpha": 0.4, "a": 1.0, "b": 1.0,
                 "p": 2.0, "K": None, "grid_max": 8.0, "n_grid": 160},
    "morgan": {"p": 2.0},
    "identities": {"n_random": 1000, "n_theta": 50},
}


def _lattice_pair(p, alpha, beta, j_max, a, b):
    q = pairs.conjugate_exponent(p)
    lam = pairs.make_power_lattice(p, alpha, j_max)
    mu = pairs.make_power_lattice(q, beta, j_max)
    return pairs.PairSpec(lam, mu, p, q, a=a, b=b)


def run_classify(params, rng):
    spec = _lattice_pair(params["p"], params["alpha"], params["beta"],
                         int(params["j_max"]), params["a"], params["b"])
    ts = int(params["tail_start"])
    est_l = pairs.density_functional(spec.lam, spec.p, ts)
    est_m = pairs.density_functional(spec.mu, spec.q, ts)
    verdict = pairs.classify_pair(spec, est_l, est_m)
    cond = pairs.beurling_condition_check(spec, est_l, est_m)
    table = ResultTable(["p", "q", "alpha_bar", "beta_bar", "product_value",
                         "kind", "margin", "beurling_pass"])
    table.add(spec.p, spec.q, est_l.sup, est_m.sup, verdict.product_value,
              verdict.kind, verdict.margin, cond.passed)
    return table


def run_product(params, rng):
    zeros = products.linear_zeros(params["spacing"], int(params["count"]))
    n_trunc = params.get("n_trunc")
    model = products.make_product_model(zeros, None if n_trunc is None else int(n_trunc))
    table = ResultTable(["re", "im", "value_re", "value_im", "log_abs_err_bound"])
    for re, im in params["points"]:
        pv = products.product_eval(model, complex(re, im))
        table.add(float(re), float(im), pv.value.real, pv.value.imag,
                  pv.log_abs_err_bound)
    return table


def run_slope(params, rng):
    delta = params["delta"]
    model = products.sized_product_model(delta, params["r_max"])
    r = np.linspace(params["r_min"], params["r_max"], int(params["n_r"]))
    fit = products.asymptotic_slope_fit(model, params["theta"], r)
    table = ResultTable(["delta", "theta", "slope", "target", "rel_dev"])
    table.add(delta, params["theta"], fit.slope,
              products.product_log_asymptote(delta, 1.0, params["theta"]),
              fit.rel_dev)
    return table


def run_indicator(params, rng):
    f = products.get_function(params["function"])
    theta = np.linspace(0.0, math.pi, int(params["n_theta"]))
    r = np.linspace(params["r_min"], params["r_max"], int(params["n_r"]))
    report = products.indicator_estimate(f, params["rho"], theta, r)
    table = ResultTable(["theta", "h_estimate", "fit_residual"],
                        provenance={"kappa": repr(report.kappa),
                                    "function": f.name})
    for row in products.indicator_report_to_rows(report):
        table.add(*row)
    return table


def run_jensen(params, rng):
    b, d = params["b"], params["d"]
    f = products.get_function(f"sine_decay({b:g},{d:g})")
    gap = 1.0 / (2.0 * b)
    count = int(params["x_max"] / gap) + 64
    gamma = products.ZeroSet(gap * np.arange(1.0, count + 1.0),
                             known_density=2.0 * b)
    x = np.linspace(params["x_min"], params["x_max"], int(params["n_x"]))
    rep = products.jensen_decay_check(f, gamma, params["a"], params["delta"],
                                      params["phi"], x)
    table = ResultTable(["b", "d", "a", "delta", "phi", "empirical_rate",
                         "bound", "pass", "c_gamma", "c_growth_log"])
    table.add(b, d, params["a"], params["delta"], params["phi"],
              rep.empirical_rate, rep.bound, rep.passed, rep.c_gamma,
              rep.c_growth_log)
    return table


def _eta_from_spec(spec, n, rng):
    if spec == "ones":
        return np.ones(n)
    if spec == "random":
        return rng.uniform(-1.0, 1.0, n)
    if isinstance(spec, list):
        return np.asarray(spec, dtype=float)
    raise UniqlabError(f"unknown eta spec {spec!r}")


def run_interpolate(params, rng):
    t = params["t_spacing"] * np.arange(1.0, int(params["t_count"]) + 1.0)
    sel = interp.select_uniform_subsequence(t, params["L"], int(params["m"]),
                                            params["h"])
    eta = _eta_from_spec(params["eta"], sel.t_prime.size, rng)
    k = params.get("K")
    model = interp.make_interpolant(sel, eta, None if k is None else int(k),
                                    int(params["n_terms"]))
    rep = interp.verify_interpolation(model, n_check=int(params["n_check"]))
    table = ResultTable(["node", "eta", "g_value", "residual"],
                        provenance={"K": model.K,
                                    "max_residual": repr(rep.max_residual)})
    vals = interp.interpolant_eval_many(model, model.nodes[: rep.residuals.size]
                                        .astype(complex))
    for tk, ek, gv, res in zip(model.nodes, model.eta, vals, rep.residuals):
        table.add(float(tk), float(ek.real), float(gv.real), float(res))
    return table


def run_scan(params, rng):
    alphas = np.linspace(params["alpha_min"], params["alpha_max"],
                         int(params["n_alpha"]))
    r = params.get("R")
    result = uniqueness.uniqueness_scan(params["p"], alphas, int(params["N"]),
                                        None if r is None else float(r))
    table = ResultTable(["alpha", "sigma_min", "N", "R", "rows_lambda", "rows_mu"],
                        provenance={"transition_alpha":
                                    repr(result.transition_estimate())})
    for i, a in enumerate(result.grid):
        table.add(float(a), float(result.sigma_min[i]), result.N, result.R,
                  int(result.rows_lambda[i]), int(result.rows_mu[i]))
    return table


def run_hardy(params, rng):
    m, N = int(params["m"]), int(params["N"])
    basis = uniqueness.HermiteBasis(max(m + 1, 12))
    j_max = int(math.ceil(params["R"] ** 2 / (2 * params["alpha"]))) + 2
    lat = pairs.make_power_lattice(2.0, params["alpha"], j_max)
    lat = pairs.SampleSequence(lat.points[np.abs(lat.points) <= params["R"]])
    rep = uniqueness.hardy_growth_test(basis, m, N, lat)
    table = ResultTable(["m", "N", "fit_exponent", "bounded", "n_points"])
    table.add(rep.m, rep.N, rep.fit_exponent, rep.bounded, rep.n_points)
    return table


def run_transfer(params, rng):
    n = int(params["hermite_n"])
    size = max(int(params["size"]), n + 1)
    coeffs = np.zeros(size)
    coeffs[n] = 1.0
    k = params.get("K")
    spec = _lattice_pair(params["p"], params["alpha"], params["alpha"],
                         4000, params["a"], params["b"])
    spec = pairs.PairSpec(spec.lam, spec.mu, spec.p, spec.q, a=spec.a,
                          b=spec.b, K=float(n if k is None else k))
    lo = uniqueness.turning_point(n) + 2.0
    grid = np.linspace(lo, max(params["grid_max"], lo + 2.0), int(params["n_grid"]))
    rep = uniqueness.decay_transfer_experiment(coeffs, spec, grid, grid)
    table = ResultTable(["hermite_n", "K", "K_tilde", "sup_lambda", "sup_mu",
                         "sup_real", "sup_freq"])
    table.add(n, spec.K, -1 if rep.k_tilde is None else rep.k_tilde,
              rep.sup_lambda, rep.sup_mu, rep.sup_real, rep.sup_freq)
    return table


def run_morgan(params, rng):
    p = params["p"]
    q = pairs.conjugate_exponent(p)
    table = ResultTable(["p", "q", "r", "threshold"])
    table.add(p, q, min(p, q), pairs.morgan_threshold(p, q))
    return table


def run_identities(params, rng):
    n = int(params["n_random"])
    table = ResultTable(["check", "n_cases", "worst", "pass"])

    worst = 0.0
    for p in (1.2, 1.5, 2.0, 3.0, 5.0):
        grid = math.pi / (2 * p) * np.arange(1, int(params["n_theta"]) + 1) \
            / (int(params["n_theta"]) + 1)
        rep = pairs.trig_inequality_check(p, grid)
        worst = min(worst, rep.min_margin) if worst else rep.min_margin
    table.add("trig_inequality_min_margin", 5 * int(params["n_theta"]),
              worst, worst > 0.0)

    worst = 0.0
    for _ in range(n):
        p = rng.uniform(1.1, 5.0)
        worst = max(worst, pairs.eta_substitution_check(
            rng.uniform(0.1, 2.0), rng.uniform(0.1, 10.0), p,
            pairs.conjugate_exponent(p)))
    table.add("eta_substitution_max_residual", n, worst, worst <= 1e-12)

    agree = 0
    for _ in range(n):
        p = rng.uniform(1.1, 5.0)
        res = pairs.criticality_algebra_check(rng.uniform(0.05, 3.0),
                                              rng.uniform(0.05, 3.0), p,
                                              pairs.conjugate_exponent(p))
        agree += res.equivalent
    table.add("criticality_algebra_agree", n, float(n - agree), agree == n)

    worst = 0.0
    for _ in range(100):
        p = rng.uniform(1.1, 5.0)
        q = pairs.conjugate_exponent(p)
        a, b = rng.uniform(0.1, 10.0), rng.uniform(0.1, 10.0)
        prod = (0.5 * (b / a) ** (1 / q)) ** (1 / p) * (0.5 * (a / b) ** (1 / p)) ** (1 / q)
        worst = max(worst, abs(prod - 0.5))
    table.add("beurling_bound_product_dev", 100, worst, worst <= 1e-12)
    return table


RUNNERS = {
    "classify": run_classify, "product": run_product, "slope": run_slope,
    "indicator": run_indicator, "jensen": run_jensen,
    "interpolate": run_interpolate, "scan": run_scan, "hardy": run_hardy,
    "transfer": run_transfer, "morgan": run_morgan, "identities": run_identities,
}


def resolve_config(command: str, config_path=None, seed=0) -> dict:
    params = dict(DEFAULTS[command])
    if config_path:
        with open(config_path) as fh:
            loaded = json.load(fh)
        params.update(loaded.get("params", loaded))
    return {"command": command, "params": params, "seed": int(seed)}


def run(config: dict) -> ResultTable:
    """Dispatch a resolved config to its runner and stamp provenance."""
    command = config["command"]
    if command not in RUNNERS:
        raise UniqlabError(f"unknown command {command!r}")
    rng = np.random.default_rng(config["seed"])
    table = RUNNERS[command](config["params"], rng)
    table.provenance["config_hash"] = config_hash(config)
    table.provenance["artifact_version"] = ARTIFACT_VERSION
    return table


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="uniqlab",
        description="desk-scale experiments on discrete uncertainty principles")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", default=None, help="JSON params file")
        sp.add_argument("--out", default=None, help="output path")
        sp.add_argument("--format", default="csv", choices=("csv", "json"))
        sp.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)
    try:
        config = resolve_config(args.command, args.config, args.seed)
        table = run(config)
    except (UniqlabError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.out:
        emit(table, args.out, args.format)
    else:
        print(",".join(str(c) for c in table.columns))
        for row in table.rows:
            print(",".join(str(v) for v in row))
    return 0


if __name__ == "__main__":
    sys.exit(main())
