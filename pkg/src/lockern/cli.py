"""Command-line entry point.

Subcommands: gen-data, torus, quad, sphere, manifold, zonal, masc, report.
Global flags: --seed, --config, --out-dir, --threads.  Every stochastic run
is a pure function of (arguments, seed); reports echo their configuration.
"""

import argparse
import json
import os
import sys
import time

import numpy as np

from . import __version__, backend
from .datasets import GEN_KINDS, gen_data, read_csv, write_csv
from .experiments import EXPERIMENTS, run_experiment
from .filters import get_filter
from .manifold import AmbientLabeledCloud, ManifoldEstimator
from .masc import MascConfig, MetricCloud, masc_pipeline
from .quadrature import PointCloud, QuadratureRule, mz_norm_estimate, parse_domain, solve_weights
from .torus import TorusSamples, sigma_n
from .zonal import synthesize


def _outpath(args, name):
    if args.out_dir:
        os.makedirs(args.out_dir, exist_ok=True)
        return os.path.join(args.out_dir, name)
    return name


def _write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
    print(f"wrote {path}")


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------

def _cmd_gen_data(args):
    params = {}
    for key in ("m", "per_arc", "n_each", "ambient_dim"):
        v = getattr(args, key)
        if v is not None:
            params[key] = v
    for key in ("noise", "eccentricity"):
        v = getattr(args, key)
        if v is not None:
            params[key] = v
    header, rows = gen_data(args.kind, params, args.seed)
    write_csv(args.out, header, rows)
    print(f"wrote {args.out} ({len(rows)} rows)")


def _cmd_torus_approx(args):
    header, data = read_csv(args.data)
    q = len(header) - 1
    samples = TorusSamples(q=q, points=data[:, :q], values=data[:, q],
                           weights=np.full(len(data), 1.0 / len(data)))
    if samples.grid_layout() is not None:
        samples.weights = np.full(len(data), 1.0 / len(data))
    pheader, pdata = read_csv(args.probes)
    probes = pdata[:, :q]
    filt = get_filter(args.filter)
    vals = np.asarray(sigma_n(samples, filt, args.n, probes)).real
    out_rows = [list(p) + [v] for p, v in zip(probes, vals)]
    write_csv(args.out, [f"x{i+1}" for i in range(q)] + ["value"], out_rows)
    report = {"n": args.n, "filter": filt.kind, "errors": []}
    if pdata.shape[1] > q:
        err = np.abs(vals - pdata[:, q])
        report["errors"] = [{"threshold": 10.0 ** (-x),
                             "percent": 100.0 * float(np.mean(err < 10.0 ** (-x)))}
                            for x in range(2, 11)]
    _write_json(args.report, report)


def _cmd_torus_fig4(args):
    payload = run_experiment("fig4", {})
    path = _outpath(args, "fig4.json")
    slim = {k: v for k, v in payload.items() if k != "degrees"}
    slim["degrees"] = {n: {kk: vv for kk, vv in d.items() if not kk.endswith("_err")}
                       for n, d in payload["degrees"].items()}
    _write_json(path, slim)
    from .svg import line_plot
    for n, d in payload["degrees"].items():
        xs = np.linspace(-1, 1, len(d["fourier_err"]))
        line_plot(_outpath(args, f"fig4_n{n}.svg"), xs,
                  {"fourier": d["fourier_err"], "localized": d["sigma_err"]},
                  title=f"pointwise error, degree {n}", xlabel="x / pi",
                  ylabel="log10 error", ylog=True)
    print(f"fig4: " + ", ".join(
        f"n={n}: fourier {d['fourier_pct']:.2f}% sigma {d['sigma_pct']:.2f}%"
        for n, d in payload["degrees"].items()))


def _cmd_quad_solve(args):
    dom, q = parse_domain(args.domain)
    header, data = read_csv(args.points)
    dim = q + 1 if dom == "sphere" else q
    cloud = PointCloud(dom, q, data[:, :dim])
    rule = solve_weights(cloud, args.order)
    if args.mz:
        rule.mz_norm_estimate = mz_norm_estimate(rule, seed=args.seed)
    with open(args.out, "w") as fh:
        fh.write(rule.to_json())
    print(f"wrote {args.out}: residual={rule.moment_residual:.3e} "
          f"mz={rule.mz_norm_estimate}")


def _cmd_sphere(args):
    if args.sphere_cmd == "bench-table2":
        payload = run_experiment("table2", {"seeds": [args.seed]})
        run = payload["runs"][0]
        _write_json(args.out or _outpath(args, "table2.json"), payload)
        if args.errors_csv:
            res = run_experiment("table2", {"seeds": [args.seed]})  # reproducible
        from .svg import line_plot
        xs = payload["runs"][0]["threshold_exponents"]
        line_plot(_outpath(args, "table2.svg"), xs,
                  {m: payload["average"][m] for m in payload["average"]},
                  title="percent of test points below 1e-x", xlabel="x",
                  ylabel="percent")
    else:
        payload = run_experiment("remark79", {"seed": args.seed})
        _write_json(args.out or _outpath(args, "remark79.json"), payload)


def _cmd_manifold(args):
    header, data = read_csv(args.data)
    dim = args.ambient_dim + 1
    cloud = AmbientLabeledCloud(args.ambient_dim, args.manifold_dim,
                                data[:, :dim], data[:, dim])
    est = ManifoldEstimator(cloud, args.degree, get_filter(args.filter),
                            normalization=args.mode)
    pheader, pdata = read_csv(args.probes)
    vals = est.evaluate(pdata[:, :dim], on_empty="nan")
    report = {"degree": args.degree, "mode": args.mode,
              "values": np.asarray(vals).tolist()}
    if pdata.shape[1] > dim:
        err = np.abs(np.asarray(vals) - pdata[:, dim])
        report["sup_error"] = float(np.nanmax(err))
    _write_json(args.out, report)


def _cmd_zonal(args):
    header, data = read_csv(args.data)
    pts = data[:, :3]
    vals = data[:, 3]
    if data.shape[1] > 4:
        w = data[:, 4]
    else:
        w = np.full(len(pts), 1.0 / len(pts))
    mu = QuadratureRule(cloud=PointCloud("sphere", 2, pts), weights=w,
                        order=2 * args.degree, moment_residual=float("nan"))
    with open(args.rule) as fh:
        nu = QuadratureRule.from_json(fh.read())
    net = synthesize(mu, vals, nu, args.degree, args.gamma,
                     filt=get_filter(args.filter))
    with open(args.out, "w") as fh:
        fh.write(net.to_json())
    print(f"wrote {args.out}: {len(net)} centers, sum|a|={net.coeff_l1():.4g}")


def _cmd_masc(args):
    header, data = read_csv(args.data)
    pts = data[:, :len(header)]
    lheader, ldata = read_csv(args.labels_oracle)
    labels = ldata[:, -1].astype(int)
    if len(labels) != len(pts):
        raise SystemExit("labels file must align row-for-row with the data file")
    if pts.shape[1] == 1:
        cloud = MetricCloud.torus(pts[:, 0])
    else:
        cloud = MetricCloud.euclidean(pts)
    eta = None if args.eta == "auto" else float(args.eta)
    cfg = MascConfig(n=args.n, theta=args.theta, eta=eta, budget=args.budget,
                     hierarchical=args.hierarchical)
    queries = []

    def oracle(i):
        queries.append(i)
        return int(labels[i])

    res = masc_pipeline(cloud, oracle, cfg)
    acc = float(np.mean(res["labels"] == labels))
    payload = {"clusters": len(res["partition"].clusters),
               "queries": res["queries"], "accuracy": acc,
               "eta": res["eta"], "labels": res["labels"].tolist()}
    _write_json(args.out, payload)
    print(f"masc: {payload['clusters']} clusters, {len(res['queries'])} queries, "
          f"accuracy {acc:.4f}")


def _plot_report(payload, out_dir):
    from .svg import line_plot, scatter_plot
    exp = payload["experiment"]
    res = payload["results"]
    os.makedirs(out_dir, exist_ok=True)
    if exp == "fig4":
        for n, d in res["degrees"].items():
            if "fourier_err" not in d:
                continue
            xs = np.linspace(-1, 1, len(d["fourier_err"]))
            line_plot(os.path.join(out_dir, f"fig4_n{n}.svg"), xs,
                      {"fourier": d["fourier_err"], "localized": d["sigma_err"]},
                      title=f"pointwise error, degree {n}", xlabel="x / pi",
                      ylabel="log10 error", ylog=True)
    elif exp == "table2":
        xs = res["runs"][0]["threshold_exponents"]
        line_plot(os.path.join(out_dir, "table2.svg"), xs, res["average"],
                  title="percent of test points below 1e-x", xlabel="x",
                  ylabel="percent")
    elif exp == "mixture_support":
        curve = res["probe_curve"]
        line_plot(os.path.join(out_dir, "mixture_support.svg"), curve["x"],
                  {"F": curve["F"]}, title="support estimator", xlabel="x",
                  ylabel="F")
    elif exp == "circle_rate":
        ns = [r["n"] for r in res["rows"]]
        line_plot(os.path.join(out_dir, "circle_rate.svg"), ns,
                  {"sup error": [r["sup_error"] for r in res["rows"]]},
                  title="estimator error vs degree", xlabel="n",
                  ylabel="log10 error", ylog=True)


def _cmd_report(args):
    with open(args.config) as fh:
        cfg = json.load(fh)
    if not cfg or "experiment" not in cfg:
        raise SystemExit("config must be a JSON object with an 'experiment' key")
    exp = cfg["experiment"]
    params = dict(cfg.get("config", {}))
    if args.seed is not None:
        params["seed"] = args.seed
    t0 = time.time()
    results = run_experiment(exp, params)
    payload = {"experiment": exp, "config": params, "results": results,
               "meta": {"wall_clock_s": time.time() - t0, "version": __version__}}
    out_dir = args.out_dir or "."
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, f"{exp}_report.json")
    _write_json(path, payload)
    if args.plots:
        _plot_report(payload, out_dir)
    return payload


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="lockern",
                                description="localized-kernel approximation toolkit")
    p.add_argument("--seed", type=int, default=None, help="master seed")
    p.add_argument("--config", default=None, help="JSON config file (report)")
    p.add_argument("--out-dir", default=None)
    p.add_argument("--threads", type=int, default=None)
    sub = p.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("gen-data", help="write a synthetic dataset CSV")
    g.add_argument("--kind", required=True, choices=GEN_KINDS)
    g.add_argument("--out", required=True)
    g.add_argument("--m", type=int, default=None)
    g.add_argument("--per-arc", dest="per_arc", type=int, default=None)
    g.add_argument("--n-each", dest="n_each", type=int, default=None)
    g.add_argument("--ambient-dim", dest="ambient_dim", type=int, default=None)
    g.add_argument("--noise", type=float, default=None)
    g.add_argument("--eccentricity", type=float, default=None)
    g.set_defaults(func=_cmd_gen_data, seed_default=7)

    t = sub.add_parser("torus", help="torus approximation operators")
    tsub = t.add_subparsers(dest="torus_cmd", required=True)
    ta = tsub.add_parser("approx", help="filtered projection from gridded CSV data")
    ta.add_argument("--data", required=True)
    ta.add_argument("--probes", required=True)
    ta.add_argument("--n", type=int, required=True)
    ta.add_argument("--filter", default="quintic")
    ta.add_argument("--out", required=True)
    ta.add_argument("--report", required=True)
    ta.set_defaults(func=_cmd_torus_approx, seed_default=1)
    tf = tsub.add_parser("fig4", help="localized vs plain projection comparison")
    tf.set_defaults(func=_cmd_torus_fig4, seed_default=1)

    q = sub.add_parser("quad", help="scattered quadrature rules")
    qsub = q.add_subparsers(dest="quad_cmd", required=True)
    qs = qsub.add_parser("solve")
    qs.add_argument("--domain", required=True, help="sphere2 | torus1 | torus2")
    qs.add_argument("--order", type=int, required=True)
    qs.add_argument("--points", required=True)
    qs.add_argument("--out", required=True)
    qs.add_argument("--mz", action="store_true", help="estimate the MZ norm")
    qs.set_defaults(func=_cmd_quad_solve, seed_default=0)

    s = sub.add_parser("sphere", help="sphere benchmark experiments")
    ssub = s.add_subparsers(dest="sphere_cmd", required=True)
    sb = ssub.add_parser("bench-table2")
    sb.add_argument("--out", default=None)
    sb.add_argument("--errors-csv", action="store_true")
    sb.set_defaults(func=_cmd_sphere, seed_default=1)
    sr = ssub.add_parser("remark79")
    sr.add_argument("--out", default=None)
    sr.set_defaults(func=_cmd_sphere, seed_default=1)

    m = sub.add_parser("manifold", help="kernel regression on point-cloud manifolds")
    msub = m.add_subparsers(dest="manifold_cmd", required=True)
    mr = msub.add_parser("regress")
    mr.add_argument("--ambient-dim", dest="ambient_dim", type=int, required=True)
    mr.add_argument("--manifold-dim", dest="manifold_dim", type=int, required=True)
    mr.add_argument("--degree", type=int, required=True)
    mr.add_argument("--data", required=True)
    mr.add_argument("--probes", required=True)
    mr.add_argument("--mode", choices=("raw", "ratio"), default="raw")
    mr.add_argument("--filter", default="quintic")
    mr.add_argument("--out", required=True)
    mr.set_defaults(func=_cmd_manifold, seed_default=1)

    z = sub.add_parser("zonal", help="zonal network synthesis")
    zsub = z.add_subparsers(dest="zonal_cmd", required=True)
    zf = zsub.add_parser("fit")
    zf.add_argument("--gamma", type=float, required=True)
    zf.add_argument("--degree", type=int, required=True)
    zf.add_argument("--data", required=True, help="CSV x,y,z,value[,weight]")
    zf.add_argument("--rule", required=True, help="discretizing rule JSON")
    zf.add_argument("--filter", default="quintic")
    zf.add_argument("--out", required=True)
    zf.set_defaults(func=_cmd_zonal, seed_default=1)

    mc = sub.add_parser("masc", help="support-separation classification")
    mcsub = mc.add_subparsers(dest="masc_cmd", required=True)
    mcr = mcsub.add_parser("run")
    mcr.add_argument("--data", required=True)
    mcr.add_argument("--labels-oracle", dest="labels_oracle", required=True)
    mcr.add_argument("--n", type=int, default=128)
    mcr.add_argument("--theta", type=float, default=0.01)
    mcr.add_argument("--eta", default="auto")
    mcr.add_argument("--budget", type=int, default=64)
    mcr.add_argument("--hierarchical", action="store_true")
    mcr.add_argument("--out", required=True)
    mcr.set_defaults(func=_cmd_masc, seed_default=1)

    r = sub.add_parser("report", help="run a config-described experiment")
    r.add_argument("--config", dest="report_config", default=None)
    r.add_argument("--plots", action="store_true")
    r.set_defaults(func=_cmd_report, seed_default=1)

    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads:
        backend.set_threads(args.threads)
    if args.seed is None:
        args.seed = getattr(args, "seed_default", 1)
    if args.cmd == "report":
        args.config = args.report_config or args.config
        if not args.config:
            raise SystemExit("report needs --config pointing to a JSON file")
    args.func(args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
