"""
Command-line front end.

    anosov-lab verify      --config cfg.json [--suite commutation|bracket|holonomy|joint_integrability]
    anosov-lab equivalence --config cfg.json
    anosov-lab conjugacy   --config cfg.json
    anosov-lab report      --out DIR

Exit codes: 0 success, 1 defect breach or mathematical failure, 2 bad config.
Reports are written as ``<out>/<command>.json`` with sorted keys; for a fixed
config and seed they are byte-identical across runs.
"""

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import conjugacy as cj
from .equivalence import (additivity_defect, catalog_map, cu_image_defect, estimate_lambda,
                          leaf_constancy_defect, leaf_preservation_defect, roundtrip_defect,
                          t2bar_profile, T2Profile)
from .errors import AnosovLabError, IncompatibleSpec, MissingArtifacts, NoConvergence, NonPositiveLambda
from .foliations import (MarcusChart, bracket, commutation_defects, joint_integrability_defect,
                         stable_holonomy)
from .models import SuspensionModel, model_from_dict

SCHEMA_VERSION = 1
SUITES = ("commutation", "bracket", "holonomy", "joint_integrability")
DEFAULT_TIMES = [-0.2, -0.15, -0.1, -0.05, 0.05, 0.1, 0.15, 0.2]


class ConfigError(Exception):
    pass


def load_config(args):
    cfg = {}
    if args.config:
        try:
            cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read config {args.config}: {e}") from e
        if not isinstance(cfg, dict):
            raise ConfigError("config must be a JSON object")
    for key in ("seed", "out", "tol", "samples", "suite"):
        v = getattr(args, key, None)
        if v is not None:
            cfg[key] = v
    cfg.setdefault("seed", 0)
    cfg.setdefault("samples", 1000)
    cfg.setdefault("out", "out")
    cfg.setdefault("model", {"kind": "suspension", "matrix": [2, 1, 1, 1], "roof": 1.0})
    try:
        cfg["_model"] = model_from_dict(cfg["model"])
        cfg["_chart"] = MarcusChart(cfg["_model"], float(cfg.get("target", {}).get("time_scale", 1.0)))
    except (KeyError, TypeError, ValueError, AnosovLabError) as e:
        raise ConfigError(f"invalid model: {e}") from e
    return cfg


def _map(cfg):
    if "map" not in cfg:
        raise ConfigError("config needs a 'map' entry")
    try:
        return catalog_map(cfg["map"], cfg["_model"], cfg["_chart"])
    except (KeyError, TypeError, ValueError, IncompatibleSpec) as e:
        raise ConfigError(f"invalid map: {e}") from e


def _check(name, value, threshold):
    return {"name": name, "value": float(value), "threshold": float(threshold),
            "passed": bool(value < threshold)}


def _write_report(cfg, name, report):
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    report = {"schema_version": SCHEMA_VERSION, "command": name, "seed": cfg["seed"],
              "samples": cfg["samples"], "model": cfg["model"],
              "time_scale": cfg["_chart"].time_scale, **report}
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    (out / f"{name}.json").write_text(text)
    return report


def _print_checks(report):
    for c in report.get("checks", []):
        flag = "PASS" if c["passed"] else "FAIL"
        print(f"[{flag}] {c['name']}: {c['value']:.3e} (< {c['threshold']:.1e})")
    for k, v in sorted(report.get("info", {}).items()):
        print(f"[info] {k}: {v}")


def _nearby(ch, x, rng, scale):
    n = x.shape[0]
    a, b, c = rng.uniform(-scale, scale, size=(3, n))
    return ch.h_minus(ch.flow(ch.h_plus(x, a), b), c)


def cmd_verify(cfg):
    ch = cfg["_chart"]
    m = ch.model
    tol = float(cfg.get("tol", 1e-10))
    n = int(cfg["samples"])
    rng = np.random.default_rng(cfg["seed"])
    suites = SUITES if cfg.get("suite") in (None, "all") else (cfg["suite"],)
    unknown = set(suites) - set(SUITES)
    if unknown:
        raise ConfigError(f"unknown suite(s) {sorted(unknown)}")
    checks, info = [], {}
    x = m.sample(n, rng)
    if "commutation" in suites:
        s = rng.uniform(-1, 1, n)
        t = rng.uniform(-5, 5, n)
        plus, minus = commutation_defects(ch, x, s, t)
        checks.append(_check("commutation_h_plus", np.max(plus), tol))
        checks.append(_check("commutation_h_minus", np.max(minus), tol))
        u = rng.uniform(-1, 1, n)
        checks.append(_check("group_law_h_minus",
                             np.max(m.dist(ch.h_minus(ch.h_minus(x, s), u), ch.h_minus(x, s + u))), tol))
    if "bracket" in suites:
        y = _nearby(ch, x, rng, 0.05)
        b = bracket(ch, x, y)
        checks.append(_check("bracket_self", np.max(m.dist(bracket(ch, x, x), x)), tol))
        checks.append(_check("bracket_idempotent_left", np.max(m.dist(bracket(ch, x, b), b)), tol))
        checks.append(_check("bracket_idempotent_right", np.max(m.dist(bracket(ch, b, y), b)), tol))
        ys = ch.h_plus(x, rng.uniform(-0.05, 0.05, n))
        checks.append(_check("bracket_on_stable_leaf", np.max(m.dist(bracket(ch, x, ys), ys)), tol))
        ycu = ch.h_minus(ch.flow(x, rng.uniform(-0.05, 0.05, n)), rng.uniform(-0.05, 0.05, n))
        checks.append(_check("bracket_on_cu_leaf", np.max(m.dist(bracket(ch, x, ycu), x)), tol))
    if "holonomy" in suites:
        xp = ch.h_minus(x, rng.uniform(-0.05, 0.05, n))
        checks.append(_check("holonomy_identity", np.max(m.dist(stable_holonomy(ch, x, x, xp), xp)), tol))
        y = ch.h_plus(x, 0.1)
        img = stable_holonomy(ch, x, y, ch.h_minus(x, 0.1))
        info["holonomy_unstable_deviation"] = float(np.max(np.abs(ch.decompose(y, img).t2)))
    if "joint_integrability" in suites:
        info["joint_integrability_defect_0.1"] = float(np.max(joint_integrability_defect(ch, x, 0.1, 0.1)))
    report = _write_report(cfg, "verify", {"checks": checks, "info": info,
                                           "passed": all(c["passed"] for c in checks)})
    _print_checks(report)
    return 0 if report["passed"] else 1


def _profile(cfg, phi):
    times = cfg.get("times", DEFAULT_TIMES)
    return t2bar_profile(phi, times, n_samples=min(int(cfg["samples"]), 400), seed=cfg["seed"])


def cmd_equivalence(cfg):
    phi = _map(cfg)
    tol = float(cfg.get("tol", 1e-9))
    n = int(cfg["samples"])
    seed = cfg["seed"]
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    prof = _profile(cfg, phi)
    prof.to_csv(out / "t2bar_profile.csv")
    checks, info = [], {}
    checks.append(_check("leaf_preservation", leaf_preservation_defect(phi, n, seed=seed), tol))
    checks.append(_check("roundtrip", roundtrip_defect(phi, n, seed=seed), tol))
    checks.append(_check("t2_constancy_along_unstable_leaves",
                         leaf_constancy_defect(phi, prof.times, n, seed=seed), tol))
    try:
        checks.append(_check("t2bar_additivity", additivity_defect(prof), tol))
    except AnosovLabError as e:
        info["t2bar_additivity"] = str(e)
    cu = cu_image_defect(phi, n, seed=seed)
    info["cu_image_defect"] = cu
    info["t2bar_constancy_defect"] = float(np.max(prof.constancy_defect))
    if cu > tol:
        info["cu_status"] = "non-cu-preserving (suspension only)"
    else:
        info["cu_status"] = "cu-preserving"
    try:
        fit = estimate_lambda(prof)
    except NonPositiveLambda as e:
        report = _write_report(cfg, "equivalence", {"map": phi.to_dict(), "error": str(e),
                                                    "checks": checks, "info": info, "passed": False})
        _print_checks(report)
        print(f"error: {e}", file=sys.stderr)
        return 1
    info["lambda_residual"] = fit.residual
    _write_surfaces(cfg, phi, out)
    report = _write_report(cfg, "equivalence", {
        "map": phi.to_dict(), "lambda": fit.lam, "profile": prof.rows(),
        "checks": checks, "info": info, "passed": all(c["passed"] for c in checks)})
    _print_checks(report)
    print(f"lambda = {fit.lam:.12g}")
    return 0


def _write_surfaces(cfg, phi, out):
    from .renormalization import surface_pair

    x = phi.sample(1, np.random.default_rng(cfg["seed"]))[0]
    t = np.linspace(-0.1, 0.1, 11)
    s = np.linspace(-0.2, 0.2, 11)
    psi, var = surface_pair(phi.target, phi, x, t, s)
    with open(out / "surfaces.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["tag", "t", "s", "x0", "x1", "x2", "x3"][: 3 + psi.points[0, 0].size])
        for sf in (psi, var):
            flat = sf.points.reshape(t.size, s.size, -1)
            for i in range(t.size):
                for j in range(s.size):
                    w.writerow([sf.tag, repr(float(t[i])), repr(float(sf.s[i, j]))]
                               + [repr(float(v)) for v in flat[i, j]])


def cmd_conjugacy(cfg):
    phi = _map(cfg)
    seed = cfg["seed"]
    defect_tol = float(cfg.get("defect_tol", 1e-6))
    psi_tol = float(cfg.get("psi_tol", 1e-10))
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    checks, info, extra = [], {}, {}
    lam_t2 = None
    try:
        lam_t2 = estimate_lambda(_profile(cfg, phi)).lam
    except AnosovLabError as e:
        info["lambda_t2bar_error"] = str(e)
    lam = cfg.get("lambda", lam_t2)
    if lam is None:
        print("error: no lambda given and none could be estimated", file=sys.stderr)
        return 1
    info["lambda_t2bar"] = lam_t2
    try:
        psi, cert = cj.build_psi(phi, float(lam), tol=psi_tol, seed=seed,
                                 defect_samples=int(cfg["samples"]))
    except NoConvergence as e:
        _write_report(cfg, "conjugacy", {"map": phi.to_dict(), "lambda": lam, "error": str(e),
                                         "checks": [], "info": info, "passed": False})
        print(f"error: {e}", file=sys.stderr)
        return 1
    (out / "certificate.json").write_text(cert.to_json() + "\n")
    _write_tau_curve(phi, lam, cert, out, seed)
    checks.append(_check("conjugacy_defect", cert.final_defect, defect_tol))
    checks.append({"name": "cauchy_bound_respected", "value": float(len(cert.violations)),
                   "threshold": 1.0, "passed": cert.ok})
    info["injectivity_min_distance"] = cj.injectivity_probe(psi, 1000, seed=seed)
    if isinstance(phi.model, SuspensionModel):
        from .suspension import extract_section, rigidity_lambda

        try:
            x0 = phi.model.sample(1, np.random.default_rng(seed))[0]
            rig = rigidity_lambda(phi, extract_section(phi.model, x0), seed=seed)
            extra["suspension_rigidity"] = {"lambda": rig.lam, "T": rig.T, "T_prime": rig.T_prime,
                                            "monodromy_defect": rig.monodromy_defect}
            if lam_t2 is not None:
                checks.append(_check("lambda_cross_check", abs(lam_t2 - rig.lam), 1e-8))
        except AnosovLabError as e:
            extra["suspension_rigidity"] = {"error": str(e)}
    report = _write_report(cfg, "conjugacy", {
        "map": phi.to_dict(), "lambda": float(lam), "T_star": cert.T_star, **extra,
        "checks": checks, "info": info, "passed": all(c["passed"] for c in checks)})
    _print_checks(report)
    return 0 if report["passed"] else 1


def _write_tau_curve(phi, lam, cert, out, seed):
    x = phi.sample(1, np.random.default_rng(seed))
    Ts = np.arange(0, int(cert.T_star) + 1, dtype=float)
    taus = np.array([float(cj.tau(phi, lam, x, T)[0]) for T in Ts])
    with open(out / "tau_curve.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["T", "tau", "gap_to_limit", "rate"])
        rate = cj.contraction_rate(phi, lam)
        for T, v in zip(Ts, taus):
            w.writerow([repr(float(T)), repr(float(v)), repr(float(abs(v - taus[-1]))), repr(rate)])


def cmd_report(cfg):
    from . import plotting

    out = Path(cfg["out"])
    made = []
    prof_path = out / "t2bar_profile.csv"
    if prof_path.exists():
        prof = T2Profile.from_csv(prof_path)
        plotting.plot_t2bar(prof.times, prof.t2bar, prof.slope, out / "t2bar.svg")
        made.append("t2bar.svg")
    tau_path = out / "tau_curve.csv"
    if tau_path.exists():
        data = np.loadtxt(tau_path, delimiter=",", skiprows=1, ndmin=2)
        plotting.plot_tau_curve(data[:, 0], data[:, 2], data[0, 3], out / "tau_convergence.svg")
        made.append("tau_convergence.svg")
    surf_path = out / "surfaces.csv"
    if surf_path.exists():
        clouds = {}
        with open(surf_path) as fh:
            for row in list(csv.reader(fh))[1:]:
                clouds.setdefault(row[0], []).append([float(v) for v in row[3:]])
        plotting.plot_surfaces(clouds, out / "surfaces.svg")
        made.append("surfaces.svg")
    if not made:
        raise MissingArtifacts(f"no run outputs found in {out}")
    for name in made:
        print(out / name)
    return 0


COMMANDS = {"verify": cmd_verify, "equivalence": cmd_equivalence,
            "conjugacy": cmd_conjugacy, "report": cmd_report}


def build_parser():
    p = argparse.ArgumentParser(prog="anosov-lab", description=__doc__.split("\n\n")[0].strip())
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="JSON config file")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--out", help="output directory")
        sp.add_argument("--tol", type=float)
        sp.add_argument("--samples", type=int)
        sp.add_argument("--suite", help="verify suite: " + ", ".join(SUITES) + " or all")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        return COMMANDS[args.command](cfg)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except MissingArtifacts as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
