"""
Acceptance gate: one test per primary criterion, each printing a single
PASS/FAIL line with the measured value and the runtime against its budget.
"""

import json
import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

from anosov_lab.cli import main as cli_main
from anosov_lab.conjugacy import build_psi, cauchy_bound, tau, tau_recursion_defect
from anosov_lab.equivalence import (additivity_defect, catalog_map, estimate_lambda,
                                    leaf_constancy_defect, t2bar_profile)
from anosov_lab.foliations import (MarcusChart, bracket, commutation_defects,
                                   joint_integrability_defect, recomposition_defect)
from anosov_lab.models import make_psl2, make_suspension
from anosov_lab.renormalization import (renorm_time, renormalization_stage, renormalized_limit,
                                        sign_change_times, surface_gap, surface_pair)
from anosov_lab.suspension import extract_section, rigidity_lambda

CAT = make_suspension(2, 1, 1, 1, roof=1.0)
PSL2 = make_psl2()
MU = (3 + math.sqrt(5)) / 2
H = math.log(MU)


@contextmanager
def criterion(capsys, label, budget):
    """Time the block and print one verdict line; failures still raise."""
    state = {"detail": ""}
    t0 = time.perf_counter()
    ok = False
    try:
        yield state
        ok = True
    finally:
        dt = time.perf_counter() - t0
        ok = ok and dt < budget
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {label}: {state['detail']} ({dt:.2f}s / {budget}s)")
    assert dt < budget, f"runtime {dt:.2f}s exceeds {budget}s"


def catalog(model):
    if model is CAT:
        specs = [
            {"kind": "identity"},
            {"kind": "unstable_slide", "sigma": 0.3},
            {"kind": "stable_slide", "sigma": 0.2},
            {"kind": "fiber_reparam", "amplitude": 0.05, "mode": 2, "phase": 0.4},
            {"kind": "linear_induced", "matrix": [1, 1, 1, 0]},
            {"kind": "compose", "maps": [{"kind": "unstable_slide", "sigma": -0.1},
                                         {"kind": "stable_slide", "sigma": 0.1}]},
        ]
        return [catalog_map(s, CAT, k) for s in specs for k in (1.0, 0.5)]
    specs = [{"kind": "identity"}, {"kind": "unstable_slide", "sigma": 0.3},
             {"kind": "local_shear", "profile": "signed_square"},
             {"kind": "local_shear", "profile": "linear", "coefficient": 0.5}]
    return [catalog_map(s, PSL2, k) for s in specs for k in (1.0, 2.0)]


def test_c1_marcus_commutation(capsys):
    with criterion(capsys, "C1 Marcus commutation identities", 5) as st:
        rng = np.random.default_rng(1)
        worst = 0.0
        for m in (CAT, PSL2):
            x = m.sample(10_000, rng)
            s = rng.uniform(-1, 1, 10_000)
            t = rng.uniform(-5, 5, 10_000)
            plus, minus = commutation_defects(m, x, s, t)
            worst = max(worst, float(np.max(plus)), float(np.max(minus)))
        st["detail"] = f"max defect {worst:.2e} (< 1e-10)"
        assert worst < 1e-10


def test_c2_bracket_oracle(capsys):
    with criterion(capsys, "C2 psl2 bracket / joint-integrability oracle", 2) as st:
        rng = np.random.default_rng(2)
        s, u = rng.uniform(-0.2, 0.2, (2, 1000))
        x = PSL2.sample(1000, rng)
        nbar = np.zeros((1000, 2, 2))
        nbar[:, 0, 0] = nbar[:, 1, 1] = 1
        nbar[:, 1, 0] = u
        n = np.zeros((1000, 2, 2))
        n[:, 0, 0] = n[:, 1, 1] = 1
        n[:, 0, 1] = s
        y = x @ nbar @ n
        # y = x nbar(u) n(s) = x n(s/(1+su)) a(-2 ln(1+su)) nbar(u/(1+su))
        n_exp = n.copy()
        n_exp[:, 0, 1] = s / (1 + s * u)
        b_err = float(np.max(np.abs(bracket(PSL2, x, y, delta=1.0) - x @ n_exp)))
        ji = joint_integrability_defect(PSL2, x, u, s)
        j_err = float(np.max(np.abs(ji - np.abs(2 * np.log1p(s * u)))))
        spot = float(joint_integrability_defect(PSL2, np.eye(2), 0.1, 0.1))
        st["detail"] = f"bracket err {b_err:.1e}, JI err {j_err:.1e}, spot {spot:.7f} (0.0199007)"
        assert b_err < 1e-9 and j_err < 1e-9
        assert abs(spot - 0.0199007) < 1e-7


def test_c3_plante_dichotomy(capsys):
    with criterion(capsys, "C3 Plante dichotomy witness", 2) as st:
        rng = np.random.default_rng(3)
        x = CAT.sample(1000, rng)
        su, ss = rng.uniform(-0.2, 0.2, (2, 1000))
        susp = float(np.max(joint_integrability_defect(CAT, x, su, ss)))
        mix = float(np.min(joint_integrability_defect(PSL2, PSL2.sample(100, rng), 0.1, 0.1)))
        st["detail"] = f"suspension {susp:.1e} (< 1e-12), psl2 {mix:.4f} (> 1e-3)"
        assert susp < 1e-12 and mix > 1e-3


def test_c4_local_times_recomposition(capsys):
    with criterion(capsys, "C4 local-times recomposition, all catalog maps", 5) as st:
        rng = np.random.default_rng(4)
        worst, count = 0.0, 0
        for m in (CAT, PSL2):
            for phi in catalog(m):
                x = phi.sample(1000, rng)
                t = rng.uniform(-0.2, 0.2, 1000)
                worst = max(worst, float(np.max(recomposition_defect(None, phi, x, t))))
                count += 1
        st["detail"] = f"{count} maps, max defect {worst:.1e} (< 1e-9)"
        assert worst < 1e-9


def test_c5_t2bar_linearity(capsys):
    with criterion(capsys, "C5 t2bar constancy, additivity and lambda", 10) as st:
        times = [-0.2, -0.15, -0.1, -0.05, 0.05, 0.1, 0.15, 0.2]
        const, add = 0.0, 0.0
        lams = {}
        for phi in catalog(CAT) + catalog(PSL2)[:4]:
            const = max(const, leaf_constancy_defect(phi, times, 1000, seed=5))
            prof = t2bar_profile(phi, times, 200, seed=5)
            add = max(add, additivity_defect(prof))
            lams[(phi.kind, phi.target.time_scale)] = estimate_lambda(prof).lam
        lam_rescale = lams[("identity", 0.5)]
        lam_slides = [lams[(k, 1.0)] for k in ("unstable_slide", "stable_slide")]
        st["detail"] = (f"constancy {const:.1e}, additivity {add:.1e}, lambda(f_0.5t) "
                        f"{lam_rescale:.9f}, lambda(slides) {max(abs(v - 1) for v in lam_slides):.1e} off 1")
        assert const < 1e-9 and add < 1e-9
        assert abs(lam_rescale - 2.0) < 1e-6
        assert all(abs(v - 1.0) < 1e-6 for v in lam_slides)


def test_c6_conjugacy_construction(capsys):
    with criterion(capsys, "C6 conjugacy as uniform limit", 30) as st:
        phi = catalog_map({"kind": "unstable_slide", "sigma": 0.3}, CAT)
        rng = np.random.default_rng(6)
        x = CAT.sample(1000, rng)
        t3 = tau(phi, 1.0, x, 3.0)
        closed = 0.3 * (math.exp(-3 * H) - 1)
        tau_err = float(np.max(np.abs(t3 - closed)))
        psi, cert = build_psi(phi, 1.0, tol=1e-10, defect_times=np.linspace(-5, 5, 21),
                              defect_samples=1000, seed=6)
        T1, T2 = rng.uniform(0, 3, (2, 1000))
        rec = float(np.max(tau_recursion_defect(phi, 1.0, x, T1, T2)))
        # the bound as stated, recomputed from the certificate
        within = all(s["increment"] <= cauchy_bound(cert.rate, cert.tau0, s["T"], s["T"] - 1) + 1e-9
                     for s in cert.steps)
        st["detail"] = (f"tau(x,3) {float(t3[0]):.7f} (closed form {closed:.7f}), tau0 {cert.tau0:.6f}, "
                        f"T* {cert.T_star:.0f}, final defect {cert.final_defect:.1e}, recursion {rec:.1e}")
        assert abs(float(t3[0]) + 0.2832816) < 1e-7 and tau_err < 1e-7
        assert abs(cert.tau0 - 0.185410) < 1e-6
        assert within and cert.ok
        assert cert.final_defect < 1e-6
        assert rec < 1e-9


def test_c7_suspension_rigidity(capsys):
    with criterion(capsys, "C7 suspension rigidity lambda = T'/T", 5) as st:
        phi = catalog_map({"kind": "identity"}, CAT, 0.5)
        r = rigidity_lambda(phi, extract_section(CAT, np.array([0.2, 0.4, 0.3])))
        lam_t2 = estimate_lambda(t2bar_profile(phi, [-0.1, -0.05, 0.05, 0.1])).lam
        st["detail"] = (f"T {r.T}, T' {r.T_prime:.12f}, lambda {r.lam:.12f}, monodromy {r.monodromy_defect:.1e}, "
                        f"|lambda_t2bar - lambda| {abs(lam_t2 - r.lam):.1e}")
        assert r.T == 1.0
        assert abs(r.T_prime - 2.0) < 1e-10 and abs(r.lam - 2.0) < 1e-10
        assert r.monodromy_defect < 1e-10
        assert abs(lam_t2 - r.lam) < 1e-8


def test_c8_renormalization(capsys):
    with criterion(capsys, "C8 renormalization lab", 60) as st:
        ch = MarcusChart(CAT)
        worst_excess = -math.inf
        inputs = 0
        t = np.linspace(-0.15, 0.15, 9)
        s = np.linspace(-0.2, 0.2, 9)
        x = np.array([-0.2, 0.0, 0.0])
        for phi in catalog(CAT):
            psi, var = surface_pair(phi.target, phi, x, t, s)
            for T in (0.0, 1.0, 3.0):
                g = surface_gap(psi, var, T, phi.target)
                worst_excess = max(worst_excess, g.gap - g.bound)
                inputs += 1
        for phi in catalog(PSL2):
            x0 = phi.sample(1, np.random.default_rng(8))[0]
            psi, var = surface_pair(phi.target, phi, x0, np.linspace(-0.1, 0.1, 5), np.linspace(-0.05, 0.05, 5))
            for T in (0.0, 1.0, 2.0):
                g = surface_gap(psi, var, T, phi.target)
                worst_excess = max(worst_excess, g.gap - g.bound)
                inputs += 1
        log_err = max(abs(renorm_time(h, L, L * math.exp(-h * k)) - k)
                      for h in (0.5, 1.0, H, 2.0) for L in (0.05, 0.1, 0.5) for k in range(0, 13))
        L = 0.1
        sslide = catalog_map({"kind": "stable_slide", "sigma": 0.2}, CAT)
        pairs = sign_change_times(sslide, x, 0.3, alphas=[L * math.exp(-H * n) for n in range(2, 9)])
        stages = [renormalization_stage(ch, sslide, x, L, p) for p in pairs]
        for sg in stages:
            g = surface_gap(sg.psi, sg.varphi, sg.T, ch)
            worst_excess = max(worst_excess, g.gap - g.bound)
            inputs += 1
        tab = renormalized_limit(ch, [sg.varphi for sg in stages], [sg.T for sg in stages], L)
        rel = tab.rate() / math.exp(-H) - 1
        st["detail"] = (f"{inputs} gap inputs, max gap - bound {worst_excess:.1e} (<= 1e-9), "
                        f"log identity {log_err:.1e}, rate {tab.rate():.5f} vs e^-h {math.exp(-H):.5f} "
                        f"({100 * rel:+.2f}%)")
        assert worst_excess <= 1e-9
        assert log_err < 1e-12
        assert tab.decreasing()
        assert abs(rel) < 0.10


def test_c9_determinism(capsys, tmp_path):
    with criterion(capsys, "C9 determinism of JSON reports", 60) as st:
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"model": {"kind": "suspension", "matrix": [2, 1, 1, 1], "roof": 1.0},
                                   "map": {"kind": "unstable_slide", "sigma": 0.3}}))
        runs = []
        for i in range(2):
            out = tmp_path / f"run{i}"
            for cmd in ("verify", "equivalence", "conjugacy"):
                assert cli_main([cmd, "--config", str(cfg), "--out", str(out), "--seed", "42"]) == 0
            runs.append({p.name: p.read_bytes() for p in sorted(out.glob("*.json"))})
        same = runs[0] == runs[1]
        st["detail"] = f"{len(runs[0])} JSON reports, byte-identical: {same}"
        assert same and len(runs[0]) == 4
