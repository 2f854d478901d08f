"""Acceptance gate: nine criteria, one test and one pass/fail line each.

Criteria 1 and 2 encode externally supplied headline expectations for the
two SO(4) presets (slope bracket, interior horospherical minimizer). The
package's own mathematics, cross-checked by closed forms, Monte Carlo, and
dense grid scans, lands elsewhere (wall minimizers; see the printed
values), so those two criteria fail and are intentionally not loosened.
"""

import math
import time
from fractions import Fraction

import numpy as np

from gcdeg import (GcdegError, McConfig, approximate_p, build_polytope,
                   central_fibre_report, check_superadditive, dh_density,
                   filtration_table, get_engine, h_plfunction, h_vector,
                   integrate_region, integrate_simplex, ke_test, lattice_points,
                   mc_integrate, minimize_h, pl_concave, region_moments,
                   stability_verdict, table_from_values, triangulate)
from gcdeg._poly import Polynomial
from gcdeg.cli import build_from_doc
from gcdeg.hfun import barycenter_grad_hess
from gcdeg.presets import get_preset

from conftest import run_cli

BRACKET = (0.15210775, 0.15210800)


def _criterion(n, ok, detail):
    line = f"CRITERION {n}: {'PASS' if ok else 'FAIL'} - {detail}"
    print(line)
    assert ok, line


def _load(preset):
    return build_from_doc(get_preset(preset))


def _full_verdict(preset):
    rs, poly, opts = _load(preset)
    rep = minimize_h(rs, poly, opts)
    cf = central_fibre_report(rs, rep)
    return rs, poly, rep, cf, stability_verdict(rs, rep, cf)


def test_criterion_1_case1_headline_bracket():
    t0 = time.perf_counter()
    outcomes = {}
    for preset in ("so4-case1", "so4-case1-ineqlist"):
        try:
            _, _, rep, _, verdict = _full_verdict(preset)
            s = rep.lambda0[0]
            on_ray = abs(rep.lambda0[0] + rep.lambda0[1]) <= 1e-9
            hit = (BRACKET[0] < s < BRACKET[1] and on_ray
                   and rep.active_set == (1,)
                   and verdict.kind == "ModifiedKStable")
            outcomes[preset] = (hit, f"s={s:.10f}")
        except GcdegError as e:
            outcomes[preset] = (False, type(e).__name__)
    elapsed = time.perf_counter() - t0
    hits = [p for p, (hit, _) in outcomes.items() if hit]
    ok = len(hits) == 1 and elapsed <= 10.0
    detail = (f"bracket {BRACKET}; "
              + "; ".join(f"{p}: {'hit' if h else 'miss'} ({note})"
                          for p, (h, note) in outcomes.items())
              + f"; {elapsed:.1f}s")
    _criterion(1, ok, detail)


def test_criterion_2_case2_interior_horospherical():
    t0 = time.perf_counter()
    rs, _, rep, cf, verdict = _full_verdict("so4-case2")
    two_rho = [float(x) for x in rs.two_rho]
    dist = math.sqrt(sum((b - t) ** 2 for b, t in zip(rep.b_lambda0, two_rho)))
    interior = rep.active_set == ()
    elapsed = time.perf_counter() - t0
    ok = (interior and dist <= 1e-8 and cf.horospherical
          and verdict.kind == "ModifiedKStable" and elapsed <= 10.0)
    detail = (f"active_set={rep.active_set} (interior={interior}), "
              f"|b - 2rho|={dist:.6f}, horospherical={cf.horospherical}, "
              f"verdict={verdict.kind}, lambda0=({rep.lambda0[0]:.6f}, "
              f"{rep.lambda0[1]:.6f}), multiplier="
              f"{rep.multipliers[0] if rep.multipliers else None}; {elapsed:.1f}s")
    _criterion(2, ok, detail)


def test_criterion_3_so4_cases_fail_ke_test():
    results = []
    for preset in ("so4-case1", "so4-case2"):
        rs, poly, _ = _load(preset)
        ke = ke_test(rs, poly, tol=1e-8)
        results.append((preset, ke.verdict, min(ke.coefficients)))
    ok = all(v == "Unstable" for _, v, _ in results)
    detail = "; ".join(f"{p}: {v} (min coeff {c:.6f})" for p, v, c in results)
    _criterion(3, ok, detail)


def test_criterion_4_sl2_oracle_chain():
    rs, seg, opts = _load("sl2")
    ke = ke_test(rs, seg)
    rep = minimize_h(rs, seg, opts)
    cf = central_fibre_report(rs, rep)
    verdict = stability_verdict(rs, rep, cf)
    ok_a = (abs(ke.b0[0] - 2.25) <= 1e-12 and rep.lambda0 == (0.0,)
            and abs(rep.multipliers[0] - 0.125) <= 1e-8
            and verdict.kind == "KählerEinstein")

    rs_b, seg_b, opts_b = _load("sl2-balanced")
    ke_b = ke_test(rs_b, seg_b)
    ok_b = (ke_b.verdict == "SemistableBoundary"
            and abs(ke_b.b0[0] - 2.0) <= 1e-10)
    ok = ok_a and ok_b
    detail = (f"[0,3]: b0={ke.b0[0]:.14f}, lambda0={rep.lambda0}, "
              f"mult={rep.multipliers[0]:.12f}, {verdict.kind}; "
              f"[0,8/3]: {ke_b.verdict}, b0={ke_b.b0[0]:.12f}")
    _criterion(4, ok, detail)


def test_criterion_5_integration_engine(rs_so4, rs_a1, case1_poly, seg3):
    checks = []
    pi = dh_density(rs_so4)
    mc_cfg = McConfig(samples=10 ** 7)

    def crosscheck(name, region, p, lam, exact):
        est, err = mc_integrate(region, p, lam, mc_cfg)
        checks.append((f"{name} mc", abs(est - exact) <= 3 * err))
        sub = integrate_region(region, p, lam, subdivisions=1)
        checks.append((f"{name} sub", abs(sub - exact) / abs(exact) <= 1e-10))

    tri = build_polytope(vertices=[[0, 0], [1, 0], [0, 1]])
    one2 = Polynomial.constant(2, 1)
    val = integrate_region(tri, one2, (1.0, 0.0))
    checks.append(("e-2", abs(val - (math.e - 2)) <= 1e-13))
    crosscheck("e-2", tri, one2, (1.0, 0.0), math.e - 2)

    for n in (1, 2, 3):
        verts = [[0] * n] + [[int(i == j) for i in range(n)] for j in range(n)]
        simplex = build_polytope(vertices=verts)
        one_n = Polynomial.constant(n, 1)
        v = integrate_region(simplex, one_n, (0.0,) * n)
        exact = 1 / math.factorial(n)
        checks.append((f"1/{n}!", abs(v - exact) <= 1e-14))
        crosscheck(f"1/{n}!", simplex, one_n, (0.0,) * n, exact)

    for idx, s in enumerate(triangulate(case1_poly)):
        exact = integrate_simplex(pi, (0.5, -0.5), s)
        tri_poly = build_polytope(vertices=[list(v) for v in s])
        crosscheck(f"tri{idx}", tri_poly, pi, (0.5, -0.5), exact)

    pi1 = dh_density(rs_a1)
    m = region_moments(seg3, pi1, (0.0,))
    checks.append(("sl2 moments", abs(m.z - 36) <= 1e-12
                   and abs(m.first[0] - 81) <= 1e-11
                   and abs(m.barycenter()[0] - 2.25) <= 1e-13))
    crosscheck("sl2", seg3, pi1, (0.0,), 36.0)

    sq = build_polytope(vertices=[[0, 0], [1, 0], [0, 1], [1, 1]])
    ms = region_moments(sq, one2, (0.0, 0.0))
    cov = ms.covariance()
    checks.append(("square moments", abs(ms.z - 1) <= 1e-14
                   and abs(ms.barycenter()[0] - 0.5) <= 1e-14
                   and abs(cov[0][0] - 1 / 12) <= 1e-14))
    crosscheck("square", sq, one2, (0.0, 0.0), 1.0)

    z_exact = get_engine(case1_poly, pi).z((0.0, 0.0))
    crosscheck("case1 V", case1_poly, pi, (0.0, 0.0), z_exact)

    ok = all(flag for _, flag in checks)
    bad = [name for name, flag in checks if not flag]
    detail = (f"{len(checks)} checks over every engine example "
              f"(exact value, 1e7-sample mc within 3 sigma, one subdivision "
              f"level to 1e-10): " + ("all ok" if ok else f"BAD: {bad}"))
    _criterion(5, ok, detail)


def test_criterion_6_calculus_consistency(rs_so4, case1_poly, case2_poly):
    rng = np.random.default_rng(606)
    step = 1e-5
    worst_grad = 0.0
    chol_ok = True
    for poly in (case1_poly, case2_poly):
        for _ in range(20):
            s, t = rng.uniform(0.02, 1.2, size=2)
            lam = (0.5 * (s + t), 0.5 * (t - s))
            _, grad, hess = barycenter_grad_hess(rs_so4, poly, lam)
            for k in range(2):
                lp, lm = list(lam), list(lam)
                lp[k] += step
                lm[k] -= step
                fd = (h_vector(rs_so4, poly, lp).h
                      - h_vector(rs_so4, poly, lm).h) / (2 * step)
                rel = abs(grad[k] - fd) / max(1.0, abs(fd))
                worst_grad = max(worst_grad, rel)
            try:
                np.linalg.cholesky(np.array(hess))
            except np.linalg.LinAlgError:
                chol_ok = False
    worst_slack = 0.0
    pts = [(0.5 * (s + t), 0.5 * (t - s))
           for s, t in rng.uniform(0.0, 1.5, size=(40, 2))]
    for _ in range(100):
        i, j = rng.integers(0, len(pts), size=2)
        w = float(rng.uniform(0.1, 0.9))
        a, b = pts[i], pts[j]
        mid = tuple((1 - w) * x + w * y for x, y in zip(a, b))
        slack = ((1 - w) * h_vector(rs_so4, case1_poly, a).h
                 + w * h_vector(rs_so4, case1_poly, b).h
                 - h_vector(rs_so4, case1_poly, mid).h)
        worst_slack = min(worst_slack, slack)
    ok = worst_grad <= 1e-6 and chol_ok and worst_slack >= -1e-10
    detail = (f"max grad FD rel err {worst_grad:.2e} (<=1e-6), "
              f"hessian cholesky {'ok' if chol_ok else 'BAD'}, "
              f"min convexity slack {worst_slack:.2e} (>=-1e-10)")
    _criterion(6, ok, detail)


def _scaled_piece_coeffs(pl, q):
    """Per piece (D, c0, coeffs): value at lattice point m/q is
    (c0 - sum_k coeffs[k]*m[k]) / D with everything an integer."""
    out = []
    for c, lam in pl.pieces:
        d = c.denominator
        for l in lam:
            d = math.lcm(d, l.denominator * q)
        out.append((d, int(c * d), [int(l * d / q) for l in lam]))
    return out


def _exact_sandwich_ok(f, fp, ipts, q, p):
    """Exact check that 0 <= fp - f <= 1/p at every point m/q, via integer
    numerators over a common denominator (no floats involved)."""
    cf = _scaled_piece_coeffs(f, q)
    cfp = _scaled_piece_coeffs(fp, q)
    den = 1
    for d, _, _ in cf + cfp:
        den = math.lcm(den, d)

    def values(coeff_list):
        mins = None
        for d, c0, cs in coeff_list:
            mult = den // d
            vs = [(c0 - sum(ck * mk for ck, mk in zip(cs, m))) * mult
                  for m in ipts]
            mins = vs if mins is None else [a if a < b else b
                                            for a, b in zip(mins, vs)]
        return mins

    vf = values(cf)
    vfp = values(cfp)
    return all(0 <= b - a and (b - a) * p <= den for a, b in zip(vf, vfp))


def _random_pl_functions(rs, poly, count, seed):
    rng = np.random.default_rng(seed)
    grid = [Fraction(k, 4) for k in range(0, 9)]
    offs = [Fraction(k, 4) for k in range(-8, 9)]
    fs = []
    for _ in range(count):
        pieces = []
        for _ in range(int(rng.integers(1, 4))):
            s = grid[rng.integers(0, len(grid))]
            t = grid[rng.integers(0, len(grid))]
            c = offs[rng.integers(0, len(offs))]
            pieces.append((c, ((s + t) / 2, (t - s) / 2)))
        fs.append(pl_concave(rs, poly, pieces))
    return fs


def test_criterion_7_classification_properties(rs_so4, rs_a1, case1_poly, seg3):
    fs = _random_pl_functions(rs_so4, case1_poly, 20, 707)
    table_ok = True
    super_ok = True
    for f in fs:
        tables = {k: filtration_table(f, k) for k in (1, 2, 3, 5)}
        if not all(t.violations["ok"] for t in tables.values()):
            table_ok = False
        for k1, k2 in ((1, 1), (1, 2), (2, 3)):
            if not check_superadditive(tables[k1], tables[k2],
                                       tables[k1 + k2])["ok"]:
                super_ok = False

    bad = table_from_values(rs_a1, seg3, 1, [1, 0, 1, 0])
    flagged = bool(bad.violations["concavity"])

    sandwich_ok = True
    audited = 0
    for p in (1, 5, 10):
        q = 4 * p  # approximate_p's default sampling grid
        ipts = [tuple(int(c) for c in pt)
                for pt in lattice_points(case1_poly, q)]
        for f in fs:
            fp = approximate_p(f, p)
            if not _exact_sandwich_ok(f, fp, ipts, q, p):
                sandwich_ok = False
            audited += len(ipts)

    ok = table_ok and super_ok and flagged and sandwich_ok
    detail = (f"20 PL functions: tables {'ok' if table_ok else 'BAD'}, "
              f"superadditivity {'ok' if super_ok else 'BAD'}, "
              f"(1,0,1,0) concavity flagged: {flagged}, "
              f"sandwich p in (1,5,10) exact at {audited} grid points: "
              f"{'ok' if sandwich_ok else 'BAD'}")
    _criterion(7, ok, detail)


def test_criterion_8_pl_minimality(rs_so4, case1_poly):
    fs = _random_pl_functions(rs_so4, case1_poly, 20, 707)
    rep = minimize_h(rs_so4, case1_poly)
    h_lam0 = rep.h_min
    two_rho = rs_so4.two_rho
    worst_piece = math.inf
    worst_lam0 = math.inf
    for f in fs:
        hf = h_plfunction(rs_so4, case1_poly, f).h
        c_b, lam_b = min(f.pieces,
                         key=lambda piece: piece[0] - sum(
                             l * t for l, t in zip(piece[1], two_rho)))
        h_piece = h_vector(rs_so4, case1_poly,
                           [float(x) for x in lam_b]).h
        worst_piece = min(worst_piece, hf - h_piece)
        worst_lam0 = min(worst_lam0, hf - h_lam0)
    ok = worst_piece >= -1e-10 and worst_lam0 >= -1e-10
    detail = (f"min H(f) - H(piece at 2rho) = {worst_piece:.3e}, "
              f"min H(f) - H(lambda0) = {worst_lam0:.3e} (both >= -1e-10)")
    _criterion(8, ok, detail)


def test_criterion_9_thread_determinism():
    presets = ("so4-case1", "so4-case2", "so4-case1-ineqlist",
               "so4-case2-ineqlist", "sl2", "sl2-balanced")
    mismatched = []
    for preset in presets:
        _, out1, _ = run_cli(["analyze", "--preset", preset], threads=1)
        _, out8, _ = run_cli(["analyze", "--preset", preset], threads=8)
        if out1 != out8:
            mismatched.append(preset)
    ok = not mismatched
    detail = ("byte-identical JSON for all presets at GCDEG_THREADS 1 vs 8"
              if ok else f"mismatch: {mismatched}")
    _criterion(9, ok, detail)
