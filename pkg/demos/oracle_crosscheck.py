"""Cross-checking the deterministic pipeline with independent oracles.

The analytic engine computes exponential-weighted moments by exact
triangulation plus divided differences of the exponential. This demo
confirms its answers two independent ways: a seeded Monte Carlo estimate
with a standard-error bar, and a brute-force grid scan of h along the
dominant cone that should land on the same minimizer as the Newton-based
minimize_h.

Run:  python demos/oracle_crosscheck.py
"""

import math

from gcdeg import (McConfig, RootSystemSpec, build_polytope,
                   build_root_system, dh_density, get_engine, grid_minimize,
                   integrate_region, mc_integrate, minimize_h)


def section(title):
    print()
    print(title)
    print("-" * len(title))


def main():
    rs = build_root_system(RootSystemSpec(catalog="A1xA1"))
    poly = build_polytope(vertices=[[0, 0], [3, 3], [3, 0], ["3/2", "-3/2"]])
    pi = dh_density(rs)
    eng = get_engine(poly, pi)

    section("Weighted volume three ways")
    exact = eng.z((0.0, 0.0))
    print(f"analytic engine:        {exact:.12f}  (exact value 1701/20)")
    sub = integrate_region(poly, pi, (0.0, 0.0), subdivisions=2)
    print(f"2 subdivision levels:   {sub:.12f}  "
          f"(rel dev {abs(sub - exact) / exact:.2e})")
    cfg = McConfig(samples=2_000_000)
    est, err = mc_integrate(poly, pi, None, cfg)
    print(f"monte carlo (2e6 pts):  {est:.6f} +/- {err:.6f}  "
          f"({abs(est - exact) / err:.2f} sigma off)")
    print(f"monte carlo is seeded (seed={cfg.seed}) and chunk-ordered, so")
    print("reruns reproduce these digits exactly.")

    section("Twisted moment at a nonzero slope")
    lam = (0.3, -0.3)
    z = eng.z(lam)
    est, err = mc_integrate(poly, pi, lam, cfg)
    print(f"engine Z(lambda):       {z:.12f}")
    print(f"monte carlo:            {est:.6f} +/- {err:.6f}  "
          f"({abs(est - z) / err:.2f} sigma off)")

    section("Grid scan of h along the dominant cone")
    rep = minimize_h(rs, poly)
    scan = grid_minimize(rs, poly, box=((0.0, 1.0), (0.0, 1.0)), steps=400)
    s_newton = rep.lambda0[0]
    s_scan = scan["lambda0"][0]
    print(f"newton minimizer  s = {s_newton:.12f}")
    print(f"grid scan         s = {s_scan:.12f}  "
          f"(|delta| = {abs(s_newton - s_scan):.2e})")
    print(f"h at scan point: {scan['h_min']:.12f} vs newton h_min "
          f"{rep.h_min:.12f}")
    print("scan internal cross-check (quadrature vs h_vector):",
          "ok" if scan["verification"]["ok"] else "FAILED",
          f"(max dev {scan['verification']['max_abs_dev']:.2e})")

    section("Why the agreement matters")
    print("the engine, the sampler, and the scanner share no code paths for")
    print("the integrals; agreement within error bars on every quantity is")
    print("the evidence that each is computing the same mathematics.")


if __name__ == "__main__":
    main()
