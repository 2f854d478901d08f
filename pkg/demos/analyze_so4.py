"""Walkthrough: full stability analysis of an SO(4) compactification.

Builds the rank-2 root data and a moment polytope by hand, then runs the
same pipeline the `gcdeg analyze` subcommand wires together: volume and
barycenter, the soliton candidate test at the origin, minimization of the
reduced H-functional over the dominant cone, the central-fibre report, and
the final verdict.

Run:  python demos/analyze_so4.py
"""

from gcdeg import (RootSystemSpec, build_polytope, build_root_system,
                   central_fibre_report, dh_density, get_engine, ke_test,
                   minimize_h, stability_verdict)


def section(title):
    print()
    print(title)
    print("-" * len(title))


def main():
    # SO(4) ~ SL(2) x SL(2): two orthogonal positive roots.
    rs = build_root_system(RootSystemSpec(catalog="A1xA1"))
    section("Root data")
    print("positive roots:", [tuple(map(str, a)) for a in rs.positive_roots])
    print("2*rho:", tuple(map(str, rs.two_rho)))
    print("weight density pi(y) = product of <alpha, y>^2 over positive roots")

    # The dominant part of the moment polytope: a quadrilateral inside the
    # cone {x >= |y|}, given here by its vertices (exact rationals).
    poly = build_polytope(
        vertices=[[0, 0], [3, 3], [3, 0], ["3/2", "-3/2"]])
    section("Moment polytope (dominant part)")
    for n, b in poly.halfspaces:
        print(f"  <{tuple(map(str, n))}, y> <= {b}")
    print("euclidean area:", poly.volume())
    pi = dh_density(rs)
    eng = get_engine(poly, pi)
    print("weighted volume V = integral of pi:", eng.z((0.0, 0.0)))

    # Step 1: is the barycenter condition for a Kaehler-Einstein metric met?
    section("Soliton candidate test at the origin")
    ke = ke_test(rs, poly)
    print("barycenter b(0):", ke.b0)
    print("b(0) - 2*rho in simple-root coordinates:", ke.coefficients)
    print("verdict:", ke.verdict)
    print("(a negative coordinate means b(0) - 2*rho leaves the cone spanned")
    print(" by the simple roots, so no Kaehler-Einstein metric exists)")

    # Step 2: minimize the reduced functional h over the dominant cone.
    section("Minimizing h over the dominant cone")
    rep = minimize_h(rs, poly)
    print("minimizer lambda0:", rep.lambda0)
    print("h(lambda0):", rep.h_min)
    print("active walls (indices into positive roots):", rep.active_set)
    print("KKT multipliers on active walls:", rep.multipliers)
    print("barycenter at the twisted measure b(lambda0):", rep.b_lambda0)

    # Step 3: read off the central fibre of the induced degeneration.
    section("Central fibre of the optimal degeneration")
    cf = central_fibre_report(rs, rep)
    print("Levi roots (stay finite):", cf.levi_positive_roots)
    print("split-off roots (sent to infinity):", cf.split_positive_roots)
    print("horospherical:", cf.horospherical)
    print("rank of the torus acting on the fibre:", cf.aut_rank)
    print("valuation cone inequalities:", cf.valuation_cone)
    print("section dimensions by level:", cf.h0)

    section("Verdict")
    v = stability_verdict(rs, rep, cf)
    print("kind:", v.kind)
    print("flow statement:", v.flow_statement)

    section("Same analysis via the CLI")
    print("  gcdeg analyze --preset so4-case1")
    print("  gcdeg analyze --preset so4-case1 --format text")


if __name__ == "__main__":
    main()
