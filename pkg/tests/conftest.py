"""Shared fixtures and frozen reference values.

Reference constants were produced by independent methods (closed-form
antiderivatives, high-precision root finding on the 1-D reduction of the
stationarity condition, rejection-sampling Monte Carlo, dense grid scans)
before the package computed them; the comments on each constant name the
method.
"""

import io
import json
import os
from contextlib import redirect_stderr, redirect_stdout
from fractions import Fraction

import pytest

from gcdeg import RootSystemSpec, build_polytope, build_root_system
from gcdeg.cli import main

# Wall minimizer of the quadrilateral case: root of <u> = 2 for the exact
# moment integrals I(k, s) with coefficients (216, -108, 18, -1), found by
# 25-digit bracketed root refinement; h value from the same closed form.
S_STAR_CASE1 = 0.09569306049147434
H_MIN_CASE1 = -0.001944419193748619
MULT_CASE1 = 0.5                      # exact: b - 2rho = (1/2) alpha2 on the wall

# Pentagon case, same method.
S_STAR_CASE2 = 1.1423730861637071
MULT_CASE2 = 0.3503526433520219

# Barycenters at lambda = 0 (closed-form rational integrals).
B0_CASE1 = (2.4948979591836735, 0.5357142857142857)
B0_SL2 = Fraction(9, 4)

CASE1_VERTICES = [[0, 0], [3, 3], [3, 0], ["3/2", "-3/2"]]
CASE2_VERTICES = [[0, 0], [3, 3], [3, 1], [2, -1], ["3/2", "-3/2"]]
TEXT_QUAD_HALFSPACES = [
    ([-1, -1], 0),
    ([-1, 1], 0),
    ([1, 0], 2),
    ([0, -1], 2),
    ([1, -1], 3),
]


@pytest.fixture(scope="session")
def rs_a1():
    return build_root_system(RootSystemSpec(catalog="A1"))


@pytest.fixture(scope="session")
def rs_so4():
    return build_root_system(RootSystemSpec(catalog="A1xA1"))


@pytest.fixture(scope="session")
def case1_poly():
    return build_polytope(vertices=CASE1_VERTICES)


@pytest.fixture(scope="session")
def case2_poly():
    return build_polytope(vertices=CASE2_VERTICES)


@pytest.fixture(scope="session")
def text_quad():
    return build_polytope(halfspaces=TEXT_QUAD_HALFSPACES)


@pytest.fixture(scope="session")
def seg3():
    return build_polytope(vertices=[[0], [3]])


@pytest.fixture(scope="session")
def seg83():
    return build_polytope(vertices=[[0], ["8/3"]])


def run_cli(argv, threads=None):
    """Run the CLI in-process; returns (exit_code, stdout_text, stderr_text)."""
    out, err = io.StringIO(), io.StringIO()
    saved = os.environ.get("GCDEG_THREADS")
    try:
        if threads is not None:
            os.environ["GCDEG_THREADS"] = str(threads)
        with redirect_stdout(out), redirect_stderr(err):
            code = main(list(argv))
    finally:
        if threads is not None:
            if saved is None:
                os.environ.pop("GCDEG_THREADS", None)
            else:
                os.environ["GCDEG_THREADS"] = saved
    return code, out.getvalue(), err.getvalue()


def dec(node):
    """Decode a canonical-JSON numeric leaf."""
    if isinstance(node, dict):
        return float(node["decimal"])
    return float(node)


def vec(nodes):
    return [dec(n) for n in nodes]


def load_json(text):
    return json.loads(text)
