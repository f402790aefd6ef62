"""Builds the extension with cargo, imports it, and checks a few known values.

Run from anywhere: python3 crates/python/python/smoke_test.py
Pass --no-build to reuse an existing target/release/libtdpoly_py.so.
"""

import importlib.util
import shutil
import subprocess
import sys
import sysconfig
import tempfile
from fractions import Fraction
from pathlib import Path

ROOT = Path(__file__).resolve().parents[3]


def build():
    subprocess.run(
        ["cargo", "build", "--release", "-p", "tdpoly-py", "--features", "extension-module"],
        cwd=ROOT,
        check=True,
    )


def load(tmp):
    lib = ROOT / "target" / "release" / "libtdpoly_py.so"
    if not lib.exists():
        sys.exit(f"missing {lib}; build it first")
    dest = Path(tmp) / ("tdpoly" + sysconfig.get_config_var("EXT_SUFFIX"))
    shutil.copy(lib, dest)
    spec = importlib.util.spec_from_file_location("tdpoly", dest)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


def check(td):
    assert td.stirling2(5, 2) == 15
    assert td.whitney2(2, 1, 2, 2) == 1
    assert td.whitney2(2, "1", 2, 1) == 0
    assert td.whitney2_explicit(3, Fraction(-5, 2), 6, 3) == td.whitney2(3, Fraction(-5, 2), 6, 3)
    assert td.tanny_dowling_poly(2, 1, 2) == [1, 0, 2]
    assert td.geometric_poly(3) == [0, 1, 6, 6]
    assert td.bernoulli_number(1) == Fraction(-1, 2)
    assert td.bernoulli_number(12) == Fraction(-691, 2730)
    assert td.bernoulli_poly_eval(2, "1/2") == Fraction(-1, 12)

    p = td.WhitneyParams(2, "1")
    assert (p.m, p.a) == (2, 1)
    assert p.table(2) == td.whitney2_table(2, 1, 2)
    assert p.dowling(2) == [1, 0, 1]
    assert p == td.WhitneyParams(2, Fraction(1))

    # ∫_{-1}^{0} F̃(n; m x) dx = m^n B_n(-a/m), exactly
    for m, a in [(1, 0), (3, Fraction(1, 2)), (5, -3)]:
        for n in range(8):
            coeffs = td.tanny_dowling_poly(m, a, n)
            integral = sum(c * m**k * Fraction((-1) ** k, k + 1) for k, c in enumerate(coeffs))
            assert integral == m**n * td.bernoulli_poly_eval(n, Fraction(-a, m))

    rec = td.check_identity("THEOREM1", 6, m=3, a="-1/2")
    assert rec["holds"] and rec["id"] == "THEOREM1" and rec["a"] == "-1/2"

    report = td.verify("all", mmax=2, amin=-1, amax=1, nmax=8)
    assert report["fail"] == 0 and report["pass"] > 0

    nodes, weights = td.laguerre_rule(16)
    assert len(nodes) == 16 and abs(sum(weights) - 1) < 1e-13

    computed, target = td.laguerre_transform_check(2, "-5/2", 12, -2.0)
    assert abs(computed - target) <= 1e-8 * abs(target)

    computed, target = td.bernoulli_integral_check(4, 1, 10)
    assert abs(computed - target) <= 1e-8 * abs(target)

    r = td.egf_check(1, 0, "1/2", "1/10")
    assert r["residual"] < 1e-8
    try:
        td.egf_check(1, 0, 1, 1)
    except RuntimeError:
        pass
    else:
        raise AssertionError("divergent point accepted")

    try:
        td.whitney2(0, 0, 1, 1)
    except ValueError:
        pass
    else:
        raise AssertionError("m = 0 accepted")


def main():
    if "--no-build" not in sys.argv:
        build()
    with tempfile.TemporaryDirectory() as tmp:
        check(load(tmp))
    print("python smoke test: ok")


if __name__ == "__main__":
    main()
