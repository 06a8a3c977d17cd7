"""Smoke test for the isohyp Python module.

Build the module first, for example:

    cargo build --release -p isohyp-py --features extension-module
    cp target/release/libisohyp.so python/isohyp.so
    python3 python/smoke_test.py
"""

import math
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import isohyp  # noqa: E402


def close(a, b, tol):
    return abs(a - b) <= tol * max(1.0, abs(b))


def main():
    d = isohyp.dist((0.0, 0.0), (0.5, 0.0))
    assert close(d, 2.0 * math.atanh(0.5), 1e-14), d

    s, t = isohyp.fermi((0.0, 0.5))
    assert close(s, 2.0 * math.atanh(0.5), 1e-12) and abs(t) < 1e-14, (s, t)

    k = isohyp.curvature_convert(2.0, (0.0, 0.5), (0.0, 1.0))
    assert close(k, 1.25, 1e-12), k

    b = isohyp.ball_quantities(3, 1.0, "cosh:1")
    assert close(b["Pf"], 4.0 * math.pi * math.sinh(1.0) ** 2 * math.cosh(1.0), 1e-12), b
    tau = isohyp.ball_radius_for_volume(3, b["Vf"], "cosh:1")
    assert close(tau, 1.0, 1e-10), tau

    p = isohyp.profile_functionals(3, [1.0], "cosh:1")
    assert close(p["Pf"], b["Pf"], 1e-10), p

    shot = isohyp.shoot(3, 1.0)
    assert shot["classification"]["class"] == "CenteredCircle", shot["classification"]
    assert len(shot["rows"]) > 10

    report = isohyp.verify(["h1_circle", "center_c"], count=50, seed=7)
    assert [s["passed"] for s in report["suites"]] == [50, 50], report["suites"]

    run = isohyp.minimize(3, b["Vf"], modes=4, max_iters=20, init=[1.0])
    assert abs(run["deficit"]) < 1e-8, run["deficit"]

    row = isohyp.hopf_crosscheck("C", 2, 1.0)
    assert row["relerr_P"] < 1e-10 and row["relerr_V"] < 1e-10, row

    try:
        isohyp.ball_quantities(3, 1.0, "nope:1")
    except ValueError:
        pass
    else:
        raise AssertionError("bad density accepted")

    print("isohyp", isohyp.__version__, "smoke test passed")


if __name__ == "__main__":
    main()
