#!/usr/bin/env python3
"""Smoke test for the orlicz_py extension module.

Builds the cdylib if needed, loads it, and checks a handful of known
values end to end. Run from the repository root:

    python3 python/smoke_test.py
"""
import json
import math
import shutil
import subprocess
import sys
import sysconfig
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def ensure_module():
    lib = ROOT / "target" / "release" / "liborlicz_py.so"
    if not lib.exists():
        subprocess.run(
            ["cargo", "build", "--release", "-p", "orlicz-py"], cwd=ROOT, check=True
        )
    suffix = sysconfig.get_config_var("EXT_SUFFIX") or ".so"
    dest = ROOT / "python" / f"orlicz_py{suffix}"
    shutil.copy2(lib, dest)
    sys.path.insert(0, str(dest.parent))


def approx(a, b, tol=1e-2):
    assert abs(a - b) <= tol * max(abs(b), 1e-300), f"{a} != {b} (tol {tol})"


def main():
    ensure_module()
    import orlicz_py as oz

    grid = oz.Grid(2, 256)
    assert grid.dim == 2 and len(grid) == 256

    # Ball: affine and geominimal equal 2*pi*phi(1) in the plane.
    ball = oz.Body.ball(1.0)
    phi = oz.Phi("power:2", 2)
    assert phi.class_name == "Phi"
    approx(ball.volume(), math.pi, 1e-9)
    res = json.loads(oz.affine(ball, phi, grid, restarts=2))
    approx(res["value"], 2 * math.pi)
    assert res["certified_side"] == "upper_bound"
    res_g = json.loads(oz.geominimal(ball, phi, grid, restarts=2))
    approx(res_g["value"], 2 * math.pi)
    approx(oz.ellipsoid_value(ball, phi), 2 * math.pi, 1e-9)

    # Constant phi: V_phi(K, Q) = |K| exactly.
    k = oz.Body.random(2, 7, "polytope")
    one = oz.Phi("constant:1", 2)
    approx(oz.v_phi(k, oz.Body.ball(2.0), one), k.volume(), 1e-12)

    # Psi-class phi flips the certified side.
    psi = oz.Phi("power:-1", 2)
    assert psi.class_name == "Psi"
    smooth = oz.Body.random(2, 3, "smooth")
    res = json.loads(oz.affine(smooth, psi, grid, restarts=2))
    assert res["certified_side"] == "lower_bound"

    # JSON round-trip preserves support evaluations bit-for-bit.
    back = oz.Body.from_json(k.to_json())
    assert back.support(grid) == k.support(grid)

    # L_p closed form on the unit ball: as_p(B) = 2*pi.
    approx(oz.lp_closed_form(ball, 2.0, grid), 2 * math.pi, 1e-9)

    # A quick verification suite run.
    assert "lp-consistency" in oz.suite_names()
    report = json.loads(oz.verify("lp-consistency", grid, seed=3, restarts=4))
    statuses = {c["status"] for c in report["cases"]}
    assert "Violated" not in statuses, statuses

    print("smoke test passed:", len(report["cases"]), "suite cases checked")


if __name__ == "__main__":
    main()
