#!/usr/bin/env python3
"""Generate antipodally symmetric spherical t-designs on S^2.

Sizes and strengths follow the symmetric design family (12 points / t=5,
32 points / t=7, 48 points / t=9). Half of the points are free unit vectors,
the other half their antipodes, so every odd-degree harmonic integrates to
zero automatically. The even degrees 2..t-1 are driven to zero with a
Levenberg-Marquardt solve on the harmonic moments, from a deterministic seed.

Writes one plain-text file per design (M lines of three floats) and the
generated C++ header that embeds the same numbers.
"""
import argparse
import pathlib

import numpy as np
from scipy.optimize import least_squares
from scipy.special import sph_harm_y

DESIGNS = {12: 5, 32: 7, 48: 9}


def to_xyz(params):
    theta, phi = params[0::2], params[1::2]
    return np.stack([np.sin(theta) * np.cos(phi),
                     np.sin(theta) * np.sin(phi),
                     np.cos(theta)], axis=1)


def residual(params, strength):
    xyz = to_xyz(params)
    theta = np.arccos(np.clip(xyz[:, 2], -1.0, 1.0))
    phi = np.arctan2(xyz[:, 1], xyz[:, 0])
    out = []
    for l in range(2, strength, 2):
        for m in range(0, l + 1):
            y = sph_harm_y(l, m, theta, phi).sum()
            out.append(y.real)
            if m > 0:
                out.append(y.imag)
    return np.array(out)


def solve(count, strength, seed):
    half = count // 2
    rng = np.random.default_rng(seed)
    for _ in range(200):
        v = rng.normal(size=(half, 3))
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        x0 = np.empty(2 * half)
        x0[0::2] = np.arccos(np.clip(v[:, 2], -1, 1))
        x0[1::2] = np.arctan2(v[:, 1], v[:, 0])
        sol = least_squares(residual, x0, args=(strength,), xtol=1e-15,
                            ftol=1e-15, gtol=1e-15, max_nfev=20000)
        if np.max(np.abs(sol.fun)) < 1e-14:
            pts = to_xyz(sol.x)
            pts /= np.linalg.norm(pts, axis=1, keepdims=True)
            return np.concatenate([pts, -pts])
    raise RuntimeError(f"no design found for M={count}")


def check(pts, strength):
    # Equal-weight rule must reproduce the sphere average of x^a y^b z^c.
    from math import gamma
    w = 4 * np.pi / len(pts)
    worst = 0.0
    for a in range(strength + 1):
        for b in range(strength + 1 - a):
            for c in range(strength + 1 - a - b):
                if a % 2 or b % 2 or c % 2:
                    exact = 0.0
                else:
                    exact = 2 * gamma((a + 1) / 2) * gamma((b + 1) / 2) * gamma((c + 1) / 2) \
                        / gamma((a + b + c + 3) / 2)
                got = w * np.sum(pts[:, 0] ** a * pts[:, 1] ** b * pts[:, 2] ** c)
                worst = max(worst, abs(got - exact))
    return worst


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--data-dir", default="data/spherical_designs")
    ap.add_argument("--header", default="include/granular/detail/spherical_design_data.hpp")
    args = ap.parse_args()
    data_dir = pathlib.Path(args.data_dir)
    data_dir.mkdir(parents=True, exist_ok=True)

    tables = {}
    for count, strength in DESIGNS.items():
        pts = solve(count, strength, seed=count)
        err = check(pts, strength)
        print(f"M={count} t={strength} max monomial error {err:.2e}")
        assert err < 1e-12
        tables[count] = pts
        with open(data_dir / f"sd{count:03d}.txt", "w") as fh:
            for p in pts:
                fh.write(" ".join(f"{x:.17e}" for x in p) + "\n")

    lines = [
        "// Generated by tools/gen_spherical_designs.py from data/spherical_designs/.",
        "// Do not edit by hand.",
        "#pragma once",
        "",
        "#include <array>",
        "",
        "namespace granular::detail {",
        "",
    ]
    for count, pts in tables.items():
        lines.append(f"inline constexpr std::array<std::array<double, 3>, {count}> kSphericalDesign{count} = {{{{")
        for p in pts:
            lines.append("    {" + ", ".join(f"{x:.17e}" for x in p) + "},")
        lines.append("}};")
        lines.append("")
    lines.append("}  // namespace granular::detail")
    pathlib.Path(args.header).parent.mkdir(parents=True, exist_ok=True)
    pathlib.Path(args.header).write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
