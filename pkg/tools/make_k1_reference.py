#!/usr/bin/env python3
"""Regenerate tests/fixtures/k1_reference.json.

High-precision reference values for the modified Bessel function K1,
computed with mpmath at 40 decimal digits and rounded to float64. The
grid is 200 log-spaced points on [1e-3, 50] plus a few round arguments
that are handy for spot checks.
"""

import json
import pathlib

import mpmath

mpmath.mp.dps = 40

OUT = pathlib.Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "k1_reference.json"


def main() -> None:
    xs = [mpmath.mpf(10) ** e for e in mpmath.linspace(mpmath.log10(mpmath.mpf("1e-3")),
                                                       mpmath.log10(mpmath.mpf(50)), 200)]
    xs += [mpmath.mpf(s) for s in ("0.001", "0.01", "0.1", "0.5", "1", "2", "5", "10", "20", "50")]
    table = []
    seen = set()
    for x in xs:
        xf = float(x)
        if xf in seen:
            continue
        seen.add(xf)
        table.append([xf, float(mpmath.besselk(1, mpmath.mpf(xf)))])
    table.sort()
    OUT.parent.mkdir(parents=True, exist_ok=True)
    with OUT.open("w") as fh:
        json.dump({"comment": "x, K1(x) pairs; mpmath dps=40", "points": table}, fh, indent=1)
    print(f"wrote {OUT} ({len(table)} points)")


if __name__ == "__main__":
    main()
