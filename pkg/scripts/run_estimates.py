#!/usr/bin/env python3
"""Distributional Jacobian and Hessian determinant estimate sweeps.

Runs both oscillation-family experiments back to back with their standard
exponent configurations:

  jacobian: d = 2, p = (2, 2), s = 1 - 1/d = 1/2
  hessian:  d = 3, p = (3, 3, 3), s = 2 - 2/d = 4/3

Each reports the plain pairing ratio |<det, phi>| / (prod norms * sup norm)
and the difference-form ratio across t = 0..5, plus the exact-zero u = v
case.  Records land under out/jacobian/ and out/hessian/.

Usage:
  python3 scripts/run_estimates.py [--seed N]
"""

import sys

from mlab.cli import run_cli


def main() -> int:
    extra = sys.argv[1:]
    code = run_cli(["jacobian-estimate", "--t-min", "0", "--t-max", "5", *extra])
    code2 = run_cli(["hessian-estimate", "--t-min", "0", "--t-max", "5", *extra])
    return max(code, code2)


if __name__ == "__main__":
    sys.exit(main())
