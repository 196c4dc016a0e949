#!/usr/bin/env python3
"""Evaluate the Witt-class invariant on random commutators over Q.

SK1 is trivial over number fields, so every evaluation must land in I^4;
the script reports the certified level, the kernel provenance, and checks
v- and involution-independence on a few samples.

Usage: python3 scripts/kmrt_over_q.py [--samples 10 --seed 0]
"""

import argparse
import random
import time

from skone.algebras import commutator, random_invertible, symbol_algebra, tensor
from skone.fields import Rationals
from skone.forms import witt_equal_mod_i4
from skone.invariants import kmrt_eval, make_symplectic_involution


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--samples", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--abcd", default="-1,-1,-1,3",
                    help="symbol slots of the two quaternion factors")
    args = ap.parse_args()

    Q = Rationals()
    a, b, c, d = (int(x) for x in args.abcd.split(","))
    A = tensor(symbol_algebra(Q, a, b, 2), symbol_algebra(Q, c, d, 2))
    sigma = make_symplectic_involution(A)
    rng = random.Random(args.seed)

    print(f"A = ({a},{b}) (x) ({c},{d}) over Q, sigma: {sigma.kind()}")
    res = kmrt_eval(A, sigma, A.one())
    print(f"rho(1): level {res.level.level} [{res.level.detail}]")

    base = None
    for k in range(args.samples):
        t0 = time.time()
        x = random_invertible(A, rng, span=2)
        y = random_invertible(A, rng, span=2)
        cmt = commutator(A, x, y)
        res = kmrt_eval(A, sigma, cmt)
        print(f"commutator {k}: level {res.level.level} "
              f"(kernel {res.witt.kernel.dim}-dim, {res.witt.provenance}) "
              f"{time.time() - t0:.2f}s")
        if base is None:
            base = (cmt, res)

    cmt, first = base
    w = -(sigma.apply(cmt) * cmt)
    alt = kmrt_eval(A, sigma, cmt, v_override=(A.one() + w).scale(5))
    print("v-independence (5*(1+w) vs 1+w):",
          witt_equal_mod_i4(first.witt, alt.witt))
    Q2alg = A.tag.right
    for name, s in (("y2", Q2alg.generator("y")),
                    ("x2*y2", Q2alg.generator("x") * Q2alg.generator("y"))):
        sig = make_symplectic_involution(A, s)
        res = kmrt_eval(A, sig, cmt)
        print(f"sigma-independence ({name}):",
              witt_equal_mod_i4(first.witt, res.witt))


if __name__ == "__main__":
    main()
