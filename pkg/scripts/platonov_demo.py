#!/usr/bin/env python3
"""End-to-end Platonov pipeline for a chosen tame local field.

For each (n, p) with p = 1 mod n^3 this builds the configuration
(a, t1)_n (x) (p, t2)_n over Qp((t1))((t2)), computes SK1 through the Brauer
quotient, the relative cohomology groups for r = 1, 2, the centre symbol with
its non-vanishing certificate, and prints a compact report.

Usage: python3 scripts/platonov_demo.py [--n 2 --p 17 --a 3]
"""

import argparse
import time

from skone.algebras import symbol_algebra, tensor
from skone.fields import parse_field, primitive_root_of_unity
from skone.invariants import (
    PlatonovConfig,
    centre_symbol,
    comparison_m_r,
    pi_tilde_surjective,
    sk1_nontrivial_witness,
    sk1_platonov,
)
from skone.ktheory import laurent_var_element, relative_group

DEFAULTS = [(2, 17, 3), (3, 109, 6), (5, 251, 6)]


def run_one(n: int, p: int, a: int):
    t0 = time.time()
    k = parse_field(f"Qp({p})")
    cfg = PlatonovConfig(k, n, k.elem(a), k.elem(p))
    res = sk1_platonov(cfg)
    print(f"n={n}, p={p}, a={a}")
    print(f"  SK1(A) = {res.group}   [{res.division}]")
    print(f"  Br(K/k) generated by {res.br_K.value}, "
          f"Br(K_i/k) by {res.br_K1.value}")

    tower = f"Qp({p})[zeta_{n*n}]((t1))((t2))" if n > 2 else \
        f"Qp({p})((t1))((t2))"
    T = parse_field(tower)
    t1 = laurent_var_element(T, "t1")
    t2 = laurent_var_element(T, "t2")
    zeta, _ = primitive_root_of_unity(T, n)
    A = tensor(symbol_algebra(T, a, t1, n, zeta),
               symbol_algebra(T, p, t2, n, zeta))
    for r in (1, 2):
        rel = relative_group(A, r, n * n)
        surj = pi_tilde_surjective(rel)
        print(f"  H^4_({n*n}, A^(x{r})) = {rel.describe()}  "
              f"per(A^(x{r})) = {rel.per_r}  m_r(1) = {comparison_m_r(rel, 1)}"
              f"  pi-tilde surjective: {surj}")

    if n == 2:
        Tz = parse_field(f"Qp({p})[zeta_4]((t1))((t2))")
        t1z = laurent_var_element(Tz, "t1")
        t2z = laurent_var_element(Tz, "t2")
        Az = tensor(symbol_algebra(Tz, a, t1z, 2), symbol_algebra(Tz, p, t2z, 2))
        cs = centre_symbol(Az)
        print(f"  centre symbol {cs.symbol_class}: {cs.certificate}; "
              f"scalar {cs.scalar}")
        print(f"  SK1 nontrivial witness: {sk1_nontrivial_witness(Az)}")
    print(f"  ({time.time() - t0:.2f}s)\n")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int)
    ap.add_argument("--p", type=int)
    ap.add_argument("--a", type=int)
    args = ap.parse_args()
    if args.n:
        run_one(args.n, args.p, args.a)
    else:
        for n, p, a in DEFAULTS:
            run_one(n, p, a)


if __name__ == "__main__":
    main()
