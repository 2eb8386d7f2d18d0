#!/usr/bin/env python3
"""Regenerate src/moduli_table.inc.

For every prime ell <= 251 and every k >= 2 with ell**k <= 2**16 this emits the
monic irreducible polynomial of degree k over F_ell whose coefficient vector
(constant term first, read as a base-ell integer) is smallest.
"""
import itertools
import sys

MAX_Q = 1 << 16


def primes(limit):
    return [p for p in range(2, limit + 1) if all(p % d for d in range(2, int(p ** 0.5) + 1))]


def polymod(a, b, p):
    a = a[:]
    while len(a) >= len(b):
        if a[-1] == 0:
            a.pop()
            continue
        c = a[-1] * pow(b[-1], -1, p) % p
        shift = len(a) - len(b)
        for i, bi in enumerate(b):
            a[shift + i] = (a[shift + i] - c * bi) % p
        a.pop()
    while a and a[-1] == 0:
        a.pop()
    return a


def irreducible(f, p):
    k = len(f) - 1
    for d in range(1, k // 2 + 1):
        for tail in itertools.product(range(p), repeat=d):
            g = list(tail) + [1]
            if not polymod(f, g, p):
                return False
    return True


def smallest_irreducible(p, k):
    for code in range(p ** k):
        tail = [(code // p ** i) % p for i in range(k)]
        f = tail + [1]
        if f[0] == 0:
            continue
        if irreducible(f, p):
            return f
    raise RuntimeError((p, k))


def main(out):
    rows = []
    for p in primes(251):
        k = 2
        while p ** k <= MAX_Q:
            rows.append((p, k, smallest_irreducible(p, k)))
            k += 1
    with open(out, "w") as fh:
        fh.write("// Generated by tools/gen_moduli.py. Do not edit.\n")
        fh.write("// {ell, k, {c_0, c_1, ..., c_{k-1}}}; the leading coefficient 1 is implicit.\n")
        for p, k, f in rows:
            body = ", ".join(str(c) for c in f[:-1])
            fh.write(f"{{{p}, {k}, {{{body}}}}},\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "src/moduli_table.inc")
