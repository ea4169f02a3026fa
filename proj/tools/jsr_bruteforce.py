#!/usr/bin/env python3
"""Brute-force lower bound for the joint spectral radius of a set of 2x2
matrices: max over all products P of length n <= N of rho(P)^(1/n).

Usage: jsr_bruteforce.py COCYCLE.json [N]
"""
import cmath
import itertools
import json
import sys


def mul(a, b):
    return [[sum(a[i][k] * b[k][j] for k in range(2)) for j in range(2)] for i in range(2)]


def rho(m):
    tr = m[0][0] + m[1][1]
    det = m[0][0] * m[1][1] - m[0][1] * m[1][0]
    r = cmath.sqrt(tr * tr / 4 - det)
    return max(abs(tr / 2 + r), abs(tr / 2 - r))


def main():
    doc = json.load(open(sys.argv[1]))
    depth = int(sys.argv[2]) if len(sys.argv) > 2 else 12
    mats = doc["matrices"]
    if doc.get("dim") != 2:
        sys.exit("only 2x2 matrices are supported")
    best, arg = -1.0, None
    for n in range(1, depth + 1):
        for w in itertools.product(range(len(mats)), repeat=n):
            p = [[1, 0], [0, 1]]
            for s in w:
                p = mul(mats[s], p)
            v = rho(p) ** (1.0 / n)
            if v > best * (1 + 1e-15):
                best, arg = v, w
    print("lower %.17g witness %s" % (best, "".join(map(str, arg))))


if __name__ == "__main__":
    main()
