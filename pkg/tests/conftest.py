"""Shared brute-force oracles for the test suite.

The oracles never call the code paths they validate: point counting is
a full quadratic-residue scan and group invariants come from the order
statistics of every single point.
"""

from __future__ import annotations

from math import gcd

from cyclored.curve import ReducedCurve

FIVE_CURVES = [
    (-3, 1),
    (2, 3),
    (-12096, -544752),
    (1, 3),
    (-13392, -1080432),
]


def brute_points(p: int, a: int, b: int) -> list:
    """Every affine point of y^2 = x^3 + ax + b over F_p, plus None."""
    roots: dict[int, list[int]] = {}
    for y in range(p):
        roots.setdefault(y * y % p, []).append(y)
    pts: list = [None]
    for x in range(p):
        rhs = (x * x * x + a * x + b) % p
        for y in roots.get(rhs, ()):
            pts.append((x, y))
    return pts


def brute_add(P, Q, p, a):
    if P is None:
        return Q
    if Q is None:
        return P
    x1, y1 = P
    x2, y2 = Q
    if x1 == x2 and (y1 + y2) % p == 0:
        return None
    if P == Q:
        lam = (3 * x1 * x1 + a) * pow(2 * y1, -1, p) % p
    else:
        lam = (y2 - y1) * pow(x2 - x1, -1, p) % p
    x3 = (lam * lam - x1 - x2) % p
    return (x3, (lam * (x1 - x3) - y1) % p)


def brute_point_order(P, p, a) -> int:
    n = 1
    T = P
    while T is not None:
        T = brute_add(T, P, p, a)
        n += 1
    return n


def brute_structure(p: int, a: int, b: int) -> tuple[int, int, int]:
    """(n, d, e) with the group isomorphic to Z/d x Z/e, d | e, via the
    exponent: e = lcm of all point orders, d = n / e."""
    pts = brute_points(p, a, b)
    n = len(pts)
    exponent = 1
    for P in pts:
        if P is None:
            continue
        o = brute_point_order(P, p, a)
        exponent = exponent * o // gcd(exponent, o)
    assert n % exponent == 0
    return n, n // exponent, exponent


def reduced(A: int, B: int, p: int) -> ReducedCurve:
    return ReducedCurve(p, A % p, B % p)
