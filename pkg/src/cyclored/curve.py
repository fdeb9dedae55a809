"""Elliptic curve groups over prime fields: orders, structure, cyclicity.

A curve y^2 = x^3 + Ax + B with integer coefficients is reduced modulo an
odd prime p of good reduction.  The group of points is abelian on at most
two generators, Z/d x Z/e with d | e and d | p-1; the reduction is called
cyclic when d = 1.  Everything downstream (the census, the split counts)
sits on top of `group_order` and `group_structure`.

Orders come from exhaustive quadratic-residue counting below 2**10 and
from baby-step giant-step over the Hasse window above it, refining the
lcm of sampled point orders until a unique candidate survives, with a
quadratic-twist pass as the tie breaker.  Structure determination never
touches pairings: the first invariant factor is certified per prime l by
either a point whose l-part has full length (cyclic Sylow), or two
independent points of order l, independence decided by enumerating the
<= l multiples of one of them.

Point sampling is deterministic: a splitmix64 stream seeded by a fixed
mix of (p, a, b) drives the x-candidates and the y-sign choice, so runs
are bit-reproducible regardless of how work is partitioned.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, isqrt

from .modmath import factorize, sqrt_mod

Point = "tuple[int, int] | None"  # affine coordinates, None is the point at infinity

INFINITY = None

_M64 = (1 << 64) - 1
_EXHAUSTIVE_BELOW = 1 << 10
_SAMPLE_BUDGET = 8          # points per order-finding pass before twisting
_STRUCTURE_BUDGET = 64      # samples before a structure loop aborts


class BadReduction(Exception):
    """Raised when reducing a curve at a prime dividing its discriminant."""


class BadWitness(Exception):
    """Raised by point_order when the claimed group-order multiple fails."""


class IterationCap(Exception):
    """Raised when a sampling loop exhausts its deterministic budget."""


@dataclass(frozen=True)
class CurveOverQ:
    """Global curve y^2 = x^3 + A x + B, required non-singular."""

    A: int
    B: int

    def __post_init__(self):
        if self.delta_E == 0:
            raise ValueError(f"singular model: 4*{self.A}^3 + 27*{self.B}^2 = 0")

    @property
    def delta_E(self) -> int:
        return -16 * (4 * self.A**3 + 27 * self.B**2)


@dataclass(frozen=True)
class ReducedCurve:
    """Curve over F_p with coefficients stored as least non-negative residues."""

    p: int
    a: int
    b: int


@dataclass(frozen=True)
class GroupStructure:
    """Invariant factors of the point group: Z/d x Z/e, d | e, d*e = n."""

    n: int
    d: int
    e: int


def reduce(curve: CurveOverQ, p: int) -> ReducedCurve:
    """Reduce a global curve at p.  Raises BadReduction when p | delta_E.

    p = 2 always lands in BadReduction for this model shape (delta_E is
    divisible by 16); odd p must be prime, which is the caller's duty on
    hot paths and is checked at CLI boundaries.
    """
    if p < 2:
        raise ValueError(f"not a prime: {p}")
    if curve.delta_E % p == 0:
        raise BadReduction(f"p={p} divides the discriminant")
    return ReducedCurve(p, curve.A % p, curve.B % p)


# ---------------------------------------------------------------------------
# group law


def on_curve(P, C: ReducedCurve) -> bool:
    if P is None:
        return True
    x, y = P
    p = C.p
    if not (0 <= x < p and 0 <= y < p):
        return False
    return (y * y - (x * x % p * x + C.a * x + C.b)) % p == 0


def _add_raw(P, Q, p, a):
    if P is None:
        return Q
    if Q is None:
        return P
    x1, y1 = P
    x2, y2 = Q
    if x1 == x2:
        if (y1 + y2) % p == 0:
            return None
        lam = (3 * x1 * x1 + a) * pow(2 * y1, p - 2, p) % p
    else:
        lam = (y2 - y1) * pow(x2 - x1, p - 2, p) % p
    x3 = (lam * lam - x1 - x2) % p
    return (x3, (lam * (x1 - x3) - y1) % p)


def _mul_raw(k, P, p, a):
    if P is None or k == 0:
        return None
    R = None
    Q = P
    while True:
        if k & 1:
            R = _add_raw(R, Q, p, a)
        k >>= 1
        if not k:
            return R
        Q = _add_raw(Q, Q, p, a)


def add(P, Q, C: ReducedCurve):
    """Chord-tangent sum of two points on C (validated)."""
    if not on_curve(P, C) or not on_curve(Q, C):
        raise ValueError("point not on curve")
    return _add_raw(P, Q, C.p, C.a)


def scalar_mul(k: int, P, C: ReducedCurve):
    """k-fold sum of P on C; negative k multiplies the inverse point."""
    if not on_curve(P, C):
        raise ValueError("point not on curve")
    if k < 0:
        if P is not None:
            P = (P[0], (-P[1]) % C.p)
        k = -k
    return _mul_raw(k, P, C.p, C.a)


# ---------------------------------------------------------------------------
# deterministic sampling


def _mix_seed(p, a, b, tag):
    return (
        p * 0x9E3779B97F4A7C15
        ^ a * 0xBF58476D1CE4E5B9
        ^ b * 0x94D049BB133111EB
        ^ tag * 0xD6E8FEB86659FD93
    ) & _M64


def _next64(s):
    s = (s + 0x9E3779B97F4A7C15) & _M64
    z = s
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return s, z ^ (z >> 31)


def _sample_point(p, a, b, s):
    """One affine point and the advanced stream state.

    Draws x uniformly, keeps it when x^3 + ax + b is a square, and picks
    the y-root by one extra stream bit.  Terminates for every curve with
    an affine point; the cap can only fire on a trivial group (p = 3).
    """
    e2 = (p - 1) >> 1
    for _ in range(4096):
        s, z = _next64(s)
        x = z % p
        rhs = (x * x % p * x + a * x + b) % p
        if rhs == 0:
            return (x, 0), s
        if pow(rhs, e2, p) == 1:
            if p & 3 == 3:
                r = pow(rhs, (p + 1) >> 2, p)
                if r > p - r:
                    r = p - r
            else:
                r = sqrt_mod(rhs, p)
            s, z = _next64(s)
            return ((x, r) if z & 1 == 0 else (x, p - r)), s
    raise IterationCap(f"no affine point found on y^2=x^3+{a}x+{b} over F_{p}")


def random_point(C: ReducedCurve, seed: int):
    """Deterministic pseudo-random point on C for the given seed."""
    s = _mix_seed(C.p, C.a, C.b, seed & _M64)
    P, _ = _sample_point(C.p, C.a, C.b, s)
    return P


# ---------------------------------------------------------------------------
# group order


def _order_exhaustive(p, a, b):
    # quadratic-residue table; total points = 1 + sum over x of (1 + chi(rhs))
    qr = bytearray(p)
    for y in range((p + 1) // 2):
        qr[y * y % p] = 1
    n = 1
    for x in range(p):
        z = (x * x % p * x + a * x + b) % p
        if z == 0:
            n += 1
        elif qr[z]:
            n += 2
    return n


def _window_annihilators(P, p, a, lo, hi):
    """Sorted multiples of ord(P) inside [lo, hi], by baby-step giant-step.

    Walks j*P for j < m as baby steps, then (lo + i*m)*P as giant steps.
    An x-coordinate collision resolves to lo + i*m + j or lo + i*m - j by
    the y sign, and either way the resolved value is a genuine
    annihilator of P, so no verification multiplication is needed.
    Every multiple of ord(P) in the window is emitted; stray annihilators
    outside it are filtered before returning.
    """
    width = hi - lo + 1
    m = isqrt(width - 1) + 1
    px, py = P
    pm2 = p - 2
    tab = {px: (1, py)}
    bx, by = px, py
    order = 0
    for j in range(2, m):
        # baby step: B_j = B_{j-1} + P.  The walk meets O first at
        # j = ord(P), flagged one step early by B_{j-1} = -P.
        if bx == px:
            if (by + py) % p == 0:
                order = j
                break
            lam = (3 * px * px + a) * pow(2 * py, pm2, p) % p
        else:
            lam = (by - py) * pow(bx - px, pm2, p) % p
        nx = (lam * lam - px - bx) % p
        by = (lam * (px - nx) - py) % p
        bx = nx
        tab.setdefault(bx, (j, by))
    G = None
    if not order:
        G = _mul_raw(m, (px, py), p, a)
        if G is None:
            # not annihilated below m but killed by m, so ord(P) = m
            order = m
        else:
            # ord in [m, 2m) makes the baby table mirror-collide and the
            # giant scan incomplete, but then G = m*P = -(j*P) sits in the
            # table and pins the order to m + j exactly; ord >= 2m keeps
            # every baby x distinct and the scan below is complete.
            hit = tab.get(G[0])
            if hit is not None:
                j, yj = hit
                if G[1] != (p - yj) % p:
                    raise AssertionError(f"impossible giant-stride collision p={p}")
                order = m + j
    if order:
        first = ((lo + order - 1) // order) * order
        return list(range(first, hi + 1, order))
    gx, gy = G
    T = _mul_raw(lo, (px, py), p, a)
    hits = []
    base = lo
    for _ in range((width - 1) // m + 2):
        if T is None:
            hits.append(base)
        else:
            tx, ty = T
            hit = tab.get(tx)
            if hit is not None:
                j, yj = hit
                if ty == p - yj or yj == 0:
                    hits.append(base + j)
                if ty == yj:
                    hits.append(base - j)
        # T += G, inlined
        if T is None:
            T = G
        else:
            tx, ty = T
            if tx == gx:
                if (ty + gy) % p == 0:
                    T = None
                else:
                    lam = (3 * tx * tx + a) * pow(2 * ty, pm2, p) % p
                    nx = (lam * lam - tx - tx) % p
                    T = (nx, (lam * (tx - nx) - ty) % p)
            else:
                lam = (gy - ty) * pow(gx - tx, pm2, p) % p
                nx = (lam * lam - tx - gx) % p
                T = (nx, (lam * (gx - nx) - gy) % p)
        base += m
    out = sorted(k for k in set(hits) if lo <= k <= hi)
    if not out:
        raise AssertionError(f"window scan lost the group order at p={p}")
    return out


def _order_via_sampling(p, a, b, tag):
    """(N, L, state): N = 0 means still ambiguous after the point budget."""
    t = isqrt(4 * p)
    lo, hi = p + 1 - t, p + 1 + t
    s = _mix_seed(p, a, b, tag)
    L = 1
    for _ in range(_SAMPLE_BUDGET):
        P, s = _sample_point(p, a, b, s)
        anni = _window_annihilators(P, p, a, lo, hi)
        if len(anni) == 1:
            return anni[0], L, s
        n = anni[1] - anni[0]  # consecutive window multiples differ by ord(P)
        L = L * n // gcd(L, n)
        first = ((lo + L - 1) // L) * L
        if first + L > hi:
            return first, L, s
    return 0, L, s


def group_order(C: ReducedCurve) -> int:
    """Number of points on C including infinity; always exact.

    Below 2**10 the count is exhaustive.  Above, sampled point orders are
    combined until a unique Hasse-window multiple survives; if eight
    points do not settle it, the quadratic twist (orders summing to
    2p + 2) breaks the tie.
    """
    p, a, b = C.p, C.a, C.b
    if p < _EXHAUSTIVE_BELOW:
        return _order_exhaustive(p, a, b)
    N, L, _ = _order_via_sampling(p, a, b, tag=1)
    if N:
        return N
    # quadratic twist by the least non-residue c: y^2 = x^3 + a c^2 x + b c^3
    e2 = (p - 1) >> 1
    c = 2
    while pow(c, e2, p) == 1:
        c += 1
    a2, b2 = a * c * c % p, b * c * c % p * c % p
    t = isqrt(4 * p)
    lo, hi = p + 1 - t, p + 1 + t
    s = _mix_seed(p, a2, b2, 3)
    total = 2 * p + 2
    first = ((lo + L - 1) // L) * L
    L2 = 1
    for _ in range(_SAMPLE_BUDGET):
        P, s = _sample_point(p, a2, b2, s)
        anni = _window_annihilators(P, p, a2, lo, hi)
        if len(anni) == 1:
            return total - anni[0]
        n = anni[1] - anni[0]
        L2 = L2 * n // gcd(L2, n)
        cands = [k for k in range(first, hi + 1, L) if (total - k) % L2 == 0]
        if len(cands) == 1:
            return cands[0]
    raise IterationCap(f"group order over F_{p} unresolved after twist pass")


def point_order(P, N: int, C: ReducedCurve) -> int:
    """Exact order of P given any annihilating multiple N (e.g. the group order)."""
    p, a = C.p, C.a
    if P is None:
        return 1
    if _mul_raw(N, P, p, a) is not None:
        raise BadWitness(f"claimed multiple {N} does not annihilate the point")
    n = N
    for q, e in factorize(N):
        for _ in range(e):
            m = n // q
            if _mul_raw(m, P, p, a) is None:
                n = m
            else:
                break
    return n


# ---------------------------------------------------------------------------
# group structure


def _sylow_point(p, a, b, cof, l, s):
    """Sample a point, project into the l-Sylow part, return (point, j, state).

    j is the exact l-valuation of the projected point's order, found by
    repeated multiplication by l.
    """
    R, s = _sample_point(p, a, b, s)
    S = _mul_raw(cof, R, p, a)
    j = 0
    T = S
    while T is not None:
        T = _mul_raw(l, T, p, a)
        j += 1
    return S, j, s


def _sylow_first_invariant(p, a, b, N, l, v, budget=_STRUCTURE_BUDGET) -> int:
    """Exponent of l in the first invariant factor d, certified.

    The l-Sylow subgroup is Z/l^a x Z/l^b with a + b = v and
    a <= min(v // 2, v_l(p-1)).  A sampled point of order l^v certifies
    a = 0.  Otherwise a = v - b is certified from above by a point of
    order l^b and from below by two independent points of order l^a;
    reducing both to order l and listing the <= l multiples of one
    decides independence.
    """
    w = 0
    pm1 = p - 1
    while pm1 % l == 0:
        pm1 //= l
        w += 1
    amax = min(v // 2, w)
    if amax == 0:
        return 0
    cof = N // l**v
    s = _mix_seed(p, a, b, 16 + l)
    best = None
    bestj = 0
    for _ in range(budget):
        S, j, s = _sylow_point(p, a, b, cof, l, s)
        if j > bestj:
            best, bestj = S, j
        a0 = v - bestj
        if a0 == 0:
            return 0
        if a0 > amax:
            continue
        # discrete logs in the order-l subgroup under the reduction of best
        Pl = _mul_raw(l ** (bestj - 1), best, p, a)
        dlog = {}
        T = Pl
        c = 1
        while T is not None:
            dlog[T] = c
            T = _add_raw(T, Pl, p, a)
            c += 1
        # peel the <best>-component off S digit by digit; a sample whose
        # order-l reduction leaves <Pl> at level >= a0 certifies, paired
        # with best, that the first invariant factor is exactly l^a0
        T = S
        jt = j
        while T is not None:
            TL = _mul_raw(l ** (jt - 1), T, p, a)
            c = dlog.get(TL)
            if c is None:
                if jt >= a0:
                    return a0
                break
            W = _mul_raw(c * l ** (bestj - jt), best, p, a)
            T = _add_raw(T, (W[0], (p - W[1]) % p), p, a)
            jt = 0
            U = T
            while U is not None:
                U = _mul_raw(l, U, p, a)
                jt += 1
    raise IterationCap(f"l={l} structure unresolved for p={p} within budget")


def group_structure(C: ReducedCurve) -> GroupStructure:
    """Invariant factors (n, d, e) of the point group, always exact.

    Only primes l with l^2 | n and l | p-1 can divide d; each contributes
    its certified Sylow first invariant.
    """
    p, a, b = C.p, C.a, C.b
    n = group_order(C)
    if n == 1:
        return GroupStructure(1, 1, 1)
    d = 1
    for l, v in factorize(n):
        if v >= 2 and (p - 1) % l == 0:
            d *= l ** _sylow_first_invariant(p, a, b, n, l, v)
    return GroupStructure(n, d, n // d)


def has_full_ell_torsion(C: ReducedCurve, l: int) -> bool:
    """Whether all l^2 points of order dividing l are rational, i.e. l | d.

    Requires gcd(l, p) = 1; a true answer forces l | p-1 and l^2 | n, so
    those two cheap rejections run first.
    """
    p = C.p
    if p % l == 0:
        raise ValueError(f"l={l} equals the residue characteristic")
    if (p - 1) % l != 0:
        return False
    n = group_order(C)
    v = 0
    while n % l == 0:
        n //= l
        v += 1
    if v < 2:
        return False
    return _sylow_first_invariant(p, C.a, C.b, n * l**v, l, v) >= 1


def is_cyclic(C: ReducedCurve) -> bool:
    """True when the point group is cyclic (first invariant factor 1)."""
    return group_structure(C).d == 1
