"""Division-field degree inputs from the curve itself.

The 2-division degree comes from exact factorization of the cubic.  For
l >= 5 a sampling certifier can rule out every proper subgroup class of
the mod-l image from Frobenius trace data; certification is one-sided
and flagged heuristic, non-certification is never a claim.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isqrt

from .curve import BadReduction, CurveOverQ, group_order, reduce
from .modmath import divisors, is_prime, legendre, pow_mod, sieve_primes

DEFAULT_SAMPLE_BOUND = 10**4


class InvalidPrime(Exception):
    """Certification is undefined for this torsion prime."""


@dataclass(frozen=True)
class ImageFingerprint:
    l: int
    samples: int
    w1: bool  # some trace with irreducible characteristic polynomial
    w2: bool  # some nonzero trace with split characteristic polynomial
    w3: bool  # some trace ratio outside the exceptional-image values
    trace_det_pairs: frozenset[tuple[int, int]]

    def to_json_dict(self) -> dict:
        return {
            "l": self.l,
            "samples": self.samples,
            "witnesses": {"W1": self.w1, "W2": self.w2, "W3": self.w3},
            "trace_det_pairs": sorted(self.trace_det_pairs),
        }


@dataclass(frozen=True)
class CertificationResult:
    l: int
    certified: bool
    fingerprint: ImageFingerprint
    # The witness criterion is classical subgroup classification, not
    # something this package proves; consumers must treat a positive
    # answer as heuristic evidence, so the flag ships in every result.
    heuristic: bool = True

    def to_json_dict(self) -> dict:
        return {
            "l": self.l,
            "certified": self.certified,
            "heuristic": self.heuristic,
            "fingerprint": self.fingerprint.to_json_dict(),
        }


def _integer_roots(A: int, B: int) -> set[int]:
    """All integer roots of x^3 + Ax + B; rational roots of a monic
    integer cubic are integers dividing the constant term."""
    if B == 0:
        roots = {0}
        if A < 0:
            s = isqrt(-A)
            if s * s == -A:
                roots.update((s, -s))
        return roots
    roots = set()
    for d in divisors(abs(B)):
        for r in (d, -d):
            if r * r * r + A * r + B == 0:
                roots.add(r)
    return roots


def two_division_degree(curve: CurveOverQ) -> int:
    """Degree over the rationals of the splitting field of x^3 + Ax + B:
    1, 2, 3, or 6 according to the rational roots and whether the cubic
    discriminant -4A^3 - 27B^2 is a square."""
    roots = _integer_roots(curve.A, curve.B)
    if len(roots) == 3:
        return 1
    if len(roots) == 1:
        return 2
    if roots:
        raise AssertionError("cubic with a repeated root escaped the singular check")
    disc = -4 * curve.A**3 - 27 * curve.B**2
    if disc > 0 and isqrt(disc) ** 2 == disc:
        return 3
    return 6


def frobenius_trace(curve: CurveOverQ, p: int) -> int:
    """a_p = p + 1 - #E(F_p) for a prime of good reduction."""
    N = group_order(reduce(curve, p))
    a = p + 1 - N
    if a * a > 4 * p:
        raise AssertionError(f"trace {a} at {p} violates the Hasse bound")
    return a


def certify_surjective(
    curve: CurveOverQ, l: int, sample_bound: int = DEFAULT_SAMPLE_BOUND
) -> CertificationResult:
    """Sample Frobenius data at good primes p <= sample_bound and try to
    witness that the mod-l image is the full matrix group.

    Witnesses over pairs (t, d) = (a_p mod l, p mod l) with t != 0:
    W1 needs t^2 - 4d a nonzero non-square, W2 a nonzero square, and W3
    a ratio u = t^2/d outside {0, 1, 2, 4} with u^2 - 3u + 1 != 0.
    Together they exclude the reducible, dihedral, and exceptional
    subgroup classes for l >= 5, so all three certify surjectivity.
    For l = 3 the classification shortcut fails and only the fingerprint
    is reported; l = 2 is rejected (the cubic answers that case exactly).
    """
    if l < 3 or not is_prime(l):
        raise InvalidPrime(f"certification undefined for l={l}")
    w1 = w2 = w3 = False
    pairs: set[tuple[int, int]] = set()
    samples = 0
    certifiable = l >= 5
    for p in sieve_primes(sample_bound):
        if p == l:
            continue
        try:
            t = frobenius_trace(curve, p) % l
        except BadReduction:
            continue
        samples += 1
        d = p % l
        pairs.add((t, d))
        if t != 0:
            disc = (t * t - 4 * d) % l
            if disc != 0:
                if legendre(disc, l) == -1:
                    w1 = True
                else:
                    w2 = True
            u = t * t * pow_mod(d, l - 2, l) % l
            if u not in (0, 1, 2, 4) and (u * u - 3 * u + 1) % l != 0:
                w3 = True
        if certifiable and w1 and w2 and w3:
            break
    fp = ImageFingerprint(
        l=l, samples=samples, w1=w1, w2=w2, w3=w3, trace_det_pairs=frozenset(pairs)
    )
    certified = certifiable and w1 and w2 and w3
    return CertificationResult(l=l, certified=certified, fingerprint=fp)
