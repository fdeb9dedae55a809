"""Exact rational and interval arithmetic for cyclic-reduction densities.

Infinite Euler products are returned as rational intervals with proven
tail bounds; every correction factor stays an exact Fraction so that
vanishing is decided by exact arithmetic, never by a float comparison.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import prod

from .modmath import divisors, factorize, is_prime, moebius, sieve_primes
from .utils import truncate_decimal


class DegreeOne(Exception):
    """A formula with a 1/(degree-1) or 1/(1-1/degree) pole met degree 1."""


class MissingDegree(Exception):
    """A composite division-field degree is entangled beyond the profile's
    annotations and no explicit override was supplied."""


class ProfileLeak(Exception):
    """A profile-annotated prime falls outside the factorization modulus."""


class Indeterminate(Exception):
    """Interval straddles zero where the classification needs a sign."""


def gl2_order(l: int) -> int:
    """Order of the group of invertible 2x2 matrices over the field of l
    elements: (l^2 - 1)(l^2 - l)."""
    if l < 2 or not is_prime(l):
        raise ValueError(f"{l} is not prime")
    return (l * l - 1) * (l * l - l)


@dataclass(frozen=True)
class Interval:
    """Closed interval with exact rational endpoints, lo <= hi."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if self.lo > self.hi:
            raise ValueError("interval endpoints out of order")

    @classmethod
    def point(cls, x) -> "Interval":
        x = Fraction(x)
        return cls(x, x)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x) -> bool:
        x = Fraction(x)
        return self.lo <= x <= self.hi

    def encloses(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def scale(self, r) -> "Interval":
        r = Fraction(r)
        if r >= 0:
            return Interval(self.lo * r, self.hi * r)
        return Interval(self.hi * r, self.lo * r)

    def __mul__(self, other):
        if isinstance(other, Interval):
            cands = (
                self.lo * other.lo,
                self.lo * other.hi,
                self.hi * other.lo,
                self.hi * other.hi,
            )
            return Interval(min(cands), max(cands))
        return self.scale(other)

    __rmul__ = __mul__

    def decimal_bounds(self, digits: int = 20) -> tuple[str, str]:
        """Decimal renderings of both endpoints, truncated toward zero.

        For the nonnegative quantities handled here the lo string stays a
        valid lower bound; the hi string is for display, since truncation
        can shave it below the exact upper endpoint.
        """
        return (
            truncate_decimal(self.lo.numerator, self.lo.denominator, digits),
            truncate_decimal(self.hi.numerator, self.hi.denominator, digits),
        )


@dataclass(frozen=True)
class DegreeProfile:
    """Division-field degree annotations for one curve.

    degrees maps a prime l to [K_l : K]; absent primes are maximal, with
    degree gl2_order(l).  superfluous marks primes whose splitting
    condition is implied by another division field (their Euler factor
    must be cancelled).  charsum marks a set of primes tied together by a
    quadratic character, cutting the joint degree in half.  overrides
    pins the degree of specific squarefree composites directly.
    """

    degrees: dict[int, int] = field(default_factory=dict)
    superfluous: frozenset[int] = frozenset()
    charsum: frozenset[int] = frozenset()
    overrides: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "superfluous", frozenset(self.superfluous))
        object.__setattr__(self, "charsum", frozenset(self.charsum))
        for l, d in self.degrees.items():
            if not is_prime(l):
                raise ValueError(f"degree key {l} is not prime")
            if d < 1:
                raise ValueError(f"degree for {l} must be positive")
        for l in self.superfluous | self.charsum:
            if not is_prime(l):
                raise ValueError(f"annotated prime {l} is not prime")
        if self.superfluous & self.charsum:
            raise ValueError("a prime may carry at most one entanglement role")
        if len(self.charsum) == 1:
            raise ValueError("character entanglement needs at least two primes")
        for m, d in self.overrides.items():
            if m < 2 or any(e > 1 for _, e in factorize(m)):
                raise ValueError(f"override key {m} must be squarefree and > 1")
            if d < 1:
                raise ValueError(f"override degree for {m} must be positive")

    def degree(self, l: int) -> int:
        """[K_l : K] for a prime l: the annotation, else the generic value."""
        return self.degrees.get(l, gl2_order(l))

    def composite_degree(self, m: int) -> int:
        """[K_m : K] for squarefree m >= 1, resolved by precedence:
        explicit override, then the prime degree, then the product of
        prime degrees halved when m absorbs the whole character set."""
        if m == 1:
            return 1
        if m in self.overrides:
            return self.overrides[m]
        ell = [q for q, _ in factorize(m)]
        if len(ell) == 1:
            return self.degree(m)
        if any(q in self.superfluous for q in ell):
            raise MissingDegree(
                f"degree of the composite level {m} depends on a containment "
                f"not captured by annotations; add an override"
            )
        d = prod(self.degree(q) for q in ell)
        if self.charsum and self.charsum <= set(ell):
            if d % 2:
                raise MissingDegree(
                    f"character entanglement at level {m} needs an even "
                    f"joint degree, got {d}"
                )
            d //= 2
        return d

    def annotated_primes(self) -> frozenset[int]:
        return frozenset(self.degrees) | self.superfluous | self.charsum

    def to_json_dict(self) -> dict:
        return {
            "degrees": {str(l): d for l, d in sorted(self.degrees.items())},
            "superfluous": sorted(self.superfluous),
            "charsum": sorted(self.charsum),
            "overrides": {str(m): d for m, d in sorted(self.overrides.items())},
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "DegreeProfile":
        return cls(
            degrees={int(k): int(v) for k, v in d.get("degrees", {}).items()},
            superfluous=frozenset(int(x) for x in d.get("superfluous", ())),
            charsum=frozenset(int(x) for x in d.get("charsum", ())),
            overrides={int(k): int(v) for k, v in d.get("overrides", {}).items()},
        )


def _tail_bound(L: int) -> Fraction:
    # sum over integers n > L of 1/((n^2-1)(n^2-n)) telescopes below 1/L^3:
    # each term is at most 1/(n-1)^3 - 1/n^3, valid for every n >= 2.
    return Fraction(1, L**3)


def _euler_product(L: int, degree_of, skip=None) -> Fraction | None:
    """Exact partial product of (1 - 1/degree_of(l)) over primes l <= L,
    omitting primes matched by the skip predicate.

    Returns None when some factor vanishes (a degree of 1), since the
    whole product is then exactly zero.
    """
    num = 1
    den = 1
    for l in sieve_primes(L):
        if skip is not None and skip(l):
            continue
        d = degree_of(l)
        if d == 1:
            return None
        num *= d - 1
        den *= d
    return Fraction(num, den)


def artin_constant(L: int) -> Interval:
    """Enclosure of the everywhere-maximal density constant, the product
    of 1 - 1/((l^2-1)(l^2-l)) over all primes, truncated at L."""
    if L < 2:
        raise ValueError("truncation bound must be at least 2")
    P = _euler_product(L, gl2_order)
    return Interval(P * (1 - _tail_bound(L)), P)


def naive_density(profile: DegreeProfile, L: int = 10**5) -> Interval:
    """Enclosure of the independence-model density: the Euler product of
    1 - 1/[K_l : K] over all primes, with the profile's degrees
    substituted.  The truncation point is raised to cover every
    annotated prime so no substitution is lost to the tail."""
    if L < 2:
        raise ValueError("truncation bound must be at least 2")
    ann = profile.annotated_primes()
    L = max(L, max(ann, default=0))
    P = _euler_product(L, profile.degree)
    if P is None:
        return Interval.point(0)
    return Interval(P * (1 - _tail_bound(L)), P)


def delta_partial(n: int, profile: DegreeProfile) -> Fraction:
    """Exact inclusion-exclusion sum over divisors m of squarefree n of
    mu(m)/[K_m : K]: the density of primes with no full l-torsion for
    any l | n, under the profile's degree data."""
    if n < 1:
        raise ValueError("level must be positive")
    if any(e > 1 for _, e in factorize(n)):
        raise ValueError(f"level {n} must be squarefree")
    total = Fraction(0)
    for m in divisors(n):
        total += Fraction(moebius(m), profile.composite_degree(m))
    return total


def delta_factored(
    N: int, deltaN: Fraction, profile: DegreeProfile, L: int = 10**5
) -> Interval:
    """Enclosure of deltaN times the maximal Euler product over primes
    not dividing N.  Sound only when every annotated prime divides N;
    a leak raises ProfileLeak instead of silently double-counting."""
    if N < 1 or any(e > 1 for _, e in factorize(N)):
        raise ValueError("modulus must be a positive squarefree integer")
    if L < 2:
        raise ValueError("truncation bound must be at least 2")
    for l in sorted(profile.annotated_primes()):
        if N % l != 0:
            raise ProfileLeak(f"annotated prime {l} does not divide {N}")
    deltaN = Fraction(deltaN)
    if deltaN < 0:
        raise ValueError("density at the modulus cannot be negative")
    P = _euler_product(L, profile.degree, skip=lambda l: N % l == 0)
    if P is None:
        return Interval.point(0)
    return Interval(P * (1 - _tail_bound(L)), P).scale(deltaN)


def charsum_alpha(degrees: dict[int, int]) -> Fraction:
    """Exact correction 1 + prod(-1/(deg - 1)) for an index-2 quadratic
    character entanglement across the given prime degrees."""
    if len(degrees) < 2:
        raise ValueError("character entanglement needs at least two primes")
    acc = Fraction(1)
    for l, d in degrees.items():
        if d == 1:
            raise DegreeOne(f"degree 1 at {l} is a pole of the character sum")
        acc *= Fraction(-1, d - 1)
    return 1 + acc


def superfluous_correction(profile: DegreeProfile) -> Fraction:
    """Product of 1/(1 - 1/[K_l : K]) over the superfluous primes,
    cancelling their redundant Euler factors."""
    acc = Fraction(1)
    for l in sorted(profile.superfluous):
        d = profile.degree(l)
        if d == 1:
            raise DegreeOne(f"degree 1 at superfluous prime {l}")
        acc *= Fraction(d, d - 1)
    return acc


def c_factor(profile: DegreeProfile, alpha: Fraction) -> Fraction:
    """Exact rational c with delta = c times the everywhere-maximal
    constant: alpha times the ratio of each annotated Euler factor to
    its maximal counterpart."""
    c = Fraction(alpha)
    for l, d in sorted(profile.degrees.items()):
        g = gl2_order(l)
        c *= Fraction((d - 1) * g, d * (g - 1))
    return c


def entanglement_modulus(curve, nonmaximal=frozenset(), disc_K: int = 1) -> int:
    """Squarefree product of every prime that can entangle division
    fields: 2, 3, 5, primes of the base-field discriminant, primes of
    bad reduction, and primes with nonmaximal mod-l image."""
    if disc_K == 0:
        raise ValueError("field discriminant cannot be zero")
    primes = {2, 3, 5}
    primes.update(q for q, _ in factorize(abs(curve.delta_E)))
    primes.update(q for q, _ in factorize(abs(disc_K)))
    primes.update(nonmaximal)
    for l in primes:
        if not is_prime(l):
            raise ValueError(f"nonmaximal entry {l} is not prime")
    return prod(sorted(primes))


def classify_vanishing(
    naive: Interval, alpha: Fraction, profile: DegreeProfile
) -> str:
    """Label the density: 'trivial' when some annotated degree is 1,
    'non_trivial' when the naive density is positive but the exact
    correction vanishes, 'positive' otherwise."""
    alpha = Fraction(alpha)
    degree_values = list(profile.degrees.values()) + list(profile.overrides.values())
    if 1 in degree_values:
        return "trivial"
    if alpha == 0:
        if naive.lo > 0:
            return "non_trivial"
        raise Indeterminate("correction vanishes but the naive sign is unclear")
    if naive.lo > 0:
        return "positive"
    raise Indeterminate("naive density interval straddles zero")


def _frac_json(x: Fraction) -> dict:
    return {
        "exact": f"{x.numerator}/{x.denominator}",
        "decimal": truncate_decimal(x.numerator, x.denominator, 20),
    }


def _interval_json(iv: Interval) -> dict:
    lo, hi = iv.decimal_bounds(20)
    return {
        "lo_exact": f"{iv.lo.numerator}/{iv.lo.denominator}",
        "hi_exact": f"{iv.hi.numerator}/{iv.hi.denominator}",
        "lo_decimal": lo,
        "hi_decimal": hi,
        "width_decimal": truncate_decimal(
            iv.width.numerator, iv.width.denominator, 20
        ),
    }


@dataclass
class DensityReport:
    profile: DegreeProfile
    truncation: int
    a_inf: Interval
    naive: Interval
    charsum_factor: Fraction
    superfluous_factor: Fraction
    alpha: Fraction
    c: Fraction
    delta: Interval
    vanishing: str
    provenance: dict = field(default_factory=dict)
    schema_version: int = 1

    def to_json_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "profile": self.profile.to_json_dict(),
            "truncation": self.truncation,
            "a_inf": _interval_json(self.a_inf),
            "naive": _interval_json(self.naive),
            "charsum_factor": _frac_json(self.charsum_factor),
            "superfluous_factor": _frac_json(self.superfluous_factor),
            "alpha": _frac_json(self.alpha),
            "c": _frac_json(self.c),
            "delta": _interval_json(self.delta),
            "vanishing": self.vanishing,
            "provenance": self.provenance,
        }


def build_density_report(
    profile: DegreeProfile, L: int = 10**5, provenance: dict | None = None
) -> DensityReport:
    """Assemble the full density picture for one profile.

    The truncation point is raised to cover every annotated prime, which
    makes the two decompositions exactly equal as intervals: alpha times
    the substituted product, and c times the maximal product.  That
    equality is asserted, not assumed.
    """
    ann = profile.annotated_primes()
    L = max(L, max(ann, default=0), 2)
    a_inf = artin_constant(L)
    naive = naive_density(profile, L)
    if profile.charsum:
        cs = charsum_alpha({l: profile.degree(l) for l in sorted(profile.charsum)})
    else:
        cs = Fraction(1)
    sf = superfluous_correction(profile)
    alpha = cs * sf
    delta = naive.scale(alpha)
    c = c_factor(profile, alpha)
    recomposed = a_inf.scale(c)
    if (delta.lo, delta.hi) != (recomposed.lo, recomposed.hi):
        raise AssertionError("decompositions of the density disagree")
    vanishing = classify_vanishing(naive, alpha, profile)
    return DensityReport(
        profile=profile,
        truncation=L,
        a_inf=a_inf,
        naive=naive,
        charsum_factor=cs,
        superfluous_factor=sf,
        alpha=alpha,
        c=c,
        delta=delta,
        vanishing=vanishing,
        provenance=provenance or {},
    )
