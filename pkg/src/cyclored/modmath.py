"""Modular arithmetic and factorization primitives.

Everything here is deterministic: primality testing uses a fixed
Miller-Rabin witness set that is exhaustive for 64-bit inputs, and the
Pollard rho fallback in ``factorize`` walks a fixed schedule of cycle
parameters, so repeated runs factor the same integer the same way.
"""

from __future__ import annotations

from math import gcd, isqrt


class NotAResidue(Exception):
    """Raised by sqrt_mod when the argument is a quadratic non-residue."""


class LimitTooLarge(Exception):
    """Raised by sieve_primes when the requested bound exceeds 2**32."""


# Exhaustive for n < 3_317_044_064_679_887_385_961_981 (covers 64-bit).
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_TRIAL_BOUND = 100_000
_small_primes_cache: list[int] | None = None


def pow_mod(base: int, exp: int, modulus: int) -> int:
    """Least non-negative residue of base**exp.  exp >= 0, modulus >= 1."""
    if exp < 0:
        raise ValueError("negative exponent")
    if modulus < 1:
        raise ValueError("modulus must be positive")
    return pow(base, exp, modulus)


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a|p) for an odd prime p, as -1, 0 or 1."""
    a %= p
    if a == 0:
        return 0
    t = pow(a, (p - 1) >> 1, p)
    return 1 if t == 1 else -1


def sqrt_mod(a: int, p: int) -> int:
    """Square root of a modulo an odd prime p, canonicalized to min(r, p-r).

    Raises NotAResidue when (a|p) = -1.  a = 0 maps to 0.  The p % 4 == 3
    branch is a single exponentiation; the general case is Tonelli-Shanks
    seeded with the least quadratic non-residue, so the output never
    depends on external randomness.
    """
    a %= p
    if a == 0:
        return 0
    if legendre(a, p) != 1:
        raise NotAResidue(f"{a} is not a square mod {p}")
    if p % 4 == 3:
        r = pow(a, (p + 1) >> 2, p)
        return min(r, p - r)
    # Tonelli-Shanks: write p-1 = q * 2^s with q odd.
    q = p - 1
    s = 0
    while q % 2 == 0:
        q >>= 1
        s += 1
    z = 2
    while legendre(z, p) != -1:
        z += 1
    m = s
    c = pow(z, q, p)
    t = pow(a, q, p)
    r = pow(a, (q + 1) >> 1, p)
    while t != 1:
        # find least i with t^(2^i) = 1
        i = 0
        t2 = t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m = i
        c = b * b % p
        t = t * c % p
        r = r * b % p
    return min(r, p - r)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exhaustive for n < 2**64."""
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    d = n - 1
    s = 0
    while d % 2 == 0:
        d >>= 1
        s += 1
    for w in _MR_WITNESSES:
        x = pow(w, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def ensure_prime_modulus(p: int) -> int:
    """Validate an odd prime modulus in (2, 2**62) and return it."""
    if not 2 < p < (1 << 62):
        raise ValueError(f"modulus {p} out of range (2, 2**62)")
    if not is_prime(p):
        raise ValueError(f"modulus {p} is not prime")
    return p


def sieve_primes(x: int) -> list[int]:
    """Ordered list of all primes <= x (x >= 2).

    Plain odd-only Eratosthenes over a bytearray.  Bounds above 2**32
    raise LimitTooLarge rather than attempting a multi-gigabyte sieve.
    """
    if x < 2:
        raise ValueError("sieve bound must be at least 2")
    if x > (1 << 32):
        raise LimitTooLarge(f"sieve bound {x} exceeds 2**32")
    # index i represents the odd number 2*i + 1
    half = (x + 1) // 2
    marks = bytearray([1]) * half
    marks[0] = 0  # 1 is not prime
    for i in range(1, min(half, (isqrt(x) + 1) // 2 + 1)):
        if marks[i]:
            step = 2 * i + 1
            start = (step * step) // 2
            marks[start::step] = bytearray(len(range(start, half, step)))
    out = [2] if x >= 2 else []
    out.extend(2 * i + 1 for i in range(1, half) if marks[i])
    return out


def _small_primes() -> list[int]:
    global _small_primes_cache
    if _small_primes_cache is None:
        _small_primes_cache = sieve_primes(_TRIAL_BOUND)
    return _small_primes_cache


def _rho_brent(n: int) -> int:
    """Nontrivial factor of odd composite n via Brent's rho, fixed schedule."""
    for c in range(1, 64):
        y, m, g, r, q = 2, 128, 1, 1, 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = gcd(q, n)
                k += m
            r <<= 1
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = gcd(abs(x - ys), n)
        if g != n:
            return g
    raise ArithmeticError(f"rho failed on {n}")  # unreachable in 62 bits


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorization of n as a sorted list of (prime, exponent).

    Valid for 1 <= n < 2**62.  Trial division by primes below 10**5
    first; any remaining cofactor is split recursively with Brent rho.
    factorize(1) == [].
    """
    if not 1 <= n < (1 << 62):
        raise ValueError(f"factorize expects 1 <= n < 2**62, got {n}")
    out: dict[int, int] = {}
    m = n
    for q in _small_primes():
        if q * q > m:
            break
        if m % q == 0:
            e = 0
            while m % q == 0:
                m //= q
                e += 1
            out[q] = e
    if m > 1:
        if m < _TRIAL_BOUND * _TRIAL_BOUND or is_prime(m):
            # cofactor below the trial bound squared is necessarily prime
            out[m] = out.get(m, 0) + 1
        else:
            stack = [m]
            while stack:
                v = stack.pop()
                if is_prime(v):
                    out[v] = out.get(v, 0) + 1
                    continue
                d = _rho_brent(v)
                stack.append(d)
                stack.append(v // d)
    return sorted(out.items())


def moebius(m: int) -> int:
    """Moebius function: 0 on non-squarefree m, else (-1)^(number of primes)."""
    if m < 1:
        raise ValueError("moebius expects m >= 1")
    fac = factorize(m)
    for _, e in fac:
        if e > 1:
            return 0
    return -1 if len(fac) % 2 else 1


def divisors(n: int) -> list[int]:
    """Sorted list of positive divisors of n."""
    out = [1]
    for q, e in factorize(n):
        out = [d * q**k for d in out for k in range(e + 1)]
    return sorted(out)


def primitive_root(p: int) -> int:
    """Smallest generator of the multiplicative group modulo a prime p."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p == 2:
        return 1
    radicals = [q for q, _ in factorize(p - 1)]
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in radicals):
            return g
    raise AssertionError(f"no primitive root below {p}")
