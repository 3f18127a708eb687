"""Cyclotomic polynomials and cyclotomic divisibility of mask polynomials.

Everything here is exact integer arithmetic.  Divisibility of a mask
polynomial A(X) by Phi_s is decided through the cofactor identity

    Phi_s | A  <=>  A * C_s == 0  (mod X^s - 1),   C_s = (X^s - 1) / Phi_s,

which avoids coefficient growth: it only ever multiplies and folds.
C_s is assembled from the cyclotomic factorization of X^s - 1 and the
result is verified against X^s - 1 once, so an int64 overflow (which would
require gigantic coefficients to begin with) cannot pass silently.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import prod

import numpy as np

from .multiset import Multiset
from .zm import Modulus, euler_phi, factorize


# -- exact polynomial helpers (dense coefficient lists, constant term first) --


def _poly_mul(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                out[i + j] += ca * cb
    return out


def _poly_divmod(num: list[int], den: list[int]) -> tuple[list[int], list[int]]:
    num = list(num)
    d = len(den) - 1
    lead = den[-1]
    if lead != 1:
        raise ValueError("divisor must be monic")
    q = [0] * max(1, len(num) - d)
    for i in range(len(num) - 1, d - 1, -1):
        c = num[i]
        if c:
            q[i - d] = c
            for j in range(d + 1):
                num[i - d + j] -= c * den[j]
    while len(num) > 1 and num[-1] == 0:
        num.pop()
    return q, num


@dataclass(frozen=True)
class CycloPoly:
    """The s-th cyclotomic polynomial with exact integer coefficients."""

    s: int
    coeffs: tuple[int, ...]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def at_one(self) -> int:
        """Phi_s(1): p for prime powers p^a, 1 for s with >= 2 primes, 0 for s=1."""
        return sum(self.coeffs)

    def __repr__(self) -> str:
        return f"CycloPoly(s={self.s}, degree={self.degree})"


@lru_cache(maxsize=None)
def cyclotomic(s: int) -> CycloPoly:
    """Compute Phi_s by exact division of X^r - 1, inflated from the radical.

    Phi_s(X) = Phi_rad(s)(X^{s/rad(s)}), so only squarefree orders need the
    recursive division chain.
    """
    if s < 1:
        raise ValueError(f"cyclotomic order must be >= 1, got {s}")
    if s == 1:
        return CycloPoly(1, (-1, 1))
    fac = factorize(s)
    rad = prod(p for p, _ in fac)
    if rad != s:
        base = cyclotomic(rad).coeffs
        stretch = s // rad
        coeffs = [0] * ((len(base) - 1) * stretch + 1)
        for i, c in enumerate(base):
            coeffs[i * stretch] = c
        return CycloPoly(s, tuple(coeffs))
    # Squarefree s: divide X^s - 1 by the product of all proper Phi_d.
    den = [1]
    for d in sorted(_divisors(s)):
        if d < s:
            den = _poly_mul(den, list(cyclotomic(d).coeffs))
    num = [-1] + [0] * (s - 1) + [1]
    q, r = _poly_divmod(num, den)
    if any(r_i != 0 for r_i in r):
        raise AssertionError(f"cyclotomic division for s={s} left a remainder")
    if len(q) - 1 != euler_phi(s):
        raise AssertionError(f"Phi_{s} has wrong degree {len(q) - 1}")
    return CycloPoly(s, tuple(q))


def _divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in factorize(n):
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


@lru_cache(maxsize=None)
def _cofactor(s: int) -> np.ndarray:
    """C_s = (X^s - 1) / Phi_s as an int64 coefficient array, verified exactly."""
    phi = np.array(cyclotomic(s).coeffs, dtype=np.int64)
    c = np.array([1], dtype=np.int64)
    for d in _divisors(s):
        if d < s:
            c = np.convolve(c, np.array(cyclotomic(d).coeffs, dtype=np.int64))
    # Exactness guard: heights here are small, but verify the defining identity.
    check = np.convolve(c, phi)
    expect = np.zeros(s + 1, dtype=np.int64)
    expect[0], expect[s] = -1, 1
    if not np.array_equal(check, expect):
        raise AssertionError(f"cofactor construction for s={s} failed verification")
    c.setflags(write=False)
    return c


def phi_divides(s: int, a: Multiset) -> bool:
    """Exact test of Phi_s | A(X), for s | m with s > 1."""
    m = a.modulus.m
    if s <= 1 or m % s != 0:
        raise ValueError(f"s={s} must be a divisor > 1 of m={m}")
    folded = a.weights.reshape(m // s, s).sum(axis=0) if s < m else a.weights
    if not folded.any():
        return True
    c = _cofactor(s)
    # Guard the int64 convolution: |sum| <= len * max|folded| * max|C_s|.
    bound = folded.shape[0] * int(np.abs(folded).max()) * int(np.abs(c).max())
    prod_coeffs = (
        np.convolve(folded, c)
        if bound < 2**62
        else np.convolve(folded.astype(object), c.astype(object))
    )
    # Fold the product back mod X^s - 1 and test for zero.
    out = np.zeros(s, dtype=prod_coeffs.dtype)
    for i in range(0, len(prod_coeffs), s):
        chunk = prod_coeffs[i : i + s]
        out[: len(chunk)] += chunk
    return not np.any(out)


# -- spectra and the two tiling conditions ------------------------------------


@dataclass(frozen=True)
class CycloSpectrum:
    """Cyclotomic divisors of a multiset: all of them, and the prime powers S_A."""

    modulus: Modulus
    divisors: frozenset[int]
    prime_powers: frozenset[int]

    def families(self) -> tuple[frozenset[int], ...]:
        """Per-direction exponent families: alpha with Phi_{p_nu^alpha} | A."""
        out = []
        for p, n in self.modulus.primes:
            out.append(
                frozenset(a for a in range(1, n + 1) if p**a in self.prime_powers)
            )
        return tuple(out)


def spectrum(a: Multiset) -> CycloSpectrum:
    """All s | m with s > 1 and Phi_s | A, plus the prime-power subset S_A."""
    if a.is_zero:
        raise ValueError("spectrum of the zero multiset is undefined")
    mod = a.modulus
    divs = frozenset(s for s in mod.divisors if s > 1 and phi_divides(s, a))
    pps = frozenset(
        s for s in divs if len(factorize(s)) == 1
    )
    return CycloSpectrum(mod, divs, pps)


def s_a(a: Multiset) -> frozenset[int]:
    """S_A: prime powers s | m with Phi_s | A."""
    mod = a.modulus
    out = set()
    for p, n in mod.primes:
        for alpha in range(1, n + 1):
            if phi_divides(p**alpha, a):
                out.add(p**alpha)
    return frozenset(out)


def _distinct_prime_products(mod: Modulus, pps: frozenset[int], min_terms: int = 2):
    """Products s_1*...*s_k of prime powers of pairwise distinct primes in pps."""
    choices: list[list[int]] = []
    for p, n in mod.primes:
        mine = [p**a for a in range(1, n + 1) if p**a in pps]
        choices.append(mine)
    # Pick at most one prime power per prime, at least min_terms overall.
    def rec(nu: int, count: int, value: int):
        if nu == len(choices):
            if count >= min_terms:
                yield value
            return
        yield from rec(nu + 1, count, value)
        for s in choices[nu]:
            yield from rec(nu + 1, count + 1, value * s)

    return sorted(set(rec(0, 0, 1)))


def t1_check(a: Multiset) -> bool:
    """(T1): |A| equals the product of Phi_s(1) over s in S_A."""
    if not a.is_set:
        raise ValueError("(T1) is defined for sets")
    pps = s_a(a)
    return len(a) == prod(cyclotomic(s).at_one() for s in pps) if pps else len(a) == 1


def t2_check(a: Multiset) -> bool:
    """(T2): Phi_{s_1...s_k} | A for prime powers of distinct primes in S_A, k >= 2.

    Vacuously true when S_A touches at most one prime.
    """
    if not a.is_set:
        raise ValueError("(T2) is defined for sets")
    pps = s_a(a)
    for s in _distinct_prime_products(a.modulus, pps):
        if not phi_divides(s, a):
            return False
    return True


# -- standard tiling complements -----------------------------------------------


def standard_complement(mod: Modulus, families: tuple[frozenset[int] | set[int], ...]) -> Multiset:
    """The structured tile with prescribed prime-power cyclotomic divisors.

    families[nu] is the set of exponents alpha for which Phi_{p_nu^alpha} is to
    divide the result; the mask polynomial is the product of the geometric
    factors 1 + X^{M_nu p^(alpha-1)} + ... + X^{(p-1) M_nu p^(alpha-1)}.
    """
    if len(families) != mod.num_primes:
        raise ValueError("one exponent family per prime required")
    out = Multiset.delta(mod, 0)
    for nu, fam in enumerate(families):
        p, n = mod.primes[nu]
        for alpha in sorted(fam):
            if not 1 <= alpha <= n:
                raise ValueError(f"exponent {alpha} out of range for {p}^{n}")
            step = mod.m_nu(nu) * p ** (alpha - 1)
            factor = Multiset.from_set(mod, [t * step for t in range(p)])
            out = out.convolve(factor)
    if not out.is_set:
        raise AssertionError("standard complement construction produced a multiset")
    return out


def standard_complement_of(b: Multiset) -> Multiset:
    """A-flat determined by the complement: exponents whose Phi does not divide B.

    Requires B to look like a tile: |B| must match its own prime-power
    divisors through (T1), otherwise the attribution is ill-defined.
    """
    if not b.is_set:
        raise ValueError("standard complement is defined against a set")
    mod = b.modulus
    b_fams = []
    a_fams = []
    for p, n in mod.primes:
        divides = {alpha for alpha in range(1, n + 1) if phi_divides(p**alpha, b)}
        b_fams.append(divides)
        a_fams.append(frozenset(range(1, n + 1)) - divides)
    expected = prod(p ** len(f) for (p, _), f in zip(mod.primes, b_fams))
    if len(b) != expected:
        raise ValueError(
            f"input of size {len(b)} cannot be a tile: prime-power divisors "
            f"account for {expected}"
        )
    return standard_complement(mod, tuple(a_fams))


# -- two-prime fiber decomposition ---------------------------------------------


def decompose_two_prime(a: Multiset, n_div: int) -> list[tuple[int, int, int]]:
    """Write A mod N as a nonnegative combination of N-fibers (two-prime N).

    Returns (root, direction nu, multiplicity) triples, roots canonicalized to
    the least element of the fiber, peeled deterministically: least remaining
    point first, direction in prime order on ties.  Raises if Phi_N does not
    divide A, if weights are negative, or if peeling gets stuck (impossible
    for genuine inputs by the vanishing-sum structure theorem).
    """
    mod_n = Modulus.of(n_div)
    if mod_n.num_primes != 2:
        raise ValueError(f"N={n_div} must have exactly two distinct prime factors")
    reduced = a.reduce_mod(n_div) if a.modulus.m != n_div else a
    if np.any(reduced.weights < 0):
        raise ValueError("decomposition requires nonnegative weights")
    if not phi_divides(n_div, reduced):
        raise ValueError(f"Phi_{n_div} does not divide the input")
    w = reduced.weights.copy()
    out: list[tuple[int, int, int]] = []
    while True:
        nz = np.flatnonzero(w)
        if nz.size == 0:
            return out
        x = int(nz[0])
        peeled = False
        for nu in range(2):
            step = n_div // mod_n.primes[nu][0]
            fiber = np.arange(x % step, n_div, step)
            mult = int(w[fiber].min())
            if mult > 0:
                w[fiber] -= mult
                out.append((int(fiber[0]), nu, mult))
                peeled = True
                break
        if not peeled:
            raise ValueError("greedy fiber peeling failed; input is not a fiber sum")
