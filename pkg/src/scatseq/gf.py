"""Deterministic finite-field tower arithmetic.

Fields are built as a two-level tower F_p < F_q = F_p[y]/m1 < F_{q^n} = F_q[x]/m2
with q = p^h.  An element of F_{q^n} is identified with its canonical integer
encoding

    sum_{i<n} sum_{j<h} c_ij * p^(i*h + j)

where c_ij are the F_p coefficients (j indexes the m1 basis, i the m2 basis).
Equivalently: write the element as a polynomial in x with F_q coefficients,
encode each F_q coefficient as an integer in [0, q) via its m1 basis, and read
the n coefficients as base-q digits.  The encoding is a bijection onto
[0, p^(hn)), 0 encodes zero and 1 encodes one, and constants (the subfield F_q)
are exactly the encodings below q.

Both moduli are the lexicographically smallest monic irreducibles (coefficient
tuples compared low degree first) and the generator g is the smallest encoding
of multiplicative order q^n - 1, so two calls of make_field with equal inputs
produce bit-identical contexts.

Contexts are immutable after construction; lazily built lookup tables are
guarded by a lock so contexts can be shared across workers.
"""

from __future__ import annotations

import threading
from math import gcd, isqrt

import numpy as np

DEFAULT_MAX_SIZE = 1 << 28
# Full exp/log tables are built lazily up to this size unconditionally, and up
# to DLOG_TABLE_LIMIT when the outer variable x is itself the generator (then
# table construction is O(n) per step instead of O(n^2)).
TABLE_SIZE_LIMIT = 1 << 16
DLOG_TABLE_LIMIT = 1 << 20


class SizeBudgetError(Exception):
    """Requested field or search exceeds the configured size/work budget."""


def is_prime(m: int) -> bool:
    if m < 2:
        return False
    if m < 4:
        return True
    if m % 2 == 0:
        return False
    f = 3
    while f * f <= m:
        if m % f == 0:
            return False
        f += 2
    return True


def factorize(m: int) -> dict[int, int]:
    """Prime factorization by trial division (intended for m up to ~2^56)."""
    factors: dict[int, int] = {}
    for d in (2, 3):
        while m % d == 0:
            factors[d] = factors.get(d, 0) + 1
            m //= d
    f = 5
    while f * f <= m:
        for d in (f, f + 2):
            while m % d == 0:
                factors[d] = factors.get(d, 0) + 1
                m //= d
        f += 6
    if m > 1:
        factors[m] = factors.get(m, 0) + 1
    return factors


def prime_power_split(q: int) -> tuple[int, int]:
    """Return (p, h) with q = p^h, or raise if q is not a prime power."""
    fs = factorize(q)
    if len(fs) != 1:
        raise ValueError(f"{q} is not a prime power")
    (p, h), = fs.items()
    return p, h


# ---------------------------------------------------------------------------
# Inner field F_q (coefficient field of the outer quotient).
# Elements are ints in [0, q); for h > 1 these are base-p digit vectors over
# the m1 basis.  Multiplication goes through exp/log tables over a generator.


class _PrimeField:
    """F_p with identity encoding."""

    def __init__(self, p: int):
        self.p = p
        self.h = 1
        self.q = p
        self.m1 = (0, 1)  # y, i.e. F_q == F_p

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def neg(self, a: int) -> int:
        return (-a) % self.p

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.p

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, self.p - 2, self.p)


class _ExtensionInner:
    """F_q = F_p[y]/m1 for h > 1, with table-based multiplication."""

    def __init__(self, p: int, h: int):
        self.p = p
        self.h = h
        self.q = q = p ** h
        prime = _PrimeField(p)
        self.m1 = _smallest_irreducible(h, prime, skip_zero_constant=True)
        # exp/log over a generator of F_q^*; q is small so eager build is cheap
        red = _poly_mod(tuple(1 if i == h else 0 for i in range(h + 1)), self.m1, prime)
        gen = self._find_generator(prime)
        self.gen = gen
        exp = [0] * (2 * (q - 1))
        log = [-1] * q
        cur = 1
        for k in range(q - 1):
            exp[k] = exp[k + q - 1] = cur
            log[cur] = k
            cur = self._mul_raw(cur, gen, prime)
        self._exp = exp
        self._log = log
        del red

    def _digits(self, a: int) -> list[int]:
        p = self.p
        out = []
        for _ in range(self.h):
            a, r = divmod(a, p)
            out.append(r)
        return out

    def _mul_raw(self, a: int, b: int, prime: _PrimeField) -> int:
        da, db = self._digits(a), self._digits(b)
        prod = _poly_mul(tuple(da), tuple(db), prime)
        prod = _poly_mod(prod, self.m1, prime)
        val = 0
        for c in reversed(prod):
            val = val * self.p + c
        return val

    def _find_generator(self, prime: _PrimeField) -> int:
        divisors = [(self.q - 1) // r for r in factorize(self.q - 1)]
        for cand in range(2, self.q):
            if all(self._pow_raw(cand, d, prime) != 1 for d in divisors):
                return cand
        raise RuntimeError("no generator found in F_q")  # unreachable

    def _pow_raw(self, a: int, e: int, prime: _PrimeField) -> int:
        r = 1
        while e:
            if e & 1:
                r = self._mul_raw(r, a, prime)
            a = self._mul_raw(a, a, prime)
            e >>= 1
        return r

    def add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        p = self.p
        out = 0
        shift = 1
        for _ in range(self.h):
            out += ((a + b) % p) * shift
            a //= p
            b //= p
            shift *= p
        return out

    def sub(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        p = self.p
        out = 0
        shift = 1
        for _ in range(self.h):
            out += ((a - b) % p) * shift
            a //= p
            b //= p
            shift *= p
        return out

    def neg(self, a: int) -> int:
        return self.sub(0, a)

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return self._exp[self.q - 1 - self._log[a]]


# ---------------------------------------------------------------------------
# Polynomials over an inner field: tuples of coefficient ints, low degree
# first, no trailing zeros (the zero polynomial is the empty tuple).


def _poly_norm(c):
    i = len(c)
    while i and c[i - 1] == 0:
        i -= 1
    return tuple(c[:i])


def _poly_add(a, b, fq):
    n = max(len(a), len(b))
    return _poly_norm(tuple(
        fq.add(a[i] if i < len(a) else 0, b[i] if i < len(b) else 0) for i in range(n)))


def _poly_sub(a, b, fq):
    n = max(len(a), len(b))
    return _poly_norm(tuple(
        fq.sub(a[i] if i < len(a) else 0, b[i] if i < len(b) else 0) for i in range(n)))


def _poly_mul(a, b, fq):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            if bj:
                out[i + j] = fq.add(out[i + j], fq.mul(ai, bj))
    return _poly_norm(out)


def _poly_mod(a, m, fq):
    # m monic
    a = list(a)
    dm = len(m) - 1
    for i in range(len(a) - 1, dm - 1, -1):
        c = a[i]
        if c == 0:
            continue
        a[i] = 0
        for j in range(dm):
            if m[j]:
                a[i - dm + j] = fq.sub(a[i - dm + j], fq.mul(c, m[j]))
    return _poly_norm(a)


def _poly_mulmod(a, b, m, fq):
    return _poly_mod(_poly_mul(a, b, fq), m, fq)


def _poly_powmod(a, e, m, fq):
    r = (1,)
    a = _poly_mod(a, m, fq)
    while e:
        if e & 1:
            r = _poly_mulmod(r, a, m, fq)
        a = _poly_mulmod(a, a, m, fq)
        e >>= 1
    return r


def _poly_gcd(a, b, fq):
    while b:
        lead_inv = fq.inv(b[-1])
        bm = tuple(fq.mul(c, lead_inv) for c in b)  # make monic for stable division
        a, b = b, _poly_mod(a, bm, fq)
    return a


def _poly_is_irreducible(f, fq):
    """Rabin's test for a monic polynomial f over F_q."""
    d = len(f) - 1
    if d <= 0:
        return False
    if d == 1:
        return True
    x = (0, 1)
    for r in factorize(d):
        t = _poly_powmod(x, fq.q ** (d // r), f, fq)
        if len(_poly_gcd(_poly_sub(t, x, fq), f, fq)) > 1:
            return False
    return _poly_powmod(x, fq.q ** d, f, fq) == x


def _smallest_irreducible(deg: int, fq, skip_zero_constant: bool) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible of given degree over fq.

    Coefficient tuples (c_0, ..., c_{deg-1}) are compared as integer tuples,
    low degree first.  Polynomials with c_0 = 0 are divisible by x, so for
    deg > 1 the scan starts at c_0 = 1.
    """
    q = fq.q
    start = q ** (deg - 1) if (skip_zero_constant and deg > 1) else 0
    for t in range(start, q ** deg):
        coeffs = []
        rest = t
        for i in range(deg):
            coeffs.append(rest // q ** (deg - 1 - i) % q)
        f = tuple(coeffs) + (1,)
        if _poly_is_irreducible(f, fq):
            return f
    raise RuntimeError("no irreducible polynomial found")  # unreachable


# ---------------------------------------------------------------------------


class _DenseTables:
    """Full exp/log (and Frobenius permutation) tables for a small context.

    Python lists serve the scalar ops; numpy mirrors serve bulk enumeration.
    The numpy exp table has length 3*(q^n - 1) with zeros in the top third and
    log(0) = 2*(q^n - 1), so gathers of exp[log a + log b] multiply with
    correct absorption of zero.
    """

    def __init__(self, ctx: "FieldCtx"):
        size, order = ctx.size, ctx.order
        exp = [0] * (2 * order)
        log = [-1] * size
        g = ctx.g
        cur = 1
        if g == ctx.q and ctx.n > 1:
            mul_by_g = ctx._mul_by_x_raw
        else:
            mul_by_g = lambda v: ctx._mul_raw(v, g)
        for k in range(order):
            exp[k] = exp[k + order] = cur
            log[cur] = k
            cur = mul_by_g(cur)
        self.exp = exp
        self.log = log
        np_exp = np.zeros(3 * order, dtype=np.int64)
        np_exp[: 2 * order] = exp
        np_log = np.empty(size, dtype=np.int64)
        np_log[0] = 2 * order
        np_log[1:] = [log[v] for v in range(1, size)]
        self.np_exp = np_exp
        self.np_log = np_log
        self._frob_perm: dict[int, np.ndarray] = {}
        self._ctx = ctx

    def frob_perm(self, t: int) -> np.ndarray:
        """Permutation array for v -> v^(q^t) over all encodings."""
        perm = self._frob_perm.get(t)
        if perm is None:
            ctx = self._ctx
            e = pow(ctx.q, t, ctx.order)
            perm = self.np_exp[(self.np_log * e) % ctx.order]
            perm[0] = 0
            self._frob_perm[t] = perm
        return perm

    def mul_by_const(self, c: int) -> np.ndarray:
        """Permutation array for v -> c*v (c nonzero) over all encodings."""
        out = self.np_exp[self.np_log + self.log[c]]
        return out


class FieldCtx:
    """Tower F_p < F_q < F_{q^n} with fixed moduli and generator.

    Attributes: p, h, n, q = p^h, size = q^n, order = q^n - 1, m1 (tuple of
    h+1 ints over F_p), m2 (tuple of n+1 ints, F_q encodings), g (encoding of
    the canonical generator).  All arithmetic methods with an ``_i`` suffix
    act on canonical integer encodings.
    """

    def __init__(self, p: int, h: int, n: int):
        # Use make_field(); this constructor performs the full deterministic search.
        self.p = p
        self.h = h
        self.n = n
        self.q = q = p ** h
        self.size = q ** n
        self.order = self.size - 1
        self.fq = _PrimeField(p) if h == 1 else _ExtensionInner(p, h)
        self.m1 = self.fq.m1
        self.m2 = _smallest_irreducible(n, self.fq, skip_zero_constant=True)
        # x^(n+k) mod m2 for schoolbook reduction
        self._red = []
        xpow = _poly_mod(tuple(1 if i == n else 0 for i in range(n + 1)), self.m2, self.fq)
        for _ in range(max(n - 1, 0)):
            self._red.append(tuple(xpow[i] if i < len(xpow) else 0 for i in range(n)))
            xpow = _poly_mod(tuple((0,) + xpow), self.m2, self.fq)
        self._gf2_packed = (p == 2 and h == 1)
        if self._gf2_packed:
            self._m2_int = sum(c << i for i, c in enumerate(self.m2))
        self._order_factors = factorize(self.order) if self.order > 1 else {}
        self._tables: _DenseTables | None = None
        self._tables_lock = threading.Lock()
        self._frob_basis: dict[int, tuple[int, ...]] = {}
        self._frob_lock = threading.Lock()
        self.g = self._find_generator()

    # -- encoding ----------------------------------------------------------

    def decode(self, val: int) -> tuple[int, ...]:
        """Canonical integer encoding -> n F_q coefficients (low degree first)."""
        q = self.q
        out = []
        for _ in range(self.n):
            val, r = divmod(val, q)
            out.append(r)
        return tuple(out)

    def encode(self, coeffs) -> int:
        val = 0
        for c in reversed(coeffs):
            val = val * self.q + c
        return val

    # -- raw arithmetic on encodings ----------------------------------------

    def add_i(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        p = self.p
        out = 0
        shift = 1
        for _ in range(self.h * self.n):
            out += ((a + b) % p) * shift
            a //= p
            b //= p
            shift *= p
        return out

    def sub_i(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        p = self.p
        out = 0
        shift = 1
        for _ in range(self.h * self.n):
            out += ((a - b) % p) * shift
            a //= p
            b //= p
            shift *= p
        return out

    def neg_i(self, a: int) -> int:
        return self.sub_i(0, a)

    def _mul_by_x_raw(self, a: int) -> int:
        """a * x via shift and single reduction row (any a < size)."""
        a *= self.q
        hi = a // self.size
        if hi == 0:
            return a
        a %= self.size
        row = self._red[0]
        fq = self.fq
        out = 0
        shift = 1
        for i in range(self.n):
            c = a % self.q
            out += fq.add(c, fq.mul(hi, row[i])) * shift
            a //= self.q
            shift *= self.q
        return out

    def _mul_gf2(self, a: int, b: int) -> int:
        # carry-less multiply then reduce by m2 (p = 2, h = 1 only)
        r = 0
        while b:
            if b & 1:
                r ^= a
            a <<= 1
            b >>= 1
        m = self._m2_int
        n = self.n
        for i in range(r.bit_length() - 1, n - 1, -1):
            if (r >> i) & 1:
                r ^= m << (i - n)
        return r

    def _mul_raw(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self._gf2_packed:
            return self._mul_gf2(a, b)
        fq = self.fq
        da, db = self.decode(a), self.decode(b)
        n = self.n
        prod = [0] * (2 * n - 1)
        for i, ai in enumerate(da):
            if ai == 0:
                continue
            for j, bj in enumerate(db):
                if bj:
                    prod[i + j] = fq.add(prod[i + j], fq.mul(ai, bj))
        # fold x^(n+k) tails back using the reduction rows
        for k in range(n - 2, -1, -1):
            c = prod[n + k]
            if c:
                row = self._red[k]
                for i in range(n):
                    if row[i]:
                        prod[i] = fq.add(prod[i], fq.mul(c, row[i]))
        return self.encode(prod[:n])

    def mul_i(self, a: int, b: int) -> int:
        t = self._tables
        if t is not None:
            if a == 0 or b == 0:
                return 0
            return t.exp[t.log[a] + t.log[b]]
        return self._mul_raw(a, b)

    def pow_i(self, a: int, e: int) -> int:
        if a == 0:
            if e == 0:
                return 1
            if e < 0:
                raise ZeroDivisionError("inverse power of zero")
            return 0
        e %= self.order
        t = self._tables
        if t is not None:
            return t.exp[t.log[a] * e % self.order]
        r = 1
        while e:
            if e & 1:
                r = self._mul_raw(r, a)
            a = self._mul_raw(a, a)
            e >>= 1
        return r

    def inv_i(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        t = self._tables
        if t is not None:
            return t.exp[self.order - t.log[a]]
        return self.pow_i(a, self.order - 1)

    def scalar_mul_i(self, a: int, s: int) -> int:
        """a * s for s an F_q constant: coefficient-wise F_q multiplication."""
        if s == 0 or a == 0:
            return 0
        if s == 1:
            return a
        fq = self.fq
        out = 0
        shift = 1
        for _ in range(self.n):
            c = a % self.q
            if c:
                out += fq.mul(c, s) * shift
            a //= self.q
            shift *= self.q
        return out

    # -- Frobenius ----------------------------------------------------------

    def _frob_basis_imgs(self, t: int) -> tuple[int, ...]:
        with self._frob_lock:
            imgs = self._frob_basis.get(t)
            if imgs is None:
                xq = self.pow_i(self.q, pow(self.q, t, self.order) if self.order else 0)
                lst = [1]
                for _ in range(self.n - 1):
                    lst.append(self._mul_raw(lst[-1], xq))
                imgs = tuple(lst)
                self._frob_basis[t] = imgs
        return imgs

    def frob_i(self, a: int, t: int) -> int:
        """a^(q^t); F_q-linear in a."""
        t %= self.n
        if t == 0 or a < 2:
            return a
        tab = self._tables
        if tab is not None:
            return int(tab.frob_perm(t)[a])
        imgs = self._frob_basis_imgs(t)
        out = 0
        for i, c in enumerate(self.decode(a)):
            if c:
                out = self.add_i(out, self.scalar_mul_i(imgs[i], c))
        return out

    # -- multiplicative structure --------------------------------------------

    def _find_generator(self) -> int:
        if self.order == 1:
            return 1
        checks = [self.order // r for r in self._order_factors]
        start = 2 if self.n == 1 else self.q  # constants cannot generate for n > 1
        for cand in range(start, self.size):
            if all(self.pow_i(cand, d) != 1 for d in checks):
                return cand
        raise RuntimeError("no generator found")  # unreachable

    def ensure_tables(self) -> bool:
        """Build full exp/log tables if the field is small enough; idempotent."""
        if self._tables is not None:
            return True
        if self.size > DLOG_TABLE_LIMIT:
            return False
        if self.size > TABLE_SIZE_LIMIT and self.g != self.q:
            return False
        with self._tables_lock:
            if self._tables is None:
                self._tables = _DenseTables(self)
        return True

    @property
    def tables(self) -> _DenseTables | None:
        return self._tables

    def dlog_i(self, a: int) -> int:
        """Discrete log base g; full table when small, Pohlig-Hellman + BSGS above."""
        if a == 0:
            raise ZeroDivisionError("discrete log of zero")
        if self.ensure_tables():
            return self._tables.log[a]
        N = self.order
        residues = []
        moduli = []
        for r, e in self._order_factors.items():
            pe = r ** e
            cof = N // pe
            gs = self.pow_i(self.g, cof)
            hs = self.pow_i(a, cof)
            residues.append(self._dlog_prime_power(gs, hs, r, e))
            moduli.append(pe)
        x = 0
        prod = 1
        for r_i, m_i in zip(residues, moduli):
            # CRT fold
            t = ((r_i - x) * pow(prod, -1, m_i)) % m_i
            x += prod * t
            prod *= m_i
        return x % N

    def _dlog_prime_power(self, gs: int, hs: int, r: int, e: int) -> int:
        """Solve gs^x = hs where gs has order r^e (Pohlig-Hellman descent)."""
        x = 0
        gamma = self.pow_i(gs, r ** (e - 1))  # order r
        for k in range(e):
            hk = self.pow_i(self.mul_i(hs, self.inv_i(self.pow_i(gs, x))), r ** (e - 1 - k))
            d = self._dlog_bsgs(gamma, hk, r)
            x += d * r ** k
        return x

    def _dlog_bsgs(self, base: int, target: int, order: int) -> int:
        m = isqrt(order - 1) + 1
        baby = {}
        cur = 1
        for j in range(m):
            baby.setdefault(cur, j)
            cur = self.mul_i(cur, base)
        giant = self.inv_i(self.pow_i(base, m))
        y = target
        for i in range(m + 1):
            if y in baby:
                return (i * m + baby[y]) % order
            y = self.mul_i(y, giant)
        raise RuntimeError("BSGS failed: target not in subgroup")

    def is_dth_power_i(self, a: int, d: int) -> bool:
        if a == 0:
            raise ZeroDivisionError("power residue test of zero")
        G = gcd(d, self.order)
        if G == 1:
            return True
        t = self._tables
        if t is not None:
            return t.log[a] % G == 0
        return self.pow_i(a, self.order // G) == 1

    # -- element facade -------------------------------------------------------

    def elem(self, val: int) -> "FqnElem":
        return FqnElem(self, val)

    def zero(self) -> "FqnElem":
        return FqnElem(self, 0)

    def one(self) -> "FqnElem":
        return FqnElem(self, 1)

    def gen(self) -> "FqnElem":
        return FqnElem(self, self.g)

    def x(self) -> "FqnElem":
        return FqnElem(self, self.q if self.n > 1 else self.encode(
            (self.fq.neg(self.m2[0]),)))

    def elements(self):
        """All encodings in canonical order (iterator over range(size))."""
        return range(self.size)

    def to_json_dict(self) -> dict:
        return {
            "p": self.p,
            "h": self.h,
            "n": self.n,
            "m1": list(self.m1),
            "m2": list(self.m2),
            "g": self.g,
            "order": str(self.order),
        }

    def __repr__(self):
        return f"FieldCtx(p={self.p}, h={self.h}, n={self.n})"

    def __eq__(self, other):
        return (isinstance(other, FieldCtx)
                and (self.p, self.h, self.n) == (other.p, other.h, other.n))

    def __hash__(self):
        return hash((self.p, self.h, self.n))


class FqnElem:
    """Element of F_{q^n}, wrapping a context handle and a canonical encoding."""

    __slots__ = ("ctx", "val")

    def __init__(self, ctx: FieldCtx, val: int):
        if not 0 <= val < ctx.size:
            raise ValueError(f"encoding {val} out of range for {ctx!r}")
        self.ctx = ctx
        self.val = val

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self.ctx.decode(self.val)

    def _check(self, other: "FqnElem"):
        if self.ctx is not other.ctx and self.ctx != other.ctx:
            raise ValueError("context mismatch between field elements")

    def __add__(self, other):
        self._check(other)
        return FqnElem(self.ctx, self.ctx.add_i(self.val, other.val))

    def __sub__(self, other):
        self._check(other)
        return FqnElem(self.ctx, self.ctx.sub_i(self.val, other.val))

    def __neg__(self):
        return FqnElem(self.ctx, self.ctx.neg_i(self.val))

    def __mul__(self, other):
        self._check(other)
        return FqnElem(self.ctx, self.ctx.mul_i(self.val, other.val))

    def __truediv__(self, other):
        self._check(other)
        return FqnElem(self.ctx, self.ctx.mul_i(self.val, self.ctx.inv_i(other.val)))

    def __pow__(self, e: int):
        return FqnElem(self.ctx, self.ctx.pow_i(self.val, e))

    def inv(self) -> "FqnElem":
        return FqnElem(self.ctx, self.ctx.inv_i(self.val))

    def frob(self, t: int) -> "FqnElem":
        return FqnElem(self.ctx, self.ctx.frob_i(self.val, t))

    def __eq__(self, other):
        return (isinstance(other, FqnElem) and self.val == other.val
                and self.ctx == other.ctx)

    def __hash__(self):
        return hash((self.val, self.ctx.p, self.ctx.h, self.ctx.n))

    def __bool__(self):
        return self.val != 0

    def __int__(self):
        return self.val

    def __repr__(self):
        return f"FqnElem({self.val}, F_{self.ctx.p}^{self.ctx.h * self.ctx.n})"


_FIELD_CACHE: dict[tuple[int, int, int], FieldCtx] = {}
_FIELD_CACHE_LOCK = threading.Lock()


def make_field(p: int, h: int, n: int, max_size: int = DEFAULT_MAX_SIZE) -> FieldCtx:
    """Build (or fetch the cached) deterministic context for F_{p^(h*n)}.

    Raises ValueError for non-prime p or bad degrees, SizeBudgetError when
    p^(h*n) exceeds max_size.
    """
    if not is_prime(p):
        raise ValueError(f"p = {p} is not prime")
    if h < 1 or n < 1:
        raise ValueError("h and n must be positive")
    if p ** (h * n) > max_size:
        raise SizeBudgetError(
            f"field size p^(h*n) = {p}^{h * n} exceeds budget {max_size}")
    key = (p, h, n)
    ctx = _FIELD_CACHE.get(key)
    if ctx is None:
        with _FIELD_CACHE_LOCK:
            ctx = _FIELD_CACHE.get(key)
            if ctx is None:
                ctx = FieldCtx(p, h, n)
                _FIELD_CACHE[key] = ctx
    return ctx


# ---------------------------------------------------------------------------
# Subfield embeddings


class EmbeddingMap:
    """Field embedding of one tower context into a larger one.

    Determined by the image of the source generator (the smallest-exponent
    root of its minimal polynomial over F_p inside the target); images of the
    source basis monomials x^i y^j are cached for linear-time evaluation.
    """

    __slots__ = ("src", "dst", "img_g", "img_x", "_basis_imgs")

    def __init__(self, src: FieldCtx, dst: FieldCtx, img_g: "FqnElem",
                 img_x: "FqnElem", basis_imgs: tuple):
        self.src = src
        self.dst = dst
        self.img_g = img_g
        self.img_x = img_x
        self._basis_imgs = basis_imgs

    def __call__(self, e: FqnElem) -> FqnElem:
        return embed_elem(self, e)


def _min_poly_over_fp(ctx: FieldCtx, val: int) -> list[int]:
    """Minimal polynomial over F_p of an element generating the whole tower."""
    d = ctx.h * ctx.n
    conj = []
    c = val
    for _ in range(d):
        conj.append(c)
        c = ctx.pow_i(c, ctx.p)
    if c != val or len(set(conj)) != d:
        raise ValueError("element does not generate the full tower over F_p")
    # product of (T - c_i) with coefficients in F_{q^n}; result must lie in F_p
    poly = [1]
    for c in conj:
        nxt = [0] * (len(poly) + 1)
        negc = ctx.neg_i(c)
        for i, a in enumerate(poly):
            nxt[i] = ctx.add_i(nxt[i], ctx.mul_i(a, negc))
            nxt[i + 1] = ctx.add_i(nxt[i + 1], a)
        poly = nxt
    out = []
    for a in poly:
        if a >= ctx.p:
            raise RuntimeError("minimal polynomial coefficient escaped F_p")
        out.append(a)
    return out


def embed(src: FieldCtx, dst: FieldCtx, max_steps: int = 1 << 22) -> EmbeddingMap:
    """Embedding of src into dst, canonical via the smallest root exponent.

    Requires src.p == dst.p and (src.h * src.n) | (dst.h * dst.n); the image
    of the source generator is g_dst^((order_dst/order_src)*k) for the
    smallest k making the source minimal polynomial vanish.
    """
    if src.p != dst.p:
        raise ValueError("characteristic mismatch")
    ds, dd = src.h * src.n, dst.h * dst.n
    if dd % ds != 0:
        raise ValueError(
            f"no embedding: degree {ds} does not divide {dd}")
    if src.order > max_steps:
        raise SizeBudgetError("source field too large for embedding root search")
    minpoly = _min_poly_over_fp(src, src.g)
    step = dst.pow_i(dst.g, dst.order // src.order)
    cand = 1
    for _ in range(src.order):
        cand = dst.mul_i(cand, step)
        acc = 0  # Horner for minpoly(cand)
        for c in reversed(minpoly):
            acc = dst.add_i(dst.mul_i(acc, cand), c)
        if acc == 0:
            emap = _build_embedding(src, dst, cand)
            _spot_check_embedding(emap)
            return emap
    raise RuntimeError("no root of the source minimal polynomial found")


def _build_embedding(src: FieldCtx, dst: FieldCtx, img_g_val: int) -> EmbeddingMap:
    emap = EmbeddingMap.__new__(EmbeddingMap)
    emap.src = src
    emap.dst = dst
    emap.img_g = FqnElem(dst, img_g_val)
    src.ensure_tables()
    if src.n > 1:
        img_x = dst.pow_i(img_g_val, src.dlog_i(src.q))
    else:
        img_x = dst.elem(0).val if src.m2[0] == 0 else dst.pow_i(
            img_g_val, src.dlog_i(src.fq.neg(src.m2[0])))
    if src.h > 1:
        img_y = dst.pow_i(img_g_val, src.dlog_i(1 * src.fq.p ** 0 * 0 + src.decode(0)[0] if False else src.encode((src.fq.p and 0,)) if False else src._y_encoding()))
    else:
        img_y = None
    grid = []
    xi = 1
    for i in range(src.n):
        row = [xi]
        yj = xi
        for _ in range(src.h - 1):
            yj = dst.mul_i(yj, img_y)
            row.append(yj)
        grid.append(tuple(row))
        if i + 1 < src.n:
            xi = dst.mul_i(xi, img_x)
    emap._basis_imgs = tuple(grid)
    emap.img_x = FqnElem(dst, img_x)
    return emap


def embed_elem(emap: EmbeddingMap, e: FqnElem) -> FqnElem:
    """Apply the embedding to an element of the source field."""
    src, dst = emap.src, emap.dst
    if e.ctx != src:
        raise ValueError("element does not belong to the source field")
    val = e.val
    p = src.p
    out = 0
    for i in range(src.n):
        for j in range(src.h):
            d = val % p
            val //= p
            if d:
                out = dst.add_i(out, dst.scalar_mul_i(emap._basis_imgs[i][j], d))
    return FqnElem(dst, out)


def _spot_check_embedding(emap: EmbeddingMap, pairs: int = 8):
    """Cheap construction-time sanity: homomorphism on a deterministic sample."""
    src, dst = emap.src, emap.dst
    if embed_elem(emap, src.one()).val != 1 or embed_elem(emap, src.zero()).val != 0:
        raise RuntimeError("embedding does not fix 0/1")
    v = 1
    for k in range(pairs):
        a = (v * 2654435761 + k) % src.size
        b = (a * 40503 + 2971) % src.size
        v = a
        ea, eb = src.elem(a), src.elem(b)
        if embed_elem(emap, ea + eb) != embed_elem(emap, ea) + embed_elem(emap, eb):
            raise RuntimeError("embedding is not additive")
        if embed_elem(emap, ea * eb) != embed_elem(emap, ea) * embed_elem(emap, eb):
            raise RuntimeError("embedding is not multiplicative")
