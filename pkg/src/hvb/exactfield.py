"""Exact coefficient fields (Q and GF(p^m)) and dense exact linear algebra.

Field elements are plain Python values so that the hot elimination loops stay
cheap:

* ``Q``: :class:`gmpy2.mpq`
* ``GF(p)``: ``int`` in ``range(p)``
* ``GF(p^m)``: ``int`` in ``range(p**m)`` encoding the coefficient vector of
  the residue class in base ``p`` (least degree first)

Matrices are immutable (:class:`ExactMatrix`); elimination works on sparse
rows (``dict`` column -> nonzero value) with a fixed pivot rule, so results
are reproducible bit for bit.
"""

from __future__ import annotations

import heapq
import random
from dataclasses import dataclass, field as dc_field
from math import gcd
from typing import Iterable, Sequence

import gmpy2
from gmpy2 import mpq

from .errors import InputError

__all__ = [
    "FieldSpec",
    "Rationals",
    "PrimeField",
    "ExtensionField",
    "QQ",
    "GF",
    "ExactMatrix",
    "rank",
    "kernel_basis",
    "solve",
    "rref_sparse",
    "field_from_json",
]

MAX_EXTENSION_DEGREE = 12
MAX_EXTENSION_ORDER = 1 << 20


def _is_prime(n: int) -> bool:
    return n >= 2 and bool(gmpy2.is_prime(n, 50))


# ---------------------------------------------------------------------------
# polynomials over GF(p) on plain integer lists (used to build GF(p^m))
# ---------------------------------------------------------------------------

def _fp_trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _fp_mod(a, b, p):
    a = list(a)
    inv = pow(b[-1], -1, p)
    db = len(b) - 1
    for i in range(len(a) - 1, db - 1, -1):
        c = a[i] * inv % p
        if c:
            for j in range(db + 1):
                a[i - db + j] = (a[i - db + j] - c * b[j]) % p
    return _fp_trim(a[:db] if len(a) > db else a)


def _fp_mulmod(a, b, m, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _fp_mod(_fp_trim(out), m, p)


def _fp_powmod(a, e, m, p):
    result = [1]
    base = _fp_mod(a, m, p)
    while e:
        if e & 1:
            result = _fp_mulmod(result, base, m, p)
        base = _fp_mulmod(base, base, m, p)
        e >>= 1
    return result


def _fp_gcd(a, b, p):
    a, b = _fp_trim(list(a)), _fp_trim(list(b))
    while b:
        a, b = b, _fp_mod(a, b, p)
    return a


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def is_irreducible_fp(poly: Sequence[int], p: int) -> bool:
    """Rabin's irreducibility test for a monic polynomial over GF(p)."""
    f = _fp_trim([c % p for c in poly])
    m = len(f) - 1
    if m < 1:
        return False
    if m == 1:
        return True
    x = [0, 1]
    if _fp_powmod(x, p**m, f, p) != _fp_mod(x, f, p):
        return False
    for r in _prime_factors(m):
        h = _fp_powmod(x, p ** (m // r), f, p)
        h = h + [0] * (2 - len(h))
        h[1] = (h[1] - 1) % p
        if len(_fp_gcd(f, _fp_trim(h), p)) != 1:
            return False
    return True


def first_irreducible(p: int, m: int) -> list[int]:
    """Lexicographically first monic irreducible polynomial of degree m over GF(p)."""
    for code in range(p**m):
        coeffs = [(code // p**i) % p for i in range(m)] + [1]
        if is_irreducible_fp(coeffs, p):
            return coeffs
    raise AssertionError("no irreducible polynomial found")


# ---------------------------------------------------------------------------
# fields
# ---------------------------------------------------------------------------

class FieldSpec:
    """Common interface; concrete fields are immutable and hashable."""

    kind: str
    characteristic: int
    order: int | None
    zero: object
    one: object

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    @property
    def key(self):
        raise NotImplementedError

    @property
    def is_finite(self) -> bool:
        return self.order is not None

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, e: int):
        result, base = self.one, a
        if e < 0:
            base, e = self.inv(a), -e
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result


class Rationals(FieldSpec):
    kind = "Q"
    characteristic = 0
    order = None
    degree = 1

    def __init__(self):
        self.zero = mpq(0)
        self.one = mpq(1)

    @property
    def key(self):
        return ("Q",)

    def __repr__(self):
        return "QQ"

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        if not a:
            raise ZeroDivisionError("inverse of zero")
        return 1 / a

    def div(self, a, b):
        return a / b

    def is_zero(self, a) -> bool:
        return not a

    def from_int(self, n: int):
        return mpq(n)

    def coerce(self, x):
        return mpq(x)

    def random_element(self, rng: random.Random, bound: int = 3):
        return mpq(rng.randint(-bound, bound))

    def axpy(self, dst: dict, f, src: dict) -> None:
        """dst += f * src, dropping cancelled entries."""
        for c, x in src.items():
            v = dst.get(c)
            if v is None:
                dst[c] = f * x
            else:
                v = v + f * x
                if v:
                    dst[c] = v
                else:
                    del dst[c]

    def encode(self, a):
        a = mpq(a)
        if a.denominator == 1:
            return int(a.numerator)
        return f"{a.numerator}/{a.denominator}"

    def decode(self, raw):
        if isinstance(raw, bool):
            raise InputError(f"not a rational: {raw!r}")
        if isinstance(raw, int):
            return mpq(raw)
        if isinstance(raw, str):
            text = raw.strip()
            parts = text.split("/")
            try:
                nums = [int(x) for x in parts]
            except ValueError as exc:
                raise InputError(f"not a rational: {raw!r}") from exc
            if len(nums) == 1:
                return mpq(nums[0])
            if len(nums) != 2:
                raise InputError(f"not a rational: {raw!r}")
            num, den = nums
            if den <= 0 or gcd(num, den) != 1:
                raise InputError(f"rational {raw!r} is not in lowest terms with positive denominator")
            return mpq(num, den)
        raise InputError(f"not a rational: {raw!r}")

    def to_json(self):
        return {"kind": "Q"}


class PrimeField(FieldSpec):
    kind = "GF"
    degree = 1

    def __init__(self, p: int):
        if not _is_prime(p):
            raise InputError(f"characteristic {p} is not prime")
        self.p = p
        self.m = 1
        self.characteristic = p
        self.order = p
        self.modulus = None
        self.zero = 0
        self.one = 1

    @property
    def key(self):
        return ("GF", self.p, 1)

    def __repr__(self):
        return f"GF({self.p})"

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def neg(self, a):
        return -a % self.p

    def mul(self, a, b):
        return a * b % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, -1, self.p)

    def is_zero(self, a) -> bool:
        return a == 0

    def from_int(self, n: int):
        return n % self.p

    coerce = from_int

    def elements(self):
        return range(self.p)

    def random_element(self, rng: random.Random, bound: int = 0):
        return rng.randrange(self.p)

    def axpy(self, dst: dict, f, src: dict) -> None:
        p = self.p
        for c, x in src.items():
            v = (dst.get(c, 0) + f * x) % p
            if v:
                dst[c] = v
            else:
                dst.pop(c, None)

    def encode(self, a):
        return [int(a)]

    def decode(self, raw):
        if isinstance(raw, list) and len(raw) == 1:
            raw = raw[0]
        if isinstance(raw, bool) or not isinstance(raw, int):
            raise InputError(f"GF({self.p}) element must be an integer array of length 1, got {raw!r}")
        if not 0 <= raw < self.p:
            raise InputError(f"GF({self.p}) coefficient {raw} out of range")
        return raw

    def to_json(self):
        return {"kind": "GF", "p": self.p, "m": 1, "modulus": []}


class ExtensionField(FieldSpec):
    """GF(p^m), m > 1, presented by a user supplied monic irreducible modulus."""

    kind = "GF"

    def __init__(self, p: int, m: int, modulus: Sequence[int]):
        if not _is_prime(p):
            raise InputError(f"characteristic {p} is not prime")
        if not 1 < m <= MAX_EXTENSION_DEGREE:
            raise InputError(f"extension degree must be in 2..{MAX_EXTENSION_DEGREE}, got {m}")
        mod = [int(c) % p for c in modulus]
        if len(mod) == m:
            mod = mod + [1]
        if len(mod) != m + 1 or mod[-1] != 1:
            raise InputError(f"modulus must be monic of degree {m} (coefficients least degree first)")
        if p**m > MAX_EXTENSION_ORDER:
            raise InputError(f"GF({p}^{m}) exceeds the supported order {MAX_EXTENSION_ORDER}")
        if not is_irreducible_fp(mod, p):
            raise InputError(f"modulus {mod} is reducible over GF({p})")
        self.p, self.m = p, m
        self.modulus = tuple(mod)
        self.characteristic = p
        self.order = p**m
        self.degree = m
        self.zero = 0
        self.one = 1
        self._build_tables()

    def _digits(self, a):
        p = self.p
        return [(a // p**i) % p for i in range(self.m)]

    def _undigits(self, ds):
        p, out = self.p, 0
        for c in reversed(ds):
            out = out * p + c
        return out

    def _build_tables(self):
        q, p = self.order, self.p
        mod = list(self.modulus)
        factors = _prime_factors(q - 1)
        for cand in range(p, q):
            g = _fp_trim(self._digits(cand))
            if all(len(h) != 1 or h[0] != 1 for h in (_fp_powmod(g, (q - 1) // r, mod, p) for r in factors)):
                break
        else:  # pragma: no cover
            raise AssertionError("no primitive element")
        exp = [0] * (2 * (q - 1))
        log = [0] * q
        cur = [1]
        for i in range(q - 1):
            code = self._undigits(cur + [0] * (self.m - len(cur)))
            exp[i] = code
            log[code] = i
            cur = _fp_mulmod(cur, g, mod, p)
        for i in range(q - 1, 2 * (q - 1)):
            exp[i] = exp[i - q + 1]
        self._exp, self._log = exp, log
        self._neg = [self._undigits([(-d) % p for d in self._digits(a)]) for a in range(q)]
        if p == 2:
            self._add_table = None
        elif q <= 1024:
            self._add_table = [
                [self._undigits([(x + y) % p for x, y in zip(self._digits(a), self._digits(b))]) for b in range(q)]
                for a in range(q)
            ]
        else:
            self._add_table = None

    @property
    def key(self):
        return ("GF", self.p, self.m, self.modulus)

    def __repr__(self):
        return f"GF({self.p}^{self.m})"

    def add(self, a, b):
        if self.p == 2:
            return a ^ b
        if self._add_table is not None:
            return self._add_table[a][b]
        p = self.p
        return self._undigits([(x + y) % p for x, y in zip(self._digits(a), self._digits(b))])

    def neg(self, a):
        return self._neg[a]

    def mul(self, a, b):
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return self._exp[(self.order - 1 - self._log[a]) % (self.order - 1)]

    def is_zero(self, a) -> bool:
        return a == 0

    def from_int(self, n: int):
        return n % self.p

    def coerce(self, x):
        if isinstance(x, bool) or not isinstance(x, int) or not 0 <= x < self.order:
            raise InputError(f"{x!r} is not an element code of {self!r}")
        return x

    def elements(self):
        return range(self.order)

    def random_element(self, rng: random.Random, bound: int = 0):
        return rng.randrange(self.order)

    def axpy(self, dst: dict, f, src: dict) -> None:
        for c, x in src.items():
            v = self.add(dst.get(c, 0), self.mul(f, x))
            if v:
                dst[c] = v
            else:
                dst.pop(c, None)

    def encode(self, a):
        return self._digits(a)

    def decode(self, raw):
        if not isinstance(raw, list) or len(raw) != self.m:
            raise InputError(f"{self!r} element must be an integer array of length {self.m}, got {raw!r}")
        if any(isinstance(c, bool) or not isinstance(c, int) or not 0 <= c < self.p for c in raw):
            raise InputError(f"{self!r} coefficients must lie in 0..{self.p - 1}, got {raw!r}")
        return self._undigits(raw)

    def to_json(self):
        return {"kind": "GF", "p": self.p, "m": self.m, "modulus": list(self.modulus)}


QQ = Rationals()
_FIELD_CACHE: dict = {}


def GF(p: int, m: int = 1, modulus: Sequence[int] | None = None) -> FieldSpec:
    """Return GF(p^m).  For m > 1 the modulus must be given (it is validated)."""
    if m == 1:
        key = ("GF", p, 1)
    else:
        if modulus is None:
            raise InputError("GF(p^m) with m > 1 needs an explicit modulus")
        mod = [int(c) % p for c in modulus]
        if len(mod) == m:
            mod = mod + [1]
        key = ("GF", p, m, tuple(mod))
    if key not in _FIELD_CACHE:
        _FIELD_CACHE[key] = PrimeField(p) if m == 1 else ExtensionField(p, m, modulus)
    return _FIELD_CACHE[key]


def field_from_json(obj) -> FieldSpec:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise InputError(f"field must be an object with a 'kind', got {obj!r}")
    if obj["kind"] == "Q":
        return QQ
    if obj["kind"] == "GF":
        try:
            p, m = int(obj["p"]), int(obj.get("m", 1))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"GF field needs integer 'p' and 'm': {obj!r}") from exc
        if m < 1:
            raise InputError(f"extension degree must be >= 1, got {m}")
        modulus = obj.get("modulus") or None
        return GF(p, m, modulus)
    raise InputError(f"unknown field kind {obj['kind']!r}")


# ---------------------------------------------------------------------------
# sparse elimination
# ---------------------------------------------------------------------------

def rref_sparse(F: FieldSpec, rows: Iterable[dict]) -> dict:
    """Reduced row echelon form of the span of sparse rows.

    Returns ``{pivot_column: row}``; every row has a 1 at its pivot, zeros in
    all other pivot columns and zeros left of its pivot.  The result depends
    only on the row space.
    """
    piv: dict = {}
    is_zero, axpy, neg = F.is_zero, F.axpy, F.neg
    for r in rows:
        v = {c: x for c, x in r.items() if not is_zero(x)}
        heap = [c for c in v if c in piv]
        heapq.heapify(heap)
        while heap:
            c = heapq.heappop(heap)
            x = v.get(c)
            if x is None:
                continue
            prow = piv[c]
            axpy(v, neg(x), prow)
            for k in prow:
                if k > c and k in piv and k in v:
                    heapq.heappush(heap, k)
        if not v:
            continue
        c0 = min(v)
        inv = F.inv(v[c0])
        piv[c0] = {c: F.mul(inv, x) for c, x in v.items()}
    # back substitution, largest pivot first
    for c in sorted(piv, reverse=True):
        row = piv[c]
        for k in sorted((k for k in row if k != c and k in piv), reverse=True):
            x = row.get(k)
            if x is not None:
                axpy(row, neg(x), piv[k])
    return piv


def kernel_from_rref(F: FieldSpec, piv: dict, ncols: int) -> list[dict]:
    """Right kernel basis (sparse) from an RREF, one vector per free column, in column order."""
    free = [j for j in range(ncols) if j not in piv]
    vecs = {j: {j: F.one} for j in free}
    for c, row in piv.items():
        for j, x in row.items():
            if j != c:
                vecs[j][c] = F.neg(x)
    return [vecs[j] for j in free]


# ---------------------------------------------------------------------------
# matrices
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ExactMatrix:
    field: FieldSpec
    rows: int
    cols: int
    entries: tuple = dc_field(repr=False)

    def __post_init__(self):
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise InputError(f"matrix entries do not match shape {self.rows}x{self.cols}")

    # construction -------------------------------------------------------
    @classmethod
    def from_rows(cls, F: FieldSpec, rows, cols: int | None = None) -> "ExactMatrix":
        rows = [tuple(F.coerce(x) for x in r) for r in rows]
        ncols = cols if cols is not None else (len(rows[0]) if rows else 0)
        return cls(F, len(rows), ncols, tuple(rows))

    @classmethod
    def identity(cls, F: FieldSpec, n: int) -> "ExactMatrix":
        z, o = F.zero, F.one
        return cls(F, n, n, tuple(tuple(o if i == j else z for j in range(n)) for i in range(n)))

    @classmethod
    def zeros(cls, F: FieldSpec, r: int, c: int) -> "ExactMatrix":
        return cls(F, r, c, tuple((F.zero,) * c for _ in range(r)))

    @classmethod
    def from_sparse_columns(cls, F: FieldSpec, nrows: int, cols: Sequence[dict]) -> "ExactMatrix":
        data = [[F.zero] * len(cols) for _ in range(nrows)]
        for j, col in enumerate(cols):
            for i, x in col.items():
                data[i][j] = x
        return cls(F, nrows, len(cols), tuple(tuple(r) for r in data))

    @classmethod
    def block_diag(cls, F: FieldSpec, blocks: Sequence["ExactMatrix"]) -> "ExactMatrix":
        n = sum(b.rows for b in blocks)
        m = sum(b.cols for b in blocks)
        data = [[F.zero] * m for _ in range(n)]
        r0 = c0 = 0
        for b in blocks:
            for i, row in enumerate(b.entries):
                data[r0 + i][c0:c0 + b.cols] = row
            r0 += b.rows
            c0 += b.cols
        return cls(F, n, m, tuple(tuple(r) for r in data))

    # basic algebra ------------------------------------------------------
    def __eq__(self, other):
        return (
            isinstance(other, ExactMatrix)
            and self.field == other.field
            and self.rows == other.rows
            and self.cols == other.cols
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.cols != other.rows:
            raise InputError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        F = self.field
        zero = F.zero
        ocols = other.sparse_rows()
        out = []
        if F.kind == "Q" or isinstance(F, PrimeField):
            p = getattr(F, "p", None)
            for row in self.entries:
                acc: dict = {}
                for k, a in enumerate(row):
                    if a:
                        for j, b in ocols[k].items():
                            acc[j] = acc.get(j, 0) + a * b
                if p is None:
                    out.append(tuple(mpq(acc.get(j, 0)) for j in range(other.cols)))
                else:
                    out.append(tuple(acc.get(j, 0) % p for j in range(other.cols)))
        else:
            for row in self.entries:
                acc = {}
                for k, a in enumerate(row):
                    if a:
                        F.axpy(acc, a, ocols[k])
                out.append(tuple(acc.get(j, zero) for j in range(other.cols)))
        return ExactMatrix(F, self.rows, other.cols, tuple(out))

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._same_shape(other)
        add = self.field.add
        return ExactMatrix(self.field, self.rows, self.cols, tuple(
            tuple(add(a, b) for a, b in zip(r, s)) for r, s in zip(self.entries, other.entries)))

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._same_shape(other)
        sub = self.field.sub
        return ExactMatrix(self.field, self.rows, self.cols, tuple(
            tuple(sub(a, b) for a, b in zip(r, s)) for r, s in zip(self.entries, other.entries)))

    def __neg__(self) -> "ExactMatrix":
        neg = self.field.neg
        return ExactMatrix(self.field, self.rows, self.cols, tuple(tuple(neg(a) for a in r) for r in self.entries))

    def scale(self, c) -> "ExactMatrix":
        mul = self.field.mul
        return ExactMatrix(self.field, self.rows, self.cols, tuple(tuple(mul(c, a) for a in r) for r in self.entries))

    def _same_shape(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise InputError(f"shape mismatch {self.rows}x{self.cols} vs {other.rows}x{other.cols}")

    @property
    def T(self) -> "ExactMatrix":
        return ExactMatrix(self.field, self.cols, self.rows, tuple(zip(*self.entries)) if self.rows else
                           tuple(() for _ in range(self.cols)))

    def kron(self, other: "ExactMatrix") -> "ExactMatrix":
        """Kronecker product, left factor major."""
        F = self.field
        mul, z = F.mul, F.zero
        out = []
        for r in self.entries:
            for s in other.entries:
                out.append(tuple(mul(a, b) if a and b else z for a in r for b in s))
        return ExactMatrix(F, self.rows * other.rows, self.cols * other.cols, tuple(out))

    def power(self, e: int) -> "ExactMatrix":
        result = ExactMatrix.identity(self.field, self.rows)
        base = self
        while e:
            if e & 1:
                result = result @ base
            e >>= 1
            if e:
                base = base @ base
        return result

    def is_zero(self) -> bool:
        isz = self.field.is_zero
        return all(isz(a) for r in self.entries for a in r)

    def is_identity(self) -> bool:
        return self == ExactMatrix.identity(self.field, self.rows) and self.rows == self.cols

    def trace(self):
        t = self.field.zero
        for i in range(min(self.rows, self.cols)):
            t = self.field.add(t, self.entries[i][i])
        return t

    def submatrix(self, r0, r1, c0, c1) -> "ExactMatrix":
        return ExactMatrix(self.field, r1 - r0, c1 - c0, tuple(tuple(r[c0:c1]) for r in self.entries[r0:r1]))

    def hstack(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.rows != other.rows:
            raise InputError("hstack needs equal row counts")
        return ExactMatrix(self.field, self.rows, self.cols + other.cols,
                           tuple(a + b for a, b in zip(self.entries, other.entries)))

    def sparse_rows(self) -> list[dict]:
        isz = self.field.is_zero
        return [{j: a for j, a in enumerate(r) if not isz(a)} for r in self.entries]

    def column(self, j: int) -> tuple:
        return tuple(r[j] for r in self.entries)

    def apply(self, v: Sequence) -> tuple:
        F = self.field
        out = []
        for r in self.entries:
            acc = F.zero
            for a, b in zip(r, v):
                if a and b:
                    acc = F.add(acc, F.mul(a, b))
            out.append(acc)
        return tuple(out)

    def inverse(self) -> "ExactMatrix":
        if self.rows != self.cols:
            raise InputError("only square matrices are invertible")
        n = self.rows
        F = self.field
        aug = [{**r, n + i: F.one} for i, r in enumerate(self.sparse_rows())]
        piv = rref_sparse(F, aug)
        if any(c not in piv for c in range(n)):
            raise InputError("matrix is singular")
        data = [[piv[i].get(n + j, F.zero) for j in range(n)] for i in range(n)]
        return ExactMatrix(F, n, n, tuple(tuple(r) for r in data))

    def flatten(self) -> dict:
        """Sparse row-major vectorisation."""
        out = {}
        isz = self.field.is_zero
        c = self.cols
        for i, r in enumerate(self.entries):
            for j, a in enumerate(r):
                if not isz(a):
                    out[i * c + j] = a
        return out

    @classmethod
    def unflatten(cls, F: FieldSpec, vec: dict, rows: int, cols: int) -> "ExactMatrix":
        data = [[F.zero] * cols for _ in range(rows)]
        for k, a in vec.items():
            data[k // cols][k % cols] = a
        return cls(F, rows, cols, tuple(tuple(r) for r in data))

    # serialisation ------------------------------------------------------
    def to_json(self):
        enc = self.field.encode
        return [[enc(a) for a in r] for r in self.entries]

    @classmethod
    def from_json(cls, F: FieldSpec, raw, rows: int | None = None, cols: int | None = None) -> "ExactMatrix":
        if not isinstance(raw, list) or any(not isinstance(r, list) for r in raw):
            raise InputError("matrix must be a list of rows")
        data = tuple(tuple(F.decode(x) for x in r) for r in raw)
        nr = len(data)
        nc = len(data[0]) if data else (cols or 0)
        if rows is not None and nr != rows or cols is not None and nc != cols:
            raise InputError(f"expected a {rows}x{cols} matrix, got {nr}x{nc}")
        return cls(F, nr, nc, data)

    def __repr__(self):
        return f"ExactMatrix({self.field!r}, {self.rows}x{self.cols}, {self.to_json()})"


def rank(M: ExactMatrix) -> int:
    return len(rref_sparse(M.field, M.sparse_rows()))


def kernel_basis(M: ExactMatrix) -> list[tuple]:
    """Right null space basis in reduced-echelon order (one vector per free column)."""
    F = M.field
    piv = rref_sparse(F, M.sparse_rows())
    vecs = kernel_from_rref(F, piv, M.cols)
    return [tuple(v.get(j, F.zero) for j in range(M.cols)) for v in vecs]


def solve(M: ExactMatrix, b: Sequence):
    """One solution of ``M x = b`` (free variables set to zero) or ``None``."""
    if len(b) != M.rows:
        raise InputError(f"right-hand side has length {len(b)}, expected {M.rows}")
    F = M.field
    n = M.cols
    rows = []
    for r, bi in zip(M.sparse_rows(), b):
        bi = F.coerce(bi)
        if not F.is_zero(bi):
            r = dict(r)
            r[n] = bi
        rows.append(r)
    piv = rref_sparse(F, rows)
    if n in piv:
        return None
    x = [F.zero] * n
    for c, row in piv.items():
        x[c] = row.get(n, F.zero)
    return tuple(x)


def column_space_basis(M: ExactMatrix) -> list[dict]:
    """Basis of the column space as sparse columns, in RREF order of M^T."""
    piv = rref_sparse(M.field, M.T.sparse_rows())
    return [piv[c] for c in sorted(piv)]
