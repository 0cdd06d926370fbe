"""Exact arithmetic in GF(p^m) for odd primes p.

Elements are plain ints.  The coefficient vector (c_0, ..., c_{m-1}) of
c_0 + c_1 x + ... + c_{m-1} x^{m-1} (reduced modulo the field polynomial)
is packed as ``sum(c_i * p**i)``, so 0 and 1 keep their usual meaning and
the prime subfield occupies codes 0..p-1 under every modulus.

Multiplication, inversion and powers go through exp/log tables taken over
a primitive element ``alpha``; addition uses Zech logarithms.  Vectorised
numpy variants (``*_vec``) accept integer arrays of codes.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import FieldError, NotIrreducibleError, NotPrimitiveError

MAX_ORDER = 1 << 20


# ---------------------------------------------------------------------------
# integers
# ---------------------------------------------------------------------------

def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_factors(n: int) -> list[int]:
    """Distinct prime divisors of ``n`` in ascending order."""
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def prime_power(q: int) -> tuple[int, int]:
    """Split ``q = p**m``; raise FieldError if ``q`` is not a prime power."""
    ps = prime_factors(q) if q > 1 else []
    if len(ps) != 1:
        raise FieldError(f"{q} is not a prime power")
    p, m = ps[0], 0
    while q > 1:
        q //= p
        m += 1
    return p, m


# ---------------------------------------------------------------------------
# polynomials over GF(p): ascending coefficient lists without trailing zeros
# ---------------------------------------------------------------------------

def _ptrim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a: Sequence[int], f: Sequence[int], p: int) -> list[int]:
    """Remainder of ``a`` modulo monic ``f``."""
    a = _ptrim([c % p for c in a])
    df = len(f) - 1
    while len(a) - 1 >= df:
        c = a[-1]
        shift = len(a) - 1 - df
        for i in range(df + 1):
            a[shift + i] = (a[shift + i] - c * f[i]) % p
        _ptrim(a)
    return a


def _pmulmod(a: Sequence[int], b: Sequence[int], f: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    r = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                r[i + j] += x * y
    return _pmod(r, f, p)


def _ppowmod(a: Sequence[int], e: int, f: Sequence[int], p: int) -> list[int]:
    result = [1]
    base = _pmod(a, f, p)
    while e:
        if e & 1:
            result = _pmulmod(result, base, f, p)
        e >>= 1
        if e:
            base = _pmulmod(base, base, f, p)
    return result


def _psub(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    return _ptrim([((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p
                   for i in range(n)])


def _pgcd(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    a, b = _ptrim([c % p for c in a]), _ptrim([c % p for c in b])
    while b:
        inv = pow(b[-1], -1, p)
        b = [c * inv % p for c in b]
        a, b = b, _pmod(a, b, p)
    if a:
        inv = pow(a[-1], -1, p)
        a = [c * inv % p for c in a]
    return a


def is_irreducible(modulus: Sequence[int], p: int) -> bool:
    """Rabin's test for a monic polynomial given in ascending coefficients."""
    f = list(modulus)
    m = len(f) - 1
    if m < 1:
        return False
    if m == 1:
        return True
    x = [0, 1]
    if _ppowmod(x, p ** m, f, p) != _pmod(x, f, p):
        return False
    for r in prime_factors(m):
        h = _ppowmod(x, p ** (m // r), f, p)
        if _pgcd(f, _psub(h, x, p), p) != [1]:
            return False
    return True


def root_order(modulus: Sequence[int], p: int) -> int:
    """Multiplicative order of x modulo an irreducible ``modulus``."""
    f = list(modulus)
    n = p ** (len(f) - 1) - 1
    order = n
    for r in prime_factors(n):
        while order % r == 0 and _ppowmod([0, 1], order // r, f, p) == [1]:
            order //= r
    return order


def find_primitive_polynomial(p: int, m: int) -> tuple[int, ...]:
    """First primitive monic polynomial of degree ``m`` over GF(p).

    For m >= 2 candidates are scanned by ascending base-p code of the low
    coefficients (c_0, ..., c_{m-1}).  For m == 1 the modulus is x - g with
    g the least primitive root mod p.
    """
    if m == 1:
        for g in range(1, p):
            if root_order((-g % p, 1), p) == p - 1:
                return (-g % p, 1)
    for code in range(1, p ** m):
        low = [(code // p ** i) % p for i in range(m)]
        if low[0] == 0:
            continue
        f = tuple(low) + (1,)
        if is_irreducible(f, p) and root_order(f, p) == p ** m - 1:
            return f
    raise FieldError(f"no primitive polynomial of degree {m} over GF({p})")  # pragma: no cover


def format_polynomial(coeffs: Sequence[int], var: str = "x") -> str:
    terms = []
    for i in range(len(coeffs) - 1, -1, -1):
        c = coeffs[i]
        if not c:
            continue
        mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        if i == 0:
            terms.append(str(c))
        else:
            terms.append(mono if c == 1 else f"{c}{mono}")
    return "+".join(terms) or "0"


# ---------------------------------------------------------------------------
# linear algebra over GF(p)
# ---------------------------------------------------------------------------

def fp_rref(rows: Iterable[Sequence[int]], p: int) -> tuple[list[list[int]], list[int]]:
    """Reduced row echelon form mod p; returns (nonzero rows, pivot columns)."""
    mat = [[c % p for c in row] for row in rows]
    pivots: list[int] = []
    if not mat:
        return [], pivots
    ncols = len(mat[0])
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(mat)) if mat[i][col]), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = pow(mat[r][col], -1, p)
        mat[r] = [c * inv % p for c in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][col]:
                c = mat[i][col]
                mat[i] = [(x - c * y) % p for x, y in zip(mat[i], mat[r])]
        pivots.append(col)
        r += 1
        if r == len(mat):
            break
    return mat[:r], pivots


def fp_rank(rows: Iterable[Sequence[int]], p: int) -> int:
    return len(fp_rref(rows, p)[0])


def fp_nullspace(rows: Sequence[Sequence[int]], ncols: int, p: int) -> list[list[int]]:
    """Basis of {x : A x = 0} over GF(p) for the matrix with the given rows."""
    red, pivots = fp_rref(rows, p) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fcol in free:
        v = [0] * ncols
        v[fcol] = 1
        for row, pc in zip(red, pivots):
            v[pc] = -row[fcol] % p
        basis.append(v)
    return basis


# ---------------------------------------------------------------------------
# fields
# ---------------------------------------------------------------------------

_TERM = re.compile(r"^(\d*)\*?(a|alpha|x)(?:\^(-?\d+))?$")


class GF:
    """The finite field GF(p^m) defined by a monic irreducible modulus.

    Parameters
    ----------
    p : int
        Odd prime characteristic.
    m : int
        Extension degree.
    modulus : sequence of int, optional
        Ascending coefficients ``[c_0, ..., c_{m-1}, 1]``.  When omitted the
        first primitive polynomial is used (see ``find_primitive_polynomial``).
    require_primitive : bool
        Reject an irreducible modulus whose root is not a primitive element.
        With ``False`` the field is still built; ``alpha`` is then the least
        primitive element by code and ``root`` is the residue of x.
    """

    def __init__(self, p: int, m: int = 1, modulus: Sequence[int] | None = None,
                 *, require_primitive: bool = True):
        if not is_prime(p):
            raise FieldError(f"characteristic {p} is not prime")
        if p == 2:
            raise FieldError("characteristic 2 is not supported (p must be odd)")
        if m < 1:
            raise FieldError(f"degree must be positive, got {m}")
        q = p ** m
        if q > MAX_ORDER:
            raise FieldError(f"GF({p}^{m}) exceeds the table limit of {MAX_ORDER} elements")
        if modulus is None:
            mod = find_primitive_polynomial(p, m)
        else:
            mod = tuple(int(c) % p for c in modulus)
            if len(mod) != m + 1 or mod[-1] != 1:
                raise FieldError(f"modulus must be monic of degree {m}: {list(modulus)}")
        if not is_irreducible(mod, p):
            raise NotIrreducibleError(f"{format_polynomial(mod)} is reducible over GF({p})")
        order = root_order(mod, p)
        if order != q - 1 and require_primitive:
            raise NotPrimitiveError(
                f"{format_polynomial(mod)} is irreducible over GF({p}) but not primitive: "
                f"its root has order {order}, not {q - 1}", order)

        self.p, self.m, self.q = p, m, q
        self.modulus: tuple[int, ...] = mod
        self.root_order = order
        self._place = [p ** i for i in range(m)]
        self._build_tables(order == q - 1)

    # -- construction -----------------------------------------------------

    def _build_tables(self, root_is_primitive: bool) -> None:
        p, m, q, f = self.p, self.m, self.q, self.modulus
        if root_is_primitive:
            gen = [0, 1] if m > 1 else [(-f[0]) % p]
        else:
            gen = None
            for code in range(2, q):
                cand = self._code_to_list(code)
                if all(_ppowmod(cand, (q - 1) // r, f, p) != [1] for r in prime_factors(q - 1)):
                    gen = cand
                    break
        exp = [0] * (q - 1)
        log = [-1] * q
        cur = [1] + [0] * (m - 1)
        for k in range(q - 1):
            code = sum(c * w for c, w in zip(cur, self._place))
            if log[code] != -1:
                raise FieldError("generator does not span the unit group")  # pragma: no cover
            exp[k] = code
            log[code] = k
            if root_is_primitive and m > 1:
                top = cur[-1]
                cur = [0] + cur[:-1]
                if top:
                    cur = [(c - top * fi) % p for c, fi in zip(cur, f)]
            else:
                cur = _pmulmod(cur, gen, f, p)
                cur = cur + [0] * (m - len(cur))
        self._exp = exp
        self._log = log
        # Zech logarithms: 1 + alpha^k = alpha^zech[k], -1 when the sum vanishes
        one = [1] + [0] * (m - 1)
        zech = [-1] * (q - 1)
        digits = np.array([[(c // w) % p for w in self._place] for c in range(q)], dtype=np.int64)
        for k in range(q - 1):
            d = digits[exp[k]].copy()
            d[0] = (d[0] + one[0]) % p
            s = int(d @ np.array(self._place, dtype=np.int64))
            zech[k] = log[s]
        self._zech = zech
        self.exp_table = np.array(exp, dtype=np.int64)
        self.log_table = np.array(log, dtype=np.int64)
        self.digits = digits
        self._place_arr = np.array(self._place, dtype=np.int64)

    def _code_to_list(self, code: int) -> list[int]:
        return _ptrim([(code // w) % self.p for w in self._place])

    # -- identity ---------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        return isinstance(other, GF) and (self.p, self.modulus) == (other.p, other.modulus)

    def __hash__(self) -> int:
        return hash((self.p, self.modulus))

    def __repr__(self) -> str:
        size = f"{self.p}^{self.m}" if self.m > 1 else str(self.p)
        return f"GF({size}, {format_polynomial(self.modulus)})"

    def to_json(self) -> dict:
        return {"p": self.p, "m": self.m, "modulus_coeffs": list(self.modulus)}

    @classmethod
    def from_json(cls, data: dict, *, require_primitive: bool = True) -> "GF":
        return cls(int(data["p"]), int(data["m"]), data.get("modulus_coeffs"),
                   require_primitive=data.get("require_primitive", require_primitive))

    # -- elements ---------------------------------------------------------

    @property
    def is_primitive_root(self) -> bool:
        return self.root_order == self.q - 1

    @cached_property
    def zero(self) -> "FieldElement":
        return FieldElement(self, 0)

    @cached_property
    def one(self) -> "FieldElement":
        return FieldElement(self, 1)

    @cached_property
    def alpha(self) -> "FieldElement":
        """The primitive element the exp/log tables are built on."""
        return FieldElement(self, self._exp[1 % (self.q - 1)] if self.q > 2 else 1)

    @cached_property
    def root(self) -> "FieldElement":
        """Residue of x modulo the field polynomial."""
        return FieldElement(self, self.p if self.m > 1 else (-self.modulus[0]) % self.p)

    def element(self, value: int | str | Sequence[int] | "FieldElement") -> "FieldElement":
        return FieldElement(self, self.code(value))

    __call__ = element

    def code(self, value: int | str | Sequence[int] | "FieldElement") -> int:
        """Normalise an int code, a coefficient sequence, a string or an element."""
        if isinstance(value, FieldElement):
            if value.field != self:
                raise FieldError(f"element of {value.field} used in {self}")
            return value.code
        if isinstance(value, str):
            return self.parse(value)
        if isinstance(value, (int, np.integer)):
            v = int(value)
            if not 0 <= v < self.q:
                raise FieldError(f"code {v} out of range for {self}")
            return v
        return self.from_coeffs(value)

    def coeffs(self, a: int) -> tuple[int, ...]:
        return tuple((a // w) % self.p for w in self._place)

    def from_coeffs(self, coeffs: Sequence[int]) -> int:
        if len(coeffs) > self.m:
            raise FieldError(f"too many coefficients for {self}: {list(coeffs)}")
        return sum((int(c) % self.p) * w for c, w in zip(coeffs, self._place))

    def elements(self) -> range:
        return range(self.q)

    # -- scalar arithmetic on codes ----------------------------------------

    def add(self, a: int, b: int) -> int:
        if a == 0:
            return b
        if b == 0:
            return a
        la, n = self._log[a], self.q - 1
        z = self._zech[(self._log[b] - la) % n]
        return 0 if z < 0 else self._exp[(la + z) % n]

    def neg(self, a: int) -> int:
        if a == 0:
            return 0
        return self._exp[(self._log[a] + (self.q - 1) // 2) % (self.q - 1)]

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self._exp[(self._log[a] + self._log[b]) % (self.q - 1)]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no inverse")
        return self._exp[-self._log[a] % (self.q - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, n: int) -> int:
        """a**n with 0**0 == 1; negative n needs a nonzero base."""
        if a == 0:
            if n < 0:
                raise ZeroDivisionError("0 raised to a negative power")
            return 1 if n == 0 else 0
        return self._exp[(self._log[a] * n) % (self.q - 1)]

    def scalar(self, c: int) -> int:
        """Image of the integer c in the prime subfield."""
        return c % self.p

    def alpha_pow(self, k: int) -> int:
        return self._exp[k % (self.q - 1)]

    def dlog(self, a: int) -> int:
        if a == 0:
            raise FieldError("discrete logarithm of zero")
        return self._log[a]

    def order(self, a: int) -> int:
        """Multiplicative order of a nonzero element."""
        return (self.q - 1) // math.gcd(self.dlog(a), self.q - 1)

    def frobenius(self, a: int, j: int = 1) -> int:
        return self.pow(a, self.p ** (j % self.m))

    def trace(self, a: int, k: int = 1) -> int:
        """Tr_{p^m / p^k}(a) as a code of the subfield element."""
        if self.m % k:
            raise FieldError(f"GF({self.p}^{k}) is not a subfield of {self}")
        s, y, step = 0, a, self.p ** k
        for _ in range(self.m // k):
            s = self.add(s, y)
            y = self.pow(y, step)
        return s

    def in_subfield(self, a: int, k: int) -> bool:
        if self.m % k:
            return False
        return a == 0 or self._log[a] % ((self.q - 1) // (self.p ** k - 1)) == 0

    def subfield_elements(self, k: int) -> list[int]:
        """Codes of GF(p^k) inside this field, ascending."""
        if self.m % k:
            raise FieldError(f"GF({self.p}^{k}) is not a subfield of {self}")
        step = (self.q - 1) // (self.p ** k - 1)
        return sorted([0] + [self._exp[i] for i in range(0, self.q - 1, step)])

    # -- vectorised arithmetic ----------------------------------------------

    def add_vec(self, a, b) -> np.ndarray:
        return ((self.digits[a] + self.digits[b]) % self.p) @ self._place_arr

    def neg_vec(self, a) -> np.ndarray:
        return ((-self.digits[a]) % self.p) @ self._place_arr

    def sub_vec(self, a, b) -> np.ndarray:
        return ((self.digits[a] - self.digits[b]) % self.p) @ self._place_arr

    def mul_vec(self, a, b) -> np.ndarray:
        a, b = np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
        out = self.exp_table[(self.log_table[a] + self.log_table[b]) % (self.q - 1)]
        return np.where((a == 0) | (b == 0), 0, out)

    def pow_vec(self, a, n: int) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        out = self.exp_table[(self.log_table[a] * n) % (self.q - 1)]
        return np.where(a == 0, 1 if n == 0 else 0, out)

    def scale_vec(self, c: int, a) -> np.ndarray:
        return self.mul_vec(np.full(np.shape(a), c, dtype=np.int64), a)

    def trace_vec(self, a, k: int = 1) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        s, y = np.zeros_like(a), a
        for _ in range(self.m // k):
            s = self.add_vec(s, y)
            y = self.pow_vec(y, self.p ** k)
        return s

    # -- text ---------------------------------------------------------------

    def parse(self, text: str) -> int:
        """Parse an element written as a code, ``[c0,c1,..]`` or a sum of terms.

        Terms look like ``3``, ``a``, ``2a``, ``a^11``, ``2*a^11`` where ``a``
        is the primitive element ``alpha`` and ``x`` the modulus root.
        """
        s = text.strip().replace(" ", "")
        if not s:
            raise FieldError("empty element")
        if s[0] in "[(":
            inner = s.strip("[]()")
            return self.from_coeffs([int(c) for c in inner.split(",") if c])
        if re.fullmatch(r"\d+", s):
            return self.code(int(s))
        total = 0
        for sign, term in re.findall(r"([+-]?)([^+-]+)", s):
            total = self.add(total, self.neg(self._parse_term(term)) if sign == "-"
                             else self._parse_term(term))
        return total

    def _parse_term(self, term: str) -> int:
        if re.fullmatch(r"\d+", term):
            return self.scalar(int(term))
        mt = _TERM.match(term)
        if not mt:
            raise FieldError(f"cannot parse field element term {term!r}")
        coef = int(mt.group(1)) if mt.group(1) else 1
        base = self.alpha.code if mt.group(2) in ("a", "alpha") else self.root.code
        e = int(mt.group(3)) if mt.group(3) else 1
        return self.mul(self.scalar(coef), self.pow(base, e))

    def format(self, a: int) -> str:
        """Power notation relative to alpha: ``0``, ``1``, ``a``, ``a^k``."""
        if a == 0:
            return "0"
        k = self._log[a]
        return "1" if k == 0 else ("a" if k == 1 else f"a^{k}")


FieldSpec = GF


@dataclass(frozen=True)
class FieldElement:
    """An element of a GF instance with operator support.

    Integers on either side of an operator are read as prime-field scalars.
    """

    field: GF
    code: int

    def __post_init__(self):
        if not 0 <= self.code < self.field.q:
            raise FieldError(f"code {self.code} out of range for {self.field}")

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldError(f"mismatched fields: {self.field} and {other.field}")
            return other.code
        if isinstance(other, (int, np.integer)):
            return self.field.scalar(int(other))
        return NotImplemented

    def _wrap(self, code: int) -> "FieldElement":
        return FieldElement(self.field, code)

    def __add__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.add(self.code, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.sub(self.code, o))

    def __rsub__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.sub(o, self.code))

    def __mul__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.mul(self.code, o))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.div(self.code, o))

    def __rtruediv__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.div(o, self.code))

    def __neg__(self):
        return self._wrap(self.field.neg(self.code))

    def __pow__(self, n: int):
        return self._wrap(self.field.pow(self.code, int(n)))

    def __bool__(self) -> bool:
        return self.code != 0

    def __int__(self) -> int:
        return self.code

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self.field.coeffs(self.code)

    def dlog(self) -> int:
        return self.field.dlog(self.code)

    def order(self) -> int:
        return self.field.order(self.code)

    def frobenius(self, j: int = 1) -> "FieldElement":
        return self._wrap(self.field.frobenius(self.code, j))

    def __repr__(self) -> str:
        return f"{self.field.format(self.code)} in {self.field!r}"

    def __str__(self) -> str:
        return self.field.format(self.code)


# ---------------------------------------------------------------------------
# field towers
# ---------------------------------------------------------------------------

def minimal_polynomial(field: GF, a: int) -> tuple[int, ...]:
    """Minimal polynomial of ``a`` over GF(p), ascending and monic."""
    conj = [a]
    y = field.frobenius(a)
    while y != a:
        conj.append(y)
        y = field.frobenius(y)
    poly = [1]
    for c in conj:
        nc = field.neg(c)
        out = [0] * (len(poly) + 1)
        for i, coef in enumerate(poly):
            out[i + 1] = field.add(out[i + 1], coef)
            out[i] = field.add(out[i], field.mul(coef, nc))
        poly = out
    if any(c >= field.p for c in poly):
        raise FieldError("minimal polynomial has coefficients outside GF(p)")  # pragma: no cover
    return tuple(poly)


class Tower:
    """GF(Q) viewed as a degree-n extension of its subfield GF(q), Q = q^n.

    The base field is a separate ``GF`` instance.  ``embed`` maps base codes
    to top codes through a root of the base modulus inside the top field, so
    it is a field homomorphism by construction; ``restrict`` inverts it on
    the image, which is checked to equal the fixed points of x -> x^q.

    When ``base`` is omitted it is built from the minimal polynomial of
    ``theta**((Q-1)/(q-1))``, so the base primitive element is that power of
    the top primitive element ``theta``.  With an explicit ``base`` the
    image of its root defaults to the smallest matching code; pass
    ``root_image`` to pin another one.
    """

    def __init__(self, top: GF, k: int, base: GF | None = None, root_image: int | None = None):
        if k < 1 or top.m % k:
            raise FieldError(f"degree {k} does not divide {top.m}")
        p = top.p
        self.top = top
        self.k = k
        self.n = top.m // k
        q = p ** k
        step = (top.q - 1) // (q - 1)
        if base is None:
            gamma = top.alpha_pow(step)
            base = GF(p, k, minimal_polynomial(top, gamma))
            root_image = gamma
        else:
            if base.p != p or base.m != k:
                raise FieldError(f"{base} is not a degree-{k} subfield of {top}")
            roots = []
            for r in top.subfield_elements(k):
                acc = 0
                for c in reversed(base.modulus):
                    acc = top.add(top.mul(acc, r), c)
                if acc == 0:
                    roots.append(r)
            if root_image is None:
                root_image = roots[0]
            elif root_image not in roots:
                raise FieldError(f"{top.format(root_image)} is not a root of {base.modulus}")
        self.base = base
        self.root_image = root_image
        powers = [1]
        for _ in range(1, k):
            powers.append(top.mul(powers[-1], root_image))
        embed = [0] * base.q
        for b in range(base.q):
            acc = 0
            for c, w in zip(base.coeffs(b), powers):
                if c:
                    acc = top.add(acc, top.mul(c, w))
            embed[b] = acc
        self._embed = embed
        self._restrict = {t: b for b, t in enumerate(embed)}
        self._embed_arr = np.array(embed, dtype=np.int64)
        restrict_arr = np.full(top.q, -1, dtype=np.int64)
        restrict_arr[self._embed_arr] = np.arange(base.q)
        self._restrict_arr = restrict_arr
        self._check()

    def _check(self) -> None:
        top, base = self.top, self.base
        fixed = {x for x in range(top.q) if top.pow(x, base.q) == x}
        if len(self._restrict) != base.q or set(self._restrict) != fixed:
            raise FieldError("embedding image differs from the Frobenius-fixed subfield")
        if self._embed[1] != 1:
            raise FieldError("embedding does not preserve 1")  # pragma: no cover
        a = base.alpha.code
        ea = self._embed[a]
        for b in range(base.q):
            if self._embed[base.mul(a, b)] != top.mul(ea, self._embed[b]):
                raise FieldError("embedding is not multiplicative")  # pragma: no cover

    @property
    def theta(self) -> FieldElement:
        return self.top.alpha

    def embed(self, b: int) -> int:
        return self._embed[b]

    def restrict(self, t: int) -> int:
        try:
            return self._restrict[t]
        except KeyError:
            raise FieldError(f"{self.top.format(t)} does not lie in the subfield") from None

    def embed_vec(self, b) -> np.ndarray:
        return self._embed_arr[np.asarray(b, dtype=np.int64)]

    def restrict_vec(self, t) -> np.ndarray:
        out = self._restrict_arr[np.asarray(t, dtype=np.int64)]
        if np.any(out < 0):
            raise FieldError("values outside the subfield")
        return out

    def trace(self, x: int) -> int:
        """Tr_{Q/q}(x) as a base-field code."""
        return self._restrict[self.top.trace(x, self.k)]

    def trace_vec(self, x) -> np.ndarray:
        return self.restrict_vec(self.top.trace_vec(x, self.k))

    def __repr__(self) -> str:
        return f"Tower({self.top!r} over {self.base!r})"

    def to_json(self) -> dict:
        return {"top": self.top.to_json(), "base": self.base.to_json(),
                "root_image": self.root_image}

    @classmethod
    def from_json(cls, data: dict) -> "Tower":
        top = GF.from_json(data["top"], require_primitive=False)
        base = GF.from_json(data["base"], require_primitive=False)
        return cls(top, base.m, base, data.get("root_image"))


TowerSpec = Tower


# ---------------------------------------------------------------------------
# functional interface
# ---------------------------------------------------------------------------

def field_create(p: int, m: int = 1, modulus: Sequence[int] | None = None,
                 *, require_primitive: bool = True) -> GF:
    return GF(p, m, modulus, require_primitive=require_primitive)


def arith(a: FieldElement, b: FieldElement, op: str) -> FieldElement:
    if a.field != b.field:
        raise FieldError(f"mismatched fields: {a.field} and {b.field}")
    f = a.field
    try:
        fn = {"add": f.add, "sub": f.sub, "mul": f.mul, "div": f.div}[op]
    except KeyError:
        raise ValueError(f"unknown operation {op!r}") from None
    return FieldElement(f, fn(a.code, b.code))


def power(x: FieldElement, n: int) -> FieldElement:
    return x ** n


def dlog(x: FieldElement) -> int:
    return x.field.dlog(x.code)


_TOWER_CACHE: dict[tuple[GF, GF], Tower] = {}


def trace(x: FieldElement, target: GF) -> FieldElement:
    """Tr from x's field down to ``target`` (which must be a subfield)."""
    src = x.field
    if target.p != src.p or src.m % target.m:
        raise FieldError(f"{target} is not a subfield of {src}")
    if target.m == src.m:
        if target != src:
            raise FieldError(f"{target} and {src} are different presentations")
        return x
    if target.m == 1:
        return FieldElement(target, src.trace(x.code, 1))
    key = (src, target)
    if key not in _TOWER_CACHE:
        _TOWER_CACHE[key] = Tower(src, target.m, target)
    return FieldElement(target, _TOWER_CACHE[key].trace(x.code))


def coset_representatives(field: GF, k: int, override: Sequence[int] | None = None) -> list[int]:
    """Additive coset representatives of GF(p^k) in ``field``.

    The default list starts with 1 and adds elements greedily by ascending
    code, skipping any element in the coset of an earlier pick.  An override
    must name exactly p^(m-k) elements in pairwise distinct cosets.
    """
    if k < 1 or field.m % k or k >= field.m:
        raise FieldError(f"k={k} must be a proper divisor of m={field.m}")
    count = field.p ** (field.m - k)
    if override is not None:
        reps = [field.code(a) for a in override]
        if len(reps) != count:
            raise FieldError(f"expected {count} coset representatives, got {len(reps)}")
        for i, a in enumerate(reps):
            for b in reps[:i]:
                if field.in_subfield(field.sub(a, b), k):
                    raise FieldError(
                        f"{field.format(b)} and {field.format(a)} lie in the same coset of GF({field.p}^{k})")
        return reps
    reps = [1]
    for a in range(field.q):
        if len(reps) == count:
            break
        if all(not field.in_subfield(field.sub(a, b), k) for b in reps):
            reps.append(a)
    return reps
